//! IO, file formats, instance generation, and the benchmark harness for
//! the `clusmat-core` matrix multipliers. The `clusmat` binary in this
//! crate is the command-line front end.

pub mod bench;
pub mod error;
pub mod formats;
pub mod parallel;
pub mod planted;
pub mod state;

pub use error::AppError;
