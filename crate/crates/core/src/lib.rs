//! Exact and approximate arithmetic products of dense 0-1 matrices whose
//! rows or columns cluster well in Hamming space.
//!
//! The crate provides:
//! - bit-packed 0-1 matrices with popcount-based Hamming distance and
//!   inner products ([`bitmatrix`]),
//! - k-center clustering of bit vectors: deterministic farthest-point
//!   (Gonzalez) and a randomized variant via sparse sign projection
//!   ([`clustering`]),
//! - approximate products with a certified additive error bound
//!   ([`approx`]),
//! - preprocessing for exact single-entry queries in time proportional
//!   to the clustering radius ([`query`]),
//! - an exact multiplier driven by delta updates along a spanning tree
//!   of the rows ([`exact`]).
//!
//! The crate is `no_std` (requires `alloc`); all IO and the CLI live in
//! the companion `clusmat` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod approx;
pub mod bitmatrix;
pub mod clustering;
pub mod error;
pub mod exact;
pub mod query;

pub use approx::{
    mmclus_approx, mmclus_approx_on, mmclus_r_approx, ApproxResult, ClusteredSide, SideChoice,
};
pub use bitmatrix::{
    ham, inner_product, naive_multiply, naive_multiply_pretransposed, naive_product_row,
    transpose, BitMatrix, BitRow, IntMatrix,
};
pub use clustering::{
    assign_nearest, brute_force_discrete_kcenter, gonzalez, project, randomized_kcenter,
    Clustering, ProjectedPoints,
};
pub use error::Error;
pub use exact::{
    build_cluster_spanning_tree, exact_clustered, mmclus_st, mmclus_st_word_range, traverse,
    ExactProduct, SpanningTree, StProduct, Traversal, TreeSide,
};
pub use query::{
    exact_via_queries, exact_via_queries_randomized, mmclus_preproc, mmclus_preproc_randomized,
    mmclus_query, mmclus_query_batch, mmclus_query_with_cost, ColSide, PreprocState,
};

/// Result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
