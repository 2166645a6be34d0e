//! Synthetic instances with planted clustered structure.
//!
//! Each generated row is one of `num_clusters` hidden centers with at
//! most `max_flips` bits flipped, so the optimal clustering radius is
//! known to be at most `max_flips`. This gives ground truth for the
//! 2-approximation and error-certificate bounds.

use std::fmt;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use clusmat_core::{transpose, BitMatrix};

use crate::error::{AppError, Result};

/// Whether the planted structure lives in the rows or the columns of the
/// emitted matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Rows,
    Cols,
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::Rows => "row",
            Orientation::Cols => "col",
        })
    }
}

#[derive(Debug, Clone)]
pub struct PlantedSpec {
    /// Number of planted points (rows, or columns with [`Orientation::Cols`]).
    pub points: usize,
    /// Point dimension.
    pub dim: usize,
    pub num_clusters: usize,
    /// Maximum bits flipped per point away from its center.
    pub max_flips: usize,
    /// Bit density of the hidden centers, in [0, 1].
    pub density: f64,
    pub seed: u64,
    pub orientation: Orientation,
}

impl PlantedSpec {
    fn validate(&self) -> Result<()> {
        if self.points == 0 || self.dim == 0 {
            return Err(AppError::Usage("points and dim must be positive".into()));
        }
        if self.num_clusters == 0 || self.num_clusters > self.points {
            return Err(AppError::Usage(
                "num_clusters must be in [1, points]".into(),
            ));
        }
        if self.max_flips > self.dim {
            return Err(AppError::Usage("max_flips must not exceed dim".into()));
        }
        if !(0.0..=1.0).contains(&self.density) {
            return Err(AppError::Usage("density must be in [0, 1]".into()));
        }
        Ok(())
    }

    /// One-line sidecar metadata recording the generation parameters.
    pub fn meta_line(&self) -> String {
        format!(
            "points={} dim={} clusters={} flips={} density={} seed={} orientation={}\n",
            self.points,
            self.dim,
            self.num_clusters,
            self.max_flips,
            self.density,
            self.seed,
            self.orientation
        )
    }
}

/// Generates the planted matrix. Deterministic for a given spec.
pub fn generate(spec: &PlantedSpec) -> Result<BitMatrix> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let density_cut = (spec.density * u32::MAX as f64) as u64;

    // distinct hidden centers; bail out if the density/dimension cannot
    // support enough distinct vectors
    let mut centers: Vec<Vec<bool>> = Vec::with_capacity(spec.num_clusters);
    let mut attempts = 0usize;
    while centers.len() < spec.num_clusters {
        attempts += 1;
        if attempts > 1000 * spec.num_clusters {
            return Err(AppError::Usage(
                "could not draw enough distinct centers; raise dim or density".into(),
            ));
        }
        let c: Vec<bool> = (0..spec.dim)
            .map(|_| (rng.next_u32() as u64) < density_cut)
            .collect();
        if !centers.contains(&c) {
            centers.push(c);
        }
    }

    let mut rows: Vec<Vec<bool>> = Vec::with_capacity(spec.points);
    for i in 0..spec.points {
        // the first pass covers every cluster once
        let cluster = if i < spec.num_clusters {
            i
        } else {
            (rng.next_u64() % spec.num_clusters as u64) as usize
        };
        let mut row = centers[cluster].clone();
        if spec.max_flips > 0 {
            let flips = (rng.next_u64() % (spec.max_flips as u64 + 1)) as usize;
            let mut flipped = Vec::with_capacity(flips);
            while flipped.len() < flips {
                let pos = (rng.next_u64() % spec.dim as u64) as usize;
                if !flipped.contains(&pos) {
                    flipped.push(pos);
                    row[pos] = !row[pos];
                }
            }
        }
        rows.push(row);
    }

    let m = BitMatrix::from_bool_rows(&rows)?;
    Ok(match spec.orientation {
        Orientation::Rows => m,
        Orientation::Cols => transpose(&m),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use clusmat_core::gonzalez;
    use std::collections::HashSet;

    fn spec(points: usize, dim: usize, clusters: usize, flips: usize, seed: u64) -> PlantedSpec {
        PlantedSpec {
            points,
            dim,
            num_clusters: clusters,
            max_flips: flips,
            density: 0.5,
            seed,
            orientation: Orientation::Rows,
        }
    }

    #[test]
    fn zero_flips_gives_exactly_cluster_many_distinct_rows() {
        let m = generate(&spec(40, 24, 6, 0, 9)).unwrap();
        let distinct: HashSet<Vec<bool>> = (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect())
            .collect();
        assert_eq!(distinct.len(), 6);
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate(&spec(20, 33, 4, 3, 77)).unwrap();
        let b = generate(&spec(20, 33, 4, 3, 77)).unwrap();
        assert_eq!(a, b);
        let c = generate(&spec(20, 33, 4, 3, 78)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn gonzalez_radius_within_twice_planted_bound() {
        for seed in 0..10 {
            let s = spec(64, 48, 5, 4, seed);
            let m = generate(&s).unwrap();
            let pts = m.row_views();
            let c = gonzalez(&pts, s.num_clusters, 0).unwrap();
            assert!(c.achieved_radius as usize <= 2 * s.max_flips);
        }
    }

    #[test]
    fn col_orientation_transposes() {
        let mut s = spec(10, 20, 3, 2, 5);
        let row_wise = generate(&s).unwrap();
        s.orientation = Orientation::Cols;
        let col_wise = generate(&s).unwrap();
        assert_eq!(clusmat_core::transpose(&row_wise), col_wise);
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(generate(&spec(0, 5, 1, 0, 1)).is_err());
        assert!(generate(&spec(4, 5, 5, 0, 1)).is_err());
        assert!(generate(&spec(4, 5, 2, 6, 1)).is_err());
    }
}
