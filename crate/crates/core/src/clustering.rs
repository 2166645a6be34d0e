//! k-center clustering of bit vectors in Hamming space.
//!
//! Deterministic farthest-point clustering (Gonzalez) gives a
//! 2-approximation of the optimal radius in `O(ndk)` time and always
//! returns centers drawn from the input points. The randomized variant
//! first projects the points with a sparse ±1 sign matrix, runs the
//! farthest-point iteration on squared distances in the projected space,
//! and then re-assigns every point to its nearest chosen center in exact
//! Hamming distance, so the reported radius is a true certificate.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::bitmatrix::{ham, BitRow};
use crate::error::Error;
use crate::Result;

/// Constant in the projected dimension `m = ⌈c₀·ln n / ε²⌉`.
const PROJECTION_C0: f64 = 8.0;

/// Result of a k-center clustering run.
#[derive(Debug, Clone)]
pub struct Clustering {
    /// Indices of the chosen centers into the input point set, in the
    /// order they were created. Empty when the centers were supplied
    /// explicitly (see [`assign_nearest`]).
    pub center_indices: Vec<usize>,
    /// For each input point, the index (into the center list) of its
    /// nearest center. Ties break toward the lowest center index.
    pub assignment: Vec<usize>,
    /// Exact Hamming distance from each point to its assigned center.
    pub distances: Vec<u32>,
    /// `max_i distances[i]`.
    pub achieved_radius: u32,
    /// Number of centers.
    pub k: usize,
    /// For farthest-point runs: the max distance after each center was
    /// added. Non-increasing within one run.
    pub radius_trace: Vec<u32>,
}

fn check_points(points: &[BitRow<'_>], k: usize) -> Result<()> {
    if points.is_empty() {
        return Err(Error::InvalidParameter("empty point set"));
    }
    if k == 0 || k > points.len() {
        return Err(Error::InvalidParameter("k must be in [1, n]"));
    }
    let len = points[0].len();
    for p in points {
        if p.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                got: p.len(),
            });
        }
    }
    Ok(())
}

/// Farthest-point (Gonzalez) k-center clustering.
///
/// The first center is `first`; each subsequent center is the point
/// farthest from the current center set. Per-point nearest-center
/// distances are maintained incrementally, so the total work is O(ndk).
/// The achieved radius is at most twice the optimal k-center radius.
pub fn gonzalez(points: &[BitRow<'_>], k: usize, first: usize) -> Result<Clustering> {
    check_points(points, k)?;
    let n = points.len();
    if first >= n {
        return Err(Error::IndexOutOfRange {
            index: first,
            bound: n,
        });
    }

    let mut centers = Vec::with_capacity(k);
    let mut assignment = vec![0usize; n];
    let mut dist = vec![u32::MAX; n];
    let mut chosen = vec![false; n];
    let mut radius_trace = Vec::with_capacity(k);

    centers.push(first);
    chosen[first] = true;
    for i in 0..n {
        dist[i] = ham(&points[i], &points[first])?;
    }
    radius_trace.push(dist.iter().copied().max().unwrap());

    for t in 1..k {
        // farthest point from the current centers becomes the next center;
        // restricting to unchosen points keeps center indices distinct when
        // duplicate points drive the max distance to zero
        let next = (0..n).filter(|&i| !chosen[i]).max_by_key(|&i| dist[i]).unwrap();
        centers.push(next);
        chosen[next] = true;
        for i in 0..n {
            let d = ham(&points[i], &points[next])?;
            if d < dist[i] {
                dist[i] = d;
                assignment[i] = t;
            }
        }
        radius_trace.push(dist.iter().copied().max().unwrap());
    }

    let achieved_radius = *radius_trace.last().unwrap();
    Ok(Clustering {
        center_indices: centers,
        assignment,
        distances: dist,
        achieved_radius,
        k,
        radius_trace,
    })
}

/// Assigns every point to its nearest center (exact Hamming distance,
/// ties toward the lowest center index).
pub fn assign_nearest(points: &[BitRow<'_>], centers: &[BitRow<'_>]) -> Result<Clustering> {
    if points.is_empty() || centers.is_empty() {
        return Err(Error::InvalidParameter("empty point or center set"));
    }
    let mut assignment = Vec::with_capacity(points.len());
    let mut distances = Vec::with_capacity(points.len());
    let mut radius = 0;
    for p in points {
        let mut best = (0usize, u32::MAX);
        for (c, center) in centers.iter().enumerate() {
            let d = ham(p, center)?;
            if d < best.1 {
                best = (c, d);
            }
        }
        assignment.push(best.0);
        distances.push(best.1);
        radius = radius.max(best.1);
    }
    Ok(Clustering {
        center_indices: Vec::new(),
        assignment,
        distances,
        achieved_radius: radius,
        k: centers.len(),
        radius_trace: Vec::new(),
    })
}

/// Points after sparse sign projection to dimension
/// `m = min(⌈8·ln n / ε²⌉, d)`.
///
/// Coordinates are signed sums of selected input bits; only relative
/// squared distances are ever compared, so no scaling is applied.
#[derive(Debug, Clone)]
pub struct ProjectedPoints {
    pub n: usize,
    pub dim: usize,
    /// Row-major n×dim coordinates.
    pub coords: Vec<i32>,
    pub seed: u64,
}

impl ProjectedPoints {
    #[inline]
    pub fn point(&self, i: usize) -> &[i32] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// Squared Euclidean distance between projected points `i` and `j`.
    pub fn squared_distance(&self, i: usize, j: usize) -> u64 {
        self.point(i)
            .iter()
            .zip(self.point(j))
            .map(|(a, b)| {
                let d = (*a as i64) - (*b as i64);
                (d * d) as u64
            })
            .sum()
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::InvalidParameter("epsilon must be in (0, 1/2)"));
    }
    Ok(())
}

/// Projected dimension for `n` points in dimension `d`.
pub fn projected_dim(n: usize, d: usize, epsilon: f64) -> usize {
    let m = libm::ceil(PROJECTION_C0 * libm::log(n as f64) / (epsilon * epsilon)) as usize;
    m.clamp(1, d)
}

/// Projects 0-1 points with an i.i.d. {+1, 0, −1} sign matrix with
/// probabilities {1/6, 2/3, 1/6}. Deterministic for a given seed.
pub fn project(points: &[BitRow<'_>], epsilon: f64, seed: u64) -> Result<ProjectedPoints> {
    check_epsilon(epsilon)?;
    if points.len() < 2 {
        return Err(Error::InvalidParameter("projection needs at least 2 points"));
    }
    check_points(points, 1)?;
    let n = points.len();
    let d = points[0].len();
    let m = projected_dim(n, d, epsilon);

    // sign matrix stored column-major: one column of m entries per input
    // coordinate, so projecting a point walks only its set bits
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut columns = vec![0i8; d * m];
    for e in columns.iter_mut() {
        *e = match rng.next_u32() % 6 {
            0 => 1,
            1 => -1,
            _ => 0,
        };
    }

    let mut coords = vec![0i32; n * m];
    for (i, p) in points.iter().enumerate() {
        let out = &mut coords[i * m..(i + 1) * m];
        for (wi, &w) in p.words().iter().enumerate() {
            let mut bits = w;
            while bits != 0 {
                let h = wi * 64 + bits.trailing_zeros() as usize;
                let col = &columns[h * m..(h + 1) * m];
                for (o, &s) in out.iter_mut().zip(col) {
                    *o += s as i32;
                }
                bits &= bits - 1;
            }
        }
    }

    Ok(ProjectedPoints {
        n,
        dim: m,
        coords,
        seed,
    })
}

/// Randomized (2+ε)-approximate k-center clustering.
///
/// Runs the farthest-point iteration on the projected points (squared
/// distance comparisons only), then re-assigns every original point to
/// its nearest chosen center in exact Hamming distance; the reported
/// radius is exact.
pub fn randomized_kcenter(
    points: &[BitRow<'_>],
    k: usize,
    epsilon: f64,
    seed: u64,
) -> Result<Clustering> {
    check_points(points, k)?;
    check_epsilon(epsilon)?;
    let n = points.len();

    let centers = if n == 1 {
        vec![0]
    } else {
        let proj = project(points, epsilon, seed)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        let first = (rng.next_u64() % n as u64) as usize;

        let mut centers = Vec::with_capacity(k);
        let mut dist = vec![u64::MAX; n];
        let mut chosen = vec![false; n];
        centers.push(first);
        chosen[first] = true;
        for (i, d) in dist.iter_mut().enumerate() {
            *d = proj.squared_distance(i, first);
        }
        for _ in 1..k {
            let next = (0..n)
                .filter(|&i| !chosen[i])
                .max_by_key(|&i| dist[i])
                .unwrap();
            centers.push(next);
            chosen[next] = true;
            for (i, d) in dist.iter_mut().enumerate() {
                *d = (*d).min(proj.squared_distance(i, next));
            }
        }
        centers
    };

    // exact re-assignment makes the achieved radius a true certificate
    let center_rows: Vec<BitRow<'_>> = centers.iter().map(|&c| points[c]).collect();
    let assigned = assign_nearest(points, &center_rows)?;
    Ok(Clustering {
        center_indices: centers,
        assignment: assigned.assignment,
        distances: assigned.distances,
        achieved_radius: assigned.achieved_radius,
        k,
        radius_trace: Vec::new(),
    })
}

/// Exact optimal k-center radius with centers restricted to the input
/// points, by exhaustive enumeration of center subsets. Test oracle only.
pub fn brute_force_discrete_kcenter(points: &[BitRow<'_>], k: usize) -> Result<u32> {
    check_points(points, k)?;
    let n = points.len();
    if n > 16 || k > 4 {
        return Err(Error::InvalidParameter(
            "brute force limited to n <= 16, k <= 4",
        ));
    }
    let mut dist = vec![[0u32; 16]; n];
    for i in 0..n {
        for j in 0..n {
            dist[i][j] = ham(&points[i], &points[j])?;
        }
    }

    let mut best = u32::MAX;
    let mut subset = Vec::with_capacity(k);
    fn recurse(
        start: usize,
        remaining: usize,
        n: usize,
        subset: &mut Vec<usize>,
        dist: &[[u32; 16]],
        best: &mut u32,
    ) {
        if remaining == 0 {
            let radius = (0..n)
                .map(|i| subset.iter().map(|&c| dist[i][c]).min().unwrap())
                .max()
                .unwrap();
            *best = (*best).min(radius);
            return;
        }
        for c in start..=n - remaining {
            subset.push(c);
            recurse(c + 1, remaining - 1, n, subset, dist, best);
            subset.pop();
        }
    }
    recurse(0, k, n, &mut subset, &dist, &mut best);
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitmatrix::BitMatrix;

    fn matrix(rows: &[&str]) -> BitMatrix {
        let bools: Vec<Vec<bool>> = rows
            .iter()
            .map(|r| r.chars().map(|c| c == '1').collect())
            .collect();
        BitMatrix::from_bool_rows(&bools).unwrap()
    }

    #[test]
    fn gonzalez_hand_trace() {
        // farthest from 000 is 111 at distance 3; 001 assigns to 000
        let m = matrix(&["000", "001", "111"]);
        let pts = m.row_views();
        let c = gonzalez(&pts, 2, 0).unwrap();
        assert_eq!(c.center_indices, vec![0, 2]);
        assert_eq!(c.achieved_radius, 1);
        assert_eq!(c.assignment, vec![0, 0, 1]);
    }

    #[test]
    fn gonzalez_k_equals_n() {
        let m = matrix(&["0101", "1010", "1111", "0000"]);
        let pts = m.row_views();
        let c = gonzalez(&pts, 4, 0).unwrap();
        assert_eq!(c.achieved_radius, 0);
    }

    #[test]
    fn gonzalez_identical_points() {
        let m = matrix(&["00", "00", "00"]);
        let pts = m.row_views();
        let c = gonzalez(&pts, 1, 0).unwrap();
        assert_eq!(c.achieved_radius, 0);
    }

    #[test]
    fn gonzalez_parameter_errors() {
        let m = matrix(&["01"]);
        let pts = m.row_views();
        assert!(gonzalez(&pts, 0, 0).is_err());
        assert!(gonzalez(&pts, 2, 0).is_err());
        assert!(gonzalez(&[], 1, 0).is_err());
    }

    #[test]
    fn gonzalez_radius_trace_non_increasing() {
        let m = matrix(&["00110", "01010", "11111", "00000", "10101", "00111"]);
        let pts = m.row_views();
        let c = gonzalez(&pts, 5, 0).unwrap();
        for w in c.radius_trace.windows(2) {
            assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn assign_nearest_examples() {
        let m = matrix(&["01", "10"]);
        let pts = m.row_views();
        let centers = matrix(&["01"]);
        let c = assign_nearest(&pts, &centers.row_views()).unwrap();
        assert_eq!(c.assignment, vec![0, 0]);
        assert_eq!(c.achieved_radius, 2);

        // points == centers -> radius 0
        let c = assign_nearest(&pts, &pts).unwrap();
        assert_eq!(c.achieved_radius, 0);

        // tie broken toward the lowest center index
        let pts_m = matrix(&["000", "011"]);
        let cen_m = matrix(&["001", "111"]);
        let c = assign_nearest(&pts_m.row_views(), &cen_m.row_views()).unwrap();
        assert_eq!(c.assignment, vec![0, 0]);
        assert_eq!(c.achieved_radius, 1);
    }

    #[test]
    fn assign_nearest_idempotent() {
        let m = matrix(&["0011", "0111", "1100", "1000"]);
        let pts = m.row_views();
        let cen = matrix(&["0011", "1100"]);
        let first = assign_nearest(&pts, &cen.row_views()).unwrap();
        let again = assign_nearest(&pts, &cen.row_views()).unwrap();
        assert_eq!(first.assignment, again.assignment);
        assert_eq!(first.achieved_radius, again.achieved_radius);
    }

    #[test]
    fn project_identical_points() {
        let m = matrix(&["0110", "0110"]);
        let pts = m.row_views();
        let p = project(&pts, 0.25, 7).unwrap();
        assert_eq!(p.squared_distance(0, 1), 0);
        assert_eq!(p.point(0), p.point(1));
    }

    #[test]
    fn project_deterministic() {
        let m = matrix(&["0110", "1001", "1111"]);
        let pts = m.row_views();
        let a = project(&pts, 0.3, 99).unwrap();
        let b = project(&pts, 0.3, 99).unwrap();
        assert_eq!(a.coords, b.coords);
    }

    #[test]
    fn project_epsilon_range() {
        let m = matrix(&["01", "10"]);
        let pts = m.row_views();
        assert!(project(&pts, 0.0, 1).is_err());
        assert!(project(&pts, 0.5, 1).is_err());
    }

    #[test]
    fn project_concentration_monte_carlo() {
        // 64 random points in {0,1}^256, eps = 0.25: the projected squared
        // distance over scale*ham must be within 1±eps for >= 95% of pairs.
        // scale = m/3 because E[entry^2] = 1/3 for the sign distribution.
        let n = 64;
        let d = 256;
        let mut state = 0x1234_5678_u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            state >> 40 & 1 == 1
        };
        let rows: Vec<Vec<bool>> = (0..n).map(|_| (0..d).map(|_| next()).collect()).collect();
        let m = BitMatrix::from_bool_rows(&rows).unwrap();
        let pts = m.row_views();
        let proj = project(&pts, 0.25, 42).unwrap();
        let scale = proj.dim as f64 / 3.0;
        let mut ok = 0usize;
        let mut total = 0usize;
        for i in 0..n {
            for j in (i + 1)..n {
                let h = ham(&pts[i], &pts[j]).unwrap() as f64;
                let ratio = proj.squared_distance(i, j) as f64 / (scale * h);
                if (0.75..=1.25).contains(&ratio) {
                    ok += 1;
                }
                total += 1;
            }
        }
        assert!(
            ok as f64 >= 0.95 * total as f64,
            "only {ok}/{total} pairs within 1±eps"
        );
    }

    #[test]
    fn randomized_kcenter_k_equals_n() {
        let m = matrix(&["0101", "1010", "1111"]);
        let pts = m.row_views();
        let c = randomized_kcenter(&pts, 3, 0.25, 5).unwrap();
        assert_eq!(c.achieved_radius, 0);
    }

    #[test]
    fn randomized_kcenter_deterministic_per_seed() {
        let m = matrix(&["00110011", "01010101", "11110000", "00001111", "10101010"]);
        let pts = m.row_views();
        let a = randomized_kcenter(&pts, 2, 0.25, 11).unwrap();
        let b = randomized_kcenter(&pts, 2, 0.25, 11).unwrap();
        assert_eq!(a.center_indices, b.center_indices);
        assert_eq!(a.assignment, b.assignment);
        assert_eq!(a.achieved_radius, b.achieved_radius);
    }

    #[test]
    fn randomized_radius_is_exact_reevaluation() {
        let m = matrix(&["00110011", "01010111", "11110000", "00001111", "10101010", "11100011"]);
        let pts = m.row_views();
        let c = randomized_kcenter(&pts, 2, 0.25, 3).unwrap();
        let recomputed = (0..pts.len())
            .map(|i| ham(&pts[i], &pts[c.center_indices[c.assignment[i]]]).unwrap())
            .max()
            .unwrap();
        assert_eq!(c.achieved_radius, recomputed);
    }

    #[test]
    fn brute_force_examples() {
        let m = matrix(&["000", "001", "111"]);
        let pts = m.row_views();
        assert_eq!(brute_force_discrete_kcenter(&pts, 2).unwrap(), 1);
        assert_eq!(brute_force_discrete_kcenter(&pts, 3).unwrap(), 0);

        let m = matrix(&["00", "11"]);
        let pts = m.row_views();
        assert_eq!(brute_force_discrete_kcenter(&pts, 1).unwrap(), 2);
    }

    #[test]
    fn brute_force_size_guard() {
        let rows: Vec<Vec<bool>> = (0..17).map(|i| vec![i % 2 == 0, true]).collect();
        let m = BitMatrix::from_bool_rows(&rows).unwrap();
        let pts = m.row_views();
        assert!(brute_force_discrete_kcenter(&pts, 2).is_err());
    }

    #[test]
    fn gonzalez_within_twice_brute_force() {
        // small random instances against the exhaustive oracle
        let mut state = 0xdead_beef_u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            state >> 35
        };
        for _ in 0..30 {
            let n = 4 + (next() % 9) as usize; // 4..12
            let d = 3 + (next() % 7) as usize; // 3..9
            let k = 1 + (next() % 3) as usize; // 1..3
            let rows: Vec<Vec<bool>> = (0..n)
                .map(|_| (0..d).map(|_| next() & 1 == 1).collect())
                .collect();
            let m = BitMatrix::from_bool_rows(&rows).unwrap();
            let pts = m.row_views();
            let opt = brute_force_discrete_kcenter(&pts, k).unwrap();
            let g = gonzalez(&pts, k, 0).unwrap();
            assert!(
                g.achieved_radius <= 2 * opt,
                "gonzalez {} > 2*opt {}",
                g.achieved_radius,
                opt
            );
        }
    }
}
