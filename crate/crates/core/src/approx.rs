//! Approximate arithmetic product with a certified additive error bound.
//!
//! The deterministic variant clusters the rows of A (or, via
//! `(AB)ᵀ = BᵀAᵀ`, the columns of B) with farthest-point clustering,
//! multiplies the small center matrix by B, and reads each output entry
//! from its center's row. Every entry of the result then differs from the
//! exact product by at most the achieved clustering radius, which is
//! reported as the error certificate. The randomized variant clusters
//! both sides and multiplies only the two center matrices.

use alloc::vec::Vec;

use crate::bitmatrix::{naive_multiply, transpose, BitMatrix, IntMatrix};
use crate::clustering::{gonzalez, randomized_kcenter, Clustering};
use crate::error::Error;
use crate::Result;

/// Which side(s) of the product were clustered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClusteredSide {
    RowsOfA,
    ColsOfB,
    Both,
}

/// Side selection for the deterministic variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SideChoice {
    /// Cluster rows of A when `p >= r`, else columns of B.
    #[default]
    Auto,
    RowsOfA,
    ColsOfB,
}

/// An approximate product together with its error certificate.
#[derive(Debug, Clone)]
pub struct ApproxResult {
    /// The p×r approximation of the exact product.
    pub d: IntMatrix,
    pub side: ClusteredSide,
    /// Clustering of the rows of A (absent when only B was clustered).
    pub row_clustering: Option<Clustering>,
    /// Clustering of the columns of B (absent when only A was clustered).
    pub col_clustering: Option<Clustering>,
    /// Certified additive bound: every entry of `d` is within this of the
    /// exact product. Equals the achieved radius (one-sided) or the sum
    /// of both achieved radii (two-sided).
    pub error_certificate: u32,
    /// Present for the randomized variant.
    pub epsilon: Option<f64>,
}

fn check_shapes(a: &BitMatrix, b: &BitMatrix) -> Result<()> {
    if a.cols() != b.rows() {
        return Err(Error::DimensionMismatch {
            expected: a.cols(),
            got: b.rows(),
        });
    }
    Ok(())
}

/// Deterministic clustering-based approximate product; clusters rows of A
/// with `ell` centers when `p >= r`, otherwise columns of B (then `ell`
/// plays the role of the column center count).
pub fn mmclus_approx(a: &BitMatrix, b: &BitMatrix, ell: usize) -> Result<ApproxResult> {
    mmclus_approx_on(a, b, ell, SideChoice::Auto)
}

/// As [`mmclus_approx`] with an explicit side override (for benchmarking
/// both orientations).
pub fn mmclus_approx_on(
    a: &BitMatrix,
    b: &BitMatrix,
    ell: usize,
    side: SideChoice,
) -> Result<ApproxResult> {
    check_shapes(a, b)?;
    let cluster_rows = match side {
        SideChoice::Auto => a.rows() >= b.cols(),
        SideChoice::RowsOfA => true,
        SideChoice::ColsOfB => false,
    };
    if cluster_rows {
        approx_rows_of_a(a, b, ell)
    } else {
        // (AB)ᵀ = BᵀAᵀ: cluster the rows of Bᵀ, i.e. the columns of B
        let bt = transpose(b);
        let at = transpose(a);
        let res = approx_rows_of_a(&bt, &at, ell)?;
        Ok(ApproxResult {
            d: res.d.transposed(),
            side: ClusteredSide::ColsOfB,
            row_clustering: None,
            col_clustering: res.row_clustering,
            error_certificate: res.error_certificate,
            epsilon: None,
        })
    }
}

fn approx_rows_of_a(a: &BitMatrix, b: &BitMatrix, ell: usize) -> Result<ApproxResult> {
    if ell == 0 || ell > a.rows() {
        return Err(Error::InvalidParameter("ell must be in [1, p]"));
    }
    let points = a.row_views();
    let clustering = gonzalez(&points, ell, 0)?;
    let centers = a.select_rows(&clustering.center_indices)?;
    let c_small = naive_multiply(&centers, b)?; // ell × r
    let d = spread_rows(&c_small, &clustering.assignment, b.cols());
    Ok(ApproxResult {
        d,
        side: ClusteredSide::RowsOfA,
        error_certificate: clustering.achieved_radius,
        row_clustering: Some(clustering),
        col_clustering: None,
        epsilon: None,
    })
}

/// Expands a center-product matrix to full size by copying each point's
/// assigned center row.
fn spread_rows(small: &IntMatrix, assignment: &[usize], cols: usize) -> IntMatrix {
    let mut data = Vec::with_capacity(assignment.len() * cols);
    for &c in assignment {
        data.extend_from_slice(small.row(c));
    }
    IntMatrix::from_vec(assignment.len(), cols, data).expect("assignment length fixes shape")
}

/// Randomized two-sided approximate product: randomized k-center on the
/// rows of A (`ell` centers) and on the columns of B (`k` centers), then
/// only the ℓ×q and q×k center matrices are multiplied. The certificate
/// is the sum of the two achieved radii.
pub fn mmclus_r_approx(
    a: &BitMatrix,
    b: &BitMatrix,
    ell: usize,
    k: usize,
    epsilon: f64,
    seed: u64,
) -> Result<ApproxResult> {
    check_shapes(a, b)?;
    if ell == 0 || ell > a.rows() {
        return Err(Error::InvalidParameter("ell must be in [1, p]"));
    }
    if k == 0 || k > b.cols() {
        return Err(Error::InvalidParameter("k must be in [1, r]"));
    }

    let a_points = a.row_views();
    let row_clustering = randomized_kcenter(&a_points, ell, epsilon, seed)?;

    let bt = transpose(b);
    let b_points = bt.row_views();
    let col_clustering =
        randomized_kcenter(&b_points, k, epsilon, seed ^ 0x5851_f42d_4c95_7f2d)?;

    let a_centers = a.select_rows(&row_clustering.center_indices)?; // ell × q
    let b_centers_t = bt.select_rows(&col_clustering.center_indices)?; // k × q
    let c_small = naive_multiply(&a_centers, &transpose(&b_centers_t))?; // ell × k

    let p = a.rows();
    let r = b.cols();
    let mut d = IntMatrix::zeros(p, r);
    for i in 0..p {
        let ci = row_clustering.assignment[i];
        for j in 0..r {
            d.set(i, j, c_small.get(ci, col_clustering.assignment[j]));
        }
    }

    let certificate = row_clustering.achieved_radius + col_clustering.achieved_radius;
    Ok(ApproxResult {
        d,
        side: ClusteredSide::Both,
        row_clustering: Some(row_clustering),
        col_clustering: Some(col_clustering),
        error_certificate: certificate,
        epsilon: Some(epsilon),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn matrix(rows: &[&str]) -> BitMatrix {
        let bools: Vec<Vec<bool>> = rows
            .iter()
            .map(|r| r.chars().map(|c| c == '1').collect())
            .collect();
        BitMatrix::from_bool_rows(&bools).unwrap()
    }

    fn random_matrix(rows: usize, cols: usize, density_pct: u64, state: &mut u64) -> BitMatrix {
        let bools: Vec<Vec<bool>> = (0..rows)
            .map(|_| {
                (0..cols)
                    .map(|_| {
                        *state = state
                            .wrapping_mul(6364136223846793005)
                            .wrapping_add(1442695040888963407);
                        (*state >> 33) % 100 < density_pct
                    })
                    .collect()
            })
            .collect();
        BitMatrix::from_bool_rows(&bools).unwrap()
    }

    fn max_abs_err(c: &IntMatrix, d: &IntMatrix) -> u32 {
        c.as_slice()
            .iter()
            .zip(d.as_slice())
            .map(|(&x, &y)| x.abs_diff(y))
            .max()
            .unwrap()
    }

    #[test]
    fn identical_rows_ell_one_is_exact() {
        let a = matrix(&["1011", "1011", "1011"]);
        let b = matrix(&["10", "01", "11", "00"]);
        let res = mmclus_approx(&a, &b, 1).unwrap();
        assert_eq!(res.error_certificate, 0);
        assert_eq!(res.d, naive_multiply(&a, &b).unwrap());
    }

    #[test]
    fn ell_equals_p_is_exact() {
        let mut s = 3u64;
        let a = random_matrix(6, 10, 50, &mut s);
        let b = random_matrix(10, 4, 50, &mut s);
        let res = mmclus_approx(&a, &b, 6).unwrap();
        assert_eq!(res.error_certificate, 0);
        assert_eq!(res.d, naive_multiply(&a, &b).unwrap());
    }

    #[test]
    fn hand_trace_example() {
        // centers {101}; row 1 assigned at radius 1; D = [[2],[2]]
        let a = matrix(&["101", "100"]);
        let b = matrix(&["1", "1", "1"]);
        let res = mmclus_approx_on(&a, &b, 1, SideChoice::RowsOfA).unwrap();
        assert_eq!(res.error_certificate, 1);
        assert_eq!(res.d.as_slice(), &[2, 2]);
        let c = naive_multiply(&a, &b).unwrap();
        assert_eq!(c.as_slice(), &[2, 1]);
        assert!(max_abs_err(&c, &res.d) <= res.error_certificate);
    }

    #[test]
    fn certificate_holds_on_random_instances() {
        let mut s = 77u64;
        for density in [10, 50, 90] {
            let a = random_matrix(24, 32, density, &mut s);
            let b = random_matrix(32, 12, density, &mut s);
            let c = naive_multiply(&a, &b).unwrap();
            for ell in [1, 3, 8, 24] {
                let res = mmclus_approx(&a, &b, ell).unwrap();
                assert!(max_abs_err(&c, &res.d) <= res.error_certificate);
                assert!(res.d.max_entry() as usize <= a.cols());
            }
        }
    }

    #[test]
    fn one_sided_has_at_most_ell_distinct_rows() {
        let mut s = 5u64;
        let a = random_matrix(16, 20, 50, &mut s);
        let b = random_matrix(20, 8, 50, &mut s);
        let ell = 3;
        let res = mmclus_approx_on(&a, &b, ell, SideChoice::RowsOfA).unwrap();
        let mut distinct: Vec<&[u32]> = Vec::new();
        for i in 0..res.d.rows() {
            let row = res.d.row(i);
            if !distinct.contains(&row) {
                distinct.push(row);
            }
        }
        assert!(distinct.len() <= ell);
    }

    #[test]
    fn orientation_dispatch_matches_transpose_route() {
        let mut s = 9u64;
        let a = random_matrix(5, 16, 50, &mut s); // p < r forces the Bᵀ route
        let b = random_matrix(16, 11, 50, &mut s);
        let auto = mmclus_approx(&a, &b, 4).unwrap();
        assert_eq!(auto.side, ClusteredSide::ColsOfB);
        let bt = transpose(&b);
        let at = transpose(&a);
        let swapped = mmclus_approx_on(&bt, &at, 4, SideChoice::RowsOfA).unwrap();
        assert_eq!(auto.d, swapped.d.transposed());
        assert_eq!(auto.error_certificate, swapped.error_certificate);
    }

    #[test]
    fn randomized_all_centers_is_exact() {
        let mut s = 11u64;
        let a = random_matrix(7, 12, 50, &mut s);
        let b = random_matrix(12, 5, 50, &mut s);
        let res = mmclus_r_approx(&a, &b, 7, 5, 0.25, 1).unwrap();
        assert_eq!(res.error_certificate, 0);
        assert_eq!(res.d, naive_multiply(&a, &b).unwrap());
    }

    #[test]
    fn randomized_certificate_holds_every_seed() {
        let mut s = 21u64;
        let a = random_matrix(64, 64, 50, &mut s);
        let b = random_matrix(64, 64, 50, &mut s);
        let c = naive_multiply(&a, &b).unwrap();
        for seed in 0..8 {
            let res = mmclus_r_approx(&a, &b, 6, 6, 0.25, seed).unwrap();
            assert!(max_abs_err(&c, &res.d) <= res.error_certificate);
        }
    }

    #[test]
    fn randomized_distinct_row_col_bounds() {
        let mut s = 31u64;
        let a = random_matrix(20, 24, 50, &mut s);
        let b = random_matrix(24, 18, 50, &mut s);
        let (ell, k) = (4, 5);
        let res = mmclus_r_approx(&a, &b, ell, k, 0.25, 9).unwrap();
        let mut rows: Vec<&[u32]> = Vec::new();
        for i in 0..res.d.rows() {
            if !rows.contains(&res.d.row(i)) {
                rows.push(res.d.row(i));
            }
        }
        assert!(rows.len() <= ell);
        let dt = res.d.transposed();
        let mut cols: Vec<Vec<u32>> = Vec::new();
        for j in 0..dt.rows() {
            let col = dt.row(j).to_vec();
            if !cols.contains(&col) {
                cols.push(col);
            }
        }
        assert!(cols.len() <= k);
    }

    #[test]
    fn parameter_errors() {
        let a = matrix(&["10", "01"]);
        let b = matrix(&["1", "0"]);
        assert!(matches!(
            mmclus_approx_on(&a, &b, 0, SideChoice::RowsOfA),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            mmclus_approx_on(&a, &b, 3, SideChoice::RowsOfA),
            Err(Error::InvalidParameter(_))
        ));
        assert!(mmclus_r_approx(&a, &b, 1, 1, 0.7, 0).is_err());
        let bad_b = matrix(&["1", "0", "1"]);
        assert!(matches!(
            mmclus_approx(&a, &bad_b, 1),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
