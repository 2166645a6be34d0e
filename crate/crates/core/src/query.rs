//! Preprocessing for exact single-entry queries on the product matrix.
//!
//! After a one-time clustering-based preprocessing, any entry `C_{ij}` of
//! the exact product is recovered from the approximation `D` by a ±1
//! correction pass over the coordinates where row i of A differs from its
//! center. The work per query is bounded by the clustering radius, never
//! by the inner dimension.

use alloc::vec::Vec;

use crate::approx::{mmclus_approx_on, mmclus_r_approx, SideChoice};
use crate::bitmatrix::{transpose, BitMatrix, IntMatrix};
use crate::error::Error;
use crate::Result;

/// Column-side correction data for the randomized two-sided mode.
#[derive(Debug, Clone)]
pub struct ColSide {
    /// k×q matrix whose rows are the column centers of B.
    pub b_centers: BitMatrix,
    /// Per column of B, the index of its assigned center.
    pub assign_b: Vec<usize>,
    /// Per column of B, coordinates where it differs from its center.
    pub ind_b: Vec<Vec<u32>>,
    pub radius_b: u32,
}

/// Output of the preprocessing: everything needed to answer exact entry
/// queries. Immutable after construction; queries are pure reads.
#[derive(Debug, Clone)]
pub struct PreprocState {
    /// True when the state was built on `(Bᵀ, Aᵀ)` because `p < r`;
    /// queries transparently swap indices.
    pub swapped: bool,
    /// Dimensions in the effective (possibly swapped) orientation.
    pub p: usize,
    pub q: usize,
    pub r: usize,
    /// The approximation, p×r in the effective orientation.
    pub d: IntMatrix,
    /// ℓ×q matrix of row centers.
    pub a_centers: BitMatrix,
    /// Per row, the index of its assigned center.
    pub assign_a: Vec<usize>,
    /// Per row, sorted coordinates where it differs from its center.
    pub ind_a: Vec<Vec<u32>>,
    pub radius_a: u32,
    /// Columns of B stored as rows (r×q), for O(1) bit access per
    /// correction step.
    pub b_cols: BitMatrix,
    /// Present in randomized two-sided mode.
    pub col_side: Option<ColSide>,
}

impl PreprocState {
    /// Error certificate of the stored approximation.
    pub fn certificate(&self) -> u32 {
        self.radius_a + self.col_side.as_ref().map_or(0, |c| c.radius_b)
    }

    fn check_indices(&self, i: usize, j: usize) -> Result<(usize, usize)> {
        let (i, j) = if self.swapped { (j, i) } else { (i, j) };
        if i >= self.p {
            return Err(Error::IndexOutOfRange {
                index: i,
                bound: self.p,
            });
        }
        if j >= self.r {
            return Err(Error::IndexOutOfRange {
                index: j,
                bound: self.r,
            });
        }
        Ok((i, j))
    }
}

/// Deterministic preprocessing: one-sided clustering plus per-row
/// difference index sets. Dispatches to `(Bᵀ, Aᵀ)` when `p < r`.
pub fn mmclus_preproc(a: &BitMatrix, b: &BitMatrix, ell: usize) -> Result<PreprocState> {
    if a.rows() >= b.cols() {
        preproc_rows(a, b, ell, false)
    } else {
        let bt = transpose(b);
        let at = transpose(a);
        preproc_rows(&bt, &at, ell, true)
    }
}

fn preproc_rows(a: &BitMatrix, b: &BitMatrix, ell: usize, swapped: bool) -> Result<PreprocState> {
    let approx = mmclus_approx_on(a, b, ell, SideChoice::RowsOfA)?;
    let clustering = approx.row_clustering.as_ref().expect("rows were clustered");
    let a_centers = a.select_rows(&clustering.center_indices)?;

    let mut ind_a = Vec::with_capacity(a.rows());
    for i in 0..a.rows() {
        let center = a_centers.row(clustering.assignment[i]);
        ind_a.push(a.row(i).diff_indices(&center)?);
    }

    Ok(PreprocState {
        swapped,
        p: a.rows(),
        q: a.cols(),
        r: b.cols(),
        d: approx.d,
        a_centers,
        assign_a: clustering.assignment.clone(),
        radius_a: clustering.achieved_radius,
        ind_a,
        b_cols: transpose(b),
        col_side: None,
    })
}

/// Randomized two-sided preprocessing built on [`mmclus_r_approx`].
pub fn mmclus_preproc_randomized(
    a: &BitMatrix,
    b: &BitMatrix,
    ell: usize,
    k: usize,
    epsilon: f64,
    seed: u64,
) -> Result<PreprocState> {
    let approx = mmclus_r_approx(a, b, ell, k, epsilon, seed)?;
    let row_clustering = approx.row_clustering.as_ref().expect("two-sided");
    let col_clustering = approx.col_clustering.as_ref().expect("two-sided");

    let a_centers = a.select_rows(&row_clustering.center_indices)?;
    let mut ind_a = Vec::with_capacity(a.rows());
    for i in 0..a.rows() {
        let center = a_centers.row(row_clustering.assignment[i]);
        ind_a.push(a.row(i).diff_indices(&center)?);
    }

    let b_cols = transpose(b);
    let b_centers = b_cols.select_rows(&col_clustering.center_indices)?;
    let mut ind_b = Vec::with_capacity(b_cols.rows());
    for j in 0..b_cols.rows() {
        let center = b_centers.row(col_clustering.assignment[j]);
        ind_b.push(b_cols.row(j).diff_indices(&center)?);
    }

    Ok(PreprocState {
        swapped: false,
        p: a.rows(),
        q: a.cols(),
        r: b.cols(),
        d: approx.d,
        a_centers,
        assign_a: row_clustering.assignment.clone(),
        radius_a: row_clustering.achieved_radius,
        ind_a,
        b_cols,
        col_side: Some(ColSide {
            b_centers,
            assign_b: col_clustering.assignment.clone(),
            ind_b,
            radius_b: col_clustering.achieved_radius,
        }),
    })
}

/// Exact value of `C_{ij}` recovered from the preprocessed state.
pub fn mmclus_query(state: &PreprocState, i: usize, j: usize) -> Result<u32> {
    mmclus_query_with_cost(state, i, j).map(|(v, _)| v)
}

/// As [`mmclus_query`], also reporting the number of correction-loop
/// iterations performed (bounded by the clustering radius/radii).
pub fn mmclus_query_with_cost(state: &PreprocState, i: usize, j: usize) -> Result<(u32, usize)> {
    let (i, j) = state.check_indices(i, j)?;
    let mut value = state.d.get(i, j) as i64;
    let mut iterations = 0usize;

    let center_a = state.a_centers.row(state.assign_a[i]);
    let b_col = state.b_cols.row(j);

    if let Some(col) = &state.col_side {
        // stage 1: C''(centerA · centerB) -> centerA · B_{*j}
        for &m in &col.ind_b[j] {
            iterations += 1;
            let m = m as usize;
            if center_a.get(m) {
                if b_col.get(m) {
                    value += 1;
                } else {
                    value -= 1;
                }
            }
        }
    }

    // A-side correction against the true column of B: coordinates in
    // ind(A,i) have A_{im} = !center_m, so a set B bit moves the value
    // by +1 when the center bit is 0 and by -1 when it is 1.
    for &m in &state.ind_a[i] {
        iterations += 1;
        let m = m as usize;
        if b_col.get(m) {
            if center_a.get(m) {
                value -= 1;
            } else {
                value += 1;
            }
        }
    }

    debug_assert!(value >= 0);
    Ok((value as u32, iterations))
}

/// Answers a batch of (i, j) queries against one state.
pub fn mmclus_query_batch(state: &PreprocState, pairs: &[(usize, usize)]) -> Result<Vec<u32>> {
    pairs
        .iter()
        .map(|&(i, j)| mmclus_query(state, i, j))
        .collect()
}

/// Full exact product obtained by preprocessing once and querying every
/// entry.
pub fn exact_via_queries(a: &BitMatrix, b: &BitMatrix, ell: usize) -> Result<IntMatrix> {
    let state = mmclus_preproc(a, b, ell)?;
    all_entries(a.rows(), b.cols(), &state)
}

/// Randomized-mode full product via two-sided queries.
pub fn exact_via_queries_randomized(
    a: &BitMatrix,
    b: &BitMatrix,
    ell: usize,
    k: usize,
    epsilon: f64,
    seed: u64,
) -> Result<IntMatrix> {
    let state = mmclus_preproc_randomized(a, b, ell, k, epsilon, seed)?;
    all_entries(a.rows(), b.cols(), &state)
}

fn all_entries(p: usize, r: usize, state: &PreprocState) -> Result<IntMatrix> {
    let mut out = IntMatrix::zeros(p, r);
    for i in 0..p {
        for j in 0..r {
            out.set(i, j, mmclus_query(state, i, j)?);
        }
    }
    Ok(out)
}
