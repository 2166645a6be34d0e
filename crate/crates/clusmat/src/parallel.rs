//! Thread-parallel wrappers over the core multipliers.
//!
//! Work splits along independent axes only: output rows for the naive
//! multiplier, 64-column word blocks for the tree multiplier. All shared
//! inputs are read-only.

use std::num::NonZeroUsize;

use clusmat_core::{
    build_cluster_spanning_tree, gonzalez, mmclus_st_word_range, naive_product_row, transpose,
    BitMatrix, ExactProduct, IntMatrix, SpanningTree, StProduct, TreeSide,
};

use crate::error::Result;

/// Effective thread count: `CLUSMAT_THREADS` env var, then the explicit
/// request, then the number of cores.
pub fn resolve_threads(requested: Option<usize>) -> usize {
    if let Ok(v) = std::env::var("CLUSMAT_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n > 0 {
                return n;
            }
        }
    }
    requested.filter(|&n| n > 0).unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(NonZeroUsize::get)
            .unwrap_or(1)
    })
}

/// Naive product split over output rows.
pub fn naive_multiply_threaded(a: &BitMatrix, b: &BitMatrix, threads: usize) -> Result<IntMatrix> {
    let bt = transpose(b);
    let p = a.rows();
    let threads = threads.clamp(1, p.max(1));
    if threads == 1 {
        return Ok(clusmat_core::naive_multiply_pretransposed(a, &bt)?);
    }
    let chunk = p.div_ceil(threads);
    let mut parts: Vec<Vec<u32>> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let (lo, hi) = (t * chunk, ((t + 1) * chunk).min(p));
                let (a, bt) = (&a, &bt);
                scope.spawn(move || {
                    let mut out = Vec::with_capacity((hi - lo) * bt.rows());
                    for i in lo..hi {
                        naive_product_row(a, bt, i, &mut out);
                    }
                    out
                })
            })
            .collect();
        parts = handles.into_iter().map(|h| h.join().unwrap()).collect();
    });
    let data: Vec<u32> = parts.concat();
    Ok(IntMatrix::from_vec(p, b.cols(), data)?)
}

/// Tree multiplier split over 64-column word blocks of B.
pub fn mmclus_st_threaded(
    a: &BitMatrix,
    b: &BitMatrix,
    tree: &SpanningTree,
    threads: usize,
) -> Result<StProduct> {
    let total_words = b.words_per_row();
    let threads = threads.clamp(1, total_words.max(1));
    if threads == 1 {
        return Ok(clusmat_core::mmclus_st(a, b, tree)?);
    }
    let chunk = total_words.div_ceil(threads);
    let mut blocks: Vec<StProduct> = Vec::new();
    let mut result: clusmat_core::Result<()> = Ok(());
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let (lo, hi) = (t * chunk, ((t + 1) * chunk).min(total_words));
                scope.spawn(move || mmclus_st_word_range(a, b, tree, lo..hi))
            })
            .collect();
        for h in handles {
            match h.join().unwrap() {
                Ok(block) => blocks.push(block),
                Err(e) => result = Err(e),
            }
        }
    });
    result?;

    let p = a.rows();
    let r = b.cols();
    let mut c = IntMatrix::zeros(p, r);
    for i in 0..p {
        let mut j0 = 0usize;
        for block in &blocks {
            c.row_mut(i)[j0..j0 + block.c.cols()].copy_from_slice(block.c.row(i));
            j0 += block.c.cols();
        }
    }
    Ok(StProduct {
        c,
        delta_updates_per_column: blocks[0].delta_updates_per_column,
        ham_cost: blocks[0].ham_cost,
    })
}

/// Threaded version of [`clusmat_core::exact_clustered`], including the
/// side selection by predicted delta work. An externally supplied tree
/// forces the row side.
pub fn exact_clustered_threaded(
    a: &BitMatrix,
    b: &BitMatrix,
    ell: usize,
    k: usize,
    threads: usize,
    first_center: usize,
    external_tree: Option<&SpanningTree>,
) -> Result<ExactProduct> {
    if let Some(tree) = external_tree {
        let st = mmclus_st_threaded(a, b, tree, threads)?;
        return Ok(ExactProduct {
            c: st.c,
            side: TreeSide::RowsOfA,
            radius_a: 0,
            radius_b: 0,
            ham_cost_a: st.ham_cost,
            ham_cost_b: 0,
            delta_updates_per_column: st.delta_updates_per_column,
        });
    }

    let a_points = a.row_views();
    let row_clustering = gonzalez(&a_points, ell, first_center.min(a.rows() - 1))?;
    let tree_a = build_cluster_spanning_tree(&a_points, &row_clustering)?;

    let bt = transpose(b);
    let b_points = bt.row_views();
    let col_clustering = gonzalez(&b_points, k, first_center.min(b.cols() - 1))?;
    let tree_b = build_cluster_spanning_tree(&b_points, &col_clustering)?;

    let cost_a = b.cols() as u64 * tree_a.ham_cost();
    let cost_b = a.rows() as u64 * tree_b.ham_cost();

    if cost_a <= cost_b {
        let st = mmclus_st_threaded(a, b, &tree_a, threads)?;
        Ok(ExactProduct {
            c: st.c,
            side: TreeSide::RowsOfA,
            radius_a: row_clustering.achieved_radius,
            radius_b: col_clustering.achieved_radius,
            ham_cost_a: tree_a.ham_cost(),
            ham_cost_b: tree_b.ham_cost(),
            delta_updates_per_column: st.delta_updates_per_column,
        })
    } else {
        let at = transpose(a);
        let st = mmclus_st_threaded(&bt, &at, &tree_b, threads)?;
        Ok(ExactProduct {
            c: st.c.transposed(),
            side: TreeSide::ColsOfB,
            radius_a: row_clustering.achieved_radius,
            radius_b: col_clustering.achieved_radius,
            ham_cost_a: tree_a.ham_cost(),
            ham_cost_b: tree_b.ham_cost(),
            delta_updates_per_column: st.delta_updates_per_column,
        })
    }
}
