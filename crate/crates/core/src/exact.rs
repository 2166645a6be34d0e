//! Exact product via delta updates along a spanning tree of the rows.
//!
//! A spanning tree of the rows of A in Hamming space turns the product
//! into one direct row of inner products at the root plus, per tree edge,
//! a ±1 correction over the coordinates where the two endpoint rows
//! differ. The cluster-induced tree (pendants on their center, centers on
//! a path) bounds the total correction work by the clustering radius.
//!
//! Correctness never depends on the tree being good — any spanning tree
//! yields the exact product; only the running time varies.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::bitmatrix::{ham, transpose, BitMatrix, BitRow, IntMatrix};
use crate::clustering::{gonzalez, Clustering};
use crate::error::Error;
use crate::Result;

/// Spanning tree over row indices, as parent links.
#[derive(Debug, Clone)]
pub struct SpanningTree {
    root: usize,
    parent: Vec<usize>,
    children: Vec<Vec<usize>>,
    /// `ham(row_v, row_parent(v))` per vertex; 0 at the root.
    edge_ham: Vec<u32>,
    ham_cost: u64,
}

impl SpanningTree {
    /// Builds a tree from a parent array (`parent[root] == root`),
    /// computing Hamming edge costs from the given rows.
    pub fn from_parents(points: &[BitRow<'_>], parent: Vec<usize>) -> Result<Self> {
        let n = points.len();
        if n == 0 || parent.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: parent.len(),
            });
        }
        let mut root = None;
        for (v, &p) in parent.iter().enumerate() {
            if p >= n {
                return Err(Error::IndexOutOfRange { index: p, bound: n });
            }
            if p == v {
                if root.is_some() {
                    return Err(Error::Contract("spanning tree has multiple roots"));
                }
                root = Some(v);
            }
        }
        let root = root.ok_or(Error::Contract("spanning tree has no root"))?;

        let mut children = vec![Vec::new(); n];
        for (v, &p) in parent.iter().enumerate() {
            if v != root {
                children[p].push(v);
            }
        }
        // reachability from the root doubles as the acyclicity check
        let mut seen = vec![false; n];
        let mut stack = vec![root];
        seen[root] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &c in &children[v] {
                if !seen[c] {
                    seen[c] = true;
                    count += 1;
                    stack.push(c);
                }
            }
        }
        if count != n {
            return Err(Error::Contract("parent links do not form a spanning tree"));
        }

        let mut edge_ham = vec![0u32; n];
        let mut ham_cost = 0u64;
        for v in 0..n {
            if v != root {
                edge_ham[v] = ham(&points[v], &points[parent[v]])?;
                ham_cost += edge_ham[v] as u64;
            }
        }
        Ok(Self {
            root,
            parent,
            children,
            edge_ham,
            ham_cost,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    #[inline]
    pub fn root(&self) -> usize {
        self.root
    }

    #[inline]
    pub fn parent_of(&self, v: usize) -> usize {
        self.parent[v]
    }

    #[inline]
    pub fn parents(&self) -> &[usize] {
        &self.parent
    }

    #[inline]
    pub fn edge_ham(&self, v: usize) -> u32 {
        self.edge_ham[v]
    }

    /// Total Hamming cost: sum over tree edges of the endpoint distance.
    #[inline]
    pub fn ham_cost(&self) -> u64 {
        self.ham_cost
    }
}

/// Star-plus-path tree induced by a clustering whose centers are input
/// points: non-centers hang as pendants off their assigned center, and
/// the centers form a path in creation order rooted at the first center.
///
/// Its cost is at most `(n−k)·achieved_radius + (k−1)·q`.
pub fn build_cluster_spanning_tree(
    points: &[BitRow<'_>],
    clustering: &Clustering,
) -> Result<SpanningTree> {
    let n = points.len();
    if clustering.assignment.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: clustering.assignment.len(),
        });
    }
    let centers = &clustering.center_indices;
    if centers.is_empty() {
        return Err(Error::Contract("clustering centers are not input points"));
    }
    let mut is_center = vec![false; n];
    for &c in centers {
        if c >= n {
            return Err(Error::IndexOutOfRange { index: c, bound: n });
        }
        if is_center[c] {
            return Err(Error::Contract("duplicate center index"));
        }
        is_center[c] = true;
    }

    let mut parent = vec![0usize; n];
    parent[centers[0]] = centers[0];
    for t in 1..centers.len() {
        parent[centers[t]] = centers[t - 1];
    }
    for v in 0..n {
        if !is_center[v] {
            parent[v] = centers[clustering.assignment[v]];
        }
    }
    SpanningTree::from_parents(points, parent)
}

/// A tree traversal: the visiting order U plus one difference set per
/// edge (indexed by the child vertex; revisits reuse the same set).
#[derive(Debug, Clone)]
pub struct Traversal {
    /// Walk through the tree visiting every vertex; consecutive entries
    /// are adjacent. At most `2n − 1` entries.
    pub order: Vec<usize>,
    /// Per vertex `v != root`: coordinates where `row_v` differs from its
    /// parent's row, ascending.
    pub diff: Vec<Vec<u32>>,
}

/// Depth-first Euler tour from the root, with trailing returns trimmed,
/// plus the per-edge difference sets.
pub fn traverse(tree: &SpanningTree, points: &[BitRow<'_>]) -> Result<Traversal> {
    let n = tree.len();
    if points.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: points.len(),
        });
    }

    let mut order = Vec::with_capacity(2 * n);
    let mut last_new = 0usize; // position in `order` of the last first visit
    // iterative DFS recording re-arrivals at parents
    let mut stack: Vec<(usize, usize)> = vec![(tree.root(), 0)];
    order.push(tree.root());
    while let Some(top) = stack.last_mut() {
        let (v, next_child) = (top.0, top.1);
        if next_child < tree.children[v].len() {
            top.1 += 1;
            let c = tree.children[v][next_child];
            order.push(c);
            last_new = order.len() - 1;
            stack.push((c, 0));
        } else {
            stack.pop();
            if let Some(&(p, _)) = stack.last() {
                order.push(p);
            }
        }
    }
    order.truncate(last_new + 1);

    let mut diff = vec![Vec::new(); n];
    for v in 0..n {
        if v != tree.root() {
            diff[v] = points[v].diff_indices(&points[tree.parent_of(v)])?;
        }
    }
    Ok(Traversal { order, diff })
}

/// Exact product plus instrumentation from one spanning-tree run.
#[derive(Debug, Clone)]
pub struct StProduct {
    pub c: IntMatrix,
    /// Correction-loop iterations spent per output column (identical for
    /// all columns); at most `2·ham_cost`.
    pub delta_updates_per_column: u64,
    pub ham_cost: u64,
}

/// Adds (`sign > 0`) or subtracts each set bit of `row` restricted to the
/// given word range into `out` (one counter per bit of the range).
fn apply_bits(row: &BitRow<'_>, words: &Range<usize>, out: &mut [u32], add: bool) {
    let base = words.start;
    for wi in words.clone() {
        let mut bits = row.words()[wi];
        while bits != 0 {
            let j = (wi - base) * 64 + bits.trailing_zeros() as usize;
            if j >= out.len() {
                break;
            }
            if add {
                out[j] = out[j].wrapping_add(1);
            } else {
                out[j] = out[j].wrapping_sub(1);
            }
            bits &= bits - 1;
        }
    }
}

/// Exact product of A and B given a spanning tree of the rows of A.
///
/// Computes the root row directly, then walks the traversal; the first
/// arrival at each vertex copies its parent's finished row and applies
/// the ±1 rule over the edge's difference set (revisited vertices are
/// already exact, so their delta replay is skipped).
pub fn mmclus_st(a: &BitMatrix, b: &BitMatrix, tree: &SpanningTree) -> Result<StProduct> {
    mmclus_st_word_range(a, b, tree, 0..b.words_per_row())
}

/// As [`mmclus_st`] restricted to a range of 64-column word blocks of B;
/// the result has `min(r − 64·start, 64·len)` columns. Lets callers
/// parallelize over column blocks.
pub fn mmclus_st_word_range(
    a: &BitMatrix,
    b: &BitMatrix,
    tree: &SpanningTree,
    words: Range<usize>,
) -> Result<StProduct> {
    if a.cols() != b.rows() {
        return Err(Error::DimensionMismatch {
            expected: a.cols(),
            got: b.rows(),
        });
    }
    if tree.len() != a.rows() {
        return Err(Error::Contract("spanning tree does not span the rows of A"));
    }
    if words.end > b.words_per_row() || words.start > words.end {
        return Err(Error::IndexOutOfRange {
            index: words.end,
            bound: b.words_per_row(),
        });
    }

    let p = a.rows();
    let cols = (b.cols() - words.start * 64).min((words.end - words.start) * 64);
    let points = a.row_views();
    let traversal = traverse(tree, &points)?;

    let mut c = IntMatrix::zeros(p, cols);

    // root row: direct accumulation of the B rows selected by A's root row
    let root = tree.root();
    {
        let out = c.row_mut(root);
        let a_root = a.row(root);
        for (wi, &w) in a_root.words().iter().enumerate() {
            let mut bits = w;
            while bits != 0 {
                let h = wi * 64 + bits.trailing_zeros() as usize;
                apply_bits(&b.row(h), &words, out, true);
                bits &= bits - 1;
            }
        }
    }

    let mut visited = vec![false; p];
    visited[root] = true;
    let mut delta_updates = 0u64;
    let mut prev = traversal.order[0];
    for &v in &traversal.order[1..] {
        if !visited[v] {
            visited[v] = true;
            c.copy_row(prev, v);
            delta_updates += traversal.diff[v].len() as u64;
            let out = c.row_mut(v);
            for &h in &traversal.diff[v] {
                let h = h as usize;
                // on a differing coordinate exactly one endpoint has the
                // bit set: add when it is the child, subtract otherwise
                apply_bits(&b.row(h), &words, out, a.get(v, h));
            }
        }
        prev = v;
    }

    Ok(StProduct {
        c,
        delta_updates_per_column: delta_updates,
        ham_cost: tree.ham_cost(),
    })
}

/// Which side the tree multiplier ran on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeSide {
    RowsOfA,
    ColsOfB,
}

/// Exact product with instrumentation from [`exact_clustered`].
#[derive(Debug, Clone)]
pub struct ExactProduct {
    pub c: IntMatrix,
    pub side: TreeSide,
    pub radius_a: u32,
    pub radius_b: u32,
    pub ham_cost_a: u64,
    pub ham_cost_b: u64,
    pub delta_updates_per_column: u64,
}

/// Clusters the rows of A (`ell` centers) and the columns of B (`k`
/// centers), builds both star-plus-path trees, and runs the tree
/// multiplier on the side with the smaller predicted delta work
/// (`r·ham(T_A)` vs `p·ham(T_B)`).
pub fn exact_clustered(
    a: &BitMatrix,
    b: &BitMatrix,
    ell: usize,
    k: usize,
) -> Result<ExactProduct> {
    if a.cols() != b.rows() {
        return Err(Error::DimensionMismatch {
            expected: a.cols(),
            got: b.rows(),
        });
    }
    if ell == 0 || ell > a.rows() {
        return Err(Error::InvalidParameter("ell must be in [1, p]"));
    }
    if k == 0 || k > b.cols() {
        return Err(Error::InvalidParameter("k must be in [1, r]"));
    }

    let a_points = a.row_views();
    let row_clustering = gonzalez(&a_points, ell, 0)?;
    let tree_a = build_cluster_spanning_tree(&a_points, &row_clustering)?;

    let bt = transpose(b);
    let b_points = bt.row_views();
    let col_clustering = gonzalez(&b_points, k, 0)?;
    let tree_b = build_cluster_spanning_tree(&b_points, &col_clustering)?;

    let cost_a = b.cols() as u64 * tree_a.ham_cost();
    let cost_b = a.rows() as u64 * tree_b.ham_cost();

    if cost_a <= cost_b {
        let st = mmclus_st(a, b, &tree_a)?;
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
        let st = mmclus_st(&bt, &at, &tree_b)?;
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
