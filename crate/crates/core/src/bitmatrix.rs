//! Dense bit-packed 0-1 matrices and the popcount primitives on them.
//!
//! Rows are packed into 64-bit words, least significant bit first. All
//! padding bits beyond the logical width are kept zero so that word-wise
//! popcounts never read garbage; every constructor enforces this.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::Result;

pub(crate) const WORD_BITS: usize = 64;

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// Mask selecting the valid bits of the last word of a row of width `bits`.
#[inline]
pub(crate) fn tail_mask(bits: usize) -> u64 {
    let rem = bits % WORD_BITS;
    if rem == 0 {
        u64::MAX
    } else {
        (1u64 << rem) - 1
    }
}

/// A borrowed view of one packed bit vector.
#[derive(Debug, Clone, Copy)]
pub struct BitRow<'a> {
    len: usize,
    words: &'a [u64],
}

impl<'a> BitRow<'a> {
    /// Wraps a packed word slice as a bit vector of length `len`.
    ///
    /// The slice must have exactly `⌈len/64⌉` words and zero padding bits.
    pub fn from_words(len: usize, words: &'a [u64]) -> Result<Self> {
        if words.len() != words_for(len) {
            return Err(Error::DimensionMismatch {
                expected: words_for(len),
                got: words.len(),
            });
        }
        if let Some(last) = words.last() {
            if last & !tail_mask(len) != 0 {
                return Err(Error::Contract("nonzero padding bits in bit row"));
            }
        }
        Ok(Self { len, words })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &'a [u64] {
        self.words
    }

    #[inline]
    pub fn get(&self, idx: usize) -> bool {
        debug_assert!(idx < self.len);
        self.words[idx / WORD_BITS] >> (idx % WORD_BITS) & 1 == 1
    }

    /// Number of set bits.
    #[inline]
    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// Indices of coordinates where `self` and `other` differ, ascending.
    pub fn diff_indices(&self, other: &BitRow<'_>) -> Result<Vec<u32>> {
        check_len(self, other)?;
        let mut out = Vec::new();
        for (wi, (x, y)) in self.words.iter().zip(other.words).enumerate() {
            let mut d = x ^ y;
            while d != 0 {
                let bit = d.trailing_zeros();
                out.push((wi * WORD_BITS) as u32 + bit);
                d &= d - 1;
            }
        }
        Ok(out)
    }
}

#[inline]
fn check_len(a: &BitRow<'_>, b: &BitRow<'_>) -> Result<()> {
    if a.len != b.len {
        return Err(Error::DimensionMismatch {
            expected: a.len,
            got: b.len,
        });
    }
    Ok(())
}

/// Hamming distance: the number of coordinates in which two bit vectors
/// differ. Computed as the popcount of the word-wise XOR.
pub fn ham(a: &BitRow<'_>, b: &BitRow<'_>) -> Result<u32> {
    check_len(a, b)?;
    Ok(a.words
        .iter()
        .zip(b.words)
        .map(|(x, y)| (x ^ y).count_ones())
        .sum())
}

/// Inner product of two 0-1 vectors: popcount of the word-wise AND.
pub fn inner_product(a: &BitRow<'_>, b: &BitRow<'_>) -> Result<u32> {
    check_len(a, b)?;
    Ok(a.words
        .iter()
        .zip(b.words)
        .map(|(x, y)| (x & y).count_ones())
        .sum())
}

/// Dense 0-1 matrix, rows bit-packed into 64-bit words.
///
/// Immutable after construction; build with [`BitMatrixBuilder`] or one of
/// the `from_*` constructors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    /// Starts building a matrix with `cols` columns.
    pub fn builder(cols: usize) -> BitMatrixBuilder {
        BitMatrixBuilder {
            cols,
            words_per_row: words_for(cols),
            data: Vec::new(),
            rows: 0,
        }
    }

    /// Builds a matrix from raw packed words (row-major, `rows·⌈cols/64⌉`
    /// words). Padding bits must be zero.
    pub fn from_words(rows: usize, cols: usize, data: Vec<u64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter("matrix dimensions must be positive"));
        }
        let wpr = words_for(cols);
        if data.len() != rows * wpr {
            return Err(Error::DimensionMismatch {
                expected: rows * wpr,
                got: data.len(),
            });
        }
        let mask = tail_mask(cols);
        for r in 0..rows {
            if data[r * wpr + wpr - 1] & !mask != 0 {
                return Err(Error::Contract("nonzero padding bits in matrix row"));
            }
        }
        Ok(Self {
            rows,
            cols,
            words_per_row: wpr,
            data,
        })
    }

    /// Builds a matrix from rows of booleans. All rows must share a length.
    pub fn from_bool_rows(rows: &[Vec<bool>]) -> Result<Self> {
        let cols = rows.first().map(|r| r.len()).unwrap_or(0);
        let mut b = Self::builder(cols);
        for row in rows {
            b.push_row_bools(row)?;
        }
        b.finish()
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn words_per_row(&self) -> usize {
        self.words_per_row
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> BitRow<'_> {
        let start = i * self.words_per_row;
        BitRow {
            len: self.cols,
            words: &self.data[start..start + self.words_per_row],
        }
    }

    /// All rows as views, in order.
    pub fn row_views(&self) -> Vec<BitRow<'_>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.row(i).get(j)
    }

    /// Copies the given rows (by index) into a new matrix, in order.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(indices.len() * self.words_per_row);
        for &i in indices {
            if i >= self.rows {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    bound: self.rows,
                });
            }
            data.extend_from_slice(self.row(i).words);
        }
        Self::from_words(indices.len(), self.cols, data)
    }
}

/// Row-by-row builder for [`BitMatrix`].
pub struct BitMatrixBuilder {
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
    rows: usize,
}

impl BitMatrixBuilder {
    pub fn push_row_bools(&mut self, bits: &[bool]) -> Result<()> {
        if bits.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: bits.len(),
            });
        }
        let base = self.data.len();
        self.data.resize(base + self.words_per_row, 0);
        for (j, &bit) in bits.iter().enumerate() {
            if bit {
                self.data[base + j / WORD_BITS] |= 1u64 << (j % WORD_BITS);
            }
        }
        self.rows += 1;
        Ok(())
    }

    pub fn push_row_words(&mut self, words: &[u64]) -> Result<()> {
        let row = BitRow::from_words(self.cols, words)?;
        self.data.extend_from_slice(row.words);
        self.rows += 1;
        Ok(())
    }

    pub fn finish(self) -> Result<BitMatrix> {
        BitMatrix::from_words(self.rows, self.cols, self.data)
    }
}

/// Materialized transpose: `result(j,i) == m(i,j)`.
pub fn transpose(m: &BitMatrix) -> BitMatrix {
    let (p, q) = (m.rows(), m.cols());
    let wpr = words_for(p);
    let mut data = vec![0u64; q * wpr];
    for i in 0..p {
        let row = m.row(i);
        for (wi, &w) in row.words.iter().enumerate() {
            let mut bits = w;
            while bits != 0 {
                let j = wi * WORD_BITS + bits.trailing_zeros() as usize;
                data[j * wpr + i / WORD_BITS] |= 1u64 << (i % WORD_BITS);
                bits &= bits - 1;
            }
        }
    }
    BitMatrix::from_words(q, p, data).expect("transpose preserves padding invariant")
}

/// Dense matrix of non-negative integer counts (entries of 0-1 products).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [u32] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn as_slice(&self) -> &[u32] {
        &self.data
    }

    /// Copies row `src` over row `dst`.
    pub(crate) fn copy_row(&mut self, src: usize, dst: usize) {
        self.data
            .copy_within(src * self.cols..(src + 1) * self.cols, dst * self.cols);
    }

    pub fn transposed(&self) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn max_entry(&self) -> u32 {
        self.data.iter().copied().max().unwrap_or(0)
    }
}

/// Straightforward product of 0-1 matrices: `C_{ij} = ⟨A_{i*}, B_{*j}⟩`.
///
/// B is transposed once so that every entry is one packed AND-popcount
/// pass. This is the `O(pqr)` baseline and the test oracle for all other
/// multipliers in the crate.
pub fn naive_multiply(a: &BitMatrix, b: &BitMatrix) -> Result<IntMatrix> {
    if a.cols() != b.rows() {
        return Err(Error::DimensionMismatch {
            expected: a.cols(),
            got: b.rows(),
        });
    }
    let bt = transpose(b);
    naive_multiply_pretransposed(a, &bt)
}

/// As [`naive_multiply`], with the second operand already transposed
/// (`bt` is r×q). Lets callers amortize the transpose.
pub fn naive_multiply_pretransposed(a: &BitMatrix, bt: &BitMatrix) -> Result<IntMatrix> {
    if a.cols() != bt.cols() {
        return Err(Error::DimensionMismatch {
            expected: a.cols(),
            got: bt.cols(),
        });
    }
    let (p, r) = (a.rows(), bt.rows());
    let mut data = Vec::with_capacity(p * r);
    for i in 0..p {
        naive_product_row(a, bt, i, &mut data);
    }
    IntMatrix::from_vec(p, r, data)
}

/// Computes one output row of the naive product into `out`.
/// Exposed so a caller can split work across threads by row ranges.
pub fn naive_product_row(a: &BitMatrix, bt: &BitMatrix, i: usize, out: &mut Vec<u32>) {
    let ai = a.row(i);
    for j in 0..bt.rows() {
        let dot: u32 = ai
            .words
            .iter()
            .zip(bt.row(j).words)
            .map(|(x, y)| (x & y).count_ones())
            .sum();
        out.push(dot);
    }
}
