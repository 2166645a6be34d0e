//! Serialization of preprocessing state (`.pps` files).
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic "PPS1" | version u8 | flags u8 (bit0 two-sided, bit1 swapped)
//! sha256(A input file) | sha256(B input file)
//! p, q, r: u64 (effective, post-swap, orientation)
//! d: p·r u32 entries
//! a_centers: bit matrix (rows u64, cols u64, packed words)
//! assign_a: p u32 entries | radius_a u32
//! ind_a: p arrays, each u32 length then entries
//! b_cols: bit matrix (columns of effective B stored as rows)
//! two-sided only: b_centers bit matrix | assign_b | radius_b | ind_b
//! ```
//!
//! The digests are provenance only; queries need nothing beyond this file.

use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use clusmat_core::{BitMatrix, ColSide, PreprocState};

use crate::error::{AppError, Result};

const PPS_MAGIC: &[u8; 4] = b"PPS1";
const PPS_VERSION: u8 = 1;

/// SHA-256 of a file's raw bytes, for recording input provenance.
pub fn file_digest(path: &Path) -> Result<[u8; 32]> {
    let bytes = fs::read(path)?;
    Ok(Sha256::digest(&bytes).into())
}

pub fn save_state(
    path: &Path,
    state: &PreprocState,
    a_digest: &[u8; 32],
    b_digest: &[u8; 32],
) -> Result<()> {
    fs::write(path, render_state(state, a_digest, b_digest))
    .map_err(AppError::Io)
}

pub fn load_state(path: &Path) -> Result<PreprocState> {
    let bytes = fs::read(path)?;
    parse_state(&bytes).map(|(s, _, _)| s)
}

pub fn render_state(state: &PreprocState, a_digest: &[u8; 32], b_digest: &[u8; 32]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(PPS_MAGIC);
    out.push(PPS_VERSION);
    let mut flags = 0u8;
    if state.col_side.is_some() {
        flags |= 1;
    }
    if state.swapped {
        flags |= 2;
    }
    out.push(flags);
    out.extend_from_slice(a_digest);
    out.extend_from_slice(b_digest);
    for dim in [state.p, state.q, state.r] {
        out.extend_from_slice(&(dim as u64).to_le_bytes());
    }
    for i in 0..state.d.rows() {
        for &v in state.d.row(i) {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    put_bitmatrix(&mut out, &state.a_centers);
    put_assignment(&mut out, &state.assign_a);
    out.extend_from_slice(&state.radius_a.to_le_bytes());
    put_index_sets(&mut out, &state.ind_a);
    put_bitmatrix(&mut out, &state.b_cols);
    if let Some(col) = &state.col_side {
        put_bitmatrix(&mut out, &col.b_centers);
        put_assignment(&mut out, &col.assign_b);
        out.extend_from_slice(&col.radius_b.to_le_bytes());
        put_index_sets(&mut out, &col.ind_b);
    }
    out
}

/// Parses a `.pps` blob, returning the state and the two input digests.
pub fn parse_state(bytes: &[u8]) -> Result<(PreprocState, [u8; 32], [u8; 32])> {
    let mut c = Cursor { bytes, pos: 0 };
    if c.take(4)? != PPS_MAGIC {
        return Err(AppError::Parse("not a .pps file (bad magic)".into()));
    }
    let version = c.u8()?;
    if version != PPS_VERSION {
        return Err(AppError::Parse(format!(
            "unsupported .pps version {version}"
        )));
    }
    let flags = c.u8()?;
    if flags & !3 != 0 {
        return Err(AppError::Parse(format!("unknown .pps flags {flags:#x}")));
    }
    let two_sided = flags & 1 != 0;
    let swapped = flags & 2 != 0;
    let a_digest: [u8; 32] = c.take(32)?.try_into().unwrap();
    let b_digest: [u8; 32] = c.take(32)?.try_into().unwrap();
    let p = c.u64()? as usize;
    let q = c.u64()? as usize;
    let r = c.u64()? as usize;

    let mut d_data = Vec::with_capacity(p.saturating_mul(r));
    for _ in 0..p * r {
        d_data.push(c.u32()?);
    }
    let d = clusmat_core::IntMatrix::from_vec(p, r, d_data)
        .map_err(|e| AppError::Parse(format!("invalid .pps approximation block: {e}")))?;

    let a_centers = get_bitmatrix(&mut c, q, "row centers")?;
    let assign_a = get_assignment(&mut c, p, a_centers.rows())?;
    let radius_a = c.u32()?;
    let ind_a = get_index_sets(&mut c, p, q)?;
    let b_cols = get_bitmatrix(&mut c, q, "B columns")?;
    if b_cols.rows() != r {
        return Err(AppError::Parse(format!(
            ".pps B-column block has {} rows, expected {r}",
            b_cols.rows()
        )));
    }

    let col_side = if two_sided {
        let b_centers = get_bitmatrix(&mut c, q, "column centers")?;
        let assign_b = get_assignment(&mut c, r, b_centers.rows())?;
        let radius_b = c.u32()?;
        let ind_b = get_index_sets(&mut c, r, q)?;
        Some(ColSide {
            b_centers,
            assign_b,
            ind_b,
            radius_b,
        })
    } else {
        None
    };

    if c.pos != bytes.len() {
        return Err(AppError::Parse(format!(
            "{} trailing bytes after .pps payload",
            bytes.len() - c.pos
        )));
    }

    Ok((
        PreprocState {
            swapped,
            p,
            q,
            r,
            d,
            a_centers,
            assign_a,
            ind_a,
            radius_a,
            b_cols,
            col_side,
        },
        a_digest,
        b_digest,
    ))
}

fn put_bitmatrix(out: &mut Vec<u8>, m: &BitMatrix) {
    out.extend_from_slice(&(m.rows() as u64).to_le_bytes());
    out.extend_from_slice(&(m.cols() as u64).to_le_bytes());
    for w in m.words() {
        out.extend_from_slice(&w.to_le_bytes());
    }
}

fn put_assignment(out: &mut Vec<u8>, assign: &[usize]) {
    for &a in assign {
        out.extend_from_slice(&(a as u32).to_le_bytes());
    }
}

fn put_index_sets(out: &mut Vec<u8>, sets: &[Vec<u32>]) {
    for set in sets {
        out.extend_from_slice(&(set.len() as u32).to_le_bytes());
        for &v in set {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
}

fn get_bitmatrix(c: &mut Cursor<'_>, expect_cols: usize, what: &str) -> Result<BitMatrix> {
    let rows = c.u64()? as usize;
    let cols = c.u64()? as usize;
    if cols != expect_cols {
        return Err(AppError::Parse(format!(
            ".pps {what} block has width {cols}, expected {expect_cols}"
        )));
    }
    let wpr = cols.div_ceil(64);
    let mut words = Vec::with_capacity(rows.saturating_mul(wpr));
    for _ in 0..rows * wpr {
        words.push(c.u64()?);
    }
    BitMatrix::from_words(rows, cols, words)
        .map_err(|e| AppError::Parse(format!("invalid .pps {what} block: {e}")))
}

fn get_assignment(c: &mut Cursor<'_>, n: usize, bound: usize) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let a = c.u32()? as usize;
        if a >= bound {
            return Err(AppError::Parse(format!(
                ".pps assignment {a} out of range (< {bound})"
            )));
        }
        out.push(a);
    }
    Ok(out)
}

fn get_index_sets(c: &mut Cursor<'_>, n: usize, dim: usize) -> Result<Vec<Vec<u32>>> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let len = c.u32()? as usize;
        if len > dim {
            return Err(AppError::Parse(format!(
                ".pps index set of length {len} exceeds dimension {dim}"
            )));
        }
        let mut set = Vec::with_capacity(len);
        for _ in 0..len {
            let v = c.u32()?;
            if v as usize >= dim {
                return Err(AppError::Parse(format!(
                    ".pps index {v} out of range (< {dim})"
                )));
            }
            set.push(v);
        }
        out.push(set);
    }
    Ok(out)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(AppError::Parse("truncated .pps file".into()));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}
