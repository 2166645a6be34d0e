//! On-disk matrix formats.
//!
//! - `.bm` text: first line `p q`, then p lines of exactly q characters
//!   from {0,1}.
//! - `.bmb` binary: magic `BM01`, little-endian u64 p and q, then
//!   `p·⌈q/64⌉` little-endian u64 words, row-major, padding bits zero.
//! - Integer products are written as CSV: p lines of r comma-separated
//!   decimal values.
//! - Spanning trees load from a text file with one parent index per
//!   line; the root names itself.

use std::fs;
use std::io::Write;
use std::path::Path;

use clusmat_core::{BitMatrix, BitRow, IntMatrix, SpanningTree};

use crate::error::{AppError, Result};

const BMB_MAGIC: &[u8; 4] = b"BM01";

pub fn parse_bm(text: &str) -> Result<BitMatrix> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| AppError::Parse("empty .bm file".into()))?;
    let mut parts = header.split_whitespace();
    let p: usize = parse_num(parts.next(), "row count")?;
    let q: usize = parse_num(parts.next(), "column count")?;
    if parts.next().is_some() {
        return Err(AppError::Parse("extra tokens on .bm header line".into()));
    }

    let mut builder = BitMatrix::builder(q);
    let mut rows = 0usize;
    for line in lines {
        if line.len() != q {
            return Err(AppError::Parse(format!(
                "row {rows}: expected {q} characters, got {}",
                line.len()
            )));
        }
        let mut bits = Vec::with_capacity(q);
        for ch in line.chars() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                other => {
                    return Err(AppError::Parse(format!(
                        "row {rows}: invalid character {other:?}"
                    )))
                }
            }
        }
        builder.push_row_bools(&bits).map_err(AppError::Core)?;
        rows += 1;
    }
    if rows != p {
        return Err(AppError::Parse(format!("expected {p} rows, got {rows}")));
    }
    builder.finish().map_err(AppError::Core)
}

pub fn render_bm(m: &BitMatrix) -> String {
    let mut out = String::with_capacity((m.cols() + 1) * (m.rows() + 1));
    out.push_str(&format!("{} {}\n", m.rows(), m.cols()));
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out.push(if m.get(i, j) { '1' } else { '0' });
        }
        out.push('\n');
    }
    out
}

pub fn parse_bmb(bytes: &[u8]) -> Result<BitMatrix> {
    if bytes.len() < 20 || &bytes[0..4] != BMB_MAGIC {
        return Err(AppError::Parse("not a .bmb file (bad magic)".into()));
    }
    let p = u64::from_le_bytes(bytes[4..12].try_into().unwrap()) as usize;
    let q = u64::from_le_bytes(bytes[12..20].try_into().unwrap()) as usize;
    let wpr = q.div_ceil(64);
    let expected = 20 + p * wpr * 8;
    if bytes.len() != expected {
        return Err(AppError::Parse(format!(
            ".bmb payload length {} does not match {p}x{q} ({expected} bytes expected)",
            bytes.len()
        )));
    }
    let words: Vec<u64> = bytes[20..]
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    BitMatrix::from_words(p, q, words)
        .map_err(|e| AppError::Parse(format!("invalid .bmb contents: {e}")))
}

pub fn render_bmb(m: &BitMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(20 + m.words().len() * 8);
    out.extend_from_slice(BMB_MAGIC);
    out.extend_from_slice(&(m.rows() as u64).to_le_bytes());
    out.extend_from_slice(&(m.cols() as u64).to_le_bytes());
    for w in m.words() {
        out.extend_from_slice(&w.to_le_bytes());
    }
    out
}

/// Reads a matrix, dispatching on the file extension.
pub fn read_matrix(path: &Path) -> Result<BitMatrix> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("bm") => parse_bm(&fs::read_to_string(path)?),
        Some("bmb") => parse_bmb(&fs::read(path)?),
        _ => Err(AppError::Usage(format!(
            "unknown matrix extension on {}; use .bm or .bmb",
            path.display()
        ))),
    }
}

/// Writes a matrix, dispatching on the file extension.
pub fn write_matrix(path: &Path, m: &BitMatrix) -> Result<()> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("bm") => fs::write(path, render_bm(m))?,
        Some("bmb") => fs::write(path, render_bmb(m))?,
        _ => {
            return Err(AppError::Usage(format!(
                "unknown matrix extension on {}; use .bm or .bmb",
                path.display()
            )))
        }
    }
    Ok(())
}

pub fn write_csv<W: Write>(mut w: W, m: &IntMatrix) -> Result<()> {
    let mut line = String::new();
    for i in 0..m.rows() {
        line.clear();
        for (j, v) in m.row(i).iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            line.push_str(&v.to_string());
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    Ok(())
}

/// Parses a spanning tree over `points` from one parent index per line.
pub fn parse_tree(text: &str, points: &[BitRow<'_>]) -> Result<SpanningTree> {
    let parents: Vec<usize> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.trim()
                .parse::<usize>()
                .map_err(|e| AppError::Parse(format!("bad tree line {l:?}: {e}")))
        })
        .collect::<Result<_>>()?;
    SpanningTree::from_parents(points, parents).map_err(AppError::Core)
}

fn parse_num(tok: Option<&str>, what: &str) -> Result<usize> {
    tok.ok_or_else(|| AppError::Parse(format!("missing {what}")))?
        .parse()
        .map_err(|e| AppError::Parse(format!("bad {what}: {e}")))
}
