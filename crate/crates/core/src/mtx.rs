//! Matrix Market I/O for routing matrices (`coordinate complex general`).

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::basis::{RoutingEntry, RoutingMatrix};
use crate::error::{Error, Result};

pub const HEADER: &str = "%%MatrixMarket matrix coordinate complex general";

fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}

/// Serializes with 1-based indices, row-major order and shortest
/// round-trip float formatting, so equal matrices give identical bytes.
pub fn write_mtx(matrix: &RoutingMatrix, comments: &[String]) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    for c in comments {
        for line in c.lines() {
            let _ = writeln!(out, "% {line}");
        }
    }
    let _ = writeln!(out, "{} {} {}", matrix.rows(), matrix.cols(), matrix.nnz());
    for e in matrix.entries() {
        let _ = writeln!(
            out,
            "{} {} {} {}",
            e.row + 1,
            e.col + 1,
            fmt_f64(e.value.re),
            fmt_f64(e.value.im)
        );
    }
    out
}

pub fn read_mtx(text: &str) -> Result<RoutingMatrix> {
    let err = |line: usize, message: &str| Error::MatrixMarket {
        line,
        message: message.to_string(),
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    match lines.next() {
        Some((_, h)) if h.eq_ignore_ascii_case(HEADER) => {}
        _ => return Err(err(1, "expected coordinate complex general header")),
    }
    let mut body = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (n, size) = body.next().ok_or_else(|| err(2, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(str::parse)
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| err(n, "bad size line"))?;
    let [rows, cols, nnz] = dims[..] else {
        return Err(err(n, "size line needs three integers"));
    };
    let mut entries = Vec::with_capacity(nnz);
    for (n, line) in body {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 4 {
            return Err(err(n, "entry needs row, column, real and imaginary parts"));
        }
        let row: usize = f[0].parse().map_err(|_| err(n, "bad row index"))?;
        let col: usize = f[1].parse().map_err(|_| err(n, "bad column index"))?;
        let re: f64 = f[2].parse().map_err(|_| err(n, "bad real part"))?;
        let im: f64 = f[3].parse().map_err(|_| err(n, "bad imaginary part"))?;
        if row == 0 || row > rows || col == 0 || col > cols {
            return Err(err(n, "index out of range"));
        }
        entries.push(RoutingEntry {
            row: row - 1,
            col: col - 1,
            value: Complex64::new(re, im),
        });
    }
    if entries.len() != nnz {
        return Err(err(0, &format!("expected {nnz} entries, found {}", entries.len())));
    }
    Ok(RoutingMatrix::new(rows, cols, entries))
}
