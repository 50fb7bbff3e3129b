//! Matrix Market reader and writer for dense real matrices.
//!
//! Both `array` and `coordinate` layouts with `real` or `integer` fields are
//! accepted, in `general`, `symmetric` or `skew-symmetric` form. Coordinate
//! files are densified; repeated entries are summed. `pattern` and `complex`
//! fields are rejected.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    Array,
    Coordinate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    parse_matrix_market(&fs::read_to_string(path)?)
}

pub fn write_matrix_market(path: impl AsRef<Path>, a: &DenseMatrix, layout: Layout) -> Result<()> {
    fs::write(path, format_matrix_market(a, layout))?;
    Ok(())
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

pub fn parse_matrix_market(text: &str) -> Result<DenseMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let tokens: Vec<String> = header.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(1, format!("not a Matrix Market matrix header: {header:?}")));
    }
    let layout = match tokens[2].as_str() {
        "array" => Layout::Array,
        "coordinate" => Layout::Coordinate,
        other => return Err(parse_err(1, format!("unknown layout {other:?}"))),
    };
    match tokens[3].as_str() {
        "real" | "integer" | "double" => {}
        "pattern" | "complex" => {
            return Err(Error::Unsupported(format!("Matrix Market field {:?} is not supported", tokens[3])))
        }
        other => return Err(parse_err(1, format!("unknown field {other:?}"))),
    }
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        // real hermitian is symmetric
        "symmetric" | "hermitian" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        other => return Err(parse_err(1, format!("unknown symmetry {other:?}"))),
    };

    let mut data_lines = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (size_no, size_line) = data_lines.next().ok_or_else(|| parse_err(2, "missing size line"))?;
    let sizes = parse_usizes(size_line, size_no)?;
    let expected = if layout == Layout::Array { 2 } else { 3 };
    if sizes.len() != expected {
        return Err(parse_err(size_no, format!("expected {expected} integers on the size line")));
    }
    let (n_rows, n_cols) = (sizes[0], sizes[1]);
    if n_rows == 0 || n_cols == 0 {
        return Err(parse_err(size_no, "matrix dimensions must be positive"));
    }
    if symmetry != Symmetry::General && n_rows != n_cols {
        return Err(parse_err(size_no, "symmetric storage requires a square matrix"));
    }

    let mut a = DenseMatrix::zeros(n_rows, n_cols);
    let mirror = |a: &mut DenseMatrix, i: usize, j: usize, v: f64| {
        if i != j {
            match symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => a[(j, i)] += v,
                Symmetry::SkewSymmetric => a[(j, i)] -= v,
            }
        }
    };

    match layout {
        Layout::Array => {
            // column-major; symmetric variants store the lower triangle only
            let mut positions = (0..n_cols).flat_map(|j| {
                let start = match symmetry {
                    Symmetry::General => 0,
                    Symmetry::Symmetric => j,
                    Symmetry::SkewSymmetric => j + 1,
                };
                (start..n_rows).map(move |i| (i, j))
            });
            for (no, line) in data_lines {
                for tok in line.split_whitespace() {
                    let (i, j) = positions.next().ok_or_else(|| parse_err(no, "too many entries"))?;
                    let v = parse_value(tok, no)?;
                    a[(i, j)] = v;
                    mirror(&mut a, i, j, v);
                }
            }
            if positions.next().is_some() {
                return Err(parse_err(text.lines().count(), "too few entries"));
            }
        }
        Layout::Coordinate => {
            let nnz = sizes[2];
            let mut seen = 0;
            for (no, line) in data_lines {
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() != 3 {
                    return Err(parse_err(no, "expected `row col value`"));
                }
                let i = parse_index(toks[0], n_rows, no)?;
                let j = parse_index(toks[1], n_cols, no)?;
                let v = parse_value(toks[2], no)?;
                a[(i, j)] += v;
                mirror(&mut a, i, j, v);
                seen += 1;
            }
            if seen != nnz {
                return Err(parse_err(size_no, format!("header declares {nnz} entries, found {seen}")));
            }
        }
    }
    DenseMatrix::new(n_rows, n_cols, a.into_vec())
}

fn parse_usizes(line: &str, no: usize) -> Result<Vec<usize>> {
    line.split_whitespace().map(|t| t.parse().map_err(|_| parse_err(no, format!("invalid integer {t:?}")))).collect()
}

fn parse_index(tok: &str, bound: usize, no: usize) -> Result<usize> {
    let i: usize = tok.parse().map_err(|_| parse_err(no, format!("invalid index {tok:?}")))?;
    if i == 0 || i > bound {
        return Err(parse_err(no, format!("index {i} out of range 1..={bound}")));
    }
    Ok(i - 1)
}

fn parse_value(tok: &str, no: usize) -> Result<f64> {
    let v: f64 = tok.parse().map_err(|_| parse_err(no, format!("invalid number {tok:?}")))?;
    if !v.is_finite() {
        return Err(parse_err(no, format!("non-finite value {tok:?}")));
    }
    Ok(v)
}

/// Serializes as `real general`. Values use the shortest representation that
/// round-trips exactly.
pub fn format_matrix_market(a: &DenseMatrix, layout: Layout) -> String {
    let (n, m) = a.shape();
    let mut out = String::new();
    match layout {
        Layout::Array => {
            out.push_str("%%MatrixMarket matrix array real general\n");
            let _ = writeln!(out, "{n} {m}");
            for j in 0..m {
                for i in 0..n {
                    let _ = writeln!(out, "{:?}", a[(i, j)]);
                }
            }
        }
        Layout::Coordinate => {
            out.push_str("%%MatrixMarket matrix coordinate real general\n");
            let entries: Vec<(usize, usize, f64)> = (0..m)
                .flat_map(|j| (0..n).map(move |i| (i, j)))
                .map(|(i, j)| (i, j, a[(i, j)]))
                .filter(|&(_, _, v)| v != 0.0)
                .collect();
            let _ = writeln!(out, "{n} {m} {}", entries.len());
            for (i, j, v) in entries {
                let _ = writeln!(out, "{} {} {v:?}", i + 1, j + 1);
            }
        }
    }
    out
}
