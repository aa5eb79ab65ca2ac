//! Matrix Market coordinate files and JSON report output.
//!
//! Writing is canonical: `general` symmetry, explicit nonzeros only, entries
//! sorted row-major, values printed with 17 significant digits. A canonical
//! file therefore reads back to the same matrix bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::Matrix;

const BANNER: &str = "%%MatrixMarket";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_header(line_no: usize, line: &str) -> Result<(Field, Symmetry)> {
    let words: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if words.len() != 5 || !words[0].eq_ignore_ascii_case(BANNER) {
        return Err(parse_err(line_no, "expected '%%MatrixMarket matrix coordinate <field> <symmetry>'"));
    }
    if words[1] != "matrix" {
        return Err(parse_err(line_no, format!("unsupported object '{}'", words[1])));
    }
    if words[2] != "coordinate" {
        return Err(parse_err(line_no, format!("unsupported format '{}', only coordinate", words[2])));
    }
    let field = match words[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "pattern" => Field::Pattern,
        other => return Err(parse_err(line_no, format!("unsupported field '{other}'"))),
    };
    let symmetry = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        other => return Err(parse_err(line_no, format!("unsupported symmetry '{other}'"))),
    };
    Ok((field, symmetry))
}

fn parse_index(line_no: usize, tok: &str, bound: usize, what: &str) -> Result<usize> {
    let v: usize = tok
        .parse()
        .map_err(|_| parse_err(line_no, format!("bad {what} index '{tok}'")))?;
    if v == 0 || v > bound {
        return Err(parse_err(line_no, format!("{what} index {v} outside 1..={bound}")));
    }
    Ok(v - 1)
}

/// Parses Matrix Market coordinate text. Symmetric files are expanded.
pub fn parse_matrix_market(text: &str) -> Result<Matrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (first_no, first) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let (field, symmetry) = parse_header(first_no, first)?;

    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (size_no, size_line) = body.next().ok_or_else(|| parse_err(first_no + 1, "missing size line"))?;
    let dims: Vec<usize> = size_line
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| parse_err(size_no, "size line must be three non-negative integers"))?;
    if dims.len() != 3 {
        return Err(parse_err(size_no, "size line must be 'rows cols entries'"));
    }
    let (m, n, nnz) = (dims[0], dims[1], dims[2]);
    if symmetry == Symmetry::Symmetric && m != n {
        return Err(parse_err(size_no, "symmetric matrix must be square"));
    }

    let mut out = Matrix::zeros(m, n);
    let mut seen = vec![false; m * n];
    let mut count = 0usize;
    let mut last_line = size_no;
    for (no, line) in body {
        last_line = no;
        count += 1;
        if count > nnz {
            return Err(parse_err(no, format!("more than the declared {nnz} entries")));
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let want = if field == Field::Pattern { 2 } else { 3 };
        if toks.len() != want {
            return Err(parse_err(no, format!("expected {want} fields, found {}", toks.len())));
        }
        let i = parse_index(no, toks[0], m, "row")?;
        let j = parse_index(no, toks[1], n, "column")?;
        let v = match field {
            Field::Pattern => 1.0,
            Field::Integer => toks[2]
                .parse::<i64>()
                .map_err(|_| parse_err(no, format!("bad integer value '{}'", toks[2])))? as f64,
            Field::Real => toks[2]
                .parse::<f64>()
                .map_err(|_| parse_err(no, format!("bad real value '{}'", toks[2])))?,
        };
        if !v.is_finite() {
            return Err(parse_err(no, format!("non-finite value '{}'", toks[2])));
        }
        if symmetry == Symmetry::Symmetric && j > i {
            return Err(parse_err(no, "symmetric file lists an entry above the diagonal"));
        }
        let slot = i * n + j;
        if seen[slot] {
            return Err(parse_err(no, format!("duplicate entry ({}, {})", i + 1, j + 1)));
        }
        seen[slot] = true;
        out[(i, j)] = v;
        if symmetry == Symmetry::Symmetric {
            out[(j, i)] = v;
        }
    }
    if count < nnz {
        return Err(parse_err(last_line, format!("declared {nnz} entries, found {count}")));
    }
    Ok(out)
}

/// Canonical Matrix Market text of `m`.
pub fn format_matrix_market(m: &Matrix) -> String {
    let (rows, cols) = m.shape();
    let mut entries = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            let v = m[(i, j)];
            if v != 0.0 {
                entries.push((i, j, v));
            }
        }
    }
    let mut s = String::with_capacity(64 + 40 * entries.len());
    s.push_str("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(s, "{rows} {cols} {}", entries.len());
    for (i, j, v) in entries {
        let _ = writeln!(s, "{} {} {:.16e}", i + 1, j + 1, v);
    }
    s
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<Matrix> {
    parse_matrix_market(&fs::read_to_string(path)?)
}

pub fn write_matrix_market(m: &Matrix, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_matrix_market(m))?;
    Ok(())
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes `value` as JSON to `path`, or to standard output when `path` is `None`.
pub fn emit_json<T: Serialize + ?Sized>(value: &T, path: Option<&Path>) -> Result<()> {
    let s = to_json(value)?;
    match path {
        Some(p) => fs::write(p, s)?,
        None => print!("{s}"),
    }
    Ok(())
}
