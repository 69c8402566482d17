//! Matrix and subspace import/export.
//!
//! Matrices are read from MatrixMarket (`coordinate` or `array`; `real`,
//! `integer`, `complex` or `pattern`; `general`, `symmetric`, `hermitian` or
//! `skew-symmetric`) and from plain row-major CSV whose entries may be
//! complex numbers written `a+bi`. Floats are written in shortest
//! round-trip form.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{HilbertSpace, DEFAULT_RANK_TOL};
use crate::linalg::{CMat, CVec, C64};
use crate::subspace::Subspace;

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| parse_err(format!("bad number {s:?}")))
}

/// Parse `a`, `a+bi`, `a-bi`, `bi`, `i`, `-i` (also with `j`).
pub fn parse_complex(text: &str) -> Result<C64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(parse_err("empty entry"));
    }
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return Ok(C64::new(parse_f64(&s)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |t: &str| -> Result<f64> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => parse_f64(t),
        }
    };
    match split {
        Some(k) => Ok(C64::new(parse_f64(&body[..k])?, imag(&body[k..])?)),
        None => Ok(C64::new(0.0, imag(body)?)),
    }
}

fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

/// `a`, or `a+bi` / `a-bi` when the imaginary part is nonzero.
pub fn format_complex(z: C64) -> String {
    if z.im == 0.0 {
        return fmt_f64(z.re);
    }
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{sign}{}i", fmt_f64(z.re), fmt_f64(z.im.abs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Complex,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    Hermitian,
    Skew,
}

fn mirror(sym: Symmetry, z: C64) -> C64 {
    match sym {
        Symmetry::General | Symmetry::Symmetric => z,
        Symmetry::Hermitian => z.conj(),
        Symmetry::Skew => -z,
    }
}

/// Parse a MatrixMarket document.
pub fn parse_matrix_market(text: &str) -> Result<CMat> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| parse_err("empty MatrixMarket file"))?;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(format!("bad MatrixMarket header {header:?}")));
    }
    let coordinate = match tokens[2].as_str() {
        "coordinate" => true,
        "array" => false,
        other => return Err(parse_err(format!("unknown MatrixMarket format {other:?}"))),
    };
    let field = match tokens[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "complex" => Field::Complex,
        "pattern" => Field::Pattern,
        other => return Err(parse_err(format!("unknown MatrixMarket field {other:?}"))),
    };
    let sym = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "hermitian" => Symmetry::Hermitian,
        "skew-symmetric" => Symmetry::Skew,
        other => return Err(parse_err(format!("unknown MatrixMarket symmetry {other:?}"))),
    };
    if field == Field::Pattern && !coordinate {
        return Err(parse_err("pattern field requires coordinate format"));
    }
    let mut body = lines.map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('%'));
    let size: Vec<usize> = body
        .next()
        .ok_or_else(|| parse_err("missing size line"))?
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(format!("bad size entry {t:?}"))))
        .collect::<Result<_>>()?;
    let want = if coordinate { 3 } else { 2 };
    if size.len() != want {
        return Err(parse_err(format!("size line needs {want} integers")));
    }
    let (rows, cols) = (size[0], size[1]);
    if sym != Symmetry::General && rows != cols {
        return Err(parse_err("symmetric storage requires a square matrix"));
    }
    let value = |toks: &[&str]| -> Result<C64> {
        match field {
            Field::Pattern => Ok(C64::new(1.0, 0.0)),
            Field::Real | Field::Integer => {
                if toks.len() != 1 {
                    return Err(parse_err("expected one value per entry"));
                }
                Ok(C64::new(parse_f64(toks[0])?, 0.0))
            }
            Field::Complex => {
                if toks.len() != 2 {
                    return Err(parse_err("expected real and imaginary parts"));
                }
                Ok(C64::new(parse_f64(toks[0])?, parse_f64(toks[1])?))
            }
        }
    };

    let mut m = CMat::zeros(rows, cols);
    if coordinate {
        let nnz = size[2];
        for _ in 0..nnz {
            let line = body.next().ok_or_else(|| parse_err("fewer entries than declared"))?;
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() < 2 {
                return Err(parse_err(format!("bad entry line {line:?}")));
            }
            let idx = |t: &str, n: usize| -> Result<usize> {
                let k: usize = t.parse().map_err(|_| parse_err(format!("bad index {t:?}")))?;
                if k == 0 || k > n {
                    return Err(parse_err(format!("index {k} out of range 1..={n}")));
                }
                Ok(k - 1)
            };
            let (i, j) = (idx(toks[0], rows)?, idx(toks[1], cols)?);
            let z = value(&toks[2..])?;
            m[(i, j)] += z;
            if sym != Symmetry::General && i != j {
                m[(j, i)] += mirror(sym, z);
            }
        }
    } else {
        for j in 0..cols {
            let start = match sym {
                Symmetry::General => 0,
                Symmetry::Symmetric | Symmetry::Hermitian => j,
                Symmetry::Skew => j + 1,
            };
            for i in start..rows {
                let line = body.next().ok_or_else(|| parse_err("fewer entries than declared"))?;
                let toks: Vec<&str> = line.split_whitespace().collect();
                let z = value(&toks)?;
                m[(i, j)] = z;
                if sym != Symmetry::General && i != j {
                    m[(j, i)] = mirror(sym, z);
                }
            }
        }
    }
    if body.next().is_some() {
        return Err(parse_err("more entries than declared"));
    }
    Ok(m)
}

fn is_real(m: &CMat) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

fn entry_text(z: C64, real: bool) -> String {
    if real {
        fmt_f64(z.re)
    } else {
        format!("{} {}", fmt_f64(z.re), fmt_f64(z.im))
    }
}

/// Dense `array general` MatrixMarket text, column-major.
pub fn format_matrix_market_array(m: &CMat) -> String {
    let real = is_real(m);
    let mut out = format!("%%MatrixMarket matrix array {} general\n", if real { "real" } else { "complex" });
    let _ = writeln!(out, "{} {}", m.nrows(), m.ncols());
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let _ = writeln!(out, "{}", entry_text(m[(i, j)], real));
        }
    }
    out
}

/// Sparse `coordinate general` MatrixMarket text listing nonzero entries.
pub fn format_matrix_market_coordinate(m: &CMat) -> String {
    let real = is_real(m);
    let entries: Vec<(usize, usize, C64)> = (0..m.ncols())
        .flat_map(|j| (0..m.nrows()).map(move |i| (i, j)))
        .map(|(i, j)| (i, j, m[(i, j)]))
        .filter(|(_, _, z)| *z != C64::new(0.0, 0.0))
        .collect();
    let mut out = format!("%%MatrixMarket matrix coordinate {} general\n", if real { "real" } else { "complex" });
    let _ = writeln!(out, "{} {} {}", m.nrows(), m.ncols(), entries.len());
    for (i, j, z) in entries {
        let _ = writeln!(out, "{} {} {}", i + 1, j + 1, entry_text(z, real));
    }
    out
}

/// Row-major CSV; blank lines and lines starting with `#` are skipped.
pub fn parse_csv(text: &str) -> Result<CMat> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<C64>> = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| parse_err(e.to_string()))?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        rows.push(rec.iter().map(parse_complex).collect::<Result<_>>()?);
    }
    let cols = rows.first().map_or(0, Vec::len);
    if let Some((r, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
        return Err(parse_err(format!("row {} has {} entries, expected {cols}", r + 1, row.len())));
    }
    Ok(CMat::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

pub fn format_csv(m: &CMat) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format_complex(m[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Parse matrix text, choosing the format from its first line.
pub fn parse_matrix(text: &str) -> Result<CMat> {
    if text.trim_start().to_ascii_lowercase().starts_with("%%matrixmarket") {
        parse_matrix_market(text)
    } else {
        parse_csv(text)
    }
}

pub fn read_matrix(path: &Path) -> Result<CMat> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_matrix(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Write as MatrixMarket array when the extension is `.mtx`, CSV otherwise.
pub fn write_matrix(path: &Path, m: &CMat) -> Result<()> {
    let text = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("mtx")) {
        format_matrix_market_array(m)
    } else {
        format_csv(m)
    };
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Read a vector stored as a single row or a single column.
pub fn read_vector(path: &Path) -> Result<CVec> {
    let m = read_matrix(path)?;
    match m.shape() {
        (_, 1) => Ok(m.column(0).into_owned()),
        (1, n) => Ok(CVec::from_iterator(n, m.row(0).iter().copied())),
        (r, c) => Err(parse_err(format!("{}: expected a vector, found a {r}x{c} matrix", path.display()))),
    }
}

/// Sidecar metadata stored next to a subspace basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceHeader {
    pub label: String,
    pub dim: usize,
    pub k: usize,
    pub gram_digest: String,
}

impl SubspaceHeader {
    pub fn of(s: &Subspace) -> Self {
        Self {
            label: s.space().label().to_string(),
            dim: s.space().dim(),
            k: s.dim(),
            gram_digest: s.space().gram_digest(),
        }
    }
}

fn header_path(basis_path: &Path) -> PathBuf {
    let mut p = basis_path.as_os_str().to_owned();
    p.push(".json");
    PathBuf::from(p)
}

/// Write the orthonormal basis to `path` and its header to `path.json`.
pub fn write_subspace(path: &Path, s: &Subspace) -> Result<()> {
    write_matrix(path, s.basis())?;
    let header = serde_json::to_string_pretty(&SubspaceHeader::of(s)).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(header_path(path), header + "\n")?;
    Ok(())
}

/// Read generator columns from `path` and span them in `space`. When a
/// `path.json` header is present its dimension and Gram digest must match.
pub fn read_subspace(space: &Arc<HilbertSpace>, path: &Path, rank_tol: f64) -> Result<Subspace> {
    let hp = header_path(path);
    if hp.exists() {
        let text = fs::read_to_string(&hp)?;
        let header: SubspaceHeader = serde_json::from_str(&text).map_err(|e| parse_err(e.to_string()))?;
        if header.dim != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), found: header.dim });
        }
        if header.gram_digest != space.gram_digest() {
            return Err(Error::SpaceMismatch);
        }
    }
    let gens = read_matrix(path)?;
    if gens.nrows() != space.dim() {
        return Err(Error::DimensionMismatch { expected: space.dim(), found: gens.nrows() });
    }
    Subspace::span(space, &gens, rank_tol)
}

/// Read a subspace with the default rank tolerance.
pub fn read_subspace_default(space: &Arc<HilbertSpace>, path: &Path) -> Result<Subspace> {
    read_subspace(space, path, DEFAULT_RANK_TOL)
}
