//! Matrix Market coordinate format.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::sparse::SparseMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Complex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    Hermitian,
    SkewSymmetric,
}

/// Reads a Matrix Market file. Missing files map to `Format` at line 0.
pub fn read_mtx(path: &Path) -> Result<SparseMatrix> {
    let name = path.display().to_string();
    let file = fs::File::open(path).map_err(|e| Error::format(&name, 0, format!("cannot open: {e}")))?;
    parse_mtx(BufReader::new(file), &name)
}

pub fn parse_mtx(reader: impl Read, source_name: &str) -> Result<SparseMatrix> {
    let err = |line: usize, msg: String| Error::format(source_name, line, msg);
    let mut lines = BufReader::new(reader).lines().enumerate().map(|(i, l)| (i + 1, l));

    let (lineno, header) = match lines.next() {
        Some((n, l)) => (n, l?),
        None => return Err(err(1, "empty file".into())),
    };
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" || tokens[2] != "coordinate" {
        return Err(err(lineno, format!("bad header `{header}`")));
    }
    let field = match tokens[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "complex" => Field::Complex,
        f => return Err(err(lineno, format!("unsupported field `{f}`"))),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "hermitian" => Symmetry::Hermitian,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        s => return Err(err(lineno, format!("unsupported symmetry `{s}`"))),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    let mut seen = 0usize;
    for (lineno, line) in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = t.split_whitespace().collect();
        let Some((nr, nc, nnz)) = size else {
            if parts.len() != 3 {
                return Err(err(lineno, "size line needs `rows cols entries`".into()));
            }
            let p = |s: &str| s.parse::<usize>().map_err(|_| err(lineno, format!("bad integer `{s}`")));
            let dims = (p(parts[0])?, p(parts[1])?, p(parts[2])?);
            if symmetry != Symmetry::General && dims.0 != dims.1 {
                return Err(err(lineno, "symmetric storage requires a square matrix".into()));
            }
            size = Some(dims);
            triplets.reserve(dims.2 * if symmetry == Symmetry::General { 1 } else { 2 });
            continue;
        };
        let want = if field == Field::Complex { 4 } else { 3 };
        if parts.len() != want {
            return Err(err(lineno, format!("expected {want} fields, found {}", parts.len())));
        }
        if seen == nnz {
            return Err(err(lineno, format!("more than {nnz} entries")));
        }
        let idx = |s: &str, bound: usize| -> Result<usize> {
            let i = s.parse::<usize>().map_err(|_| err(lineno, format!("bad index `{s}`")))?;
            if i == 0 || i > bound {
                return Err(err(lineno, format!("index {i} outside 1..={bound}")));
            }
            Ok(i - 1)
        };
        let num = |s: &str| s.parse::<f64>().map_err(|_| err(lineno, format!("bad number `{s}`")));
        let i = idx(parts[0], nr)?;
        let j = idx(parts[1], nc)?;
        let v = match field {
            Field::Complex => Complex64::new(num(parts[2])?, num(parts[3])?),
            _ => Complex64::new(num(parts[2])?, 0.0),
        };
        triplets.push((i, j, v));
        if i != j {
            match symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => triplets.push((j, i, v)),
                Symmetry::Hermitian => triplets.push((j, i, v.conj())),
                Symmetry::SkewSymmetric => triplets.push((j, i, -v)),
            }
        }
        seen += 1;
    }
    let Some((nr, nc, nnz)) = size else {
        return Err(err(0, "missing size line".into()));
    };
    if seen != nnz {
        return Err(err(0, format!("declared {nnz} entries, found {seen}")));
    }
    SparseMatrix::from_triplets(nr, nc, triplets)
}

/// Writes in `general` symmetry; `real` field when every imaginary part is zero.
pub fn write_mtx(m: &SparseMatrix, path: &Path) -> Result<()> {
    let mut f = std::io::BufWriter::new(fs::File::create(path)?);
    emit_mtx(m, &mut f)?;
    f.flush()?;
    Ok(())
}

pub fn emit_mtx(m: &SparseMatrix, out: &mut impl Write) -> Result<()> {
    let real = m.is_real();
    writeln!(
        out,
        "%%MatrixMarket matrix coordinate {} general",
        if real { "real" } else { "complex" }
    )?;
    writeln!(out, "{} {} {}", m.n_rows(), m.n_cols(), m.nnz())?;
    for (i, j, v) in m.triplets() {
        if real {
            writeln!(out, "{} {} {:e}", i + 1, j + 1, v.re)?;
        } else {
            writeln!(out, "{} {} {:e} {:e}", i + 1, j + 1, v.re, v.im)?;
        }
    }
    Ok(())
}
