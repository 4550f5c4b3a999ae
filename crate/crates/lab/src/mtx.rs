//! Dense Matrix Market IO.
//!
//! Writing always produces `array real general` (column-major, one value per
//! line). Reading also accepts `coordinate` files and `integer`/`symmetric`
//! variants.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use cur_core::DenseMatrix;
use thiserror::Error;

use crate::LabError;

#[derive(Debug, Error)]
pub enum MtxError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("unsupported or malformed header: {0}")]
    Header(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Matrix(#[from] cur_core::Error),
}

fn parse_err(line: usize, message: impl Into<String>) -> MtxError {
    MtxError::Parse { line, message: message.into() }
}

#[derive(Clone, Copy, PartialEq)]
enum Layout {
    Array,
    Coordinate,
}

pub fn read_matrix<R: BufRead>(reader: R) -> Result<DenseMatrix, MtxError> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));
    let header = match lines.next() {
        Some((_, l)) => l?,
        None => return Err(MtxError::Header("empty file".into())),
    };
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(MtxError::Header(header));
    }
    let layout = match tokens[2].as_str() {
        "array" => Layout::Array,
        "coordinate" => Layout::Coordinate,
        _ => return Err(MtxError::Header(header)),
    };
    if !matches!(tokens[3].as_str(), "real" | "double" | "integer") {
        return Err(MtxError::Header(header));
    }
    let symmetric = match tokens[4].as_str() {
        "general" => false,
        "symmetric" => true,
        _ => return Err(MtxError::Header(header)),
    };

    let mut body = lines.filter_map(|(n, l)| match l {
        Ok(s) if s.trim().is_empty() || s.trim_start().starts_with('%') => None,
        Ok(s) => Some(Ok((n, s))),
        Err(e) => Some(Err(e)),
    });
    let (size_line, size) = body.next().ok_or_else(|| parse_err(0, "missing size line"))??;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(size_line, format!("bad size `{t}`"))))
        .collect::<Result<_, _>>()?;
    let (rows, cols) = match (layout, dims.as_slice()) {
        (Layout::Array, [m, n]) | (Layout::Coordinate, [m, n, _]) => (*m, *n),
        _ => return Err(parse_err(size_line, "wrong number of size fields")),
    };
    if symmetric && rows != cols {
        return Err(parse_err(size_line, "symmetric matrix must be square"));
    }

    let value = |n: usize, t: &str| t.parse::<f64>().map_err(|_| parse_err(n, format!("bad value `{t}`")));
    if rows == 0 || cols == 0 {
        return Err(MtxError::Matrix(cur_core::Error::EmptyMatrix));
    }
    let mut a = DenseMatrix::zeros(rows, cols);
    match layout {
        Layout::Array => {
            let mut entries = Vec::with_capacity(rows * cols);
            for item in body {
                let (n, l) = item?;
                for t in l.split_whitespace() {
                    entries.push((n, value(n, t)?));
                }
            }
            let mut it = entries.into_iter();
            for j in 0..cols {
                let start = if symmetric { j } else { 0 };
                for i in start..rows {
                    let (_, v) = it.next().ok_or_else(|| parse_err(0, "too few values"))?;
                    a.set(i, j, v);
                    if symmetric {
                        a.set(j, i, v);
                    }
                }
            }
            if let Some((n, _)) = it.next() {
                return Err(parse_err(n, "too many values"));
            }
        }
        Layout::Coordinate => {
            let expected = dims[2];
            let mut seen = 0;
            for item in body {
                let (n, l) = item?;
                let t: Vec<&str> = l.split_whitespace().collect();
                if t.len() != 3 {
                    return Err(parse_err(n, "expected `row col value`"));
                }
                let idx = |s: &str, bound: usize| -> Result<usize, MtxError> {
                    match s.parse::<usize>() {
                        Ok(v) if (1..=bound).contains(&v) => Ok(v - 1),
                        _ => Err(parse_err(n, format!("index `{s}` out of range"))),
                    }
                };
                let (i, j, v) = (idx(t[0], rows)?, idx(t[1], cols)?, value(n, t[2])?);
                a.set(i, j, v);
                if symmetric {
                    a.set(j, i, v);
                }
                seen += 1;
            }
            if seen != expected {
                return Err(parse_err(0, format!("expected {expected} entries, found {seen}")));
            }
        }
    }
    if let Some((i, j)) = first_non_finite(&a) {
        return Err(cur_core::Error::NonFinite { row: i, col: j }.into());
    }
    Ok(a)
}

fn first_non_finite(a: &DenseMatrix) -> Option<(usize, usize)> {
    let p = a.as_slice().iter().position(|x| !x.is_finite())?;
    Some((p % a.rows(), p / a.rows()))
}

/// Writes `array real general` with shortest round-trip formatting.
pub fn write_matrix<W: Write>(mut w: W, a: &DenseMatrix) -> io::Result<()> {
    writeln!(w, "%%MatrixMarket matrix array real general")?;
    writeln!(w, "{} {}", a.rows(), a.cols())?;
    for v in a.as_slice() {
        writeln!(w, "{v:e}")?;
    }
    w.flush()
}

pub fn load(path: &Path) -> Result<DenseMatrix, LabError> {
    let file = File::open(path).map_err(|e| LabError::io(path, e))?;
    read_matrix(BufReader::new(file)).map_err(|source| LabError::Matrix { path: path.to_owned(), source })
}

pub fn save(path: &Path, a: &DenseMatrix) -> Result<(), LabError> {
    let file = File::create(path).map_err(|e| LabError::io(path, e))?;
    write_matrix(BufWriter::new(file), a).map_err(|e| LabError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let a = DenseMatrix::from_rows(&[[0.1, -2.5e-300], [1.0 / 3.0, 7.0]]).unwrap();
        let mut buf = Vec::new();
        write_matrix(&mut buf, &a).unwrap();
        let b = read_matrix(buf.as_slice()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn column_major_order() {
        let text = "%%MatrixMarket matrix array real general\n% comment\n2 3\n1\n2\n3\n4\n5\n6\n";
        let a = read_matrix(text.as_bytes()).unwrap();
        assert_eq!(a, DenseMatrix::from_rows(&[[1.0, 3.0, 5.0], [2.0, 4.0, 6.0]]).unwrap());
    }

    #[test]
    fn coordinate_and_symmetric() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 4\n2 1 -1\n";
        let a = read_matrix(text.as_bytes()).unwrap();
        assert_eq!(a, DenseMatrix::from_rows(&[[4.0, -1.0], [-1.0, 0.0]]).unwrap());
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(
            read_matrix("%%MatrixMarket matrix array complex general\n".as_bytes()),
            Err(MtxError::Header(_))
        ));
        let short = "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n";
        assert!(matches!(read_matrix(short.as_bytes()), Err(MtxError::Parse { .. })));
        let bad = "%%MatrixMarket matrix array real general\n1 1\nabc\n";
        assert!(matches!(read_matrix(bad.as_bytes()), Err(MtxError::Parse { line: 3, .. })));
        let nan = "%%MatrixMarket matrix array real general\n1 1\nNaN\n";
        assert!(matches!(read_matrix(nan.as_bytes()), Err(MtxError::Matrix(_))));
    }
}
