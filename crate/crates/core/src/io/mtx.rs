use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::matrix::SparseSymMatrix;

use super::fmt_f64;

#[derive(Clone, Copy, PartialEq)]
enum Symmetry {
    Symmetric,
    General,
}

fn parse_header(line: &str) -> Result<Symmetry> {
    let lower = line.trim().to_ascii_lowercase();
    let words: Vec<&str> = lower.split_whitespace().collect();
    if words.len() < 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(Error::parse(1, "expected '%%MatrixMarket matrix ...' header"));
    }
    if words[2] != "coordinate" {
        return Err(Error::Unsupported(format!("format '{}'", words[2])));
    }
    match words[3] {
        "real" | "integer" | "double" => {}
        other => return Err(Error::Unsupported(format!("field '{other}'"))),
    }
    match words[4] {
        "symmetric" => Ok(Symmetry::Symmetric),
        "general" => Ok(Symmetry::General),
        other => Err(Error::Unsupported(format!("symmetry '{other}'"))),
    }
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| Error::parse(line, format!("bad {what} '{tok}'")))
}

/// Reads a coordinate real matrix. Symmetric files have their stored
/// triangle mirrored; general files must have symmetric content.
pub fn read_matrix_market(source: impl BufRead) -> Result<SparseSymMatrix> {
    let mut lines = source.lines().enumerate();
    let symmetry = match lines.next() {
        Some((_, line)) => parse_header(&line?)?,
        None => return Err(Error::parse(1, "empty file")),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let mut toks = t.split_whitespace();
        match size {
            None => {
                let rows: usize = field(toks.next(), lineno, "row count")?;
                let cols: usize = field(toks.next(), lineno, "column count")?;
                let nnz: usize = field(toks.next(), lineno, "entry count")?;
                if rows != cols {
                    return Err(Error::parse(lineno, format!("matrix is {rows}x{cols}, not square")));
                }
                triplets.reserve(nnz);
                size = Some((rows, cols, nnz));
            }
            Some((n, _, _)) => {
                let i: usize = field(toks.next(), lineno, "row index")?;
                let j: usize = field(toks.next(), lineno, "column index")?;
                let v: f64 = field(toks.next(), lineno, "value")?;
                if toks.next().is_some() {
                    return Err(Error::parse(lineno, "trailing tokens"));
                }
                if i == 0 || j == 0 || i > n || j > n {
                    return Err(Error::parse(lineno, format!("index ({i}, {j}) outside 1..={n}")));
                }
                if !v.is_finite() {
                    return Err(Error::parse(lineno, "non-finite value"));
                }
                triplets.push((i - 1, j - 1, v));
            }
        }
    }
    let (n, _, nnz) = size.ok_or_else(|| Error::parse(1, "missing size line"))?;
    if triplets.len() != nnz {
        return Err(Error::parse(
            0,
            format!("size line declares {nnz} entries, found {}", triplets.len()),
        ));
    }
    match symmetry {
        Symmetry::Symmetric => SparseSymMatrix::from_symmetric_triplets(n, &triplets),
        Symmetry::General => SparseSymMatrix::from_triplets(n, &triplets),
    }
}

/// Writes the lower triangle under a symmetric header.
pub fn write_matrix_market(a: &SparseSymMatrix, mut out: impl Write) -> Result<()> {
    let n = a.dim();
    let lower: Vec<(usize, usize, f64)> = (0..n)
        .flat_map(|i| a.row(i).filter(move |&(j, _)| j <= i).map(move |(j, v)| (i, j, v)))
        .collect();
    writeln!(out, "%%MatrixMarket matrix coordinate real symmetric")?;
    writeln!(out, "{n} {n} {}", lower.len())?;
    for (i, j, v) in lower {
        writeln!(out, "{} {} {}", i + 1, j + 1, fmt_f64(v))?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(s: &str) -> Result<SparseSymMatrix> {
        read_matrix_market(s.as_bytes())
    }

    #[test]
    fn minimal_symmetric() {
        let a = read("%%MatrixMarket matrix coordinate real symmetric\n2 2 3\n1 1 2.0\n2 1 1.0\n2 2 2.0\n").unwrap();
        assert_eq!(a.to_dense(), vec![vec![2.0, 1.0], vec![1.0, 2.0]]);
    }

    #[test]
    fn column_out_of_range() {
        let err = read("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 3 2.0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn general_symmetric_content() {
        let s = "%%MatrixMarket matrix coordinate real general\n% c\n2 2 4\n1 1 2\n1 2 1\n2 1 1\n2 2 2\n";
        assert_eq!(read(s).unwrap().to_dense(), vec![vec![2.0, 1.0], vec![1.0, 2.0]]);
    }

    #[test]
    fn general_asymmetric_rejected() {
        let s = "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 2 1\n2 1 3\n";
        assert!(matches!(read(s), Err(Error::Asymmetric { .. })));
    }

    #[test]
    fn unsupported_fields() {
        for f in ["pattern", "complex"] {
            let s = format!("%%MatrixMarket matrix coordinate {f} symmetric\n1 1 1\n1 1\n");
            assert!(matches!(read(&s), Err(Error::Unsupported(_))));
        }
        let s = "%%MatrixMarket matrix array real general\n1 1\n1\n";
        assert!(matches!(read(s), Err(Error::Unsupported(_))));
    }

    #[test]
    fn duplicates_summed() {
        let s = "%%MatrixMarket matrix coordinate real symmetric\n1 1 2\n1 1 1.5\n1 1 2.5\n";
        assert_eq!(read(s).unwrap().to_dense(), vec![vec![4.0]]);
    }

    #[test]
    fn malformed_value() {
        let s = "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 1 x\n";
        assert!(matches!(read(s), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn writes_lower_triangle() {
        let a = SparseSymMatrix::from_dense(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let mut buf = Vec::new();
        write_matrix_market(&a, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().nth(1), Some("2 2 3"));
        assert_eq!(read(&text).unwrap(), a);

        let mut buf = Vec::new();
        write_matrix_market(&SparseSymMatrix::identity(3), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 5);
    }
}
