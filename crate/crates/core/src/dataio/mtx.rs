use std::collections::HashSet;
use std::fmt::Write as _;

use super::MatrixMetadata;
use crate::error::{MmfError, Result};
use crate::matcore::{numerical_symmetry, CooMatrix, SquareMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Symmetry {
    General,
    Symmetric,
    Skew,
}

fn parse_err(line: usize, msg: impl Into<String>) -> MmfError {
    MmfError::Parse { line, msg: msg.into() }
}

fn parse_header(line: &str) -> Result<Symmetry> {
    let tokens: Vec<String> = line.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" {
        return Err(parse_err(
            1,
            "expected '%%MatrixMarket matrix coordinate real <symmetry>'",
        ));
    }
    if tokens[1] != "matrix" {
        return Err(MmfError::Unsupported(format!("object '{}'", tokens[1])));
    }
    if tokens[2] != "coordinate" {
        return Err(MmfError::Unsupported(format!("format '{}'", tokens[2])));
    }
    match tokens[3].as_str() {
        "real" | "integer" => {}
        other => return Err(MmfError::Unsupported(format!("field '{other}'"))),
    }
    match tokens[4].as_str() {
        "general" => Ok(Symmetry::General),
        "symmetric" => Ok(Symmetry::Symmetric),
        "skew-symmetric" => Ok(Symmetry::Skew),
        other => Err(MmfError::Unsupported(format!("symmetry '{other}'"))),
    }
}

fn parse_value(token: &str, line: usize) -> Result<f64> {
    let v: f64 = token
        .replace(['D', 'd'], "e")
        .parse()
        .map_err(|_| parse_err(line, format!("bad value '{token}'")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("non-finite value '{token}'")));
    }
    Ok(v)
}

fn parse_index(token: &str, line: usize, n: usize) -> Result<usize> {
    let k: usize = token
        .parse()
        .map_err(|_| parse_err(line, format!("bad index '{token}'")))?;
    if k == 0 || k > n {
        return Err(parse_err(line, format!("index {k} outside 1..={n}")));
    }
    Ok(k - 1)
}

/// Parses a coordinate-format Matrix Market file into its general (unfolded) form.
///
/// `% name: group/name` and `% kind: ...` comment lines, as written by the
/// SuiteSparse collection, populate the metadata when present.
pub fn parse_matrix_market(bytes: &[u8]) -> Result<(SquareMatrix, MatrixMetadata)> {
    let text = std::str::from_utf8(bytes).map_err(|_| parse_err(0, "input is not UTF-8"))?;
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let symmetry = parse_header(header)?;

    let mut full_name = String::new();
    let mut kind = String::new();
    let mut size = None;
    for (no, line) in lines.by_ref() {
        let t = line.trim();
        if let Some(c) = t.strip_prefix('%') {
            let c = c.trim();
            if let Some(v) = c.strip_prefix("name:") {
                full_name = v.trim().to_string();
            } else if let Some(v) = c.strip_prefix("kind:") {
                kind = v.trim().to_string();
            }
            continue;
        }
        if t.is_empty() {
            continue;
        }
        let f: Vec<&str> = t.split_whitespace().collect();
        if f.len() != 3 {
            return Err(parse_err(no, "size line must hold 'rows cols nnz'"));
        }
        let dims: Vec<usize> = f
            .iter()
            .map(|s| s.parse().map_err(|_| parse_err(no, format!("bad size '{s}'"))))
            .collect::<Result<_>>()?;
        if dims[0] != dims[1] {
            return Err(MmfError::Unsupported(format!(
                "non-square {}x{} matrix",
                dims[0], dims[1]
            )));
        }
        if dims[0] == 0 {
            return Err(MmfError::EmptyMatrix);
        }
        size = Some((no, dims[0], dims[2]));
        break;
    }
    let (size_line, n, declared) = size.ok_or_else(|| parse_err(0, "missing size line"))?;

    let mut seen = HashSet::with_capacity(declared * 2);
    let mut entries = Vec::with_capacity(declared * 2);
    let mut count = 0usize;
    let mut push = |i: usize, j: usize, v: f64, no: usize| -> Result<()> {
        if !seen.insert((i, j)) {
            return Err(parse_err(no, format!("duplicate coordinate ({}, {})", i + 1, j + 1)));
        }
        entries.push((i, j, v));
        Ok(())
    };
    for (no, line) in lines {
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let f: Vec<&str> = t.split_whitespace().collect();
        if f.len() != 3 {
            return Err(parse_err(no, "entry line must hold 'row col value'"));
        }
        count += 1;
        if count > declared {
            return Err(parse_err(no, format!("more than the declared {declared} entries")));
        }
        let i = parse_index(f[0], no, n)?;
        let j = parse_index(f[1], no, n)?;
        let v = parse_value(f[2], no)?;
        match symmetry {
            Symmetry::General => push(i, j, v, no)?,
            Symmetry::Symmetric => {
                push(i, j, v, no)?;
                if i != j {
                    push(j, i, v, no)?;
                }
            }
            Symmetry::Skew => {
                if i == j {
                    if v != 0.0 {
                        return Err(parse_err(no, "nonzero diagonal in a skew-symmetric file"));
                    }
                    continue;
                }
                push(i, j, v, no)?;
                push(j, i, -v, no)?;
            }
        }
    }
    if count != declared {
        return Err(parse_err(
            size_line,
            format!("declared {declared} entries but found {count}"),
        ));
    }

    let a = SquareMatrix::Sparse(CooMatrix::from_triplets(n, entries)?);
    let (group, name) = match full_name.split_once('/') {
        Some((g, nm)) => (g.to_string(), nm.to_string()),
        None => (String::new(), full_name),
    };
    let meta = MatrixMetadata {
        name,
        group,
        n,
        nnz: a.nnz(),
        kind,
        numerical_symmetry: numerical_symmetry(&a),
    };
    Ok((a, meta))
}

/// Writes `a` as a general real coordinate file with 17 significant digits.
pub fn write_matrix_market(a: &SquareMatrix) -> Vec<u8> {
    let triplets = a.triplets();
    let n = a.n();
    let mut out = String::with_capacity(64 + triplets.len() * 32);
    out.push_str("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(out, "{n} {n} {}", triplets.len());
    for (i, j, v) in triplets {
        let _ = writeln!(out, "{} {} {:.16e}", i + 1, j + 1, v);
    }
    out.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<SquareMatrix> {
        parse_matrix_market(s.as_bytes()).map(|(a, _)| a)
    }

    #[test]
    fn general_diagonal() {
        let a = parse("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n2 2 2.0\n").unwrap();
        assert_eq!(a.to_dense().as_slice(), &[1.0, 0.0, 0.0, 2.0]);
    }

    #[test]
    fn skew_unfolds_with_negated_mirror() {
        let a = parse("%%MatrixMarket matrix coordinate real skew-symmetric\n2 2 1\n2 1 -3.0\n").unwrap();
        assert_eq!(a.to_dense().as_slice(), &[0.0, 3.0, -3.0, 0.0]);
    }

    #[test]
    fn symmetric_unfolds() {
        let a = parse("%%MatrixMarket matrix coordinate real symmetric\n% c\n\n3 3 2\n1 1 4\n3 1 1.5D0\n").unwrap();
        assert_eq!(a.get(0, 2), 1.5);
        assert_eq!(a.get(2, 0), 1.5);
        assert_eq!(a.nnz(), 3);
    }

    #[test]
    fn rejections() {
        let h = "%%MatrixMarket matrix coordinate real general\n";
        assert!(matches!(
            parse("%%MatrixMarket matrix coordinate pattern general\n1 1 1\n1 1\n"),
            Err(MmfError::Unsupported(_))
        ));
        assert!(matches!(
            parse("%%MatrixMarket matrix coordinate complex general\n1 1 0\n"),
            Err(MmfError::Unsupported(_))
        ));
        assert!(matches!(
            parse("%%MatrixMarket matrix array real general\n1 1\n1\n"),
            Err(MmfError::Unsupported(_))
        ));
        assert!(matches!(parse("hello\n"), Err(MmfError::Parse { .. })));
        assert!(matches!(parse(&format!("{h}2 3 0\n")), Err(MmfError::Unsupported(_))));
        assert!(matches!(
            parse(&format!("{h}2 2 1\n3 1 1\n")),
            Err(MmfError::Parse { .. })
        ));
        assert!(matches!(
            parse(&format!("{h}2 2 2\n1 1 1\n1 1 2\n")),
            Err(MmfError::Parse { .. })
        ));
        assert!(matches!(
            parse(&format!("{h}2 2 2\n1 1 1\n")),
            Err(MmfError::Parse { .. })
        ));
        assert!(matches!(
            parse(&format!("{h}2 2 1\n1 1 1\n2 2 1\n")),
            Err(MmfError::Parse { .. })
        ));
        assert!(matches!(
            parse("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 2 1\n2 1 1\n"),
            Err(MmfError::Parse { .. })
        ));
    }

    #[test]
    fn metadata_from_comments() {
        let s = "%%MatrixMarket matrix coordinate real general\n% name: HB/tiny\n% kind: directed graph\n2 2 2\n1 2 1\n2 1 2\n";
        let (_, m) = parse_matrix_market(s.as_bytes()).unwrap();
        assert_eq!((m.group.as_str(), m.name.as_str()), ("HB", "tiny"));
        assert_eq!(m.kind, "directed graph");
        assert_eq!((m.n, m.nnz), (2, 2));
        assert_eq!(m.numerical_symmetry, 0.0);
    }

    #[test]
    fn writes_identity_and_zero() {
        let text = String::from_utf8(write_matrix_market(&SquareMatrix::identity(2))).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[1], "2 2 2");
        assert!(lines[2].starts_with("1 1 1.0"));
        assert!(lines[3].starts_with("2 2 1.0"));
        let z = SquareMatrix::sparse(3, vec![]).unwrap();
        let text = String::from_utf8(write_matrix_market(&z)).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert_eq!(text.lines().nth(1), Some("3 3 0"));
    }
}
