//! Matrix Market coordinate reader.
//!
//! Accepts the coordinate layout with `real`, `integer` or `pattern` entry
//! fields and `general` or `symmetric` storage. Indices are 1-based on disk
//! and 0-based in memory; symmetric files are expanded to both triangles;
//! pattern entries get the value 1.0. Explicitly stored zeros are dropped so
//! the result satisfies the COO invariants.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};
use crate::formats::CooMatrix;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ValueField {
    Real,
    Integer,
    Pattern,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

fn parse_banner(line: &str) -> Result<(ValueField, Symmetry)> {
    let words: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" {
        return Err(parse_err(
            1,
            "expected banner `%%MatrixMarket matrix coordinate <field> <symmetry>`",
        ));
    }
    if words[1] != "matrix" || words[2] != "coordinate" {
        return Err(parse_err(
            1,
            format!("unsupported object/format `{} {}`; only `matrix coordinate` is supported", words[1], words[2]),
        ));
    }
    let field = match words[3].as_str() {
        "real" => ValueField::Real,
        "integer" => ValueField::Integer,
        "pattern" => ValueField::Pattern,
        other => return Err(parse_err(1, format!("unsupported value field `{other}`"))),
    };
    let symmetry = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        other => return Err(parse_err(1, format!("unsupported symmetry `{other}`"))),
    };
    Ok((field, symmetry))
}

fn parse_index(tok: &str, limit: usize, what: &str, line: usize) -> Result<usize> {
    let v: usize = tok
        .parse()
        .map_err(|_| parse_err(line, format!("{what} `{tok}` is not a positive integer")))?;
    if v == 0 || v > limit {
        return Err(parse_err(
            line,
            format!("{what} {v} is outside 1..={limit}"),
        ));
    }
    Ok(v - 1)
}

/// Parse a Matrix Market coordinate stream into a sorted COO matrix.
pub fn parse_mtx<R: BufRead>(reader: R) -> Result<CooMatrix> {
    let mut lines = reader.lines().enumerate();
    let banner = match lines.next() {
        Some((_, line)) => line?,
        None => return Err(parse_err(1, "empty file, expected Matrix Market banner")),
    };
    let (field, symmetry) = parse_banner(&banner)?;

    let mut size: Option<(usize, usize, usize)> = None;
    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    let mut on_disk = 0usize;
    for (i, line) in lines {
        let line = line?;
        let lineno = i + 1;
        let text = line.trim();
        if text.is_empty() || text.starts_with('%') {
            continue;
        }
        let toks: Vec<&str> = text.split_whitespace().collect();
        let Some((rows, cols, declared)) = size else {
            if toks.len() != 3 {
                return Err(parse_err(
                    lineno,
                    format!("size line needs `rows cols nnz`, found {} fields", toks.len()),
                ));
            }
            let mut dims = [0usize; 3];
            for (d, tok) in dims.iter_mut().zip(&toks) {
                *d = tok.parse().map_err(|_| {
                    parse_err(lineno, format!("size field `{tok}` is not a non-negative integer"))
                })?;
            }
            if symmetry == Symmetry::Symmetric && dims[0] != dims[1] {
                return Err(parse_err(
                    lineno,
                    format!("symmetric matrix must be square, got {}x{}", dims[0], dims[1]),
                ));
            }
            size = Some((dims[0], dims[1], dims[2]));
            entries.reserve(dims[2]);
            continue;
        };
        let expected_fields = if field == ValueField::Pattern { 2 } else { 3 };
        if toks.len() != expected_fields {
            return Err(parse_err(
                lineno,
                format!("entry needs {expected_fields} fields, found {}", toks.len()),
            ));
        }
        if on_disk == declared {
            return Err(parse_err(
                lineno,
                format!("more than the declared {declared} entries"),
            ));
        }
        on_disk += 1;
        let r = parse_index(toks[0], rows, "row index", lineno)?;
        let c = parse_index(toks[1], cols, "column index", lineno)?;
        let v = if field == ValueField::Pattern {
            1.0
        } else {
            toks[2]
                .parse::<f64>()
                .map_err(|_| parse_err(lineno, format!("value `{}` is not a number", toks[2])))?
        };
        if !v.is_finite() {
            return Err(parse_err(lineno, format!("value `{}` is not finite", toks[2])));
        }
        entries.push((r, c, v));
        if symmetry == Symmetry::Symmetric && r != c {
            entries.push((c, r, v));
        }
    }

    let Some((rows, cols, declared)) = size else {
        return Err(parse_err(1, "missing size line"));
    };
    if on_disk != declared {
        return Err(parse_err(
            0,
            format!("header declares {declared} entries but the file stores {on_disk}"),
        ));
    }

    entries.retain(|&(_, _, v)| v != 0.0);
    entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
    for w in entries.windows(2) {
        if (w[0].0, w[0].1) == (w[1].0, w[1].1) {
            return Err(parse_err(
                0,
                format!("duplicate entry at row {}, column {}", w[0].0 + 1, w[0].1 + 1),
            ));
        }
    }
    Ok(CooMatrix::from_sorted_entries(rows, cols, entries))
}

pub fn read_mtx(path: &Path) -> Result<CooMatrix> {
    parse_mtx(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<CooMatrix> {
        parse_mtx(text.as_bytes())
    }

    #[test]
    fn general_real_file_round_trips_the_worked_example() {
        let m = parse(
            "%%MatrixMarket matrix coordinate real general\n\
             % a comment\n\
             4 4 4\n\
             1 1 5\n\
             1 4 7\n\
             3 2 3\n\
             4 3 1\n",
        )
        .unwrap();
        assert_eq!((m.rows, m.cols), (4, 4));
        assert_eq!(m.row_ids, vec![0, 0, 2, 3]);
        assert_eq!(m.col_ids, vec![0, 3, 1, 2]);
        assert_eq!(m.values, vec![5.0, 7.0, 3.0, 1.0]);
        assert!(m.validate().is_empty());
    }

    #[test]
    fn symmetric_off_diagonal_expands_to_two_entries() {
        let m = parse(
            "%%MatrixMarket matrix coordinate real symmetric\n\
             2 2 1\n\
             2 1 4.5\n",
        )
        .unwrap();
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.row_ids, vec![0, 1]);
        assert_eq!(m.col_ids, vec![1, 0]);
        assert_eq!(m.values, vec![4.5, 4.5]);
    }

    #[test]
    fn symmetric_diagonal_entry_is_not_duplicated() {
        let m = parse(
            "%%MatrixMarket matrix coordinate integer symmetric\n\
             3 3 2\n\
             1 1 2\n\
             3 1 7\n",
        )
        .unwrap();
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.entries().collect::<Vec<_>>(), vec![
            (0, 0, 2.0),
            (0, 2, 7.0),
            (2, 0, 7.0),
        ]);
    }

    #[test]
    fn pattern_entries_become_unit_values() {
        let m = parse(
            "%%MatrixMarket matrix coordinate pattern general\n\
             2 3 2\n\
             1 3\n\
             2 1\n",
        )
        .unwrap();
        assert_eq!(m.values, vec![1.0, 1.0]);
    }

    #[test]
    fn out_of_range_index_is_rejected_with_its_line() {
        let err = parse(
            "%%MatrixMarket matrix coordinate real general\n\
             4 4 1\n\
             5 1 1.0\n",
        )
        .unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 3);
                assert!(message.contains("row index 5"), "{message}");
            }
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn duplicate_coordinate_is_rejected() {
        let err = parse(
            "%%MatrixMarket matrix coordinate real general\n\
             4 4 2\n\
             1 1 1.0\n\
             1 1 2.0\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("duplicate"), "{err}");
    }

    #[test]
    fn entry_count_mismatch_is_rejected() {
        let err = parse(
            "%%MatrixMarket matrix coordinate real general\n\
             4 4 3\n\
             1 1 1.0\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("declares 3"), "{err}");
    }

    #[test]
    fn malformed_banner_is_rejected() {
        for bad in [
            "",
            "%%MatrixMarket matrix array real general\n4 4 0\n",
            "%%MatrixMarket matrix coordinate complex general\n4 4 0\n",
            "4 4 1\n1 1 5\n",
        ] {
            assert!(matches!(parse(bad), Err(Error::Parse { .. })), "{bad:?}");
        }
    }

    #[test]
    fn explicit_zero_values_are_dropped() {
        let m = parse(
            "%%MatrixMarket matrix coordinate real general\n\
             2 2 2\n\
             1 1 0.0\n\
             2 2 3.0\n",
        )
        .unwrap();
        assert_eq!(m.nnz(), 1);
        assert!(m.validate().is_empty());
    }

    #[test]
    fn unsorted_input_comes_out_sorted() {
        let m = parse(
            "%%MatrixMarket matrix coordinate real general\n\
             3 3 3\n\
             3 1 1\n\
             1 2 2\n\
             2 3 3\n",
        )
        .unwrap();
        assert_eq!(m.row_ids, vec![0, 1, 2]);
        assert!(m.validate().is_empty());
    }
}
