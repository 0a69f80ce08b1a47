//! FROSTT `.tns` reader: one nonzero per line as three 1-based coordinates
//! followed by a value. Dimensions are inferred from the largest coordinate
//! seen in each mode unless an explicit shape is supplied.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};
use crate::formats::CooTensor3;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parse a rank-3 `.tns` stream. `dims` overrides the inferred shape; every
/// coordinate must then fall inside it.
pub fn parse_tns<R: BufRead>(reader: R, dims: Option<[usize; 3]>) -> Result<CooTensor3> {
    let mut entries: Vec<([usize; 3], f64)> = Vec::new();
    let mut seen = [0usize; 3];
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = text.split_whitespace().collect();
        if toks.len() != 4 {
            return Err(parse_err(
                lineno,
                format!("entry needs 3 coordinates and a value, found {} fields", toks.len()),
            ));
        }
        let mut idx = [0usize; 3];
        for (m, tok) in toks[..3].iter().enumerate() {
            let c: usize = tok.parse().map_err(|_| {
                parse_err(lineno, format!("coordinate `{tok}` is not a positive integer"))
            })?;
            if c == 0 {
                return Err(parse_err(lineno, "coordinates are 1-based, found 0"));
            }
            if let Some(d) = dims {
                if c > d[m] {
                    return Err(parse_err(
                        lineno,
                        format!("mode-{m} coordinate {c} exceeds dimension {}", d[m]),
                    ));
                }
            }
            idx[m] = c - 1;
            seen[m] = seen[m].max(c);
        }
        let v: f64 = toks[3]
            .parse()
            .map_err(|_| parse_err(lineno, format!("value `{}` is not a number", toks[3])))?;
        if !v.is_finite() {
            return Err(parse_err(lineno, format!("value `{}` is not finite", toks[3])));
        }
        if v != 0.0 {
            entries.push((idx, v));
        }
    }

    entries.sort_unstable_by_key(|&(idx, _)| idx);
    for w in entries.windows(2) {
        if w[0].0 == w[1].0 {
            let [a, b, c] = w[0].0;
            return Err(parse_err(
                0,
                format!("duplicate entry at ({}, {}, {})", a + 1, b + 1, c + 1),
            ));
        }
    }

    let dims = dims.unwrap_or(seen);
    let mut coords = [Vec::new(), Vec::new(), Vec::new()];
    let mut values = Vec::with_capacity(entries.len());
    for (idx, v) in entries {
        for m in 0..3 {
            coords[m].push(idx[m]);
        }
        values.push(v);
    }
    Ok(CooTensor3 {
        dims,
        coords,
        values,
    })
}

pub fn read_tns(path: &Path, dims: Option<[usize; 3]>) -> Result<CooTensor3> {
    parse_tns(BufReader::new(File::open(path)?), dims)
}
