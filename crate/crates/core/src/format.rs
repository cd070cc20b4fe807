//! Plain-text formats: space files, region lists, operation specs and
//! Cayley-table files.
//!
//! Space file:
//!
//! ```text
//! rows cols probes index_base
//! i j v1 v2 ... vL        (one line per grid cell)
//! ```
//!
//! Blank lines and lines starting with `#` are ignored.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::algebra::BinaryOp;
use crate::error::Error as SpaceError;
use crate::space::{DescribedSpace, FeatureVector, PointId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("line {line}: {source}")]
    Space {
        line: usize,
        #[source]
        source: SpaceError,
    },

    #[error("{0}")]
    Invalid(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl ParseError {
    fn syntax(line: usize, message: impl Into<String>) -> Self {
        ParseError::Syntax {
            line,
            message: message.into(),
        }
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_numbers<T: std::str::FromStr>(line: usize, text: &str) -> Result<Vec<T>, ParseError> {
    text.split_whitespace()
        .map(|tok| {
            tok.parse::<T>()
                .map_err(|_| ParseError::syntax(line, format!("expected an integer, found {tok:?}")))
        })
        .collect()
}

pub fn parse_space(text: &str) -> Result<DescribedSpace, ParseError> {
    let mut lines = content_lines(text);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| ParseError::syntax(1, "missing header line"))?;
    let h: Vec<usize> = parse_numbers(hline, header)?;
    let [rows, cols, probes, base] = h[..] else {
        return Err(ParseError::syntax(
            hline,
            "header must be \"rows cols probes index_base\"",
        ));
    };
    if rows == 0 || cols == 0 || probes == 0 {
        return Err(ParseError::syntax(hline, "rows, cols and probes must be positive"));
    }
    if base > 1 {
        return Err(ParseError::syntax(hline, "index_base must be 0 or 1"));
    }

    let mut seen: HashMap<PointId, usize> = HashMap::new();
    let mut entries = Vec::with_capacity(rows * cols);
    for (lno, l) in lines {
        let nums: Vec<i64> = parse_numbers(lno, l)?;
        if nums.len() < 3 {
            return Err(ParseError::syntax(lno, "expected \"i j v1 ... vL\""));
        }
        if nums[0] < 0 || nums[1] < 0 {
            return Err(ParseError::syntax(lno, "negative grid index"));
        }
        let p = PointId::new(nums[0] as usize, nums[1] as usize);
        let v = FeatureVector::new(nums[2..].to_vec());
        let err = |source| ParseError::Space { line: lno, source };
        let in_range = p.row >= base && p.col >= base && p.row - base < rows && p.col - base < cols;
        if !in_range {
            return Err(err(SpaceError::PointOutOfRange(p)));
        }
        if v.len() != probes {
            return Err(err(SpaceError::LengthMismatch {
                point: p,
                expected: probes,
                found: v.len(),
            }));
        }
        if seen.insert(p, lno).is_some() {
            return Err(err(SpaceError::DuplicatePoint(p)));
        }
        entries.push((p, v));
    }
    let last_line = text.lines().count().max(1);
    DescribedSpace::new(rows, cols, probes, base, entries).map_err(|source| ParseError::Space {
        line: last_line,
        source,
    })
}

pub fn write_space(space: &DescribedSpace) -> String {
    let mut out = format!(
        "{} {} {} {}\n",
        space.rows(),
        space.cols(),
        space.probe_count(),
        space.index_base()
    );
    for (p, v) in space.entries() {
        write!(out, "{} {}", p.row, p.col).unwrap();
        for c in v.components() {
            write!(out, " {c}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn read_space(path: &Path) -> Result<DescribedSpace, ParseError> {
    parse_space(&read_to_string(path)?)
}

fn read_to_string(path: &Path) -> Result<String, ParseError> {
    std::fs::read_to_string(path).map_err(|e| ParseError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Parses `"i,j"` tokens separated by whitespace or `;`.
pub fn parse_region_list<S: AsRef<str>>(tokens: &[S]) -> Result<Vec<PointId>, ParseError> {
    tokens
        .iter()
        .flat_map(|t| {
            t.as_ref()
                .split(|c: char| c.is_whitespace() || c == ';')
                .filter(|s| !s.is_empty())
                .map(str::to_owned)
                .collect::<Vec<_>>()
        })
        .map(|tok| parse_point(&tok))
        .collect()
}

pub fn parse_point(tok: &str) -> Result<PointId, ParseError> {
    let bad = || ParseError::Invalid(format!("region point {tok:?} is not of the form i,j"));
    let (i, j) = tok.split_once(',').ok_or_else(bad)?;
    let i = i.trim().parse().map_err(|_| bad())?;
    let j = j.trim().parse().map_err(|_| bad())?;
    Ok(PointId::new(i, j))
}

/// Parses an operation spec: `min`, `modadd:<n>` or `table:<path>`.
pub fn parse_op_spec(spec: &str) -> Result<BinaryOp, ParseError> {
    let spec = spec.trim();
    if spec == "min" {
        return Ok(BinaryOp::MinIndex);
    }
    if let Some(n) = spec.strip_prefix("modadd:") {
        return match n.parse::<usize>() {
            Ok(n) if n > 0 => Ok(BinaryOp::ModAdd(n)),
            _ => Err(ParseError::Invalid(format!(
                "modadd modulus {n:?} is not a positive integer"
            ))),
        };
    }
    if let Some(path) = spec.strip_prefix("table:") {
        return read_op_table(Path::new(path));
    }
    Err(ParseError::Invalid(format!(
        "unknown operation {spec:?}; expected min, modadd:<n> or table:<path>"
    )))
}

pub fn read_op_table(path: &Path) -> Result<BinaryOp, ParseError> {
    parse_op_table(&read_to_string(path)?)
}

/// Parses Cayley-table rows `i j k l p r` meaning `x_ij · x_kl = x_pr`.
/// Totality is checked against a space later, by [`BinaryOp::validate`].
pub fn parse_op_table(text: &str) -> Result<BinaryOp, ParseError> {
    let mut table = HashMap::new();
    for (lno, l) in content_lines(text) {
        let n: Vec<usize> = parse_numbers(lno, l)?;
        let [i, j, k, m, p, r] = n[..] else {
            return Err(ParseError::syntax(lno, "expected \"i j k l p r\""));
        };
        let key = (PointId::new(i, j), PointId::new(k, m));
        if table.insert(key, PointId::new(p, r)).is_some() {
            return Err(ParseError::syntax(
                lno,
                format!("pair ({}, {}) listed twice", key.0, key.1),
            ));
        }
    }
    Ok(BinaryOp::Table(table))
}

pub fn write_op_table(space: &DescribedSpace, op: &BinaryOp) -> Result<String, SpaceError> {
    let mut out = String::new();
    for x in space.points() {
        for y in space.points() {
            let z = op.apply(space, x, y)?;
            writeln!(out, "{} {} {} {} {} {}", x.row, x.col, y.row, y.col, z.row, z.col).unwrap();
        }
    }
    Ok(out)
}
