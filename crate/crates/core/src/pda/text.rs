//! Plain-text formats.
//!
//! ```text
//! PDA F K            PLC F K
//! * 1 2 ...          * . . ...
//! ```
//!
//! `PDA` bodies hold `*` or a positive integer per cell; `PLC` bodies hold
//! `*` (cached) or `.` (uncached). Tokens are separated by single spaces on
//! output and by any whitespace on input. Writing a parsed canonical file
//! reproduces it byte for byte.

use std::fmt::Write as _;

use super::{Cell, PdaGrid, StarPattern};
use crate::error::{Error, Result};

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Splits off the header and returns `(kind, F, K, body lines)`.
fn header(text: &str) -> Result<(&str, usize, usize, Vec<(usize, &str)>)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (n, head) = lines.next().ok_or_else(|| perr(1, "empty input"))?;
    let parts: Vec<&str> = head.split_whitespace().collect();
    let [kind, f, k] = parts[..] else {
        return Err(perr(n, "header must be `PDA F K` or `PLC F K`"));
    };
    let f: usize = f.parse().map_err(|_| perr(n, format!("bad row count `{f}`")))?;
    let k: usize = k.parse().map_err(|_| perr(n, format!("bad column count `{k}`")))?;
    if f == 0 || k == 0 {
        return Err(perr(n, "F and K must be positive"));
    }
    let body: Vec<(usize, &str)> = lines.collect();
    if body.len() != f {
        return Err(perr(
            body.last().map_or(n, |b| b.0),
            format!("expected {f} rows, found {}", body.len()),
        ));
    }
    Ok((kind, f, k, body))
}

fn tokens(line: usize, body: &str, k: usize) -> Result<Vec<&str>> {
    let t: Vec<&str> = body.split_whitespace().collect();
    if t.len() != k {
        return Err(perr(line, format!("expected {k} cells, found {}", t.len())));
    }
    Ok(t)
}

/// Parses a `PDA` file. Symbol ids are compacted onto `[S]`.
pub fn parse_pda(text: &str) -> Result<PdaGrid> {
    let (kind, f, k, body) = header(text)?;
    if kind != "PDA" {
        return Err(perr(1, format!("expected `PDA` header, found `{kind}`")));
    }
    let mut cells = Vec::with_capacity(f * k);
    for (n, line) in body {
        for tok in tokens(n, line, k)? {
            let cell = if tok == "*" {
                Cell::Star
            } else {
                match tok.parse::<u32>() {
                    Ok(s) if s > 0 => Cell::Symbol(s),
                    _ => return Err(perr(n, format!("`{tok}` is neither `*` nor a positive integer"))),
                }
            };
            cells.push(cell);
        }
    }
    Ok(PdaGrid::new(f, k, cells)?.normalized())
}

pub fn write_pda(grid: &PdaGrid) -> String {
    let mut out = format!("PDA {} {}\n", grid.rows(), grid.cols());
    for r in 0..grid.rows() {
        for (i, c) in grid.row(r).iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            match c {
                Cell::Star => out.push('*'),
                Cell::Symbol(s) => {
                    let _ = write!(out, "{s}");
                }
            }
        }
        out.push('\n');
    }
    out
}

pub fn parse_placement(text: &str) -> Result<StarPattern> {
    let (kind, f, k, body) = header(text)?;
    if kind != "PLC" {
        return Err(perr(1, format!("expected `PLC` header, found `{kind}`")));
    }
    let mut uncached = vec![Vec::new(); k];
    for (row, (n, line)) in body.into_iter().enumerate() {
        for (col, tok) in tokens(n, line, k)?.into_iter().enumerate() {
            match tok {
                "*" => {}
                "." => uncached[col].push(row),
                other => return Err(perr(n, format!("`{other}` is neither `*` nor `.`"))),
            }
        }
    }
    StarPattern::new(f, uncached)
}

pub fn write_placement(pattern: &StarPattern) -> String {
    let mut out = format!("PLC {} {}\n", pattern.rows(), pattern.users());
    for r in 0..pattern.rows() {
        for k in 0..pattern.users() {
            if k > 0 {
                out.push(' ');
            }
            out.push(if pattern.uncached(k).contains(r) { '.' } else { '*' });
        }
        out.push('\n');
    }
    out
}

/// Reads either format and returns the placement; `PDA` files are converted
/// through their star pattern.
pub fn parse_any_placement(text: &str) -> Result<StarPattern> {
    let kind = text.split_whitespace().next().unwrap_or("");
    match kind {
        "PDA" => Ok(parse_pda(text)?.star_pattern()),
        "PLC" => parse_placement(text),
        other => Err(perr(1, format!("unknown header `{other}`"))),
    }
}
