use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use super::{Cell, PdaGrid};

/// The PDA axioms, in report order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    /// Every column has the same number of stars.
    C1,
    /// Every id in `[S]` occurs at least once.
    C2,
    /// Equal symbols sit in distinct rows and distinct columns.
    C3a,
    /// The two cross cells of an equal-symbol pair are both stars.
    C3b,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::C1 => "C1",
            Axiom::C2 => "C2",
            Axiom::C3a => "C3a",
            Axiom::C3b => "C3b",
        })
    }
}

/// One failed axiom with its witness cells (0-based `(row, col)`, sorted).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub axiom: Axiom,
    pub cells: Vec<(usize, usize)>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.axiom, self.detail)?;
        if !self.cells.is_empty() {
            f.write_str(" at")?;
            for (r, c) in &self.cells {
                write!(f, " ({},{})", r + 1, c + 1)?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyResult {
    violations: Vec<Violation>,
}

impl VerifyResult {
    fn from_unsorted(mut violations: Vec<Violation>) -> Self {
        violations.sort();
        VerifyResult { violations }
    }

    pub fn valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }
}

fn column_and_coverage_violations(grid: &PdaGrid) -> Vec<Violation> {
    let mut out = Vec::new();
    let z = grid.star_count(0);
    for col in 1..grid.cols() {
        let c = grid.star_count(col);
        if c != z {
            out.push(Violation {
                axiom: Axiom::C1,
                cells: (0..grid.rows())
                    .filter(|&r| grid.cell(r, col).is_star())
                    .map(|r| (r, col))
                    .collect(),
                detail: format!("column {} has {c} stars, column 1 has {z}", col + 1),
            });
        }
    }
    let mut seen = vec![false; grid.max_symbol() as usize + 1];
    for s in grid.cells().iter().filter_map(|c| c.symbol()) {
        seen[s as usize] = true;
    }
    for (s, _) in seen.iter().enumerate().skip(1).filter(|(_, &hit)| !hit) {
        out.push(Violation {
            axiom: Axiom::C2,
            cells: Vec::new(),
            detail: format!("symbol {s} never occurs"),
        });
    }
    out
}

/// Checks one pair of cells carrying the same symbol.
fn pair_violation(grid: &PdaGrid, a: (usize, usize), b: (usize, usize), s: u32) -> Option<Violation> {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    if a.0 == b.0 || a.1 == b.1 {
        let place = if a.0 == b.0 { "row" } else { "column" };
        return Some(Violation {
            axiom: Axiom::C3a,
            cells: vec![a, b],
            detail: format!("symbol {s} repeated in one {place}"),
        });
    }
    let cross = [(a.0, b.1), (b.0, a.1)];
    let bad: Vec<(usize, usize)> = cross
        .into_iter()
        .filter(|&(r, c)| !grid.cell(r, c).is_star())
        .collect();
    if bad.is_empty() {
        return None;
    }
    let mut cells = vec![a, b];
    cells.extend(bad);
    cells.sort();
    Some(Violation {
        axiom: Axiom::C3b,
        cells,
        detail: format!("symbol {s} has a non-star cross cell"),
    })
}

/// Verifies the PDA axioms, bucketing cells by symbol so the pairwise C3
/// check only looks at cells that share a symbol.
pub fn verify_pda(grid: &PdaGrid) -> VerifyResult {
    let mut out = column_and_coverage_violations(grid);
    let mut buckets: BTreeMap<u32, Vec<(usize, usize)>> = BTreeMap::new();
    for r in 0..grid.rows() {
        for c in 0..grid.cols() {
            if let Cell::Symbol(s) = grid.cell(r, c) {
                buckets.entry(s).or_default().push((r, c));
            }
        }
    }
    let pairs: Vec<Violation> = buckets
        .par_iter()
        .flat_map_iter(|(&s, cells)| {
            let mut found = Vec::new();
            for i in 0..cells.len() {
                for j in i + 1..cells.len() {
                    if let Some(v) = pair_violation(grid, cells[i], cells[j], s) {
                        found.push(v);
                    }
                }
            }
            found
        })
        .collect();
    out.extend(pairs);
    VerifyResult::from_unsorted(out)
}

/// Reference checker: compares every pair of cells in the grid.
/// Quadratic in `F·K`; returns exactly what [`verify_pda`] returns.
pub fn verify_pda_pairwise(grid: &PdaGrid) -> VerifyResult {
    let mut out = column_and_coverage_violations(grid);
    let n = grid.rows() * grid.cols();
    let at = |i: usize| (i / grid.cols(), i % grid.cols());
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (at(i), at(j));
            match (grid.cell(a.0, a.1), grid.cell(b.0, b.1)) {
                (Cell::Symbol(x), Cell::Symbol(y)) if x == y => {
                    out.extend(pair_violation(grid, a, b, x));
                }
                _ => {}
            }
        }
    }
    VerifyResult::from_unsorted(out)
}
