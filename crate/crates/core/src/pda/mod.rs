//! Placement delivery arrays and star placements.
//!
//! A PDA is an `F × K` array over `{*} ∪ [S]`: rows are packet indices,
//! columns are users. Stars mark cached packets, integers mark the delivery
//! signal that carries the packet. All indices are 0-based in memory and
//! 1-based in every text format and report.

mod canon;
mod pattern;
pub mod text;
mod verify;

use std::collections::BTreeSet;
use std::collections::HashMap;
use std::fmt;

use num_rational::Ratio;

use crate::bitset::{RowSet, MAX_ROWS};
use crate::error::{Error, Result};

pub use canon::{canonical_pattern, EXACT_CANON_ROWS};
pub use pattern::StarPattern;
pub use verify::{verify_pda, verify_pda_pairwise, Axiom, VerifyResult, Violation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cell {
    Star,
    /// Positive symbol id.
    Symbol(u32),
}

impl Cell {
    #[inline]
    pub fn is_star(self) -> bool {
        matches!(self, Cell::Star)
    }

    #[inline]
    pub fn symbol(self) -> Option<u32> {
        match self {
            Cell::Star => None,
            Cell::Symbol(s) => Some(s),
        }
    }
}

/// `(K, F, Z, S)` of a PDA.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PdaParams {
    pub users: usize,
    pub rows: usize,
    pub stars: usize,
    pub symbols: usize,
}

impl PdaParams {
    pub fn new(users: usize, rows: usize, stars: usize, symbols: usize) -> Self {
        PdaParams {
            users,
            rows,
            stars,
            symbols,
        }
    }

    /// Transmission load `S/F`.
    pub fn rate(&self) -> Ratio<u64> {
        Ratio::new(self.symbols as u64, self.rows as u64)
    }

    /// Memory ratio `Z/F`.
    pub fn memory_ratio(&self) -> Ratio<u64> {
        Ratio::new(self.stars as u64, self.rows as u64)
    }
}

impl fmt::Display for PdaParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{},{})",
            self.users, self.rows, self.stars, self.symbols
        )
    }
}

/// An `F × K` array of cells, stored row-major.
///
/// Construction only checks well-formedness (shape, positive ids, the row
/// cap). Whether the array is actually a PDA is answered by [`verify_pda`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PdaGrid {
    rows: usize,
    cols: usize,
    cells: Vec<Cell>,
}

impl PdaGrid {
    pub fn new(rows: usize, cols: usize, cells: Vec<Cell>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Malformed(format!(
                "grid must have at least one row and column, got {rows}x{cols}"
            )));
        }
        if rows > MAX_ROWS {
            return Err(Error::Overflow(format!(
                "{rows} rows exceeds the row cap {MAX_ROWS}"
            )));
        }
        if cells.len() != rows * cols {
            return Err(Error::Malformed(format!(
                "expected {} cells for {rows}x{cols}, got {}",
                rows * cols,
                cells.len()
            )));
        }
        if let Some(pos) = cells.iter().position(|c| *c == Cell::Symbol(0)) {
            return Err(Error::Malformed(format!(
                "symbol id 0 at row {}, column {}",
                pos / cols + 1,
                pos % cols + 1
            )));
        }
        Ok(PdaGrid { rows, cols, cells })
    }

    /// Builds a grid from nested rows, rejecting ragged input.
    pub fn from_rows(rows: Vec<Vec<Cell>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(Error::Malformed(format!(
                "row {} has {} cells, row 1 has {cols}",
                i + 1,
                r.len()
            )));
        }
        let n = rows.len();
        Self::new(n, cols, rows.into_iter().flatten().collect())
    }

    /// All-star `F × K` grid (full cache, no delivery).
    pub fn all_stars(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, vec![Cell::Star; rows * cols])
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn cell(&self, row: usize, col: usize) -> Cell {
        self.cells[row * self.cols + col]
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn row(&self, row: usize) -> &[Cell] {
        &self.cells[row * self.cols..(row + 1) * self.cols]
    }

    /// Largest symbol id present (0 for an all-star grid).
    pub fn max_symbol(&self) -> u32 {
        self.cells.iter().filter_map(|c| c.symbol()).max().unwrap_or(0)
    }

    pub fn distinct_symbols(&self) -> usize {
        self.cells
            .iter()
            .filter_map(|c| c.symbol())
            .collect::<BTreeSet<_>>()
            .len()
    }

    pub fn star_count(&self, col: usize) -> usize {
        (0..self.rows).filter(|&r| self.cell(r, col).is_star()).count()
    }

    /// Compacts symbol ids onto `[S]`, preserving their relative order.
    /// Grids whose ids already form `[S]` are returned unchanged.
    pub fn normalized(mut self) -> Self {
        let ids: BTreeSet<u32> = self.cells.iter().filter_map(|c| c.symbol()).collect();
        let map: HashMap<u32, u32> = ids.into_iter().zip(1..).collect();
        for c in self.cells.iter_mut() {
            if let Cell::Symbol(s) = c {
                *s = map[s];
            }
        }
        self
    }

    /// Renumbers symbols `1, 2, …` in order of first appearance in a
    /// row-major scan.
    pub fn relabeled_by_first_appearance(mut self) -> Self {
        let mut map: HashMap<u32, u32> = HashMap::new();
        for c in self.cells.iter_mut() {
            if let Cell::Symbol(s) = c {
                let next = map.len() as u32 + 1;
                *s = *map.entry(*s).or_insert(next);
            }
        }
        self
    }

    /// Reads `(K, F, Z, S)` off the grid.
    ///
    /// Fails if the columns disagree on their star count, or if the symbol
    /// ids are not exactly `[S]`.
    pub fn params(&self) -> Result<PdaParams> {
        let z = self.star_count(0);
        for col in 1..self.cols {
            let c = self.star_count(col);
            if c != z {
                return Err(Error::NonUniformStars {
                    first: 1,
                    first_stars: z,
                    second: col + 1,
                    second_stars: c,
                });
            }
        }
        let max = self.max_symbol() as usize;
        let distinct = self.distinct_symbols();
        if max != distinct {
            return Err(Error::Malformed(format!(
                "symbol ids are not dense: max id {max}, {distinct} distinct"
            )));
        }
        Ok(PdaParams::new(self.cols, self.rows, z, max))
    }

    pub fn verify(&self) -> VerifyResult {
        verify_pda(self)
    }

    /// The placement: `A_k` = rows of column `k` holding a symbol.
    pub fn star_pattern(&self) -> StarPattern {
        let sets = (0..self.cols)
            .map(|k| {
                RowSet::from_rows(
                    self.rows,
                    (0..self.rows).filter(|&j| !self.cell(j, k).is_star()),
                )
            })
            .collect();
        StarPattern::from_sets_unchecked(self.rows, sets)
    }

    /// Places grids side by side. All parts must share the row count.
    pub fn hconcat(parts: &[PdaGrid]) -> Result<PdaGrid> {
        let rows = parts
            .first()
            .ok_or_else(|| Error::Malformed("nothing to concatenate".into()))?
            .rows;
        if parts.iter().any(|p| p.rows != rows) {
            return Err(Error::Malformed(
                "concatenated grids must have equal row counts".into(),
            ));
        }
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut cells = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for p in parts {
                cells.extend_from_slice(p.row(r));
            }
        }
        PdaGrid::new(rows, cols, cells)
    }
}

impl fmt::Debug for PdaGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::write_pda(self))
    }
}

/// Convenience for `grid.star_pattern()`.
pub fn to_star_pattern(grid: &PdaGrid) -> StarPattern {
    grid.star_pattern()
}

/// Convenience for `grid.params()`.
pub fn pda_params(grid: &PdaGrid) -> Result<PdaParams> {
    grid.params()
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn eq3() -> PdaGrid {
        text::parse_pda(
            "PDA 4 6\n\
             * * * 1 2 3\n\
             * 1 2 * * 4\n\
             1 * 3 * 4 *\n\
             2 3 * 4 * *\n",
        )
        .unwrap()
    }

    #[test]
    fn eq3_params() {
        assert_eq!(eq3().params().unwrap(), PdaParams::new(6, 4, 2, 4));
    }

    #[test]
    fn single_star_params() {
        let g = PdaGrid::all_stars(1, 1).unwrap();
        assert_eq!(g.params().unwrap(), PdaParams::new(1, 1, 1, 0));
        assert_eq!(g.params().unwrap().rate(), Ratio::new(0, 1));
    }

    #[test]
    fn non_uniform_columns_name_both() {
        let g = PdaGrid::from_rows(vec![
            vec![Cell::Star, Cell::Symbol(1)],
            vec![Cell::Star, Cell::Star],
        ])
        .unwrap();
        assert_eq!(
            g.params().unwrap_err(),
            Error::NonUniformStars {
                first: 1,
                first_stars: 2,
                second: 2,
                second_stars: 1
            }
        );
    }

    #[test]
    fn ragged_and_zero_ids_are_structural() {
        assert!(matches!(
            PdaGrid::from_rows(vec![vec![Cell::Star], vec![]]),
            Err(Error::Malformed(_))
        ));
        assert!(matches!(
            PdaGrid::new(1, 1, vec![Cell::Symbol(0)]),
            Err(Error::Malformed(_))
        ));
        assert!(matches!(
            PdaGrid::all_stars(MAX_ROWS + 1, 1),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn eq3_uncached_sets() {
        let p = eq3().star_pattern();
        let want: [&[usize]; 6] = [&[3, 4], &[2, 4], &[2, 3], &[1, 4], &[1, 3], &[1, 2]];
        for (k, w) in want.iter().enumerate() {
            let got: Vec<usize> = p.uncached(k).iter().map(|r| r + 1).collect();
            assert_eq!(&got, w, "user {}", k + 1);
        }
    }

    #[test]
    fn all_star_pattern_is_empty() {
        let p = PdaGrid::all_stars(3, 2).unwrap().star_pattern();
        assert!(p.sets().iter().all(RowSet::is_empty));
    }

    #[test]
    fn normalization_compacts_in_order() {
        let g = PdaGrid::from_rows(vec![vec![Cell::Symbol(7), Cell::Star], vec![
            Cell::Star,
            Cell::Symbol(3),
        ]])
        .unwrap()
        .normalized();
        assert_eq!(g.cell(0, 0), Cell::Symbol(2));
        assert_eq!(g.cell(1, 1), Cell::Symbol(1));
        let again = g.clone().normalized();
        assert_eq!(g, again);
    }

    #[test]
    fn first_appearance_relabel() {
        let g = PdaGrid::from_rows(vec![vec![Cell::Symbol(7), Cell::Star], vec![
            Cell::Star,
            Cell::Symbol(3),
        ]])
        .unwrap()
        .relabeled_by_first_appearance();
        assert_eq!(g.cell(0, 0), Cell::Symbol(1));
        assert_eq!(g.cell(1, 1), Cell::Symbol(2));
    }
}
