use crate::bitset::{RowSet, MAX_ROWS};
use crate::error::{Error, Result};

use super::{Cell, PdaGrid};

/// A placement: for each user `k`, the set `A_k ⊆ [F]` of rows it does NOT
/// cache. The cached rows are the complements.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StarPattern {
    rows: usize,
    uncached: Vec<RowSet>,
}

impl StarPattern {
    /// Builds a pattern from 0-based uncached row lists.
    pub fn new(rows: usize, uncached: Vec<Vec<usize>>) -> Result<Self> {
        if rows == 0 || uncached.is_empty() {
            return Err(Error::params("a placement needs F ≥ 1 and K ≥ 1"));
        }
        if rows > MAX_ROWS {
            return Err(Error::Overflow(format!(
                "{rows} rows exceeds the row cap {MAX_ROWS}"
            )));
        }
        let mut sets = Vec::with_capacity(uncached.len());
        for (k, list) in uncached.into_iter().enumerate() {
            if let Some(&bad) = list.iter().find(|&&r| r >= rows) {
                return Err(Error::params(format!(
                    "user {} lists row {} outside [1,{rows}]",
                    k + 1,
                    bad + 1
                )));
            }
            sets.push(RowSet::from_rows(rows, list));
        }
        Ok(StarPattern {
            rows,
            uncached: sets,
        })
    }

    /// Same as [`StarPattern::new`] but with 1-based row labels.
    pub fn from_one_based(rows: usize, uncached: &[&[usize]]) -> Result<Self> {
        let lists = uncached
            .iter()
            .map(|l| {
                l.iter()
                    .map(|&r| {
                        r.checked_sub(1)
                            .ok_or_else(|| Error::params("row labels are 1-based"))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows, lists)
    }

    pub(crate) fn from_sets_unchecked(rows: usize, uncached: Vec<RowSet>) -> Self {
        StarPattern { rows, uncached }
    }

    pub fn from_sets(rows: usize, uncached: Vec<RowSet>) -> Result<Self> {
        if uncached.iter().any(|s| s.universe() != rows) {
            return Err(Error::params("row set universes must equal F"));
        }
        Self::new(rows, uncached.iter().map(|s| s.iter().collect()).collect())
    }

    /// `F`.
    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// `K`.
    #[inline]
    pub fn users(&self) -> usize {
        self.uncached.len()
    }

    #[inline]
    pub fn uncached(&self, user: usize) -> &RowSet {
        &self.uncached[user]
    }

    pub fn sets(&self) -> &[RowSet] {
        &self.uncached
    }

    pub fn cached(&self, user: usize) -> RowSet {
        self.uncached[user].complement()
    }

    /// `Z` when every user leaves the same number of rows uncached.
    pub fn stars(&self) -> Option<usize> {
        let first = self.uncached[0].count();
        self.uncached
            .iter()
            .all(|s| s.count() == first)
            .then(|| self.rows - first)
    }

    /// The star skeleton as a grid with every non-star cell holding a
    /// distinct symbol. Useful only as a display or as input to a filler.
    pub fn to_grid_skeleton(&self) -> PdaGrid {
        let k = self.users();
        let mut cells = vec![Cell::Star; self.rows * k];
        let mut next = 1;
        for r in 0..self.rows {
            for (c, set) in self.uncached.iter().enumerate() {
                if set.contains(r) {
                    cells[r * k + c] = Cell::Symbol(next);
                    next += 1;
                }
            }
        }
        PdaGrid::new(self.rows, k, cells).expect("pattern dimensions are valid")
    }

    /// Applies a row relabelling `perm[old] = new` and a column order
    /// (`order[i]` becomes column `i`).
    pub fn permuted(&self, row_perm: &[usize], col_order: &[usize]) -> StarPattern {
        StarPattern {
            rows: self.rows,
            uncached: col_order
                .iter()
                .map(|&c| self.uncached[c].permuted(row_perm))
                .collect(),
        }
    }
}
