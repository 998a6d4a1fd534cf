//! Canonical form of a placement under row and user relabelling.
//!
//! Rows are coloured by colour refinement on the row/user incidence
//! structure, then the non-discrete cells are individualised one row at a
//! time. Each discrete leaf fixes a row labelling; the canonical form is the
//! lexicographically smallest sorted column list over all leaves. Rows with
//! identical user membership are interchangeable, so only one of them is
//! individualised per cell.
//!
//! Up to [`EXACT_CANON_ROWS`] rows every branch is explored and the result is
//! a true canonical form. Above that only the first branch at each level is
//! followed: the result is still invariant under user permutation and under
//! any row permutation that refinement alone resolves, but two isomorphic
//! highly symmetric patterns may map to different representatives.

use std::collections::BTreeMap;

use crate::bitset::RowSet;

use super::StarPattern;

pub const EXACT_CANON_ROWS: usize = 10;

struct Canonizer<'a> {
    pattern: &'a StarPattern,
    /// For each row, the users that leave it uncached.
    members: Vec<Vec<usize>>,
    exact: bool,
    best: Option<Vec<RowSet>>,
}

/// Re-ranks arbitrary sortable signatures into dense colours `0..n`, keeping
/// their sort order. Returns the number of distinct colours.
fn rank<T: Ord + Clone>(sigs: &[T]) -> (Vec<u32>, usize) {
    let mut sorted: Vec<T> = sigs.to_vec();
    sorted.sort();
    sorted.dedup();
    let colors = sigs
        .iter()
        .map(|s| sorted.binary_search(s).expect("present") as u32)
        .collect();
    (colors, sorted.len())
}

impl<'a> Canonizer<'a> {
    fn new(pattern: &'a StarPattern) -> Self {
        let mut members = vec![Vec::new(); pattern.rows()];
        for (k, set) in pattern.sets().iter().enumerate() {
            for r in set.iter() {
                members[r].push(k);
            }
        }
        Canonizer {
            pattern,
            members,
            exact: pattern.rows() <= EXACT_CANON_ROWS,
            best: None,
        }
    }

    /// Colour refinement until the row partition stops splitting.
    fn refine(&self, mut rows: Vec<u32>) -> Vec<u32> {
        let k = self.pattern.users();
        let mut cols = vec![0u32; k];
        let mut n_rows = rows.iter().copied().max().map_or(0, |m| m as usize + 1);
        let mut n_cols = 1;
        loop {
            let col_sigs: Vec<(u32, Vec<u32>)> = (0..k)
                .map(|c| {
                    let mut v: Vec<u32> = self.pattern.uncached(c).iter().map(|r| rows[r]).collect();
                    v.sort_unstable();
                    (cols[c], v)
                })
                .collect();
            let (new_cols, nc) = rank(&col_sigs);
            let row_sigs: Vec<(u32, Vec<u32>)> = (0..rows.len())
                .map(|r| {
                    let mut v: Vec<u32> = self.members[r].iter().map(|&c| new_cols[c]).collect();
                    v.sort_unstable();
                    (rows[r], v)
                })
                .collect();
            let (new_rows, nr) = rank(&row_sigs);
            let stable = nr == n_rows && nc == n_cols;
            rows = new_rows;
            cols = new_cols;
            n_rows = nr;
            n_cols = nc;
            if stable {
                return rows;
            }
        }
    }

    fn search(&mut self, colors: Vec<u32>) {
        let colors = self.refine(colors);
        let mut cells: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (r, &c) in colors.iter().enumerate() {
            cells.entry(c).or_default().push(r);
        }
        let target = cells.values().find(|rows| rows.len() > 1).cloned();
        let Some(target) = target else {
            self.leaf(&colors);
            return;
        };
        // One representative per class of rows with identical membership.
        let mut reps: Vec<usize> = Vec::new();
        for &r in &target {
            if !reps.iter().any(|&q| self.members[q] == self.members[r]) {
                reps.push(r);
            }
        }
        if !self.exact {
            reps.truncate(1);
        }
        let cell_color = colors[target[0]];
        for r in reps {
            let split: Vec<u32> = colors
                .iter()
                .enumerate()
                .map(|(q, &c)| {
                    if c == cell_color && q != r {
                        2 * c + 1
                    } else {
                        2 * c
                    }
                })
                .collect();
            let (dense, _) = rank(&split);
            self.search(dense);
        }
    }

    fn leaf(&mut self, colors: &[u32]) {
        let perm: Vec<usize> = colors.iter().map(|&c| c as usize).collect();
        let mut cols: Vec<RowSet> = self
            .pattern
            .sets()
            .iter()
            .map(|s| s.permuted(&perm))
            .collect();
        cols.sort();
        if self.best.as_ref().is_none_or(|b| cols < *b) {
            self.best = Some(cols);
        }
    }
}

/// Returns the canonical representative of `pattern` under row and user
/// permutations. Idempotent.
pub fn canonical_pattern(pattern: &StarPattern) -> StarPattern {
    let mut c = Canonizer::new(pattern);
    c.search(vec![0; pattern.rows()]);
    let cols = c.best.expect("search reaches at least one leaf");
    StarPattern::from_sets_unchecked(pattern.rows(), cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex3() -> StarPattern {
        StarPattern::from_one_based(6, &[&[4, 5, 6], &[2, 3, 6], &[1, 3, 5], &[1, 2, 4]]).unwrap()
    }

    #[test]
    fn idempotent() {
        let c = canonical_pattern(&ex3());
        assert_eq!(canonical_pattern(&c), c);
    }

    #[test]
    fn invariant_under_row_and_column_shuffle() {
        let p = ex3();
        let q = p.permuted(&[5, 3, 1, 0, 2, 4], &[2, 0, 3, 1]);
        assert_ne!(p, q);
        assert_eq!(canonical_pattern(&p), canonical_pattern(&q));
    }

    #[test]
    fn distinguishes_non_isomorphic() {
        let a = StarPattern::from_one_based(4, &[&[1, 2], &[1, 3]]).unwrap();
        let b = StarPattern::from_one_based(4, &[&[1, 2], &[3, 4]]).unwrap();
        assert_ne!(canonical_pattern(&a), canonical_pattern(&b));
    }

    #[test]
    fn symmetric_degenerate_patterns_are_cheap() {
        // Every row equivalent: twin reduction keeps this to a single leaf.
        let p = StarPattern::new(10, vec![(0..10).collect(); 5]).unwrap();
        assert_eq!(canonical_pattern(&p), p);
    }
}
