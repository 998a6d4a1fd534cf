//! Golden arrays and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

pub mod props;

use std::collections::{BTreeSet, HashMap};

use itertools::Itertools;
use pda_workbench::pda::text::parse_pda;
use pda_workbench::{Cell, PdaGrid, StarPattern};

/// The (6,4,2,4) array used to illustrate the delivery algorithm.
pub const SMALL_6_4: &str = "
* * * 1 2 3
* 1 2 * * 4
1 * 3 * 4 *
2 3 * 4 * *";

/// The (6,4,1,11) array whose placement has exact bound 11.
pub const SIX_USERS_11: &str = "
1 2 3 * 7 8
4 5 * 3 9 10
6 * 5 2 11 *
* 6 4 1 * 11";

/// The (4,6,3,4) MN array found by exhaustive search.
pub const MN_4_6: &str = "
* * 1 2
* 1 * 3
* 2 3 *
1 * * 4
2 * 4 *
3 4 * *";

/// The exhibited (6,8,5,5) array.
pub const SIX_8_5_5: &str = "
1 * * * 4 *
2 4 * * * 5
* 1 2 * * *
3 * 4 * * *
* 3 * 2 * *
* * 5 1 3 *
* * * * 2 1
* * * 4 * 3";

/// Bipartite (m,a,b) = (5,2,1) with subset labels; columns 12,13,…,45.
pub const BIPARTITE_5_2_1: &str = "
*   *   *   *   123 124 125 134 135 145
*   123 124 125 *   *   *   234 235 245
123 *   134 135 *   234 235 *   *   345
124 134 *   145 234 *   245 *   345 *
125 135 145 *   235 245 *   345 *   *";

/// Partition (q,m) = (3,2) with vector labels `(e, n_e)`; columns (1,1)…(3,3).
pub const PARTITION_3_2: &str = "
*     2,1,2 3,1,2 *     1,2,2 1,3,2 1,1,1 *     1,1,3
1,1,3 *     3,1,3 *     2,2,3 2,3,3 2,1,1 2,1,2 *
1,1,1 2,1,1 *     *     3,2,1 3,3,1 *     3,1,2 3,1,3
*     2,2,3 3,2,3 1,1,3 *     1,3,3 1,2,1 1,2,2 *
1,2,1 *     3,2,1 2,1,1 *     2,3,1 *     2,2,2 2,2,3
1,2,2 2,2,2 *     3,1,2 *     3,3,2 3,2,1 *     3,2,3
*     2,3,1 3,3,1 1,1,1 1,2,1 *     *     1,3,2 1,3,3
1,3,2 *     3,3,2 2,1,2 2,2,2 *     2,3,1 *     2,3,3
1,3,3 2,3,3 *     3,1,3 3,2,3 *     3,3,1 3,3,2 *";

/// Builds a grid from whitespace-separated labels; `*` is a star and every
/// other token is a symbol, numbered by first appearance in row-major order.
pub fn grid_from_labels(text: &str) -> PdaGrid {
    let mut ids: HashMap<&str, u32> = HashMap::new();
    let rows: Vec<Vec<Cell>> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.split_whitespace()
                .map(|t| {
                    if t == "*" {
                        Cell::Star
                    } else {
                        let next = ids.len() as u32 + 1;
                        Cell::Symbol(*ids.entry(t).or_insert(next))
                    }
                })
                .collect()
        })
        .collect();
    PdaGrid::from_rows(rows).unwrap()
}

pub fn parse_body(body: &str) -> PdaGrid {
    let lines: Vec<&str> = body.lines().filter(|l| !l.trim().is_empty()).collect();
    let k = lines[0].split_whitespace().count();
    parse_pda(&format!("PDA {} {k}\n{}", lines.len(), lines.join("\n"))).unwrap()
}

/// Rows as `None` (star) or `Some(symbol)`.
pub fn raw(grid: &PdaGrid) -> Vec<Vec<Option<u32>>> {
    (0..grid.rows())
        .map(|j| (0..grid.cols()).map(|k| grid.cell(j, k).symbol()).collect())
        .collect()
}

/// Checks C1–C3 straight from the definition, over all pairs of cells.
pub fn oracle_is_pda(cells: &[Vec<Option<u32>>]) -> bool {
    let f = cells.len();
    let k = cells[0].len();
    let stars: Vec<usize> = (0..k).map(|c| (0..f).filter(|&r| cells[r][c].is_none()).count()).collect();
    if stars.iter().any(|&z| z != stars[0]) {
        return false;
    }
    let symbols: BTreeSet<u32> = cells.iter().flatten().flatten().copied().collect();
    if let Some(&max) = symbols.last() {
        if symbols.len() != max as usize || symbols.first() != Some(&1) {
            return false;
        }
    }
    for (j1, k1) in (0..f).cartesian_product(0..k) {
        for (j2, k2) in (0..f).cartesian_product(0..k) {
            if (j1, k1) == (j2, k2) {
                continue;
            }
            match (cells[j1][k1], cells[j2][k2]) {
                (Some(a), Some(b)) if a == b => {
                    if j1 == j2 || k1 == k2 {
                        return false;
                    }
                    if cells[j1][k2].is_some() || cells[j2][k1].is_some() {
                        return false;
                    }
                }
                _ => {}
            }
        }
    }
    true
}

/// Uncached sets of a pattern as ordinary sets.
pub fn uncached_sets(p: &StarPattern) -> Vec<BTreeSet<usize>> {
    (0..p.users()).map(|u| p.uncached(u).iter().collect()).collect()
}

/// Sum of nested intersections along one ordering.
pub fn nested_sum(sets: &[BTreeSet<usize>], order: &[usize]) -> u64 {
    let mut acc: Option<BTreeSet<usize>> = None;
    let mut total = 0;
    for &u in order {
        let next: BTreeSet<usize> = match &acc {
            None => sets[u].clone(),
            Some(a) => a.intersection(&sets[u]).copied().collect(),
        };
        total += next.len() as u64;
        acc = Some(next);
    }
    total
}

/// Maximum of [`nested_sum`] over every permutation of the users.
pub fn oracle_max_over_orderings(sets: &[BTreeSet<usize>]) -> u64 {
    (0..sets.len())
        .permutations(sets.len())
        .map(|o| nested_sum(sets, &o))
        .max()
        .unwrap_or(0)
}
