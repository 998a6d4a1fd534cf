use std::collections::HashSet;

use num_rational::Ratio;
use rayon::prelude::*;

use crate::bitset::RowSet;
use crate::construct::{mask_elements, subsets_lex};
use crate::error::{Error, Result};
use crate::pda::{canonical_pattern, PdaParams, StarPattern};

use super::{exact_bound, ExactLimits};

const CHUNK: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    /// Every `K`-tuple of `(F−Z)`-subsets.
    Exhaustive,
    /// Multisets of subsets with the first fixed, deduplicated up to row and
    /// user relabelling.
    Canonical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    /// Maximum number of placements enumerated.
    pub placement_budget: u64,
    pub exact: ExactLimits,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            placement_budget: 10_000_000,
            exact: ExactLimits::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchReport {
    pub params: PdaParams,
    /// Smallest exact `S*` over the placements visited.
    pub best_value: u64,
    pub best_pattern: StarPattern,
    /// Placements generated.
    pub nodes_explored: u64,
    /// Placements skipped because an isomorphic one was already evaluated.
    pub dedup_hits: u64,
    /// True when every admissible placement (up to isomorphism in canonical
    /// mode) was evaluated exactly.
    pub exhaustive: bool,
}

impl SearchReport {
    pub fn rate_bound(&self) -> Ratio<u64> {
        Ratio::new(self.best_value, self.params.rows as u64)
    }
}

/// Outcome of evaluating one placement: `(value, exact)`.
fn evaluate(pattern: &StarPattern, limits: ExactLimits) -> (u64, bool) {
    let c = exact_bound(pattern, limits);
    (c.value, c.exact)
}

fn pattern_from(rows: usize, omega: &[RowSet], picks: &[usize]) -> StarPattern {
    StarPattern::from_sets_unchecked(rows, picks.iter().map(|&i| omega[i].clone()).collect())
}

/// Advances `idx` to the next tuple in `[n]^K` (lexicographic). Returns false
/// after the last one.
fn next_tuple(idx: &mut [usize], n: usize) -> bool {
    for i in (0..idx.len()).rev() {
        if idx[i] + 1 < n {
            idx[i] += 1;
            idx[i + 1..].iter_mut().for_each(|x| *x = 0);
            return true;
        }
    }
    false
}

/// Advances a nondecreasing sequence with `idx[0] = 0` fixed.
fn next_multiset(idx: &mut [usize], n: usize) -> bool {
    for i in (1..idx.len()).rev() {
        if idx[i] + 1 < n {
            let v = idx[i] + 1;
            idx[i..].iter_mut().for_each(|x| *x = v);
            return true;
        }
    }
    false
}

struct Best {
    value: u64,
    picks: Vec<usize>,
}

fn better(a: Option<Best>, b: Option<Best>) -> Option<Best> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if (y.value, &y.picks) < (x.value, &x.picks) { y } else { x }),
        (x, None) => x,
        (None, y) => y,
    }
}

/// `min` over placements with `|A_k| = F − Z` of the exact ordering bound.
///
/// The minimum is taken over the placements enumerated before the budget
/// runs out; `exhaustive` reports whether that was all of them and every
/// inner evaluation was exact. Ties go to the lexicographically first
/// placement (by subset ranks), so results do not depend on thread count.
pub fn search_min_max(
    users: usize,
    rows: usize,
    stars: usize,
    mode: SearchMode,
    limits: SearchLimits,
) -> Result<SearchReport> {
    if users == 0 || rows == 0 || stars > rows {
        return Err(Error::params(format!(
            "need K ≥ 1, F ≥ 1 and Z ≤ F, got K={users}, F={rows}, Z={stars}"
        )));
    }
    if rows > 63 {
        return Err(Error::Overflow(format!("search supports F ≤ 63, got {rows}")));
    }
    let omega: Vec<RowSet> = subsets_lex(rows, rows - stars)
        .map(|mask| RowSet::from_rows(rows, mask_elements(mask).into_iter().map(|r| r - 1)))
        .collect();
    let n = omega.len();
    let params = PdaParams::new(users, rows, stars, 0);

    let mut idx = vec![0usize; users];
    let mut more = true;
    let mut nodes_explored = 0u64;
    let mut dedup_hits = 0u64;
    let mut seen: HashSet<StarPattern> = HashSet::new();
    let mut best: Option<Best> = None;
    let mut all_exact = true;
    while more && nodes_explored < limits.placement_budget {
        let room = (limits.placement_budget - nodes_explored).min(CHUNK as u64) as usize;
        let mut chunk: Vec<Vec<usize>> = Vec::with_capacity(room);
        while more && chunk.len() < room {
            chunk.push(idx.clone());
            more = match mode {
                SearchMode::Exhaustive => next_tuple(&mut idx, n),
                SearchMode::Canonical => next_multiset(&mut idx, n),
            };
        }
        nodes_explored += chunk.len() as u64;

        if mode == SearchMode::Canonical {
            let forms: Vec<StarPattern> = chunk
                .par_iter()
                .map(|p| canonical_pattern(&pattern_from(rows, &omega, p)))
                .collect();
            let before = chunk.len();
            chunk = chunk
                .into_iter()
                .zip(forms)
                .filter_map(|(p, form)| seen.insert(form).then_some(p))
                .collect();
            dedup_hits += (before - chunk.len()) as u64;
        }

        let (chunk_best, chunk_exact) = chunk
            .into_par_iter()
            .map(|p| {
                let (value, exact) = evaluate(&pattern_from(rows, &omega, &p), limits.exact);
                (Some(Best { value, picks: p }), exact)
            })
            .reduce(|| (None, true), |(a, ea), (b, eb)| (better(a, b), ea && eb));
        best = better(best, chunk_best);
        all_exact &= chunk_exact;
    }
    let best = best.expect("at least one placement");

    Ok(SearchReport {
        params,
        best_value: best.value,
        best_pattern: pattern_from(rows, &omega, &best.picks),
        nodes_explored,
        dedup_hits,
        exhaustive: !more && all_exact,
    })
}
