//! Lower bounds on the number of delivery signals `S` for a fixed placement.
//!
//! For any ordering `(i_1, …, i_K)` of the users,
//! `S ≥ Σ_h |A_{i_1} ∩ … ∩ A_{i_h}|`, because the cells `(x, i_h)` with `x` in
//! the `h`-th running intersection all carry distinct symbols. The best such
//! bound (`S*`) maximises over orderings; minimising `S*` over placements
//! gives a placement-free bound for given `(K, F, Z)`.

mod exact;
mod orderings;
mod search;

use std::fmt;

use num_rational::Ratio;

use crate::bitset::RowSet;
use crate::error::{Error, Result};
use crate::pda::StarPattern;

pub use exact::{brute_force_bound, exact_bound, ExactLimits};
pub use orderings::{bipartite_ordering, grouping_ordering, partition_ordering};
pub use search::{search_min_max, SearchLimits, SearchMode, SearchReport};

/// A sequence of distinct users (0-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UserOrdering(Vec<usize>);

impl UserOrdering {
    pub fn new(users: Vec<usize>, total_users: usize) -> Result<Self> {
        let mut seen = vec![false; total_users];
        for &u in &users {
            if u >= total_users {
                return Err(Error::InvalidOrdering(format!(
                    "user {} outside [1,{total_users}]",
                    u + 1
                )));
            }
            if std::mem::replace(&mut seen[u], true) {
                return Err(Error::InvalidOrdering(format!("user {} repeated", u + 1)));
            }
        }
        Ok(UserOrdering(users))
    }

    pub fn from_one_based(users: &[usize], total_users: usize) -> Result<Self> {
        let zero = users
            .iter()
            .map(|&u| {
                u.checked_sub(1)
                    .ok_or_else(|| Error::InvalidOrdering("user ids are 1-based".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(zero, total_users)
    }

    /// `0, 1, …, K−1`.
    pub fn identity(total_users: usize) -> Self {
        UserOrdering((0..total_users).collect())
    }

    pub(crate) fn from_vec_unchecked(users: Vec<usize>) -> Self {
        UserOrdering(users)
    }

    pub fn users(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|u| u + 1).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    /// Enumeration of every ordering.
    Exact,
    BranchBound,
    Greedy,
    /// A single caller-supplied ordering.
    Prescribed,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::BranchBound => "branch_bound",
            Method::Greedy => "greedy",
            Method::Prescribed => "prescribed",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A lower bound on `S` together with the ordering that achieves it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundCertificate {
    pub value: u64,
    pub rows: usize,
    pub witness: UserOrdering,
    /// `|I_h|` for `h = 1..=len(witness)`; non-increasing, sums to `value`.
    pub step_sizes: Vec<u64>,
    pub method: Method,
    /// True when `value` is the maximum over all orderings.
    pub exact: bool,
}

impl BoundCertificate {
    /// `value / F`.
    pub fn rate_bound(&self) -> Ratio<u64> {
        Ratio::new(self.value, self.rows as u64)
    }
}

fn check_pattern_users(pattern: &StarPattern, order: &UserOrdering) -> Result<()> {
    if order.users().iter().any(|&u| u >= pattern.users()) {
        return Err(Error::InvalidOrdering(format!(
            "ordering refers to users beyond K = {}",
            pattern.users()
        )));
    }
    Ok(())
}

/// Step sizes of the running intersection along `users`. Stops computing once
/// the intersection is empty; the remaining steps are zero.
pub(crate) fn step_sizes(pattern: &StarPattern, users: &[usize]) -> Vec<u64> {
    let mut steps = Vec::with_capacity(users.len());
    let mut inter = RowSet::full(pattern.rows());
    for &u in users {
        if inter.is_empty() {
            steps.push(0);
            continue;
        }
        inter.intersect_with(pattern.uncached(u));
        steps.push(inter.count() as u64);
    }
    steps
}

/// Evaluates `Σ_h |∩_{j≤h} A_{i_j}|` along a given ordering.
pub fn eval_ordering(pattern: &StarPattern, order: &UserOrdering) -> Result<BoundCertificate> {
    check_pattern_users(pattern, order)?;
    let steps = step_sizes(pattern, order.users());
    Ok(BoundCertificate {
        value: steps.iter().sum(),
        rows: pattern.rows(),
        witness: order.clone(),
        step_sizes: steps,
        method: Method::Prescribed,
        exact: false,
    })
}

/// Greedy ordering: repeatedly append the unused user whose uncached set
/// keeps the running intersection largest, ties to the smaller id.
pub fn greedy_bound(pattern: &StarPattern) -> BoundCertificate {
    let k = pattern.users();
    let mut used = vec![false; k];
    let mut inter = RowSet::full(pattern.rows());
    let mut order = Vec::with_capacity(k);
    let mut steps = Vec::with_capacity(k);
    for _ in 0..k {
        let (best, size) = (0..k)
            .filter(|&u| !used[u])
            .map(|u| (u, inter.intersection_count(pattern.uncached(u))))
            .fold(None, |acc: Option<(usize, usize)>, (u, c)| match acc {
                Some((_, bc)) if bc >= c => acc,
                _ => Some((u, c)),
            })
            .expect("at least one unused user");
        used[best] = true;
        inter.intersect_with(pattern.uncached(best));
        order.push(best);
        steps.push(size as u64);
    }
    BoundCertificate {
        value: steps.iter().sum(),
        rows: pattern.rows(),
        witness: UserOrdering(order),
        step_sizes: steps,
        method: Method::Greedy,
        exact: false,
    }
}

/// Both sides of the complement identity along one full ordering.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComplementSums {
    /// `Σ_h |∩_{j≤h} A_{i_j}|`.
    pub intersection_sum: u64,
    /// `Σ_h |∪_{j≤h} Ā_{i_j}|`.
    pub union_sum: u64,
}

/// Computes `Σ_h |∪_{j≤h} Ā_{i_j}|` directly from the cached sets and checks
/// it against `K·F − Σ_h |∩_{j≤h} A_{i_j}|`.
pub fn union_complement_sum(pattern: &StarPattern, order: &UserOrdering) -> Result<ComplementSums> {
    check_pattern_users(pattern, order)?;
    if order.len() != pattern.users() {
        return Err(Error::InvalidOrdering(format!(
            "need all {} users, got {}",
            pattern.users(),
            order.len()
        )));
    }
    let f = pattern.rows();
    let mut union = RowSet::empty(f);
    let mut union_sum = 0u64;
    for &u in order.users() {
        union.union_with(&pattern.cached(u));
        union_sum += union.count() as u64;
    }
    let intersection_sum: u64 = step_sizes(pattern, order.users()).iter().sum();
    assert_eq!(
        union_sum + intersection_sum,
        (pattern.users() * f) as u64,
        "complement identity violated"
    );
    Ok(ComplementSums {
        intersection_sum,
        union_sum,
    })
}
