use std::collections::HashMap;

use crate::bitset::RowSet;
use crate::error::{Error, Result};
use crate::pda::StarPattern;

use super::{greedy_bound, step_sizes, BoundCertificate, Method, UserOrdering};

/// Largest `K` accepted by [`brute_force_bound`].
pub const BRUTE_FORCE_MAX_USERS: usize = 10;

/// Beyond this many users the memo table becomes a hash map.
const DENSE_MEMO_USERS: usize = 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactLimits {
    pub max_users: usize,
    /// Number of distinct search states expanded before giving up.
    pub node_budget: u64,
}

impl Default for ExactLimits {
    fn default() -> Self {
        ExactLimits {
            max_users: 20,
            node_budget: 100_000_000,
        }
    }
}

const UNSET: u32 = u32::MAX;

enum Memo {
    Dense(Vec<u32>),
    Sparse(HashMap<u64, u32>),
}

impl Memo {
    fn new(users: usize) -> Self {
        if users <= DENSE_MEMO_USERS {
            Memo::Dense(vec![UNSET; 1 << users])
        } else {
            Memo::Sparse(HashMap::new())
        }
    }

    fn get(&self, used: u64) -> Option<u32> {
        match self {
            Memo::Dense(v) => Some(v[used as usize]).filter(|&x| x != UNSET),
            Memo::Sparse(m) => m.get(&used).copied(),
        }
    }

    fn set(&mut self, used: u64, value: u32) {
        match self {
            Memo::Dense(v) => v[used as usize] = value,
            Memo::Sparse(m) => {
                m.insert(used, value);
            }
        }
    }
}

struct OutOfBudget;

/// The best remaining sum depends only on the set of users already placed,
/// since the running intersection is the intersection of their sets. The
/// search memoises on that set and prunes children with the bound
/// `c + Σ_{others} min(c, c_j)`.
struct Solver<'a> {
    sets: &'a [RowSet],
    users: usize,
    memo: Memo,
    nodes: u64,
    budget: u64,
    /// `bufs[d]` holds the running intersection at depth `d`.
    bufs: Vec<RowSet>,
}

/// True when `a` and `b` agree on every row of `within`.
fn same_within(a: &RowSet, b: &RowSet, within: &RowSet) -> bool {
    a.words()
        .iter()
        .zip(b.words())
        .zip(within.words())
        .all(|((x, y), w)| (x ^ y) & w == 0)
}

impl<'a> Solver<'a> {
    fn new(pattern: &'a StarPattern, budget: u64) -> Self {
        let users = pattern.users();
        let rows = pattern.rows();
        let mut bufs = vec![RowSet::empty(rows); users + 1];
        bufs[0] = RowSet::full(rows);
        Solver {
            sets: pattern.sets(),
            users,
            memo: Memo::new(users),
            nodes: 0,
            budget,
            bufs,
        }
    }

    fn set_child(&mut self, depth: usize, user: usize) {
        let sets = self.sets;
        let (lo, hi) = self.bufs.split_at_mut(depth + 1);
        lo[depth].intersection_into(&sets[user], &mut hi[0]);
    }

    /// Best achievable sum of the remaining steps, given the users in `used`
    /// have been placed and `bufs[depth]` is their intersection.
    fn best(&mut self, used: u64, depth: usize) -> std::result::Result<u32, OutOfBudget> {
        if let Some(v) = self.memo.get(used) {
            return Ok(v);
        }
        if self.bufs[depth].is_empty() {
            return Ok(0);
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(OutOfBudget);
        }
        let inter = std::mem::replace(&mut self.bufs[depth], RowSet::empty(0));
        let result = self.expand(&inter, used, depth);
        self.bufs[depth] = inter;
        let value = result?;
        self.memo.set(used, value);
        Ok(value)
    }

    fn expand(
        &mut self,
        inter: &RowSet,
        used: u64,
        depth: usize,
    ) -> std::result::Result<u32, OutOfBudget> {
        let size = inter.count();
        let mut cands: Vec<(usize, usize)> = (0..self.users)
            .filter(|u| used >> u & 1 == 0)
            .map(|u| (inter.intersection_count(&self.sets[u]), u))
            .collect();

        // A user keeping the whole intersection can always go next.
        if let Some(&(c, u)) = cands.iter().find(|(c, _)| *c == size) {
            self.bufs[depth + 1].clone_from(inter);
            return Ok(c as u32 + self.best(used | 1 << u, depth + 1)?);
        }

        cands.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut suffix = vec![0u32; cands.len() + 1];
        for i in (0..cands.len()).rev() {
            suffix[i] = suffix[i + 1] + cands[i].0 as u32;
        }

        let mut local = 0u32;
        let mut expanded: Vec<usize> = Vec::new();
        for (p, &(c, u)) in cands.iter().enumerate() {
            if c == 0 {
                break;
            }
            let c32 = c as u32;
            let upper = c32 * (p as u32 + 1) + suffix[p + 1];
            if upper <= local {
                continue;
            }
            let duplicate = expanded
                .iter()
                .any(|&w| same_within(&self.sets[w], &self.sets[u], inter));
            if duplicate {
                continue;
            }
            expanded.push(u);
            inter.intersection_into(&self.sets[u], &mut self.bufs[depth + 1]);
            let v = c32 + self.best(used | 1 << u, depth + 1)?;
            local = local.max(v);
        }
        Ok(local)
    }

    /// Walks the memo to produce the lexicographically smallest optimal
    /// ordering.
    fn reconstruct(&mut self, total: u32) -> std::result::Result<Vec<usize>, OutOfBudget> {
        let mut order = Vec::with_capacity(self.users);
        let mut used = 0u64;
        let mut remaining = total;
        let mut depth = 0;
        while remaining > 0 {
            let mut chosen = None;
            for u in (0..self.users).filter(|u| used >> u & 1 == 0) {
                let c = self.bufs[depth].intersection_count(&self.sets[u]) as u32;
                if c == 0 || c > remaining {
                    continue;
                }
                self.set_child(depth, u);
                if c + self.best(used | 1 << u, depth + 1)? == remaining {
                    chosen = Some((u, c));
                    break;
                }
            }
            let (u, c) = chosen.expect("memoised optimum is reachable");
            self.set_child(depth, u);
            order.push(u);
            used |= 1 << u;
            remaining -= c;
            depth += 1;
        }
        order.extend((0..self.users).filter(|u| used >> u & 1 == 0));
        Ok(order)
    }
}

fn certificate(pattern: &StarPattern, order: Vec<usize>, method: Method) -> BoundCertificate {
    let steps = step_sizes(pattern, &order);
    BoundCertificate {
        value: steps.iter().sum(),
        rows: pattern.rows(),
        witness: UserOrdering::from_vec_unchecked(order),
        step_sizes: steps,
        method,
        exact: true,
    }
}

/// The maximum over all orderings, with the lexicographically smallest
/// optimal ordering as witness.
///
/// When `K` exceeds `limits.max_users` (or 64), or the node budget runs out,
/// the greedy certificate is returned instead with `exact == false`.
pub fn exact_bound(pattern: &StarPattern, limits: ExactLimits) -> BoundCertificate {
    let k = pattern.users();
    if k > limits.max_users || k > 64 {
        return greedy_bound(pattern);
    }
    let mut solver = Solver::new(pattern, limits.node_budget);
    let run = solver
        .best(0, 0)
        .and_then(|total| solver.reconstruct(total));
    match run {
        Ok(order) => certificate(pattern, order, Method::BranchBound),
        Err(OutOfBudget) => greedy_bound(pattern),
    }
}

/// Enumerates every ordering in lexicographic order and keeps the first
/// maximum. Only for `K ≤ 10`; meant as a reference.
pub fn brute_force_bound(pattern: &StarPattern) -> Result<BoundCertificate> {
    let k = pattern.users();
    if k > BRUTE_FORCE_MAX_USERS {
        return Err(Error::params(format!(
            "brute force supports K ≤ {BRUTE_FORCE_MAX_USERS}, got {k}"
        )));
    }
    struct Walk<'a> {
        sets: &'a [RowSet],
        order: Vec<usize>,
        used: Vec<bool>,
        best: Option<(u64, Vec<usize>)>,
    }
    impl Walk<'_> {
        fn go(&mut self, inter: &RowSet, sum: u64) {
            let k = self.sets.len();
            if self.order.len() == k || inter.is_empty() {
                if self.best.as_ref().is_none_or(|(b, _)| sum > *b) {
                    let mut full = self.order.clone();
                    full.extend((0..k).filter(|&u| !self.used[u]));
                    self.best = Some((sum, full));
                }
                return;
            }
            for u in 0..k {
                if self.used[u] {
                    continue;
                }
                let next = inter.intersection(&self.sets[u]);
                let c = next.count() as u64;
                self.used[u] = true;
                self.order.push(u);
                self.go(&next, sum + c);
                self.order.pop();
                self.used[u] = false;
            }
        }
    }
    let mut walk = Walk {
        sets: pattern.sets(),
        order: Vec::with_capacity(k),
        used: vec![false; k],
        best: None,
    };
    walk.go(&RowSet::full(pattern.rows()), 0);
    let (_, order) = walk.best.expect("at least one ordering");
    Ok(certificate(pattern, order, Method::Exact))
}
