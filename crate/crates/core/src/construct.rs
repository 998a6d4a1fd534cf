//! PDA families: partition, bipartite graph (including MN) and grouping
//! bipartite graph.
//!
//! Enumeration orders are fixed so generated grids are byte-stable:
//!
//! * partition rows run over `(f_1, …, f_m) ∈ [q]^m` with `f_1` varying
//!   fastest; columns are `(u, v)` for `u ∈ [m+1]`, `v ∈ [q]`, row-major.
//! * bipartite rows are the `b`-subsets of `[m]`, columns the `a`-subsets,
//!   both in lexicographic order.
//!
//! Symbol ids are assigned by first appearance in a row-major scan.

use std::collections::HashMap;

use crate::bitset::MAX_ROWS;
use crate::error::{Error, Result};
use crate::pda::{Cell, PdaGrid, PdaParams};

/// Upper bound on `F·K` for generated grids.
pub const MAX_CELLS: usize = 1 << 24;

/// `⟨x⟩_q`: the residue of `x` modulo `q` taken in `{1, …, q}`.
pub fn residue_q(x: i64, q: i64) -> Result<u32> {
    if q <= 0 {
        return Err(Error::params(format!("modulus must be positive, got {q}")));
    }
    let r = x.rem_euclid(q);
    Ok(if r == 0 { q as u32 } else { r as u32 })
}

pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

fn binom_usize(n: usize, k: usize) -> Result<usize> {
    binomial(n as u64, k as u64)
        .and_then(|v| usize::try_from(v).ok())
        .ok_or_else(|| Error::Overflow(format!("C({n},{k})")))
}

fn check_size(rows: usize, cols: usize) -> Result<()> {
    if rows > MAX_ROWS {
        return Err(Error::Overflow(format!(
            "F = {rows} exceeds the row cap {MAX_ROWS}"
        )));
    }
    if rows.checked_mul(cols).is_none_or(|c| c > MAX_CELLS) {
        return Err(Error::Overflow(format!("{rows}x{cols} grid is too large")));
    }
    Ok(())
}

/// Row or column label of a generated PDA.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RowLabel {
    /// Partition row `(f_1, …, f_m, ⟨Σ f_i⟩_q)`.
    Vector(Vec<u32>),
    /// Bipartite row or column: a subset of `[m]`, 1-based, ascending.
    Subset(Vec<usize>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PartitionSpec {
    pub q: usize,
    pub m: usize,
}

impl PartitionSpec {
    pub fn new(q: usize, m: usize) -> Result<Self> {
        if q < 2 {
            return Err(Error::params(format!("partition PDA needs q ≥ 2, got {q}")));
        }
        if m < 1 {
            return Err(Error::params("partition PDA needs m ≥ 1"));
        }
        Ok(PartitionSpec { q, m })
    }

    pub fn users(&self) -> usize {
        (self.m + 1) * self.q
    }

    pub fn rows(&self) -> Result<usize> {
        u32::try_from(self.m)
            .ok()
            .and_then(|m| self.q.checked_pow(m))
            .ok_or_else(|| Error::Overflow(format!("{}^{}", self.q, self.m)))
    }

    /// `((m+1)q, q^m, q^{m-1}, (q-1)q^m)`.
    pub fn params(&self) -> Result<PdaParams> {
        let f = self.rows()?;
        Ok(PdaParams::new(self.users(), f, f / self.q, (self.q - 1) * f))
    }

    /// Row labels in enumeration order, each with its checksum coordinate.
    pub fn row_labels(&self) -> Result<Vec<RowLabel>> {
        let f = self.rows()?;
        check_size(f, 1)?;
        Ok((0..f)
            .map(|r| RowLabel::Vector(self.row_vector(r)))
            .collect())
    }

    /// The `(m+1)`-vector of row `r` (1-based entries).
    pub fn row_vector(&self, mut r: usize) -> Vec<u32> {
        let q = self.q;
        let mut f = Vec::with_capacity(self.m + 1);
        let mut sum = 0i64;
        for _ in 0..self.m {
            let d = (r % q) as u32 + 1;
            r /= q;
            sum += d as i64;
            f.push(d);
        }
        f.push(residue_q(sum, q as i64).expect("q ≥ 2"));
        f
    }

    /// Column index of user `(u, v)`, both 1-based.
    pub fn user_index(&self, u: usize, v: usize) -> usize {
        (u - 1) * self.q + (v - 1)
    }
}

/// Partition PDA: cell `(f, (u,v))` is a star iff `f_u = v`; otherwise its
/// symbol is the vector `f` with coordinate `u` replaced by `v`, which is
/// never a row vector, so each symbol is shared by exactly `m+1` cells.
pub fn partition_pda(spec: PartitionSpec) -> Result<PdaGrid> {
    let f = spec.rows()?;
    let k = spec.users();
    check_size(f, k)?;
    let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
    let mut cells = Vec::with_capacity(f * k);
    for r in 0..f {
        let row = spec.row_vector(r);
        for u in 0..=spec.m {
            for v in 1..=spec.q as u32 {
                if row[u] == v {
                    cells.push(Cell::Star);
                } else {
                    let mut label = row.clone();
                    label[u] = v;
                    let next = ids.len() as u32 + 1;
                    cells.push(Cell::Symbol(*ids.entry(label).or_insert(next)));
                }
            }
        }
    }
    PdaGrid::new(f, k, cells)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BipartiteSpec {
    pub m: usize,
    pub a: usize,
    pub b: usize,
    /// Number of side-by-side copies; 1 is the plain bipartite PDA.
    pub h: usize,
}

impl BipartiteSpec {
    pub fn new(m: usize, a: usize, b: usize, h: usize) -> Result<Self> {
        if a == 0 || b == 0 || h == 0 {
            return Err(Error::params("a, b and h must be positive"));
        }
        if a + b >= m {
            return Err(Error::params(format!(
                "bipartite PDA needs a + b < m, got a={a}, b={b}, m={m}"
            )));
        }
        if m > 63 {
            return Err(Error::Overflow(format!("m = {m} exceeds 63")));
        }
        Ok(BipartiteSpec { m, a, b, h })
    }

    /// `(h·C(m,a), C(m,b), C(m,b) − C(m−a,b), h·C(m,a+b))`.
    pub fn params(&self) -> Result<PdaParams> {
        let (m, a, b) = (self.m, self.a, self.b);
        let f = binom_usize(m, b)?;
        let users = binom_usize(m, a)?
            .checked_mul(self.h)
            .ok_or_else(|| Error::Overflow("user count".into()))?;
        let symbols = binom_usize(m, a + b)?
            .checked_mul(self.h)
            .ok_or_else(|| Error::Overflow("symbol count".into()))?;
        Ok(PdaParams::new(users, f, f - binom_usize(m - a, b)?, symbols))
    }

    pub fn row_labels(&self) -> Vec<RowLabel> {
        subsets_lex(self.m, self.b).map(mask_label).collect()
    }

    pub fn column_labels(&self) -> Vec<RowLabel> {
        subsets_lex(self.m, self.a).map(mask_label).collect()
    }
}

fn mask_label(mask: u64) -> RowLabel {
    RowLabel::Subset(mask_elements(mask))
}

pub(crate) fn mask_elements(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect()
}

/// `t`-subsets of `[m]` as bitmasks (bit `i` = element `i+1`), in
/// lexicographic order of their sorted element lists.
pub(crate) fn subsets_lex(m: usize, t: usize) -> impl Iterator<Item = u64> {
    let mut idx: Option<Vec<usize>> = (t <= m).then(|| (0..t).collect());
    std::iter::from_fn(move || {
        let cur = idx.as_mut()?;
        let mask = cur.iter().fold(0u64, |acc, &i| acc | 1 << i);
        // Advance to the next combination.
        let mut i = t;
        loop {
            if i == 0 {
                idx = None;
                break;
            }
            i -= 1;
            if cur[i] < m - t + i {
                cur[i] += 1;
                for j in i + 1..t {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
        Some(mask)
    })
}

/// Bipartite builder without the `a + b < m` restriction (MN with
/// `t = K − 1` needs `a + b = m`).
fn bipartite_grid(m: usize, a: usize, b: usize) -> Result<PdaGrid> {
    let rows: Vec<u64> = subsets_lex(m, b).collect();
    let cols: Vec<u64> = subsets_lex(m, a).collect();
    check_size(rows.len(), cols.len())?;
    let mut ids: HashMap<u64, u32> = HashMap::new();
    let mut cells = Vec::with_capacity(rows.len() * cols.len());
    for &row in &rows {
        for &col in &cols {
            if row & col != 0 {
                cells.push(Cell::Star);
            } else {
                let next = ids.len() as u32 + 1;
                cells.push(Cell::Symbol(*ids.entry(row | col).or_insert(next)));
            }
        }
    }
    PdaGrid::new(rows.len(), cols.len(), cells)
}

/// Bipartite graph PDA (`h` is ignored; see [`grouping_pda`]).
pub fn bipartite_pda(spec: BipartiteSpec) -> Result<PdaGrid> {
    bipartite_grid(spec.m, spec.a, spec.b)
}

/// The MN PDA for `K` users and cache parameter `t`: bipartite with
/// `m = K`, `a = 1`, `b = t`.
pub fn mn_pda(users: usize, t: usize) -> Result<PdaGrid> {
    if t < 1 || t >= users {
        return Err(Error::params(format!(
            "MN PDA needs 1 ≤ t < K, got K={users}, t={t}"
        )));
    }
    if users > 63 {
        return Err(Error::Overflow(format!("K = {users} exceeds 63")));
    }
    bipartite_grid(users, 1, t)
}

/// `h` copies of the bipartite PDA side by side, copy `i` with its symbols
/// shifted by `i·C(m, a+b)` so the copies share no symbol.
pub fn grouping_pda(spec: BipartiteSpec) -> Result<PdaGrid> {
    let base = bipartite_pda(spec)?;
    if spec.h == 1 {
        return Ok(base);
    }
    check_size(base.rows(), base.cols().saturating_mul(spec.h))?;
    let shift = binom_usize(spec.m, spec.a + spec.b)? as u32;
    let copies: Vec<PdaGrid> = (0..spec.h as u32)
        .map(|i| {
            let cells = base
                .cells()
                .iter()
                .map(|c| match *c {
                    Cell::Star => Cell::Star,
                    Cell::Symbol(s) => Cell::Symbol(s + i * shift),
                })
                .collect();
            PdaGrid::new(base.rows(), base.cols(), cells)
        })
        .collect::<Result<_>>()?;
    PdaGrid::hconcat(&copies)
}
