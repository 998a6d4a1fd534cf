//! Closed-form counts for the partition and bipartite families.
//!
//! Everything here is exact (`BigUint`/`BigRational`); floats appear only in
//! the display columns of [`RatioReport::csv_row`].

use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::bound::{exact_bound, ExactLimits};
use crate::construct::{partition_pda, PartitionSpec};
use crate::error::{Error, Result};

fn big(x: usize) -> BigUint {
    BigUint::from(x)
}

fn pow(base: usize, exp: usize) -> BigUint {
    num_traits::pow(big(base), exp)
}

pub(crate) fn big_binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    num_integer::binomial(big(n), big(k))
}

fn check_q(q: usize) -> Result<()> {
    if q < 2 {
        return Err(Error::params(format!("q must be at least 2, got {q}")));
    }
    Ok(())
}

/// `(q−z)·q^{z−1} / (q−1)^z`.
pub fn phi(q: usize, z: usize) -> Result<BigRational> {
    check_q(q)?;
    if z == 0 || z > q {
        return Err(Error::params(format!("z must lie in [1,{q}], got {z}")));
    }
    let num = BigInt::from((q - z) as u64) * BigInt::from(pow(q, z - 1));
    let den = BigInt::from(pow(q - 1, z));
    Ok(BigRational::new(num, den))
}

/// Number of `(f_2, …, f_m) ∈ [q−1]^{m−1}` whose sum is congruent to `v`
/// modulo `q`.
///
/// Counting with additive characters gives
/// `((q−1)^{m−1} + (−1)^{m−1}·(q·[v ≡ 0] − 1)) / q`: every non-zero
/// residue gets the same count and `v = q` is the odd one out.
pub fn residue_class_size(q: usize, m: usize, v: usize) -> Result<BigUint> {
    check_q(q)?;
    if m == 0 {
        return Err(Error::params("m must be at least 1"));
    }
    if v == 0 || v > q {
        return Err(Error::params(format!("residue must lie in [1,{q}], got {v}")));
    }
    let base = BigInt::from(pow(q - 1, m - 1));
    let delta = if v == q { q as i64 - 1 } else { -1 };
    let sign = if (m - 1).is_multiple_of(2) { 1 } else { -1 };
    let num = base + BigInt::from(sign * delta);
    let (quot, rem) = num_integer::Integer::div_rem(&num, &BigInt::from(q as u64));
    debug_assert!(rem.is_zero());
    Ok(quot.to_biguint().expect("class sizes are non-negative"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionCounts {
    pub q: usize,
    pub m: usize,
    /// `c_sizes[v−1] = |C_v|`.
    pub c_sizes: Vec<BigUint>,
    /// `(q−1)^m`, the number of rows avoiding `q` in every free coordinate.
    pub e_size: BigUint,
}

pub fn partition_counts(q: usize, m: usize) -> Result<PartitionCounts> {
    let c_sizes = (1..=q)
        .map(|v| residue_class_size(q, m, v))
        .collect::<Result<Vec<_>>>()?;
    Ok(PartitionCounts {
        q,
        m,
        c_sizes,
        e_size: pow(q - 1, m),
    })
}

/// `|A_{m+1,i_1..i_l} ∩ F_{f_2..f_m}|`, where `F_{f_2..f_m}` holds the rows
/// `(i, f_2, …, f_m, ⟨i + Σ f_j⟩_q)` for `i ∈ [q−1]`: `q − l` when the tail
/// sum is one of the residues, `q − l − 1` otherwise.
pub fn tail_fiber_intersection(q: usize, residues: &[usize], tail: &[usize]) -> Result<usize> {
    check_q(q)?;
    let l = residues.len();
    if l == 0 || l >= q {
        return Err(Error::params(format!("need 1 ≤ l ≤ {}, got {l}", q - 1)));
    }
    let mut seen = vec![false; q + 1];
    for &r in residues {
        if r == 0 || r > q {
            return Err(Error::params(format!("residue {r} outside [1,{q}]")));
        }
        if std::mem::replace(&mut seen[r], true) {
            return Err(Error::params(format!("residue {r} repeated")));
        }
    }
    if let Some(&bad) = tail.iter().find(|&&f| f == 0 || f >= q) {
        return Err(Error::params(format!("tail entry {bad} outside [1,{}]", q - 1)));
    }
    let sum: usize = tail.iter().sum();
    let h = match sum % q {
        0 => q,
        r => r,
    };
    Ok(if seen[h] { q - l } else { q - l - 1 })
}

/// `Σ_{u=1}^{m} (q−1)^u q^{m−u}`, summed term by term and checked against
/// `(q−1)q^m − (q−1)^{m+1}`.
pub fn geometric_sum(q: usize, m: usize) -> Result<BigUint> {
    check_q(q)?;
    let direct: BigUint = (1..=m).map(|u| pow(q - 1, u) * pow(q, m - u)).sum();
    let closed = big(q - 1) * pow(q, m) - pow(q - 1, m + 1);
    assert_eq!(direct, closed, "geometric sum mismatch at q={q}, m={m}");
    Ok(direct)
}

/// `C(m−a, b) + Σ_{i≥0} C(a+i, a−1)·C(m−a−i−1, b)`, checked against
/// `C(m, a+b)`.
pub fn binomial_layer_sum(m: usize, a: usize, b: usize) -> Result<BigUint> {
    if a == 0 || b == 0 || a + b >= m {
        return Err(Error::params(format!(
            "need a, b ≥ 1 and a + b < m, got m={m}, a={a}, b={b}"
        )));
    }
    let mut total = big_binomial(m - a, b);
    for i in 0..m - a {
        total += big_binomial(a + i, a - 1) * big_binomial(m - a - i - 1, b);
    }
    assert_eq!(total, big_binomial(m, a + b), "layer identity fails at ({m},{a},{b})");
    Ok(total)
}

/// Order in which the checksum users `(m+1, v)` follow the prefix
/// `(1,q), …, (m,q)`: by `|C_v|` descending, ties by `v` ascending.
pub(crate) fn checksum_user_order(q: usize, m: usize) -> Result<Vec<usize>> {
    let counts = partition_counts(q, m)?;
    let mut vs: Vec<usize> = (1..=q).collect();
    vs.sort_by(|&x, &y| counts.c_sizes[y - 1].cmp(&counts.c_sizes[x - 1]).then(x.cmp(&y)));
    Ok(vs)
}

/// Value of the partition ordering on the partition placement, counted row
/// class by row class instead of on the grid.
///
/// A row lies in exactly as many running intersections as there are users
/// before the first one that caches it. Rows with `f_u = q` for some `u ≤ m`
/// are first cached by `(u, q)`; the remaining `(q−1)^m` rows by the
/// checksum user matching `f_{m+1}`.
pub fn partition_ordered_value(q: usize, m: usize) -> Result<BigUint> {
    PartitionSpec::new(q, m)?;
    let mut total = BigUint::zero();
    for u in 1..=m {
        total += big(u - 1) * pow(q - 1, u - 1) * pow(q, m - u);
    }
    for (j, v) in checksum_user_order(q, m)?.into_iter().enumerate() {
        // Rows in [q−1]^m whose coordinate sum is ≡ v: same count as the
        // residue classes one dimension up.
        total += big(m + j) * residue_class_size(q, m + 1, v)?;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PartitionBoundSource {
    ClosedForm,
    OrderedEvaluation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionBound {
    pub value: BigUint,
    pub source: PartitionBoundSource,
    /// `(q−1)q^m − (q−1)^{m+1}/2 + (q−1)/q` for odd `m`. Not an integer in
    /// general; reported for comparison only.
    pub printed_odd_form: Option<BigRational>,
}

/// `(q−1)q^m − (q−1)^{m+1}/2 + (q−1)/2`, valid for even `m`.
pub fn partition_bound_even(q: usize, m: usize) -> Result<BigUint> {
    check_q(q)?;
    if m == 0 || m % 2 == 1 {
        return Err(Error::params(format!("m must be even and positive, got {m}")));
    }
    let twice = big(2 * (q - 1)) * pow(q, m) + big(q - 1) - pow(q - 1, m + 1);
    Ok(twice / 2u32)
}

/// Lower bound on `S*` for the partition placement obtained from the
/// partition ordering. Even `m` uses the closed form (checked against the
/// row-class count); odd `m` uses the row-class count.
pub fn partition_bound(q: usize, m: usize) -> Result<PartitionBound> {
    check_q(q)?;
    let counted = partition_ordered_value(q, m)?;
    if m.is_multiple_of(2) {
        let closed = partition_bound_even(q, m)?;
        assert_eq!(closed, counted, "even-m closed form disagrees at q={q}, m={m}");
        return Ok(PartitionBound {
            value: closed,
            source: PartitionBoundSource::ClosedForm,
            printed_odd_form: None,
        });
    }
    let printed = BigRational::from_integer(BigInt::from(big(q - 1) * pow(q, m)))
        - BigRational::new(BigInt::from(pow(q - 1, m + 1)), BigInt::from(2))
        + BigRational::new(BigInt::from(q - 1), BigInt::from(q));
    Ok(PartitionBound {
        value: counted,
        source: PartitionBoundSource::OrderedEvaluation,
        printed_odd_form: Some(printed),
    })
}

/// `1 − ((q−1)/q)^m / 2 + 1/(2q^m)`.
pub fn partition_ratio_formula(q: usize, m: usize) -> Result<BigRational> {
    check_q(q)?;
    let qm = BigInt::from(pow(q, m));
    let frac = BigRational::new(BigInt::from(pow(q - 1, m)), qm.clone());
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    Ok(BigRational::one() - frac * half.clone() + BigRational::new(BigInt::one(), qm) * half)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatioReport {
    pub q: usize,
    pub m: usize,
    /// `(q−1)q^m`, the partition PDA's `S`.
    pub s_pda: BigUint,
    /// Value of the partition ordering.
    pub s_derived: BigUint,
    /// Exact `S*` of the partition placement, when it was computed.
    pub s_exact: Option<BigUint>,
    /// True when an exact value was requested but could not be certified.
    pub exact_unavailable: bool,
    /// `s_exact / s_derived`.
    pub mu: Option<BigRational>,
    pub formula_ratio: BigRational,
}

pub const RATIO_CSV_HEADER: &str = "q,m,s_pda,s_derived,s_exact,mu,formula_ratio";

fn ratio_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl RatioReport {
    pub fn csv_row(&self) -> String {
        let mut row = format!("{},{},{},{},", self.q, self.m, self.s_pda, self.s_derived);
        if let Some(s) = &self.s_exact {
            let _ = write!(row, "{s}");
        }
        row.push(',');
        if let Some(mu) = &self.mu {
            let _ = write!(row, "{:.6}", ratio_f64(mu));
        }
        let _ = write!(row, ",{:.6}", ratio_f64(&self.formula_ratio));
        row
    }
}

/// Assembles the partition figures for `(q, m)`. With `exact` set, the exact
/// engine runs on the generated placement; it is skipped (and flagged) when
/// `(m+1)q` exceeds the user cap or the grid is too large to build.
pub fn ratio_report(q: usize, m: usize, exact: Option<ExactLimits>) -> Result<RatioReport> {
    let spec = PartitionSpec::new(q, m)?;
    let s_pda = big(q - 1) * pow(q, m);
    let s_derived = partition_bound(q, m)?.value;
    let mut exact_unavailable = false;
    let s_exact = match exact {
        Some(limits) if spec.users() <= limits.max_users => match partition_pda(spec) {
            Ok(grid) => {
                let cert = exact_bound(&grid.star_pattern(), limits);
                exact_unavailable = !cert.exact;
                cert.exact.then(|| BigUint::from(cert.value))
            }
            Err(Error::Overflow(_)) => {
                exact_unavailable = true;
                None
            }
            Err(e) => return Err(e),
        },
        Some(_) => {
            exact_unavailable = true;
            None
        }
        None => None,
    };
    let mu = s_exact.as_ref().map(|s| {
        BigRational::new(BigInt::from(s.clone()), BigInt::from(s_derived.clone()))
    });
    Ok(RatioReport {
        q,
        m,
        s_pda,
        s_derived,
        s_exact,
        exact_unavailable,
        mu,
        formula_ratio: partition_ratio_formula(q, m)?,
    })
}
