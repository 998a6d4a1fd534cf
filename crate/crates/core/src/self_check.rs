//! Closed forms checked against direct enumeration over parameter grids.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;

use crate::bound::{eval_ordering, partition_ordering};
use crate::closed_forms::{
    big_binomial, binomial_layer_sum, partition_bound_even, phi, residue_class_size,
    tail_fiber_intersection,
};
use crate::construct::{partition_pda, PartitionSpec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

struct Tally {
    name: &'static str,
    cases: usize,
    failures: Vec<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally {
            name,
            cases: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn done(self) -> CheckResult {
        CheckResult {
            name: self.name,
            cases: self.cases,
            failures: self.failures,
        }
    }
}

/// Calls `f` on every vector of `[1, base]^len`.
fn for_each_vector(base: usize, len: usize, mut f: impl FnMut(&[usize])) {
    let mut v = vec![1; len];
    loop {
        f(&v);
        let mut i = 0;
        loop {
            if i == len {
                return;
            }
            if v[i] < base {
                v[i] += 1;
                break;
            }
            v[i] = 1;
            i += 1;
        }
    }
}

fn phi_below_one() -> CheckResult {
    let mut t = Tally::new("phi(q,z) < 1 and non-increasing in z");
    for q in 3..=64 {
        let mut prev: Option<BigRational> = None;
        for z in 2..=q {
            let v = phi(q, z).expect("valid range");
            t.check(v < BigRational::one(), || format!("phi({q},{z}) = {v}"));
            if let Some(p) = &prev {
                t.check(v <= *p, || format!("phi({q},{z}) > phi({q},{})", z - 1));
            }
            prev = Some(v);
        }
    }
    t.done()
}

fn residue_classes() -> CheckResult {
    let mut t = Tally::new("residue class sizes match enumeration");
    for q in 2..=6 {
        for m in 2..=8 {
            let mut buckets = vec![0u64; q + 1];
            for_each_vector(q - 1, m - 1, |v| {
                let s = v.iter().sum::<usize>() % q;
                buckets[if s == 0 { q } else { s }] += 1;
            });
            for v in 1..=q {
                let got = residue_class_size(q, m, v).expect("valid range");
                t.check(got == BigUint::from(buckets[v]), || {
                    format!("q={q} m={m} v={v}: formula {got}, count {}", buckets[v])
                });
            }
        }
    }
    t.done()
}

fn tail_fibers() -> CheckResult {
    let mut t = Tally::new("tail fiber intersections match enumeration");
    for q in 2..=5 {
        for m in 2..=4 {
            for mask in 1u32..(1 << q) {
                let residues: Vec<usize> = (1..=q).filter(|v| mask >> (v - 1) & 1 == 1).collect();
                if residues.len() >= q {
                    continue;
                }
                for_each_vector(q - 1, m - 1, |tail| {
                    let s: usize = tail.iter().sum();
                    let count = (1..q)
                        .filter(|i| {
                            let c = (i + s) % q;
                            !residues.contains(&if c == 0 { q } else { c })
                        })
                        .count();
                    let got = tail_fiber_intersection(q, &residues, tail).expect("valid input");
                    t.check(got == count, || {
                        format!("q={q} residues={residues:?} tail={tail:?}: {got} vs {count}")
                    });
                });
            }
        }
    }
    t.done()
}

fn geometric() -> CheckResult {
    let mut t = Tally::new("geometric sum equals (q-1)q^m - (q-1)^(m+1)");
    for q in 2usize..=10 {
        for m in 1..=12 {
            let direct: BigUint = (1..=m)
                .map(|u| num_traits::pow(BigUint::from(q - 1), u) * num_traits::pow(BigUint::from(q), m - u))
                .sum();
            let closed = BigUint::from(q - 1) * num_traits::pow(BigUint::from(q), m)
                - num_traits::pow(BigUint::from(q - 1), m + 1);
            t.check(direct == closed, || format!("q={q} m={m}"));
        }
    }
    t.done()
}

fn binomial_layers() -> CheckResult {
    let mut t = Tally::new("binomial layer sum equals C(m, a+b)");
    for m in 3..=16 {
        for a in 1..m {
            for b in 1..m - a {
                let got = binomial_layer_sum(m, a, b).expect("valid range");
                t.check(got == big_binomial(m, a + b), || format!("m={m} a={a} b={b}"));
            }
        }
    }
    t.done()
}

fn partition_values() -> CheckResult {
    let mut t = Tally::new("partition closed form equals ordered evaluation");
    let on_grid = |q: usize, m: usize| -> u64 {
        let grid = partition_pda(PartitionSpec::new(q, m).expect("q ≥ 2")).expect("small grid");
        let order = partition_ordering(q, m).expect("q ≥ 2");
        eval_ordering(&grid.star_pattern(), &order).expect("valid ordering").value
    };
    for q in 2..=5 {
        for m in [2, 4] {
            let closed = partition_bound_even(q, m).expect("even m");
            let eval = on_grid(q, m);
            t.check(closed == BigUint::from(eval), || format!("q={q} m={m}: {closed} vs {eval}"));
        }
    }
    for m in 2..=8 {
        let eval = on_grid(2, m);
        t.check(eval == 1 << m, || format!("q=2 m={m}: {eval} vs {}", 1u64 << m));
    }
    t.done()
}

/// Runs every check. Each enumerates its full parameter grid.
pub fn run_all() -> Vec<CheckResult> {
    vec![
        phi_below_one(),
        residue_classes(),
        tail_fibers(),
        geometric(),
        binomial_layers(),
        partition_values(),
    ]
}
