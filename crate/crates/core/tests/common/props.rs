//! Strategies and property checks, run by both the property tests and the
//! acceptance binary.

use std::collections::BTreeSet;

use super::*;
use num_bigint::BigUint;
use num_rational::BigRational;
use pda_workbench::bound::{
    brute_force_bound, eval_ordering, exact_bound, greedy_bound, union_complement_sum,
    ExactLimits,
};
use pda_workbench::closed_forms::{phi, residue_class_size, tail_fiber_intersection};
use pda_workbench::construct::{
    bipartite_pda, grouping_pda, mn_pda, partition_pda, BipartiteSpec, PartitionSpec,
};
use pda_workbench::filler::{fill_greedy, VertexOrder};
use pda_workbench::pda::{verify_pda, verify_pda_pairwise};
use pda_workbench::{Cell, PdaGrid, StarPattern, UserOrdering};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestCaseError};

pub fn config() -> Config {
    Config {
        cases: 128,
        rng_seed: RngSeed::Fixed(0x5eed_fa11),
        failure_persistence: None,
        ..Config::default()
    }
}

fn grid_of(rows: usize, cols: usize, values: &[u32]) -> PdaGrid {
    let cells = values
        .iter()
        .map(|&v| if v == 0 { Cell::Star } else { Cell::Symbol(v) })
        .collect();
    PdaGrid::new(rows, cols, cells).unwrap()
}

pub fn random_grid() -> impl Strategy<Value = PdaGrid> {
    (1usize..=5, 1usize..=5).prop_flat_map(|(f, k)| {
        prop::collection::vec(0u32..=4, f * k).prop_map(move |v| grid_of(f, k, &v))
    })
}

fn seeds() -> Vec<PdaGrid> {
    vec![
        parse_body(SMALL_6_4),
        parse_body(SIX_USERS_11),
        parse_body(MN_4_6),
        parse_body(SIX_8_5_5),
        partition_pda(PartitionSpec::new(2, 2).unwrap()).unwrap(),
        bipartite_pda(BipartiteSpec::new(5, 2, 1, 1).unwrap()).unwrap(),
    ]
}

/// A valid PDA with one cell overwritten (possibly by the same value).
pub fn perturbed_grid() -> impl Strategy<Value = PdaGrid> {
    (0..seeds().len(), any::<prop::sample::Index>(), 0u32..=12).prop_map(|(i, at, v)| {
        let g = &seeds()[i];
        let mut cells = g.cells().to_vec();
        let s = g.max_symbol();
        let at = at.index(cells.len());
        cells[at] = if v == 0 { Cell::Star } else { Cell::Symbol(1 + v % s) };
        PdaGrid::new(g.rows(), g.cols(), cells).unwrap()
    })
}

/// `K` users, `F` rows, arbitrary uncached sets.
pub fn random_pattern(max_users: usize) -> impl Strategy<Value = StarPattern> {
    (1usize..=max_users, 1usize..=6).prop_flat_map(|(k, f)| {
        prop::collection::vec(prop::collection::btree_set(0..f, 0..=f), k)
            .prop_map(move |sets| StarPattern::new(f, sets.into_iter().map(|s| s.into_iter().collect()).collect()).unwrap())
    })
}

/// Every user has exactly `F − Z` uncached rows.
pub fn uniform_pattern() -> impl Strategy<Value = StarPattern> {
    (1usize..=6, 1usize..=6)
        .prop_flat_map(|(k, f)| (Just(k), Just(f), 0..=f))
        .prop_flat_map(|(k, f, z)| {
            let rows: Vec<usize> = (0..f).collect();
            prop::collection::vec(Just(rows).prop_shuffle(), k).prop_map(move |perms| {
                let sets = perms.into_iter().map(|p| p[..f - z].to_vec()).collect();
                StarPattern::new(f, sets).unwrap()
            })
        })
}

pub fn family_grid() -> impl Strategy<Value = PdaGrid> {
    prop_oneof![
        (2usize..=4, 1usize..=2).prop_map(|(q, m)| partition_pda(PartitionSpec::new(q, m).unwrap()).unwrap()),
        (3usize..=6, 1usize..=4, 1usize..=4).prop_filter_map("a+b<m", |(m, a, b)| {
            BipartiteSpec::new(m, a, b, 1).ok().map(|s| bipartite_pda(s).unwrap())
        }),
        (3usize..=5, 1usize..=2, 1usize..=2, 1usize..=3).prop_filter_map("a+b<m", |(m, a, b, h)| {
            BipartiteSpec::new(m, a, b, h).ok().map(|s| grouping_pda(s).unwrap())
        }),
        (2usize..=7).prop_flat_map(|k| (Just(k), 1..k)).prop_map(|(k, t)| mn_pda(k, t).unwrap()),
    ]
}


pub fn checkers_agree(g: PdaGrid) -> Result<(), TestCaseError> {
    let want = oracle_is_pda(&raw(&g));
    prop_assert_eq!(verify_pda(&g).valid(), want);
    prop_assert_eq!(verify_pda(&g), verify_pda_pairwise(&g));
    Ok(())
}

pub fn exact_matches_permutations(p: StarPattern) -> Result<(), TestCaseError> {
    let want = oracle_max_over_orderings(&uncached_sets(&p));
    let exact = exact_bound(&p, ExactLimits::default());
    prop_assert!(exact.exact);
    prop_assert_eq!(exact.value, want);
    prop_assert_eq!(eval_ordering(&p, &exact.witness).unwrap().value, want);
    prop_assert_eq!(brute_force_bound(&p).unwrap().value, want);
    prop_assert!(greedy_bound(&p).value <= want);
    Ok(())
}

pub fn pattern_and_ordering() -> impl Strategy<Value = (StarPattern, Vec<usize>)> {
    random_pattern(7).prop_flat_map(|p| {
        let users: Vec<usize> = (0..p.users()).collect();
        (Just(p), Just(users).prop_shuffle())
    })
}

pub fn complement_identity((p, order): (StarPattern, Vec<usize>)) -> Result<(), TestCaseError> {
    let sums = union_complement_sum(&p, &UserOrdering::new(order.clone(), p.users()).unwrap()).unwrap();
    let sets = uncached_sets(&p);
    let all: BTreeSet<usize> = (0..p.rows()).collect();
    let mut union = BTreeSet::new();
    let mut union_sum = 0u64;
    for &u in &order {
        union.extend(all.difference(&sets[u]).copied());
        union_sum += union.len() as u64;
    }
    prop_assert_eq!(sums.union_sum, union_sum);
    prop_assert_eq!(sums.intersection_sum, nested_sum(&sets, &order));
    prop_assert_eq!(union_sum + sums.intersection_sum, (p.users() * p.rows()) as u64);
    Ok(())
}

pub fn phi_args() -> impl Strategy<Value = (usize, usize)> {
    (3usize..=64).prop_flat_map(|q| (Just(q), 2..=q))
}

pub fn phi_below_one((q, z): (usize, usize)) -> Result<(), TestCaseError> {
    let v = phi(q, z).unwrap();
    let num = BigUint::from(q - z) * BigUint::from(q).pow(z as u32 - 1);
    let den = BigUint::from(q - 1).pow(z as u32);
    prop_assert_eq!(&v, &BigRational::new(num.clone().into(), den.clone().into()));
    prop_assert!(num < den);
    Ok(())
}

pub fn residue_args() -> impl Strategy<Value = (usize, usize, usize)> {
    (2usize..=6, 2usize..=8).prop_flat_map(|(q, m)| (Just(q), Just(m), 1..=q))
}

pub fn residue_buckets((q, m, v): (usize, usize, usize)) -> Result<(), TestCaseError> {
    let mut tail = vec![1usize; m - 1];
    let mut count = 0u64;
    'outer: loop {
        let s = tail.iter().sum::<usize>() % q;
        if (if s == 0 { q } else { s }) == v {
            count += 1;
        }
        for t in tail.iter_mut() {
            if *t < q - 1 {
                *t += 1;
                continue 'outer;
            }
            *t = 1;
        }
        break;
    }
    prop_assert_eq!(residue_class_size(q, m, v).unwrap(), BigUint::from(count));
    Ok(())
}

pub fn fiber_args() -> impl Strategy<Value = (usize, usize, Vec<usize>, Vec<usize>)> {
    (2usize..=5, 2usize..=4).prop_flat_map(|(q, m)| {
        (
            Just(q),
            Just(m),
            prop::sample::subsequence((1..=q).collect::<Vec<_>>(), 1..q),
            prop::collection::vec(1..q, m - 1),
        )
    })
}

/// Counts the fiber directly on the generated partition grid.
pub fn tail_fibers(
    (q, m, residues, tail): (usize, usize, Vec<usize>, Vec<usize>),
) -> Result<(), TestCaseError> {
    let spec = PartitionSpec::new(q, m).unwrap();
    let p = partition_pda(spec).unwrap().star_pattern();
    let users: Vec<usize> = residues.iter().map(|&i| spec.user_index(m + 1, i)).collect();
    let count = (0..spec.rows().unwrap())
        .filter(|&r| {
            let f = spec.row_vector(r);
            (f[0] as usize) < q
                && f[1..m].iter().map(|&x| x as usize).eq(tail.iter().copied())
                && users.iter().all(|&u| p.uncached(u).contains(r))
        })
        .count();
    prop_assert_eq!(tail_fiber_intersection(q, &residues, &tail).unwrap(), count);
    Ok(())
}

pub fn sound_on_family(g: PdaGrid) -> Result<(), TestCaseError> {
    prop_assert!(g.verify().valid());
    let cert = exact_bound(&g.star_pattern(), ExactLimits::default());
    prop_assert!(cert.value <= g.distinct_symbols() as u64);
    Ok(())
}

pub fn sound_on_filling(p: StarPattern) -> Result<(), TestCaseError> {
    let cert = exact_bound(&p, ExactLimits::default());
    for order in [VertexOrder::RowMajor, VertexOrder::DegreeDesc] {
        let g = fill_greedy(&p, order).unwrap();
        prop_assert!(g.verify().valid());
        prop_assert_eq!(g.star_pattern(), p.clone());
        prop_assert!(cert.value <= g.distinct_symbols() as u64);
    }
    Ok(())
}
