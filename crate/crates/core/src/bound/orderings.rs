use crate::closed_forms::checksum_user_order;
use crate::construct::{binomial, subsets_lex, BipartiteSpec, PartitionSpec};
use crate::error::{Error, Result};

use super::UserOrdering;

/// Ordering for the partition placement: `(1,q), …, (m,q)`, then the
/// checksum users `(m+1, v)` by residue class size descending, then every
/// other user in column order.
pub fn partition_ordering(q: usize, m: usize) -> Result<UserOrdering> {
    let spec = PartitionSpec::new(q, m)?;
    let mut order: Vec<usize> = (1..=m).map(|u| spec.user_index(u, q)).collect();
    order.extend(
        checksum_user_order(q, m)?
            .into_iter()
            .map(|v| spec.user_index(m + 1, v)),
    );
    let mut placed = vec![false; spec.users()];
    for &u in &order {
        placed[u] = true;
    }
    order.extend((0..spec.users()).filter(|&u| !placed[u]));
    Ok(UserOrdering::from_vec_unchecked(order))
}

/// Ordering for the bipartite placement: the `a`-subsets grouped by their
/// largest element (ascending); inside a group, descending lexicographic
/// order. Indices refer to the lexicographic column order.
pub fn bipartite_ordering(m: usize, a: usize, b: usize) -> Result<UserOrdering> {
    BipartiteSpec::new(m, a, b, 1)?;
    let mut cols: Vec<(usize, u64)> = subsets_lex(m, a).enumerate().collect();
    // Lexicographic order on element lists, reversed within each group.
    cols.sort_by(|(i, x), (j, y)| {
        let top = |s: u64| 63 - s.leading_zeros();
        top(*x).cmp(&top(*y)).then(j.cmp(i))
    });
    Ok(UserOrdering::from_vec_unchecked(
        cols.into_iter().map(|(i, _)| i).collect(),
    ))
}

/// Ordering for the `h`-fold grouping placement: the bipartite ordering with
/// each user followed immediately by its copies.
pub fn grouping_ordering(m: usize, a: usize, b: usize, h: usize) -> Result<UserOrdering> {
    BipartiteSpec::new(m, a, b, h)?;
    let base = bipartite_ordering(m, a, b)?;
    let n = binomial(m as u64, a as u64)
        .and_then(|v| usize::try_from(v).ok())
        .ok_or_else(|| Error::Overflow(format!("C({m},{a})")))?;
    let order = base
        .users()
        .iter()
        .flat_map(|&u| (0..h).map(move |c| c * n + u))
        .collect();
    Ok(UserOrdering::from_vec_unchecked(order))
}
