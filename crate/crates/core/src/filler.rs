//! Symbol assignment for a given star pattern.
//!
//! Two non-star cells may share a symbol iff they sit in different rows and
//! columns and both cross cells are stars. Valid fillings are therefore the
//! proper colourings of the conflict graph, and the fewest symbols is its
//! chromatic number.

use crate::bitset::RowSet;
use crate::bound::{exact_bound, ExactLimits};
use crate::error::{Error, Result};
use crate::pda::{Cell, PdaGrid, StarPattern};

/// Largest conflict graph the filler will build.
pub const MAX_FILL_VERTICES: usize = 20_000;

#[derive(Clone, Debug)]
pub struct ConflictGraph {
    rows: usize,
    cols: usize,
    /// `(row, user)` of each vertex, row-major.
    cells: Vec<(usize, usize)>,
    adj: Vec<RowSet>,
}

impl ConflictGraph {
    pub fn build(pattern: &StarPattern) -> Result<Self> {
        let (f, k) = (pattern.rows(), pattern.users());
        let star = |j: usize, u: usize| !pattern.uncached(u).contains(j);
        let cells: Vec<(usize, usize)> = (0..f)
            .flat_map(|j| (0..k).map(move |u| (j, u)))
            .filter(|&(j, u)| !star(j, u))
            .collect();
        let n = cells.len();
        if n > MAX_FILL_VERTICES {
            return Err(Error::Overflow(format!(
                "{n} non-star cells exceeds the filler cap {MAX_FILL_VERTICES}"
            )));
        }
        let mut adj = vec![RowSet::empty(n); n];
        for a in 0..n {
            let (j1, k1) = cells[a];
            for b in a + 1..n {
                let (j2, k2) = cells[b];
                if j1 == j2 || k1 == k2 || !(star(j1, k2) && star(j2, k1)) {
                    adj[a].insert(b);
                    adj[b].insert(a);
                }
            }
        }
        Ok(ConflictGraph {
            rows: f,
            cols: k,
            cells,
            adj,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.cells.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.count()).sum::<usize>() / 2
    }

    /// `(row, user)` of vertex `v`, 0-based.
    pub fn cell(&self, v: usize) -> (usize, usize) {
        self.cells[v]
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(b)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count()
    }

    /// Checks that no edge joins two vertices of the same colour.
    pub fn is_proper(&self, colors: &[usize]) -> bool {
        (0..self.vertex_count()).all(|a| self.adj[a].iter().all(|b| colors[a] != colors[b]))
    }

    /// Greedy clique: from each seed, repeatedly add the highest-degree
    /// vertex adjacent to everything chosen so far.
    pub fn greedy_clique(&self) -> usize {
        let n = self.vertex_count();
        let mut best = 0;
        for seed in 0..n {
            let mut cand = self.adj[seed].clone();
            let mut size = 1;
            while let Some(v) = cand.iter().max_by_key(|&v| (self.degree(v), std::cmp::Reverse(v))) {
                size += 1;
                cand.intersect_with(&self.adj[v]);
            }
            best = best.max(size);
        }
        best
    }

    fn grid(&self, colors: &[usize]) -> PdaGrid {
        let mut cells = vec![Cell::Star; self.rows * self.cols];
        for (v, &(j, k)) in self.cells.iter().enumerate() {
            cells[j * self.cols + k] = Cell::Symbol(colors[v] as u32 + 1);
        }
        PdaGrid::new(self.rows, self.cols, cells)
            .expect("pattern dimensions are valid")
            .relabeled_by_first_appearance()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexOrder {
    RowMajor,
    /// Highest degree first, ties row-major.
    DegreeDesc,
}

fn greedy_colors(g: &ConflictGraph, order: VertexOrder) -> Vec<usize> {
    let n = g.vertex_count();
    let mut seq: Vec<usize> = (0..n).collect();
    if order == VertexOrder::DegreeDesc {
        seq.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    }
    let mut colors = vec![usize::MAX; n];
    let mut taken = Vec::new();
    for v in seq {
        taken.clear();
        taken.extend(g.adj[v].iter().map(|u| colors[u]).filter(|&c| c != usize::MAX));
        taken.sort_unstable();
        taken.dedup();
        let c = taken.iter().enumerate().find(|(i, &c)| *i != c).map_or(taken.len(), |(i, _)| i);
        colors[v] = c;
    }
    colors
}

/// Graphs up to this size also get a recursive-largest-first seed.
const RLF_MAX_VERTICES: usize = 3000;

/// Recursive largest first: each colour class starts from the uncoloured
/// vertex of highest remaining degree and grows by the candidate with the
/// most neighbours among vertices already excluded from the class.
fn rlf_colors(g: &ConflictGraph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut colors = vec![usize::MAX; n];
    let mut uncolored = RowSet::full(n);
    let mut color = 0;
    while let Some(start) = uncolored
        .iter()
        .max_by_key(|&v| (g.adj[v].intersection_count(&uncolored), std::cmp::Reverse(v)))
    {
        let mut candidates = uncolored.clone();
        let mut excluded = RowSet::empty(n);
        let mut pick = start;
        loop {
            colors[pick] = color;
            uncolored.remove(pick);
            candidates.remove(pick);
            excluded.union_with(&g.adj[pick]);
            candidates.difference_with(&g.adj[pick]);
            excluded.intersect_with(&uncolored);
            let Some(next) = candidates.iter().max_by_key(|&v| {
                (
                    g.adj[v].intersection_count(&excluded),
                    std::cmp::Reverse(g.adj[v].intersection_count(&candidates)),
                    std::cmp::Reverse(v),
                )
            }) else {
                break;
            };
            pick = next;
        }
        color += 1;
    }
    colors
}

fn color_count(colors: &[usize]) -> usize {
    colors.iter().copied().max().map_or(0, |m| m + 1)
}

/// Greedy first-fit filling. The result always passes verification.
pub fn fill_greedy(pattern: &StarPattern, order: VertexOrder) -> Result<PdaGrid> {
    let g = ConflictGraph::build(pattern)?;
    Ok(g.grid(&greedy_colors(&g, order)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FillLimits {
    pub node_budget: u64,
    pub exact: ExactLimits,
}

impl Default for FillLimits {
    fn default() -> Self {
        FillLimits {
            node_budget: 10_000_000,
            exact: ExactLimits::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FillOutcome {
    pub grid: PdaGrid,
    pub symbols: usize,
    /// `max(clique size, ordering bound)`.
    pub lower_bound: usize,
    /// True when `symbols` is proven minimal.
    pub optimal: bool,
    pub nodes: u64,
}

struct Dsatur<'a> {
    g: &'a ConflictGraph,
    colors: Vec<usize>,
    /// `conflicts[v][c]`: coloured neighbours of `v` with colour `c`.
    conflicts: Vec<Vec<u32>>,
    saturation: Vec<usize>,
    best: Vec<usize>,
    best_count: usize,
    lower: usize,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl Dsatur<'_> {
    fn pick(&self) -> Option<usize> {
        (0..self.g.vertex_count())
            .filter(|&v| self.colors[v] == usize::MAX)
            .max_by_key(|&v| (self.saturation[v], self.g.degree(v), std::cmp::Reverse(v)))
    }

    fn assign(&mut self, v: usize, c: usize, delta: i32) {
        for u in self.g.adj[v].iter() {
            let slot = &mut self.conflicts[u][c];
            if delta > 0 {
                *slot += 1;
                if *slot == 1 {
                    self.saturation[u] += 1;
                }
            } else {
                *slot -= 1;
                if *slot == 0 {
                    self.saturation[u] -= 1;
                }
            }
        }
    }

    fn search(&mut self, used: usize) {
        if self.best_count <= self.lower || self.exhausted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        let Some(v) = self.pick() else {
            self.best = self.colors.clone();
            self.best_count = used;
            return;
        };
        let limit = (used + 1).min(self.best_count - 1);
        for c in 0..limit {
            if self.conflicts[v][c] > 0 {
                continue;
            }
            self.colors[v] = c;
            self.assign(v, c, 1);
            self.search(used.max(c + 1));
            self.assign(v, c, -1);
            self.colors[v] = usize::MAX;
            if self.best_count <= self.lower || self.exhausted {
                return;
            }
        }
    }
}

/// Fewest-symbol filling by DSATUR branch and bound, seeded with the best
/// of the greedy and recursive-largest-first fillings. The lower bound combines a greedy clique with the ordering
/// bound of the pattern (every counted cell needs its own symbol). When the
/// node budget runs out the best filling found is returned with
/// `optimal == false`.
pub fn fill_exact(pattern: &StarPattern, limits: FillLimits) -> Result<FillOutcome> {
    let g = ConflictGraph::build(pattern)?;
    let n = g.vertex_count();
    let ordering = exact_bound(pattern, limits.exact).value as usize;
    let lower = g.greedy_clique().max(ordering).min(n);

    let a = greedy_colors(&g, VertexOrder::DegreeDesc);
    let b = greedy_colors(&g, VertexOrder::RowMajor);
    let mut seed = if color_count(&b) < color_count(&a) { b } else { a };
    if n <= RLF_MAX_VERTICES {
        let c = rlf_colors(&g);
        if color_count(&c) < color_count(&seed) {
            seed = c;
        }
    }
    let seed_count = color_count(&seed);

    let mut s = Dsatur {
        g: &g,
        colors: vec![usize::MAX; n],
        conflicts: vec![vec![0; seed_count.max(1)]; n],
        saturation: vec![0; n],
        best: seed,
        best_count: seed_count,
        lower,
        nodes: 0,
        budget: limits.node_budget,
        exhausted: false,
    };
    s.search(0);
    let optimal = s.best_count <= lower || !s.exhausted;
    Ok(FillOutcome {
        grid: g.grid(&s.best),
        symbols: s.best_count,
        lower_bound: lower,
        optimal,
        nodes: s.nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four_users() -> StarPattern {
        StarPattern::from_one_based(6, &[&[4, 5, 6], &[2, 3, 6], &[1, 3, 5], &[1, 2, 4]]).unwrap()
    }

    #[test]
    fn vertex_counts() {
        assert_eq!(ConflictGraph::build(&four_users()).unwrap().vertex_count(), 12);
        let empty = StarPattern::new(3, vec![vec![]; 2]).unwrap();
        let g = ConflictGraph::build(&empty).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (0, 0));
    }

    #[test]
    fn greedy_fillings_are_valid() {
        for order in [VertexOrder::RowMajor, VertexOrder::DegreeDesc] {
            let grid = fill_greedy(&four_users(), order).unwrap();
            assert!(grid.verify().valid());
            let s = grid.params().unwrap().symbols;
            assert!((4..=6).contains(&s));
        }
    }

    #[test]
    fn exact_four_users_needs_four() {
        let out = fill_exact(&four_users(), FillLimits::default()).unwrap();
        assert_eq!(out.symbols, 4);
        assert!(out.optimal);
        assert!(out.grid.verify().valid());
        assert_eq!(out.grid.star_pattern(), four_users());
    }

    #[test]
    fn rlf_colouring_is_proper() {
        let g = ConflictGraph::build(&four_users()).unwrap();
        let colors = rlf_colors(&g);
        assert!(g.is_proper(&colors));
        assert_eq!(color_count(&colors), 4);
    }

    #[test]
    fn disjoint_pair_shares_one_symbol() {
        let p = StarPattern::from_one_based(2, &[&[1], &[2]]).unwrap();
        let out = fill_exact(&p, FillLimits::default()).unwrap();
        assert_eq!(out.symbols, 1);
    }

    #[test]
    fn all_star_pattern_needs_nothing() {
        let p = StarPattern::new(2, vec![vec![]; 3]).unwrap();
        let out = fill_exact(&p, FillLimits::default()).unwrap();
        assert_eq!(out.symbols, 0);
        assert_eq!(fill_greedy(&p, VertexOrder::RowMajor).unwrap().distinct_symbols(), 0);
    }
}
