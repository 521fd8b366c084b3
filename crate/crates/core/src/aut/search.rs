//! Automorphism-group search for small graphs by individualization and
//! refinement.
//!
//! The search maintains an ordered partition of the vertices, refines it to
//! equitability (every vertex in a cell has the same number of neighbors in
//! every cell), and branches on the first smallest non-singleton cell. The
//! first leaf reached fixes a reference ordering; every other leaf proposes
//! the permutation aligning it with the reference, which is checked against
//! the adjacency matrix directly. Two standard prunings keep the tree
//! small — subtrees whose refined cell-size sequence deviates from the
//! leftmost path are dead, and sibling branches inside the orbit of an
//! already-explored candidate are redundant — and exploration of a
//! non-leftmost branch stops as soon as it produces one automorphism, since
//! a single coset representative suffices. The discovered generators are
//! layered by the deepest base point they fix, so the group order is the
//! product of the base-point orbit sizes.

use crate::error::{Error, Result};
use crate::graph::SympGraph;
use std::collections::HashSet;
use std::time::Instant;

/// Searching is exponential in the worst case; keep it to small graphs.
const MAX_SEARCH_VERTICES: usize = 100;

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub order: u64,
    pub generators: Vec<Vec<u32>>,
    pub base: Vec<u32>,
    pub orbit_sizes: Vec<u64>,
}

type Partition = Vec<Vec<u32>>;

enum Explored {
    /// Nothing of note below; keep scanning siblings.
    Quiet,
    /// The subtree produced an automorphism.
    FoundAuto,
}

struct Searcher<'a> {
    n: usize,
    adj: &'a [Vec<u64>],
    base: Vec<u32>,
    zeta: Option<Vec<u32>>,
    /// (level, permutation): level is the first base position the
    /// permutation moves.
    gens: Vec<(usize, Vec<u32>)>,
    /// Cell-size sequence of the refined partition at each depth of the
    /// leftmost path.
    path_shape: Vec<Vec<usize>>,
    deadline: Option<Instant>,
}

impl<'a> Searcher<'a> {
    fn adjacent(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize][v as usize / 64] >> (v % 64) & 1 == 1
    }

    fn is_automorphism(&self, p: &[u32]) -> bool {
        for u in 0..self.n as u32 {
            for v in u + 1..self.n as u32 {
                if self.adjacent(u, v) != self.adjacent(p[u as usize], p[v as usize]) {
                    return false;
                }
            }
        }
        true
    }

    /// Refines to the coarsest equitable partition reachable by counting
    /// neighbors: the first cell (in order) that some cell splits is
    /// replaced by its fragments, ordered by neighbor count ascending, and
    /// the scan restarts until no cell splits.
    fn refine(&self, part: &mut Partition) {
        loop {
            let mut split: Option<(usize, Vec<Vec<u32>>)> = None;
            'scan: for ci in 0..part.len() {
                if part[ci].len() <= 1 {
                    continue;
                }
                for dj in 0..part.len() {
                    let counts: Vec<usize> = part[ci]
                        .iter()
                        .map(|&v| {
                            part[dj].iter().filter(|&&w| self.adjacent(v, w)).count()
                        })
                        .collect();
                    if counts.windows(2).any(|w| w[0] != w[1]) {
                        let mut tagged: Vec<(usize, u32)> =
                            counts.into_iter().zip(part[ci].iter().copied()).collect();
                        tagged.sort_by_key(|&(c, _)| c);
                        let mut fragments: Vec<Vec<u32>> = Vec::new();
                        let mut prev = None;
                        for (c, v) in tagged {
                            if prev != Some(c) {
                                fragments.push(Vec::new());
                                prev = Some(c);
                            }
                            fragments.last_mut().unwrap().push(v);
                        }
                        split = Some((ci, fragments));
                        break 'scan;
                    }
                }
            }
            match split {
                Some((ci, fragments)) => {
                    part.splice(ci..ci + 1, fragments);
                }
                None => break,
            }
        }
    }

    /// Index of the first smallest non-singleton cell, if any.
    fn target_cell(part: &Partition) -> Option<usize> {
        let min = part.iter().map(Vec::len).filter(|&l| l > 1).min()?;
        part.iter().position(|c| c.len() == min)
    }

    fn individualize(part: &Partition, target: usize, v: u32) -> Partition {
        let mut out = Vec::with_capacity(part.len() + 1);
        for (i, cell) in part.iter().enumerate() {
            if i == target {
                out.push(vec![v]);
                out.push(cell.iter().copied().filter(|&w| w != v).collect());
            } else {
                out.push(cell.clone());
            }
        }
        out
    }

    fn shape(part: &Partition) -> Vec<usize> {
        part.iter().map(Vec::len).collect()
    }

    /// Orbit of `seeds` under the generators whose level is at least
    /// `depth` (those fixing the first `depth` base points).
    fn orbit_of(&self, seeds: &[u32], depth: usize) -> HashSet<u32> {
        let gens: Vec<&Vec<u32>> = self
            .gens
            .iter()
            .filter(|(lvl, _)| *lvl >= depth)
            .map(|(_, p)| p)
            .collect();
        let mut orbit: HashSet<u32> = seeds.iter().copied().collect();
        let mut queue: Vec<u32> = seeds.to_vec();
        while let Some(v) = queue.pop() {
            for p in &gens {
                let w = p[v as usize];
                if orbit.insert(w) {
                    queue.push(w);
                }
            }
        }
        orbit
    }

    fn check_deadline(&self) -> Result<()> {
        if let Some(deadline) = self.deadline {
            if Instant::now() > deadline {
                return Err(Error::SizeExceeded("search exceeded its time budget".into()));
            }
        }
        Ok(())
    }

    fn dfs(&mut self, part: Partition, depth: usize, on_path: bool) -> Result<Explored> {
        self.check_deadline()?;
        let Some(target) = Self::target_cell(&part) else {
            // Discrete partition: a leaf ordering.
            let leaf: Vec<u32> = part.iter().map(|c| c[0]).collect();
            let Some(zeta) = &self.zeta else {
                self.zeta = Some(leaf);
                return Ok(Explored::Quiet);
            };
            let mut perm = vec![0u32; self.n];
            for (z, l) in zeta.iter().zip(&leaf) {
                perm[*z as usize] = *l;
            }
            if perm.iter().enumerate().all(|(i, &p)| i as u32 == p) {
                return Ok(Explored::Quiet);
            }
            if !self.is_automorphism(&perm) {
                return Ok(Explored::Quiet);
            }
            let level = self
                .base
                .iter()
                .position(|&b| perm[b as usize] != b)
                .expect("a nontrivial automorphism moves some base point");
            self.gens.push((level, perm));
            return Ok(Explored::FoundAuto);
        };

        let candidates = part[target].clone();
        if on_path {
            // First candidate extends the leftmost path and the base.
            let first = candidates[0];
            self.base.push(first);
            let mut child = Self::individualize(&part, target, first);
            self.refine(&mut child);
            self.path_shape.push(Self::shape(&child));
            self.dfs(child, depth + 1, true)?;

            let mut tried = vec![first];
            for &v in &candidates[1..] {
                if self.orbit_of(&tried, depth).contains(&v) {
                    continue;
                }
                let mut child = Self::individualize(&part, target, v);
                self.refine(&mut child);
                if Self::shape(&child) == self.path_shape[depth] {
                    // Whether or not the subtree yields an automorphism we
                    // keep scanning: each sibling is its own coset.
                    self.dfs(child, depth + 1, false)?;
                }
                tried.push(v);
            }
            Ok(Explored::Quiet)
        } else {
            for &v in &candidates {
                let mut child = Self::individualize(&part, target, v);
                self.refine(&mut child);
                if Self::shape(&child) != self.path_shape[depth] {
                    continue;
                }
                if let Explored::FoundAuto = self.dfs(child, depth + 1, false)? {
                    // One representative of this coset is enough.
                    return Ok(Explored::FoundAuto);
                }
            }
            Ok(Explored::Quiet)
        }
    }
}

/// Runs the search on an explicit bitset adjacency matrix (`words` u64 per
/// row). Exact: returns the full automorphism group order, a generating
/// set, and the base with its orbit sizes.
pub fn search_adjacency(
    n: usize,
    adj: &[Vec<u64>],
    deadline: Option<Instant>,
) -> Result<SearchOutcome> {
    if n > MAX_SEARCH_VERTICES {
        return Err(Error::SizeExceeded(format!(
            "automorphism search is gated to {MAX_SEARCH_VERTICES} vertices, graph has {n}"
        )));
    }
    let mut searcher = Searcher {
        n,
        adj,
        base: Vec::new(),
        zeta: None,
        gens: Vec::new(),
        path_shape: Vec::new(),
        deadline,
    };
    let mut root: Partition = vec![(0..n as u32).collect()];
    if n == 0 {
        return Ok(SearchOutcome {
            order: 1,
            generators: Vec::new(),
            base: Vec::new(),
            orbit_sizes: Vec::new(),
        });
    }
    searcher.refine(&mut root);
    searcher.dfs(root, 0, true)?;

    let mut order: u64 = 1;
    let mut orbit_sizes = Vec::with_capacity(searcher.base.len());
    for (d, &b) in searcher.base.iter().enumerate() {
        let size = searcher.orbit_of(&[b], d).len() as u64;
        orbit_sizes.push(size);
        order = order
            .checked_mul(size)
            .ok_or_else(|| Error::SizeExceeded("group order overflows u64".into()))?;
    }
    Ok(SearchOutcome {
        order,
        generators: searcher.gens.into_iter().map(|(_, p)| p).collect(),
        base: searcher.base,
        orbit_sizes,
    })
}

/// Searches the automorphism group of a symplectic graph.
pub fn aut_search(g: &SympGraph, deadline: Option<Instant>) -> Result<SearchOutcome> {
    let rows: Vec<Vec<u64>> = (0..g.n()).map(|u| g.adjacency_row(u).to_vec()).collect();
    search_adjacency(g.n(), &rows, deadline)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn adj_from_edges(n: usize, edges: &[(u32, u32)]) -> Vec<Vec<u64>> {
        let words = n.div_ceil(64);
        let mut adj = vec![vec![0u64; words]; n];
        for &(u, v) in edges {
            adj[u as usize][v as usize / 64] |= 1 << (v % 64);
            adj[v as usize][u as usize / 64] |= 1 << (u % 64);
        }
        adj
    }

    fn order_of(n: usize, edges: &[(u32, u32)]) -> u64 {
        let adj = adj_from_edges(n, edges);
        let outcome = search_adjacency(n, &adj, None).unwrap();
        // Every reported generator must actually be an automorphism.
        for p in &outcome.generators {
            for u in 0..n as u32 {
                for v in u + 1..n as u32 {
                    let a = adj[u as usize][v as usize / 64] >> (v % 64) & 1;
                    let b = adj[p[u as usize] as usize][p[v as usize] as usize / 64]
                        >> (p[v as usize] % 64)
                        & 1;
                    assert_eq!(a, b);
                }
            }
        }
        assert_eq!(
            outcome.orbit_sizes.iter().product::<u64>(),
            outcome.order
        );
        outcome.order
    }

    #[test]
    fn complete_graphs_have_symmetric_groups() {
        let mut edges = Vec::new();
        for u in 0..4u32 {
            for v in u + 1..4 {
                edges.push((u, v));
            }
        }
        assert_eq!(order_of(4, &edges), 24);
        assert_eq!(order_of(1, &[]), 1);
    }

    #[test]
    fn cycles_have_dihedral_groups() {
        let c5: Vec<(u32, u32)> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        assert_eq!(order_of(5, &c5), 10);
        let c6: Vec<(u32, u32)> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
        assert_eq!(order_of(6, &c6), 12);
    }

    #[test]
    fn paths_have_a_single_reflection() {
        assert_eq!(order_of(4, &[(0, 1), (1, 2), (2, 3)]), 2);
    }

    #[test]
    fn petersen_graph_order() {
        // Outer 5-cycle 0-4, inner pentagram 5-9, spokes i — i+5.
        let mut edges: Vec<(u32, u32)> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        edges.extend((0..5).map(|i| (5 + i, 5 + (i + 2) % 5)));
        edges.extend((0..5).map(|i| (i, i + 5)));
        assert_eq!(order_of(10, &edges), 120);
    }

    #[test]
    fn complete_bipartite_wreath_order() {
        let mut edges = Vec::new();
        for u in 0..3u32 {
            for v in 3..6u32 {
                edges.push((u, v));
            }
        }
        // K3,3: (3!)² for the sides times 2 for swapping them.
        assert_eq!(order_of(6, &edges), 72);
    }

    /// Brute-force oracle: count automorphisms by scanning every
    /// permutation of up to 7 vertices.
    #[test]
    fn order_matches_brute_force_on_small_graphs() {
        fn brute(n: usize, adj: &[Vec<u64>]) -> u64 {
            let mut perm: Vec<u32> = (0..n as u32).collect();
            let mut count = 0u64;
            // Heap's algorithm over all n! permutations.
            let mut c = vec![0usize; n];
            let mut check = |p: &[u32]| {
                let ok = (0..n as u32).all(|u| {
                    (u + 1..n as u32).all(|v| {
                        (adj[u as usize][v as usize / 64] >> (v % 64) & 1)
                            == (adj[p[u as usize] as usize][p[v as usize] as usize / 64]
                                >> (p[v as usize] % 64)
                                & 1)
                    })
                });
                count += u64::from(ok);
            };
            check(&perm);
            let mut i = 0;
            while i < n {
                if c[i] < i {
                    if i % 2 == 0 {
                        perm.swap(0, i);
                    } else {
                        perm.swap(c[i], i);
                    }
                    check(&perm);
                    c[i] += 1;
                    i = 0;
                } else {
                    c[i] = 0;
                    i += 1;
                }
            }
            count
        }
        let cases: Vec<(usize, Vec<(u32, u32)>)> = vec![
            (6, vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (2, 5), (1, 5)]),
            (7, vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (1, 4)]),
            (6, vec![(0, 1), (0, 2), (0, 3), (3, 4), (3, 5), (1, 2)]),
            (5, vec![(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)]),
            (6, vec![(0, 1), (2, 3), (4, 5), (1, 2)]),
        ];
        for (n, edges) in cases {
            let adj = adj_from_edges(n, &edges);
            let outcome = search_adjacency(n, &adj, None).unwrap();
            assert_eq!(outcome.order, brute(n, &adj), "order for edges {edges:?}");
        }
    }

    #[test]
    fn disjoint_edges_allow_swaps() {
        // Two disjoint edges: 2 × 2 × 2 = 8 automorphisms.
        assert_eq!(order_of(4, &[(0, 1), (2, 3)]), 8);
    }

    #[test]
    fn search_is_gated_by_size() {
        let adj = vec![vec![0u64; 2]; 101];
        assert!(matches!(
            search_adjacency(101, &adj, None),
            Err(Error::SizeExceeded(_))
        ));
    }

    #[test]
    fn deadline_in_the_past_aborts() {
        let mut edges = Vec::new();
        for u in 0..8u32 {
            for v in u + 1..8 {
                edges.push((u, v));
            }
        }
        let adj = adj_from_edges(8, &edges);
        let past = Instant::now() - std::time::Duration::from_secs(1);
        assert!(matches!(
            search_adjacency(8, &adj, Some(past)),
            Err(Error::SizeExceeded(_))
        ));
    }
}
