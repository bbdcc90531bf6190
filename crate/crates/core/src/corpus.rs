//! Deterministic small-graph corpora for exhaustive invariant sweeps:
//! connected bipartite graphs up to isomorphism (augmentation + canonical
//! form), and small loopless multigraphs.

use std::collections::HashSet;

use itertools::Itertools;

use crate::graph::{Graph, Multigraph};

const MAX_CORPUS_N: usize = 8;

fn pair_bit(u: usize, v: usize, n: usize) -> u64 {
    let (a, b) = (u.min(v), u.max(v));
    1u64 << (a * n + b)
}

/// Minimum edge-bitmask over all vertex relabelings; n <= 8.
fn canonical_key(g: &Graph) -> u64 {
    let n = g.n();
    let mut best = u64::MAX;
    for perm in (0..n).permutations(n) {
        let mut mask = 0u64;
        for &(u, v) in g.edges() {
            mask |= pair_bit(perm[u as usize], perm[v as usize], n);
        }
        best = best.min(mask);
    }
    best
}

/// All connected bipartite graphs on 1..=max_n vertices, one representative
/// per isomorphism class, generated by augmenting smaller graphs with one new
/// vertex (every connected graph has a removable non-cut vertex, so nothing
/// is missed). Order is deterministic.
pub fn connected_bipartite_graphs(max_n: usize) -> Vec<Graph> {
    assert!(
        (1..=MAX_CORPUS_N).contains(&max_n),
        "corpus generation supports 1..={MAX_CORPUS_N} vertices"
    );
    let mut all: Vec<Graph> = Vec::new();
    let mut level: Vec<Graph> = vec![Graph::new(1).unwrap()];
    all.extend(level.iter().cloned());
    for n in 2..=max_n {
        let mut seen: HashSet<u64> = HashSet::new();
        let mut next: Vec<Graph> = Vec::new();
        for g in &level {
            for nb in 1u32..1 << (n - 1) {
                let mut h = Graph::new(n).unwrap();
                for &(u, v) in g.edges() {
                    h.add_edge(u as usize, v as usize).unwrap();
                }
                for u in 0..n - 1 {
                    if nb >> u & 1 == 1 {
                        h.add_edge(u, n - 1).unwrap();
                    }
                }
                if crate::graph::bipartitions(&h).unwrap().is_empty() {
                    continue; // odd cycle
                }
                if seen.insert(canonical_key(&h)) {
                    next.push(h);
                }
            }
        }
        all.extend(next.iter().cloned());
        level = next;
    }
    all
}

/// All loopless multigraphs on exactly `v` labeled vertices with total edge
/// multiplicity in 1..=max_mult_sum (no isomorphism reduction; callers treat
/// these as a sweep, not a census).
pub fn small_multigraphs(v: usize, max_mult_sum: u32) -> Vec<Multigraph> {
    let pairs: Vec<(usize, usize)> =
        (0..v).flat_map(|a| (a + 1..v).map(move |b| (a, b))).collect();
    let mut out = Vec::new();
    let mut mults = vec![0u32; pairs.len()];
    fn rec(
        i: usize,
        left: u32,
        v: usize,
        pairs: &[(usize, usize)],
        mults: &mut Vec<u32>,
        out: &mut Vec<Multigraph>,
    ) {
        if i == pairs.len() {
            let edges: Vec<(usize, usize, u32)> = pairs
                .iter()
                .zip(mults.iter())
                .filter(|(_, &m)| m > 0)
                .map(|(&(a, b), &m)| (a, b, m))
                .collect();
            if !edges.is_empty() {
                out.push(Multigraph::from_edges(v, &edges).unwrap());
            }
            return;
        }
        for m in 0..=left {
            mults[i] = m;
            rec(i + 1, left - m, v, pairs, mults, out);
        }
        mults[i] = 0;
    }
    rec(0, max_mult_sum, v, &pairs, &mut mults, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_counts_match_census() {
        // numbers of connected bipartite graphs up to isomorphism
        let counts: Vec<usize> = (1..=7)
            .map(|n| {
                connected_bipartite_graphs(7)
                    .into_iter()
                    .filter(|g| g.n() == n)
                    .count()
            })
            .collect();
        assert_eq!(counts, vec![1, 1, 1, 3, 5, 17, 44]);
    }

    #[test]
    fn corpus_members_are_connected_and_bipartite() {
        for g in connected_bipartite_graphs(6) {
            assert!(g.is_connected());
            assert!(!crate::graph::bipartitions(&g).unwrap().is_empty() || g.n() == 0);
        }
    }

    #[test]
    fn multigraph_sweep_counts() {
        // single pair, mult 1..=5
        assert_eq!(small_multigraphs(2, 5).len(), 5);
        // 3 pairs, compositions of <=5 into 3 parts minus the empty one
        assert_eq!(small_multigraphs(3, 5).len(), 55);
    }
}
