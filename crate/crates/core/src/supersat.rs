//! Balanced-supersaturation machinery: greedily built D-good embedding
//! families, saturated partial embeddings, the induced hypergraph on host
//! edges and its degree audit.
//!
//! A family Phi of embeddings of F into G is D-good when every partial
//! embedding psi on a subset nu (with e(F[nu]) >= 1) has at most
//! D(nu) = delta^{-|nu|} q^{e(F)-f(nu)} n^{v(F)-|nu|} extensions in Phi.
//! The greedy pass over the deterministic embedding stream yields a maximal
//! D-good family: rejected candidates stay rejected because degrees only
//! grow.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{for_each_embedding, Embedding, Graph, PatternView};
use crate::semibounded::{d_value, BalancingContext, SemiBoundedTriple};

type PartialKey = (u32, Vec<u16>);

pub struct DGoodFamily {
    pub pattern: Graph,
    pub triple: SemiBoundedTriple,
    pub host: Graph,
    pub ctx: BalancingContext,
    pub members: Vec<Embedding>,
    pub order_seed: u64,
    /// D(nu) per pattern-subset mask; +inf for edgeless subsets.
    caps: Vec<f64>,
    masks_with_edges: Vec<u32>,
    index: HashMap<PartialKey, u64>,
}

fn restriction(map: &[u16], nu: u32) -> Vec<u16> {
    (0..map.len()).filter(|&v| nu >> v & 1 == 1).map(|v| map[v]).collect()
}

impl DGoodFamily {
    /// deg_Phi of the partial embedding given by `nu` and the images of its
    /// vertices in ascending vertex order.
    pub fn degree_of_partial(&self, nu: u32, images: &[u16]) -> u64 {
        if self.masks_with_edges.binary_search(&nu).is_ok() {
            *self.index.get(&(nu, images.to_vec())).unwrap_or(&0)
        } else {
            self.members
                .iter()
                .filter(|m| restriction(&m.map, nu) == images)
                .count() as u64
        }
    }

    pub fn cap(&self, nu: u32) -> f64 {
        self.caps[nu as usize]
    }

    /// Partial embeddings with deg >= D(nu)/2, sorted, with their degrees.
    pub fn saturated_partials(&self) -> Vec<(u32, Vec<u16>, u64)> {
        let mut out: Vec<(u32, Vec<u16>, u64)> = self
            .index
            .iter()
            .filter(|((nu, _), &cnt)| cnt as f64 >= self.caps[*nu as usize] / 2.0)
            .map(|((nu, im), &cnt)| (*nu, im.clone(), cnt))
            .collect();
        out.sort();
        out
    }

    /// Re-derives every partial degree from the member list and compares it
    /// against the caps (and the index). Returns the offending partials.
    pub fn recount_violations(&self) -> Vec<(u32, Vec<u16>, u64)> {
        let mut fresh: HashMap<PartialKey, u64> = HashMap::new();
        for m in &self.members {
            for &nu in &self.masks_with_edges {
                *fresh.entry((nu, restriction(&m.map, nu))).or_insert(0) += 1;
            }
        }
        let mut bad = Vec::new();
        for ((nu, im), cnt) in &fresh {
            if *cnt as f64 > self.caps[*nu as usize]
                || self.index.get(&(*nu, im.clone())) != Some(cnt)
            {
                bad.push((*nu, im.clone(), *cnt));
            }
        }
        if fresh.len() != self.index.len() {
            bad.push((0, vec![], 0));
        }
        bad.sort();
        bad
    }

    /// Maximality: every embedding not in the family must violate some cap if
    /// added. Returns the first insertable non-member, if any.
    pub fn maximality_counterexample(&self) -> Option<Embedding> {
        let member_set: std::collections::HashSet<&Vec<u16>> =
            self.members.iter().map(|m| &m.map).collect();
        let mut found = None;
        for_each_embedding(&self.pattern, &self.host, self.order_seed, &mut |map| {
            if member_set.contains(&map.to_vec()) {
                return true;
            }
            let ok = self.masks_with_edges.iter().all(|&nu| {
                (self.degree_of_partial(nu, &restriction(map, nu)) + 1) as f64
                    <= self.caps[nu as usize]
            });
            if ok {
                found = Some(Embedding { map: map.to_vec() });
                return false;
            }
            true
        });
        found
    }
}

/// Greedy maximal D-good family: stream embeddings in the deterministic
/// order fixed by `order_seed`, insert whenever no cap would be exceeded.
pub fn build_dgood(
    pattern: &Graph,
    triple: &SemiBoundedTriple,
    host: &Graph,
    ctx: &BalancingContext,
    order_seed: u64,
) -> Result<DGoodFamily> {
    let pv = PatternView::new(pattern)?;
    let full = pv.full_mask();
    let mut caps = vec![f64::INFINITY; full as usize + 1];
    let mut masks_with_edges = Vec::new();
    for nu in 0..=full {
        if pv.e_within(nu) >= 1 {
            caps[nu as usize] = d_value(pattern, triple, ctx, nu)?.value;
            masks_with_edges.push(nu);
        }
    }
    let mut fam = DGoodFamily {
        pattern: pattern.clone(),
        triple: *triple,
        host: host.clone(),
        ctx: *ctx,
        members: Vec::new(),
        order_seed,
        caps,
        masks_with_edges,
        index: HashMap::new(),
    };
    for_each_embedding(pattern, host, order_seed, &mut |map| {
        let keys: Vec<PartialKey> = fam
            .masks_with_edges
            .iter()
            .map(|&nu| (nu, restriction(map, nu)))
            .collect();
        let ok = keys.iter().all(|k| {
            (*fam.index.get(k).unwrap_or(&0) + 1) as f64 <= fam.caps[k.0 as usize]
        });
        if ok {
            for k in keys {
                *fam.index.entry(k).or_insert(0) += 1;
            }
            fam.members.push(Embedding { map: map.to_vec() });
        }
        true
    });
    Ok(fam)
}

/// Hypergraph on the host's edge set: one hyperedge per family member,
/// formed by the host edges its pattern edges land on. Distinct hyperedges
/// carry their multiplicity.
#[derive(Clone, Debug, Serialize)]
pub struct EdgeHypergraph {
    pub host_edge_count: usize,
    /// (sorted host-edge indices, multiplicity), sorted
    pub hyperedges: Vec<(Vec<u32>, u32)>,
}

pub fn to_edge_hypergraph(fam: &DGoodFamily) -> EdgeHypergraph {
    let edge_index: HashMap<(u16, u16), u32> = fam
        .host
        .edges()
        .iter()
        .enumerate()
        .map(|(i, &e)| (e, i as u32))
        .collect();
    let mut counts: HashMap<Vec<u32>, u32> = HashMap::new();
    for m in &fam.members {
        let mut he: Vec<u32> = fam
            .pattern
            .edges()
            .iter()
            .map(|&(a, b)| {
                let (u, v) = (m.map[a as usize], m.map[b as usize]);
                edge_index[&(u.min(v), u.max(v))]
            })
            .collect();
        he.sort_unstable();
        he.dedup();
        *counts.entry(he).or_insert(0) += 1;
    }
    let mut hyperedges: Vec<(Vec<u32>, u32)> = counts.into_iter().collect();
    hyperedges.sort();
    EdgeHypergraph { host_edge_count: fam.host.edge_count(), hyperedges }
}

#[derive(Clone, Debug, Serialize)]
pub struct DeltaRow {
    pub i: usize,
    /// max over i-subsets sigma of host edges of the number of distinct
    /// hyperedges containing sigma
    pub observed: u64,
    /// q^{e(F)-1} n^{v(F)-2} (tau/m)^{i-1}
    pub shape_bound: f64,
    /// gamma |H| / m * (tau/m)^{i-1}
    pub container_bound: f64,
    pub worst_sigma: Vec<u32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DeltaAudit {
    pub rows: Vec<DeltaRow>,
    /// smallest C with observed_i <= C * q^{e(F)-1} n^{v(F)-2} (tau/m)^{i-1}
    /// for every i
    pub smallest_c: f64,
    pub tau: f64,
    pub hyperedge_count: usize,
}

fn binom(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

/// Exhaustive degree audit of the edge hypergraph: for i = 1..=max hyperedge
/// size, the max co-degree of an i-subset, against the theorem-shaped bound.
pub fn delta_audit(
    h: &EdgeHypergraph,
    pattern: &Graph,
    triple: &SemiBoundedTriple,
    ctx: &BalancingContext,
    gamma: f64,
) -> Result<DeltaAudit> {
    let max_size = h.hyperedges.iter().map(|(e, _)| e.len()).max().unwrap_or(0);
    let work: u128 = (1..=max_size)
        .map(|i| h.hyperedges.len() as u128 * binom(max_size, i))
        .sum();
    if work > 50_000_000 {
        return Err(Error::resource(format!(
            "delta audit would enumerate ~{work} subsets; reduce the host or family size"
        )));
    }
    let tau = crate::semibounded::tau(pattern, triple, ctx)?.value;
    let m = h.host_edge_count as f64;
    let base = ctx.q.powi(pattern.edge_count() as i32 - 1)
        * ctx.n.powi(pattern.n() as i32 - 2);
    let hcount = h.hyperedges.len();
    let mut rows = Vec::new();
    let mut smallest_c: f64 = 0.0;
    for i in 1..=max_size {
        let mut counts: HashMap<Vec<u32>, u64> = HashMap::new();
        for (he, _) in &h.hyperedges {
            if he.len() < i {
                continue;
            }
            for sigma in subset_iter(he, i) {
                *counts.entry(sigma).or_insert(0) += 1;
            }
        }
        let (worst_sigma, observed) = counts
            .into_iter()
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
            .unwrap_or((vec![], 0));
        let scale = (tau / m).powi(i as i32 - 1);
        let shape_bound = base * scale;
        let container_bound = gamma * hcount as f64 / m * scale;
        smallest_c = smallest_c.max(observed as f64 / shape_bound);
        rows.push(DeltaRow { i, observed, shape_bound, container_bound, worst_sigma });
    }
    Ok(DeltaAudit { rows, smallest_c, tau, hyperedge_count: hcount })
}

fn subset_iter(set: &[u32], k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(set: &[u32], start: usize, k: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..set.len() {
            cur.push(set[i]);
            rec(set, i + 1, k, cur, out);
            cur.pop();
        }
    }
    rec(set, 0, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_bipartite, enumerate_embeddings, parse_graph};
    use crate::semibounded::find_triples;

    fn c4() -> Graph {
        parse_graph("n=4; 0-1 1-2 2-3 3-0").unwrap()
    }

    fn setup(host: Graph) -> (Graph, SemiBoundedTriple, Graph, BalancingContext) {
        let f = c4();
        let t = find_triples(&f, 2).unwrap()[0];
        let ctx = BalancingContext::from_host(&host, 0.5, 1.0).unwrap();
        (f, t, host, ctx)
    }

    #[test]
    fn greedy_family_is_dgood_and_maximal() {
        let (f, t, host, ctx) = setup(complete_bipartite(4, 4).unwrap());
        let fam = build_dgood(&f, &t, &host, &ctx, 11).unwrap();
        assert!(!fam.members.is_empty());
        assert!(fam.recount_violations().is_empty());
        assert!(fam.maximality_counterexample().is_none());
    }

    #[test]
    fn build_is_deterministic_in_seed() {
        let (f, t, host, ctx) = setup(complete_bipartite(4, 4).unwrap());
        let a = build_dgood(&f, &t, &host, &ctx, 5).unwrap();
        let b = build_dgood(&f, &t, &host, &ctx, 5).unwrap();
        assert_eq!(a.members, b.members);
    }

    #[test]
    fn degree_of_partial_matches_scan() {
        let (f, t, host, ctx) = setup(complete_bipartite(3, 4).unwrap());
        let fam = build_dgood(&f, &t, &host, &ctx, 3).unwrap();
        for m in &fam.members {
            for nu in 1u32..16 {
                let images = restriction(&m.map, nu);
                let scan = fam
                    .members
                    .iter()
                    .filter(|mm| restriction(&mm.map, nu) == images)
                    .count() as u64;
                assert_eq!(fam.degree_of_partial(nu, &images), scan);
            }
        }
        // empty-domain partial counts the whole family
        assert_eq!(fam.degree_of_partial(0, &[]), fam.members.len() as u64);
    }

    #[test]
    fn sigma_embedding_double_count_small_instance() {
        // deg_H(sigma) <= sum over sigma-embeddings psi of deg_Phi(psi),
        // checked directly on a small host
        let (f, t, host, ctx) = setup(complete_bipartite(3, 3).unwrap());
        let fam = build_dgood(&f, &t, &host, &ctx, 1).unwrap();
        let h = to_edge_hypergraph(&fam);
        for (sigma, _) in &h.hyperedges {
            let deg_h = h
                .hyperedges
                .iter()
                .filter(|(e, _)| sigma.iter().all(|s| e.contains(s)))
                .count() as u64;
            // sigma-embeddings: members restricted to the vertices covered
            // by sigma; sum their full-family degrees
            let verts: std::collections::HashSet<u16> = sigma
                .iter()
                .flat_map(|&ei| {
                    let (u, v) = fam.host.edges()[ei as usize];
                    [u, v]
                })
                .collect();
            let mut psis: std::collections::HashSet<(u32, Vec<u16>)> =
                std::collections::HashSet::new();
            for m in &fam.members {
                let nu: u32 = (0..fam.pattern.n())
                    .filter(|&p| verts.contains(&m.map[p]))
                    .map(|p| 1u32 << p)
                    .sum();
                psis.insert((nu, restriction(&m.map, nu)));
            }
            let total: u64 = psis
                .iter()
                .map(|(nu, im)| fam.degree_of_partial(*nu, im))
                .sum();
            assert!(deg_h <= total, "sigma={sigma:?}: {deg_h} > {total}");
        }
    }

    #[test]
    fn hypergraph_and_audit_shapes() {
        let (f, t, host, ctx) = setup(complete_bipartite(4, 4).unwrap());
        let fam = build_dgood(&f, &t, &host, &ctx, 2).unwrap();
        let h = to_edge_hypergraph(&fam);
        assert_eq!(h.host_edge_count, 16);
        let total_mult: u32 = h.hyperedges.iter().map(|(_, m)| m).sum();
        assert_eq!(total_mult as usize, fam.members.len());
        for (he, _) in &h.hyperedges {
            assert_eq!(he.len(), 4); // C4 embeddings cover 4 distinct edges
        }
        let audit = delta_audit(&h, &f, &t, &ctx, 1.0).unwrap();
        assert_eq!(audit.rows.len(), 4);
        assert!(audit.smallest_c > 0.0);
        // Delta_i is non-increasing in i
        for w in audit.rows.windows(2) {
            assert!(w[0].observed >= w[1].observed);
        }
    }

    #[test]
    fn caps_actually_bind() {
        // on a rich host the family must stop well short of all embeddings
        let (f, t, host, ctx) = setup(complete_bipartite(5, 5).unwrap());
        let fam = build_dgood(&f, &t, &host, &ctx, 0).unwrap();
        let all = enumerate_embeddings(&f, &host, None, 0).len();
        assert!(fam.members.len() < all);
        assert!(!fam.members.is_empty());
    }
}
