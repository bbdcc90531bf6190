//! Pattern constructions: the subdivision-plus-apex family F_M built from a
//! multigraph M, and the family F_{r,s,t} (s base vertices, an apex, and t
//! fresh vertices for every r-subset of the base). Both come with their
//! canonical semi-bounded triple and vertex role labels, plus the exact
//! balance checks that decide when the closed-form exponents apply.

use serde::Serialize;

use crate::density::m2;
use crate::error::{Error, Result};
use crate::graph::{mask_vertices, Graph, Multigraph, PatternView, MAX_PATTERN_VERTICES};
use crate::rational::{rat, serde_rat, Rat};
use crate::semibounded::SemiBoundedTriple;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "role")]
pub enum Role {
    /// Original vertex of the source multigraph / base set.
    Base { id: usize },
    /// Subdivision vertex of the `copy`-th parallel edge u-v of M.
    Subdivision { u: usize, v: usize, copy: u32 },
    /// The vertex adjacent to the whole base side.
    Apex,
    /// The `copy`-th fresh vertex attached to the r-subset `block`.
    Block { block: Vec<usize>, copy: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstructionRecord {
    #[serde(skip)]
    pub graph: Graph,
    pub triple: SemiBoundedTriple,
    pub roles: Vec<Role>,
}

/// F_M: subdivide every edge of M (with multiplicity) and add an apex
/// adjacent to all of V(M). Vertices: 0..v(M) originals, then one
/// subdivision vertex per edge instance (edges in sorted order, copies in
/// order), apex last. v(F_M) = v(M)+e(M)+1, e(F_M) = v(M)+2e(M).
pub fn build_f_m(m: &Multigraph) -> Result<ConstructionRecord> {
    let vm = m.n();
    let em = m.edge_count() as usize;
    if m.edge_count() == 0 {
        return Err(Error::domain("F_M needs at least one multigraph edge"));
    }
    let n = vm + em + 1;
    if n > MAX_PATTERN_VERTICES {
        return Err(Error::domain(format!(
            "F_M would have {n} vertices, above the {MAX_PATTERN_VERTICES}-vertex pattern cap"
        )));
    }
    let mut g = Graph::new(n)?;
    let mut roles: Vec<Role> = (0..vm).map(|id| Role::Base { id }).collect();
    let apex = n - 1;
    let mut next = vm;
    for &(u, v, mult) in m.edges() {
        for copy in 0..mult {
            g.add_edge(u as usize, next)?;
            g.add_edge(v as usize, next)?;
            roles.push(Role::Subdivision { u: u as usize, v: v as usize, copy });
            next += 1;
        }
    }
    for u in 0..vm {
        g.add_edge(u, apex)?;
    }
    roles.push(Role::Apex);
    let s = (1u32 << vm) - 1;
    let full = (1u32 << n) - 1;
    let triple = SemiBoundedTriple { s, t: full & !s, v_star: apex, r: 2 };
    Ok(ConstructionRecord { graph: g, triple, roles })
}

#[derive(Clone, Debug, Serialize)]
pub struct BalanceCheck {
    pub balanced: bool,
    /// subset attaining the max on the left-hand side
    pub witness: Vec<usize>,
    #[serde(with = "serde_rat")]
    pub max_ratio: Rat,
    #[serde(with = "serde_rat")]
    pub target_ratio: Rat,
}

/// M is balanced when max over mu ⊆ V(M), |mu| >= 2 of e(M[mu])/(|mu|-1)
/// equals e(M)/(v(M)-1). Edges counted with multiplicity.
pub fn multigraph_balanced(m: &Multigraph) -> Result<BalanceCheck> {
    if m.n() < 2 || m.n() > 31 {
        return Err(Error::domain("balance check needs 2..=31 multigraph vertices"));
    }
    let full = (1u32 << m.n()) - 1;
    let mut best = (rat(-1, 1), 0u32);
    for mu in 0..=full {
        if mu.count_ones() < 2 {
            continue;
        }
        let val = rat(m.edge_count_within(mu) as i64, mu.count_ones() as i64 - 1);
        if val > best.0 {
            best = (val, mu);
        }
    }
    let target = rat(m.edge_count() as i64, m.n() as i64 - 1);
    Ok(BalanceCheck {
        balanced: best.0 == target,
        witness: mask_vertices(best.1),
        max_ratio: best.0,
        target_ratio: target,
    })
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// F_{r,s,t}: base vertices 0..s, apex s, then for every r-subset R of the
/// base (lexicographic order) t fresh vertices adjacent exactly to R.
pub fn build_f_rst(r: usize, s: usize, t: usize) -> Result<ConstructionRecord> {
    if r < 1 || s < r || t < 1 {
        return Err(Error::domain("F_{r,s,t} needs 1 <= r <= s and t >= 1"));
    }
    let blocks = subsets_of_size(s, r);
    let n = s + 1 + blocks.len() * t;
    if n > MAX_PATTERN_VERTICES {
        return Err(Error::domain(format!(
            "F_{{r,s,t}} would have {n} vertices, above the {MAX_PATTERN_VERTICES}-vertex pattern cap"
        )));
    }
    let mut g = Graph::new(n)?;
    let mut roles: Vec<Role> = (0..s).map(|id| Role::Base { id }).collect();
    let apex = s;
    for u in 0..s {
        g.add_edge(u, apex)?;
    }
    roles.push(Role::Apex);
    let mut next = s + 1;
    for block in &blocks {
        for copy in 0..t {
            for &u in block {
                g.add_edge(u, next)?;
            }
            roles.push(Role::Block { block: block.clone(), copy });
            next += 1;
        }
    }
    let s_mask = (1u32 << s) - 1;
    let full = (1u32 << n) - 1;
    let triple = SemiBoundedTriple { s: s_mask, t: full & !s_mask, v_star: apex, r: r as u32 };
    Ok(ConstructionRecord { graph: g, triple, roles })
}

/// Balance condition for a pattern with a triple whose T \ {v*} vertices are
/// all of degree exactly r:
///   max over mu ⊆ S, |mu| >= 2 of (e(F[mu ∪ N(mu)]) - |N(mu)|)/(|mu|-1)
///   == (e(F) - |T|)/(|S|-1),
/// where N(mu) ⊆ T is the set of T-vertices with a neighbor in mu.
pub fn general_balance_check(f: &Graph, triple: &SemiBoundedTriple) -> Result<BalanceCheck> {
    let pv = PatternView::new(f)?;
    if !crate::semibounded::is_valid_triple(f, triple)? {
        return Err(Error::domain("invalid semi-bounded triple"));
    }
    let s_verts = mask_vertices(triple.s);
    if s_verts.len() < 2 {
        return Err(Error::domain("balance check needs |S| >= 2"));
    }
    let degrees: Vec<u32> = mask_vertices(triple.t)
        .into_iter()
        .filter(|&v| v != triple.v_star)
        .map(|v| pv.deg[v])
        .collect();
    if degrees.iter().any(|&d| d != triple.r) {
        return Err(Error::domain(
            "balance check requires every vertex of T \\ {v*} to have degree exactly r",
        ));
    }
    let mut best = (rat(i64::MIN / 2, 1), 0u32);
    let mut mu = triple.s;
    loop {
        if mu.count_ones() >= 2 {
            let mut nbh = 0u32;
            for v in mask_vertices(triple.t) {
                if pv.adj[v] & mu != 0 {
                    nbh |= 1 << v;
                }
            }
            let e = pv.e_within(mu | nbh) as i64;
            let val = rat(e - nbh.count_ones() as i64, mu.count_ones() as i64 - 1);
            if val > best.0 {
                best = (val, mu);
            }
        }
        if mu == 0 {
            break;
        }
        mu = (mu - 1) & triple.s;
    }
    let target = rat(
        f.edge_count() as i64 - triple.t.count_ones() as i64,
        s_verts.len() as i64 - 1,
    );
    Ok(BalanceCheck {
        balanced: best.0 == target,
        witness: mask_vertices(best.1),
        max_ratio: best.0,
        target_ratio: target,
    })
}

/// For balanced M, m2(F_M) must equal (2e(M)+v(M)-1)/(e(M)+v(M)-1); checks
/// the closed form against the exhaustive computation.
pub fn verify_multibalanced_m2(m: &Multigraph) -> Result<bool> {
    let bc = multigraph_balanced(m)?;
    if !bc.balanced {
        return Err(Error::domain("m2 closed form only applies to balanced multigraphs"));
    }
    let rec = build_f_m(m)?;
    let (vm, em) = (m.n() as i64, m.edge_count() as i64);
    let expect = rat(2 * em + vm - 1, em + vm - 1);
    Ok(m2(&rec.graph)? == expect)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{contains_copy, complete_bipartite, parse_multigraph};
    use crate::semibounded::{a_of_f, is_valid_triple};

    fn triangle() -> Multigraph {
        parse_multigraph("n=3; 0-1 1-2 0-2").unwrap()
    }

    #[test]
    fn f_m_of_triangle_counts() {
        // v = 3+3+1 = 7, e = 3+6 = 9
        let rec = build_f_m(&triangle()).unwrap();
        assert_eq!(rec.graph.n(), 7);
        assert_eq!(rec.graph.edge_count(), 9);
        assert_eq!(rec.triple.r, 2);
        assert_eq!(rec.triple.v_star, 6);
        assert!(is_valid_triple(&rec.graph, &rec.triple).unwrap());
        assert!(contains_copy(&complete_bipartite(2, 2).unwrap(), &rec.graph));
        assert_eq!(rec.roles[0], Role::Base { id: 0 });
        assert_eq!(rec.roles[6], Role::Apex);
    }

    #[test]
    fn f_m_respects_multiplicity() {
        let m = parse_multigraph("n=2; 0-1x3").unwrap();
        let rec = build_f_m(&m).unwrap();
        // theta graph with apex: v = 2+3+1, e = 2+6
        assert_eq!(rec.graph.n(), 6);
        assert_eq!(rec.graph.edge_count(), 8);
    }

    #[test]
    fn balancedness_of_multigraphs() {
        assert!(multigraph_balanced(&triangle()).unwrap().balanced);
        // triangle plus pendant edge: unbalanced (triangle denser than whole)
        let m = parse_multigraph("n=4; 0-1 1-2 0-2 2-3").unwrap();
        let bc = multigraph_balanced(&m).unwrap();
        assert!(!bc.balanced);
        assert_eq!(bc.witness, vec![0, 1, 2]);
        assert_eq!(bc.max_ratio, rat(3, 2));
        assert_eq!(bc.target_ratio, rat(4, 3));
    }

    #[test]
    fn m2_closed_form_for_balanced_m() {
        assert!(verify_multibalanced_m2(&triangle()).unwrap());
        let m = parse_multigraph("n=2; 0-1x2").unwrap();
        assert!(verify_multibalanced_m2(&m).unwrap());
    }

    #[test]
    fn a_closed_form_for_triangle_family() {
        // a(F_M) = (v-1)/(v+2e-1) = 2/8 = 1/4 for M = triangle
        let rec = build_f_m(&triangle()).unwrap();
        let (a, _) = a_of_f(&rec.graph, &rec.triple).unwrap();
        assert_eq!(a, rat(1, 4));
    }

    #[test]
    fn f_rst_shape() {
        let rec = build_f_rst(2, 3, 1).unwrap();
        // 3 base + apex + C(3,2)*1 = 7 vertices; edges 3 + 3*2 = 9
        assert_eq!(rec.graph.n(), 7);
        assert_eq!(rec.graph.edge_count(), 9);
        assert!(is_valid_triple(&rec.graph, &rec.triple).unwrap());
        // block vertices have degree exactly r
        for v in 4..7 {
            assert_eq!(rec.graph.degree(v), 2);
        }
        assert!(build_f_rst(3, 2, 1).is_err());
    }

    #[test]
    fn general_balance_on_f_rst() {
        let rec = build_f_rst(2, 3, 1).unwrap();
        let bc = general_balance_check(&rec.graph, &rec.triple).unwrap();
        assert!(bc.balanced);
        // K22 = F with S of size 2, one block vertex: balanced as well
        let k22 = complete_bipartite(2, 2).unwrap();
        let t = crate::semibounded::find_triples(&k22, 2).unwrap()[0];
        assert!(general_balance_check(&k22, &t).unwrap().balanced);
    }
}
