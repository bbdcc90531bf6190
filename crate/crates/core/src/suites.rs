//! Cross-module invariant suites over the enumerated small-graph corpus.
//! Each suite checks one structural statement exhaustively and reports
//! counterexamples instead of panicking, so the CLI can print pass/fail per
//! suite.

use serde::Serialize;

use crate::constructions::{build_f_m, multigraph_balanced, verify_multibalanced_m2};
use crate::corpus::{connected_bipartite_graphs, small_multigraphs};
use crate::density::{m2, maximizer_contains_apex_check};
use crate::error::Result;
use crate::graph::{complete_bipartite, mask_vertices, Graph, PatternView};
use crate::rational::{rat, rat_str, Rat};
use crate::semibounded::{
    a_of_f, b_of_f, f_value, find_triples, tau_exponent_at, SemiBoundedTriple,
};
use crate::sim::sample_bipartite;
use crate::supersat::{build_dgood, DGoodFamily};

const MAX_RECORDED_FAILURES: usize = 5;

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub checked: u64,
    pub failure_count: u64,
    /// first few counterexample dumps
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn new(name: &str) -> SuiteReport {
        SuiteReport {
            name: name.to_string(),
            checked: 0,
            failure_count: 0,
            failures: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }

    fn check(&mut self, ok: bool, dump: impl Fn() -> String) {
        self.checked += 1;
        if !ok {
            self.failure_count += 1;
            if self.failures.len() < MAX_RECORDED_FAILURES {
                self.failures.push(dump());
            }
        }
    }
}

fn graph_tag(g: &Graph) -> String {
    g.to_text().replace('\n', " ")
}

/// Every triple of `g` at every r up to v(g) (the degree condition makes the
/// triple sets nested in r, so this enumerates each triple at each valid r).
fn all_triples(g: &Graph) -> Result<Vec<SemiBoundedTriple>> {
    let mut out = Vec::new();
    for r in 1..=g.n().max(1) as u32 {
        out.extend(find_triples(g, r)?);
    }
    Ok(out)
}

struct Corpus {
    graphs: Vec<Graph>,
    /// (graph index, triple), precomputed
    triples: Vec<(usize, SemiBoundedTriple)>,
}

fn corpus(max_vertices: usize) -> Result<Corpus> {
    let graphs = connected_bipartite_graphs(max_vertices);
    let mut triples = Vec::new();
    for (i, g) in graphs.iter().enumerate() {
        for t in all_triples(g)? {
            triples.push((i, t));
        }
    }
    Ok(Corpus { graphs, triples })
}

fn edgy_subsets(pv: &PatternView) -> Vec<u32> {
    (0..=pv.full_mask()).filter(|&nu| pv.e_within(nu) >= 1).collect()
}

/// Removal recurrences for f: single edges give f = 1; removing a base-side
/// vertex (when an edge survives) drops f by exactly 1; and when some
/// bounded-side vertex misses an edge of F[nu], some bounded-side vertex can
/// be removed at cost exactly deg_F(v).
fn suite_f_removal(c: &Corpus) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("f-removal-recurrence");
    for &(gi, t) in &c.triples {
        let g = &c.graphs[gi];
        let pv = PatternView::new(g)?;
        for nu in edgy_subsets(&pv) {
            let f_nu = f_value(g, &t, nu)?;
            // (a) nu inducing exactly a single edge
            if nu.count_ones() == 2 {
                rep.check(f_nu == 1, || {
                    format!("{} {} nu={:?}: f={f_nu} != 1", graph_tag(g), t.describe(),
                        mask_vertices(nu))
                });
            }
            // (b) base-side removal
            for u in mask_vertices(t.s & nu) {
                let rest = nu & !(1 << u);
                if pv.e_within(rest) >= 1 {
                    let f_rest = f_value(g, &t, rest)?;
                    rep.check(f_nu as i64 - f_rest as i64 == 1, || {
                        format!(
                            "{} {} nu={:?} u={u}: f({:?})={f_nu}, f minus u = {f_rest}",
                            graph_tag(g), t.describe(), mask_vertices(nu), mask_vertices(nu)
                        )
                    });
                }
            }
            // (c) bounded-side removal, existential
            let e_nu = pv.e_within(nu);
            let others: Vec<usize> = mask_vertices(t.t & nu)
                .into_iter()
                .filter(|&v| v != t.v_star)
                .collect();
            let hypothesis = others
                .iter()
                .any(|&v| (pv.adj[v] & nu).count_ones() < e_nu);
            if hypothesis {
                let witness = others.iter().any(|&v| {
                    let rest = nu & !(1 << v);
                    pv.e_within(rest) >= 1
                        && f_value(g, &t, rest).is_ok_and(|f_rest| {
                            f_nu as i64 - f_rest as i64 == pv.deg[v] as i64
                        })
                });
                rep.check(witness, || {
                    format!(
                        "{} {} nu={:?}: no bounded-side vertex removes at its degree",
                        graph_tag(g), t.describe(), mask_vertices(nu)
                    )
                });
            }
        }
    }
    Ok(rep)
}

/// f(nu) >= e(nu), with equality whenever S ∪ {v*} ⊆ nu.
fn suite_f_vs_e(c: &Corpus) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("f-vs-e");
    for &(gi, t) in &c.triples {
        let g = &c.graphs[gi];
        let pv = PatternView::new(g)?;
        for nu in edgy_subsets(&pv) {
            let f_nu = f_value(g, &t, nu)?;
            let e_nu = pv.e_within(nu);
            rep.check(f_nu >= e_nu, || {
                format!("{} {} nu={:?}: f={f_nu} < e={e_nu}", graph_tag(g), t.describe(),
                    mask_vertices(nu))
            });
            if nu & (t.s | 1 << t.v_star) == t.s | 1 << t.v_star {
                rep.check(f_nu == e_nu, || {
                    format!("{} {} nu={:?}: f={f_nu} != e={e_nu} despite S+apex inside",
                        graph_tag(g), t.describe(), mask_vertices(nu))
                });
            }
        }
    }
    Ok(rep)
}

/// f(nu) <= e(F) and f(nu) <= -(r-1)(|S ∩ nu|-1) + r(|nu|-2) + 1.
fn suite_f_upper_bounds(c: &Corpus) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("f-upper-bounds");
    for &(gi, t) in &c.triples {
        let g = &c.graphs[gi];
        let pv = PatternView::new(g)?;
        for nu in edgy_subsets(&pv) {
            let f_nu = f_value(g, &t, nu)? as i64;
            let r = t.r as i64;
            let s_in = (t.s & nu).count_ones() as i64;
            let size = nu.count_ones() as i64;
            let bound = -(r - 1) * (s_in - 1) + r * (size - 2) + 1;
            rep.check(f_nu <= g.edge_count() as i64 && f_nu <= bound, || {
                format!("{} {} nu={:?}: f={f_nu}, e(F)={}, structural bound={bound}",
                    graph_tag(g), t.describe(), mask_vertices(nu), g.edge_count())
            });
        }
    }
    Ok(rep)
}

/// For cyclic patterns: A and B are nonempty and a(F) <= 1.
fn suite_ab_wellposed(c: &Corpus) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("ab-nonempty-and-a-at-most-1");
    for &(gi, t) in &c.triples {
        let g = &c.graphs[gi];
        if !g.has_cycle() {
            continue;
        }
        let a = a_of_f(g, &t);
        let b = b_of_f(g, &t);
        rep.check(
            a.as_ref().is_ok_and(|(a, _)| *a <= rat(1, 1)) && b.is_ok(),
            || format!("{} {}: a={a:?}", graph_tag(g), t.describe()),
        );
    }
    Ok(rep)
}

/// For cyclic patterns: a(F) >= (r-1)/(r*Delta-1), Delta the max degree in S.
fn suite_a_lower_bound(c: &Corpus) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("a-lower-bound");
    for &(gi, t) in &c.triples {
        let g = &c.graphs[gi];
        if !g.has_cycle() {
            continue;
        }
        let delta = mask_vertices(t.s).into_iter().map(|u| g.degree(u) as i64).max().unwrap_or(0);
        let r = t.r as i64;
        if r * delta <= 1 {
            continue;
        }
        let (a, _) = a_of_f(g, &t)?;
        let lb = rat(r - 1, r * delta - 1);
        rep.check(a >= lb, || {
            format!("{} {}: a={} < {}", graph_tag(g), t.describe(), rat_str(&a), rat_str(&lb))
        });
    }
    Ok(rep)
}

/// When every vertex of T \ {v*} has degree exactly r:
/// f(nu) = |S ∩ nu| + r(|T ∩ nu| - 1).
fn suite_f_regular_closed_form(c: &Corpus) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("f-closed-form-when-bounded-side-regular");
    for &(gi, t) in &c.triples {
        let g = &c.graphs[gi];
        let regular = mask_vertices(t.t)
            .into_iter()
            .filter(|&v| v != t.v_star)
            .all(|v| g.degree(v) as u32 == t.r);
        if !regular {
            continue;
        }
        let pv = PatternView::new(g)?;
        for nu in edgy_subsets(&pv) {
            let f_nu = f_value(g, &t, nu)? as i64;
            let expect =
                (t.s & nu).count_ones() as i64 + t.r as i64 * ((t.t & nu).count_ones() as i64 - 1);
            rep.check(f_nu == expect, || {
                format!("{} {} nu={:?}: f={f_nu} != {expect}", graph_tag(g), t.describe(),
                    mask_vertices(nu))
            });
        }
    }
    Ok(rep)
}

/// Cyclic graphs have m2 > 1; forests with two adjacent edges have m2 = 1.
fn suite_m2_dichotomy(c: &Corpus) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("m2-cycle-forest-dichotomy");
    for g in &c.graphs {
        if g.n() < 3 {
            continue;
        }
        let val = m2(g)?;
        if g.has_cycle() {
            rep.check(val > rat(1, 1), || format!("{}: m2={}", graph_tag(g), rat_str(&val)));
        } else if g.max_degree() >= 2 {
            rep.check(val == rat(1, 1), || format!("{}: m2={}", graph_tag(g), rat_str(&val)));
        }
    }
    Ok(rep)
}

/// For cyclic patterns with an apex triple, every m2-maximizer contains v*.
fn suite_m2_witness_apex(c: &Corpus) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("m2-maximizers-contain-apex");
    for &(gi, t) in &c.triples {
        let g = &c.graphs[gi];
        if !g.has_cycle() {
            continue;
        }
        rep.check(maximizer_contains_apex_check(g, &t)?, || {
            format!("{} {}: some m2-maximizer misses v*", graph_tag(g), t.describe())
        });
    }
    Ok(rep)
}

/// tau exponent checks on a 50-point grid of q = n^x, x in [-2, 0], with
/// exact endpoint arithmetic: non-increasing in q, >= 1, <= q^{1-r} n on
/// [n^{-1/r}, n^{(a-1)/r}], <= n^{2-1/m2} for q >= n^{-b}.
fn suite_tau_shape(c: &Corpus) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("tau-shape");
    for &(gi, t) in &c.triples {
        let g = &c.graphs[gi];
        if !g.has_cycle() {
            continue;
        }
        let m2f = m2(g)?;
        let (a, _) = a_of_f(g, &t)?;
        let (b, _) = b_of_f(g, &t)?;
        let r = t.r as i64;
        let mut grid: Vec<Rat> = (0..50).map(|i| rat(-2 * (49 - i), 49)).collect();
        // exact window endpoints
        grid.extend([rat(-1, r), (a - rat(1, 1)) / rat(r, 1), -b]);
        grid.sort();
        grid.dedup();
        let mut prev: Option<Rat> = None;
        for &x in &grid {
            let (tx, _) = tau_exponent_at(g, &t, x)?;
            // tau >= 1
            rep.check(tx >= rat(0, 1), || {
                format!("{} {} x={}: tau exponent {} < 0", graph_tag(g), t.describe(),
                    rat_str(&x), rat_str(&tx))
            });
            // non-increasing in q
            if let Some(p) = prev {
                rep.check(tx <= p, || {
                    format!("{} {} x={}: tau exponent increased", graph_tag(g), t.describe(),
                        rat_str(&x))
                });
            }
            prev = Some(tx);
            if x >= rat(-1, r) && x <= (a - rat(1, 1)) / rat(r, 1) {
                let bound = x * rat(1 - r, 1) + rat(1, 1);
                rep.check(tx <= bound, || {
                    format!("{} {} x={}: tau exponent {} > dense bound {}", graph_tag(g),
                        t.describe(), rat_str(&x), rat_str(&tx), rat_str(&bound))
                });
            }
            if x >= -b {
                let bound = rat(2, 1) - m2f.recip();
                rep.check(tx <= bound, || {
                    format!("{} {} x={}: tau exponent {} > plateau bound {}", graph_tag(g),
                        t.describe(), rat_str(&x), rat_str(&tx), rat_str(&bound))
                });
            }
        }
        // q = 1 threshold is at least n
        let (t0, _) = tau_exponent_at(g, &t, rat(0, 1))?;
        rep.check(t0 >= rat(1, 1), || {
            format!("{} {}: tau exponent at q=1 is {}", graph_tag(g), t.describe(), rat_str(&t0))
        });
    }
    Ok(rep)
}

/// Saturated-partial double counting on built families:
/// xi_nu <= 2|Phi|/D(nu) and xi_{psi',nu} <= 2 D(nu')/D(nu) for nu' ⊆ nu.
pub fn check_saturation_double_counting(fam: &DGoodFamily, rep: &mut SuiteReport) {
    let sat = fam.saturated_partials();
    let pv = PatternView::new(&fam.pattern).unwrap();
    let size = fam.members.len() as f64;
    for nu in edgy_subsets(&pv) {
        let on_nu: Vec<&(u32, Vec<u16>, u64)> = sat.iter().filter(|(m, _, _)| *m == nu).collect();
        let xi = on_nu.len() as f64;
        rep.check(xi <= 2.0 * size / fam.cap(nu) + 1e-9, || {
            format!("xi_nu={xi} exceeds 2|Phi|/D at nu={:?}", mask_vertices(nu))
        });
        // restrictions to sub-subsets with edges
        let mut sub = nu;
        loop {
            sub = sub.wrapping_sub(1) & nu;
            if pv.e_within(sub) >= 1 && sub != nu {
                let mut groups: std::collections::HashMap<Vec<u16>, u64> =
                    std::collections::HashMap::new();
                for (_, im, _) in &on_nu {
                    // restrict images on nu to the positions of sub
                    let vs = mask_vertices(nu);
                    let rim: Vec<u16> = vs
                        .iter()
                        .enumerate()
                        .filter(|(_, &v)| sub >> v & 1 == 1)
                        .map(|(i, _)| im[i])
                        .collect();
                    *groups.entry(rim).or_insert(0) += 1;
                }
                let bound = 2.0 * fam.cap(sub) / fam.cap(nu);
                for (im, cnt) in groups {
                    rep.check(cnt as f64 <= bound + 1e-9, || {
                        format!(
                            "xi_psi={cnt} exceeds 2D(nu')/D(nu) at nu={:?} nu'={:?} psi'={im:?}",
                            mask_vertices(nu), mask_vertices(sub)
                        )
                    });
                }
            }
            if sub == 0 {
                break;
            }
        }
    }
}

fn suite_saturation(_c: &Corpus) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("saturation-double-counting");
    let f = complete_bipartite(2, 2)?;
    let t = find_triples(&f, 2)?[0];
    let mut hosts = vec![complete_bipartite(4, 4)?, complete_bipartite(3, 5)?];
    for seed in 0..3 {
        hosts.push(sample_bipartite(5, 5, 0.7, seed)?);
    }
    for host in hosts {
        if host.edge_count() == 0 {
            continue;
        }
        let ctx = crate::semibounded::BalancingContext::from_host(&host, 0.5, 1.0)?;
        let fam = build_dgood(&f, &t, &host, &ctx, 17)?;
        rep.check(fam.recount_violations().is_empty(), || "recount failed".to_string());
        check_saturation_double_counting(&fam, &mut rep);
    }
    Ok(rep)
}

/// m2(F_M) closed form over all balanced multigraphs with v <= 4, total
/// multiplicity <= 5.
fn suite_fm_m2_closed_form(_c: &Corpus) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("fm-m2-closed-form");
    for v in 2..=4 {
        for m in small_multigraphs(v, 5) {
            if !multigraph_balanced(&m)?.balanced {
                continue;
            }
            rep.check(verify_multibalanced_m2(&m)?, || {
                format!("multigraph {}", m.to_text().replace('\n', " "))
            });
            // exponent closed form a(F_M) = (v-1)/(v+2e-1)
            let rec = build_f_m(&m)?;
            let (a, _) = a_of_f(&rec.graph, &rec.triple)?;
            let expect = rat(m.n() as i64 - 1, m.n() as i64 + 2 * m.edge_count() as i64 - 1);
            rep.check(a == expect, || {
                format!(
                    "multigraph {}: a={} expected {}",
                    m.to_text().replace('\n', " "),
                    rat_str(&a),
                    rat_str(&expect)
                )
            });
        }
    }
    Ok(rep)
}

pub fn run_all(max_vertices: usize) -> Result<Vec<SuiteReport>> {
    let c = corpus(max_vertices.clamp(2, 8))?;
    Ok(vec![
        suite_f_removal(&c)?,
        suite_f_vs_e(&c)?,
        suite_f_upper_bounds(&c)?,
        suite_ab_wellposed(&c)?,
        suite_a_lower_bound(&c)?,
        suite_f_regular_closed_form(&c)?,
        suite_m2_dichotomy(&c)?,
        suite_m2_witness_apex(&c)?,
        suite_tau_shape(&c)?,
        suite_saturation(&c)?,
        suite_fm_m2_closed_form(&c)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semibounded::nu_stats;

    #[test]
    fn nu_stats_agrees_with_f_value_over_small_corpus() {
        let c = corpus(5).unwrap();
        for &(gi, t) in &c.triples {
            let g = &c.graphs[gi];
            let pv = PatternView::new(g).unwrap();
            for nu in 0..=pv.full_mask() {
                let st = nu_stats(g, &t, nu).unwrap();
                assert_eq!(st.f_nu, f_value(g, &t, nu).ok());
                assert_eq!(st.e_nu, pv.e_within(nu));
            }
        }
    }
}
