//! G(n,p) experiments: reproducible sampling, exact and heuristic maximum
//! pattern-free subgraph estimation, closed-form exponent predictions and
//! factorial sweeps.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::constructions;
use crate::density::{density_report, m2};
use crate::error::{Error, Result};
use crate::graph::{
    as_complete_bipartite, complete_bipartite, contains_copy, creates_copy_with_edge,
    first_embedding, mask_vertices, Graph, Multigraph,
};
use crate::rational::{rat, serde_opt_rat, Rat};
use crate::semibounded::{a_of_f, b_of_f, canonical_triple, SemiBoundedTriple};

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

pub fn mix_seed(parts: &[u64]) -> u64 {
    parts.iter().fold(0x243f6a8885a308d3, |acc, &p| splitmix(acc ^ splitmix(p)))
}

/// One uniform variate per vertex pair, generated by a counter-based stream
/// (ChaCha8 keyed on (n, seed) only), so the same seed couples the whole
/// p-grid: graph_at(p1) is a subgraph of graph_at(p2) whenever p1 <= p2.
pub struct CoupledGnp {
    n: usize,
    u: Vec<f64>, // pairs (i, j), i < j, lexicographic
}

impl CoupledGnp {
    pub fn new(n: usize, seed: u64) -> Result<CoupledGnp> {
        Graph::new(n)?; // range check
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(&[n as u64, seed]));
        let u = (0..n * (n.saturating_sub(1)) / 2)
            .map(|_| rng.gen::<f64>())
            .collect();
        Ok(CoupledGnp { n, u })
    }

    pub fn graph_at(&self, p: f64) -> Result<Graph> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain(format!("p={p} outside [0,1]")));
        }
        let mut g = Graph::new(self.n)?;
        let mut k = 0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.u[k] < p {
                    g.add_edge(i, j)?;
                }
                k += 1;
            }
        }
        Ok(g)
    }
}

/// G(n,p) sample; (n, p, seed) fully determine the output.
pub fn sample_gnp(n: usize, p: f64, seed: u64) -> Result<Graph> {
    CoupledGnp::new(n, seed)?.graph_at(p)
}

/// Random bipartite host: sides 0..a and a..a+b, each cross pair kept with
/// probability p. Deterministic in (a, b, p, seed).
pub fn sample_bipartite(a: usize, b: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("p={p} outside [0,1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(&[a as u64, b as u64, seed, 0xb1]));
    let mut g = Graph::new(a + b)?;
    for u in 0..a {
        for v in a..a + b {
            if rng.gen::<f64>() < p {
                g.add_edge(u, v)?;
            }
        }
    }
    Ok(g)
}

/// Exact maximum pattern-free edge count by branch and bound: find a copy,
/// branch on which of its edges to delete (earlier branches pin their edge
/// as kept, so branches are disjoint). `node_budget` caps search nodes.
pub fn max_f_free_exact(
    g: &Graph,
    f: &Graph,
    node_budget: u64,
) -> Result<(u32, Vec<(u16, u16)>)> {
    if f.edge_count() == 0 {
        return Err(Error::domain("pattern must have at least one edge"));
    }
    struct St<'a> {
        f: &'a Graph,
        h: Graph,
        kept_forced: std::collections::HashSet<(u16, u16)>,
        removed: usize,
        total: usize,
        best: u32,
        best_edges: Vec<(u16, u16)>,
        nodes: u64,
        budget: u64,
    }
    fn rec(st: &mut St) -> Result<()> {
        st.nodes += 1;
        if st.nodes > st.budget {
            return Err(Error::resource(format!(
                "exact search exceeded {} nodes",
                st.budget
            )));
        }
        if (st.total - st.removed) as u32 <= st.best {
            return Ok(()); // can't beat the incumbent
        }
        match first_embedding(st.f, &st.h) {
            None => {
                st.best = (st.total - st.removed) as u32;
                st.best_edges = st.h.edges().to_vec();
                Ok(())
            }
            Some(emb) => {
                let mut copy_edges: Vec<(u16, u16)> = st
                    .f
                    .edges()
                    .iter()
                    .map(|&(a, b)| {
                        let (u, v) = (emb.map[a as usize], emb.map[b as usize]);
                        (u.min(v), u.max(v))
                    })
                    .collect();
                copy_edges.sort_unstable();
                copy_edges.dedup();
                let mut pinned: Vec<(u16, u16)> = Vec::new();
                for &e in &copy_edges {
                    if st.kept_forced.contains(&e) {
                        continue;
                    }
                    st.h.remove_edge(e.0 as usize, e.1 as usize);
                    st.removed += 1;
                    rec(st)?;
                    st.removed -= 1;
                    st.h.add_edge(e.0 as usize, e.1 as usize).unwrap();
                    st.kept_forced.insert(e);
                    pinned.push(e);
                }
                for e in pinned {
                    st.kept_forced.remove(&e);
                }
                Ok(())
            }
        }
    }
    let mut st = St {
        f,
        h: g.clone(),
        kept_forced: std::collections::HashSet::new(),
        removed: 0,
        total: g.edge_count(),
        best: 0,
        best_edges: Vec::new(),
        nodes: 0,
        budget: node_budget,
    };
    rec(&mut st)?;
    debug_assert!({
        let w = Graph::from_edges(
            g.n(),
            &st.best_edges.iter().map(|&(u, v)| (u as usize, v as usize)).collect::<Vec<_>>(),
        )
        .unwrap();
        !contains_copy(f, &w)
    });
    Ok((st.best, st.best_edges))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct HeuristicParams {
    pub restarts: u32,
    pub iterations: u32,
    pub destroy_frac: f64,
}

impl Default for HeuristicParams {
    fn default() -> Self {
        HeuristicParams { restarts: 3, iterations: 60, destroy_frac: 0.15 }
    }
}

fn greedy_pass(
    n: usize,
    f: &Graph,
    h: &mut Graph,
    candidates: &[(u16, u16)],
) -> Vec<(u16, u16)> {
    let _ = n;
    let mut added = Vec::new();
    for &(u, v) in candidates {
        let (u, v) = (u as usize, v as usize);
        if h.has_edge(u, v) {
            continue;
        }
        h.add_edge(u, v).unwrap();
        if creates_copy_with_edge(f, h, u, v) {
            h.remove_edge(u, v);
        } else {
            added.push((u as u16, v as u16));
        }
    }
    added
}

/// Greedy insertion plus destroy-and-repair local search. Deterministic in
/// `seed`. Returns the best pattern-free edge count and a witness edge set.
pub fn max_f_free_heuristic(
    g: &Graph,
    f: &Graph,
    params: &HeuristicParams,
    seed: u64,
) -> Result<(u32, Vec<(u16, u16)>)> {
    if f.edge_count() == 0 {
        return Err(Error::domain("pattern must have at least one edge"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(&[seed, 0x4c6e]));
    let mut best: (u32, Vec<(u16, u16)>) = (0, vec![]);
    for _ in 0..params.restarts.max(1) {
        let mut order: Vec<(u16, u16)> = g.edges().to_vec();
        order.shuffle(&mut rng);
        let mut h = Graph::new(g.n())?;
        greedy_pass(g.n(), f, &mut h, &order);
        let mut cur: Vec<(u16, u16)> = h.edges().to_vec();
        for _ in 0..params.iterations {
            let k = ((cur.len() as f64 * params.destroy_frac).ceil() as usize).max(1);
            let mut removed: Vec<(u16, u16)> = Vec::new();
            let mut pool = cur.clone();
            pool.shuffle(&mut rng);
            for &(u, v) in pool.iter().take(k.min(pool.len())) {
                h.remove_edge(u as usize, v as usize);
                removed.push((u, v));
            }
            let mut cands: Vec<(u16, u16)> = g
                .edges()
                .iter()
                .copied()
                .filter(|&(u, v)| !h.has_edge(u as usize, v as usize))
                .collect();
            cands.shuffle(&mut rng);
            greedy_pass(g.n(), f, &mut h, &cands);
            if h.edge_count() >= cur.len() {
                cur = h.edges().to_vec();
            } else {
                // revert to the previous solution
                let target: std::collections::HashSet<(u16, u16)> =
                    cur.iter().copied().collect();
                let hs: Vec<(u16, u16)> = h.edges().to_vec();
                for (u, v) in hs {
                    if !target.contains(&(u, v)) {
                        h.remove_edge(u as usize, v as usize);
                    }
                }
                for &(u, v) in &cur {
                    h.add_edge(u as usize, v as usize)?;
                }
            }
            if cur.len() as u32 > best.0 {
                best = (cur.len() as u32, cur.clone());
            }
        }
        if cur.len() as u32 > best.0 {
            best = (cur.len() as u32, cur);
        }
    }
    best.1.sort_unstable();
    Ok(best)
}

/// Which closed-form exponent statement to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremChoice {
    /// strongest applicable statement
    Auto,
    /// complete bipartite patterns
    Kst,
    /// subdivision-plus-apex families F_M (needs the source multigraph)
    Multigraph,
    /// r-regular attachment patterns with the exact balance condition
    General,
    /// upper bound from the max base-side degree
    Maxdeg,
    /// small-p plateau upper bound
    Smallp,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExponentPrediction {
    pub theorem: String,
    pub triple: Option<String>,
    /// n-exponent of p where the plateau starts (-1/m2 for tight statements)
    #[serde(with = "serde_opt_rat")]
    pub p_lower_exp: Option<Rat>,
    /// n-exponent of p where the plateau ends / the dense regime begins
    #[serde(with = "serde_opt_rat")]
    pub p_upper_exp: Option<Rat>,
    /// ex(G(n,p), F) ~ n^plateau_n_exp on the plateau
    #[serde(with = "serde_opt_rat")]
    pub plateau_n_exp: Option<Rat>,
    /// dense regime ~ p^dense_p_exp n^dense_n_exp
    #[serde(with = "serde_opt_rat")]
    pub dense_p_exp: Option<Rat>,
    #[serde(with = "serde_opt_rat")]
    pub dense_n_exp: Option<Rat>,
    /// sparse regime description
    pub sparse: String,
    pub upper_bound_only: bool,
    /// true when the stated plateau window is empty
    pub degenerate: bool,
    pub assumptions: Vec<String>,
    /// which statement produced each piece
    pub provenance: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Prediction {
    Exponents(ExponentPrediction),
    NoPrediction { reason: String },
}

const SPARSE: &str = "(1+o(1)) * p * binomial(n,2)";

fn base_prediction(theorem: &str) -> ExponentPrediction {
    ExponentPrediction {
        theorem: theorem.to_string(),
        triple: None,
        p_lower_exp: None,
        p_upper_exp: None,
        plateau_n_exp: None,
        dense_p_exp: None,
        dense_n_exp: None,
        sparse: SPARSE.to_string(),
        upper_bound_only: false,
        degenerate: false,
        assumptions: vec![],
        provenance: vec![],
    }
}

fn kst_prediction(r: i64, t: i64) -> ExponentPrediction {
    let mut p = base_prediction("kst");
    p.p_lower_exp = Some(rat(-(r + t - 2), r * t - 1));
    p.p_upper_exp = Some(rat(-(r - 1), r * t - 1));
    p.plateau_n_exp = Some(rat(2, 1) - rat(r + t - 2, r * t - 1));
    p.dense_p_exp = Some(rat(1, 1) - rat(1, r));
    p.dense_n_exp = Some(rat(2, 1) - rat(1, r));
    p.provenance = vec!["complete-bipartite exponent statement".to_string()];
    if !(r == 2 || (r == 3 && t >= 3) || t > ((2..r).product::<i64>())) {
        p.assumptions
            .push(format!("assumes ex(n, K_{{{r},{t}}}) = Theta(n^{{2-1/{r}}})"));
    }
    p
}

/// largest t with K_{r,t} a subgraph of f (t >= r required for the dense
/// exponent hypothesis); None when even K_{r,r} is absent.
fn max_t_complete_bipartite(f: &Graph, r: usize) -> Option<usize> {
    let mut best = None;
    for t in r..=f.n().saturating_sub(r) {
        let k = complete_bipartite(r, t).ok()?;
        if contains_copy(&k, f) {
            best = Some(t);
        } else {
            break;
        }
    }
    best
}

fn triple_for(f: &Graph, triple: Option<&SemiBoundedTriple>) -> Result<SemiBoundedTriple> {
    match triple {
        Some(t) => Ok(*t),
        None => canonical_triple(f)?
            .ok_or_else(|| Error::domain("pattern admits no semi-bounded triple")),
    }
}

fn general_prediction(f: &Graph, triple: &SemiBoundedTriple) -> Result<ExponentPrediction> {
    let s = triple.s.count_ones() as i64;
    let t = triple.t.count_ones() as i64;
    let r = triple.r as i64;
    let others: Vec<usize> = mask_vertices(triple.t)
        .into_iter()
        .filter(|&v| v != triple.v_star)
        .collect();
    if others.iter().any(|&v| f.degree(v) as i64 != r) {
        return Err(Error::domain(
            "general statement needs every vertex of T \\ {v*} to have degree exactly r",
        ));
    }
    let rep = density_report(f)?;
    if !rep.two_balanced {
        return Err(Error::domain("general statement needs a 2-balanced pattern"));
    }
    let bc = constructions::general_balance_check(f, triple)?;
    if !bc.balanced {
        return Err(Error::domain("general statement needs the balance condition"));
    }
    let tmax = max_t_complete_bipartite(f, r as usize).ok_or_else(|| {
        Error::domain(format!("general statement needs K_{{{r},{r}}} inside the pattern"))
    })?;
    let den = s - 1 + r * (t - 1);
    let mut p = base_prediction("general");
    p.triple = Some(triple.describe());
    p.p_lower_exp = Some(rat(-(s + t - 2), den));
    p.p_upper_exp = Some(rat(-(s - 1), den));
    p.plateau_n_exp = Some(rat(2, 1) - rat(s + t - 2, den));
    p.dense_p_exp = Some(rat(1, 1) - rat(1, r));
    p.dense_n_exp = Some(rat(2, 1) - rat(1, r));
    p.provenance = vec!["r-regular attachment exponent statement".to_string()];
    p.assumptions.push(format!(
        "assumes ex(n, K_{{{r},{tmax}}}) = Theta(n^{{2-1/{r}}}) for the K_{{{r},{tmax}}} inside the pattern"
    ));
    Ok(p)
}

fn multigraph_prediction(m: &Multigraph) -> Result<ExponentPrediction> {
    let bc = constructions::multigraph_balanced(m)?;
    if !bc.balanced {
        return Err(Error::domain(
            "multigraph statement needs a balanced source multigraph",
        ));
    }
    let v = m.n() as i64;
    let e = m.edge_count() as i64;
    let mut p = base_prediction("multigraph");
    p.p_lower_exp = Some(rat(-(v + e - 1), v + 2 * e - 1));
    p.p_upper_exp = Some(rat(-(v - 1), v + 2 * e - 1));
    p.plateau_n_exp = Some(rat(2, 1) - rat(v + e - 1, v + 2 * e - 1));
    p.dense_p_exp = Some(rat(1, 2));
    p.dense_n_exp = Some(rat(3, 2));
    p.provenance = vec!["subdivision-plus-apex exponent statement".to_string()];
    Ok(p)
}

fn maxdeg_prediction(f: &Graph, triple: &SemiBoundedTriple) -> Result<ExponentPrediction> {
    let r = triple.r as i64;
    let delta = mask_vertices(triple.s)
        .into_iter()
        .map(|u| f.degree(u) as i64)
        .max()
        .ok_or_else(|| Error::domain("max-degree statement needs a nonempty S"))?;
    if r * delta <= 1 {
        return Err(Error::domain("max-degree statement needs r*Delta >= 2"));
    }
    let mut p = base_prediction("maxdeg");
    p.triple = Some(triple.describe());
    p.p_upper_exp = Some(rat(-(r - 1), r * delta - 1));
    p.dense_p_exp = Some(rat(1, 1) - rat(1, r));
    p.dense_n_exp = Some(rat(2, 1) - rat(1, r));
    p.upper_bound_only = true;
    p.provenance =
        vec!["max-base-degree upper bound (dense regime valid above p_upper)".to_string()];
    Ok(p)
}

fn smallp_prediction(f: &Graph, triple: &SemiBoundedTriple) -> Result<ExponentPrediction> {
    if !crate::density::maximizer_contains_apex_check(f, triple)? {
        return Err(Error::domain(
            "small-p statement needs every m2-maximizer to contain the apex",
        ));
    }
    let m2f = m2(f)?;
    let e = f.edge_count() as i64;
    let mut p = base_prediction("smallp");
    p.triple = Some(triple.describe());
    p.p_lower_exp = Some(-m2f.recip());
    p.p_upper_exp = Some(rat(1, e * e) - m2f.recip());
    p.plateau_n_exp = Some(rat(2, 1) - m2f.recip());
    p.upper_bound_only = true;
    p.provenance = vec!["small-p plateau upper bound".to_string()];
    Ok(p)
}

fn semibounded_prediction(f: &Graph, triple: &SemiBoundedTriple) -> Result<ExponentPrediction> {
    let m2f = m2(f)?;
    let (a, _) = a_of_f(f, triple)?;
    let r = triple.r as i64;
    let mut p = base_prediction("semibounded");
    p.triple = Some(triple.describe());
    p.p_lower_exp = Some(-m2f.recip());
    p.p_upper_exp = Some(-a);
    p.plateau_n_exp = Some(rat(2, 1) - m2f.recip());
    p.dense_p_exp = Some(rat(1, 1) - rat(1, r));
    p.dense_n_exp = Some(rat(2, 1) - rat(1, r));
    p.upper_bound_only = true;
    p.provenance = vec![
        "dense upper bound valid for p >= n^{-a(F)}".to_string(),
        "plateau upper bound valid for p <= n^{min(b(F),1/r)-1/m2}".to_string(),
    ];
    if let Ok((b, _)) = b_of_f(f, triple) {
        let capped = b.min(rat(1, r));
        p.provenance.push(format!(
            "plateau window cap exponent: min(b,1/r)-1/m2 = {}",
            crate::rational::rat_str(&(capped - m2f.recip()))
        ));
    }
    Ok(p)
}

fn finalize(mut p: ExponentPrediction) -> Prediction {
    if let (Some(lo), Some(hi)) = (p.p_lower_exp, p.p_upper_exp) {
        p.degenerate = lo > hi;
    }
    Prediction::Exponents(p)
}

/// Closed-form exponent prediction for ex(G(n,p), F).
pub fn predict(
    f: &Graph,
    triple: Option<&SemiBoundedTriple>,
    theorem: TheoremChoice,
    m: Option<&Multigraph>,
) -> Result<Prediction> {
    match theorem {
        TheoremChoice::Kst => {
            let (r, t) = as_complete_bipartite(f).ok_or_else(|| {
                Error::domain("kst statement needs a complete bipartite pattern")
            })?;
            Ok(finalize(kst_prediction(r as i64, t as i64)))
        }
        TheoremChoice::Multigraph => {
            let m = m.ok_or_else(|| {
                Error::domain("multigraph statement needs the source multigraph")
            })?;
            Ok(finalize(multigraph_prediction(m)?))
        }
        TheoremChoice::General => {
            let t = triple_for(f, triple)?;
            Ok(finalize(general_prediction(f, &t)?))
        }
        TheoremChoice::Maxdeg => {
            let t = triple_for(f, triple)?;
            Ok(finalize(maxdeg_prediction(f, &t)?))
        }
        TheoremChoice::Smallp => {
            let t = triple_for(f, triple)?;
            Ok(finalize(smallp_prediction(f, &t)?))
        }
        TheoremChoice::Auto => {
            if let Some(m) = m {
                if let Ok(p) = multigraph_prediction(m) {
                    return Ok(finalize(p));
                }
            }
            if let Some((r, t)) = as_complete_bipartite(f) {
                return Ok(finalize(kst_prediction(r as i64, t as i64)));
            }
            if !f.has_cycle() {
                return Ok(Prediction::NoPrediction {
                    reason: "pattern is a forest; no closed-form exponent statement applies"
                        .into(),
                });
            }
            let t = match triple.copied().or(canonical_triple(f)?) {
                Some(t) => t,
                None => {
                    return Ok(Prediction::NoPrediction {
                        reason: "pattern admits no semi-bounded triple".into(),
                    })
                }
            };
            if let Ok(p) = general_prediction(f, &t) {
                return Ok(finalize(p));
            }
            Ok(finalize(semibounded_prediction(f, &t)?))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Auto,
    Exact,
    Heuristic,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepConfig {
    pub n_list: Vec<usize>,
    pub p_exps: Vec<f64>,
    pub reps: u32,
    pub method: Method,
    pub seed: u64,
    /// auto: exact when e(G) is at most this
    pub exact_edge_limit: usize,
    pub exact_node_budget: u64,
    pub heuristic: HeuristicParams,
    /// wall-clock cutoff; cells past it are reported as skipped
    #[serde(skip)]
    pub deadline: Option<std::time::Instant>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            n_list: vec![],
            p_exps: vec![],
            reps: 5,
            method: Method::Auto,
            seed: 0,
            exact_edge_limit: 40,
            exact_node_budget: 20_000_000,
            heuristic: HeuristicParams::default(),
            deadline: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub p_exp: f64,
    pub p: f64,
    pub rep: u32,
    pub seed: u64,
    pub edges: usize,
    pub ex_est: u32,
    pub method: String,
    pub time_ms: u64,
    pub skipped: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub budget_exceeded: bool,
}

/// Factorial sweep over n x p-exponent x replicate. Replicates at the same
/// (n, rep) share coupled samples across the p-grid. Deterministic in seed.
pub fn sweep(f: &Graph, cfg: &SweepConfig) -> Result<SweepResult> {
    if f.edge_count() == 0 {
        return Err(Error::domain("pattern must have at least one edge"));
    }
    let mut cells: Vec<(usize, f64, u32)> = Vec::new();
    for &n in &cfg.n_list {
        for &pe in &cfg.p_exps {
            for rep in 0..cfg.reps {
                cells.push((n, pe, rep));
            }
        }
    }
    let rows: Vec<SweepRow> = cells
        .par_iter()
        .map(|&(n, p_exp, rep)| {
            let cell_seed = mix_seed(&[cfg.seed, n as u64, rep as u64]);
            let p = (n as f64).powf(p_exp).min(1.0);
            let start = std::time::Instant::now();
            if cfg.deadline.is_some_and(|d| std::time::Instant::now() > d) {
                return Ok(SweepRow {
                    n,
                    p_exp,
                    p,
                    rep,
                    seed: cell_seed,
                    edges: 0,
                    ex_est: 0,
                    method: "skipped".into(),
                    time_ms: 0,
                    skipped: true,
                });
            }
            let g = CoupledGnp::new(n, cell_seed)?.graph_at(p)?;
            let edges = g.edge_count();
            let (ex_est, method) = match cfg.method {
                Method::Exact => {
                    (max_f_free_exact(&g, f, cfg.exact_node_budget)?.0, "exact")
                }
                Method::Heuristic => (
                    max_f_free_heuristic(&g, f, &cfg.heuristic, cell_seed)?.0,
                    "heuristic",
                ),
                Method::Auto => {
                    if edges <= cfg.exact_edge_limit {
                        match max_f_free_exact(&g, f, cfg.exact_node_budget) {
                            Ok((v, _)) => (v, "exact"),
                            Err(Error::Resource(_)) => (
                                max_f_free_heuristic(&g, f, &cfg.heuristic, cell_seed)?.0,
                                "heuristic",
                            ),
                            Err(e) => return Err(e),
                        }
                    } else {
                        (
                            max_f_free_heuristic(&g, f, &cfg.heuristic, cell_seed)?.0,
                            "heuristic",
                        )
                    }
                }
            };
            Ok(SweepRow {
                n,
                p_exp,
                p,
                rep,
                seed: cell_seed,
                edges,
                ex_est,
                method: method.to_string(),
                time_ms: start.elapsed().as_millis() as u64,
                skipped: false,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = rows;
    rows.sort_by(|a, b| {
        a.n.cmp(&b.n)
            .then(a.p_exp.partial_cmp(&b.p_exp).unwrap())
            .then(a.rep.cmp(&b.rep))
    });
    let budget_exceeded = rows.iter().any(|r| r.skipped);
    Ok(SweepResult { rows, budget_exceeded })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub max_abs_residual: f64,
}

/// Least-squares slope of log(y) against log(x).
pub fn fit_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 2 {
        return Err(Error::domain("slope fit needs at least two points"));
    }
    if points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return Err(Error::domain("slope fit needs positive coordinates"));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let sx: f64 = logs.iter().map(|p| p.0).sum();
    let sy: f64 = logs.iter().map(|p| p.1).sum();
    let sxx: f64 = logs.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = logs.iter().map(|p| p.0 * p.1).sum();
    let det = n * sxx - sx * sx;
    if det.abs() < 1e-12 {
        return Err(Error::domain("slope fit is degenerate: all x equal"));
    }
    let slope = (n * sxy - sx * sy) / det;
    let intercept = (sy - slope * sx) / n;
    let max_abs_residual = logs
        .iter()
        .map(|&(x, y)| (y - slope * x - intercept).abs())
        .fold(0.0, f64::max);
    Ok(SlopeFit { slope, intercept, max_abs_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;

    fn c4() -> Graph {
        parse_graph("n=4; 0-1 1-2 2-3 3-0").unwrap()
    }

    #[test]
    fn gnp_is_reproducible_and_coupled() {
        let a = sample_gnp(30, 0.3, 7).unwrap();
        let b = sample_gnp(30, 0.3, 7).unwrap();
        assert_eq!(a, b);
        let c = sample_gnp(30, 0.3, 8).unwrap();
        assert_ne!(a, c); // overwhelmingly likely under a fixed good stream
        let cg = CoupledGnp::new(30, 7).unwrap();
        let lo = cg.graph_at(0.2).unwrap();
        let hi = cg.graph_at(0.5).unwrap();
        for &(u, v) in lo.edges() {
            assert!(hi.has_edge(u as usize, v as usize));
        }
    }

    #[test]
    fn gnp_edge_count_sane() {
        let g = sample_gnp(100, 0.25, 1).unwrap();
        let expect = 0.25 * 100.0 * 99.0 / 2.0;
        assert!((g.edge_count() as f64 - expect).abs() < 5.0 * (expect * 0.75).sqrt());
        assert!(sample_gnp(10, 1.5, 0).is_err());
    }

    fn brute_max_free(g: &Graph, f: &Graph) -> u32 {
        // independent oracle: scan all edge subsets, skipping those that
        // cannot beat the incumbent
        let edges = g.edges();
        let mut best = 0u32;
        for mask in 0u32..1 << edges.len() {
            let pc = mask.count_ones();
            if pc <= best {
                continue;
            }
            let sub: Vec<(usize, usize)> = (0..edges.len())
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| (edges[i].0 as usize, edges[i].1 as usize))
                .collect();
            let h = Graph::from_edges(g.n(), &sub).unwrap();
            if !contains_copy(f, &h) {
                best = pc;
            }
        }
        best
    }

    #[test]
    fn exact_matches_brute_force_on_small_instances() {
        for seed in 0..6 {
            let g = sample_gnp(7, 0.5, seed).unwrap();
            if g.edge_count() > 14 {
                continue;
            }
            let (v, wit) = max_f_free_exact(&g, &c4(), 1_000_000).unwrap();
            assert_eq!(v, brute_max_free(&g, &c4()), "seed {seed}");
            assert_eq!(v as usize, wit.len());
        }
    }

    #[test]
    fn exact_on_k23_leaving_out_one_c4_edge() {
        // ex(K_{2,3}, C4) = 4: keep a spanning double star
        let g = crate::graph::complete_bipartite(2, 3).unwrap();
        let (v, _) = max_f_free_exact(&g, &c4(), 100_000).unwrap();
        assert_eq!(v, 4);
    }

    #[test]
    fn exact_budget_is_enforced() {
        let g = sample_gnp(12, 0.8, 3).unwrap();
        match max_f_free_exact(&g, &c4(), 5) {
            Err(Error::Resource(_)) => {}
            other => panic!("expected resource error, got {other:?}"),
        }
    }

    #[test]
    fn heuristic_is_deterministic_and_dominated_by_exact() {
        let params = HeuristicParams::default();
        for seed in 0..4 {
            let g = sample_gnp(9, 0.4, seed).unwrap();
            let (h1, wit) = max_f_free_heuristic(&g, &c4(), &params, seed).unwrap();
            let (h2, _) = max_f_free_heuristic(&g, &c4(), &params, seed).unwrap();
            assert_eq!(h1, h2);
            let (ex, _) = max_f_free_exact(&g, &c4(), 10_000_000).unwrap();
            assert!(h1 <= ex);
            // witness is pattern-free
            let h = Graph::from_edges(
                g.n(),
                &wit.iter().map(|&(u, v)| (u as usize, v as usize)).collect::<Vec<_>>(),
            )
            .unwrap();
            assert!(!contains_copy(&c4(), &h));
        }
    }

    #[test]
    fn exact_is_monotone_under_coupling() {
        let cg = CoupledGnp::new(9, 5).unwrap();
        let mut prev = 0;
        for p in [0.1, 0.25, 0.4, 0.55] {
            let g = cg.graph_at(p).unwrap();
            let (v, _) = max_f_free_exact(&g, &c4(), 10_000_000).unwrap();
            assert!(v >= prev, "p={p}");
            prev = v;
        }
    }

    #[test]
    fn predict_k22_thresholds() {
        let pred = predict(&c4(), None, TheoremChoice::Auto, None).unwrap();
        match pred {
            Prediction::Exponents(p) => {
                assert_eq!(p.theorem, "kst");
                assert_eq!(p.p_lower_exp, Some(rat(-2, 3)));
                assert_eq!(p.p_upper_exp, Some(rat(-1, 3)));
                assert_eq!(p.plateau_n_exp, Some(rat(4, 3)));
                assert_eq!(p.dense_p_exp, Some(rat(1, 2)));
                assert_eq!(p.dense_n_exp, Some(rat(3, 2)));
                assert!(!p.degenerate);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn predict_triangle_family_thresholds() {
        let m = crate::graph::parse_multigraph("n=3; 0-1 1-2 0-2").unwrap();
        let pred = predict(
            &constructions::build_f_m(&m).unwrap().graph,
            None,
            TheoremChoice::Multigraph,
            Some(&m),
        )
        .unwrap();
        match pred {
            Prediction::Exponents(p) => {
                assert_eq!(p.p_lower_exp, Some(rat(-5, 8)));
                assert_eq!(p.p_upper_exp, Some(rat(-2, 8)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn predict_forest_has_no_prediction() {
        let path = parse_graph("n=4; 0-1 1-2 2-3").unwrap();
        match predict(&path, None, TheoremChoice::Auto, None).unwrap() {
            Prediction::NoPrediction { .. } => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn prediction_consistency_for_balanced_families() {
        // the multigraph and general statements must agree on F_M
        let m = crate::graph::parse_multigraph("n=3; 0-1 1-2 0-2").unwrap();
        let rec = constructions::build_f_m(&m).unwrap();
        let a = predict(&rec.graph, Some(&rec.triple), TheoremChoice::General, None).unwrap();
        let b = predict(&rec.graph, None, TheoremChoice::Multigraph, Some(&m)).unwrap();
        match (a, b) {
            (Prediction::Exponents(a), Prediction::Exponents(b)) => {
                assert_eq!(a.p_lower_exp, b.p_lower_exp);
                assert_eq!(a.p_upper_exp, b.p_upper_exp);
                assert_eq!(a.plateau_n_exp, b.plateau_n_exp);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sweep_is_deterministic() {
        let cfg = SweepConfig {
            n_list: vec![12, 16],
            p_exps: vec![-0.9, -0.6],
            reps: 2,
            ..Default::default()
        };
        let a = sweep(&c4(), &cfg).unwrap();
        let b = sweep(&c4(), &cfg).unwrap();
        let ex_a: Vec<u32> = a.rows.iter().map(|r| r.ex_est).collect();
        let ex_b: Vec<u32> = b.rows.iter().map(|r| r.ex_est).collect();
        assert_eq!(ex_a, ex_b);
        assert_eq!(a.rows.len(), 8);
        assert!(!a.budget_exceeded);
    }

    #[test]
    fn fit_slope_recovers_power_law() {
        let pts: Vec<(f64, f64)> =
            [10.0, 20.0, 40.0, 80.0].iter().map(|&x: &f64| (x, 3.0 * x.powf(1.5))).collect();
        let fit = fit_slope(&pts).unwrap();
        assert!((fit.slope - 1.5).abs() < 1e-9);
        assert!(fit.max_abs_residual < 1e-9);
        assert!(fit_slope(&[(1.0, 2.0)]).is_err());
        assert!(fit_slope(&[(1.0, 2.0), (1.0, 3.0)]).is_err());
    }
}
