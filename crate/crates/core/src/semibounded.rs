//! Semi-bounded triples (S, T, v*) and the structural parameters built on
//! them: the boundedness function f(nu), the exponents a(F) and b(F), the
//! degree caps D(nu) and the balancing threshold tau.

use serde::Serialize;

use crate::density::m2;
use crate::error::{Error, Result};
use crate::graph::{bipartitions, mask_vertices, Graph, PatternView};
use crate::rational::{rat, serde_opt_rat, Rat};

/// A triple (S, T, v*): S and T partition V(F), both sides are independent
/// sets, v* in T is adjacent to all of S, and every other vertex of T has
/// degree at most r in F.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SemiBoundedTriple {
    pub s: u32,
    pub t: u32,
    pub v_star: usize,
    pub r: u32,
}

impl SemiBoundedTriple {
    pub fn describe(&self) -> String {
        format!(
            "S={:?} T={:?} v*={} r={}",
            mask_vertices(self.s),
            mask_vertices(self.t),
            self.v_star,
            self.r
        )
    }
}

fn check_triple(pv: &PatternView, t: &SemiBoundedTriple) -> bool {
    let full = pv.full_mask();
    if t.s | t.t != full || t.s & t.t != 0 {
        return false;
    }
    if t.t >> t.v_star & 1 != 1 {
        return false;
    }
    if pv.e_within(t.s) != 0 || pv.e_within(t.t) != 0 {
        return false;
    }
    if pv.adj[t.v_star] & t.s != t.s {
        return false;
    }
    for v in mask_vertices(t.t) {
        if v != t.v_star && pv.deg[v] > t.r {
            return false;
        }
    }
    true
}

/// All r-semi-bounded triples of `f`, in a deterministic order
/// (by S mask, then v*). Both orientations of every bipartition are scanned.
pub fn find_triples(f: &Graph, r: u32) -> Result<Vec<SemiBoundedTriple>> {
    let pv = PatternView::new(f)?;
    let mut out = Vec::new();
    for (a, b) in bipartitions(f)? {
        for (s, t) in [(a, b), (b, a)] {
            for v_star in mask_vertices(t) {
                let cand = SemiBoundedTriple { s, t, v_star, r };
                if check_triple(&pv, &cand) {
                    out.push(cand);
                }
            }
        }
    }
    out.sort_by_key(|t| (t.s, t.v_star));
    out.dedup();
    Ok(out)
}

/// Is the triple valid for `f` at its own r?
pub fn is_valid_triple(f: &Graph, t: &SemiBoundedTriple) -> Result<bool> {
    Ok(check_triple(&PatternView::new(f)?, t))
}

/// Canonical triple: smallest r admitting one, then largest deg(v*), then
/// lexicographic (S mask, v*). None if no triple exists at any r <= v(F).
pub fn canonical_triple(f: &Graph) -> Result<Option<SemiBoundedTriple>> {
    for r in 1..=f.n().max(1) as u32 {
        let mut ts = find_triples(f, r)?;
        if ts.is_empty() {
            continue;
        }
        ts.sort_by_key(|t| (std::cmp::Reverse(f.degree(t.v_star)), t.s, t.v_star));
        return Ok(Some(ts[0]));
    }
    Ok(None)
}

/// f(nu) = |S ∩ nu| + sum of deg_F(v) over v in T ∩ nu, minus the largest
/// deg_F(v) among v in T ∩ nu that keep an edge inside F[nu]. Degrees are
/// always taken in the whole pattern. Defined only when e(F[nu]) >= 1.
pub fn f_value(f: &Graph, triple: &SemiBoundedTriple, nu: u32) -> Result<u32> {
    let pv = PatternView::new(f)?;
    if !check_triple(&pv, triple) {
        return Err(Error::domain(format!(
            "not a valid {}-semi-bounded triple: {}",
            triple.r,
            triple.describe()
        )));
    }
    f_value_unchecked(&pv, triple, nu)
}

pub(crate) fn f_value_unchecked(
    pv: &PatternView,
    triple: &SemiBoundedTriple,
    nu: u32,
) -> Result<u32> {
    let nu = nu & pv.full_mask();
    if pv.e_within(nu) == 0 {
        return Err(Error::domain("f(nu) is undefined: F[nu] has no edges"));
    }
    let mut total = (triple.s & nu).count_ones();
    let mut max_active = 0;
    for v in mask_vertices(triple.t & nu) {
        total += pv.deg[v];
        if pv.adj[v] & nu != 0 {
            max_active = max_active.max(pv.deg[v]);
        }
    }
    // every edge of the bipartite F[nu] meets T ∩ nu, so max_active >= 1 here
    Ok(total - max_active)
}

/// Everything the a/b exponents need to know about one subset.
#[derive(Clone, Debug, Serialize)]
pub struct NuStats {
    pub nu: Vec<usize>,
    pub size: u32,
    pub e_nu: u32,
    pub min_deg_positive: bool,
    pub f_nu: Option<u32>,
    pub in_a: bool,
    #[serde(with = "serde_opt_rat")]
    pub a_nu: Option<Rat>,
    pub in_b: bool,
    #[serde(with = "serde_opt_rat")]
    pub b_nu: Option<Rat>,
}

pub fn nu_stats(f: &Graph, triple: &SemiBoundedTriple, nu: u32) -> Result<NuStats> {
    let pv = PatternView::new(f)?;
    if !check_triple(&pv, triple) {
        return Err(Error::domain("invalid semi-bounded triple"));
    }
    let m2f = if f.n() >= 3 { m2(f).ok() } else { None };
    Ok(nu_stats_inner(&pv, triple, nu, m2f))
}

fn nu_stats_inner(
    pv: &PatternView,
    triple: &SemiBoundedTriple,
    nu: u32,
    m2f: Option<Rat>,
) -> NuStats {
    let nu = nu & pv.full_mask();
    let size = nu.count_ones();
    let e_nu = pv.e_within(nu);
    let min_deg_positive = pv.min_deg_positive(nu);
    let f_nu = f_value_unchecked(pv, triple, nu).ok();
    let r = triple.r as i64;
    let (mut in_a, mut a_nu) = (false, None);
    let (mut in_b, mut b_nu) = (false, None);
    if let Some(fv) = f_nu {
        let (fv, e, v) = (fv as i64, e_nu as i64, size as i64);
        if min_deg_positive && fv - 1 < r * (e - 1) {
            in_a = true;
            a_nu = Some(rat(r * (v - 2) + 1 - fv, r * (e - 1) + 1 - fv));
        }
        if min_deg_positive && fv > e {
            in_b = true;
            // b needs m2(F); undefined (flagged, not fabricated) if v(F) < 3
            b_nu = m2f.map(|m| (rat(v - 2, 1) - rat(e - 1, 1) / m) / rat(fv - e, 1));
        }
    }
    NuStats {
        nu: mask_vertices(nu),
        size,
        e_nu,
        min_deg_positive,
        f_nu,
        in_a,
        a_nu,
        in_b,
        b_nu,
    }
}

fn scan_extremum(
    f: &Graph,
    triple: &SemiBoundedTriple,
    pick: impl Fn(&NuStats) -> Option<Rat>,
    empty_msg: &str,
) -> Result<(Rat, u32)> {
    let pv = PatternView::new(f)?;
    if !check_triple(&pv, triple) {
        return Err(Error::domain("invalid semi-bounded triple"));
    }
    let m2f = if f.n() >= 3 { m2(f).ok() } else { None };
    let mut best: Option<(Rat, u32)> = None;
    for nu in 0..=pv.full_mask() {
        let st = nu_stats_inner(&pv, triple, nu, m2f);
        if let Some(val) = pick(&st) {
            if best.is_none_or(|(b, _)| val < b) {
                best = Some((val, nu));
            }
        }
    }
    best.ok_or_else(|| Error::domain(empty_msg.to_string()))
}

/// a(F) = min over the family A_F, with a witness subset. Errors when A_F is
/// empty (so it never happens for cyclic F).
pub fn a_of_f(f: &Graph, triple: &SemiBoundedTriple) -> Result<(Rat, u32)> {
    scan_extremum(
        f,
        triple,
        |st| if st.in_a { st.a_nu } else { None },
        "A_F is empty; a(F) is undefined (F must contain a cycle for A_F to be nonempty)",
    )
}

/// b(F) = min over the family B_F, with a witness subset.
pub fn b_of_f(f: &Graph, triple: &SemiBoundedTriple) -> Result<(Rat, u32)> {
    scan_extremum(
        f,
        triple,
        |st| if st.in_b { st.b_nu } else { None },
        "B_F is empty; b(F) is undefined (F must contain a cycle for B_F to be nonempty)",
    )
}

/// Host-side parameters for degree caps and the balancing threshold.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BalancingContext {
    /// host vertex count
    pub n: f64,
    /// host edge density q = e(G)/n^2
    pub q: f64,
    /// slack parameter for the degree caps
    pub delta: f64,
    /// constant for threshold-level comparisons
    pub c_tau: f64,
}

impl BalancingContext {
    pub fn new(n: f64, q: f64, delta: f64, c_tau: f64) -> Result<BalancingContext> {
        if !(n >= 1.0) || !(q > 0.0) || !(delta > 0.0) || !(c_tau > 0.0) {
            return Err(Error::domain(
                "balancing context requires n >= 1, q > 0, delta > 0, C > 0",
            ));
        }
        Ok(BalancingContext { n, q, delta, c_tau })
    }

    pub fn from_host(host: &Graph, delta: f64, c_tau: f64) -> Result<BalancingContext> {
        let n = host.n() as f64;
        BalancingContext::new(n, host.edge_count() as f64 / (n * n), delta, c_tau)
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DValue {
    pub value: f64,
    /// exponent of delta^{-1}
    pub delta_exp: i64,
    /// exponent of q (e(F) - f(nu)); None when f(nu) is undefined
    pub q_exp: Option<i64>,
    /// exponent of n (v(F) - |nu|)
    pub n_exp: i64,
}

/// Degree cap D(nu) = delta^{-|nu|} q^{e(F)-f(nu)} n^{v(F)-|nu|}; +infinity
/// when F[nu] has no edges.
pub fn d_value(
    f: &Graph,
    triple: &SemiBoundedTriple,
    ctx: &BalancingContext,
    nu: u32,
) -> Result<DValue> {
    let pv = PatternView::new(f)?;
    if !check_triple(&pv, triple) {
        return Err(Error::domain("invalid semi-bounded triple"));
    }
    let nu = nu & pv.full_mask();
    let size = nu.count_ones() as i64;
    match f_value_unchecked(&pv, triple, nu) {
        Err(_) => Ok(DValue {
            value: f64::INFINITY,
            delta_exp: -size,
            q_exp: None,
            n_exp: f.n() as i64 - size,
        }),
        Ok(fv) => {
            let q_exp = f.edge_count() as i64 - fv as i64;
            let n_exp = f.n() as i64 - size;
            let value = ctx.delta.powi(-size as i32)
                * ctx.q.powi(q_exp as i32)
                * ctx.n.powi(n_exp as i32);
            Ok(DValue { value, delta_exp: -size, q_exp: Some(q_exp), n_exp })
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TauValue {
    pub value: f64,
    /// maximizing subset (empty when q > 1 short-circuits to 1)
    pub argmax_nu: Vec<usize>,
}

/// tau(n, qn^2) = q n^2 * max over nu with delta(F[nu]) >= 1, e(nu) >= 2 of
/// (q^{1-f(nu)} n^{2-|nu|})^{1/(e(nu)-1)}; equals 1 when q > 1.
pub fn tau(f: &Graph, triple: &SemiBoundedTriple, ctx: &BalancingContext) -> Result<TauValue> {
    if ctx.q > 1.0 {
        return Ok(TauValue { value: 1.0, argmax_nu: vec![] });
    }
    let pv = PatternView::new(f)?;
    if !check_triple(&pv, triple) {
        return Err(Error::domain("invalid semi-bounded triple"));
    }
    let (lq, ln) = (ctx.q.ln(), ctx.n.ln());
    let mut best: Option<(f64, u32)> = None;
    for nu in 0..=pv.full_mask() {
        if !pv.min_deg_positive(nu) || pv.e_within(nu) < 2 {
            continue;
        }
        let fv = f_value_unchecked(&pv, triple, nu)? as f64;
        let e = pv.e_within(nu) as f64;
        let size = nu.count_ones() as f64;
        let log_term = ((1.0 - fv) * lq + (2.0 - size) * ln) / (e - 1.0);
        if best.is_none_or(|(b, _)| log_term > b) {
            best = Some((log_term, nu));
        }
    }
    let (log_term, arg) = best.ok_or_else(|| {
        Error::domain("tau is undefined: no subset with min degree >= 1 and e(nu) >= 2")
    })?;
    Ok(TauValue {
        value: (lq + 2.0 * ln + log_term).exp(),
        argmax_nu: mask_vertices(arg),
    })
}

/// Exact exponent of tau at q = n^x: tau = n^t(x). Returns (t(x), argmax
/// subset mask). For x > 0 tau is 1, i.e. exponent 0.
pub fn tau_exponent_at(f: &Graph, triple: &SemiBoundedTriple, x: Rat) -> Result<(Rat, u32)> {
    if x > rat(0, 1) {
        return Ok((rat(0, 1), 0));
    }
    let pv = PatternView::new(f)?;
    if !check_triple(&pv, triple) {
        return Err(Error::domain("invalid semi-bounded triple"));
    }
    let mut best: Option<(Rat, u32)> = None;
    for nu in 0..=pv.full_mask() {
        if !pv.min_deg_positive(nu) || pv.e_within(nu) < 2 {
            continue;
        }
        let fv = f_value_unchecked(&pv, triple, nu)? as i64;
        let e = pv.e_within(nu) as i64;
        let size = nu.count_ones() as i64;
        let term = (x * rat(1 - fv, 1) + rat(2 - size, 1)) / rat(e - 1, 1);
        if best.is_none_or(|(b, _)| term > b) {
            best = Some((term, nu));
        }
    }
    let (term, arg) =
        best.ok_or_else(|| Error::domain("tau exponent undefined: no eligible subset"))?;
    Ok((x + rat(2, 1) + term, arg))
}

/// The (c, r)-bounded generalization of f. `t_star` is a set of c vertices of
/// T, each adjacent to all of S; every vertex of T \ T* has degree <= r.
///
/// g(nu) = |T* \ nu| when T* meets nu, otherwise the max over w in T ∩ nu
/// with an edge inside F[nu] of deg_F(w) + (c-1) deg_{F[nu]}(w).
/// f(nu) = c|S ∩ nu| + sum over T ∩ nu \ T* of deg_F(v) - g(nu).
pub fn cr_f_value(
    f: &Graph,
    s: u32,
    t: u32,
    t_star: u32,
    c: u32,
    r: u32,
    nu: u32,
) -> Result<i64> {
    let pv = PatternView::new(f)?;
    let full = pv.full_mask();
    let (s, t, t_star, nu) = (s & full, t & full, t_star & full, nu & full);
    if s | t != full || s & t != 0 || t_star & t != t_star || t_star.count_ones() != c {
        return Err(Error::domain("invalid (c,r)-bounded triple: bad partition or T*"));
    }
    if pv.e_within(s) != 0 || pv.e_within(t) != 0 {
        return Err(Error::domain("invalid (c,r)-bounded triple: sides not independent"));
    }
    for v in mask_vertices(t_star) {
        if pv.adj[v] & s != s {
            return Err(Error::domain(
                "invalid (c,r)-bounded triple: T* vertex not complete to S",
            ));
        }
    }
    for v in mask_vertices(t & !t_star) {
        if pv.deg[v] > r {
            return Err(Error::domain(format!(
                "invalid (c,r)-bounded triple: vertex {v} has degree > r"
            )));
        }
    }
    if pv.e_within(nu) == 0 {
        return Err(Error::domain("f(nu) is undefined: F[nu] has no edges"));
    }
    let g = if t_star & nu != 0 {
        (t_star & !nu).count_ones() as i64
    } else {
        mask_vertices(t & nu)
            .into_iter()
            .filter(|&w| pv.adj[w] & nu != 0)
            .map(|w| pv.deg[w] as i64 + (c as i64 - 1) * (pv.adj[w] & nu).count_ones() as i64)
            .max()
            .ok_or_else(|| Error::domain("f(nu) undefined: no active T vertex in nu"))?
    };
    let sum_t: i64 = mask_vertices(t & nu & !t_star)
        .into_iter()
        .map(|v| pv.deg[v] as i64)
        .sum();
    Ok(c as i64 * (s & nu).count_ones() as i64 + sum_t - g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_bipartite, parse_graph};

    fn c4() -> Graph {
        parse_graph("n=4; 0-1 1-2 2-3 3-0").unwrap()
    }

    fn c4_triple() -> SemiBoundedTriple {
        // S = {0,2}, T = {1,3}, v* = 1
        SemiBoundedTriple { s: 0b0101, t: 0b1010, v_star: 1, r: 2 }
    }

    #[test]
    fn c4_has_four_2_semibounded_triples() {
        let ts = find_triples(&c4(), 2).unwrap();
        assert_eq!(ts.len(), 4);
        for t in &ts {
            assert!(is_valid_triple(&c4(), t).unwrap());
        }
        assert!(ts.contains(&c4_triple()));
    }

    #[test]
    fn star_triples_include_center_apex() {
        let k13 = parse_graph("n=4; 0-1 0-2 0-3").unwrap();
        let ts = find_triples(&k13, 1).unwrap();
        // the center as v* over S = leaves is one of them
        assert!(ts.contains(&SemiBoundedTriple { s: 0b1110, t: 0b0001, v_star: 0, r: 1 }));
        for t in &ts {
            assert!(is_valid_triple(&k13, t).unwrap());
        }
    }

    #[test]
    fn f_value_c4_oracle() {
        let g = c4();
        let t = c4_triple();
        // nu = {0 (in S), 1 (= v*), 3}: f = 1 + (2+2) - 2 = 3
        assert_eq!(f_value(&g, &t, 0b1011).unwrap(), 3);
        // full set: f = e = 4
        assert_eq!(f_value(&g, &t, 0b1111).unwrap(), 4);
        // single edge: f = 1
        assert_eq!(f_value(&g, &t, 0b0011).unwrap(), 1);
        // edgeless subset: undefined
        assert!(f_value(&g, &t, 0b0101).is_err());
    }

    #[test]
    fn a_and_b_for_c4() {
        let g = c4();
        let t = c4_triple();
        let (a, wit) = a_of_f(&g, &t).unwrap();
        assert_eq!(a, rat(1, 3));
        assert_eq!(wit, 0b1111); // the whole vertex set attains a(C4)
        let (b, _) = b_of_f(&g, &t).unwrap();
        assert_eq!(b, rat(1, 3));
    }

    #[test]
    fn a_for_complete_bipartite() {
        let k22 = complete_bipartite(2, 2).unwrap();
        let t = find_triples(&k22, 2).unwrap()[0];
        assert_eq!(a_of_f(&k22, &t).unwrap().0, rat(1, 3));

        let k33 = complete_bipartite(3, 3).unwrap();
        let t = find_triples(&k33, 3).unwrap()[0];
        assert_eq!(a_of_f(&k33, &t).unwrap().0, rat(1, 4));
    }

    #[test]
    fn a_undefined_for_forests() {
        let star = parse_graph("n=3; 0-1 0-2").unwrap();
        let t = find_triples(&star, 1).unwrap()[0];
        assert!(a_of_f(&star, &t).is_err());
    }

    #[test]
    fn nu_stats_c4_oracle() {
        let g = c4();
        let t = c4_triple();
        // nu = {0, 1, 3}: f = 3 > e = 2, so nu is in B with b = 1/3
        let st = nu_stats(&g, &t, 0b1011).unwrap();
        assert!(st.in_b);
        assert_eq!(st.b_nu, Some(rat(1, 3)));
        assert!(!st.in_a); // f-1 = 2 is not < r(e-1) = 2
        // full set: in A with a = 1/3
        let st = nu_stats(&g, &t, 0b1111).unwrap();
        assert!(st.in_a);
        assert_eq!(st.a_nu, Some(rat(1, 3)));
        assert!(!st.in_b);
    }

    #[test]
    fn d_value_oracle() {
        let g = c4();
        let t = c4_triple();
        let ctx = BalancingContext::new(100.0, 0.01, 1.0, 1.0).unwrap();
        // single edge nu: f=1 => D = q^3 n^2 = 1e-6 * 1e4 = 1e-2
        let d = d_value(&g, &t, &ctx, 0b0011).unwrap();
        assert!((d.value - 1e-2).abs() < 1e-12);
        assert_eq!(d.q_exp, Some(3));
        assert_eq!(d.n_exp, 2);
        // edgeless nu: infinite cap
        let d = d_value(&g, &t, &ctx, 0b0101).unwrap();
        assert!(d.value.is_infinite());
    }

    #[test]
    fn tau_oracle_and_exponent_consistency() {
        let g = c4();
        let t = c4_triple();
        // q > 1 short-circuits
        let ctx = BalancingContext::new(100.0, 2.0, 1.0, 1.0).unwrap();
        assert_eq!(tau(&g, &t, &ctx).unwrap().value, 1.0);

        // q = n^{-1/2}: exact exponent vs float value
        let n = 10_000.0f64;
        let ctx = BalancingContext::new(n, n.powf(-0.5), 1.0, 1.0).unwrap();
        let tv = tau(&g, &t, &ctx).unwrap();
        let (ex, _) = tau_exponent_at(&g, &t, rat(-1, 2)).unwrap();
        let expected = n.powf(*ex.numer() as f64 / *ex.denom() as f64);
        assert!((tv.value / expected - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cr_f_value_reduces_to_f_at_c1() {
        let g = c4();
        let t = c4_triple();
        for nu in 1u32..16 {
            let plain = f_value(&g, &t, nu);
            let cr = cr_f_value(&g, t.s, t.t, 1 << t.v_star, 1, t.r, nu);
            match (plain, cr) {
                (Ok(a), Ok(b)) => assert_eq!(a as i64, b, "nu={nu:b}"),
                (Err(_), Err(_)) => {}
                other => panic!("mismatch at nu={nu:b}: {other:?}"),
            }
        }
    }

    #[test]
    fn cr_f_value_rejects_bad_triples() {
        let g = c4();
        // T* vertex not complete to S
        assert!(cr_f_value(&g, 0b0101, 0b1010, 0b1010, 2, 2, 0b1111).is_ok());
        assert!(cr_f_value(&g, 0b0011, 0b1100, 0b0100, 1, 2, 0b1111).is_err());
    }
}
