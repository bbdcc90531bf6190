//! Simple graphs, multigraphs, parsing, induced subgraphs, bipartitions and
//! subgraph-embedding enumeration.
//!
//! Hosts are capped at [`MAX_HOST_VERTICES`] vertices (adjacency rows are flat
//! bitsets, so everything stays cache-friendly well past the sizes the exact
//! algorithms can handle anyway). Pattern graphs, i.e. graphs whose vertex
//! subsets we sweep with bitmasks, are capped at [`MAX_PATTERN_VERTICES`].

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const MAX_HOST_VERTICES: usize = 1024;
pub const MAX_PATTERN_VERTICES: usize = 20;

const WORD: usize = 64;

fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

pub(crate) fn test_bit(row: &[u64], i: usize) -> bool {
    row[i / WORD] >> (i % WORD) & 1 == 1
}

fn set_bit(row: &mut [u64], i: usize) {
    row[i / WORD] |= 1 << (i % WORD);
}

fn clear_bit(row: &mut [u64], i: usize) {
    row[i / WORD] &= !(1 << (i % WORD));
}

pub(crate) fn iter_bits(row: &[u64]) -> impl Iterator<Item = usize> + '_ {
    row.iter().enumerate().flat_map(|(w, &bits)| {
        let mut b = bits;
        std::iter::from_fn(move || {
            if b == 0 {
                None
            } else {
                let i = b.trailing_zeros() as usize;
                b &= b - 1;
                Some(w * WORD + i)
            }
        })
    })
}

/// Simple undirected graph on vertices `0..n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    words: usize,
    adj: Vec<u64>,          // n rows of `words` bitset words
    edges: Vec<(u16, u16)>, // sorted, u < v
}

impl Graph {
    pub fn new(n: usize) -> Result<Graph> {
        if n > MAX_HOST_VERTICES {
            return Err(Error::domain(format!(
                "graph on {n} vertices exceeds the {MAX_HOST_VERTICES}-vertex cap"
            )));
        }
        let words = words_for(n).max(1);
        Ok(Graph { n, words, adj: vec![0; n * words], edges: Vec::new() })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut g = Graph::new(n)?;
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u16, u16)] {
        &self.edges
    }

    pub fn adj_row(&self, v: usize) -> &[u64] {
        &self.adj[v * self.words..(v + 1) * self.words]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && test_bit(self.adj_row(u), v)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj_row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        iter_bits(self.adj_row(v))
    }

    /// Inserts an edge; duplicate insertions are idempotent.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u >= self.n || v >= self.n {
            return Err(Error::domain(format!(
                "edge {u}-{v} out of range for n={}",
                self.n
            )));
        }
        if u == v {
            return Err(Error::domain(format!("self-loop {u}-{v} not allowed")));
        }
        if self.has_edge(u, v) {
            return Ok(());
        }
        let w = self.words;
        set_bit(&mut self.adj[u * w..(u + 1) * w], v);
        set_bit(&mut self.adj[v * w..(v + 1) * w], u);
        let e = (u.min(v) as u16, u.max(v) as u16);
        let pos = self.edges.binary_search(&e).unwrap_err();
        self.edges.insert(pos, e);
        Ok(())
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        if !self.has_edge(u, v) {
            return;
        }
        let w = self.words;
        clear_bit(&mut self.adj[u * w..(u + 1) * w], v);
        clear_bit(&mut self.adj[v * w..(v + 1) * w], u);
        let e = (u.min(v) as u16, u.max(v) as u16);
        if let Ok(pos) = self.edges.binary_search(&e) {
            self.edges.remove(pos);
        }
    }

    /// Subgraph induced on `verts` (deduplicated, reindexed in sorted order).
    /// Returns the graph and the sorted original vertex ids.
    pub fn induced_subgraph(&self, verts: &[usize]) -> Result<(Graph, Vec<usize>)> {
        let mut vs: Vec<usize> = verts.to_vec();
        vs.sort_unstable();
        vs.dedup();
        if let Some(&v) = vs.last() {
            if v >= self.n {
                return Err(Error::domain(format!("vertex {v} out of range")));
            }
        }
        let mut g = Graph::new(vs.len())?;
        for (i, &u) in vs.iter().enumerate() {
            for (j, &v) in vs.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(i, j)?;
                }
            }
        }
        Ok((g, vs))
    }

    /// Number of connected components (isolated vertices count).
    pub fn component_count(&self) -> usize {
        let mut seen = vec![false; self.n];
        let mut comps = 0;
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            comps += 1;
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(v) = stack.pop() {
                for u in self.neighbors(v) {
                    if !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.component_count() == 1
    }

    pub fn has_cycle(&self) -> bool {
        self.edges.len() + self.component_count() > self.n
    }

    /// Deterministic text rendering in the edge-list file format.
    pub fn to_text(&self) -> String {
        let mut s = format!("n={}\n", self.n);
        for &(u, v) in &self.edges {
            s.push_str(&format!("{u}-{v}\n"));
        }
        s
    }
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges)
    }
}

/// Loopless multigraph on vertices `0..n`; parallel edges carried as counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multigraph {
    n: usize,
    edges: Vec<(u16, u16, u32)>, // u < v, multiplicity >= 1, sorted by pair
}

impl Multigraph {
    pub fn from_edges(n: usize, edges: &[(usize, usize, u32)]) -> Result<Multigraph> {
        if n > MAX_HOST_VERTICES {
            return Err(Error::domain("multigraph too large".to_string()));
        }
        let mut by_pair: HashMap<(u16, u16), u32> = HashMap::new();
        for &(u, v, m) in edges {
            if u >= n || v >= n {
                return Err(Error::domain(format!("edge {u}-{v} out of range for n={n}")));
            }
            if u == v {
                return Err(Error::domain(format!("self-loop {u}-{v} not allowed")));
            }
            if m == 0 {
                return Err(Error::domain(format!("edge {u}-{v} with multiplicity 0")));
            }
            *by_pair.entry((u.min(v) as u16, u.max(v) as u16)).or_insert(0) += m;
        }
        let mut es: Vec<(u16, u16, u32)> =
            by_pair.into_iter().map(|((u, v), m)| (u, v, m)).collect();
        es.sort_unstable();
        Ok(Multigraph { n, edges: es })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// e(M): edges counted with multiplicity.
    pub fn edge_count(&self) -> u32 {
        self.edges.iter().map(|&(_, _, m)| m).sum()
    }

    pub fn edges(&self) -> &[(u16, u16, u32)] {
        &self.edges
    }

    /// Edges with multiplicity inside a vertex subset given as a bitmask.
    pub fn edge_count_within(&self, mask: u32) -> u32 {
        self.edges
            .iter()
            .filter(|&&(u, v, _)| mask >> u & 1 == 1 && mask >> v & 1 == 1)
            .map(|&(_, _, m)| m)
            .sum()
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("n={}\n", self.n);
        for &(u, v, m) in &self.edges {
            if m == 1 {
                s.push_str(&format!("{u}-{v}\n"));
            } else {
                s.push_str(&format!("{u}-{v}x{m}\n"));
            }
        }
        s
    }
}

fn parse_header(tok: &str, line: usize) -> Result<usize> {
    let rest = tok.strip_prefix("n=").ok_or_else(|| Error::Parse {
        line,
        msg: format!("expected first token `n=<int>`, got `{tok}`"),
    })?;
    rest.parse::<usize>().map_err(|_| Error::Parse {
        line,
        msg: format!("bad vertex count `{rest}`"),
    })
}

fn tokens(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().flat_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("");
        l.split_whitespace()
            .map(move |t| (i + 1, t.trim_matches(|c| c == ';' || c == ',')))
            .filter(|(_, t)| !t.is_empty())
    })
}

fn parse_endpoint(s: &str, line: usize) -> Result<usize> {
    s.parse::<usize>().map_err(|_| Error::Parse {
        line,
        msg: format!("bad vertex id `{s}`"),
    })
}

/// Parses the edge-list format: first token `n=<int>`, then whitespace
/// separated `<u>-<v>` pairs. `#` starts a comment; `;`/`,` are ignored.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut toks = tokens(text);
    let (line, first) = toks.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty input".to_string(),
    })?;
    let n = parse_header(first, line)?;
    let mut g = Graph::new(n)?;
    for (line, tok) in toks {
        let (u, v) = tok.split_once('-').ok_or_else(|| Error::Parse {
            line,
            msg: format!("expected `<u>-<v>`, got `{tok}`"),
        })?;
        let u = parse_endpoint(u, line)?;
        let v = parse_endpoint(v, line)?;
        g.add_edge(u, v).map_err(|e| Error::Parse { line, msg: e.to_string() })?;
    }
    Ok(g)
}

/// Parses the multigraph edge-list format: `<u>-<v>` or `<u>-<v>x<mult>`.
pub fn parse_multigraph(text: &str) -> Result<Multigraph> {
    let mut toks = tokens(text);
    let (line, first) = toks.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty input".to_string(),
    })?;
    let n = parse_header(first, line)?;
    let mut edges: Vec<(usize, usize, u32)> = Vec::new();
    for (line, tok) in toks {
        let (pair, mult) = match tok.split_once('x') {
            Some((p, m)) => {
                let m = m.parse::<u32>().map_err(|_| Error::Parse {
                    line,
                    msg: format!("bad multiplicity in `{tok}`"),
                })?;
                (p, m)
            }
            None => (tok, 1),
        };
        let (u, v) = pair.split_once('-').ok_or_else(|| Error::Parse {
            line,
            msg: format!("expected `<u>-<v>[x<mult>]`, got `{tok}`"),
        })?;
        edges.push((parse_endpoint(u, line)?, parse_endpoint(v, line)?, mult));
    }
    Multigraph::from_edges(n, &edges).map_err(|e| match e {
        Error::Domain(msg) => Error::Parse { line: 1, msg },
        e => e,
    })
}

/// Mask-based view of a pattern graph (<= MAX_PATTERN_VERTICES vertices).
#[derive(Clone, Debug)]
pub(crate) struct PatternView {
    pub n: usize,
    pub adj: Vec<u32>,
    pub deg: Vec<u32>,
}

impl PatternView {
    pub fn new(g: &Graph) -> Result<PatternView> {
        if g.n() > MAX_PATTERN_VERTICES {
            return Err(Error::domain(format!(
                "pattern on {} vertices exceeds the {MAX_PATTERN_VERTICES}-vertex cap",
                g.n()
            )));
        }
        let mut adj = vec![0u32; g.n()];
        for &(u, v) in g.edges() {
            adj[u as usize] |= 1 << v;
            adj[v as usize] |= 1 << u;
        }
        let deg = adj.iter().map(|a| a.count_ones()).collect();
        Ok(PatternView { n: g.n(), adj, deg })
    }

    pub fn full_mask(&self) -> u32 {
        if self.n == 32 { u32::MAX } else { (1u32 << self.n) - 1 }
    }

    /// e(F[mask])
    pub fn e_within(&self, mask: u32) -> u32 {
        let mut e = 0;
        let mut m = mask;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            e += (self.adj[v] & mask).count_ones();
        }
        e / 2
    }

    /// delta(F[mask]) >= 1, i.e. no vertex of `mask` is isolated in F[mask].
    pub fn min_deg_positive(&self, mask: u32) -> bool {
        let mut m = mask;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            if self.adj[v] & mask == 0 {
                return false;
            }
        }
        mask != 0
    }
}

pub fn mask_vertices(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}

/// An embedding of a pattern into a host: `map[p]` is the host image of
/// pattern vertex `p`. Injective, edge-preserving (not necessarily induced).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Embedding {
    pub map: Vec<u16>,
}

struct Search<'a> {
    pattern: &'a Graph,
    host: &'a Graph,
    order: Vec<usize>,       // pattern vertices in placement order
    pos: Vec<usize>,         // pattern vertex -> position in `order`
    host_perm: Vec<u16>,     // candidate scan order
    assign: Vec<u16>,        // pattern vertex -> host vertex
    used: Vec<u64>,          // host bitset
}

impl<'a> Search<'a> {
    /// `visit` returns false to stop the whole enumeration.
    fn run(&mut self, k: usize, visit: &mut dyn FnMut(&[u16]) -> bool) -> bool {
        if k == self.order.len() {
            return visit(&self.assign);
        }
        let u = self.order[k];
        let words = words_for(self.host.n()).max(1);
        let mut cand = vec![u64::MAX; words];
        let mut constrained = false;
        for w in self.pattern.neighbors(u) {
            if self.pos[w] < k {
                let row = self.host.adj_row(self.assign[w] as usize);
                for (c, r) in cand.iter_mut().zip(row) {
                    *c &= r;
                }
                constrained = true;
            }
        }
        let _ = constrained;
        for i in 0..self.host_perm.len() {
            let h = self.host_perm[i] as usize;
            if test_bit(&self.used, h) || !test_bit(&cand, h) {
                continue;
            }
            self.assign[u] = h as u16;
            set_bit(&mut self.used, h);
            let keep_going = self.run(k + 1, visit);
            clear_bit(&mut self.used, h);
            if !keep_going {
                return false;
            }
        }
        true
    }
}

fn make_search<'a>(
    pattern: &'a Graph,
    host: &'a Graph,
    order_seed: u64,
    preassign: &[(usize, usize)],
) -> Option<Search<'a>> {
    // Injectivity / edge-consistency of the pre-assignment.
    for (i, &(p, h)) in preassign.iter().enumerate() {
        for &(p2, h2) in &preassign[..i] {
            if p == p2 || h == h2 {
                return None;
            }
            if pattern.has_edge(p, p2) && !host.has_edge(h, h2) {
                return None;
            }
        }
        if p >= pattern.n() || h >= host.n() {
            return None;
        }
    }
    if pattern.n() > host.n() {
        return None;
    }
    let fixed: Vec<usize> = preassign.iter().map(|&(p, _)| p).collect();
    // Pre-assigned vertices first, then degree descending (index ascending).
    let mut rest: Vec<usize> = (0..pattern.n()).filter(|v| !fixed.contains(v)).collect();
    rest.sort_by_key(|&v| (std::cmp::Reverse(pattern.degree(v)), v));
    let mut order = fixed.clone();
    order.extend(rest);
    let mut pos = vec![0usize; pattern.n()];
    for (k, &v) in order.iter().enumerate() {
        pos[v] = k;
    }
    let mut host_perm: Vec<u16> = (0..host.n() as u16).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(order_seed);
    host_perm.shuffle(&mut rng);
    let mut used = vec![0u64; words_for(host.n()).max(1)];
    let mut assign = vec![0u16; pattern.n()];
    for &(p, h) in preassign {
        assign[p] = h as u16;
        set_bit(&mut used, h);
    }
    Some(Search { pattern, host, order, pos, host_perm, assign, used })
}

/// Streams embeddings in a deterministic order fixed by `order_seed`.
/// `visit` returns false to stop early.
pub fn for_each_embedding(
    pattern: &Graph,
    host: &Graph,
    order_seed: u64,
    visit: &mut dyn FnMut(&[u16]) -> bool,
) {
    if let Some(mut s) = make_search(pattern, host, order_seed, &[]) {
        s.run(0, visit);
    }
}

/// All embeddings of `pattern` into `host`, up to `cap` of them.
pub fn enumerate_embeddings(
    pattern: &Graph,
    host: &Graph,
    cap: Option<usize>,
    order_seed: u64,
) -> Vec<Embedding> {
    let mut out = Vec::new();
    for_each_embedding(pattern, host, order_seed, &mut |m| {
        out.push(Embedding { map: m.to_vec() });
        cap.is_none_or(|c| out.len() < c)
    });
    out
}

pub fn contains_copy(pattern: &Graph, host: &Graph) -> bool {
    first_embedding(pattern, host).is_some()
}

pub fn first_embedding(pattern: &Graph, host: &Graph) -> Option<Embedding> {
    let mut found = None;
    for_each_embedding(pattern, host, 0, &mut |m| {
        found = Some(Embedding { map: m.to_vec() });
        false
    });
    found
}

/// Does adding host edge u-v (assumed present in `host`) complete a copy of
/// `pattern` through that edge? Used for incremental pattern-freeness checks.
pub fn creates_copy_with_edge(pattern: &Graph, host: &Graph, u: usize, v: usize) -> bool {
    for &(a, b) in pattern.edges() {
        for (pa, pb) in [(a as usize, b as usize), (b as usize, a as usize)] {
            if let Some(mut s) = make_search(pattern, host, 0, &[(pa, u), (pb, v)]) {
                let mut hit = false;
                s.run(2, &mut |_| {
                    hit = true;
                    false
                });
                if hit {
                    return true;
                }
            }
        }
    }
    false
}

/// All 2-colorings of `g` into independent sides, as `(S, T)` bitmask pairs,
/// one representative per global color swap (the side containing vertex 0 is
/// S). Empty when `g` has an odd cycle. With k components this yields
/// 2^(k-1) bipartitions.
pub fn bipartitions(g: &Graph) -> Result<Vec<(u32, u32)>> {
    let pv = PatternView::new(g)?;
    if pv.n == 0 {
        return Ok(vec![]);
    }
    // 2-color each component by BFS; comps[i] = (side containing its smallest
    // vertex, other side), components ordered by smallest vertex.
    let mut color = vec![-1i8; pv.n];
    let mut comps: Vec<(u32, u32)> = Vec::new();
    for s in 0..pv.n {
        if color[s] >= 0 {
            continue;
        }
        let mut a = 1u32 << s;
        let mut b = 0u32;
        color[s] = 0;
        let mut queue = vec![s];
        while let Some(v) = queue.pop() {
            for w in mask_vertices(pv.adj[v]) {
                if color[w] < 0 {
                    color[w] = 1 - color[v];
                    if color[w] == 0 {
                        a |= 1 << w;
                    } else {
                        b |= 1 << w;
                    }
                    queue.push(w);
                } else if color[w] == color[v] {
                    return Ok(vec![]); // odd cycle
                }
            }
        }
        comps.push((a, b));
    }
    let k = comps.len();
    let mut out = Vec::with_capacity(1 << (k - 1));
    // Component 0 contains vertex 0; pin its orientation.
    for flips in 0..1u32 << (k - 1) {
        let (mut s_mask, mut t_mask) = comps[0];
        for (i, &(a, b)) in comps.iter().enumerate().skip(1) {
            if flips >> (i - 1) & 1 == 0 {
                s_mask |= a;
                t_mask |= b;
            } else {
                s_mask |= b;
                t_mask |= a;
            }
        }
        out.push((s_mask, t_mask));
    }
    out.sort_unstable();
    Ok(out)
}

/// Complete bipartite pattern K_{a,b}: sides 0..a and a..a+b.
pub fn complete_bipartite(a: usize, b: usize) -> Result<Graph> {
    let mut g = Graph::new(a + b)?;
    for u in 0..a {
        for v in a..a + b {
            g.add_edge(u, v)?;
        }
    }
    Ok(g)
}

/// If `g` is a complete bipartite graph with both sides nonempty, returns
/// (min side, max side) sizes.
pub fn as_complete_bipartite(g: &Graph) -> Option<(usize, usize)> {
    let parts = bipartitions(g).ok()?;
    if !g.is_connected() || g.n() < 2 {
        return None;
    }
    let &(s, t) = parts.first()?;
    let a = s.count_ones() as usize;
    let b = t.count_ones() as usize;
    if g.edge_count() == a * b && a >= 1 && b >= 1 {
        Some((a.min(b), a.max(b)))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn c4() -> Graph {
        parse_graph("n=4; 0-1 1-2 2-3 3-0").unwrap()
    }

    #[test]
    fn parse_roundtrip() {
        let g = c4();
        assert_eq!(g.n(), 4);
        assert_eq!(g.edge_count(), 4);
        assert!(g.has_edge(0, 3));
        assert!(!g.has_edge(0, 2));
        let g2 = parse_graph(&g.to_text()).unwrap();
        assert_eq!(g, g2);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match parse_graph("n=4\n0-1\n0-9") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse_graph("0-1").is_err());
        assert!(parse_graph("n=3\n1-1").is_err());
    }

    #[test]
    fn parse_multigraph_mults() {
        let m = parse_multigraph("n=2; 0-1x3").unwrap();
        assert_eq!(m.edge_count(), 3);
        let m2 = parse_multigraph("n=3; 0-1 0-1 1-2").unwrap();
        assert_eq!(m2.edge_count(), 3);
        assert_eq!(m2.edges(), &[(0, 1, 2), (1, 2, 1)]);
    }

    #[test]
    fn induced_subgraph_of_c4() {
        let g = c4();
        let (h, vs) = g.induced_subgraph(&[0, 1, 2]).unwrap();
        assert_eq!(vs, vec![0, 1, 2]);
        assert_eq!(h.edge_count(), 2); // a path
        let (h2, _) = g.induced_subgraph(&[0, 2]).unwrap();
        assert_eq!(h2.edge_count(), 0);
    }

    #[test]
    fn c4_into_k22_has_eight_embeddings() {
        // oracle: 8 = |Aut(C4)| embeddings of C4 into K_{2,2}
        let host = complete_bipartite(2, 2).unwrap();
        let embs = enumerate_embeddings(&c4(), &host, None, 7);
        assert_eq!(embs.len(), 8);
        // order_seed changes order, not the set
        let embs2 = enumerate_embeddings(&c4(), &host, None, 8);
        let a: std::collections::HashSet<_> = embs.into_iter().collect();
        let b: std::collections::HashSet<_> = embs2.into_iter().collect();
        assert_eq!(a, b);
    }

    #[test]
    fn embedding_cap_and_determinism() {
        let host = complete_bipartite(3, 3).unwrap();
        let e1 = enumerate_embeddings(&c4(), &host, Some(5), 42);
        let e2 = enumerate_embeddings(&c4(), &host, Some(5), 42);
        assert_eq!(e1.len(), 5);
        assert_eq!(e1, e2);
    }

    #[test]
    fn contains_copy_basics() {
        let host = complete_bipartite(2, 2).unwrap();
        assert!(contains_copy(&c4(), &host));
        let path = parse_graph("n=4; 0-1 1-2 2-3").unwrap();
        assert!(!contains_copy(&c4(), &path));
        assert!(contains_copy(&path, &c4()));
    }

    #[test]
    fn creates_copy_detects_closing_edge() {
        let mut host = parse_graph("n=4; 0-1 1-2 2-3").unwrap();
        assert!(!creates_copy_with_edge(&c4(), &host, 0, 2));
        host.add_edge(0, 3).unwrap();
        assert!(creates_copy_with_edge(&c4(), &host, 0, 3));
    }

    #[test]
    fn bipartitions_oracle_counts() {
        // C4: single class {0,2} | {1,3}
        assert_eq!(bipartitions(&c4()).unwrap(), vec![(0b0101, 0b1010)]);
        // two disjoint edges: 2 canonical bipartitions
        let m2 = parse_graph("n=4; 0-1 2-3").unwrap();
        assert_eq!(bipartitions(&m2).unwrap().len(), 2);
        // triangle: none
        let k3 = parse_graph("n=3; 0-1 1-2 0-2").unwrap();
        assert!(bipartitions(&k3).unwrap().is_empty());
    }

    #[test]
    fn bipartition_sides_are_independent() {
        for n in 2..=6 {
            let g = complete_bipartite(2, n - 2).unwrap();
            for (s, t) in bipartitions(&g).unwrap() {
                assert_eq!(s & t, 0);
                assert_eq!(s | t, (1u32 << g.n()) - 1);
                let pv = PatternView::new(&g).unwrap();
                assert_eq!(pv.e_within(s), 0);
                assert_eq!(pv.e_within(t), 0);
            }
        }
    }

    #[test]
    fn complete_bipartite_detection() {
        assert_eq!(as_complete_bipartite(&c4()), Some((2, 2)));
        let k13 = parse_graph("n=4; 0-1 0-2 0-3").unwrap();
        assert_eq!(as_complete_bipartite(&k13), Some((1, 3)));
        let path = parse_graph("n=4; 0-1 1-2 2-3").unwrap();
        assert_eq!(as_complete_bipartite(&path), None);
    }
}
