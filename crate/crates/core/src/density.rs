//! 2-density m2(F), its maximizers, balancedness flags and the proper-subgraph
//! variant m2*(F). Everything is exact rational arithmetic over induced
//! vertex-subset sweeps (pattern graphs are capped at 20 vertices, so the
//! 2^v sweep is cheap).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{mask_vertices, Graph, PatternView};
use crate::rational::{rat, serde_opt_rat, serde_rat, Rat};
use crate::semibounded::SemiBoundedTriple;

/// m2(F) = max over vertex subsets nu with |nu| >= 3 of (e(nu)-1)/(|nu|-2).
/// For a fixed vertex set the induced subgraph maximizes the ratio, so the
/// subset sweep covers all subgraphs.
pub fn m2(f: &Graph) -> Result<Rat> {
    Ok(m2_with_witnesses(f)?.0)
}

/// m2 plus every maximizing subset (as bitmasks, ascending).
pub fn m2_with_witnesses(f: &Graph) -> Result<(Rat, Vec<u32>)> {
    let pv = PatternView::new(f)?;
    if pv.n < 3 {
        return Err(Error::domain(format!(
            "m2 requires at least 3 vertices, got {}",
            pv.n
        )));
    }
    let mut best: Option<Rat> = None;
    let mut witnesses: Vec<u32> = Vec::new();
    for mask in 0..=pv.full_mask() {
        let size = mask.count_ones() as i64;
        if size < 3 {
            continue;
        }
        let val = rat(pv.e_within(mask) as i64 - 1, size - 2);
        match best {
            Some(b) if val < b => {}
            Some(b) if val == b => witnesses.push(mask),
            _ => {
                best = Some(val);
                witnesses = vec![mask];
            }
        }
    }
    Ok((best.unwrap(), witnesses))
}

/// m2 restricted to subsets of `nu` (with >= 3 vertices).
pub fn m2_local(f: &Graph, nu: u32) -> Result<Rat> {
    let pv = PatternView::new(f)?;
    let nu = nu & pv.full_mask();
    if nu.count_ones() < 3 {
        return Err(Error::domain("m2_local needs a subset with >= 3 vertices"));
    }
    let mut best: Option<Rat> = None;
    let mut sub = nu;
    loop {
        if sub.count_ones() >= 3 {
            let val = rat(pv.e_within(sub) as i64 - 1, sub.count_ones() as i64 - 2);
            best = Some(best.map_or(val, |b: Rat| b.max(val)));
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & nu;
    }
    Ok(best.unwrap())
}

/// m2 over proper subgraphs: proper vertex subsets, plus the full vertex set
/// with one edge removed (which dominates every spanning proper subgraph).
pub fn m2_star(f: &Graph) -> Result<Rat> {
    let pv = PatternView::new(f)?;
    if pv.n < 3 {
        return Err(Error::domain("m2_star requires at least 3 vertices"));
    }
    let mut best: Option<Rat> = None;
    for mask in 0..pv.full_mask() {
        // proper subsets only: full_mask itself excluded by the range
        if mask.count_ones() >= 3 {
            let val = rat(pv.e_within(mask) as i64 - 1, mask.count_ones() as i64 - 2);
            best = Some(best.map_or(val, |b: Rat| b.max(val)));
        }
    }
    if f.edge_count() >= 1 {
        let val = rat(f.edge_count() as i64 - 2, pv.n as i64 - 2);
        best = Some(best.map_or(val, |b: Rat| b.max(val)));
    }
    best.ok_or_else(|| Error::domain("no proper subgraph on >= 3 vertices exists"))
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityReport {
    #[serde(with = "serde_rat")]
    pub m2: Rat,
    /// Maximizing vertex subsets, sorted vertex lists.
    pub witnesses: Vec<Vec<usize>>,
    pub two_balanced: bool,
    pub strictly_two_balanced: bool,
    #[serde(with = "serde_opt_rat")]
    pub m2_star: Option<Rat>,
}

pub fn density_report(f: &Graph) -> Result<DensityReport> {
    let (m2, wit_masks) = m2_with_witnesses(f)?;
    let full = PatternView::new(f)?.full_mask();
    let two_balanced = wit_masks.contains(&full);
    let strictly_two_balanced = wit_masks == vec![full];
    let m2_star = m2_star(f).ok();
    Ok(DensityReport {
        m2,
        witnesses: wit_masks.iter().map(|&m| mask_vertices(m)).collect(),
        two_balanced,
        strictly_two_balanced,
        m2_star,
    })
}

/// Do all m2-maximizers contain the apex v* of the triple? (For a cyclic
/// bipartite pattern with an apex this is a theorem; the check is exhaustive.)
pub fn maximizer_contains_apex_check(f: &Graph, triple: &SemiBoundedTriple) -> Result<bool> {
    if !f.has_cycle() {
        return Err(Error::domain(
            "maximizer check requires a cyclic pattern (m2-maximizers of forests are degenerate)",
        ));
    }
    let (_, wits) = m2_with_witnesses(f)?;
    Ok(wits.iter().all(|&w| w >> triple.v_star & 1 == 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_bipartite, parse_graph};

    fn brute_m2(f: &Graph) -> Rat {
        // independent oracle: direct double loop over subsets, counting edges
        // by scanning the edge list
        let n = f.n();
        let mut best: Option<Rat> = None;
        for mask in 0u32..1 << n {
            let size = mask.count_ones() as i64;
            if size < 3 {
                continue;
            }
            let e = f
                .edges()
                .iter()
                .filter(|&&(u, v)| mask >> u & 1 == 1 && mask >> v & 1 == 1)
                .count() as i64;
            let val = rat(e - 1, size - 2);
            best = Some(best.map_or(val, |b: Rat| b.max(val)));
        }
        best.unwrap()
    }

    #[test]
    fn m2_known_values() {
        let c4 = parse_graph("n=4; 0-1 1-2 2-3 3-0").unwrap();
        assert_eq!(m2(&c4).unwrap(), rat(3, 2));
        let k33 = complete_bipartite(3, 3).unwrap();
        assert_eq!(m2(&k33).unwrap(), rat(2, 1));
        let k4 = parse_graph("n=4; 0-1 0-2 0-3 1-2 1-3 2-3").unwrap();
        assert_eq!(m2(&k4).unwrap(), rat(5, 2));
        // matching: the full set wins, (2-1)/(4-2) = 1/2
        let m = parse_graph("n=4; 0-1 2-3").unwrap();
        assert_eq!(m2(&m).unwrap(), rat(1, 2));
    }

    #[test]
    fn m2_matches_brute_oracle_on_small_graphs() {
        for text in [
            "n=5; 0-1 1-2 2-3 3-4 4-0",
            "n=5; 0-1 0-2 0-3 0-4 1-2",
            "n=6; 0-3 0-4 1-3 1-5 2-4 2-5",
            "n=4; 0-1 1-2 2-0 0-3",
        ] {
            let g = parse_graph(text).unwrap();
            assert_eq!(m2(&g).unwrap(), brute_m2(&g), "graph {text}");
        }
    }

    #[test]
    fn m2_star_values() {
        let c4 = parse_graph("n=4; 0-1 1-2 2-3 3-0").unwrap();
        // oracle: best proper subgraph of C4 is P4 (full set minus
        // an edge): (3-1)/(4-2) = 1
        assert_eq!(m2_star(&c4).unwrap(), rat(1, 1));
        let k33 = complete_bipartite(3, 3).unwrap();
        // K33 minus an edge: (8-1)/(6-2) = 7/4; any 5-subset: (6-1)/3 = 5/3
        assert_eq!(m2_star(&k33).unwrap(), rat(7, 4));
    }

    #[test]
    fn balancedness_flags() {
        let c4 = parse_graph("n=4; 0-1 1-2 2-3 3-0").unwrap();
        let rep = density_report(&c4).unwrap();
        assert!(rep.two_balanced);
        assert!(rep.strictly_two_balanced);
        assert_eq!(rep.witnesses, vec![vec![0, 1, 2, 3]]);

        // C4 plus a pendant edge is not 2-balanced
        let g = parse_graph("n=5; 0-1 1-2 2-3 3-0 0-4").unwrap();
        let rep = density_report(&g).unwrap();
        assert_eq!(rep.m2, rat(3, 2));
        assert!(!rep.two_balanced);
    }

    #[test]
    fn forest_and_cycle_dichotomy() {
        // forest that is not a matching: m2 = 1; cyclic: m2 > 1
        let star = parse_graph("n=4; 0-1 0-2 0-3").unwrap();
        assert_eq!(m2(&star).unwrap(), rat(1, 1));
        let c6 = parse_graph("n=6; 0-1 1-2 2-3 3-4 4-5 5-0").unwrap();
        assert!(m2(&c6).unwrap() > rat(1, 1));
    }

    #[test]
    fn m2_local_is_restriction() {
        let g = parse_graph("n=5; 0-1 1-2 2-3 3-0 0-4").unwrap();
        assert_eq!(m2_local(&g, 0b01111).unwrap(), rat(3, 2));
        assert_eq!(m2_local(&g, 0b11111).unwrap(), m2(&g).unwrap());
        assert!(m2_local(&g, 0b00011).is_err());
    }
}
