//! Weighted majority graphs, tier partitions, and the digraph
//! primitives the ranked-pairs solvers and the ILP builders share:
//! cycle detection, SCC/bridge decomposition, sources, and induced
//! (bottleneck) path weight.

use crate::bits::iter_bits;
use crate::error::{Error, Result};
use crate::profile::Profile;
use crate::scores::pairwise_preferences;
use std::collections::BinaryHeap;

/// Signed pairwise margins: `weight(a, b) = #(a above b) - #(b above a)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedMajorityGraph {
    pub m: usize,
    weights: Vec<i64>,
}

impl WeightedMajorityGraph {
    pub fn from_weights(m: usize, weights: Vec<i64>) -> Result<Self> {
        if weights.len() != m * m {
            return Err(Error::Validation(format!(
                "expected {} weights, got {}",
                m * m,
                weights.len()
            )));
        }
        let g = WeightedMajorityGraph { m, weights };
        for a in 0..m {
            for b in 0..m {
                if g.weight(a, b) != -g.weight(b, a) {
                    return Err(Error::Validation(format!(
                        "weights not antisymmetric at ({a}, {b})"
                    )));
                }
            }
        }
        Ok(g)
    }

    pub fn weight(&self, a: usize, b: usize) -> i64 {
        self.weights[a * self.m + b]
    }

    /// Ordered pairs with nonnegative margin (both directions when the
    /// margin is 0), lexicographic.
    pub fn nonneg_edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for a in 0..self.m {
            for b in 0..self.m {
                if a != b && self.weight(a, b) >= 0 {
                    edges.push((a, b));
                }
            }
        }
        edges
    }

    /// Line-based debug form: one `a b w` triple per ordered pair with
    /// w >= 0, the format used by test fixtures.
    pub fn to_debug_text(&self) -> String {
        let mut out = String::new();
        for (a, b) in self.nonneg_edges() {
            out.push_str(&format!("{} {} {}\n", a, b, self.weight(a, b)));
        }
        out
    }
}

/// Build the weighted majority graph of a profile.
pub fn build_wmg(profile: &Profile) -> WeightedMajorityGraph {
    let m = profile.m;
    let over = pairwise_preferences(profile);
    let mut weights = vec![0i64; m * m];
    for a in 0..m {
        for b in 0..m {
            if a != b {
                weights[a * m + b] = over[a][b] as i64 - over[b][a] as i64;
            }
        }
    }
    WeightedMajorityGraph { m, weights }
}

/// One tier: every nonnegative edge of a single weight, lexicographic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tier {
    pub weight: i64,
    pub edges: Vec<(usize, usize)>,
}

/// Partition the nonnegative edges into tiers of strictly decreasing
/// weight. Edge order inside a tier is lexicographic by (source,
/// target) so every solver and oracle enumerates identically.
pub fn tier_partition(wmg: &WeightedMajorityGraph) -> Vec<Tier> {
    let mut tiers: Vec<Tier> = Vec::new();
    let mut edges = wmg.nonneg_edges();
    edges.sort_by_key(|&(a, b)| (std::cmp::Reverse(wmg.weight(a, b)), a, b));
    for (a, b) in edges {
        let w = wmg.weight(a, b);
        match tiers.last_mut() {
            Some(t) if t.weight == w => t.edges.push((a, b)),
            _ => tiers.push(Tier {
                weight: w,
                edges: vec![(a, b)],
            }),
        }
    }
    tiers
}

/// A directed graph over at most 64 vertices, stored as adjacency
/// bitmasks. No self-loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiGraph {
    m: usize,
    out: Vec<u64>,
    inn: Vec<u64>,
}

impl DiGraph {
    pub fn new(m: usize) -> Result<Self> {
        if m > 64 {
            return Err(Error::CapExceeded(format!(
                "digraph supports up to 64 vertices, got {m}"
            )));
        }
        Ok(DiGraph {
            m,
            out: vec![0; m],
            inn: vec![0; m],
        })
    }

    pub fn from_edges(m: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = DiGraph::new(m)?;
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.m
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u == v {
            return Err(Error::Domain(format!("self-loop at vertex {u}")));
        }
        if u >= self.m || v >= self.m {
            return Err(Error::Domain(format!("edge ({u}, {v}) out of range")));
        }
        self.out[u] |= 1u64 << v;
        self.inn[v] |= 1u64 << u;
        Ok(())
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.out[u] & (1u64 << v) != 0
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(|o| o.count_ones() as usize).sum()
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut es = Vec::with_capacity(self.edge_count());
        for u in 0..self.m {
            for v in iter_bits(self.out[u]) {
                es.push((u, v));
            }
        }
        es
    }

    pub fn indegree(&self, v: usize) -> usize {
        self.inn[v].count_ones() as usize
    }

    /// Vertices reachable from those in `start` (including `start`).
    pub fn reach_mask(&self, start: u64) -> u64 {
        let mut reached = start;
        let mut frontier = start;
        while frontier != 0 {
            let mut next = 0u64;
            for v in iter_bits(frontier) {
                next |= self.out[v];
            }
            frontier = next & !reached;
            reached |= next;
        }
        reached
    }

    /// True when a directed path `from -> to` exists (or `from == to`).
    pub fn reaches(&self, from: usize, to: usize) -> bool {
        self.reach_mask(1u64 << from) & (1u64 << to) != 0
    }

    /// Vertices with indegree 0 as a mask.
    pub fn sources_mask(&self) -> u64 {
        let mut mask = 0u64;
        for v in 0..self.m {
            if self.inn[v] == 0 {
                mask |= 1u64 << v;
            }
        }
        mask
    }

    pub fn is_acyclic(&self) -> bool {
        // Acyclic iff no vertex reaches itself through an edge.
        (0..self.m).all(|v| self.reach_mask(self.out[v]) & (1u64 << v) == 0)
    }

    /// Canonical packed edge bits (`u * m + v`), usable as a cache key.
    pub fn packed_edges(&self) -> Vec<u64> {
        let mut words = vec![0u64; (self.m * self.m).div_ceil(64)];
        for u in 0..self.m {
            for v in iter_bits(self.out[u]) {
                let id = u * self.m + v;
                words[id / 64] |= 1u64 << (id % 64);
            }
        }
        words
    }
}

/// True iff adding edge `e` to acyclic `g` would close a directed
/// cycle, i.e. the target of `e` already reaches its source.
pub fn creates_cycle(g: &DiGraph, e: (usize, usize)) -> bool {
    g.reaches(e.1, e.0)
}

/// Vertices with indegree 0, sorted.
pub fn sources(g: &DiGraph) -> Vec<usize> {
    iter_bits(g.sources_mask()).collect()
}

/// Decompose into strongly connected components and bridge edges.
///
/// Components are returned as vertex masks ordered by smallest member;
/// bridge edges are the edges whose endpoints lie in different
/// components (hence in no cycle), lexicographic.
pub fn scc_decompose(g: &DiGraph) -> (Vec<u64>, Vec<(usize, usize)>) {
    let m = g.vertex_count();
    let fwd: Vec<u64> = (0..m).map(|v| g.reach_mask(1u64 << v)).collect();
    let mut comp_of = vec![usize::MAX; m];
    let mut comps: Vec<u64> = Vec::new();
    for v in 0..m {
        if comp_of[v] != usize::MAX {
            continue;
        }
        // Mutual reachability: u is in v's component iff v reaches u
        // and u reaches v.
        let mut comp = 0u64;
        for u in iter_bits(fwd[v]) {
            if fwd[u] & (1u64 << v) != 0 {
                comp |= 1u64 << u;
            }
        }
        for u in iter_bits(comp) {
            comp_of[u] = comps.len();
        }
        comps.push(comp);
    }
    let bridges = g
        .edges()
        .into_iter()
        .filter(|&(u, v)| comp_of[u] != comp_of[v])
        .collect();
    (comps, bridges)
}

/// Maximum over directed `a -> b` paths in `g` of the minimum edge
/// weight along the path (edge weights taken from `wmg`). `None` when
/// no path exists; the callers treat that as minus infinity.
pub fn induced_weight(
    wmg: &WeightedMajorityGraph,
    g: &DiGraph,
    a: usize,
    b: usize,
) -> Result<Option<i64>> {
    if a == b {
        return Err(Error::Domain(
            "induced weight between an alternative and itself".into(),
        ));
    }
    let m = g.vertex_count();
    // Dijkstra-style widest path: labels only decrease along a path,
    // so extracting the best label is final.
    let mut best: Vec<Option<i64>> = vec![None; m];
    let mut heap: BinaryHeap<(i64, usize)> = BinaryHeap::new();
    for v in iter_bits(g.out[a]) {
        let w = wmg.weight(a, v);
        if best[v].is_none_or(|cur| w > cur) {
            best[v] = Some(w);
            heap.push((w, v));
        }
    }
    while let Some((label, v)) = heap.pop() {
        if best[v] != Some(label) {
            continue;
        }
        if v == b {
            return Ok(Some(label));
        }
        for u in iter_bits(g.out[v]) {
            let w = label.min(wmg.weight(v, u));
            if best[u].is_none_or(|cur| w > cur) {
                best[u] = Some(w);
                heap.push((w, u));
            }
        }
    }
    Ok(best[b])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{Profile, VoteGroup};

    fn abc_profile() -> Profile {
        Profile::new(
            3,
            crate::profile::default_names(3),
            vec![
                VoteGroup { count: 2, ranking: vec![0, 1, 2] },
                VoteGroup { count: 1, ranking: vec![1, 0, 2] },
                VoteGroup { count: 1, ranking: vec![2, 1, 0] },
            ],
        )
        .unwrap()
    }

    #[test]
    fn wmg_margins_and_zero_edges() {
        let wmg = build_wmg(&abc_profile());
        assert_eq!(wmg.weight(0, 1), 0);
        assert_eq!(wmg.weight(0, 2), 2);
        assert_eq!(wmg.weight(1, 2), 2);
        let edges = wmg.nonneg_edges();
        assert!(edges.contains(&(0, 1)) && edges.contains(&(1, 0)));
    }

    #[test]
    fn wmg_condorcet_cycle() {
        let p = Profile::from_rankings(3, &[vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]).unwrap();
        let wmg = build_wmg(&p);
        assert_eq!(wmg.weight(0, 1), 1);
        assert_eq!(wmg.weight(1, 2), 1);
        assert_eq!(wmg.weight(2, 0), 1);
    }

    #[test]
    fn wmg_single_vote() {
        let p = Profile::from_rankings(2, &[vec![0, 1]]).unwrap();
        let wmg = build_wmg(&p);
        assert_eq!(wmg.weight(0, 1), 1);
        assert_eq!(wmg.weight(1, 0), -1);
    }

    #[test]
    fn tiers_group_by_weight_descending() {
        let wmg = build_wmg(&abc_profile());
        let tiers = tier_partition(&wmg);
        assert_eq!(tiers.len(), 2);
        assert_eq!(tiers[0].weight, 2);
        assert_eq!(tiers[0].edges, vec![(0, 2), (1, 2)]);
        assert_eq!(tiers[1].weight, 0);
        assert_eq!(tiers[1].edges, vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn distinct_weights_make_singleton_tiers() {
        let p = crate::profile::profile_with_margins(3, &[(0, 1, 1), (0, 2, 3), (1, 2, 5)])
            .unwrap();
        let wmg = build_wmg(&p);
        let tiers = tier_partition(&wmg);
        let nonneg = wmg.nonneg_edges().len();
        assert_eq!(tiers.iter().map(|t| t.edges.len()).sum::<usize>(), nonneg);
        assert!(tiers.windows(2).all(|w| w[0].weight > w[1].weight));
        assert!(tiers.iter().all(|t| t.edges.len() == 1));
    }

    #[test]
    fn empty_profile_is_one_zero_tier() {
        let p = Profile::new(3, crate::profile::default_names(3), vec![]).unwrap();
        let wmg = build_wmg(&p);
        let tiers = tier_partition(&wmg);
        assert_eq!(tiers.len(), 1);
        assert_eq!(tiers[0].weight, 0);
        assert_eq!(tiers[0].edges.len(), 6);
    }

    #[test]
    fn cycle_detection() {
        let g = DiGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(creates_cycle(&g, (2, 0)));
        assert!(!creates_cycle(&g, (0, 2)));
        let empty = DiGraph::new(2).unwrap();
        assert!(!creates_cycle(&empty, (0, 1)));
    }

    #[test]
    fn scc_and_bridges() {
        let g = DiGraph::from_edges(4, &[(0, 1), (1, 0), (2, 3), (3, 2), (1, 2)]).unwrap();
        let (comps, bridges) = scc_decompose(&g);
        assert_eq!(comps, vec![0b0011, 0b1100]);
        assert_eq!(bridges, vec![(1, 2)]);
    }

    #[test]
    fn acyclic_graph_is_all_singletons_and_bridges() {
        let g = DiGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let (comps, bridges) = scc_decompose(&g);
        assert_eq!(comps.len(), 3);
        assert_eq!(bridges.len(), 2);
    }

    #[test]
    fn full_cycle_is_one_component() {
        let g = DiGraph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let (comps, bridges) = scc_decompose(&g);
        assert_eq!(comps, vec![0b111]);
        assert!(bridges.is_empty());
    }

    #[test]
    fn source_vertices() {
        let g = DiGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(sources(&g), vec![0]);
        let g = DiGraph::new(3).unwrap();
        assert_eq!(sources(&g), vec![0, 1, 2]);
        let g = DiGraph::from_edges(3, &[(0, 1), (2, 1)]).unwrap();
        assert_eq!(sources(&g), vec![0, 2]);
    }

    #[test]
    fn induced_weight_picks_widest_path() {
        // Three D->A paths of bottleneck 1, 3, 1 (vertices A=0, B=1,
        // C=2, D=3); the widest is D->C->A.
        let weights = vec![
            //   A   B   C   D
            0, -3, -3, -1, // A
            3, 0, -1, 1, // B
            3, 1, 0, -3, // C
            1, -1, 3, 0, // D
        ];
        let wmg = WeightedMajorityGraph::from_weights(4, weights).unwrap();
        let g = DiGraph::from_edges(4, &[(1, 0), (2, 0), (3, 2), (2, 1), (3, 0)]).unwrap();
        assert_eq!(induced_weight(&wmg, &g, 3, 0).unwrap(), Some(3));
        // No path from A anywhere.
        assert_eq!(induced_weight(&wmg, &g, 0, 3).unwrap(), None);
        assert!(induced_weight(&wmg, &g, 1, 1).is_err());
    }

    #[test]
    fn induced_weight_single_edge() {
        let weights = vec![0, 5, -5, 0];
        let wmg = WeightedMajorityGraph::from_weights(2, weights).unwrap();
        let g = DiGraph::from_edges(2, &[(0, 1)]).unwrap();
        assert_eq!(induced_weight(&wmg, &g, 0, 1).unwrap(), Some(5));
    }

    #[test]
    fn induced_weight_at_least_direct_edge() {
        let wmg = build_wmg(&abc_profile());
        let mut g = DiGraph::new(3).unwrap();
        for (a, b) in wmg.nonneg_edges() {
            if wmg.weight(a, b) > 0 {
                g.add_edge(a, b).unwrap();
            }
        }
        for (a, b) in g.edges() {
            let iw = induced_weight(&wmg, &g, a, b).unwrap().unwrap();
            assert!(iw >= wmg.weight(a, b));
        }
    }
}
