//! PUT-Ranked-Pairs solvers.
//!
//! Two searches over tiebreaking universes: a naive DFS that locks one
//! edge of the current highest tier at a time, and a maximal-children
//! search that advances a whole tier per step, enumerating every
//! maximal acyclic way of adding the tier (optionally through SCC
//! decomposition). Both share the pruning conditions, the visited
//! cache, local priorities and pre-search sampling.

use crate::bits::EdgeBits;
use crate::error::{Error, Result};
use crate::graph::{build_wmg, creates_cycle, scc_decompose, tier_partition, DiGraph};
use crate::profile::Profile;
use crate::search::{
    resolve_scores, BoundedCache, PriorityMode, Rule, SearchCtx, SolveOptions, WinnerReport,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeSet, HashSet};

fn check_profile(profile: &Profile) -> Result<()> {
    if profile.m == 0 {
        return Err(Error::Domain("profile has no alternatives".into()));
    }
    if profile.m > 64 {
        return Err(Error::CapExceeded(format!(
            "solver supports up to 64 alternatives, got {}",
            profile.m
        )));
    }
    Ok(())
}

/// Precomputed tier structure with stable global edge ids: tier 0
/// first, lexicographic inside each tier.
struct RpSetup {
    m: usize,
    edges: Vec<(usize, usize)>,
    tier_ranges: Vec<std::ops::Range<usize>>,
}

impl RpSetup {
    fn new(profile: &Profile) -> Self {
        let wmg = build_wmg(profile);
        let tiers = tier_partition(&wmg);
        let mut edges = Vec::new();
        let mut tier_ranges = Vec::with_capacity(tiers.len());
        for t in &tiers {
            let start = edges.len();
            edges.extend_from_slice(&t.edges);
            tier_ranges.push(start..edges.len());
        }
        RpSetup {
            m: profile.m,
            edges,
            tier_ranges,
        }
    }

    fn tier_of(&self, id: usize) -> usize {
        self.tier_ranges
            .iter()
            .position(|r| r.contains(&id))
            .expect("edge id in some tier")
    }
}

/// Drop every pending edge that closes a cycle against `g`. Keeps
/// pending sets canonical: a state's pending set is then a pure
/// function of its locked graph, which is what makes locked-edge cache
/// keys sound.
fn drop_cyclic(setup: &RpSetup, g: &DiGraph, pending: &mut EdgeBits) {
    let reach: Vec<u64> = (0..setup.m).map(|v| g.reach_mask(1u64 << v)).collect();
    let ids: Vec<usize> = pending.iter().collect();
    for id in ids {
        let (u, v) = setup.edges[id];
        if reach[v] & (1u64 << u) != 0 {
            pending.clear(id);
        }
    }
}

fn child_priority(g: &DiGraph, ctx: &SearchCtx, mode: PriorityMode, scores: Option<&[f64]>) -> f64 {
    let unknown_sources = g.sources_mask() & !ctx.winners_mask;
    match mode {
        PriorityMode::None => 0.0,
        PriorityMode::Lp => unknown_sources.count_ones() as f64,
        PriorityMode::Lpml => {
            let scores = scores.expect("lpml scores resolved");
            crate::bits::iter_bits(unknown_sources)
                .map(|a| scores[a])
                .sum()
        }
    }
}

/// Pruning conditions shared by every ranked-pairs search, checked
/// against the global known-winner set:
/// (i) every alternative that is not a known winner has an incoming
///     locked edge: nothing new below, skip;
/// (ii) all but one vertex have an incoming locked edge: the remaining
///     vertex is the source of every completion, record it and skip.
fn prune_state(g: &DiGraph, ctx: &mut SearchCtx) -> bool {
    let zero = g.sources_mask();
    if zero & !ctx.winners_mask == 0 {
        ctx.states_pruned += 1;
        return true;
    }
    if zero.count_ones() == 1 {
        ctx.record_winners_mask(zero);
        ctx.states_pruned += 1;
        return true;
    }
    false
}

fn record_leaf(g: &DiGraph, ctx: &mut SearchCtx) {
    let sources = g.sources_mask();
    if sources.count_ones() > 1 {
        ctx.multi_source_leaf = true;
    }
    ctx.record_winners_mask(sources);
}

// ---------------------------------------------------------------------------
// Maximal children
// ---------------------------------------------------------------------------

/// Inner DFS of the maximal-children enumeration: add one tier edge
/// at a time, discard cycle-creating successors, and record a state
/// whose every remaining edge would close a cycle. `solver` carries
/// the search context when invoked from the solver (node counting,
/// pruning, priorities); standalone calls enumerate exactly.
fn max_children_inner(
    g: &DiGraph,
    t: &[(usize, usize)],
    mode: PriorityMode,
    scores: Option<&[f64]>,
    prune: bool,
    mut solver: Option<&mut SearchCtx>,
) -> Result<Vec<DiGraph>> {
    if !g.is_acyclic() {
        return Err(Error::Domain("maximal children of a cyclic graph".into()));
    }
    let m = g.vertex_count();
    // Candidate edges: tier edges not already locked, deduplicated.
    let mut cand: Vec<(usize, usize)> = Vec::new();
    let mut seen = HashSet::new();
    for &(u, v) in t {
        if u == v || u >= m || v >= m {
            return Err(Error::Domain(format!("bad tier edge ({u}, {v})")));
        }
        if !g.has_edge(u, v) && seen.insert((u, v)) {
            cand.push((u, v));
        }
    }

    let mut root_pending = EdgeBits::new(cand.len());
    for (i, &e) in cand.iter().enumerate() {
        if !creates_cycle(g, e) {
            root_pending.set(i);
        }
    }

    let mut stack: Vec<(DiGraph, EdgeBits)> = vec![(g.clone(), root_pending)];
    let mut visited: HashSet<Vec<u64>> = HashSet::new();
    let mut results: Vec<DiGraph> = Vec::new();
    let mut children: Vec<(f64, usize, DiGraph, EdgeBits)> = Vec::new();

    while let Some((h, pending)) = stack.pop() {
        if !visited.insert(h.packed_edges()) {
            if let Some(ctx) = solver.as_deref_mut() {
                ctx.cache_hits += 1;
            }
            continue;
        }
        if let Some(ctx) = solver.as_deref_mut() {
            if prune && prune_state(&h, ctx) {
                continue;
            }
            if !ctx.expand() {
                break;
            }
        }
        if pending.is_empty() {
            // Every omitted candidate edge closes a cycle: maximal.
            results.push(h);
            continue;
        }
        children.clear();
        for id in pending.iter() {
            let mut h2 = h.clone();
            h2.add_edge(cand[id].0, cand[id].1).expect("valid edge");
            let mut pending2 = pending.clone();
            pending2.clear(id);
            // Drop successors the new edge made cyclic.
            let ids: Vec<usize> = pending2.iter().collect();
            for j in ids {
                if creates_cycle(&h2, cand[j]) {
                    pending2.clear(j);
                }
            }
            let prio = match solver.as_deref() {
                Some(ctx) => child_priority(&h2, ctx, mode, scores),
                None => 0.0,
            };
            children.push((prio, id, h2, pending2));
        }
        children.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
        for (_, _, h2, pending2) in children.drain(..).rev() {
            stack.push((h2, pending2));
        }
    }

    results.sort_by_key(|c| c.packed_edges());
    Ok(results)
}

/// All maximal children of `(g, t)`: acyclic graphs extending `g`
/// with a subset of `t` such that any omitted edge of `t` would close
/// a cycle.
pub fn max_children(g: &DiGraph, t: &[(usize, usize)]) -> Result<Vec<DiGraph>> {
    max_children_inner(g, t, PriorityMode::None, None, false, None)
}

/// Same result set as [`max_children`], computed by SCC decomposition
/// of `g` with `t`: bridge edges are included unconditionally, each
/// strongly connected component is solved independently, and the
/// per-component answers combine as a Cartesian product.
pub fn max_children_scc(g: &DiGraph, t: &[(usize, usize)]) -> Result<Vec<DiGraph>> {
    max_children_scc_inner(g, t, PriorityMode::None, None, false, None)
}

fn max_children_scc_inner(
    g: &DiGraph,
    t: &[(usize, usize)],
    mode: PriorityMode,
    scores: Option<&[f64]>,
    prune: bool,
    mut solver: Option<&mut SearchCtx>,
) -> Result<Vec<DiGraph>> {
    if !g.is_acyclic() {
        return Err(Error::Domain("maximal children of a cyclic graph".into()));
    }
    let m = g.vertex_count();
    let mut full = g.clone();
    for &(u, v) in t {
        full.add_edge(u, v)?;
    }
    let (comps, bridges) = scc_decompose(&full);
    if comps.len() == 1 {
        return max_children_inner(g, t, mode, scores, prune, solver);
    }

    // Base graph: every bridge edge (from g and from t alike).
    let mut base = DiGraph::new(m)?;
    for (u, v) in bridges {
        base.add_edge(u, v).expect("valid edge");
    }
    let mut combos: Vec<DiGraph> = vec![base];
    for comp in comps {
        if comp.count_ones() < 2 {
            continue;
        }
        let inside = |u: usize, v: usize| comp & (1u64 << u) != 0 && comp & (1u64 << v) != 0;
        let mut g_i = DiGraph::new(m)?;
        for (u, v) in g.edges() {
            if inside(u, v) {
                g_i.add_edge(u, v).expect("valid edge");
            }
        }
        let t_i: Vec<(usize, usize)> = t
            .iter()
            .copied()
            .filter(|&(u, v)| inside(u, v))
            .collect();
        let part = max_children_inner(&g_i, &t_i, mode, scores, prune, solver.as_deref_mut())?;
        let mut next = Vec::with_capacity(combos.len() * part.len());
        for c in &combos {
            for p in &part {
                let mut merged = c.clone();
                for (u, v) in p.edges() {
                    merged.add_edge(u, v).expect("valid edge");
                }
                next.push(merged);
            }
        }
        combos = next;
    }
    combos.sort_by_key(|c| c.packed_edges());
    Ok(combos)
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// One ranked-pairs run with a uniformly random tiebreaking order
/// inside every tier; returns the sources of the final locked graph.
/// `on_step` is called once per considered edge and may abort the run.
fn sampled_rp_run(
    setup: &RpSetup,
    rng: &mut ChaCha8Rng,
    mut on_step: impl FnMut() -> bool,
) -> Option<u64> {
    let mut g = DiGraph::new(setup.m).expect("checked m");
    for range in &setup.tier_ranges {
        let mut order: Vec<usize> = range.clone().collect();
        order.shuffle(rng);
        for id in order {
            if !on_step() {
                return None;
            }
            let e = setup.edges[id];
            if !creates_cycle(&g, e) {
                g.add_edge(e.0, e.1).expect("valid edge");
            }
        }
    }
    Some(g.sources_mask())
}

/// Union of the winners of `k` random fixed-tiebreak ranked-pairs
/// runs. Always a subset of the PUT-winner set.
pub fn sample_rp(profile: &Profile, k: u64, seed: u64) -> Result<BTreeSet<usize>> {
    check_profile(profile)?;
    let setup = RpSetup::new(profile);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut winners = BTreeSet::new();
    for _ in 0..k {
        let sources = sampled_rp_run(&setup, &mut rng, || true).expect("not aborted");
        winners.extend(crate::bits::iter_bits(sources));
    }
    Ok(winners)
}

fn sampling_phase(setup: &RpSetup, options: &SolveOptions, ctx: &mut SearchCtx) {
    let count = options.sampling.resolve(Rule::Rp, setup.m);
    if count == 0 {
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    for _ in 0..count {
        match sampled_rp_run(setup, &mut rng, || ctx.expand()) {
            Some(sources) => ctx.record_winners_mask(sources),
            None => break,
        }
    }
}

// ---------------------------------------------------------------------------
// Naive DFS solver
// ---------------------------------------------------------------------------

/// Compute the PUT-ranked-pairs winner set by naive DFS: each state
/// locks one non-cycle-creating edge of its highest pending tier.
pub fn solve_put_rp_naive(profile: &Profile, options: &SolveOptions) -> Result<WinnerReport> {
    check_profile(profile)?;
    let setup = RpSetup::new(profile);
    let scores = resolve_scores(options, profile, Rule::Rp)?;
    let mut ctx = SearchCtx::new(options.max_nodes);
    sampling_phase(&setup, options, &mut ctx);

    let mut root_pending = EdgeBits::new(setup.edges.len());
    for id in 0..setup.edges.len() {
        root_pending.set(id);
    }
    let root = DiGraph::new(setup.m)?;
    drop_cyclic(&setup, &root, &mut root_pending); // no-op on an empty graph
    let mut stack: Vec<(DiGraph, EdgeBits)> = vec![(root, root_pending)];
    let mut visited: BoundedCache<Vec<u64>> = BoundedCache::new(options.cache_cap);
    let mut children: Vec<(f64, usize, DiGraph, EdgeBits)> = Vec::new();

    while let Some((g, pending)) = stack.pop() {
        if ctx.truncated {
            break;
        }
        if pending.is_empty() {
            if !ctx.expand() {
                break;
            }
            record_leaf(&g, &mut ctx);
            continue;
        }
        if options.cache {
            let key = g.packed_edges();
            if visited.contains(&key) {
                ctx.cache_hits += 1;
                continue;
            }
            visited.insert(key);
        }
        if options.prune && prune_state(&g, &mut ctx) {
            continue;
        }
        if !ctx.expand() {
            break;
        }

        let top_tier = setup.tier_of(pending.first().expect("pending nonempty"));
        let range = &setup.tier_ranges[top_tier];
        children.clear();
        for id in pending.iter().take_while(|&id| range.contains(&id)) {
            let (u, v) = setup.edges[id];
            let mut g2 = g.clone();
            g2.add_edge(u, v).expect("valid edge");
            let mut pending2 = pending.clone();
            pending2.clear(id);
            drop_cyclic(&setup, &g2, &mut pending2);
            let prio = child_priority(&g2, &ctx, options.priority, scores.as_deref());
            children.push((prio, id, g2, pending2));
        }
        children.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
        for (_, _, g2, pending2) in children.drain(..).rev() {
            stack.push((g2, pending2));
        }
    }

    Ok(ctx.into_report(Rule::Rp))
}

// ---------------------------------------------------------------------------
// Maximal-children solver
// ---------------------------------------------------------------------------

/// Compute the PUT-ranked-pairs winner set tier by tier: each state
/// expands into the maximal children of its locked graph with the next
/// tier ([`max_children`], or [`max_children_scc`] when `options.scc`
/// is set). Winner set equals the naive solver's on every profile.
pub fn solve_put_rp_mc(profile: &Profile, options: &SolveOptions) -> Result<WinnerReport> {
    check_profile(profile)?;
    let setup = RpSetup::new(profile);
    let scores = resolve_scores(options, profile, Rule::Rp)?;
    let mut ctx = SearchCtx::new(options.max_nodes);
    sampling_phase(&setup, options, &mut ctx);

    let tier_count = setup.tier_ranges.len();
    let mut stack: Vec<(DiGraph, usize)> = vec![(DiGraph::new(setup.m)?, 0)];
    let mut visited: BoundedCache<Vec<u64>> = BoundedCache::new(options.cache_cap);

    while let Some((g, mut next_tier)) = stack.pop() {
        if ctx.truncated {
            break;
        }
        if options.cache {
            let key = g.packed_edges();
            if visited.contains(&key) {
                ctx.cache_hits += 1;
                continue;
            }
            visited.insert(key);
        }
        if options.prune && prune_state(&g, &mut ctx) {
            continue;
        }
        if !ctx.expand() {
            break;
        }

        // Skip tiers whose edges all close cycles; they cannot change
        // the locked graph, and skipping keeps states keyed by it.
        let tier_edges: Vec<(usize, usize)> = loop {
            if next_tier == tier_count {
                record_leaf(&g, &mut ctx);
                break Vec::new();
            }
            let addable: Vec<(usize, usize)> = setup.tier_ranges[next_tier]
                .clone()
                .map(|id| setup.edges[id])
                .filter(|&e| !creates_cycle(&g, e))
                .collect();
            if addable.is_empty() {
                next_tier += 1;
                continue;
            }
            break addable;
        };
        if tier_edges.is_empty() {
            continue;
        }

        let kids = if options.scc {
            max_children_scc_inner(
                &g,
                &tier_edges,
                options.priority,
                scores.as_deref(),
                options.prune,
                Some(&mut ctx),
            )?
        } else {
            max_children_inner(
                &g,
                &tier_edges,
                options.priority,
                scores.as_deref(),
                options.prune,
                Some(&mut ctx),
            )?
        };
        let mut ordered: Vec<(f64, DiGraph)> = kids
            .into_iter()
            .map(|c| (child_priority(&c, &ctx, options.priority, scores.as_deref()), c))
            .collect();
        ordered.sort_by(|a, b| {
            b.0.partial_cmp(&a.0)
                .unwrap()
                .then_with(|| a.1.packed_edges().cmp(&b.1.packed_edges()))
        });
        for (_, c) in ordered.into_iter().rev() {
            stack.push((c, next_tier + 1));
        }
    }

    Ok(ctx.into_report(Rule::Rp))
}
