//! Shared solver plumbing: configuration, the visited-state cache with
//! its clear-on-full policy, and the winner report with per-winner
//! discovery records.

use crate::error::{Error, Result};
use crate::priority::PriorityScorer;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashSet};
use std::hash::Hash;
use std::sync::Arc;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    Stv,
    Rp,
}

impl std::fmt::Display for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Rule::Stv => write!(f, "stv"),
            Rule::Rp => write!(f, "rp"),
        }
    }
}

/// Local-priority mode for child ordering.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PriorityMode {
    /// No priority: children are explored in lexicographic order.
    #[default]
    None,
    /// Number of candidate winners not yet known to be winners.
    Lp,
    /// Sum of per-alternative scorer probabilities over the unknown
    /// candidates.
    Lpml,
}

/// Pre-search sampling volume.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Sampling {
    #[default]
    Off,
    /// Rule-dependent default: 20*m fixed-tiebreak runs for STV, 200
    /// for ranked pairs.
    Default,
    Fixed(u64),
}

// Serialized as the strings "off" / "default" or a plain count, so
// bench TOML configs can say `samples = 200` or `samples = "default"`.
impl Serialize for Sampling {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Sampling::Off => s.serialize_str("off"),
            Sampling::Default => s.serialize_str("default"),
            Sampling::Fixed(k) => s.serialize_u64(*k),
        }
    }
}

impl<'de> Deserialize<'de> for Sampling {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = Sampling;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a sample count, \"off\", or \"default\"")
            }

            fn visit_u64<E: serde::de::Error>(self, v: u64) -> std::result::Result<Sampling, E> {
                Ok(if v == 0 { Sampling::Off } else { Sampling::Fixed(v) })
            }

            fn visit_i64<E: serde::de::Error>(self, v: i64) -> std::result::Result<Sampling, E> {
                if v < 0 {
                    return Err(E::custom("sample count must be >= 0"));
                }
                self.visit_u64(v as u64)
            }

            fn visit_str<E: serde::de::Error>(self, v: &str) -> std::result::Result<Sampling, E> {
                match v {
                    "off" => Ok(Sampling::Off),
                    "default" => Ok(Sampling::Default),
                    other => other
                        .parse::<u64>()
                        .map(|k| if k == 0 { Sampling::Off } else { Sampling::Fixed(k) })
                        .map_err(|_| E::custom(format!("bad sampling spec {other:?}"))),
                }
            }
        }
        d.deserialize_any(V)
    }
}

impl std::str::FromStr for Sampling {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "off" => Ok(Sampling::Off),
            "default" => Ok(Sampling::Default),
            other => other
                .parse::<u64>()
                .map(|k| if k == 0 { Sampling::Off } else { Sampling::Fixed(k) })
                .map_err(|_| format!("bad sampling spec {other:?} (expected off, default, or a count)")),
        }
    }
}

impl Sampling {
    pub fn resolve(self, rule: Rule, m: usize) -> u64 {
        match self {
            Sampling::Off => 0,
            Sampling::Fixed(k) => k,
            Sampling::Default => match rule {
                Rule::Stv => 20 * m as u64,
                Rule::Rp => 200,
            },
        }
    }
}

/// Solver configuration shared by the STV and RP searches.
#[derive(Clone)]
pub struct SolveOptions {
    pub priority: PriorityMode,
    /// Scorer backing LPML. When `priority` is `Lpml` and no scorer is
    /// supplied, the uniform scorer (every probability 0.5) is used.
    pub scorer: Option<Arc<dyn PriorityScorer>>,
    pub sampling: Sampling,
    pub seed: u64,
    pub prune: bool,
    pub cache: bool,
    /// Visited-cache entry cap; the cache clears itself when full so
    /// long searches degrade instead of exhausting memory. `None`
    /// means unbounded.
    pub cache_cap: Option<usize>,
    /// Hard stop on expanded states; a truncated report is flagged.
    pub max_nodes: Option<u64>,
    /// Re-extract LPML scores on the state-restricted profile at every
    /// STV expansion instead of scoring the root profile once.
    pub rescore_per_state: bool,
    /// Use SCC decomposition inside the maximal-children solver.
    pub scc: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            priority: PriorityMode::None,
            scorer: None,
            sampling: Sampling::Off,
            seed: 0,
            prune: true,
            cache: true,
            cache_cap: Some(1 << 22),
            max_nodes: None,
            rescore_per_state: false,
            scc: true,
        }
    }
}

impl std::fmt::Debug for SolveOptions {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SolveOptions")
            .field("priority", &self.priority)
            .field("sampling", &self.sampling)
            .field("seed", &self.seed)
            .field("prune", &self.prune)
            .field("cache", &self.cache)
            .field("cache_cap", &self.cache_cap)
            .field("max_nodes", &self.max_nodes)
            .field("rescore_per_state", &self.rescore_per_state)
            .field("scc", &self.scc)
            .finish()
    }
}

/// Visited-state set with a clear-on-full cap.
pub(crate) struct BoundedCache<K> {
    set: HashSet<K>,
    cap: Option<usize>,
    pub clears: u64,
}

impl<K: Eq + Hash> BoundedCache<K> {
    pub fn new(cap: Option<usize>) -> Self {
        BoundedCache {
            set: HashSet::new(),
            cap,
            clears: 0,
        }
    }

    pub fn contains(&self, k: &K) -> bool {
        self.set.contains(k)
    }

    pub fn insert(&mut self, k: K) {
        if let Some(cap) = self.cap {
            if self.set.len() >= cap {
                self.set.clear();
                self.clears += 1;
            }
        }
        self.set.insert(k);
    }
}

/// One PUT-winner discovery: which alternative, after how many
/// expanded states, and how long after the solve started.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Discovery {
    pub alternative: usize,
    pub at_node: u64,
    pub at_ms: f64,
}

/// Outcome of one solve: the complete PUT-winner set plus discovery
/// and work counters.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WinnerReport {
    pub rule: Rule,
    pub winners: BTreeSet<usize>,
    pub discoveries: Vec<Discovery>,
    pub nodes_expanded: u64,
    pub states_pruned: u64,
    pub cache_hits: u64,
    pub total_ms: f64,
    /// Node cap reached; the winner set may be incomplete.
    pub truncated: bool,
    /// A ranked-pairs leaf had several indegree-0 vertices (possible
    /// with pairwise ties); all of them were added as winners.
    pub multi_source_leaf: bool,
}

impl WinnerReport {
    /// Node index of the last discovery (the 100%-discovery point).
    pub fn full_discovery_node(&self) -> u64 {
        self.discoveries.last().map_or(0, |d| d.at_node)
    }

    pub fn full_discovery_ms(&self) -> f64 {
        self.discoveries.last().map_or(0.0, |d| d.at_ms)
    }
}

/// Mutable search context threaded through the solvers: known winners,
/// discovery log and counters.
pub(crate) struct SearchCtx {
    pub start: Instant,
    pub winners_mask: u64,
    pub discoveries: Vec<Discovery>,
    pub nodes_expanded: u64,
    pub states_pruned: u64,
    pub cache_hits: u64,
    pub truncated: bool,
    pub multi_source_leaf: bool,
    pub max_nodes: Option<u64>,
}

impl SearchCtx {
    pub fn new(max_nodes: Option<u64>) -> Self {
        SearchCtx {
            start: Instant::now(),
            winners_mask: 0,
            discoveries: Vec::new(),
            nodes_expanded: 0,
            states_pruned: 0,
            cache_hits: 0,
            truncated: false,
            multi_source_leaf: false,
            max_nodes: None,
        }
        .with_cap(max_nodes)
    }

    fn with_cap(mut self, max_nodes: Option<u64>) -> Self {
        self.max_nodes = max_nodes;
        self
    }

    /// Count one expanded state; false when the node cap is hit.
    pub fn expand(&mut self) -> bool {
        if let Some(cap) = self.max_nodes {
            if self.nodes_expanded >= cap {
                self.truncated = true;
                return false;
            }
        }
        self.nodes_expanded += 1;
        true
    }

    pub fn record_winner(&mut self, alt: usize) {
        let bit = 1u64 << alt;
        if self.winners_mask & bit == 0 {
            self.winners_mask |= bit;
            self.discoveries.push(Discovery {
                alternative: alt,
                at_node: self.nodes_expanded,
                at_ms: self.start.elapsed().as_secs_f64() * 1e3,
            });
        }
    }

    pub fn record_winners_mask(&mut self, mask: u64) {
        for alt in crate::bits::iter_bits(mask) {
            self.record_winner(alt);
        }
    }

    pub fn into_report(self, rule: Rule) -> WinnerReport {
        WinnerReport {
            rule,
            winners: crate::bits::iter_bits(self.winners_mask).collect(),
            discoveries: self.discoveries,
            nodes_expanded: self.nodes_expanded,
            states_pruned: self.states_pruned,
            cache_hits: self.cache_hits,
            total_ms: self.start.elapsed().as_secs_f64() * 1e3,
            truncated: self.truncated,
            multi_source_leaf: self.multi_source_leaf,
        }
    }
}

/// Resolve the effective LPML scores for a solve, defaulting to the
/// uniform scorer when none is configured.
pub(crate) fn resolve_scores(
    options: &SolveOptions,
    profile: &crate::profile::Profile,
    rule: Rule,
) -> Result<Option<Vec<f64>>> {
    if options.priority != PriorityMode::Lpml {
        return Ok(None);
    }
    let scores = match &options.scorer {
        Some(s) => s.scores(profile, rule)?,
        None => crate::priority::UniformScorer.scores(profile, rule)?,
    };
    if scores.len() != profile.m {
        return Err(Error::ScorerMismatch(format!(
            "scorer produced {} scores for m = {}",
            scores.len(),
            profile.m
        )));
    }
    Ok(Some(scores))
}
