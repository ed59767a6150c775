//! Benchmark harness: the early-discovery metric, solver dispatch, the
//! configuration matrix, and CSV/JSON emission of per-cell records.
//! Node counters are the reproducible metric; wall times are reported
//! but never asserted.

use crate::error::{Error, Result};
use crate::priority::load_scorer;
use crate::profile::Profile;
use crate::rp::{solve_put_rp_mc, solve_put_rp_naive};
use crate::search::{PriorityMode, Rule, Sampling, SolveOptions, WinnerReport};
use crate::stv::solve_put_stv;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use std::sync::Arc;

/// Ordered discovery record extracted from a finished solve: one
/// `(winner, wall-time ms, node index)` triple per PUT-winner.
#[derive(Clone, Debug)]
pub struct DiscoveryLog {
    pub entries: Vec<(usize, f64, u64)>,
}

impl From<&WinnerReport> for DiscoveryLog {
    fn from(r: &WinnerReport) -> Self {
        DiscoveryLog {
            entries: r
                .discoveries
                .iter()
                .map(|d| (d.alternative, d.at_ms, d.at_node))
                .collect(),
        }
    }
}

fn alpha_index(total: usize, alpha: f64) -> Result<usize> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain(format!("alpha must be in (0, 1], got {alpha}")));
    }
    if total == 0 {
        return Err(Error::Domain("empty discovery log".into()));
    }
    // ceil(alpha * total) with a nudge against float dust such as
    // 0.1 * 10 = 1.0000000000000002.
    let idx = (alpha * total as f64 - 1e-9).ceil() as usize;
    Ok(idx.clamp(1, total))
}

/// Wall time (ms) at which an `alpha` fraction of all PUT-winners was
/// known: the time of the ceil(alpha * total)-th discovery.
pub fn alpha_discovery(log: &DiscoveryLog, alpha: f64) -> Result<f64> {
    let idx = alpha_index(log.entries.len(), alpha)?;
    Ok(log.entries[idx - 1].1)
}

/// Same point measured in expanded nodes instead of wall time.
pub fn alpha_discovery_nodes(log: &DiscoveryLog, alpha: f64) -> Result<u64> {
    let idx = alpha_index(log.entries.len(), alpha)?;
    Ok(log.entries[idx - 1].2)
}

/// Which search runs: STV DFS, ranked-pairs naive DFS, or the
/// ranked-pairs maximal-children search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Dfs,
    Ndfs,
    Mc,
}

impl std::fmt::Display for Algo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Algo::Dfs => write!(f, "dfs"),
            Algo::Ndfs => write!(f, "ndfs"),
            Algo::Mc => write!(f, "mc"),
        }
    }
}

pub fn default_algo(rule: Rule) -> Algo {
    match rule {
        Rule::Stv => Algo::Dfs,
        Rule::Rp => Algo::Mc,
    }
}

/// Run the solver selected by `(rule, algo)`.
pub fn run_solver(
    profile: &Profile,
    rule: Rule,
    algo: Algo,
    options: &SolveOptions,
) -> Result<WinnerReport> {
    match (rule, algo) {
        (Rule::Stv, Algo::Dfs) => solve_put_stv(profile, options),
        (Rule::Rp, Algo::Ndfs) => solve_put_rp_naive(profile, options),
        (Rule::Rp, Algo::Mc) => solve_put_rp_mc(profile, options),
        (rule, algo) => Err(Error::Validation(format!(
            "algorithm {algo} does not apply to rule {rule}"
        ))),
    }
}

/// One cell of the benchmark matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BenchConfig {
    pub name: String,
    pub rule: Rule,
    #[serde(default)]
    pub algo: Option<Algo>,
    #[serde(default = "default_true")]
    pub scc: bool,
    #[serde(default)]
    pub priority: PriorityMode,
    #[serde(default)]
    pub samples: Sampling,
    #[serde(default = "default_true")]
    pub prune: bool,
    #[serde(default = "default_true")]
    pub cache: bool,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub weights: Option<PathBuf>,
    #[serde(default)]
    pub max_nodes: Option<u64>,
}

fn default_true() -> bool {
    true
}

#[derive(Deserialize)]
struct BenchConfigFile {
    configs: Vec<BenchConfig>,
}

/// Parse a TOML benchmark configuration: `[[configs]]` blocks with the
/// fields of [`BenchConfig`].
pub fn parse_bench_configs(text: &str) -> Result<Vec<BenchConfig>> {
    let file: BenchConfigFile =
        toml::from_str(text).map_err(|e| Error::parse(0, e.to_string()))?;
    if file.configs.is_empty() {
        return Err(Error::Validation("no [[configs]] blocks".into()));
    }
    Ok(file.configs)
}

impl BenchConfig {
    pub fn algo(&self) -> Algo {
        self.algo.unwrap_or(default_algo(self.rule))
    }

    pub fn to_options(&self) -> Result<SolveOptions> {
        let scorer = match &self.weights {
            Some(path) => Some(Arc::new(load_scorer(path)?) as _),
            None => None,
        };
        Ok(SolveOptions {
            priority: self.priority,
            scorer,
            sampling: self.samples,
            seed: self.seed,
            prune: self.prune,
            cache: self.cache,
            max_nodes: self.max_nodes,
            scc: self.scc,
            ..SolveOptions::default()
        })
    }
}

pub const BENCH_CSV_SCHEMA_VERSION: u32 = 1;

/// One benchmark measurement. The column schema is frozen; see
/// [`bench_csv_header`].
#[derive(Clone, Debug, Serialize)]
pub struct BenchRecord {
    pub schema_version: u32,
    pub profile_id: String,
    pub rule: Rule,
    pub config: String,
    pub algo: Algo,
    pub scc: bool,
    pub priority: PriorityMode,
    pub samples: u64,
    pub prune: bool,
    pub cache: bool,
    pub seed: u64,
    pub winners: Vec<usize>,
    pub winner_count: usize,
    pub nodes_expanded: u64,
    pub states_pruned: u64,
    pub cache_hits: u64,
    pub total_ms: f64,
    pub full_discovery_ms: f64,
    pub full_discovery_nodes: u64,
    pub truncated: bool,
    pub multi_source_leaf: bool,
}

pub fn bench_csv_header() -> String {
    [
        "schema_version",
        "profile_id",
        "rule",
        "config",
        "algo",
        "scc",
        "priority",
        "samples",
        "prune",
        "cache",
        "seed",
        "winners",
        "winner_count",
        "nodes_expanded",
        "states_pruned",
        "cache_hits",
        "total_ms",
        "full_discovery_ms",
        "full_discovery_nodes",
        "truncated",
        "multi_source_leaf",
    ]
    .join(",")
}

impl BenchRecord {
    pub fn to_csv_row(&self) -> String {
        let winners = self
            .winners
            .iter()
            .map(|w| w.to_string())
            .collect::<Vec<_>>()
            .join(";");
        let priority = match self.priority {
            PriorityMode::None => "none",
            PriorityMode::Lp => "lp",
            PriorityMode::Lpml => "lpml",
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{:.3},{:.3},{},{},{}",
            self.schema_version,
            self.profile_id,
            self.rule,
            self.config,
            self.algo,
            self.scc,
            priority,
            self.samples,
            self.prune,
            self.cache,
            self.seed,
            winners,
            self.winner_count,
            self.nodes_expanded,
            self.states_pruned,
            self.cache_hits,
            self.total_ms,
            self.full_discovery_ms,
            self.full_discovery_nodes,
            self.truncated,
            self.multi_source_leaf,
        )
    }
}

/// Run every configuration against every profile, in input order.
pub fn run_bench(
    profiles: &[(String, Profile)],
    configs: &[BenchConfig],
) -> Result<Vec<BenchRecord>> {
    let mut records = Vec::with_capacity(profiles.len() * configs.len());
    for (id, profile) in profiles {
        for cfg in configs {
            let options = cfg.to_options()?;
            let report = run_solver(profile, cfg.rule, cfg.algo(), &options)?;
            records.push(BenchRecord {
                schema_version: BENCH_CSV_SCHEMA_VERSION,
                profile_id: id.clone(),
                rule: cfg.rule,
                config: cfg.name.clone(),
                algo: cfg.algo(),
                scc: cfg.scc,
                priority: cfg.priority,
                samples: cfg.samples.resolve(cfg.rule, profile.m),
                prune: cfg.prune,
                cache: cfg.cache,
                seed: cfg.seed,
                winners: report.winners.iter().copied().collect(),
                winner_count: report.winners.len(),
                nodes_expanded: report.nodes_expanded,
                states_pruned: report.states_pruned,
                cache_hits: report.cache_hits,
                total_ms: report.total_ms,
                full_discovery_ms: report.full_discovery_ms(),
                full_discovery_nodes: report.full_discovery_node(),
                truncated: report.truncated,
                multi_source_leaf: report.multi_source_leaf,
            });
        }
    }
    Ok(records)
}

pub fn write_csv(records: &[BenchRecord]) -> String {
    let mut out = bench_csv_header();
    out.push('\n');
    for r in records {
        out.push_str(&r.to_csv_row());
        out.push('\n');
    }
    out
}

pub fn write_json(records: &[BenchRecord]) -> Result<String> {
    serde_json::to_string_pretty(records).map_err(|e| Error::Validation(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn log(entries: &[(usize, f64, u64)]) -> DiscoveryLog {
        DiscoveryLog {
            entries: entries.to_vec(),
        }
    }

    #[test]
    fn alpha_discovery_worked_convention() {
        // Two winners at t1 < t2: the 10%-50% discovery time is t1, the
        // 60%-100% discovery time is t2.
        let l = log(&[(0, 1.0, 10), (2, 4.0, 40)]);
        for alpha in [0.1, 0.3, 0.5] {
            assert_eq!(alpha_discovery(&l, alpha).unwrap(), 1.0);
        }
        for alpha in [0.6, 0.8, 1.0] {
            assert_eq!(alpha_discovery(&l, alpha).unwrap(), 4.0);
        }
        assert_eq!(alpha_discovery_nodes(&l, 0.5).unwrap(), 10);
        assert_eq!(alpha_discovery_nodes(&l, 1.0).unwrap(), 40);
    }

    #[test]
    fn alpha_discovery_single_winner() {
        let l = log(&[(1, 2.5, 7)]);
        for alpha in [0.01, 0.5, 1.0] {
            assert_eq!(alpha_discovery(&l, alpha).unwrap(), 2.5);
        }
    }

    #[test]
    fn alpha_discovery_is_nondecreasing() {
        let l = log(&[(0, 1.0, 1), (1, 2.0, 2), (2, 3.0, 3)]);
        let mut last = 0.0;
        for i in 1..=100 {
            let t = alpha_discovery(&l, i as f64 / 100.0).unwrap();
            assert!(t >= last);
            last = t;
        }
        assert!(alpha_discovery(&l, 0.0).is_err());
        assert!(alpha_discovery(&l, 1.5).is_err());
    }

    #[test]
    fn bench_roundtrip_and_determinism() {
        let toml_text = r#"
[[configs]]
name = "plain"
rule = "stv"
priority = "none"
samples = "off"

[[configs]]
name = "lp-sampled"
rule = "stv"
priority = "lp"
samples = 12
seed = 3
"#;
        let configs = parse_bench_configs(toml_text).unwrap();
        assert_eq!(configs.len(), 2);
        assert_eq!(configs[1].samples, Sampling::Fixed(12));

        let p = Profile::from_rankings(3, &[vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]).unwrap();
        let profiles = vec![("cycle".to_string(), p)];
        let a = run_bench(&profiles, &configs).unwrap();
        let b = run_bench(&profiles, &configs).unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(a[0].winners, a[1].winners);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.nodes_expanded, y.nodes_expanded);
            assert_eq!(x.full_discovery_nodes, y.full_discovery_nodes);
        }
        let csv = write_csv(&a);
        assert!(csv.starts_with("schema_version,profile_id"));
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn empty_inputs_give_header_only() {
        let records = run_bench(&[], &[]).unwrap();
        let csv = write_csv(&records);
        assert_eq!(csv, bench_csv_header() + "\n");
    }

    #[test]
    fn rule_algo_mismatch_rejected() {
        let p = Profile::from_rankings(2, &[vec![0, 1]]).unwrap();
        assert!(run_solver(&p, Rule::Stv, Algo::Mc, &SolveOptions::default()).is_err());
        assert!(run_solver(&p, Rule::Rp, Algo::Dfs, &SolveOptions::default()).is_err());
    }
}
