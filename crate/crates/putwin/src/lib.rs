//! Parallel-universes tiebreaking (PUT) winner computation for STV and
//! Ranked Pairs.
//!
//! Multi-stage voting rules break ties round by round, and different
//! tiebreaking choices can crown different winners. This crate computes
//! the complete set of alternatives that win under *some* tiebreaking:
//!
//! - [`solve_put_stv`]: DFS over remaining-alternative sets with a
//!   visited cache, subset pruning, LP/LPML local priorities and
//!   pre-search sampling.
//! - [`solve_put_rp_naive`] and [`solve_put_rp_mc`]: ranked-pairs
//!   searches locking one edge or one whole tier (via maximal
//!   children, optionally SCC-decomposed) per step, with indegree
//!   pruning and sampling.
//! - [`brute_force_stv`] / [`brute_force_rp`]: independent oracles that
//!   enumerate every tiebreaking universe on small instances.
//! - [`build_stv_ilp`] / [`build_rp_ilp`]: feasibility ILP models with
//!   a portable LP-text emitter and an exact assignment checker.
//! - Profile tooling: Preflib SOC/SOI parsing, impartial-culture
//!   generation, hard-profile mining and a benchmark runner.
//!
//! The `examples/` directory has one runnable program per capability;
//! the `putwin` binary exposes the same functionality as subcommands.

mod bits;

pub mod bench;
pub mod error;
pub mod graph;
pub mod ilp;
pub mod mine;
pub mod oracle;
pub mod preflib;
pub mod priority;
pub mod profile;
pub mod rp;
pub mod scores;
pub mod search;
pub mod stv;

pub use bench::{
    alpha_discovery, alpha_discovery_nodes, bench_csv_header, parse_bench_configs, run_bench,
    run_solver, write_csv, write_json, Algo, BenchConfig, BenchRecord, DiscoveryLog,
};
pub use error::{Error, Result};
pub use graph::{
    build_wmg, creates_cycle, induced_weight, scc_decompose, sources, tier_partition, DiGraph,
    Tier, WeightedMajorityGraph,
};
pub use ilp::{
    build_rp_ilp, build_stv_ilp, check_assignment, elimination_to_assignment, emit_lp_text,
    parse_assignment, ranking_to_assignment, serialize_assignment, Assignment, IlpModel,
};
pub use mine::{is_hard, mine_hard_profiles};
pub use oracle::{brute_force_rp, brute_force_stv};
pub use preflib::{parse_preflib, serialize_preflib};
pub use priority::{
    extract_features, load_scorer, lp_priority, lpml_priority, FeatureVector, LinearScorer,
    NormalizedBordaScorer, PriorityScorer, UniformScorer,
};
pub use profile::{generate_impartial_culture, profile_with_margins, Profile, VoteGroup};
pub use rp::{max_children, max_children_scc, sample_rp, solve_put_rp_mc, solve_put_rp_naive};
pub use scores::{plurality_scores, positional_matrix, score_features, PositionalMatrix, ScoreVector};
pub use search::{Discovery, PriorityMode, Rule, Sampling, SolveOptions, WinnerReport};
pub use stv::{sample_stv, solve_put_stv};
