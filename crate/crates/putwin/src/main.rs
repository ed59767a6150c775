//! Thin command-line front end over the library.
//!
//! Exit codes: 0 success, 1 usage error, 2 input parse error,
//! 3 resource cap exceeded.

use clap::{Parser, Subcommand, ValueEnum};
use putwin::{
    bench_csv_header, brute_force_rp, brute_force_stv, build_rp_ilp, build_stv_ilp,
    check_assignment, emit_lp_text, generate_impartial_culture, load_scorer, mine_hard_profiles,
    parse_assignment, parse_bench_configs, parse_preflib, run_bench, run_solver,
    serialize_preflib, Algo, Error, IlpModel, PriorityMode, Profile, Rule, Sampling, SolveOptions,
};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::exit;
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "putwin", version, about = "PUT-winner solvers for STV and Ranked Pairs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    Stv,
    Rp,
}

impl From<RuleArg> for Rule {
    fn from(r: RuleArg) -> Rule {
        match r {
            RuleArg::Stv => Rule::Stv,
            RuleArg::Rp => Rule::Rp,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Dfs,
    Ndfs,
    Mc,
}

impl From<AlgoArg> for Algo {
    fn from(a: AlgoArg) -> Algo {
        match a {
            AlgoArg::Dfs => Algo::Dfs,
            AlgoArg::Ndfs => Algo::Ndfs,
            AlgoArg::Mc => Algo::Mc,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PriorityArg {
    None,
    Lp,
    Lpml,
}

impl From<PriorityArg> for PriorityMode {
    fn from(p: PriorityArg) -> PriorityMode {
        match p {
            PriorityArg::None => PriorityMode::None,
            PriorityArg::Lp => PriorityMode::Lp,
            PriorityArg::Lpml => PriorityMode::Lpml,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

impl From<Switch> for bool {
    fn from(s: Switch) -> bool {
        matches!(s, Switch::On)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate impartial-culture profiles (optionally mined hard
    /// cases) as Preflib SOC files.
    Gen {
        #[arg(long, value_enum)]
        rule: RuleArg,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Keep only profiles where the search branches on a tie.
        #[arg(long)]
        hard: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute the PUT-winner set of one profile.
    Solve {
        #[arg(long, value_enum)]
        rule: RuleArg,
        /// dfs (stv), ndfs or mc (rp); defaults to the rule's main
        /// algorithm.
        #[arg(long, value_enum)]
        algo: Option<AlgoArg>,
        #[arg(long, value_enum, default_value = "on")]
        scc: Switch,
        #[arg(long, value_enum, default_value = "none")]
        priority: PriorityArg,
        /// Weight file for the lpml scorer; without it lpml uses the
        /// uniform scorer.
        #[arg(long)]
        weights: Option<PathBuf>,
        /// Sample count: a number, "off", or "default" (20m for stv,
        /// 200 for rp). `--samples` without a value means "default".
        #[arg(long, num_args = 0..=1, default_missing_value = "default", default_value = "off")]
        samples: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "on")]
        prune: Switch,
        #[arg(long, value_enum, default_value = "on")]
        cache: Switch,
        /// Abort after this many expanded states (exit code 3).
        #[arg(long)]
        max_nodes: Option<u64>,
        /// Recompute lpml scores on the reduced profile at every STV
        /// state instead of once at the root.
        #[arg(long)]
        rescore_per_state: bool,
        #[arg(long)]
        input: PathBuf,
        /// Write the full JSON report here (stdout summary otherwise).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force PUT-winners by enumerating all tiebreaking
    /// universes (small m only).
    Oracle {
        #[arg(long, value_enum)]
        rule: RuleArg,
        #[arg(long)]
        input: PathBuf,
        /// Override the oracle size cap (default: m <= 7 stv, m <= 5 rp).
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Run a configuration matrix over a set of profiles and emit CSV
    /// (and optionally JSON) records.
    Bench {
        /// Only run configs for this rule.
        #[arg(long, value_enum)]
        rule: Option<RuleArg>,
        /// Input profiles: a file, a directory, or a glob with `*` in
        /// the file name.
        #[arg(long)]
        inputs: String,
        #[arg(long)]
        configs: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Build a winner-feasibility ILP model and emit LP text plus a
    /// machine-readable .lp-meta sidecar.
    Ilp {
        #[arg(long, value_enum)]
        rule: RuleArg,
        #[arg(long)]
        target: usize,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        emit: PathBuf,
    },
    /// Check a 0/1 assignment against an emitted model.
    IlpCheck {
        /// The .lp-meta sidecar written by `ilp`.
        #[arg(long)]
        model: PathBuf,
        /// Assignment file: one `name 0|1` per line.
        #[arg(long)]
        assignment: PathBuf,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. }
        | Error::Validation(_)
        | Error::Unsupported(_)
        | Error::Io(_)
        | Error::ScorerMismatch(_) => 2,
        Error::CapExceeded(_) => 3,
        Error::Domain(_) => 1,
    }
}

fn read_profile(path: &Path) -> Result<Profile, Error> {
    parse_preflib(&fs::read_to_string(path)?)
}

/// Expand a file, directory, or single-`*` glob into a sorted file list.
fn expand_inputs(pattern: &str) -> Result<Vec<PathBuf>, Error> {
    let path = Path::new(pattern);
    if !pattern.contains('*') {
        if path.is_dir() {
            let mut files: Vec<PathBuf> = fs::read_dir(path)?
                .filter_map(|e| e.ok())
                .map(|e| e.path())
                .filter(|p| {
                    matches!(
                        p.extension().and_then(|e| e.to_str()),
                        Some("soc") | Some("soi")
                    )
                })
                .collect();
            files.sort();
            return Ok(files);
        }
        return Ok(vec![path.to_path_buf()]);
    }
    let file_pat = path
        .file_name()
        .and_then(|f| f.to_str())
        .ok_or_else(|| Error::Validation(format!("bad glob {pattern:?}")))?;
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    if dir.to_string_lossy().contains('*') {
        return Err(Error::Validation(
            "glob `*` is only supported in the file name".into(),
        ));
    }
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            p.file_name()
                .and_then(|f| f.to_str())
                .is_some_and(|f| wildcard_match(file_pat, f))
        })
        .collect();
    files.sort();
    Ok(files)
}

/// Glob-style match where `*` spans any substring.
fn wildcard_match(pattern: &str, s: &str) -> bool {
    let pat: Vec<char> = pattern.chars().collect();
    let txt: Vec<char> = s.chars().collect();
    let (mut p, mut t) = (0usize, 0usize);
    let (mut star, mut mark) = (usize::MAX, 0usize);
    while t < txt.len() {
        if p < pat.len() && (pat[p] == txt[t]) {
            p += 1;
            t += 1;
        } else if p < pat.len() && pat[p] == '*' {
            star = p;
            mark = t;
            p += 1;
        } else if star != usize::MAX {
            p = star + 1;
            mark += 1;
            t = mark;
        } else {
            return false;
        }
    }
    while p < pat.len() && pat[p] == '*' {
        p += 1;
    }
    p == pat.len()
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.cmd {
        Cmd::Gen {
            rule,
            m,
            n,
            count,
            seed,
            hard,
            out,
        } => {
            let rule: Rule = rule.into();
            fs::create_dir_all(&out)?;
            let profiles = if hard {
                mine_hard_profiles(m, n, count, seed, rule)?
            } else {
                (0..count)
                    .map(|i| generate_impartial_culture(m, n, seed.wrapping_add(i as u64)))
                    .collect::<Result<Vec<_>, _>>()?
            };
            let kind = if hard { "hard" } else { "ic" };
            for (i, p) in profiles.iter().enumerate() {
                let name = format!("{kind}_{rule}_m{m}_n{n}_seed{seed}_{i:04}.soc");
                fs::write(out.join(&name), serialize_preflib(p))?;
            }
            println!("wrote {} profiles to {}", profiles.len(), out.display());
            Ok(())
        }
        Cmd::Solve {
            rule,
            algo,
            scc,
            priority,
            weights,
            samples,
            seed,
            prune,
            cache,
            max_nodes,
            rescore_per_state,
            input,
            out,
        } => {
            let rule: Rule = rule.into();
            let algo: Algo = algo
                .map(Into::into)
                .unwrap_or(putwin::bench::default_algo(rule));
            let sampling: Sampling = samples
                .parse()
                .map_err(Error::Validation)?;
            let scorer = match &weights {
                Some(path) => Some(Arc::new(load_scorer(path)?) as _),
                None => None,
            };
            let options = SolveOptions {
                priority: priority.into(),
                scorer,
                sampling,
                seed,
                prune: prune.into(),
                cache: cache.into(),
                max_nodes,
                rescore_per_state,
                scc: scc.into(),
                ..SolveOptions::default()
            };
            let profile = read_profile(&input)?;
            let report = run_solver(&profile, rule, algo, &options)?;
            let winners: Vec<String> = report.winners.iter().map(|w| w.to_string()).collect();
            println!(
                "winners: {} (nodes {}, pruned {}, cache hits {}, {:.3} ms)",
                winners.join(" "),
                report.nodes_expanded,
                report.states_pruned,
                report.cache_hits,
                report.total_ms
            );
            if let Some(out) = out {
                let json = serde_json::to_string_pretty(&report)
                    .map_err(|e| Error::Validation(e.to_string()))?;
                fs::write(out, json)?;
            }
            if report.truncated {
                return Err(Error::CapExceeded(format!(
                    "stopped after {} expanded states; winner set may be incomplete",
                    report.nodes_expanded
                )));
            }
            Ok(())
        }
        Cmd::Oracle { rule, input, cap } => {
            let profile = read_profile(&input)?;
            let winners = match rule.into() {
                Rule::Stv => brute_force_stv(&profile, cap)?,
                Rule::Rp => brute_force_rp(&profile, cap)?,
            };
            let winners: Vec<String> = winners.iter().map(|w| w.to_string()).collect();
            println!("winners: {}", winners.join(" "));
            Ok(())
        }
        Cmd::Bench {
            rule,
            inputs,
            configs,
            out,
            json,
        } => {
            let rule: Option<Rule> = rule.map(Into::into);
            let mut cfgs = parse_bench_configs(&fs::read_to_string(&configs)?)?;
            if let Some(rule) = rule {
                cfgs.retain(|c| c.rule == rule);
                if cfgs.is_empty() {
                    return Err(Error::Validation(format!(
                        "no configs for rule {rule} in {}",
                        configs.display()
                    )));
                }
            }
            let files = expand_inputs(&inputs)?;
            let mut profiles = Vec::with_capacity(files.len());
            for f in &files {
                let id = f
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| f.display().to_string());
                profiles.push((id, read_profile(f)?));
            }
            let records = run_bench(&profiles, &cfgs)?;
            fs::write(&out, putwin::write_csv(&records))?;
            if let Some(json_path) = json {
                fs::write(json_path, putwin::write_json(&records)?)?;
            }
            println!(
                "{} profiles x {} configs -> {} records in {}",
                profiles.len(),
                cfgs.len(),
                records.len(),
                out.display()
            );
            if records.is_empty() {
                println!("{}", bench_csv_header());
            }
            Ok(())
        }
        Cmd::Ilp {
            rule,
            target,
            input,
            emit,
        } => {
            let profile = read_profile(&input)?;
            let model = match rule.into() {
                Rule::Stv => build_stv_ilp(&profile, target)?,
                Rule::Rp => build_rp_ilp(&profile, target)?,
            };
            fs::write(&emit, emit_lp_text(&model))?;
            let meta = emit.with_extension("lp-meta");
            fs::write(&meta, model.to_meta_json()?)?;
            println!(
                "model {}: {} variables, {} constraints -> {} (+ {})",
                model.name,
                model.vars().len(),
                model.constraints().len(),
                emit.display(),
                meta.display()
            );
            Ok(())
        }
        Cmd::IlpCheck { model, assignment } => {
            let model = IlpModel::from_meta_json(&fs::read_to_string(&model)?)?;
            let asg = parse_assignment(&fs::read_to_string(&assignment)?)?;
            let violated = check_assignment(&model, &asg)?;
            if violated.is_empty() {
                println!("satisfied");
            } else {
                println!("violated {} constraints:", violated.len());
                for name in violated {
                    println!("  {name}");
                }
            }
            Ok(())
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            exit(code);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        exit(exit_code(&e));
    }
}
