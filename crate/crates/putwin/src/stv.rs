//! PUT-STV solver: depth-first search over remaining-alternative sets
//! with a visited cache, subset pruning, local priorities and optional
//! pre-search sampling.

use crate::bits::{full_mask, iter_bits};
use crate::error::{Error, Result};
use crate::profile::Profile;
use crate::scores::lowest_plurality_mask;
use crate::search::{
    resolve_scores, BoundedCache, PriorityMode, Rule, SearchCtx, SolveOptions, WinnerReport,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

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

/// One STV run under a fixed tiebreaking order. `rank[a]` is the
/// priority position of alternative `a`; among a lowest-score tie the
/// alternative with the largest rank (lowest priority) is eliminated.
/// Returns the winner and reports each elimination round to `on_round`.
fn fixed_tiebreak_run(
    profile: &Profile,
    rank: &[usize],
    mut on_round: impl FnMut() -> bool,
) -> Option<usize> {
    let mut remaining = full_mask(profile.m);
    while remaining.count_ones() > 1 {
        if !on_round() {
            return None;
        }
        let tied = lowest_plurality_mask(profile, remaining);
        let victim = iter_bits(tied).max_by_key(|&a| rank[a]).unwrap();
        remaining &= !(1u64 << victim);
    }
    Some(remaining.trailing_zeros() as usize)
}

fn random_rank(m: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    let mut rank = vec![0; m];
    for (pos, &a) in order.iter().enumerate() {
        rank[a] = pos;
    }
    rank
}

/// Run `k` independent fixed-tiebreak STV elections with uniformly
/// random priority orders and return the union of their winners. The
/// result is always a subset of the true PUT-winner set.
pub fn sample_stv(profile: &Profile, k: u64, seed: u64) -> Result<BTreeSet<usize>> {
    check_profile(profile)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut winners = BTreeSet::new();
    for _ in 0..k {
        let rank = random_rank(profile.m, &mut rng);
        if let Some(w) = fixed_tiebreak_run(profile, &rank, || true) {
            winners.insert(w);
        }
    }
    Ok(winners)
}

/// Compute the complete PUT-STV winner set.
///
/// The search expands remaining-alternative sets; each expansion
/// computes plurality scores over the state, finds the tied-minimum
/// set, and pushes one child per tied alternative in priority order. A
/// singleton state contributes its alternative as a winner; a state is
/// skipped when already visited (cache) or when it is a subset of the
/// known winners (pruning). Sampling, when enabled, populates the
/// known-winner set before the search and is counted one node per
/// elimination round.
pub fn solve_put_stv(profile: &Profile, options: &SolveOptions) -> Result<WinnerReport> {
    check_profile(profile)?;
    let m = profile.m;
    let root_scores = resolve_scores(options, profile, Rule::Stv)?;
    let mut ctx = SearchCtx::new(options.max_nodes);

    let sample_count = options.sampling.resolve(Rule::Stv, m);
    if sample_count > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        'runs: for _ in 0..sample_count {
            let rank = random_rank(m, &mut rng);
            match fixed_tiebreak_run(profile, &rank, || ctx.expand()) {
                Some(w) => ctx.record_winner(w),
                None => break 'runs, // node cap hit mid-run
            }
        }
    }

    let mut stack: Vec<u64> = vec![full_mask(m)];
    let mut visited: BoundedCache<u64> = BoundedCache::new(options.cache_cap);
    // Reused per-expansion buffer: (priority, alternative, child set).
    let mut children: Vec<(f64, usize, u64)> = Vec::with_capacity(m);

    while let Some(state) = stack.pop() {
        if ctx.truncated {
            break;
        }
        if state.count_ones() == 1 {
            if !ctx.expand() {
                break;
            }
            ctx.record_winner(state.trailing_zeros() as usize);
            continue;
        }
        if options.cache {
            if visited.contains(&state) {
                ctx.cache_hits += 1;
                continue;
            }
            visited.insert(state);
        }
        if options.prune && state & !ctx.winners_mask == 0 {
            ctx.states_pruned += 1;
            continue;
        }
        if !ctx.expand() {
            break;
        }

        let node_scores = if options.rescore_per_state && options.priority == PriorityMode::Lpml {
            resolve_scores(options, &profile.restrict_to(state), Rule::Stv)?
        } else {
            None
        };
        let scores = node_scores.as_deref().or(root_scores.as_deref());

        let tied = lowest_plurality_mask(profile, state);
        children.clear();
        for c in iter_bits(tied) {
            let child = state & !(1u64 << c);
            let prio = match options.priority {
                PriorityMode::None => 0.0,
                PriorityMode::Lp => (child & !ctx.winners_mask).count_ones() as f64,
                PriorityMode::Lpml => {
                    let scores = scores.expect("lpml scores resolved");
                    iter_bits(child & !ctx.winners_mask)
                        .map(|a| scores[a])
                        .sum()
                }
            };
            children.push((prio, c, child));
        }
        // Exploration order: priority descending, eliminated
        // alternative ascending on ties; pushing in reverse makes the
        // stack pop in that order.
        children.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
        for &(_, _, child) in children.iter().rev() {
            stack.push(child);
        }
    }

    Ok(ctx.into_report(Rule::Stv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::Sampling;

    fn condorcet_cycle() -> Profile {
        Profile::from_rankings(3, &[vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]).unwrap()
    }

    fn unique_winner_profile() -> Profile {
        // 2 x (A>B>C), 2 x (B>A>C), 1 x (C>A>B): C drops first, then A
        // beats B 3-2.
        Profile::from_rankings(
            3,
            &[vec![0, 1, 2], vec![0, 1, 2], vec![1, 0, 2], vec![1, 0, 2], vec![2, 0, 1]],
        )
        .unwrap()
    }

    fn winners(profile: &Profile, options: &SolveOptions) -> BTreeSet<usize> {
        solve_put_stv(profile, options).unwrap().winners
    }

    #[test]
    fn cycle_has_three_winners() {
        let w = winners(&condorcet_cycle(), &SolveOptions::default());
        assert_eq!(w, [0, 1, 2].into());
    }

    #[test]
    fn unique_winner() {
        let w = winners(&unique_winner_profile(), &SolveOptions::default());
        assert_eq!(w, [0].into());
    }

    #[test]
    fn single_alternative_is_one_node() {
        let p = Profile::from_rankings(1, &[vec![0]]).unwrap();
        let r = solve_put_stv(&p, &SolveOptions::default()).unwrap();
        assert_eq!(r.winners, [0].into());
        assert_eq!(r.nodes_expanded, 1);
    }

    #[test]
    fn empty_profile_domain_error() {
        let p = Profile::new(0, vec![], vec![]).unwrap();
        assert!(solve_put_stv(&p, &SolveOptions::default()).is_err());
    }

    #[test]
    fn configurations_agree() {
        let p = condorcet_cycle();
        let expected: BTreeSet<usize> = [0, 1, 2].into();
        for prune in [false, true] {
            for cache in [false, true] {
                for priority in [PriorityMode::None, PriorityMode::Lp, PriorityMode::Lpml] {
                    for sampling in [Sampling::Off, Sampling::Default] {
                        let options = SolveOptions {
                            prune,
                            cache,
                            priority,
                            sampling,
                            ..SolveOptions::default()
                        };
                        assert_eq!(winners(&p, &options), expected, "{options:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn sampling_is_subset_and_zero_is_empty() {
        let p = condorcet_cycle();
        assert!(sample_stv(&p, 0, 1).unwrap().is_empty());
        let sampled = sample_stv(&p, 100, 1).unwrap();
        let full = winners(&p, &SolveOptions::default());
        assert!(sampled.is_subset(&full));
        // 100 samples over a 3-way round-one tie: all three appear.
        assert_eq!(sampled, full);
    }

    #[test]
    fn unique_winner_sampled_every_time() {
        let p = unique_winner_profile();
        for seed in 0..5 {
            assert_eq!(sample_stv(&p, 10, seed).unwrap(), [0].into());
        }
    }

    #[test]
    fn discovery_is_monotone() {
        let r = solve_put_stv(&condorcet_cycle(), &SolveOptions::default()).unwrap();
        let idx: Vec<u64> = r.discoveries.iter().map(|d| d.at_node).collect();
        assert!(idx.windows(2).all(|w| w[0] <= w[1]));
        let discovered: BTreeSet<usize> =
            r.discoveries.iter().map(|d| d.alternative).collect();
        assert_eq!(discovered, r.winners);
    }

    #[test]
    fn node_counts_reproducible() {
        let p = unique_winner_profile();
        let opts = SolveOptions {
            sampling: Sampling::Fixed(20),
            priority: PriorityMode::Lp,
            ..SolveOptions::default()
        };
        let a = solve_put_stv(&p, &opts).unwrap();
        let b = solve_put_stv(&p, &opts).unwrap();
        assert_eq!(a.nodes_expanded, b.nodes_expanded);
        assert_eq!(a.states_pruned, b.states_pruned);
        assert_eq!(a.cache_hits, b.cache_hits);
    }

    #[test]
    fn node_cap_truncates() {
        let p = condorcet_cycle();
        let opts = SolveOptions {
            max_nodes: Some(2),
            ..SolveOptions::default()
        };
        let r = solve_put_stv(&p, &opts).unwrap();
        assert!(r.truncated);
        assert!(r.nodes_expanded <= 2);
    }
}
