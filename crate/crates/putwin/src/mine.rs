//! Hard-profile mining: generate impartial-culture profiles and keep
//! those where the search must branch on a tie at least once.
//!
//! The detector follows the prune-free solver path until the first
//! branching state: until then every state has exactly one child, so
//! a single forced walk decides hardness. STV branches when a round
//! has two or more alternatives tied at the minimal plurality score;
//! ranked pairs branches when a tier offers two or more addable
//! (non-cycle-creating) edges at once.

use crate::bits::full_mask;
use crate::error::{Error, Result};
use crate::graph::{build_wmg, creates_cycle, tier_partition, DiGraph};
use crate::profile::{generate_impartial_culture, Profile};
use crate::scores::lowest_plurality_mask;
use crate::search::Rule;

pub fn is_hard(profile: &Profile, rule: Rule) -> bool {
    match rule {
        Rule::Stv => is_hard_stv(profile),
        Rule::Rp => is_hard_rp(profile),
    }
}

fn is_hard_stv(profile: &Profile) -> bool {
    if profile.m < 2 || profile.m > 64 {
        return false;
    }
    let mut remaining = full_mask(profile.m);
    while remaining.count_ones() > 1 {
        let tied = lowest_plurality_mask(profile, remaining);
        if tied.count_ones() >= 2 {
            return true;
        }
        remaining &= !tied;
    }
    false
}

fn is_hard_rp(profile: &Profile) -> bool {
    if profile.m < 2 || profile.m > 64 {
        return false;
    }
    let wmg = build_wmg(profile);
    let tiers = tier_partition(&wmg);
    let mut g = DiGraph::new(profile.m).expect("m checked");
    for tier in &tiers {
        let mut pending = tier.edges.clone();
        loop {
            let addable: Vec<(usize, usize)> = pending
                .iter()
                .copied()
                .filter(|&e| !creates_cycle(&g, e))
                .collect();
            match addable.len() {
                0 => break,
                1 => {
                    let e = addable[0];
                    g.add_edge(e.0, e.1).expect("valid edge");
                    pending.retain(|&x| x != e);
                }
                _ => return true,
            }
        }
    }
    false
}

/// Generate and keep exactly `count` hard impartial-culture profiles.
///
/// Candidate `j` is drawn with `generate_impartial_culture(m, n,
/// seed.wrapping_add(j))`, so the mined set is a pure function of
/// `(m, n, count, seed, rule)`. Gives up with an error if fewer than
/// one in 10,000 candidates qualifies.
pub fn mine_hard_profiles(
    m: usize,
    n: u64,
    count: usize,
    seed: u64,
    rule: Rule,
) -> Result<Vec<Profile>> {
    let mut out = Vec::with_capacity(count);
    let max_attempts = (count as u64 + 1) * 10_000;
    let mut attempt = 0u64;
    while out.len() < count {
        if attempt >= max_attempts {
            return Err(Error::CapExceeded(format!(
                "mined only {} of {count} hard profiles in {max_attempts} attempts",
                out.len()
            )));
        }
        let p = generate_impartial_culture(m, n, seed.wrapping_add(attempt))?;
        attempt += 1;
        if is_hard(&p, rule) {
            out.push(p);
        }
    }
    Ok(out)
}
