//! Brute-force winner oracles. Both enumerate all m! tiebreaking
//! universes directly from the rule definitions and share no code with
//! the search solvers beyond the plurality kernel, so they serve as
//! independent ground truth on small instances.

use crate::bits::{full_mask, iter_bits};
use crate::error::{Error, Result};
use crate::graph::{build_wmg, induced_weight, DiGraph};
use crate::profile::Profile;
use crate::scores::plurality_counts_mask;
use itertools::Itertools;
use std::collections::BTreeSet;

pub const DEFAULT_STV_ORACLE_CAP: usize = 7;
pub const DEFAULT_RP_ORACLE_CAP: usize = 5;

fn check_cap(m: usize, cap: usize, rule: &str) -> Result<()> {
    if m == 0 {
        return Err(Error::Domain("profile has no alternatives".into()));
    }
    if m > cap {
        return Err(Error::CapExceeded(format!(
            "{rule} oracle capped at m <= {cap}, got m = {m} (raise the cap explicitly to override)"
        )));
    }
    Ok(())
}

/// Enumerate all elimination orders; an order is valid iff every
/// round eliminates an alternative of minimal plurality score among
/// the remaining ones. Returns the survivors of all valid orders.
pub fn brute_force_stv(profile: &Profile, cap: Option<usize>) -> Result<BTreeSet<usize>> {
    let m = profile.m;
    check_cap(m, cap.unwrap_or(DEFAULT_STV_ORACLE_CAP), "stv")?;
    let mut winners = BTreeSet::new();
    for perm in (0..m).permutations(m) {
        let mut remaining = full_mask(m);
        let mut valid = true;
        for &victim in &perm[..m - 1] {
            let counts = plurality_counts_mask(profile, remaining);
            let min = iter_bits(remaining).map(|a| counts[a]).min().unwrap();
            if counts[victim] != min {
                valid = false;
                break;
            }
            remaining &= !(1u64 << victim);
        }
        if valid {
            winners.insert(perm[m - 1]);
        }
    }
    Ok(winners)
}

/// Enumerate all rankings and accept those meeting the induced-weight
/// certificate: for every pair ranked `i` above `j`, the best
/// bottleneck weight of an `i -> j` path in the ranking-consistent
/// nonnegative-margin graph must reach the reverse margin. Winners are
/// the top alternatives of accepted rankings.
pub fn brute_force_rp(profile: &Profile, cap: Option<usize>) -> Result<BTreeSet<usize>> {
    let m = profile.m;
    check_cap(m, cap.unwrap_or(DEFAULT_RP_ORACLE_CAP), "rp")?;
    if m == 1 {
        return Ok([0].into());
    }
    let wmg = build_wmg(profile);
    let mut winners = BTreeSet::new();
    'rankings: for ranking in (0..m).permutations(m) {
        let mut consistent = DiGraph::new(m)?;
        for (pos, &a) in ranking.iter().enumerate() {
            for &b in &ranking[pos + 1..] {
                if wmg.weight(a, b) >= 0 {
                    consistent.add_edge(a, b).expect("valid edge");
                }
            }
        }
        for (pos, &a) in ranking.iter().enumerate() {
            for &b in &ranking[pos + 1..] {
                match induced_weight(&wmg, &consistent, a, b)? {
                    Some(iw) if iw >= wmg.weight(b, a) => {}
                    _ => continue 'rankings,
                }
            }
        }
        winners.insert(ranking[0]);
    }
    Ok(winners)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::profile_with_margins;

    fn condorcet_cycle() -> Profile {
        Profile::from_rankings(3, &[vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]).unwrap()
    }

    #[test]
    fn stv_cycle_all_win() {
        assert_eq!(
            brute_force_stv(&condorcet_cycle(), None).unwrap(),
            [0, 1, 2].into()
        );
    }

    #[test]
    fn stv_unique_winner() {
        let p = Profile::from_rankings(
            3,
            &[vec![0, 1, 2], vec![0, 1, 2], vec![1, 0, 2], vec![1, 0, 2], vec![2, 0, 1]],
        )
        .unwrap();
        assert_eq!(brute_force_stv(&p, None).unwrap(), [0].into());
    }

    #[test]
    fn stv_single_alternative() {
        let p = Profile::from_rankings(1, &[vec![0]]).unwrap();
        assert_eq!(brute_force_stv(&p, None).unwrap(), [0].into());
    }

    #[test]
    fn rp_cycle_all_win() {
        assert_eq!(
            brute_force_rp(&condorcet_cycle(), None).unwrap(),
            [0, 1, 2].into()
        );
    }

    #[test]
    fn rp_transitive_tournament_source_only() {
        let p = profile_with_margins(4, &[(0, 1, 1), (0, 2, 3), (0, 3, 5), (1, 2, 7), (1, 3, 9), (2, 3, 11)])
            .unwrap();
        assert_eq!(brute_force_rp(&p, None).unwrap(), [0].into());
    }

    #[test]
    fn rp_two_alternatives() {
        let p = Profile::from_rankings(2, &[vec![0, 1]]).unwrap();
        assert_eq!(brute_force_rp(&p, None).unwrap(), [0].into());
    }

    #[test]
    fn caps_are_enforced() {
        let p = crate::profile::generate_impartial_culture(8, 3, 0).unwrap();
        assert!(matches!(
            brute_force_stv(&p, None),
            Err(Error::CapExceeded(_))
        ));
        assert!(brute_force_stv(&p, Some(8)).is_ok());
        let p6 = crate::profile::generate_impartial_culture(6, 3, 0).unwrap();
        assert!(matches!(brute_force_rp(&p6, None), Err(Error::CapExceeded(_))));
    }
}
