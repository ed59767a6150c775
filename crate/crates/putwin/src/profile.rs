//! Preference profiles: multisets of (possibly truncated) strict rankings.

use crate::error::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// One group of identical ballots: `count` voters submitting `ranking`.
///
/// Rankings are 0-based alternative indices, most preferred first. A
/// ranking shorter than the number of alternatives is truncated (SOI);
/// the unranked alternatives are considered below all ranked ones and
/// mutually incomparable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoteGroup {
    pub count: u64,
    pub ranking: Vec<usize>,
}

/// A preference profile over `m` alternatives.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Profile {
    pub m: usize,
    pub alt_names: Vec<String>,
    pub votes: Vec<VoteGroup>,
}

impl Profile {
    /// Build a validated profile. Checks every ranking for duplicates
    /// and out-of-range indices and every count for positivity.
    pub fn new(m: usize, alt_names: Vec<String>, votes: Vec<VoteGroup>) -> Result<Self> {
        if alt_names.len() != m {
            return Err(Error::Validation(format!(
                "expected {m} alternative names, got {}",
                alt_names.len()
            )));
        }
        let profile = Profile { m, alt_names, votes };
        profile.validate()?;
        Ok(profile)
    }

    /// Convenience constructor with synthetic names `a0..a{m-1}` and
    /// unit counts.
    pub fn from_rankings(m: usize, rankings: &[Vec<usize>]) -> Result<Self> {
        let votes = rankings
            .iter()
            .map(|r| VoteGroup {
                count: 1,
                ranking: r.clone(),
            })
            .collect();
        Profile::new(m, default_names(m), votes)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = vec![false; self.m];
        for (i, v) in self.votes.iter().enumerate() {
            if v.count == 0 {
                return Err(Error::Validation(format!("vote group {i} has count 0")));
            }
            for f in seen.iter_mut() {
                *f = false;
            }
            for &a in &v.ranking {
                if a >= self.m {
                    return Err(Error::Validation(format!(
                        "vote group {i} ranks alternative {a}, but m = {}",
                        self.m
                    )));
                }
                if seen[a] {
                    return Err(Error::Validation(format!(
                        "vote group {i} ranks alternative {a} twice"
                    )));
                }
                seen[a] = true;
            }
        }
        Ok(())
    }

    /// Total number of voters, `n`.
    pub fn voter_count(&self) -> u64 {
        self.votes.iter().map(|v| v.count).sum()
    }

    /// True when every ranking is complete (length `m`).
    pub fn is_complete(&self) -> bool {
        self.votes.iter().all(|v| v.ranking.len() == self.m)
    }

    /// Restriction to the alternatives in `mask`: every ranking keeps
    /// only the surviving alternatives, in order. The index space and
    /// `m` are unchanged, so per-alternative feature vectors stay
    /// dimension-compatible with the root profile.
    pub fn restrict_to(&self, mask: u64) -> Profile {
        let votes = self
            .votes
            .iter()
            .map(|v| VoteGroup {
                count: v.count,
                ranking: v
                    .ranking
                    .iter()
                    .copied()
                    .filter(|&a| mask & (1u64 << a) != 0)
                    .collect(),
            })
            .collect();
        Profile {
            m: self.m,
            alt_names: self.alt_names.clone(),
            votes,
        }
    }
}

pub(crate) fn default_names(m: usize) -> Vec<String> {
    (0..m).map(|i| format!("a{i}")).collect()
}

/// Construct a profile whose weighted majority graph has exactly the
/// given margins, one `(a, b, w)` triple per unordered pair with the
/// convention `w = margin of a over b`. Pairs left out get margin 0.
///
/// Uses vote pairs that shift a single pairwise margin by 2 while
/// cancelling everywhere else, plus one base ballot when the margins
/// are odd. All margins must therefore share one parity, and omitting
/// a pair is only possible when that parity is even.
pub fn profile_with_margins(m: usize, margins: &[(usize, usize, i64)]) -> Result<Profile> {
    let mut want = vec![0i64; m * m];
    let mut given = vec![false; m * m];
    for &(a, b, w) in margins {
        if a >= m || b >= m || a == b {
            return Err(Error::Domain(format!("bad pair ({a}, {b}) for m = {m}")));
        }
        if given[a * m + b] {
            return Err(Error::Domain(format!("pair ({a}, {b}) given twice")));
        }
        given[a * m + b] = true;
        given[b * m + a] = true;
        want[a * m + b] = w;
        want[b * m + a] = -w;
    }
    let odd = margins.iter().any(|&(_, _, w)| w.rem_euclid(2) == 1);
    for a in 0..m {
        for b in a + 1..m {
            let w = want[a * m + b];
            if w.rem_euclid(2) != if odd { 1 } else { 0 } {
                return Err(Error::Domain(format!(
                    "margin parity mismatch at ({a}, {b}): all margins must share one parity"
                )));
            }
        }
    }

    let mut votes = Vec::new();
    if odd {
        // Base ballot 0 > 1 > ... contributes +1 to every (a < b) pair.
        votes.push(VoteGroup {
            count: 1,
            ranking: (0..m).collect(),
        });
        for a in 0..m {
            for b in 0..m {
                if a < b {
                    want[a * m + b] -= 1;
                    want[b * m + a] += 1;
                }
            }
        }
    }
    for a in 0..m {
        for b in 0..m {
            if a == b || want[a * m + b] <= 0 {
                continue;
            }
            let others_asc: Vec<usize> = (0..m).filter(|&x| x != a && x != b).collect();
            let mut first = vec![a, b];
            first.extend(&others_asc);
            let mut second: Vec<usize> = others_asc.iter().rev().copied().collect();
            second.extend([a, b]);
            let pairs = (want[a * m + b] / 2) as u64;
            if pairs > 0 {
                votes.push(VoteGroup { count: pairs, ranking: first });
                votes.push(VoteGroup { count: pairs, ranking: second });
            }
        }
    }
    Profile::new(m, default_names(m), votes)
}

/// Draw `n` complete rankings i.i.d. uniformly over the `m!` strict
/// orders (impartial culture).
///
/// Determinism contract: the generator is ChaCha8 keyed by `seed` via
/// `seed_from_u64`, and each ranking is a Fisher-Yates shuffle of
/// `0..m` drawing `random_range(0..=i)` for i = m-1 down to 1. Same
/// `(m, n, seed)` yields a bit-identical profile on every platform.
pub fn generate_impartial_culture(m: usize, n: u64, seed: u64) -> Result<Profile> {
    if m == 0 {
        return Err(Error::Domain("impartial culture needs m >= 1".into()));
    }
    if n == 0 {
        return Err(Error::Domain("impartial culture needs n >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut votes = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let mut ranking: Vec<usize> = (0..m).collect();
        for i in (1..m).rev() {
            let j = rng.random_range(0..=i);
            ranking.swap(i, j);
        }
        votes.push(VoteGroup { count: 1, ranking });
    }
    Ok(Profile {
        m,
        alt_names: default_names(m),
        votes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_alternative_culture() {
        let p = generate_impartial_culture(1, 5, 0).unwrap();
        assert_eq!(p.votes.len(), 5);
        assert!(p.votes.iter().all(|v| v.ranking == vec![0]));
    }

    #[test]
    fn culture_is_deterministic() {
        let a = generate_impartial_culture(4, 4, 42).unwrap();
        let b = generate_impartial_culture(4, 4, 42).unwrap();
        assert_eq!(a, b);
        let c = generate_impartial_culture(4, 4, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn culture_first_place_frequencies_are_uniform() {
        // Binomial check: each alternative leads ~n/3 ballots, within 5
        // standard deviations of the binomial(n, 1/3).
        let n = 1000u64;
        let p = generate_impartial_culture(3, n, 7).unwrap();
        let mut firsts = [0i64; 3];
        for v in &p.votes {
            firsts[v.ranking[0]] += v.count as i64;
        }
        let mean = n as f64 / 3.0;
        let sigma = (n as f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
        for &f in &firsts {
            assert!(
                (f as f64 - mean).abs() < 5.0 * sigma,
                "first-place count {f} too far from {mean}"
            );
        }
    }

    #[test]
    fn validation_rejects_duplicates_and_range() {
        assert!(Profile::from_rankings(3, &[vec![0, 1, 1]]).is_err());
        assert!(Profile::from_rankings(3, &[vec![0, 3]]).is_err());
        assert!(Profile::new(
            2,
            default_names(2),
            vec![VoteGroup {
                count: 0,
                ranking: vec![0, 1]
            }]
        )
        .is_err());
    }

    #[test]
    fn margin_construction_hits_targets() {
        let p = profile_with_margins(3, &[(0, 1, 3), (0, 2, 1), (2, 1, 1)]).unwrap();
        let wmg = crate::graph::build_wmg(&p);
        assert_eq!(wmg.weight(0, 1), 3);
        assert_eq!(wmg.weight(0, 2), 1);
        assert_eq!(wmg.weight(2, 1), 1);

        let p = profile_with_margins(3, &[(1, 0, 2)]).unwrap();
        let wmg = crate::graph::build_wmg(&p);
        assert_eq!(wmg.weight(1, 0), 2);
        assert_eq!(wmg.weight(0, 2), 0);

        assert!(profile_with_margins(3, &[(0, 1, 1), (0, 2, 2)]).is_err());
    }

    #[test]
    fn restriction_filters_rankings() {
        let p = Profile::from_rankings(3, &[vec![0, 1, 2], vec![2, 0]]).unwrap();
        let q = p.restrict_to(0b110); // drop alternative 0
        assert_eq!(q.votes[0].ranking, vec![1, 2]);
        assert_eq!(q.votes[1].ranking, vec![2]);
        assert_eq!(q.m, 3);
    }
}
