//! Per-alternative score functions: plurality over a remaining set,
//! Borda, k-approval, Copeland, maximin, and the positional matrix.
//!
//! Truncated-ballot conventions: an unranked alternative gets Borda
//! weight 0 and counts as below every ranked alternative in pairwise
//! comparisons; two unranked alternatives contribute no margin. A
//! ballot ranking no remaining alternative is exhausted and adds to no
//! plurality count.

use crate::bits::iter_bits;
use crate::error::{Error, Result};
use crate::profile::Profile;
use std::collections::{BTreeMap, BTreeSet};

/// Plurality scores over `remaining`: each ballot adds its count to
/// its highest-ranked surviving alternative.
pub fn plurality_scores(
    profile: &Profile,
    remaining: &BTreeSet<usize>,
) -> Result<BTreeMap<usize, u64>> {
    if remaining.is_empty() {
        return Err(Error::Domain("remaining set is empty".into()));
    }
    let mut mask = 0u64;
    for &a in remaining {
        if a >= profile.m {
            return Err(Error::Domain(format!(
                "alternative {a} not in 0..{}",
                profile.m
            )));
        }
        if a >= 64 {
            return Err(Error::CapExceeded(
                "plurality over remaining sets supports up to 64 alternatives".into(),
            ));
        }
        mask |= 1u64 << a;
    }
    let counts = plurality_counts_mask(profile, mask);
    Ok(remaining.iter().map(|&a| (a, counts[a])).collect())
}

/// Mask-based plurality kernel shared by the solvers and the oracle.
/// Returns a dense vector indexed by alternative; entries outside the
/// mask are 0.
pub(crate) fn plurality_counts_mask(profile: &Profile, mask: u64) -> Vec<u64> {
    let mut counts = vec![0u64; profile.m];
    for v in &profile.votes {
        for &a in &v.ranking {
            if a < 64 && mask & (1u64 << a) != 0 {
                counts[a] += v.count;
                break;
            }
        }
    }
    counts
}

/// Alternatives tied for the lowest plurality score within `mask`.
pub(crate) fn lowest_plurality_mask(profile: &Profile, mask: u64) -> u64 {
    let counts = plurality_counts_mask(profile, mask);
    let min = iter_bits(mask).map(|a| counts[a]).min().unwrap_or(0);
    let mut tied = 0u64;
    for a in iter_bits(mask) {
        if counts[a] == min {
            tied |= 1u64 << a;
        }
    }
    tied
}

/// The five per-alternative score functions of one profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScoreVector {
    pub k: usize,
    pub plurality: Vec<u64>,
    pub borda: Vec<u64>,
    pub k_approval: Vec<u64>,
    pub copeland: Vec<i64>,
    pub maximin: Vec<i64>,
}

/// Counts of pairwise preferences: entry `(a, b)` is the number of
/// voters ranking `a` above `b` (ranked beats unranked; unranked pairs
/// contribute nothing).
pub(crate) fn pairwise_preferences(profile: &Profile) -> Vec<Vec<u64>> {
    let m = profile.m;
    let mut over = vec![vec![0u64; m]; m];
    let mut ranked = vec![false; m];
    for v in &profile.votes {
        for (i, &a) in v.ranking.iter().enumerate() {
            ranked[a] = true;
            for &b in &v.ranking[i + 1..] {
                over[a][b] += v.count;
            }
        }
        if v.ranking.len() < m {
            for &a in &v.ranking {
                for b in 0..m {
                    if !ranked[b] {
                        over[a][b] += v.count;
                    }
                }
            }
        }
        for &a in &v.ranking {
            ranked[a] = false;
        }
    }
    over
}

/// Compute plurality, Borda, k-approval, Copeland and maximin scores.
/// `k` must satisfy `1 <= k <= m`.
pub fn score_features(profile: &Profile, k: usize) -> Result<ScoreVector> {
    let m = profile.m;
    if k == 0 || k > m {
        return Err(Error::Domain(format!("k-approval needs 1 <= k <= m, got {k}")));
    }
    let mut plurality = vec![0u64; m];
    let mut borda = vec![0u64; m];
    let mut k_approval = vec![0u64; m];
    for v in &profile.votes {
        if let Some(&top) = v.ranking.first() {
            plurality[top] += v.count;
        }
        for (pos, &a) in v.ranking.iter().enumerate() {
            borda[a] += v.count * (m - pos - 1) as u64;
            if pos < k {
                k_approval[a] += v.count;
            }
        }
    }

    let over = pairwise_preferences(profile);
    let mut copeland = vec![0i64; m];
    let mut maximin = vec![0i64; m];
    for a in 0..m {
        let mut min_margin = i64::MAX;
        for b in 0..m {
            if a == b {
                continue;
            }
            let margin = over[a][b] as i64 - over[b][a] as i64;
            if margin > 0 {
                copeland[a] += 1;
            } else if margin < 0 {
                copeland[a] -= 1;
            }
            min_margin = min_margin.min(margin);
        }
        maximin[a] = if m == 1 { 0 } else { min_margin };
    }

    Ok(ScoreVector {
        k,
        plurality,
        borda,
        k_approval,
        copeland,
        maximin,
    })
}

/// m x m matrix counting, for each alternative, how often it occupies
/// each ballot position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositionalMatrix {
    pub m: usize,
    counts: Vec<u64>,
}

impl PositionalMatrix {
    /// Votes placing alternative `a` at 0-based position `p`.
    pub fn entry(&self, a: usize, p: usize) -> u64 {
        self.counts[a * self.m + p]
    }

    pub fn row(&self, a: usize) -> &[u64] {
        &self.counts[a * self.m..(a + 1) * self.m]
    }
}

pub fn positional_matrix(profile: &Profile) -> PositionalMatrix {
    let m = profile.m;
    let mut counts = vec![0u64; m * m];
    for v in &profile.votes {
        for (pos, &a) in v.ranking.iter().enumerate() {
            counts[a * m + pos] += v.count;
        }
    }
    PositionalMatrix { m, counts }
}
