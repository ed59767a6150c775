//! Local-priority heuristics: the LP count, the pluggable score-based
//! LPML, the feature extractor feeding learned scorers, and the weight
//! file format for linear scorers.

use crate::error::{Error, Result};
use crate::graph::build_wmg;
use crate::profile::Profile;
use crate::scores::{positional_matrix, score_features};
use crate::search::Rule;
use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

/// Number of candidate winners not yet known: `|candidates \ known|`.
/// Higher values are explored first.
pub fn lp_priority(candidates: &BTreeSet<usize>, known_winners: &BTreeSet<usize>) -> usize {
    candidates.difference(known_winners).count()
}

/// Sum of scorer probabilities over the unknown candidates:
/// `sum of score[a] for a in candidates \ known`.
pub fn lpml_priority(
    candidates: &BTreeSet<usize>,
    known_winners: &BTreeSet<usize>,
    scores: &[f64],
) -> f64 {
    candidates
        .difference(known_winners)
        .map(|&a| scores[a])
        .sum()
}

/// Estimates, per alternative, the probability of being a PUT-winner.
/// Scores must be deterministic and in [0, 1].
pub trait PriorityScorer: Send + Sync {
    fn scores(&self, profile: &Profile, rule: Rule) -> Result<Vec<f64>>;
    fn name(&self) -> &str;
}

/// Every alternative scores 0.5; LPML with this scorer orders children
/// exactly like LP.
pub struct UniformScorer;

impl PriorityScorer for UniformScorer {
    fn scores(&self, profile: &Profile, _rule: Rule) -> Result<Vec<f64>> {
        Ok(vec![0.5; profile.m])
    }

    fn name(&self) -> &str {
        "uniform"
    }
}

/// Borda score normalized by its maximum attainable value `n*(m-1)`.
pub struct NormalizedBordaScorer;

impl PriorityScorer for NormalizedBordaScorer {
    fn scores(&self, profile: &Profile, _rule: Rule) -> Result<Vec<f64>> {
        let m = profile.m;
        let n = profile.voter_count();
        let denom = n as f64 * (m as f64 - 1.0);
        if denom == 0.0 {
            return Ok(vec![0.5; m]);
        }
        let sv = score_features(profile, default_k(m))?;
        Ok(sv.borda.iter().map(|&b| b as f64 / denom).collect())
    }

    fn name(&self) -> &str {
        "borda"
    }
}

/// Default k for k-approval features: ceil(m / 2).
pub fn default_k(m: usize) -> usize {
    m.div_ceil(2).max(1)
}

/// Flattened per-profile feature vector.
///
/// Layout (frozen, all counts as f64):
///   positional matrix, row-major           m*m
///   WMG weights, row-major                 m*m
///   plurality scores                       m
///   Borda scores                           m
///   k-approval scores (k = ceil(m/2))      m
///   Copeland scores                        m
///   maximin scores                         m
/// and for ranked-pairs contexts additionally
///   indegree in the nonnegative WMG        m
///   outdegree in the nonnegative WMG       m
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector {
    pub m: usize,
    pub rule: Rule,
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The per-alternative slice: positional row, WMG row, then the
    /// five scores (plus the two degrees for ranked pairs), length
    /// `2m + 5` or `2m + 7`.
    pub fn for_alternative(&self, a: usize) -> Vec<f64> {
        let m = self.m;
        let mut out = Vec::with_capacity(2 * m + 7);
        out.extend_from_slice(&self.values[a * m..(a + 1) * m]);
        out.extend_from_slice(&self.values[m * m + a * m..m * m + (a + 1) * m]);
        let scalar_blocks = match self.rule {
            Rule::Stv => 5,
            Rule::Rp => 7,
        };
        for block in 0..scalar_blocks {
            out.push(self.values[2 * m * m + block * m + a]);
        }
        out
    }
}

/// Length of the per-alternative feature slice for a given rule.
pub fn feature_slice_len(m: usize, rule: Rule) -> usize {
    match rule {
        Rule::Stv => 2 * m + 5,
        Rule::Rp => 2 * m + 7,
    }
}

/// Extract the profile-level feature vector (length `2m^2 + 5m` for
/// STV, `2m^2 + 7m` for ranked pairs).
pub fn extract_features(profile: &Profile, rule: Rule) -> Result<FeatureVector> {
    let m = profile.m;
    let mut values = Vec::with_capacity(2 * m * m + 7 * m);
    let pm = positional_matrix(profile);
    for a in 0..m {
        values.extend(pm.row(a).iter().map(|&c| c as f64));
    }
    let wmg = build_wmg(profile);
    for a in 0..m {
        for b in 0..m {
            values.push(wmg.weight(a, b) as f64);
        }
    }
    let sv = score_features(profile, default_k(m))?;
    values.extend(sv.plurality.iter().map(|&x| x as f64));
    values.extend(sv.borda.iter().map(|&x| x as f64));
    values.extend(sv.k_approval.iter().map(|&x| x as f64));
    values.extend(sv.copeland.iter().map(|&x| x as f64));
    values.extend(sv.maximin.iter().map(|&x| x as f64));
    if rule == Rule::Rp {
        let mut indeg = vec![0u64; m];
        let mut outdeg = vec![0u64; m];
        for (a, b) in wmg.nonneg_edges() {
            outdeg[a] += 1;
            indeg[b] += 1;
        }
        values.extend(indeg.iter().map(|&x| x as f64));
        values.extend(outdeg.iter().map(|&x| x as f64));
    }
    Ok(FeatureVector { m, rule, values })
}

/// Linear model over the per-alternative feature slice:
/// `sigmoid(w . features_a + bias)`.
///
/// Weight file format (line-based text, `#` comments ignored):
///   line 1: format version (currently 1)
///   line 2: m
///   line 3: context, `stv` or `rp`
///   line 4: bias
///   then exactly `2m + 5` (stv) or `2m + 7` (rp) weight lines.
pub struct LinearScorer {
    pub m: usize,
    pub rule: Rule,
    pub bias: f64,
    pub weights: Vec<f64>,
}

impl LinearScorer {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let mut next = |what: &str| -> Result<(usize, String)> {
            lines
                .next()
                .map(|(n, l)| (n, l.to_string()))
                .ok_or_else(|| Error::parse(0, format!("missing {what}")))
        };

        let (n, version) = next("version line")?;
        let version: u32 = version
            .parse()
            .map_err(|_| Error::parse(n, "bad version"))?;
        if version != 1 {
            return Err(Error::Unsupported(format!(
                "weight file version {version}, expected 1"
            )));
        }
        let (n, m_line) = next("m line")?;
        let m: usize = m_line.parse().map_err(|_| Error::parse(n, "bad m"))?;
        let (n, ctx) = next("context line")?;
        let rule = match ctx.as_str() {
            "stv" => Rule::Stv,
            "rp" => Rule::Rp,
            other => return Err(Error::parse(n, format!("unknown context {other:?}"))),
        };
        let (n, bias_line) = next("bias line")?;
        let bias: f64 = bias_line
            .parse()
            .map_err(|_| Error::parse(n, "bad bias"))?;

        let expected = feature_slice_len(m, rule);
        let mut weights = Vec::with_capacity(expected);
        for (n, l) in lines {
            let w: f64 = l
                .parse()
                .map_err(|_| Error::parse(n, format!("bad weight {l:?}")))?;
            weights.push(w);
        }
        if weights.len() != expected {
            return Err(Error::Validation(format!(
                "expected {expected} weights for m = {m} ({rule}), got {}",
                weights.len()
            )));
        }
        Ok(LinearScorer {
            m,
            rule,
            bias,
            weights,
        })
    }

    pub fn to_text(&self) -> String {
        let ctx = self.rule.to_string();
        let mut out = format!("1\n{}\n{}\n{}\n", self.m, ctx, self.bias);
        for w in &self.weights {
            out.push_str(&format!("{w}\n"));
        }
        out
    }
}

impl PriorityScorer for LinearScorer {
    fn scores(&self, profile: &Profile, rule: Rule) -> Result<Vec<f64>> {
        if profile.m != self.m {
            return Err(Error::ScorerMismatch(format!(
                "weight file is for m = {}, profile has m = {}",
                self.m, profile.m
            )));
        }
        if rule != self.rule {
            return Err(Error::ScorerMismatch(format!(
                "weight file is for {}, solve is {}",
                self.rule, rule
            )));
        }
        let fv = extract_features(profile, rule)?;
        let mut out = Vec::with_capacity(profile.m);
        for a in 0..profile.m {
            let slice = fv.for_alternative(a);
            // Left-to-right fold in the frozen layout order keeps the
            // evaluation bit-reproducible.
            let z = slice
                .iter()
                .zip(&self.weights)
                .fold(self.bias, |acc, (x, w)| acc + x * w);
            out.push(1.0 / (1.0 + (-z).exp()));
        }
        Ok(out)
    }

    fn name(&self) -> &str {
        "linear"
    }
}

/// Load a linear scorer from a weight file.
pub fn load_scorer(path: &Path) -> Result<LinearScorer> {
    LinearScorer::parse(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[usize]) -> BTreeSet<usize> {
        xs.iter().copied().collect()
    }

    #[test]
    fn lp_counts_unknowns() {
        assert_eq!(lp_priority(&set(&[0, 1, 2]), &set(&[1])), 2);
        assert_eq!(lp_priority(&set(&[0]), &set(&[0])), 0);
        assert_eq!(lp_priority(&set(&[]), &set(&[0, 1])), 0);
    }

    #[test]
    fn lpml_sums_unknown_scores() {
        let scores = vec![0.5, 0.5, 0.5];
        assert_eq!(lpml_priority(&set(&[0, 1]), &set(&[]), &scores), 1.0);
        assert_eq!(lpml_priority(&set(&[0, 1]), &set(&[0, 1]), &scores), 0.0);
    }

    #[test]
    fn uniform_lpml_orders_like_lp() {
        let scores = vec![0.5; 5];
        let known = set(&[2, 4]);
        let mut cands: Vec<BTreeSet<usize>> = vec![
            set(&[0, 1, 2]),
            set(&[2, 4]),
            set(&[0, 1, 3, 4]),
            set(&[4]),
        ];
        let by_lp = {
            let mut v = cands.clone();
            v.sort_by_key(|c| std::cmp::Reverse(lp_priority(c, &known)));
            v
        };
        cands.sort_by(|a, b| {
            lpml_priority(b, &known, &scores)
                .partial_cmp(&lpml_priority(a, &known, &scores))
                .unwrap()
        });
        assert_eq!(by_lp, cands);
    }

    #[test]
    fn feature_lengths() {
        let p = Profile::from_rankings(3, &[vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]).unwrap();
        let stv = extract_features(&p, Rule::Stv).unwrap();
        assert_eq!(stv.len(), 2 * 9 + 5 * 3);
        let rp = extract_features(&p, Rule::Rp).unwrap();
        assert_eq!(rp.len(), 2 * 9 + 7 * 3);
        assert_eq!(stv.for_alternative(0).len(), feature_slice_len(3, Rule::Stv));
        assert_eq!(rp.for_alternative(2).len(), feature_slice_len(3, Rule::Rp));
    }

    #[test]
    fn cycle_feature_slices() {
        let p = Profile::from_rankings(3, &[vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]).unwrap();
        let fv = extract_features(&p, Rule::Stv).unwrap();
        // Blocks: positional (9), wmg (9), plurality, borda, k-approval,
        // copeland, maximin (3 each).
        let copeland = &fv.values[2 * 9 + 3 * 3..2 * 9 + 4 * 3];
        let maximin = &fv.values[2 * 9 + 4 * 3..2 * 9 + 5 * 3];
        assert_eq!(copeland, &[0.0, 0.0, 0.0]);
        assert_eq!(maximin, &[-1.0, -1.0, -1.0]);
    }

    #[test]
    fn single_alternative_features() {
        let p = Profile::from_rankings(1, &[vec![0], vec![0]]).unwrap();
        let fv = extract_features(&p, Rule::Stv).unwrap();
        assert_eq!(fv.len(), 2 + 5);
        assert_eq!(fv.values[0], 2.0); // positional (0, 0) = n
    }

    #[test]
    fn zero_weights_score_half() {
        let p = Profile::from_rankings(2, &[vec![0, 1]]).unwrap();
        let scorer = LinearScorer {
            m: 2,
            rule: Rule::Stv,
            bias: 0.0,
            weights: vec![0.0; feature_slice_len(2, Rule::Stv)],
        };
        assert_eq!(scorer.scores(&p, Rule::Stv).unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let p = Profile::from_rankings(2, &[vec![0, 1]]).unwrap();
        let scorer = LinearScorer {
            m: 30,
            rule: Rule::Stv,
            bias: 0.0,
            weights: vec![0.0; feature_slice_len(30, Rule::Stv)],
        };
        assert!(matches!(
            scorer.scores(&p, Rule::Stv),
            Err(Error::ScorerMismatch(_))
        ));
    }

    #[test]
    fn borda_weight_makes_scores_monotone_in_borda() {
        // Single ballot A > B > C orders Borda strictly: 2, 1, 0.
        let p = Profile::from_rankings(3, &[vec![0, 1, 2]]).unwrap();
        let mut weights = vec![0.0; feature_slice_len(3, Rule::Stv)];
        // Slice layout: positional row (3), wmg row (3), plurality,
        // borda, k-approval, copeland, maximin.
        weights[2 * 3 + 1] = 1.0;
        let scorer = LinearScorer {
            m: 3,
            rule: Rule::Stv,
            bias: 0.0,
            weights,
        };
        let s = scorer.scores(&p, Rule::Stv).unwrap();
        assert!(s[0] > s[1] && s[1] > s[2]);
    }

    #[test]
    fn weight_file_roundtrip_and_versioning() {
        let scorer = LinearScorer {
            m: 2,
            rule: Rule::Rp,
            bias: -0.25,
            weights: (0..feature_slice_len(2, Rule::Rp))
                .map(|i| i as f64 / 8.0)
                .collect(),
        };
        let text = scorer.to_text();
        let back = LinearScorer::parse(&text).unwrap();
        assert_eq!(back.m, 2);
        assert_eq!(back.bias, -0.25);
        assert_eq!(back.weights, scorer.weights);
        assert!(LinearScorer::parse(&text.replacen('1', "9", 1)).is_err());
        // Wrong weight count.
        let truncated: String = text.lines().take(6).collect::<Vec<_>>().join("\n");
        assert!(LinearScorer::parse(&truncated).is_err());
    }
}
