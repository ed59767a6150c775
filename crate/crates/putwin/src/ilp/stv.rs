//! Feasibility model for PUT-STV winner tests over complete-ranking
//! profiles: solutions are exactly the valid elimination sequences
//! (one minimal-plurality alternative removed per round) in which the
//! target survives every round.
//!
//! Variables, all binary:
//!   `y_c_r`    alternative c is eliminated in round r (1-based),
//!   `rem_c_r`  c is still standing at the start of round r,
//!   `h_v_c_r`  ballot group v counts for c in round r (its top choice
//!              among the standing alternatives).
//! Scores appear as weighted sums of h; minimal-score elimination is
//! enforced with big-M rows using M = n.

use super::{Assignment, CmpOp, IlpModel};
use crate::error::{Error, Result};
use crate::profile::Profile;

fn yvar(c: usize, r: usize) -> String {
    format!("y_{c}_{r}")
}

fn remvar(c: usize, r: usize) -> String {
    format!("rem_{c}_{r}")
}

fn hvar(v: usize, c: usize, r: usize) -> String {
    format!("h_{v}_{c}_{r}")
}

/// Build the STV feasibility model asking whether `target` can win.
/// Requires a complete-ranking (SOC) profile.
pub fn build_stv_ilp(profile: &Profile, target: usize) -> Result<IlpModel> {
    let m = profile.m;
    if target >= m {
        return Err(Error::Domain(format!(
            "target {target} out of range for m = {m}"
        )));
    }
    if !profile.is_complete() {
        return Err(Error::Unsupported(
            "stv model requires complete rankings (SOC)".into(),
        ));
    }
    let mut model = IlpModel::new(format!("stv_target_{target}"));
    if m == 1 {
        return Ok(model);
    }
    let rounds = m - 1;
    let n = profile.voter_count() as f64;
    let votes = &profile.votes;

    for c in 0..m {
        for r in 1..=rounds {
            model.add_var(yvar(c, r))?;
        }
    }
    for c in 0..m {
        for r in 1..=rounds {
            model.add_var(remvar(c, r))?;
        }
    }
    for v in 0..votes.len() {
        for c in 0..m {
            for r in 1..=rounds {
                model.add_var(hvar(v, c, r))?;
            }
        }
    }
    let yid = |model: &IlpModel, c: usize, r: usize| model.var_id(&yvar(c, r)).expect("declared");
    let remid =
        |model: &IlpModel, c: usize, r: usize| model.var_id(&remvar(c, r)).expect("declared");
    let hid = |model: &IlpModel, v: usize, c: usize, r: usize| {
        model.var_id(&hvar(v, c, r)).expect("declared")
    };

    // Exactly one elimination per round; nobody eliminated twice.
    for r in 1..=rounds {
        let terms = (0..m).map(|c| (1.0, yid(&model, c, r))).collect();
        model.add_constraint(format!("elim_one_{r}"), terms, CmpOp::Eq, 1.0)?;
    }
    for c in 0..m {
        let terms = (1..=rounds).map(|r| (1.0, yid(&model, c, r))).collect();
        model.add_constraint(format!("elim_once_{c}"), terms, CmpOp::Le, 1.0)?;
    }

    // Standing bookkeeping.
    for c in 0..m {
        model.add_constraint(
            format!("remdef_{c}_1"),
            vec![(1.0, remid(&model, c, 1))],
            CmpOp::Eq,
            1.0,
        )?;
        for r in 2..=rounds {
            model.add_constraint(
                format!("remdef_{c}_{r}"),
                vec![
                    (1.0, remid(&model, c, r)),
                    (-1.0, remid(&model, c, r - 1)),
                    (1.0, yid(&model, c, r - 1)),
                ],
                CmpOp::Eq,
                0.0,
            )?;
        }
        for r in 1..=rounds {
            model.add_constraint(
                format!("elim_rem_{c}_{r}"),
                vec![(1.0, yid(&model, c, r)), (-1.0, remid(&model, c, r))],
                CmpOp::Le,
                0.0,
            )?;
        }
    }

    // h_v_c_r = rem_c_r and every alternative above c on ballot v is
    // out: the usual conjunction linearization.
    for (v, vote) in votes.iter().enumerate() {
        for (pos, &c) in vote.ranking.iter().enumerate() {
            let above = &vote.ranking[..pos];
            for r in 1..=rounds {
                let h = hid(&model, v, c, r);
                model.add_constraint(
                    format!("hub_{v}_{c}_{r}"),
                    vec![(1.0, h), (-1.0, remid(&model, c, r))],
                    CmpOp::Le,
                    0.0,
                )?;
                for &b in above {
                    model.add_constraint(
                        format!("hub_{v}_{c}_{r}_{b}"),
                        vec![(1.0, h), (1.0, remid(&model, b, r))],
                        CmpOp::Le,
                        1.0,
                    )?;
                }
                let mut terms = vec![(1.0, h), (-1.0, remid(&model, c, r))];
                for &b in above {
                    terms.push((1.0, remid(&model, b, r)));
                }
                model.add_constraint(format!("hlb_{v}_{c}_{r}"), terms, CmpOp::Ge, 0.0)?;
            }
        }
    }

    // The eliminated alternative has minimal plurality score among the
    // standing ones: score(c) - score(d) <= M (2 - y_c_r - rem_d_r).
    for r in 1..=rounds {
        for c in 0..m {
            for d in 0..m {
                if c == d {
                    continue;
                }
                let mut terms = Vec::with_capacity(2 * votes.len() + 2);
                for (v, vote) in votes.iter().enumerate() {
                    terms.push((vote.count as f64, hid(&model, v, c, r)));
                }
                for (v, vote) in votes.iter().enumerate() {
                    terms.push((-(vote.count as f64), hid(&model, v, d, r)));
                }
                terms.push((n, yid(&model, c, r)));
                terms.push((n, remid(&model, d, r)));
                model.add_constraint(
                    format!("minscore_{r}_{c}_{d}"),
                    terms,
                    CmpOp::Le,
                    2.0 * n,
                )?;
            }
        }
    }

    // The target is never eliminated.
    let terms = (1..=rounds).map(|r| (1.0, yid(&model, target, r))).collect();
    model.add_constraint("winner".into(), terms, CmpOp::Eq, 0.0)?;

    model.validate()?;
    Ok(model)
}

/// Translate an elimination sequence (m-1 distinct alternatives, round
/// by round) into a total assignment of the STV model variables. The
/// assignment satisfies the model minus the winner row iff every round
/// eliminates a minimal-plurality alternative.
pub fn elimination_to_assignment(profile: &Profile, order: &[usize]) -> Result<Assignment> {
    let m = profile.m;
    if !profile.is_complete() {
        return Err(Error::Unsupported(
            "stv model requires complete rankings (SOC)".into(),
        ));
    }
    let mut asg = Assignment::new();
    if m == 1 {
        return Ok(asg);
    }
    if order.len() != m - 1 {
        return Err(Error::Domain(format!(
            "elimination order needs {} entries, got {}",
            m - 1,
            order.len()
        )));
    }
    let mut standing = vec![true; m];
    for &c in order {
        if c >= m || !standing[c] {
            return Err(Error::Domain(
                "elimination order repeats or exceeds the alternatives".into(),
            ));
        }
        standing[c] = false;
    }

    let rounds = m - 1;
    let mut remaining = vec![true; m];
    for r in 1..=rounds {
        let victim = order[r - 1];
        for c in 0..m {
            asg.insert(remvar(c, r), remaining[c]);
            asg.insert(yvar(c, r), c == victim);
        }
        for (v, vote) in profile.votes.iter().enumerate() {
            let top = vote.ranking.iter().copied().find(|&c| remaining[c]);
            for &c in &vote.ranking {
                asg.insert(hvar(v, c, r), Some(c) == top);
            }
        }
        remaining[victim] = false;
    }
    Ok(asg)
}
