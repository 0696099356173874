//! Non-doubling witnesses: words `i`, `j` with `phi_j([0, 1])` inside the
//! closed `r_i`-neighbourhood of `phi_i([0, 1])` and `p_j >= n p_i`.
//!
//! Candidates come from boundary chains at each point shared by two
//! neighbouring first-level hulls. On one side the chain is `v s^k`, with
//! `s` the map whose hull touches the shared point from inside `v`; on the
//! other side it is `u t^l` likewise. Deeper shared points repeat the same
//! ratios scaled by a common prefix, so the first level is enough.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::cylinder::{cylinder_interval, Interval};
use crate::ifs::{WeightedSystem, Word};

/// Word pairs examined before giving up.
pub const PAIR_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessPair {
    pub i: String,
    pub j: String,
    pub p_i: f64,
    pub p_j: f64,
    /// `p_j / p_i`.
    pub mass_ratio: f64,
    pub interval_i: Interval,
    pub interval_j: Interval,
    /// Distance between the two hulls.
    pub gap: f64,
}

/// Result of a witness search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum WitnessOutcome {
    Found(WitnessPair),
    NotFound { depth_cap: usize },
}

impl WitnessOutcome {
    pub fn pair(&self) -> Option<&WitnessPair> {
        match self {
            WitnessOutcome::Found(p) => Some(p),
            WitnessOutcome::NotFound { .. } => None,
        }
    }
}

/// Symbols sorted by the position of their hull.
fn by_position(sys: &WeightedSystem, t: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..sys.arity()).collect();
    order.sort_by(|&a, &b| t[a].total_cmp(&t[b]));
    order
}

/// Chain `head tail^k` for `k = 0..=max_k`, with mass and hull.
fn chain(
    sys: &WeightedSystem,
    head: usize,
    tail: usize,
    max_k: usize,
) -> Result<Vec<(Word, f64, Interval)>> {
    let mut out = Vec::with_capacity(max_k + 1);
    let mut word = Word::from_symbols([head]);
    let mut p = sys.probs()[head];
    for _ in 0..=max_k {
        out.push((word.clone(), p, cylinder_interval(sys, &word)?));
        word.push(tail);
        p *= sys.probs()[tail];
    }
    Ok(out)
}

/// Searches pairs of total word length at most `depth_cap` each; returns
/// the pair with the shortest `i`, then the largest ratio.
pub fn non_doubling_witness(
    sys: &WeightedSystem,
    n_target: f64,
    depth_cap: usize,
) -> Result<WitnessOutcome> {
    let t = sys.translations().ok_or(Error::NoGeometry)?;
    if depth_cap == 0 {
        return Ok(WitnessOutcome::NotFound { depth_cap });
    }
    let order = by_position(sys, t);
    let (leftmost, rightmost) = (order[0], order[order.len() - 1]);
    let mut best: Option<(usize, WitnessPair)> = None;
    let mut examined = 0u64;
    for pair in order.windows(2) {
        let (left, right) = (pair[0], pair[1]);
        // Chains hugging the right end of `left` and the left end of `right`.
        let left_chain = chain(sys, left, rightmost, depth_cap - 1)?;
        let right_chain = chain(sys, right, leftmost, depth_cap - 1)?;
        for (small, large) in [(&right_chain, &left_chain), (&left_chain, &right_chain)] {
            for (wi, pi, hi) in small.iter() {
                for (wj, pj, hj) in large.iter() {
                    examined += 1;
                    if examined > PAIR_BUDGET {
                        return Err(Error::Budget {
                            budget: PAIR_BUDGET,
                        });
                    }
                    let ri = hi.len();
                    let inside = hj.lo >= hi.lo - ri && hj.hi <= hi.hi + ri;
                    let ratio = pj / pi;
                    if !inside || ratio < n_target {
                        continue;
                    }
                    let better = match &best {
                        None => true,
                        Some((len, p)) => {
                            wi.len() < *len || (wi.len() == *len && ratio > p.mass_ratio)
                        }
                    };
                    if better {
                        best = Some((
                            wi.len(),
                            WitnessPair {
                                i: wi.render(sys.arity()),
                                j: wj.render(sys.arity()),
                                p_i: *pi,
                                p_j: *pj,
                                mass_ratio: ratio,
                                interval_i: *hi,
                                interval_j: *hj,
                                gap: hi.gap(hj),
                            },
                        ));
                    }
                }
            }
        }
    }
    Ok(match best {
        Some((_, pair)) => WitnessOutcome::Found(pair),
        None => WitnessOutcome::NotFound { depth_cap },
    })
}
