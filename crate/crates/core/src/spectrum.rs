//! L^q spectrum `tau(q)`, the `alpha(q)` correspondence and the multifractal
//! spectrum `f(alpha)` of a Bernoulli measure, with its running-max
//! envelope `f_bar`.
//!
//! `tau(q)` is the root of `sum_i p_i^q r_i^tau = 1`; every moment sum is
//! evaluated as a log-sum-exp so `q` can reach `+-Q_CAP` without underflow.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ifs::{alpha_bounds, WeightedSystem};
use crate::roots::{bisect_decreasing, bracket_decreasing, log_sum_exp};
use crate::table::{Cell, Tabular};

/// Endpoint limits `f(alpha_min)`, `f(alpha_max)` are evaluated at `q = +-Q_CAP`.
pub const Q_CAP: f64 = 200.0;

/// Default tolerance for `tau` and `q(alpha)` solves.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Maximum disagreement allowed between the two `f(alpha)` evaluations.
pub const CONSISTENCY_TOL: f64 = 1e-8;

/// `q` brackets for `q_of_alpha` never grow past this magnitude.
const Q_SEARCH_LIMIT: f64 = 1.0e9;

/// Uniform grid `lo, ..., hi` with `count` points, written `lo:hi:count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl UniformGrid {
    pub fn new(lo: f64, hi: f64, count: usize) -> Self {
        UniformGrid { lo, hi, count }
    }

    /// `[-Q_CAP, Q_CAP]` at spacing 0.01.
    pub fn legendre_default() -> Self {
        UniformGrid::new(-Q_CAP, Q_CAP, 40_001)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!(
                "grid {text:?} is not of the form lo:hi:count"
            )));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse(format!("invalid grid bound {s:?}")))
        };
        let lo = num(parts[0])?;
        let hi = num(parts[1])?;
        let count = parts[2]
            .parse::<usize>()
            .map_err(|_| Error::Parse(format!("invalid grid count {:?}", parts[2])))?;
        if hi < lo {
            return Err(Error::Parse(format!("grid {text:?} has hi < lo")));
        }
        Ok(UniformGrid { lo, hi, count })
    }

    pub fn points(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.lo],
            n => {
                let step = (self.hi - self.lo) / (n - 1) as f64;
                (0..n)
                    .map(|k| {
                        if k == n - 1 {
                            self.hi
                        } else {
                            self.lo + step * k as f64
                        }
                    })
                    .collect()
            }
        }
    }

    pub fn describe(&self) -> String {
        format!("{}:{}:{}", self.lo, self.hi, self.count)
    }
}

/// `log sum_i p_i^q r_i^t`, strictly decreasing in `t`.
fn log_moment(sys: &WeightedSystem, q: f64, t: f64) -> f64 {
    log_sum_exp(
        sys.log_probs()
            .iter()
            .zip(sys.log_ratios())
            .map(move |(lp, lr)| q * lp + t * lr),
    )
}

/// The unique `tau` with `sum_i p_i^q r_i^tau = 1`.
pub fn solve_tau(sys: &WeightedSystem, q: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) || !q.is_finite() {
        return Err(Error::Domain(format!(
            "solve_tau needs finite q and tol > 0 (q = {q}, tol = {tol})"
        )));
    }
    let f = |t: f64| log_moment(sys, q, t);
    let (lo, hi) = bracket_decreasing(f)?;
    let tau = bisect_decreasing(f, lo, hi, 0.0);
    // Bisection runs to exhaustion; the residual is reported only if the
    // requested tolerance is below floating point resolution.
    debug_assert!(f(tau).exp_m1().abs() <= tol.max(1e-9));
    Ok(tau)
}

/// `q`, `tau(q)` and the tilted log-weights `q log p_i + tau log r_i`.
#[derive(Debug, Clone)]
struct Tilt {
    q: f64,
    tau: f64,
    log_weights: Vec<f64>,
    weights: Vec<f64>,
}

impl Tilt {
    fn new(sys: &WeightedSystem, q: f64) -> Result<Self> {
        let tau = solve_tau(sys, q, DEFAULT_TOL)?;
        let log_weights: Vec<f64> = sys
            .log_probs()
            .iter()
            .zip(sys.log_ratios())
            .map(|(lp, lr)| q * lp + tau * lr)
            .collect();
        let norm = log_sum_exp(log_weights.iter().cloned());
        let weights = log_weights.iter().map(|lw| (lw - norm).exp()).collect();
        Ok(Tilt {
            q,
            tau,
            log_weights,
            weights,
        })
    }

    /// `sum w_i log p_i / sum w_i log r_i`.
    fn alpha(&self, sys: &WeightedSystem) -> f64 {
        let num: f64 = self
            .weights
            .iter()
            .zip(sys.log_probs())
            .map(|(w, lp)| w * lp)
            .sum();
        let den: f64 = self
            .weights
            .iter()
            .zip(sys.log_ratios())
            .map(|(w, lr)| w * lr)
            .sum();
        num / den
    }

    /// `sum w_i log w_i / sum w_i log r_i`.
    fn f_quotient(&self, sys: &WeightedSystem) -> f64 {
        let num: f64 = self
            .weights
            .iter()
            .zip(&self.log_weights)
            .map(|(w, lw)| w * lw)
            .sum();
        let den: f64 = self
            .weights
            .iter()
            .zip(sys.log_ratios())
            .map(|(w, lr)| w * lr)
            .sum();
        num / den
    }
}

pub fn alpha_of_q(sys: &WeightedSystem, q: f64) -> Result<f64> {
    Ok(Tilt::new(sys, q)?.alpha(sys))
}

/// The probability vector `(p_i^q r_i^tau(q))_i`.
pub fn tilted_vector(sys: &WeightedSystem, q: f64) -> Result<Vec<f64>> {
    Ok(Tilt::new(sys, q)?.weights)
}

fn require_open_interval(sys: &WeightedSystem, alpha: f64) -> Result<(f64, f64)> {
    let (lo, hi) = alpha_bounds(sys);
    if sys.is_degenerate() || !(alpha > lo && alpha < hi) {
        return Err(Error::Domain(format!(
            "alpha = {alpha} is outside the open interval ({lo}, {hi})"
        )));
    }
    Ok((lo, hi))
}

/// Bisection on the decreasing map `q -> alpha(q)` inside `[lo, hi]`.
fn invert_alpha(
    sys: &WeightedSystem,
    alpha: f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<f64> {
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gap = alpha_of_q(sys, mid)? - alpha;
        if gap.abs() <= 0.25 * tol {
            return Ok(mid);
        }
        if gap > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The unique `q` with `alpha(q) = alpha`, for `alpha` strictly inside
/// `(alpha_min, alpha_max)`.
pub fn q_of_alpha(sys: &WeightedSystem, alpha: f64, tol: f64) -> Result<f64> {
    require_open_interval(sys, alpha)?;
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tol must be positive, got {tol}")));
    }
    let (mut lo, mut hi) = (-1.0_f64, 1.0_f64);
    while alpha_of_q(sys, lo)? < alpha {
        lo *= 2.0;
        if -lo > Q_SEARCH_LIMIT {
            return Err(Error::Domain(format!(
                "alpha = {alpha} is numerically indistinguishable from alpha_max"
            )));
        }
    }
    while alpha_of_q(sys, hi)? > alpha {
        hi *= 2.0;
        if hi > Q_SEARCH_LIMIT {
            return Err(Error::Domain(format!(
                "alpha = {alpha} is numerically indistinguishable from alpha_min"
            )));
        }
    }
    invert_alpha(sys, alpha, lo, hi, tol)
}

/// Both evaluations of `f(alpha)` at the `q` selected for `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FEvaluation {
    pub q: f64,
    pub tau: f64,
    /// The `alpha` paired with `q`; differs from the request only at the
    /// clamped endpoints `q = +-Q_CAP`.
    pub alpha: f64,
    /// `alpha q + tau(q)`.
    pub via_tau: f64,
    /// `sum w_i log w_i / sum w_i log r_i` with `w_i = p_i^q r_i^tau`.
    pub via_quotient: f64,
}

/// Evaluates `f(alpha)` both ways without checking their agreement.
pub fn f_evaluations(sys: &WeightedSystem, alpha: f64) -> Result<FEvaluation> {
    let (lo, hi) = alpha_bounds(sys);
    let slack = 1e-12 * hi.abs().max(1.0);
    if !(alpha >= lo - slack && alpha <= hi + slack) {
        return Err(Error::Domain(format!(
            "alpha = {alpha} is outside [{lo}, {hi}]"
        )));
    }
    if sys.is_degenerate() {
        let tilt = Tilt::new(sys, 0.0)?;
        return Ok(FEvaluation {
            q: 0.0,
            tau: tilt.tau,
            alpha,
            via_tau: tilt.tau,
            via_quotient: tilt.f_quotient(sys),
        });
    }
    let upper_cap = Tilt::new(sys, Q_CAP)?;
    let lower_cap = Tilt::new(sys, -Q_CAP)?;
    let (tilt, paired_alpha) = if alpha <= upper_cap.alpha(sys) {
        let a = upper_cap.alpha(sys);
        (upper_cap, a)
    } else if alpha >= lower_cap.alpha(sys) {
        let a = lower_cap.alpha(sys);
        (lower_cap, a)
    } else {
        let q = invert_alpha(sys, alpha, -Q_CAP, Q_CAP, DEFAULT_TOL)?;
        (Tilt::new(sys, q)?, alpha)
    };
    Ok(FEvaluation {
        q: tilt.q,
        tau: tilt.tau,
        alpha: paired_alpha,
        via_tau: paired_alpha * tilt.q + tilt.tau,
        via_quotient: tilt.f_quotient(sys),
    })
}

/// `f(alpha) = inf_q alpha q + tau(q)` on `[alpha_min, alpha_max]`.
pub fn f_of_alpha(sys: &WeightedSystem, alpha: f64) -> Result<f64> {
    let eval = f_evaluations(sys, alpha)?;
    if (eval.via_tau - eval.via_quotient).abs() > CONSISTENCY_TOL {
        return Err(Error::Consistency {
            first: eval.via_tau,
            second: eval.via_quotient,
        });
    }
    Ok(eval.via_tau)
}

/// `max_{beta <= alpha} f(beta)`: `f(alpha)` up to `alpha(0)`, then `tau(0)`.
pub fn f_bar(sys: &WeightedSystem, alpha: f64) -> Result<f64> {
    let (lo, hi) = alpha_bounds(sys);
    let slack = 1e-12 * hi.abs().max(1.0);
    if !(alpha >= lo - slack && alpha <= hi + slack) {
        return Err(Error::Domain(format!(
            "alpha = {alpha} is outside [{lo}, {hi}]"
        )));
    }
    let at_zero = Tilt::new(sys, 0.0)?;
    if sys.is_degenerate() || alpha > at_zero.alpha(sys) {
        Ok(at_zero.tau)
    } else {
        f_of_alpha(sys, alpha)
    }
}

/// `tau` tabulated on a `q` grid, for brute-force Legendre transforms.
#[derive(Debug, Clone)]
pub struct LegendreTable {
    qs: Vec<f64>,
    taus: Vec<f64>,
}

impl LegendreTable {
    pub fn new(sys: &WeightedSystem, grid: &UniformGrid) -> Result<Self> {
        let qs = grid.points();
        let taus = qs
            .par_iter()
            .map(|&q| solve_tau(sys, q, DEFAULT_TOL))
            .collect::<Result<Vec<_>>>()?;
        Ok(LegendreTable { qs, taus })
    }

    /// `min_q alpha q + tau(q)` over the tabulated grid.
    pub fn transform(&self, alpha: f64) -> f64 {
        self.qs
            .iter()
            .zip(&self.taus)
            .map(|(q, t)| alpha * q + t)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Grid minimum of `alpha q + tau(q)`; an oracle for [`f_of_alpha`].
pub fn legendre_numeric(sys: &WeightedSystem, alpha: f64, grid: &UniformGrid) -> Result<f64> {
    Ok(LegendreTable::new(sys, grid)?.transform(alpha))
}

/// One sampled point of the spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumRow {
    pub q: f64,
    pub tau: f64,
    pub alpha: f64,
    pub f: f64,
    pub f_bar: f64,
}

impl Tabular for SpectrumRow {
    fn columns() -> &'static [&'static str] {
        &["q", "tau", "alpha", "f", "f_bar"]
    }

    fn cells(&self) -> Vec<Cell> {
        vec![
            self.q.into(),
            self.tau.into(),
            self.alpha.into(),
            self.f.into(),
            self.f_bar.into(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumMeta {
    pub system_hash: String,
    pub grid: String,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    pub rows: Vec<SpectrumRow>,
    pub meta: SpectrumMeta,
}

/// Tabulates `(q, tau, alpha, f, f_bar)` along a `q` grid, sorted by `q`.
pub fn spectrum_table(sys: &WeightedSystem, grid: &UniformGrid) -> Result<SpectrumTable> {
    let at_zero = Tilt::new(sys, 0.0)?;
    let alpha_zero = at_zero.alpha(sys);
    let mut qs = grid.points();
    qs.sort_by(f64::total_cmp);
    let rows = qs
        .par_iter()
        .map(|&q| {
            let tilt = Tilt::new(sys, q)?;
            let alpha = tilt.alpha(sys);
            let f = alpha * q + tilt.tau;
            let f_bar = if sys.is_degenerate() || alpha > alpha_zero {
                at_zero.tau
            } else {
                f
            };
            Ok(SpectrumRow {
                q,
                tau: tilt.tau,
                alpha,
                f,
                f_bar,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumTable {
        rows,
        meta: SpectrumMeta {
            system_hash: sys.content_hash(),
            grid: grid.describe(),
            tol: DEFAULT_TOL,
        },
    })
}
