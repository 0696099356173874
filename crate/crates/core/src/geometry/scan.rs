//! Doubling and pointwise Assouad scans over a grid of radii.
//!
//! Every reported ratio uses the conservative cross-quotients of the two
//! enclosures, so `ratio_lower` and the Assouad value are certified lower
//! bounds.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::geometry::ball::{ball_measure, MeasureBounds};
use crate::geometry::ScaleGrid;
use crate::ifs::WeightedSystem;
use crate::table::{Cell, Tabular};

/// Resolution of the enclosures used by the scans.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanOptions {
    /// Cylinders below `rel_tol * r` are left undecided.
    pub rel_tol: f64,
    pub depth_cap: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            rel_tol: 1e-8,
            depth_cap: 96,
        }
    }
}

impl ScanOptions {
    fn bounds(&self, sys: &WeightedSystem, x: f64, r: f64) -> Result<MeasureBounds> {
        ball_measure(sys, x, r, r * self.rel_tol, self.depth_cap)
    }
}

/// One radius of a doubling scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaleRow {
    pub r: f64,
    /// Bounds on `mu(B(x, r))`.
    pub lower: f64,
    pub upper: f64,
    /// Bounds on `mu(B(x, gamma r)) / mu(B(x, r))`.
    pub ratio_lower: f64,
    pub ratio_upper: f64,
}

impl Tabular for ScaleRow {
    fn columns() -> &'static [&'static str] {
        &["r", "lower", "upper", "ratio_lower", "ratio_upper"]
    }

    fn cells(&self) -> Vec<Cell> {
        vec![
            self.r.into(),
            self.lower.into(),
            self.upper.into(),
            self.ratio_lower.into(),
            self.ratio_upper.into(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoublingScan {
    /// Certified lower bound for the supremum of the ratio over the grid.
    pub max_ratio_lower: f64,
    pub per_scale: Vec<ScaleRow>,
}

fn quotient(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num > 0.0 {
        f64::INFINITY
    } else {
        f64::NAN
    }
}

pub fn doubling_scan(
    sys: &WeightedSystem,
    x: f64,
    gamma: f64,
    scales: &ScaleGrid,
    opts: ScanOptions,
) -> Result<DoublingScan> {
    if !(gamma > 1.0) {
        return Err(crate::Error::Domain(format!(
            "gamma = {gamma} must exceed 1"
        )));
    }
    let per_scale = scales
        .points()
        .into_par_iter()
        .map(|r| {
            let small = opts.bounds(sys, x, r)?;
            let big = opts.bounds(sys, x, gamma * r)?;
            Ok(ScaleRow {
                r,
                lower: small.lower,
                upper: small.upper,
                ratio_lower: quotient(big.lower, small.upper),
                ratio_upper: quotient(big.upper, small.lower),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_ratio_lower = per_scale
        .iter()
        .map(|row| row.ratio_lower)
        .filter(|v| !v.is_nan())
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(DoublingScan {
        max_ratio_lower,
        per_scale,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssouadScan {
    /// Largest certified `log(mu(B(x, R)) / mu(B(x, r))) / log(R / r)`.
    pub lower_bound: f64,
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub pairs_used: usize,
}

/// Certified lower bound for the pointwise Assouad dimension at `x` from
/// pairs `r < R` of grid radii, taken in order of decreasing `R / r` up to
/// `pair_budget` pairs.
pub fn assouad_scan(
    sys: &WeightedSystem,
    x: f64,
    scales: &ScaleGrid,
    pair_budget: usize,
    opts: ScanOptions,
) -> Result<AssouadScan> {
    let radii = scales.points();
    let bounds = radii
        .par_iter()
        .map(|&r| opts.bounds(sys, x, r))
        .collect::<Result<Vec<_>>>()?;
    let mut pairs: Vec<(usize, usize)> = (0..radii.len())
        .flat_map(|a| (0..radii.len()).map(move |b| (a, b)))
        .filter(|&(big, small)| radii[big] > radii[small])
        .collect();
    pairs.sort_by(|&(a, b), &(c, d)| {
        let span_ab = radii[a] / radii[b];
        let span_cd = radii[c] / radii[d];
        span_cd.total_cmp(&span_ab).then((a, b).cmp(&(c, d)))
    });
    pairs.truncate(pair_budget);
    let mut out = AssouadScan {
        lower_bound: f64::NEG_INFINITY,
        r: f64::NAN,
        big_r: f64::NAN,
        pairs_used: pairs.len(),
    };
    for (big, small) in pairs {
        let (num, den) = (bounds[big].lower, bounds[small].upper);
        if !(num > 0.0 && den > 0.0) {
            continue;
        }
        let value = (num / den).ln() / (radii[big] / radii[small]).ln();
        if value > out.lower_bound {
            out.lower_bound = value;
            out.r = radii[small];
            out.big_r = radii[big];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{s1, uniform};

    const A_MAX: f64 = 1.584962500721156;
    const A_MIN: f64 = 0.5849625007211562;

    #[test]
    fn doubling_at_origin_is_three() {
        let scan = doubling_scan(
            &s1(),
            0.0,
            2.0,
            &ScaleGrid::dyadic(1, 30),
            ScanOptions::default(),
        )
        .unwrap();
        for row in &scan.per_scale {
            assert!((row.ratio_lower - 3.0).abs() < 1e-12);
            assert!((row.ratio_upper - 3.0).abs() < 1e-12);
        }
        assert!((scan.max_ratio_lower - 3.0).abs() < 1e-12);
    }

    #[test]
    fn lebesgue_doubles_by_at_most_two() {
        for x in [0.1, 0.37, 0.5, 0.81] {
            let scan = doubling_scan(
                &uniform(),
                x,
                2.0,
                &ScaleGrid::dyadic(2, 30),
                ScanOptions::default(),
            )
            .unwrap();
            assert!(
                scan.max_ratio_lower <= 2.0 + 1e-9,
                "{x}: {}",
                scan.max_ratio_lower
            );
        }
    }

    #[test]
    fn assouad_at_origin_and_dyadics() {
        let sys = s1();
        let grid = ScaleGrid::dyadic(4, 24);
        let at0 = assouad_scan(&sys, 0.0, &grid, 10, ScanOptions::default()).unwrap();
        assert!((at0.lower_bound - A_MAX).abs() < 0.02);
        for x in [0.25, 0.75] {
            let v = assouad_scan(&sys, x, &grid, 10, ScanOptions::default()).unwrap();
            assert!(v.lower_bound <= A_MIN + 0.05, "{x}: {v:?}");
        }
    }

    #[test]
    fn pair_budget_orders_by_span() {
        let sys = s1();
        let grid = ScaleGrid::dyadic(4, 24);
        let one = assouad_scan(&sys, 0.75, &grid, 1, ScanOptions::default()).unwrap();
        assert_eq!((one.big_r, one.r), (0.5f64.powi(4), 0.5f64.powi(24)));
        let many = assouad_scan(&sys, 0.75, &grid, 50, ScanOptions::default()).unwrap();
        assert!(many.lower_bound >= one.lower_bound);
    }
}
