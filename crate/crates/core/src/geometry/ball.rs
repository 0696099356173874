//! Enclosures of `mu(B(x, r))` by recursion over the cylinder tree.
//!
//! A cylinder whose hull lies in the closed ball contributes its full mass,
//! a hull outside the open ball contributes nothing, and everything else is
//! split. Hulls of distinct cylinders share at most endpoints and `mu` has
//! no atoms, so touching at a single point is counted as contained or
//! disjoint. Cylinders still undecided at `tol` or `depth_cap` only raise
//! the upper bound.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::cylinder::{certainly_ge, translations, two_sum, Node};
use crate::ifs::WeightedSystem;

/// Maximum number of cylinder nodes visited by one query.
pub const NODE_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureBounds {
    pub lower: f64,
    pub upper: f64,
    pub depth_used: usize,
    /// Total mass of cylinders left undecided.
    pub straddle_mass: f64,
}

impl MeasureBounds {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, other: &MeasureBounds) -> bool {
        self.lower <= other.lower && other.upper <= self.upper
    }
}

/// Ball ends `x - r`, `x + r` with the rounding error of each.
#[derive(Debug, Clone, Copy)]
struct Ball {
    lo: f64,
    lo_err: f64,
    hi: f64,
    hi_err: f64,
}

impl Ball {
    fn new(x: f64, r: f64) -> Self {
        let (lo, le) = two_sum(x, -r);
        let (hi, he) = two_sum(x, r);
        Ball {
            lo,
            lo_err: le.abs(),
            hi,
            hi_err: he.abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Relation {
    Inside,
    Outside,
    Straddles,
}

fn relate(node: &Node, ball: &Ball) -> Relation {
    let (hi, hi_err) = node.hi();
    if certainly_ge(ball.lo, ball.lo_err, hi, hi_err)
        || certainly_ge(node.lo, node.lo_err, ball.hi, ball.hi_err)
    {
        Relation::Outside
    } else if certainly_ge(node.lo, node.lo_err, ball.lo, ball.lo_err)
        && certainly_ge(ball.hi, ball.hi_err, hi, hi_err)
    {
        Relation::Inside
    } else {
        Relation::Straddles
    }
}

/// Certified bounds on `mu(B(x, r))`.
pub fn ball_measure(
    sys: &WeightedSystem,
    x: f64,
    r: f64,
    tol: f64,
    depth_cap: usize,
) -> Result<MeasureBounds> {
    let t = translations(sys)?;
    if !(0.0..=1.0).contains(&x) || !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!(
            "ball B({x}, {r}) needs x in [0, 1] and r > 0"
        )));
    }
    let ball = Ball::new(x, r);
    let mut out = MeasureBounds {
        lower: 0.0,
        upper: 0.0,
        depth_used: 0,
        straddle_mass: 0.0,
    };
    let mut visited = 0u64;
    let mut stack = vec![Node::root()];
    while let Some(node) = stack.pop() {
        visited += 1;
        if visited > NODE_BUDGET {
            return Err(Error::Budget {
                budget: NODE_BUDGET,
            });
        }
        out.depth_used = out.depth_used.max(node.depth);
        match relate(&node, &ball) {
            Relation::Outside => {}
            Relation::Inside => {
                out.lower += node.p;
                out.upper += node.p;
            }
            Relation::Straddles => {
                if node.r < tol || node.depth >= depth_cap {
                    out.upper += node.p;
                    out.straddle_mass += node.p;
                } else {
                    stack.extend((0..sys.arity()).map(|i| node.child(sys, t, i)));
                }
            }
        }
    }
    out.upper = out.upper.min(1.0);
    Ok(out)
}

/// Largest number of words `a` with `r_a <= r < r_{a-}` whose hull meets
/// the open ball `B(x, r)`, over all `x` in `points` and `r` in `scales`.
///
/// An observed lower bound for the multiplicity constant of the system.
pub fn osc_multiplicity(sys: &WeightedSystem, points: &[f64], scales: &[f64]) -> Result<usize> {
    let t = translations(sys)?;
    let mut best = 0;
    for &x in points {
        for &r in scales {
            if !(r > 0.0 && r < 1.0) {
                continue;
            }
            let ball = Ball::new(x, r);
            let mut count = 0;
            let mut stack = vec![Node::root()];
            while let Some(node) = stack.pop() {
                // Meeting the open ball: hull not certainly outside it.
                if relate(&node, &ball) == Relation::Outside {
                    continue;
                }
                if node.r <= r {
                    count += 1;
                } else {
                    stack.extend((0..sys.arity()).map(|i| node.child(sys, t, i)));
                }
            }
            best = best.max(count);
        }
    }
    Ok(best)
}
