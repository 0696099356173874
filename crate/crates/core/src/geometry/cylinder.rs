//! Cylinder intervals `phi_a([0, 1])` with rigorous error bounds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifs::{WeightedSystem, Word};

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    /// Distance between two intervals, zero when they meet.
    pub fn gap(&self, other: &Interval) -> f64 {
        (other.lo - self.hi).max(self.lo - other.hi).max(0.0)
    }
}

/// `s + e == a + b` exactly.
#[inline]
pub(crate) fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// `p + e == a * b` exactly (barring underflow).
#[inline]
pub(crate) fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

const ROUND_UP: f64 = 1.0 + 1.0 / (1u64 << 50) as f64;

/// True when every value in `a +- ea` is `>=` every value in `b +- eb`.
#[inline]
pub(crate) fn certainly_ge(a: f64, ea: f64, b: f64, eb: f64) -> bool {
    let (d, de) = two_sum(a, -b);
    let margin = (ea + eb + de.abs()) * ROUND_UP;
    if margin == 0.0 {
        d >= 0.0
    } else {
        d >= margin
    }
}

/// Left end, diameter and mass of a cylinder, with absolute error bounds
/// on the first two.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Node {
    pub lo: f64,
    pub lo_err: f64,
    pub r: f64,
    pub r_err: f64,
    pub p: f64,
    pub depth: usize,
}

impl Node {
    pub fn root() -> Self {
        Node {
            lo: 0.0,
            lo_err: 0.0,
            r: 1.0,
            r_err: 0.0,
            p: 1.0,
            depth: 0,
        }
    }

    pub fn child(&self, sys: &WeightedSystem, t: &[f64], i: usize) -> Node {
        let (shift, shift_err) = two_prod(self.r, t[i]);
        let (lo, sum_err) = two_sum(self.lo, shift);
        let (r, r_err) = two_prod(self.r, sys.ratios()[i]);
        Node {
            lo,
            lo_err: (self.lo_err + self.r_err * t[i] + shift_err.abs() + sum_err.abs()) * ROUND_UP,
            r,
            r_err: (self.r_err * sys.ratios()[i] + r_err.abs()) * ROUND_UP,
            p: self.p * sys.probs()[i],
            depth: self.depth + 1,
        }
    }

    /// Right end and its error bound.
    pub fn hi(&self) -> (f64, f64) {
        let (hi, e) = two_sum(self.lo, self.r);
        (hi, (self.lo_err + self.r_err + e.abs()) * ROUND_UP)
    }
}

/// Translations of a system with geometry.
pub(crate) fn translations(sys: &WeightedSystem) -> Result<&[f64]> {
    sys.translations().ok_or(Error::NoGeometry)
}

/// `phi_a([0, 1])`; its length is `r_a`.
pub fn cylinder_interval(sys: &WeightedSystem, word: &Word) -> Result<Interval> {
    let t = translations(sys)?;
    let mut node = Node::root();
    for s in word.symbols() {
        if s >= sys.arity() {
            return Err(Error::SymbolOutOfRange {
                symbol: s + 1,
                arity: sys.arity(),
            });
        }
        node = node.child(sys, t, s);
    }
    Ok(Interval {
        lo: node.lo,
        hi: node.hi().0,
    })
}

/// Half the distance from `phi_kappa([0, 1])` to the boundary of `(0, 1)`.
///
/// For `x` the left end of `phi_{a kappa}([0, 1])` the ball
/// `B(x, delta r_a)` then stays inside `phi_a((0, 1))`.
pub fn kappa_delta(sys: &WeightedSystem, kappa: &Word) -> Result<f64> {
    let hull = cylinder_interval(sys, kappa)?;
    let dist = hull.lo.min(1.0 - hull.hi);
    if !(dist > 0.0) {
        return Err(Error::Domain(format!(
            "cylinder {} touches the boundary of (0, 1)",
            kappa.render(sys.arity())
        )));
    }
    Ok(dist / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{s1, system};

    fn w(s: &str) -> Word {
        Word::parse(s, 2).unwrap()
    }

    #[test]
    fn cylinder_examples() {
        let sys = s1();
        assert_eq!(
            cylinder_interval(&sys, &w("1")).unwrap(),
            Interval { lo: 0.0, hi: 0.5 }
        );
        assert_eq!(
            cylinder_interval(&sys, &w("21")).unwrap(),
            Interval { lo: 0.5, hi: 0.75 }
        );
        assert_eq!(
            cylinder_interval(&sys, &w("12")).unwrap(),
            Interval { lo: 0.25, hi: 0.5 }
        );
        let bare = system(&[0.5, 0.5], &[0.5, 0.5]);
        assert_eq!(cylinder_interval(&bare, &w("1")), Err(Error::NoGeometry));
    }

    #[test]
    fn cylinders_nest_and_have_length_r() {
        let sys = s1();
        let word = w("2121122211");
        let mut outer = Interval { lo: 0.0, hi: 1.0 };
        for k in 1..=word.len() {
            let inner = cylinder_interval(&sys, &word.prefix(k)).unwrap();
            assert!(inner.lo >= outer.lo && inner.hi <= outer.hi);
            assert_eq!(inner.len(), 0.5f64.powi(k as i32));
            outer = inner;
        }
    }

    #[test]
    fn error_bounds_cover_exact_thirds() {
        let thirds = crate::validate_system(
            &crate::SystemSpec::new(vec![0.5, 0.5], vec![1.0 / 3.0, 1.0 / 3.0])
                .with_translations(vec![0.0, 2.0 / 3.0]),
        )
        .unwrap();
        let t = thirds.translations().unwrap().to_vec();
        let mut node = Node::root();
        // Symbol 2 repeated converges to 1 from below: lo = 1 - 3^-k. The
        // stored 1/3 and 2/3 are off by at most 2^-54 each, which moves lo
        // by less than 4e-16 in total.
        for k in 1..=20 {
            node = node.child(&thirds, &t, 1);
            let exact = 1.0 - 3f64.powi(-k);
            assert!((node.lo - exact).abs() <= node.lo_err + 4e-16);
        }
    }

    #[test]
    fn comparisons_are_exact_without_error() {
        assert!(certainly_ge(0.5, 0.0, 0.5, 0.0));
        assert!(!certainly_ge(0.5, 1e-20, 0.5, 0.0));
        assert!(certainly_ge(0.5 + 1e-15, 1e-17, 0.5, 1e-17));
    }

    #[test]
    fn delta_for_kappa() {
        let sys = s1();
        assert_eq!(kappa_delta(&sys, &w("12")).unwrap(), 0.125);
        assert!(kappa_delta(&sys, &w("11")).is_err());
    }
}
