//! Geometry of one-dimensional systems `x -> r_i x + t_i` satisfying the
//! open set condition with `U = (0, 1)`.

pub mod ball;
pub mod cylinder;
pub mod scan;
pub mod witness;

pub use ball::{ball_measure, osc_multiplicity, MeasureBounds};
pub use cylinder::{cylinder_interval, kappa_delta, Interval};
pub use scan::{assouad_scan, doubling_scan, AssouadScan, DoublingScan, ScaleRow, ScanOptions};
pub use witness::{non_doubling_witness, WitnessOutcome, WitnessPair};

use crate::error::{Error, Result};

/// Radii `base^(-k)` for `k = k0..=k1`, largest first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleGrid {
    pub base: f64,
    pub k0: i32,
    pub k1: i32,
}

impl Default for ScaleGrid {
    fn default() -> Self {
        ScaleGrid::dyadic(0, 40)
    }
}

impl ScaleGrid {
    pub fn dyadic(k0: i32, k1: i32) -> Self {
        ScaleGrid { base: 2.0, k0, k1 }
    }

    /// Parses `"base^(-k), k=k0..k1"`; whitespace is ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || {
            Error::Parse(format!(
                "scale grid {text:?} is not of the form base^(-k), k=k0..k1"
            ))
        };
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let (head, range) = compact.split_once(",k=").ok_or_else(bad)?;
        let base: f64 = head
            .strip_suffix("^(-k)")
            .ok_or_else(bad)?
            .parse()
            .map_err(|_| bad())?;
        let (k0, k1) = range.split_once("..").ok_or_else(bad)?;
        let grid = ScaleGrid {
            base,
            k0: k0.parse().map_err(|_| bad())?,
            k1: k1.parse().map_err(|_| bad())?,
        };
        if !(base > 1.0) || grid.k0 < 0 || grid.k0 > grid.k1 {
            return Err(Error::Parse(format!(
                "scale grid {text:?} needs base > 1 and 0 <= k0 <= k1"
            )));
        }
        Ok(grid)
    }

    pub fn points(&self) -> Vec<f64> {
        (self.k0..=self.k1).map(|k| self.base.powi(-k)).collect()
    }

    pub fn describe(&self) -> String {
        format!("{}^(-k), k={}..{}", self.base, self.k0, self.k1)
    }
}
