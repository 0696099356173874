//! Moran sets `Omega_eps(alpha)`: stage `k` contributes `M_k` free blocks
//! from `Gamma_n(alpha)` followed by the first `k` blocks of a spine word
//! whose pointwise Assouad dimension is `alpha`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifs::{WeightedSystem, Word};
use crate::roots::{bisect_decreasing, bracket_decreasing, log_sum_exp};
use crate::spectrum::f_bar;
use crate::symbolic::blocks::{base_alphabet, subshift_dimension, BlockAlphabet, BlockBase};
use crate::symbolic::estimator::greedy_block_word;

/// Upper limit of the linear scan for each `M_k`.
pub const M_CAP: u64 = 1_000_000;

/// Longest spine prefix written into the summary.
const SPINE_PREVIEW: usize = 256;

#[derive(Debug, Clone)]
pub struct MoranSpec {
    arity: usize,
    n: usize,
    alpha: f64,
    epsilon: f64,
    s: f64,
    blocks: BlockAlphabet,
    subshift_dim: f64,
    spine: Word,
    /// `log r` of the first `k` spine blocks, for `k = 1..=K`.
    spine_log_r: Vec<f64>,
    m: Vec<u64>,
}

/// Serialisable view of a [`MoranSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoranSummary {
    pub n: usize,
    pub alpha: f64,
    pub epsilon: f64,
    pub s: f64,
    #[serde(rename = "M")]
    pub m: Vec<u64>,
    pub spine: String,
    pub block_count: f64,
    pub subshift_dimension: f64,
    pub growth_constant: f64,
}

impl MoranSpec {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Target dimension `f_bar(alpha) - eps`.
    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn blocks(&self) -> &BlockAlphabet {
        &self.blocks
    }

    pub fn subshift_dimension(&self) -> f64 {
        self.subshift_dim
    }

    pub fn spine(&self) -> &Word {
        &self.spine
    }

    /// `M_1, ..., M_K`.
    pub fn m(&self) -> &[u64] {
        &self.m
    }

    pub fn stages(&self) -> usize {
        self.m.len()
    }

    /// `max_k M_k / k`.
    pub fn growth_constant(&self) -> f64 {
        self.m
            .iter()
            .enumerate()
            .map(|(k, &mk)| mk as f64 / (k + 1) as f64)
            .fold(0.0, f64::max)
    }

    pub fn summary(&self) -> MoranSummary {
        MoranSummary {
            n: self.n,
            alpha: self.alpha,
            epsilon: self.epsilon,
            s: self.s,
            m: self.m.clone(),
            spine: self
                .spine
                .prefix(self.spine.len().min(SPINE_PREVIEW))
                .render(self.arity),
            block_count: self.blocks.block_count(),
            subshift_dimension: self.subshift_dim,
            growth_constant: self.growth_constant(),
        }
    }

    /// `log sum_{a in Gamma} r_a^t`.
    fn log_pressure(&self, t: f64) -> f64 {
        log_sum_exp(
            self.blocks
                .classes()
                .iter()
                .map(|c| c.log_count + t * c.log_r),
        )
    }
}

/// Builds the first `stages` stages of `Omega_eps(alpha)` from blocks of
/// length `n`.
pub fn moran_construct(
    sys: &WeightedSystem,
    alpha: f64,
    epsilon: f64,
    n: usize,
    stages: usize,
    base: BlockBase,
) -> Result<MoranSpec> {
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!(
            "epsilon = {epsilon} must be positive"
        )));
    }
    let target = f_bar(sys, alpha)?;
    let s = target - epsilon;

    let all_blocks = base_alphabet(sys, n, base)?;
    let (lo, hi) = all_blocks.alpha_range().ok_or(Error::EmptyAlphabet)?;
    let slack = 1e-12 * hi.abs().max(1.0);
    if !(alpha > lo + slack && alpha < hi - slack) {
        return Err(Error::NeedLargerN {
            n,
            reason: format!("alpha = {alpha} is not inside ({lo}, {hi}) at this block length"),
        });
    }
    let blocks = all_blocks.filter(alpha);
    let dim = if blocks.is_empty() {
        0.0
    } else {
        subshift_dimension(&blocks, 0.0)?
    };
    if !(dim > target - epsilon / 2.0) {
        return Err(Error::NeedLargerN {
            n,
            reason: format!(
                "subshift dimension {dim} does not exceed f_bar(alpha) - eps/2 = {}",
                target - epsilon / 2.0
            ),
        });
    }

    let spine = greedy_block_word(&all_blocks, alpha, stages)?;
    let mut spine_log_r = Vec::with_capacity(stages);
    let mut acc = 0.0;
    for k in 0..stages {
        let block = Word::from_symbols(spine.symbols().skip(k * n).take(n));
        acc += block.symbols().map(|a| sys.log_ratios()[a]).sum::<f64>();
        spine_log_r.push(acc);
    }

    let mut spec = MoranSpec {
        arity: sys.arity(),
        n,
        alpha,
        epsilon,
        s,
        blocks,
        subshift_dim: dim,
        spine,
        spine_log_r,
        m: Vec::with_capacity(stages),
    };
    let pressure = spec.log_pressure(s);
    for k in 0..stages {
        let spine_term = s * spec.spine_log_r[k];
        let mk = (1..=M_CAP)
            .find(|&mk| mk as f64 * pressure + spine_term > 0.0)
            .ok_or(Error::SizeCap {
                what: "Moran stage multiplicity",
                size: M_CAP as f64 + 1.0,
                cap: M_CAP as f64,
            })?;
        spec.m.push(mk);
    }
    Ok(spec)
}

/// Similarity dimension `s_k` of the first `k` stages: the root of
/// `sum_{j<=k} (M_j log sum_a r_a^t + t log r_{spine, j}) = 0`.
pub fn moran_dimension(spec: &MoranSpec, k: usize, tol: f64) -> Result<f64> {
    if k == 0 || k > spec.stages() {
        return Err(Error::Domain(format!(
            "stage {k} is outside 1..={}",
            spec.stages()
        )));
    }
    let total_m: f64 = spec.m[..k].iter().map(|&mk| mk as f64).sum();
    let spine_sum: f64 = spec.spine_log_r[..k].iter().sum();
    let g = |t: f64| total_m * spec.log_pressure(t) + t * spine_sum;
    let (lo, hi) = bracket_decreasing(g)?;
    Ok(bisect_decreasing(g, lo, hi, tol))
}
