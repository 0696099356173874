//! Block alphabets `Gamma_n(alpha)`, their subshift dimension and the
//! abundance checks, all at type-class granularity.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ifs::{WeightedSystem, Word};
use crate::roots::{bisect_decreasing, bracket_decreasing, log_sum_exp};
use crate::symbolic::types::{composition_count, log_multinomial, Compositions, TypeVector};

/// Cap on the number of blocks or type classes held in memory.
pub const ENUMERATION_CAP: f64 = 1e7;

/// Which words of length `n` make up the base block set `Gamma_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlockBase {
    /// Every word of length `n`.
    Full,
    /// Words `i k` with `i` free of length `n - |k|` and the fixed suffix `k`.
    KappaAppended(Word),
}

impl BlockBase {
    fn suffix(&self) -> Option<&Word> {
        match self {
            BlockBase::Full => None,
            BlockBase::KappaAppended(k) => Some(k),
        }
    }

    fn suffix_len(&self) -> usize {
        self.suffix().map_or(0, Word::len)
    }
}

/// All blocks of one type: same symbol counts, hence same `p_a` and `r_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockClass {
    /// Symbol counts of the whole block.
    pub counts: Vec<u64>,
    /// Symbol counts of the free part.
    pub free_counts: Vec<u64>,
    /// `log` of the number of blocks in the class.
    pub log_count: f64,
    pub log_p: f64,
    pub log_r: f64,
}

impl BlockClass {
    /// `log p_a / log r_a` for any block `a` of the class.
    pub fn exponent(&self) -> f64 {
        self.log_p / self.log_r
    }

    pub fn type_vector(&self) -> TypeVector {
        TypeVector::from_counts(self.counts.clone()).expect("blocks are nonempty")
    }
}

/// A finite set of equal-length blocks, stored as a list of type classes.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockAlphabet {
    arity: usize,
    n: usize,
    base: BlockBase,
    classes: Vec<BlockClass>,
}

impl BlockAlphabet {
    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Block length.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn base(&self) -> &BlockBase {
        &self.base
    }

    pub fn classes(&self) -> &[BlockClass] {
        &self.classes
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// `log #Gamma`.
    pub fn log_block_count(&self) -> f64 {
        log_sum_exp(self.classes.iter().map(|c| c.log_count))
    }

    pub fn block_count(&self) -> f64 {
        self.classes.iter().map(|c| c.log_count.exp().round()).sum()
    }

    /// `(alpha_min(Gamma), alpha_max(Gamma))`, `None` when empty.
    pub fn alpha_range(&self) -> Option<(f64, f64)> {
        let mut it = self.classes.iter().map(BlockClass::exponent);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), e| (lo.min(e), hi.max(e))))
    }

    /// Subset of blocks with exponent at most `alpha`.
    pub fn filter(&self, alpha: f64) -> BlockAlphabet {
        let slack = 1e-12 * alpha.abs().max(1.0);
        BlockAlphabet {
            classes: self
                .classes
                .iter()
                .filter(|c| c.exponent() <= alpha + slack)
                .cloned()
                .collect(),
            ..self.clone()
        }
    }

    /// One block of class `k`: free symbols in increasing order, then the
    /// suffix.
    pub fn representative(&self, k: usize) -> Word {
        let class = &self.classes[k];
        let mut w = Word::from_symbols(
            class
                .free_counts
                .iter()
                .enumerate()
                .flat_map(|(s, &c)| std::iter::repeat_n(s, c as usize)),
        );
        if let Some(suffix) = self.base.suffix() {
            w.extend_from(suffix);
        }
        w
    }

    /// Every block, free parts in lexicographic order.
    pub fn blocks(&self) -> Result<Vec<Word>> {
        let free_len = self.n - self.base.suffix_len();
        let total = (self.arity as f64).powi(free_len as i32);
        if total > ENUMERATION_CAP {
            return Err(Error::SizeCap {
                what: "block enumeration",
                size: total,
                cap: ENUMERATION_CAP,
            });
        }
        let kept: std::collections::HashSet<&[u64]> = self
            .classes
            .iter()
            .map(|c| c.free_counts.as_slice())
            .collect();
        let m = self.arity;
        let mut out = Vec::new();
        let mut counts = vec![0u64; m];
        for code in 0..total as u64 {
            let mut digits = vec![0usize; free_len];
            let mut c = code;
            for d in digits.iter_mut().rev() {
                *d = (c % m as u64) as usize;
                c /= m as u64;
            }
            counts.iter_mut().for_each(|k| *k = 0);
            for &d in &digits {
                counts[d] += 1;
            }
            if kept.contains(counts.as_slice()) {
                let mut w = Word::from_symbols(digits);
                if let Some(suffix) = self.base.suffix() {
                    w.extend_from(suffix);
                }
                out.push(w);
            }
        }
        Ok(out)
    }
}

/// The base block set `Gamma_n` as type classes.
pub fn base_alphabet(sys: &WeightedSystem, n: usize, base: BlockBase) -> Result<BlockAlphabet> {
    let m = sys.arity();
    let suffix_counts = match base.suffix() {
        Some(k) => {
            if k.len() >= n {
                return Err(Error::NeedLargerN {
                    n,
                    reason: format!("suffix of length {} leaves no free symbols", k.len()),
                });
            }
            let mut c = vec![0u64; m];
            for s in k.symbols() {
                if s >= m {
                    return Err(Error::SymbolOutOfRange {
                        symbol: s + 1,
                        arity: m,
                    });
                }
                c[s] += 1;
            }
            c
        }
        None => vec![0u64; m],
    };
    if n == 0 {
        return Err(Error::EmptyWord);
    }
    let free_len = (n - base.suffix_len()) as u64;
    let classes_needed = composition_count(free_len, m);
    if classes_needed > ENUMERATION_CAP {
        return Err(Error::SizeCap {
            what: "type classes",
            size: classes_needed,
            cap: ENUMERATION_CAP,
        });
    }
    let classes = Compositions::new(free_len, m)
        .map(|free_counts| {
            let counts: Vec<u64> = free_counts
                .iter()
                .zip(&suffix_counts)
                .map(|(a, b)| a + b)
                .collect();
            let dot = |logs: &[f64]| -> f64 {
                counts.iter().zip(logs).map(|(&k, &l)| k as f64 * l).sum()
            };
            BlockClass {
                log_count: log_multinomial(free_len, &free_counts),
                log_p: dot(sys.log_probs()),
                log_r: dot(sys.log_ratios()),
                counts,
                free_counts,
            }
        })
        .collect();
    Ok(BlockAlphabet {
        arity: m,
        n,
        base,
        classes,
    })
}

/// `Gamma_n(alpha)`: blocks of the base set whose type has
/// `H_p / lambda <= alpha`.
pub fn gamma_n_alpha(
    sys: &WeightedSystem,
    n: usize,
    alpha: f64,
    base: BlockBase,
) -> Result<BlockAlphabet> {
    Ok(base_alphabet(sys, n, base)?.filter(alpha))
}

/// Similarity dimension of the full shift on `gamma`: the root `s` of
/// `sum_a r_a^s = 1`.
///
/// `tol` bounds the bracket width in `s`; zero bisects to exhaustion.
pub fn subshift_dimension(gamma: &BlockAlphabet, tol: f64) -> Result<f64> {
    if gamma.is_empty() {
        return Err(Error::EmptyAlphabet);
    }
    let g = |s: f64| log_sum_exp(gamma.classes.iter().map(|c| c.log_count + s * c.log_r));
    let (lo, hi) = bracket_decreasing(g)?;
    Ok(bisect_decreasing(g, lo, hi, tol))
}

/// Finite-`n` abundance figures for a suffix-appended base set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbundanceReport {
    /// `min_q #T_{Gamma_n}(q) / #T_n(q)` over realised types.
    pub a1_ratio_min: f64,
    /// Whether the realised types are `delta`-dense in the simplex (sup norm).
    pub a2_delta_dense: bool,
}

/// Computes both abundance figures for `Gamma_n = {i kappa}` without
/// enumerating words.
///
/// Density is certified through a net of denominator `N = ceil(4 / delta)`:
/// every simplex point is within `1/N <= delta/4` of a net point, so it is
/// enough that each net point lies within `3 delta / 4` of a realised type.
/// A `false` answer means that test failed.
pub fn abundance_report(
    sys: &WeightedSystem,
    n: usize,
    delta: f64,
    kappa: &Word,
) -> Result<AbundanceReport> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Domain(format!("delta = {delta} is outside (0, 1]")));
    }
    let base = if kappa.is_empty() {
        BlockBase::Full
    } else {
        BlockBase::KappaAppended(kappa.clone())
    };
    let alphabet = base_alphabet(sys, n, base)?;
    let a1_ratio_min = alphabet
        .classes
        .iter()
        .map(|c| (c.log_count - log_multinomial(n as u64, &c.counts)).exp())
        .fold(f64::INFINITY, f64::min);

    let m = sys.arity();
    let net_den = (4.0 / delta).ceil();
    if composition_count(net_den as u64, m) > ENUMERATION_CAP {
        return Err(Error::SizeCap {
            what: "density net",
            size: composition_count(net_den as u64, m),
            cap: ENUMERATION_CAP,
        });
    }
    let mut suffix_counts = vec![0i64; m];
    for s in kappa.symbols() {
        suffix_counts[s] += 1;
    }
    let free_len = (n - kappa.len()) as i64;
    let reach = 0.75 * delta;
    let nf = n as f64;
    let slack = 1e-9;
    let a2_delta_dense = Compositions::new(net_den as u64, m).all(|point| {
        // Feasible free counts per coordinate, then the sum constraint.
        let (mut sum_lo, mut sum_hi) = (0i64, 0i64);
        for (i, &k) in point.iter().enumerate() {
            let y = k as f64 / net_den;
            let lo = (((y - reach) * nf - slack).ceil() as i64 - suffix_counts[i]).max(0);
            let hi = (((y + reach) * nf + slack).floor() as i64 - suffix_counts[i]).min(free_len);
            if lo > hi {
                return false;
            }
            sum_lo += lo;
            sum_hi += hi;
        }
        sum_lo <= free_len && free_len <= sum_hi
    });
    Ok(AbundanceReport {
        a1_ratio_min,
        a2_delta_dense,
    })
}
