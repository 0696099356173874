//! Pointwise exponents of Bernoulli measures read off finite words.
//!
//! On the symbolic space balls are cylinders, so the local dimension at a
//! word is the limit of `log p_{w|n} / log r_{w|n}` and the pointwise
//! Assouad dimension is the limsup over `n` of the same ratio maximised over
//! all length-`n` subwords. Both are evaluated here on finite prefixes.

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ifs::{WeightedSystem, Word};
use crate::symbolic::blocks::BlockAlphabet;
use crate::table::{Cell, Tabular};

/// Cumulative `log p` and `log r` along a word, with a leading zero.
struct PrefixSums {
    log_p: Vec<f64>,
    log_r: Vec<f64>,
}

impl PrefixSums {
    fn new(sys: &WeightedSystem, word: &Word) -> Result<Self> {
        let m = sys.arity();
        let mut log_p = Vec::with_capacity(word.len() + 1);
        let mut log_r = Vec::with_capacity(word.len() + 1);
        let (mut sp, mut sr) = (0.0, 0.0);
        log_p.push(sp);
        log_r.push(sr);
        for s in word.symbols() {
            if s >= m {
                return Err(Error::SymbolOutOfRange {
                    symbol: s + 1,
                    arity: m,
                });
            }
            sp += sys.log_probs()[s];
            sr += sys.log_ratios()[s];
            log_p.push(sp);
            log_r.push(sr);
        }
        Ok(PrefixSums { log_p, log_r })
    }

    fn window_ratio(&self, start: usize, len: usize) -> f64 {
        (self.log_p[start + len] - self.log_p[start])
            / (self.log_r[start + len] - self.log_r[start])
    }
}

/// `log p_{w|n} / log r_{w|n}` at each requested depth `n`.
pub fn local_dim_prefixes(sys: &WeightedSystem, word: &Word, depths: &[usize]) -> Result<Vec<f64>> {
    let sums = PrefixSums::new(sys, word)?;
    depths
        .iter()
        .map(|&n| {
            if n == 0 {
                Err(Error::EmptyWord)
            } else if n > word.len() {
                Err(Error::PrefixTooShort {
                    requested: n,
                    available: word.len(),
                })
            } else {
                Ok(sums.window_ratio(0, n))
            }
        })
        .collect()
}

/// Sup of the window ratio for each window length, and the finite-length
/// stand-in for the limsup.
#[derive(Debug, Clone, PartialEq)]
pub struct AssouadEstimate {
    pub n_lo: usize,
    pub n_hi: usize,
    /// `per_n_sup[k]` belongs to window length `n_lo + k`.
    pub per_n_sup: Vec<f64>,
    /// Max of `per_n_sup` over the top quartile of window lengths.
    pub estimate: f64,
}

/// One `(n, sup)` row of an [`AssouadEstimate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowRow {
    pub n: usize,
    pub sup_ratio: f64,
}

impl Tabular for WindowRow {
    fn columns() -> &'static [&'static str] {
        &["n", "sup_ratio"]
    }

    fn cells(&self) -> Vec<Cell> {
        vec![self.n.into(), self.sup_ratio.into()]
    }
}

impl AssouadEstimate {
    pub fn rows(&self) -> Vec<WindowRow> {
        self.per_n_sup
            .iter()
            .enumerate()
            .map(|(k, &sup_ratio)| WindowRow {
                n: self.n_lo + k,
                sup_ratio,
            })
            .collect()
    }

    /// First window length of the top quartile.
    pub fn quartile_start(&self) -> usize {
        self.n_hi - (self.n_hi - self.n_lo) / 4
    }
}

/// Scans every window of every length in `[n_lo, n_hi]` of the given
/// prefix. Cost is `O(L)` per window length.
pub fn assouad_estimate(
    sys: &WeightedSystem,
    word: &Word,
    n_lo: usize,
    n_hi: usize,
) -> Result<AssouadEstimate> {
    if n_lo == 0 || n_lo > n_hi || n_hi > word.len() {
        return Err(Error::WindowRange(format!(
            "window range [{n_lo}, {n_hi}] is invalid for a prefix of length {}",
            word.len()
        )));
    }
    let sums = PrefixSums::new(sys, word)?;
    let len = word.len();
    let per_n_sup: Vec<f64> = (n_lo..=n_hi)
        .into_par_iter()
        .map(|n| {
            (0..=len - n)
                .map(|start| sums.window_ratio(start, n))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let mut out = AssouadEstimate {
        n_lo,
        n_hi,
        per_n_sup,
        estimate: f64::NEG_INFINITY,
    };
    let first = out.quartile_start() - n_lo;
    out.estimate = out.per_n_sup[first..]
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(out)
}

/// Greedy letter sequence whose prefix exponent oscillates around `alpha`.
///
/// Starts with the letter of maximal exponent; afterwards appends the
/// maximal letter while the running exponent is below `alpha` and the
/// minimal one otherwise (ties go to the minimal letter). When `alpha`
/// equals the maximal exponent the constant maximal sequence is returned.
fn greedy_letters(letters: &[(f64, f64)], alpha: f64, count: usize) -> Result<Vec<usize>> {
    if letters.is_empty() {
        return Err(Error::EmptyAlphabet);
    }
    let ratio = |(lp, lr): (f64, f64)| lp / lr;
    let mut a_max = 0;
    let mut a_min = 0;
    for (i, &l) in letters.iter().enumerate() {
        if ratio(l) > ratio(letters[a_max]) {
            a_max = i;
        }
        if ratio(l) < ratio(letters[a_min]) {
            a_min = i;
        }
    }
    let (lo, hi) = (ratio(letters[a_min]), ratio(letters[a_max]));
    let slack = 1e-12 * hi.abs().max(1.0);
    if !(alpha >= lo - slack && alpha <= hi + slack) {
        return Err(Error::Domain(format!(
            "alpha = {alpha} is outside [{lo}, {hi}]"
        )));
    }
    if alpha >= hi - slack {
        return Ok(vec![a_max; count]);
    }
    let mut out = Vec::with_capacity(count);
    let (mut sp, mut sr) = (0.0, 0.0);
    for k in 0..count {
        let next = if k == 0 || sp / sr < alpha {
            a_max
        } else {
            a_min
        };
        out.push(next);
        sp += letters[next].0;
        sr += letters[next].1;
    }
    Ok(out)
}

/// Greedy word over the full alphabet with pointwise Assouad dimension
/// `alpha`, truncated to `length` symbols.
pub fn greedy_word(sys: &WeightedSystem, alpha: f64, length: usize) -> Result<Word> {
    let letters: Vec<(f64, f64)> = sys
        .log_probs()
        .iter()
        .cloned()
        .zip(sys.log_ratios().iter().cloned())
        .collect();
    Ok(Word::from_symbols(greedy_letters(&letters, alpha, length)?))
}

/// Greedy word built from blocks of `alphabet`; returns `blocks` blocks.
pub fn greedy_block_word(alphabet: &BlockAlphabet, alpha: f64, blocks: usize) -> Result<Word> {
    let letters: Vec<(f64, f64)> = alphabet
        .classes()
        .iter()
        .map(|c| (c.log_p, c.log_r))
        .collect();
    let picks = greedy_letters(&letters, alpha, blocks)?;
    let mut out = Word::new();
    for k in picks {
        out.extend_from(&alphabet.representative(k));
    }
    Ok(out)
}

/// I.i.d. word with symbol law `probs`, reproducible under `seed`.
pub fn sample_word(probs: &[f64], length: usize, seed: u64) -> Result<Word> {
    let total: f64 = probs.iter().sum();
    if probs.iter().any(|&p| !(p >= 0.0)) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(
            "sampling vector is not a probability vector".to_string(),
        ));
    }
    let dist = WeightedIndex::new(probs)
        .map_err(|e| Error::Domain(format!("sampling vector rejected: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(Word::from_symbols(
        (0..length).map(|_| dist.sample(&mut rng)),
    ))
}
