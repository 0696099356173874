//! Weighted iterated function systems and finite words over their alphabet.
//!
//! A [`WeightedSystem`] carries the probability vector `p` and the
//! contraction ratios `r` of a self-similar IFS, plus optional 1D
//! translations `t` (the maps are `x -> r_i x + t_i`). Every formula in the
//! crate consumes the `(p, r)` pair; the translations are only needed by the
//! geometry module.

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Tolerance on `|sum p_i - 1|`. Weights are never renormalized.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Slack allowed when checking interval containment and disjointness.
const GEOMETRY_TOL: f64 = 1e-12;

/// Raw system description, as read from a JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub probs: Vec<f64>,
    pub ratios: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translations: Option<Vec<f64>>,
}

impl SystemSpec {
    pub fn new(probs: Vec<f64>, ratios: Vec<f64>) -> Self {
        SystemSpec {
            probs,
            ratios,
            translations: None,
        }
    }

    pub fn with_translations(mut self, translations: Vec<f64>) -> Self {
        self.translations = Some(translations);
        self
    }
}

/// A validated weighted IFS.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSystem {
    probs: Vec<f64>,
    ratios: Vec<f64>,
    translations: Option<Vec<f64>>,
    log_probs: Vec<f64>,
    log_ratios: Vec<f64>,
    degenerate: bool,
}

/// Checks every constraint on a raw description and returns the validated
/// system with its degenerate flag set.
pub fn validate_system(raw: &SystemSpec) -> Result<WeightedSystem> {
    let m = raw.probs.len();
    if m < 2 {
        return Err(Error::Arity(format!("need at least 2 maps, got {m}")));
    }
    if raw.ratios.len() != m {
        return Err(Error::Arity(format!(
            "{m} probabilities but {} ratios",
            raw.ratios.len()
        )));
    }
    if let Some(t) = &raw.translations {
        if t.len() != m {
            return Err(Error::Arity(format!(
                "{m} probabilities but {} translations",
                t.len()
            )));
        }
    }
    if m > u16::MAX as usize {
        return Err(Error::Arity(format!("alphabet of size {m} is too large")));
    }
    for (index, &value) in raw.probs.iter().enumerate() {
        if !(value > 0.0 && value < 1.0) {
            return Err(Error::Range {
                what: "probs",
                index,
                value,
            });
        }
    }
    for (index, &value) in raw.ratios.iter().enumerate() {
        if !(value > 0.0 && value < 1.0) {
            return Err(Error::Range {
                what: "ratios",
                index,
                value,
            });
        }
    }
    let sum: f64 = raw.probs.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::WeightSum {
            sum,
            tol: WEIGHT_SUM_TOL,
        });
    }
    if let Some(t) = &raw.translations {
        check_open_set_condition(t, &raw.ratios)?;
    }

    let log_probs: Vec<f64> = raw.probs.iter().map(|p| p.ln()).collect();
    let log_ratios: Vec<f64> = raw.ratios.iter().map(|r| r.ln()).collect();
    let exponents: Vec<f64> = log_probs
        .iter()
        .zip(&log_ratios)
        .map(|(lp, lr)| lp / lr)
        .collect();
    let lo = exponents.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = exponents.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let degenerate = hi - lo <= 1e-12 * hi.abs().max(1.0);

    Ok(WeightedSystem {
        probs: raw.probs.clone(),
        ratios: raw.ratios.clone(),
        translations: raw.translations.clone(),
        log_probs,
        log_ratios,
        degenerate,
    })
}

/// Each `[t_i, t_i + r_i]` must sit in `[0, 1]` and the open intervals must
/// be pairwise disjoint; touching endpoints are allowed.
fn check_open_set_condition(translations: &[f64], ratios: &[f64]) -> Result<()> {
    for (i, (&t, &r)) in translations.iter().zip(ratios).enumerate() {
        if !t.is_finite() || t < -GEOMETRY_TOL || t + r > 1.0 + GEOMETRY_TOL {
            return Err(Error::Overlap {
                first: i,
                second: i,
            });
        }
    }
    let mut order: Vec<usize> = (0..translations.len()).collect();
    order.sort_by(|&a, &b| translations[a].total_cmp(&translations[b]));
    for pair in order.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if translations[a] + ratios[a] > translations[b] + GEOMETRY_TOL {
            return Err(Error::Overlap {
                first: a.min(b),
                second: a.max(b),
            });
        }
    }
    Ok(())
}

impl WeightedSystem {
    pub fn from_spec(raw: &SystemSpec) -> Result<Self> {
        validate_system(raw)
    }

    /// Parses and validates a system JSON document.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: SystemSpec =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        validate_system(&raw)
    }

    pub fn to_spec(&self) -> SystemSpec {
        SystemSpec {
            probs: self.probs.clone(),
            ratios: self.ratios.clone(),
            translations: self.translations.clone(),
        }
    }

    /// Number of maps `m`.
    pub fn arity(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn ratios(&self) -> &[f64] {
        &self.ratios
    }

    pub fn translations(&self) -> Option<&[f64]> {
        self.translations.as_deref()
    }

    pub fn log_probs(&self) -> &[f64] {
        &self.log_probs
    }

    pub fn log_ratios(&self) -> &[f64] {
        &self.log_ratios
    }

    /// True when `log p_i / log r_i` is the same for every map, so the
    /// spectrum collapses to a single point.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// `log p_i / log r_i` for each symbol.
    pub fn symbol_exponents(&self) -> Vec<f64> {
        self.log_probs
            .iter()
            .zip(&self.log_ratios)
            .map(|(lp, lr)| lp / lr)
            .collect()
    }

    /// Short content hash of the canonical JSON form.
    pub fn content_hash(&self) -> String {
        let canonical = serde_json::to_string(&self.to_spec()).expect("spec serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

/// A finite word over `{0, .., m-1}`; rendered 1-based.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<u16>);

impl Word {
    pub fn new() -> Self {
        Word(Vec::new())
    }

    /// Builds a word from 0-based symbols.
    pub fn from_symbols<I: IntoIterator<Item = usize>>(symbols: I) -> Self {
        Word(symbols.into_iter().map(|s| s as u16).collect())
    }

    /// Builds a word from 1-based symbols, checking them against `arity`.
    pub fn from_one_based(symbols: &[usize], arity: usize) -> Result<Self> {
        symbols
            .iter()
            .map(|&s| {
                if s == 0 || s > arity {
                    Err(Error::SymbolOutOfRange { symbol: s, arity })
                } else {
                    Ok((s - 1) as u16)
                }
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    /// Parses the text form: plain digits for `arity <= 9`, otherwise
    /// comma-separated integers. Both are 1-based.
    pub fn parse(text: &str, arity: usize) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Word::new());
        }
        let symbols: Vec<usize> = if arity <= 9 && !text.contains(',') {
            text.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as usize)
                        .ok_or_else(|| Error::Parse(format!("invalid symbol {c:?} in word")))
                })
                .collect::<Result<_>>()?
        } else {
            text.split(',')
                .map(|s| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Parse(format!("invalid symbol {s:?} in word")))
                })
                .collect::<Result<_>>()?
        };
        Word::from_one_based(&symbols, arity)
    }

    /// Text form for an alphabet of size `arity`.
    pub fn render(&self, arity: usize) -> String {
        if arity <= 9 {
            self.0
                .iter()
                .map(|&s| char::from_digit(s as u32 + 1, 10).expect("digit"))
                .collect()
        } else {
            self.0
                .iter()
                .map(|&s| (s as usize + 1).to_string())
                .collect::<Vec<_>>()
                .join(",")
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// 0-based symbols.
    pub fn symbols(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.0.iter().map(|&s| s as usize)
    }

    pub fn symbol(&self, index: usize) -> usize {
        self.0[index] as usize
    }

    pub fn push(&mut self, symbol: usize) {
        self.0.push(symbol as u16);
    }

    pub fn extend_from(&mut self, other: &Word) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.clone();
        out.extend_from(other);
        out
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n.min(self.0.len())].to_vec())
    }

    /// The word with its last symbol removed.
    pub fn parent(&self) -> Option<Word> {
        if self.0.is_empty() {
            None
        } else {
            Some(Word(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    /// `self` repeated until it has `length` symbols.
    pub fn cycle_to(&self, length: usize) -> Word {
        if self.0.is_empty() {
            return Word::new();
        }
        Word(self.0.iter().cycle().take(length).cloned().collect())
    }

    pub fn max_symbol(&self) -> Option<usize> {
        self.0.iter().max().map(|&s| s as usize)
    }
}

impl fmt::Display for Word {
    /// Renders 1-based digits when every symbol fits, else comma-separated.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arity = self.max_symbol().map_or(1, |s| s + 1);
        f.write_str(&self.render(arity))
    }
}

/// Products `p_a`, `r_a` of a word, carried in log space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WordStats {
    pub log_p: f64,
    pub log_r: f64,
}

impl WordStats {
    pub fn p(&self) -> f64 {
        self.log_p.exp()
    }

    pub fn r(&self) -> f64 {
        self.log_r.exp()
    }

    /// `log p_a / log r_a`.
    pub fn ratio(&self) -> f64 {
        self.log_p / self.log_r
    }
}

pub fn word_stats(sys: &WeightedSystem, word: &Word) -> Result<WordStats> {
    if word.is_empty() {
        return Err(Error::EmptyWord);
    }
    let m = sys.arity();
    let mut log_p = 0.0;
    let mut log_r = 0.0;
    for s in word.symbols() {
        if s >= m {
            return Err(Error::SymbolOutOfRange {
                symbol: s + 1,
                arity: m,
            });
        }
        log_p += sys.log_probs[s];
        log_r += sys.log_ratios[s];
    }
    Ok(WordStats { log_p, log_r })
}

/// `(min_i log p_i / log r_i, max_i log p_i / log r_i)`.
pub fn alpha_bounds(sys: &WeightedSystem) -> (f64, f64) {
    if sys.degenerate {
        let a = sys.symbol_exponents()[0];
        return (a, a);
    }
    sys.symbol_exponents()
        .into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| {
            (lo.min(a), hi.max(a))
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::s1;
    use proptest::prelude::*;

    #[test]
    fn symmetric_system_is_degenerate() {
        let sys = validate_system(&SystemSpec::new(vec![0.5, 0.5], vec![0.5, 0.5])).unwrap();
        assert!(sys.is_degenerate());
        assert_eq!(alpha_bounds(&sys), (1.0, 1.0));
    }

    #[test]
    fn s1_is_valid_and_not_degenerate() {
        let sys = s1();
        assert!(!sys.is_degenerate());
        assert_eq!(sys.arity(), 2);
    }

    #[test]
    fn rejects_bad_weight_sum() {
        let err = validate_system(&SystemSpec::new(vec![0.3, 0.3], vec![0.5, 0.5])).unwrap_err();
        assert_eq!(err.name(), "WeightSumError");
    }

    #[test]
    fn rejects_out_of_range_entries() {
        let err = validate_system(&SystemSpec::new(vec![1.0, 0.0], vec![0.5, 0.5])).unwrap_err();
        assert_eq!(err.name(), "RangeError");
        let err = validate_system(&SystemSpec::new(vec![0.5, 0.5], vec![0.5, 1.0])).unwrap_err();
        assert_eq!(err.name(), "RangeError");
    }

    #[test]
    fn rejects_mismatched_lengths() {
        let err = validate_system(&SystemSpec::new(vec![0.5, 0.5], vec![0.5])).unwrap_err();
        assert_eq!(err.name(), "ArityError");
        let err = validate_system(&SystemSpec::new(vec![1.0], vec![0.5])).unwrap_err();
        assert_eq!(err.name(), "ArityError");
        let err = validate_system(
            &SystemSpec::new(vec![0.5, 0.5], vec![0.5, 0.5]).with_translations(vec![0.0]),
        )
        .unwrap_err();
        assert_eq!(err.name(), "ArityError");
    }

    #[test]
    fn rejects_overlapping_translations() {
        let err = validate_system(
            &SystemSpec::new(vec![0.5, 0.5], vec![0.5, 0.5]).with_translations(vec![0.0, 0.4]),
        )
        .unwrap_err();
        assert_eq!(
            err,
            Error::Overlap {
                first: 0,
                second: 1
            }
        );
        let err = validate_system(
            &SystemSpec::new(vec![0.5, 0.5], vec![0.5, 0.5]).with_translations(vec![0.0, 0.6]),
        )
        .unwrap_err();
        assert_eq!(err.name(), "OverlapError");
    }

    #[test]
    fn json_rejects_unknown_fields() {
        let ok = WeightedSystem::from_json(r#"{"ratios":[0.5,0.5],"probs":[0.5,0.5]}"#);
        assert!(ok.is_ok());
        let err = WeightedSystem::from_json(r#"{"probs":[0.5,0.5],"ratios":[0.5,0.5],"extra":1}"#)
            .unwrap_err();
        assert_eq!(err.name(), "ParseError");
    }

    #[test]
    fn word_stats_examples() {
        let sys = s1();
        let w = |s: &str| Word::parse(s, 2).unwrap();
        let a = word_stats(&sys, &w("11")).unwrap();
        assert!((a.p() - 1.0 / 9.0).abs() < 1e-15);
        assert!((a.r() - 0.25).abs() < 1e-15);
        assert!((a.ratio() - 1.584962500721156).abs() < 1e-12);
        let b = word_stats(&sys, &w("22")).unwrap();
        assert!((b.p() - 4.0 / 9.0).abs() < 1e-15);
        assert!((b.ratio() - 0.5849625007211562).abs() < 1e-12);
        let c = word_stats(&sys, &w("12")).unwrap();
        assert!((c.ratio() - 1.0849625007211563).abs() < 1e-12);
        assert_eq!(word_stats(&sys, &Word::new()), Err(Error::EmptyWord));
    }

    #[test]
    fn alpha_bounds_examples() {
        let (lo, hi) = alpha_bounds(&s1());
        assert!((lo - (2.0f64 / 3.0).ln() / 0.5f64.ln()).abs() < 1e-15);
        assert!((hi - (1.0f64 / 3.0).ln() / 0.5f64.ln()).abs() < 1e-15);
        let sys = validate_system(&SystemSpec::new(vec![0.25, 0.75], vec![0.25, 0.5])).unwrap();
        let (lo, hi) = alpha_bounds(&sys);
        assert!((lo - 0.41503749927884376).abs() < 1e-12);
        assert!((hi - 1.0).abs() < 1e-15);
    }

    #[test]
    fn word_text_forms() {
        let w = Word::parse("1212", 2).unwrap();
        assert_eq!(w.render(2), "1212");
        let long = Word::parse("10,2,1", 12).unwrap();
        assert_eq!(long.render(12), "10,2,1");
        assert_eq!(Word::parse("13", 2).unwrap_err().name(), "RangeError");
    }

    fn arb_system() -> impl Strategy<Value = WeightedSystem> {
        (2usize..=4)
            .prop_flat_map(|m| {
                (
                    prop::collection::vec(0.05f64..1.0, m),
                    prop::collection::vec(0.05f64..0.95, m),
                )
            })
            .prop_map(|(w, r)| {
                let total: f64 = w.iter().sum();
                let mut probs: Vec<f64> = w.iter().map(|x| x / total).collect();
                let head: f64 = probs[1..].iter().sum();
                probs[0] = 1.0 - head;
                validate_system(&SystemSpec::new(probs, r)).unwrap()
            })
    }

    proptest! {
        #[test]
        fn word_ratio_within_alpha_bounds(
            sys in arb_system(),
            seed in prop::collection::vec(0usize..4, 1..200),
        ) {
            let m = sys.arity();
            let word = Word::from_symbols(seed.iter().map(|s| s % m));
            let ratio = word_stats(&sys, &word).unwrap().ratio();
            let (lo, hi) = alpha_bounds(&sys);
            prop_assert!(ratio >= lo - 1e-12 && ratio <= hi + 1e-12);
        }

        #[test]
        fn word_stats_multiplicative(
            sys in arb_system(),
            a in prop::collection::vec(0usize..4, 1..50),
            b in prop::collection::vec(0usize..4, 1..50),
        ) {
            let m = sys.arity();
            let a = Word::from_symbols(a.iter().map(|s| s % m));
            let b = Word::from_symbols(b.iter().map(|s| s % m));
            let sa = word_stats(&sys, &a).unwrap();
            let sb = word_stats(&sys, &b).unwrap();
            let sab = word_stats(&sys, &a.concat(&b)).unwrap();
            prop_assert!((sab.log_p - sa.log_p - sb.log_p).abs() <= 1e-12 * sab.log_p.abs().max(1.0));
            prop_assert!((sab.log_r - sa.log_r - sb.log_r).abs() <= 1e-12 * sab.log_r.abs().max(1.0));
        }

        #[test]
        fn validation_is_idempotent(sys in arb_system()) {
            let again = validate_system(&sys.to_spec()).unwrap();
            prop_assert_eq!(again, sys);
        }
    }
}
