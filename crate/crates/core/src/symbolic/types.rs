//! Method of types: empirical symbol frequencies, type classes and the
//! entropy functionals evaluated on them.

use statrs::function::factorial::ln_factorial;

use crate::error::{Error, Result};
use crate::ifs::{WeightedSystem, Word};

/// Symbol counts of a word; the type is `counts / len` in exact arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeVector {
    counts: Vec<u64>,
}

impl TypeVector {
    pub fn from_counts(counts: Vec<u64>) -> Result<Self> {
        if counts.iter().sum::<u64>() == 0 {
            return Err(Error::EmptyWord);
        }
        Ok(TypeVector { counts })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Length `n` of the words of this type.
    pub fn len(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn arity(&self) -> usize {
        self.counts.len()
    }

    /// Frequency of symbol `i` as a reduced fraction `(num, den)`.
    pub fn freq(&self, i: usize) -> (u64, u64) {
        let (num, den) = (self.counts[i], self.len());
        let g = gcd(num, den);
        (num / g, den / g)
    }

    pub fn to_probs(&self) -> Vec<f64> {
        let n = self.len() as f64;
        self.counts.iter().map(|&k| k as f64 / n).collect()
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// The type of a nonempty word over an alphabet of size `arity`.
pub fn type_of(word: &Word, arity: usize) -> Result<TypeVector> {
    if word.is_empty() {
        return Err(Error::EmptyWord);
    }
    let mut counts = vec![0u64; arity];
    for s in word.symbols() {
        if s >= arity {
            return Err(Error::SymbolOutOfRange {
                symbol: s + 1,
                arity,
            });
        }
        counts[s] += 1;
    }
    TypeVector::from_counts(counts)
}

/// Entropy `H(q)`, cross entropy `H_p(q)` and Lyapunov exponent `lambda(q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entropies {
    pub entropy: f64,
    pub cross_entropy: f64,
    pub lyapunov: f64,
}

impl Entropies {
    /// `H_p(q) / lambda(q)`, the local dimension exponent of type `q`.
    pub fn exponent(&self) -> f64 {
        self.cross_entropy / self.lyapunov
    }

    /// `H(q) / lambda(q)`.
    pub fn dimension(&self) -> f64 {
        self.entropy / self.lyapunov
    }
}

/// Evaluates the functionals at a point of the closed simplex, with
/// `0 log 0 = 0`.
pub fn entropy_functionals(sys: &WeightedSystem, q: &[f64]) -> Entropies {
    debug_assert_eq!(q.len(), sys.arity());
    let mut out = Entropies {
        entropy: 0.0,
        cross_entropy: 0.0,
        lyapunov: 0.0,
    };
    for ((&qi, &lp), &lr) in q.iter().zip(sys.log_probs()).zip(sys.log_ratios()) {
        if qi > 0.0 {
            out.entropy -= qi * qi.ln();
            out.cross_entropy -= qi * lp;
            out.lyapunov -= qi * lr;
        }
    }
    out
}

/// `log #T_n(q)` together with the bounds `n H(q) - (m + 1) log(n + 1)` and
/// `n H(q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypeClassCount {
    pub exact_log: f64,
    pub lower: f64,
    pub upper: f64,
}

pub fn type_class_log_count(n: u64, q: &TypeVector) -> Result<TypeClassCount> {
    let den = q.len();
    if n == 0
        || q.counts
            .iter()
            .any(|&k| !(k as u128 * n as u128).is_multiple_of(den as u128))
    {
        return Err(Error::Denominator {
            n,
            denominator: den,
        });
    }
    let counts: Vec<u64> = q
        .counts
        .iter()
        .map(|&k| (k as u128 * n as u128 / den as u128) as u64)
        .collect();
    let exact_log = log_multinomial(n, &counts);
    let entropy: f64 = counts
        .iter()
        .filter(|&&k| k > 0)
        .map(|&k| {
            let f = k as f64 / n as f64;
            -f * f.ln()
        })
        .sum();
    let upper = n as f64 * entropy;
    let lower = upper - (q.arity() as f64 + 1.0) * ((n + 1) as f64).ln();
    Ok(TypeClassCount {
        exact_log,
        lower,
        upper,
    })
}

/// `log (n! / prod k_i!)`.
pub fn log_multinomial(n: u64, counts: &[u64]) -> f64 {
    debug_assert_eq!(counts.iter().sum::<u64>(), n);
    ln_factorial(n) - counts.iter().map(|&k| ln_factorial(k)).sum::<f64>()
}

/// Number of compositions of `n` into `parts` nonnegative parts, as `f64`.
pub fn composition_count(n: u64, parts: usize) -> f64 {
    if parts == 0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let k = (parts - 1) as u64;
    (ln_factorial(n + k) - ln_factorial(n) - ln_factorial(k))
        .exp()
        .round()
}

/// All vectors of `parts` nonnegative integers summing to `n`, in
/// lexicographic order.
#[derive(Debug, Clone)]
pub struct Compositions {
    current: Vec<u64>,
    done: bool,
}

impl Compositions {
    pub fn new(n: u64, parts: usize) -> Self {
        if parts == 0 {
            return Compositions {
                current: Vec::new(),
                done: n != 0,
            };
        }
        let mut current = vec![0; parts];
        current[parts - 1] = n;
        Compositions {
            current,
            done: false,
        }
    }
}

impl Iterator for Compositions {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let m = self.current.len();
        // Successor: bump the rightmost position with a nonzero suffix and
        // move the remaining suffix mass to the last slot.
        let mut suffix = 0;
        let mut advanced = false;
        for i in (0..m.saturating_sub(1)).rev() {
            suffix += self.current[i + 1];
            if suffix > 0 {
                self.current[i] += 1;
                for c in &mut self.current[i + 1..] {
                    *c = 0;
                }
                self.current[m - 1] = suffix - 1;
                advanced = true;
                break;
            }
        }
        if !advanced {
            self.done = true;
        }
        Some(out)
    }
}
