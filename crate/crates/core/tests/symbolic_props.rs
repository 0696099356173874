use proptest::prelude::*;

use mfa_core::spectrum::f_bar;
use mfa_core::symbolic::types::Compositions;
use mfa_core::symbolic::{
    assouad_estimate, entropy_functionals, gamma_n_alpha, moran_construct, moran_dimension,
    sample_word, subshift_dimension, type_class_log_count, BlockBase, TypeVector,
};
use mfa_core::{alpha_bounds, validate_system, SystemSpec, WeightedSystem, Word};

fn s1() -> WeightedSystem {
    validate_system(&SystemSpec::new(vec![1.0 / 3.0, 2.0 / 3.0], vec![0.5, 0.5])).unwrap()
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

fn arb_simplex(m: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, m).prop_filter_map("zero vector", |v| {
        let total: f64 = v.iter().sum();
        (total > 0.0).then(|| v.iter().map(|x| x / total).collect())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gibbs_inequality(
        (sys, q) in arb_system().prop_flat_map(|s| {
            let m = s.arity();
            (Just(s), arb_simplex(m))
        })
    ) {
        let e = entropy_functionals(&sys, &q);
        prop_assert!(e.entropy <= e.cross_entropy + 1e-12);
        prop_assert!(e.lyapunov > 0.0);
    }

    #[test]
    fn type_class_bounds(m in 2usize..=4, n in 1u64..400, seed in prop::collection::vec(0u64..1000, 4)) {
        // A composition of n from the seed, remainder on the last part.
        let mut counts: Vec<u64> = seed[..m - 1].iter().map(|s| s % (n + 1)).collect();
        let mut left = n;
        for c in counts.iter_mut() {
            *c = (*c).min(left);
            left -= *c;
        }
        counts.push(left);
        let c = type_class_log_count(n, &TypeVector::from_counts(counts).unwrap()).unwrap();
        prop_assert!(c.lower <= c.exact_log && c.exact_log <= c.upper);
    }

    #[test]
    fn window_ratios_stay_in_range(sys in arb_system(), seed in any::<u64>(), len in 20usize..400) {
        let word = sample_word(sys.probs(), len, seed).unwrap();
        let est = assouad_estimate(&sys, &word, 1, len).unwrap();
        let (lo, hi) = alpha_bounds(&sys);
        // Window sums are differences of prefix sums.
        let slack = 1e-10 * hi;
        for &v in &est.per_n_sup {
            prop_assert!(v >= lo - slack && v <= hi + slack);
        }
    }

    #[test]
    fn windows_of_arbitrary_words_stay_in_range(
        symbols in prop::collection::vec(0usize..2, 10..200),
    ) {
        let sys = s1();
        let word = Word::from_symbols(symbols.iter().cloned());
        let est = assouad_estimate(&sys, &word, 1, word.len()).unwrap();
        let (lo, hi) = alpha_bounds(&sys);
        prop_assert!(est.per_n_sup.iter().all(|&v| v >= lo - 1e-12 && v <= hi + 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn moran_stages_sit_between_target_and_f_bar(alpha in 0.9f64..1.4) {
        let sys = s1();
        let eps = 0.05;
        let spec = moran_construct(&sys, alpha, eps, 256, 20, BlockBase::Full).unwrap();
        let fb = f_bar(&sys, alpha).unwrap();
        for k in 1..=20 {
            let s_k = moran_dimension(&spec, k, 0.0).unwrap();
            prop_assert!(s_k > fb - eps && s_k > spec.s());
            prop_assert!(s_k <= fb);
        }
        // Linear growth of the multiplicities.
        let c = spec.growth_constant();
        for (k, &mk) in spec.m().iter().enumerate() {
            prop_assert!(mk as f64 <= c * (k + 1) as f64 + 1e-9);
        }
    }
}

#[test]
fn type_class_bounds_exhaustive_small_n() {
    for m in 2..=4 {
        for n in 1..=60u64 {
            for counts in Compositions::new(n, m) {
                let c = type_class_log_count(n, &TypeVector::from_counts(counts).unwrap()).unwrap();
                assert!(c.lower <= c.exact_log && c.exact_log <= c.upper);
            }
        }
    }
}

#[test]
fn periodic_word_estimates() {
    // Cycle "112": exponent (2 log 3 + log 1.5) / (3 log 2).
    let sys = s1();
    let word = Word::from_symbols([0usize, 0, 1].iter().cycle().take(10_000).cloned());
    let est = assouad_estimate(&sys, &word, 2000, 2500).unwrap().estimate;
    let exact = (2.0 * 3f64.ln() + 1.5f64.ln()) / (3.0 * std::f64::consts::LN_2);
    assert!((est - exact).abs() <= 5e-3);
}

#[test]
fn block_dimension_grows_with_n() {
    let sys = s1();
    let dims: Vec<f64> = [4, 8, 16, 20]
        .iter()
        .map(|&n| {
            subshift_dimension(&gamma_n_alpha(&sys, n, 1.0, BlockBase::Full).unwrap(), 0.0).unwrap()
        })
        .collect();
    assert!(dims.windows(2).all(|w| w[0] <= w[1] + 1e-12), "{dims:?}");
}

/// At `n = 20` the dimension is `log2(sum_{k <= 8} C(20, k)) / 20`, about
/// 0.9005, while `f_bar(1) - 0.05` is about 0.929; the bound is only
/// reached for larger `n`.
#[test]
fn block_dimension_near_f_bar_at_n_20() {
    let sys = s1();
    let gamma = gamma_n_alpha(&sys, 20, 1.0, BlockBase::Full).unwrap();
    let dim = subshift_dimension(&gamma, 0.0).unwrap();
    let target = f_bar(&sys, 1.0).unwrap() - 0.05;
    assert!(
        dim > target,
        "dimension {dim} at n = 20 does not exceed {target}"
    );
}
