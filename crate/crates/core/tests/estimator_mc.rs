use laguerre_thresh::basis::{make_grid, DEFAULT_ORDER};
use laguerre_thresh::estimator::{estimate_coeff_iid, estimate_coeff_lm, fit, threshold, truncation_level};
use laguerre_thresh::experiments::oracle;
use laguerre_thresh::stats::mean_se;
use laguerre_thresh::{Design, EstimatorConfig, ModelSpec, NoiseSpec, Simulator};
use proptest::prelude::*;

fn model(function: &str, sigma: f64, n: usize, noise: NoiseSpec) -> ModelSpec {
    ModelSpec {
        function: function.into(),
        amplitude: 1.0,
        design: Design::Uniform,
        sigma,
        b: 1.0,
        n,
        noise,
    }
}

#[test]
fn iid_coefficient_is_nearly_unbiased() {
    let n = 10_000;
    let m = model("phi0-sqrt", 0.0, n, NoiseSpec::iid());
    let grid = make_grid(1.0, DEFAULT_ORDER).unwrap();
    let cfg = EstimatorConfig::iid(1.0, 0.0);
    let sim = Simulator::new(&m).unwrap();
    let est: Vec<f64> = (0..500)
        .map(|r| estimate_coeff_iid(&sim.simulate(31, r).unwrap(), 0, &cfg, &grid).unwrap())
        .collect();
    let (mean, se) = mean_se(&est);
    let theta0 = oracle(&m, 1, &grid).unwrap().coeffs.theta()[0];
    // Summands are ε² f² φ_0 / g ≤ ε², so dropping |s| > c costs at most
    // E[ε²; ε² > c] = 2(uφ(u) + Q(u)) ≤ 2φ(u)(u + 1/u) with u = √c.
    let u = ((n as f64) / (n as f64).ln()).sqrt().sqrt();
    let pdf = (-u * u / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let bias_bound = 2.0 * pdf * (u + 1.0 / u);
    assert!(bias_bound < se);
    assert!((mean - theta0).abs() < 3.0 * se + bias_bound, "{mean} vs {theta0} (se {se})");
}

#[test]
fn pure_additive_noise_is_centred() {
    let m = ModelSpec {
        amplitude: 0.0,
        ..model("constant", 1.0, 256, NoiseSpec::iid())
    };
    let grid = make_grid(1.0, DEFAULT_ORDER).unwrap();
    let cfg = EstimatorConfig::lm(1.0, 1.0, 1.0, 1.0);
    let sim = Simulator::new(&m).unwrap();
    let samples: Vec<_> = (0..500).map(|r| sim.simulate(32, r).unwrap()).collect();
    for l in [0usize, 1, 3] {
        let est: Vec<f64> = samples.iter().map(|s| estimate_coeff_lm(s, l, &cfg, &grid).unwrap()).collect();
        let (mean, se) = mean_se(&est);
        assert!(mean.abs() < 3.0 * se, "l={l}: {mean} (se {se})");
    }
}

#[test]
fn plain_mean_unbiased_under_long_memory() {
    let n = 1 << 12;
    let m = model("shifted-exp", 0.5, n, NoiseSpec::long_memory(0.3, 0.3).unwrap());
    let grid = make_grid(1.0, DEFAULT_ORDER).unwrap();
    let cfg = EstimatorConfig::lm(1.0, 0.5, 0.3, 0.3);
    let sim = Simulator::new(&m).unwrap();
    let samples: Vec<_> = (0..300).map(|r| sim.simulate(33, r).unwrap()).collect();
    let truth = oracle(&m, 3, &grid).unwrap();
    for l in 0..3 {
        let est: Vec<f64> = samples.iter().map(|s| estimate_coeff_lm(s, l, &cfg, &grid).unwrap()).collect();
        let (mean, se) = mean_se(&est);
        let th = truth.coeffs.theta()[l];
        assert!((mean - th).abs() < 3.0 * se, "l={l}: {mean} vs {th} (se {se})");
    }
}

#[test]
fn catalog_cases_unbiased_under_lm_estimator() {
    let grid = make_grid(1.0, DEFAULT_ORDER).unwrap();
    for function in ["phi0-sqrt", "cosine-bump", "shifted-exp", "constant"] {
        let m = model(function, 0.3, 512, NoiseSpec::long_memory(0.6, 0.4).unwrap());
        let cfg = EstimatorConfig::lm(1.0, 0.3, 0.6, 0.4);
        let sim = Simulator::new(&m).unwrap();
        let est: Vec<f64> = (0..400)
            .map(|r| estimate_coeff_lm(&sim.simulate(34, r).unwrap(), 1, &cfg, &grid).unwrap())
            .collect();
        let (mean, se) = mean_se(&est);
        let th = oracle(&m, 2, &grid).unwrap().coeffs.theta()[1];
        assert!((mean - th).abs() < 3.0 * se, "{function}: {mean} vs {th} (se {se})");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weak_memory_rules_match_iid(a1 in 0.5f64..=1.0, a2 in 0.5f64..=1.0, gamma in 0.1f64..4.0, n in 2usize..100_000) {
        let iid = EstimatorConfig::iid(gamma, 0.0);
        let lm = EstimatorConfig::lm(gamma, 0.0, a1, a2);
        prop_assert_eq!(threshold(&lm, n), threshold(&iid, n));
        prop_assert_eq!(truncation_level(&lm, n), truncation_level(&iid, n));
    }

    #[test]
    fn strong_memory_rules(a1 in 0.05f64..0.5, a2 in 0.05f64..1.0, n in 2usize..100_000) {
        let lm = EstimatorConfig::lm(1.0, 0.0, a1, a2);
        let m = truncation_level(&lm, n);
        prop_assert!(m >= 1 && m <= lm.m_cap);
        prop_assert!(m <= n.max(1));
        let lam = threshold(&lm, n);
        let nf = n as f64;
        prop_assert!(lam >= nf.ln() / nf.powf(a1.min(a2)) - 1e-12);
    }

    #[test]
    fn mask_is_strict_threshold(seed in 0u64..1000, lam in 0.0f64..0.3) {
        let grid = make_grid(1.0, 64).unwrap();
        let m = model("cosine-bump", 0.2, 80, NoiseSpec::iid());
        let sample = Simulator::new(&m).unwrap().simulate(seed, 0).unwrap();
        let cfg = EstimatorConfig { threshold_override: Some(lam), ..EstimatorConfig::iid(1.0, 0.2) };
        let est = fit(&sample, &cfg, &grid).unwrap();
        for ((v, k), masked) in est.raw.theta().iter().zip(&est.kept).zip(est.masked()) {
            prop_assert_eq!(*k, v.abs() > lam);
            prop_assert_eq!(masked, if *k { *v } else { 0.0 });
        }
        prop_assert!(est.lambda.iter().all(|l| *l == lam));
    }
}
