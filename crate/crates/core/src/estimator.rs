//! Laguerre-coefficient estimators for `h = f²`, the threshold and
//! truncation rules of both noise regimes, and hard-thresholded
//! reconstruction.

use serde::{Deserialize, Serialize};

use crate::basis::{fill_row, fill_row_unchecked, BasisGrid, LaguerreCoeffs};
use crate::error::{Error, Result};
use crate::model::RegressionSample;

pub const DEFAULT_M_CAP: usize = 1024;

/// Slack on `floor(n^{2α})` so exact powers are not lost to rounding.
const FLOOR_SLACK: f64 = 1.0 + 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Iid,
    Lm,
}

/// Tuning of the estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub regime: Regime,
    pub gamma: f64,
    /// Constant on the `α_1` term of the strong-memory threshold; `gamma`
    /// when unset.
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
    pub sigma: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub m_cap: usize,
    pub clamp_nonnegative: bool,
    /// Diagnostic: replaces the rule-based threshold.
    pub threshold_override: Option<f64>,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            regime: Regime::Iid,
            gamma: 1.0,
            gamma1: None,
            gamma2: None,
            sigma: 0.0,
            alpha1: 1.0,
            alpha2: 1.0,
            m_cap: DEFAULT_M_CAP,
            clamp_nonnegative: false,
            threshold_override: None,
        }
    }
}

impl EstimatorConfig {
    pub fn iid(gamma: f64, sigma: f64) -> Self {
        Self {
            gamma,
            sigma,
            ..Self::default()
        }
    }

    pub fn lm(gamma: f64, sigma: f64, alpha1: f64, alpha2: f64) -> Self {
        Self {
            regime: Regime::Lm,
            gamma,
            sigma,
            alpha1,
            alpha2,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, g) in [("gamma", Some(self.gamma)), ("gamma1", self.gamma1), ("gamma2", self.gamma2)] {
            if let Some(g) = g {
                if !(g > 0.0 && g.is_finite()) {
                    return Err(Error::Invalid(format!("{name} must be positive, got {g}")));
                }
            }
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::Invalid(format!("sigma must be nonnegative, got {}", self.sigma)));
        }
        if self.regime == Regime::Lm {
            for (name, a) in [("alpha1", self.alpha1), ("alpha2", self.alpha2)] {
                if !(a > 0.0 && a <= 1.0) {
                    return Err(Error::Invalid(format!("{name} must lie in (0,1], got {a}")));
                }
            }
        }
        if self.m_cap == 0 {
            return Err(Error::Invalid("m_cap must be at least 1".into()));
        }
        if let Some(l) = self.threshold_override {
            if !(l >= 0.0) {
                return Err(Error::Invalid(format!("threshold override must be nonnegative, got {l}")));
            }
        }
        Ok(())
    }

    pub fn min_alpha(&self) -> f64 {
        match self.regime {
            Regime::Iid => 1.0,
            Regime::Lm => self.alpha1.min(self.alpha2),
        }
    }

    /// True when the strong-memory rules apply (`min α < 1/2`).
    pub fn strong_memory(&self) -> bool {
        self.min_alpha() < 0.5
    }

    /// Regime whose coefficient estimator is used. Memory-free LM
    /// (`α_1 = α_2 = 1`) collapses to the i.i.d. pipeline.
    pub fn effective_regime(&self) -> Regime {
        if self.regime == Regime::Lm && self.min_alpha() >= 1.0 {
            Regime::Iid
        } else {
            self.regime
        }
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::SampleTooSmall {
            n,
            reason: "ln N must be positive",
        });
    }
    Ok(())
}

/// Level-independent threshold `λ` for sample size `n ≥ 2`.
pub fn threshold(cfg: &EstimatorConfig, n: usize) -> f64 {
    if let Some(l) = cfg.threshold_override {
        return l;
    }
    let nf = n as f64;
    let ln = nf.ln();
    if cfg.strong_memory() {
        let g1 = cfg.gamma1.unwrap_or(cfg.gamma);
        let g2 = cfg.gamma2.unwrap_or(cfg.gamma);
        (g1 * ln / nf.powf(cfg.alpha1)).max(g2 * ln / nf.powf(cfg.alpha2))
    } else {
        cfg.gamma * (ln / nf).sqrt()
    }
}

/// Number of coefficients `M` estimated before thresholding.
pub fn truncation_level(cfg: &EstimatorConfig, n: usize) -> usize {
    let m = if cfg.strong_memory() {
        let raw = (n as f64).powf(2.0 * cfg.min_alpha()) * FLOOR_SLACK;
        raw.floor() as usize
    } else {
        n
    };
    m.min(cfg.m_cap).max(1)
}

fn check_grid(sample: &RegressionSample, grid: &BasisGrid) -> Result<()> {
    if sample.spec.b != grid.b() {
        return Err(Error::Invalid(format!(
            "sample support b = {} but basis grid b = {}",
            sample.spec.b,
            grid.b()
        )));
    }
    Ok(())
}

/// `y_i² / g(t_i)` for every observation.
fn weights(sample: &RegressionSample) -> Result<Vec<f64>> {
    let (design, b) = (sample.spec.design, sample.spec.b);
    sample
        .t
        .iter()
        .zip(&sample.y)
        .enumerate()
        .map(|(i, (&t, &y))| {
            let g = design.pdf(t, b);
            if g > 0.0 {
                Ok(y * y / g)
            } else {
                Err(Error::Invalid(format!("design density vanishes at observation {i} (t = {t})")))
            }
        })
        .collect()
}

fn summand_error(index: usize, coefficient: usize, value: f64) -> Error {
    Error::NonFiniteSummand { index, coefficient, value }
}

/// Truncated-mean estimator of `θ_l` for i.i.d. errors: summands whose
/// magnitude exceeds `√(N / ln N)` are dropped.
pub fn estimate_coeff_iid(sample: &RegressionSample, l: usize, cfg: &EstimatorConfig, grid: &BasisGrid) -> Result<f64> {
    let n = sample.len();
    check_n(n)?;
    check_grid(sample, grid)?;
    let cut = (n as f64 / (n as f64).ln()).sqrt();
    let centre = cfg.sigma * cfg.sigma * grid.basis_integrals(l + 1)[l];
    let w = weights(sample)?;
    let mut row = vec![0.0; l + 1];
    let mut acc = 0.0;
    for (i, (&t, wi)) in sample.t.iter().zip(&w).enumerate() {
        fill_row(t, &mut row)?;
        let s = wi * row[l] - centre;
        if !s.is_finite() {
            return Err(summand_error(i, l, s));
        }
        if s.abs() <= cut {
            acc += s;
        }
    }
    Ok(acc / n as f64)
}

/// Plain-mean estimator of `θ_l`, unbiased under any dependence.
pub fn estimate_coeff_lm(sample: &RegressionSample, l: usize, cfg: &EstimatorConfig, grid: &BasisGrid) -> Result<f64> {
    let n = sample.len();
    if n == 0 {
        return Err(Error::SampleTooSmall {
            n,
            reason: "at least one observation is required",
        });
    }
    check_grid(sample, grid)?;
    let centre = cfg.sigma * cfg.sigma * grid.basis_integrals(l + 1)[l];
    let w = weights(sample)?;
    let mut row = vec![0.0; l + 1];
    let mut acc = 0.0;
    for (i, (&t, wi)) in sample.t.iter().zip(&w).enumerate() {
        fill_row(t, &mut row)?;
        let s = wi * row[l] - centre;
        if !s.is_finite() {
            return Err(summand_error(i, l, s));
        }
        acc += s;
    }
    Ok(acc / n as f64)
}

/// Raw coefficients, mask, and threshold of one fit.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdedEstimate {
    pub raw: LaguerreCoeffs,
    pub kept: Vec<bool>,
    pub lambda: Vec<f64>,
    pub m: usize,
    pub clamp_nonnegative: bool,
}

impl ThresholdedEstimate {
    /// `θ̂_l` where kept, zero elsewhere.
    pub fn masked(&self) -> Vec<f64> {
        self.raw
            .theta()
            .iter()
            .zip(&self.kept)
            .map(|(&v, &k)| if k { v } else { 0.0 })
            .collect()
    }

    pub fn kept_count(&self) -> usize {
        self.kept.iter().filter(|k| **k).count()
    }

    /// `ĥ_M(t)`, clamped at zero when configured.
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        let mut row = vec![0.0; self.m];
        fill_row(t, &mut row)?;
        let v: f64 = self.masked().iter().zip(&row).map(|(c, p)| c * p).sum();
        Ok(if self.clamp_nonnegative { v.max(0.0) } else { v })
    }
}

/// Estimates `θ_0 … θ_{M−1}` in one pass over the data and applies the
/// hard threshold.
pub fn fit(sample: &RegressionSample, cfg: &EstimatorConfig, grid: &BasisGrid) -> Result<ThresholdedEstimate> {
    cfg.validate()?;
    check_grid(sample, grid)?;
    let n = sample.len();
    let regime = cfg.effective_regime();
    if regime == Regime::Iid {
        check_n(n)?;
    } else if n == 0 {
        return Err(Error::SampleTooSmall {
            n,
            reason: "at least one observation is required",
        });
    }
    let m = truncation_level(cfg, n.max(2));
    let lambda = threshold(cfg, n.max(2));
    let s2 = cfg.sigma * cfg.sigma;
    let centre: Vec<f64> = grid.basis_integrals(m).iter().map(|v| s2 * v).collect();
    let cut = match regime {
        Regime::Iid => (n as f64 / (n as f64).ln()).sqrt(),
        Regime::Lm => f64::INFINITY,
    };
    let w = weights(sample)?;
    let mut acc = vec![0.0; m];
    let mut row = vec![0.0; m];
    for (i, (&t, &wi)) in sample.t.iter().zip(&w).enumerate() {
        fill_row_unchecked(t, &mut row);
        for (l, ((a, p), c)) in acc.iter_mut().zip(&row).zip(&centre).enumerate() {
            let s = wi * p - c;
            if !s.is_finite() {
                return Err(summand_error(i, l, s));
            }
            if s.abs() <= cut {
                *a += s;
            }
        }
    }
    let nf = n as f64;
    let theta: Vec<f64> = acc.into_iter().map(|a| a / nf).collect();
    let kept = theta.iter().map(|v| v.abs() > lambda).collect();
    Ok(ThresholdedEstimate {
        raw: LaguerreCoeffs::new(theta, grid.b())?,
        kept,
        lambda: vec![lambda; m],
        m,
        clamp_nonnegative: cfg.clamp_nonnegative,
    })
}

/// Integrated squared error in the coefficient domain: `Σ (θ̂_l 1_l − θ_l)²`
/// over both index ranges, plus the oracle's tail energy beyond its length.
pub fn ise(estimate: &ThresholdedEstimate, oracle: &LaguerreCoeffs, tail: f64) -> f64 {
    let masked = estimate.masked();
    let len = masked.len().max(oracle.m());
    let th = oracle.theta();
    (0..len)
        .map(|l| {
            let a = masked.get(l).copied().unwrap_or(0.0);
            let b = th.get(l).copied().unwrap_or(0.0);
            (a - b).powi(2)
        })
        .sum::<f64>()
        + tail
}

/// The same norm by direct quadrature: `∫_0^∞ (ĥ − h·1_{[0,b]})²`, cut at
/// `upper`, using `panels` copies of a Gauss–Legendre rule of `order` nodes.
/// Meant as an independent cross-check of [`ise`]; ignores clamping.
pub fn ise_by_quadrature<H: Fn(f64) -> f64>(
    estimate: &ThresholdedEstimate,
    h: H,
    b: f64,
    upper: f64,
    panels: usize,
    order: usize,
) -> Result<f64> {
    if !(upper >= b) || panels == 0 {
        return Err(Error::Invalid("quadrature range must cover [0, b]".into()));
    }
    let coeffs = estimate.masked();
    let mut row = vec![0.0; estimate.m];
    let mut total = 0.0;
    // Two sub-ranges so no panel straddles the jump of h·1_{[0,b]} at b.
    for (lo, hi, with_h) in [(0.0, b, true), (b, upper, false)] {
        if hi <= lo {
            continue;
        }
        let width = (hi - lo) / panels as f64;
        let rule = crate::basis::make_grid(width, order)?;
        for p in 0..panels {
            let off = lo + p as f64 * width;
            for (&s, &w) in rule.nodes().iter().zip(rule.weights()) {
                let t = off + s;
                fill_row_unchecked(t, &mut row);
                let est: f64 = coeffs.iter().zip(&row).map(|(c, p)| c * p).sum();
                let target = if with_h { h(t) } else { 0.0 };
                total += w * (est - target).powi(2);
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{laguerre_fn, make_grid, project, DEFAULT_ORDER};
    use crate::model::{assemble, Design, ModelSpec, Simulator};
    use crate::noise::NoiseSpec;

    fn spec(n: usize) -> ModelSpec {
        ModelSpec {
            function: "phi0-sqrt".into(),
            amplitude: 1.0,
            design: Design::Uniform,
            sigma: 0.0,
            b: 1.0,
            n,
            noise: NoiseSpec::iid(),
        }
    }

    fn hand_sample(t: Vec<f64>, y: Vec<f64>) -> RegressionSample {
        RegressionSample::new(t.clone(), y, spec(t.len())).unwrap()
    }

    #[test]
    fn threshold_examples() {
        let iid = EstimatorConfig::iid(1.0, 0.0);
        assert!((threshold(&iid, 100) - 0.214_596_602_628_934_7).abs() < 1e-15);
        let lm9 = EstimatorConfig::lm(1.0, 0.0, 0.9, 0.9);
        assert_eq!(threshold(&lm9, 100), threshold(&iid, 100));
        let lm = EstimatorConfig::lm(1.0, 0.0, 0.3, 0.4);
        // ln(10^4) / 10^{1.2}
        assert!((threshold(&lm, 10_000) - 0.581_133_190_286_080_8).abs() < 1e-14);
        let half = EstimatorConfig::lm(1.0, 0.0, 0.5, 0.8);
        assert_eq!(threshold(&half, 777), threshold(&iid, 777));
        assert_eq!(truncation_level(&half, 777), truncation_level(&iid, 777));
    }

    #[test]
    fn truncation_examples() {
        let iid = EstimatorConfig::iid(1.0, 0.0);
        assert_eq!(truncation_level(&iid, 512), 512);
        assert_eq!(truncation_level(&iid, 1_000_000), 1024);
        let lm = EstimatorConfig::lm(1.0, 0.0, 0.3, 0.6);
        assert_eq!(truncation_level(&lm, 1000), 63);
        // 32^{0.8} = 16 exactly
        let exact = EstimatorConfig::lm(1.0, 0.0, 0.4, 0.4);
        assert_eq!(truncation_level(&exact, 32), 16);
        let tiny = EstimatorConfig::lm(1.0, 0.0, 0.01, 0.01);
        assert_eq!(truncation_level(&tiny, 2), 1);
    }

    #[test]
    fn config_validation() {
        assert!(EstimatorConfig::iid(0.0, 0.0).validate().is_err());
        assert!(EstimatorConfig::iid(1.0, -1.0).validate().is_err());
        assert!(EstimatorConfig::lm(1.0, 0.0, 1.5, 0.5).validate().is_err());
        assert!(EstimatorConfig::lm(1.0, 0.0, 0.5, 0.5).validate().is_ok());
        assert_eq!(EstimatorConfig::lm(1.0, 0.0, 1.0, 1.0).effective_regime(), Regime::Iid);
        assert_eq!(EstimatorConfig::lm(1.0, 0.0, 0.7, 1.0).effective_regime(), Regime::Lm);
    }

    #[test]
    fn iid_by_hand() {
        let grid = make_grid(1.0, DEFAULT_ORDER).unwrap();
        let cfg = EstimatorConfig::iid(1.0, 0.0);
        assert!(matches!(
            estimate_coeff_iid(&hand_sample(vec![0.5], vec![1.0]), 0, &cfg, &grid),
            Err(Error::SampleTooSmall { .. })
        ));
        // cutoff √(2/ln 2) ≈ 1.699
        let s = hand_sample(vec![0.2, 0.7], vec![1.1, -0.6]);
        for l in 0..3 {
            let want = (1.21 * laguerre_fn(l, 0.2).unwrap() + 0.36 * laguerre_fn(l, 0.7).unwrap()) / 2.0;
            let got = estimate_coeff_iid(&s, l, &cfg, &grid).unwrap();
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn iid_indicator_drops_large_summand() {
        let grid = make_grid(1.0, DEFAULT_ORDER).unwrap();
        let cfg = EstimatorConfig::iid(1.0, 0.0);
        // y² φ_0(0) = 4 > √(2/ln 2)
        let s = hand_sample(vec![0.0, 0.7], vec![2.0, -0.6]);
        let want = 0.36 * laguerre_fn(0, 0.7).unwrap() / 2.0;
        assert!((estimate_coeff_iid(&s, 0, &cfg, &grid).unwrap() - want).abs() < 1e-15);
        // the plain mean keeps it
        let plain = (4.0 + 0.36 * laguerre_fn(0, 0.7).unwrap()) / 2.0;
        assert!((estimate_coeff_lm(&s, 0, &cfg, &grid).unwrap() - plain).abs() < 1e-15);
    }

    #[test]
    fn indicator_wraps_centring_term() {
        let grid = make_grid(1.0, DEFAULT_ORDER).unwrap();
        let mut cfg = EstimatorConfig::iid(1.0, 3.0);
        let s = hand_sample(vec![0.3, 0.6], vec![0.0, 0.0]);
        // every summand is −9∫φ_0 ≈ −7.08, beyond the cutoff: all dropped
        assert_eq!(estimate_coeff_iid(&s, 0, &cfg, &grid).unwrap(), 0.0);
        cfg.sigma = 0.5;
        let i0 = grid.basis_integrals(1)[0];
        assert!((estimate_coeff_iid(&s, 0, &cfg, &grid).unwrap() + 0.25 * i0).abs() < 1e-15);
    }

    #[test]
    fn lm_single_observation() {
        let grid = make_grid(1.0, DEFAULT_ORDER).unwrap();
        let cfg = EstimatorConfig::lm(1.0, 0.0, 0.3, 0.3);
        let s = hand_sample(vec![0.4], vec![1.3]);
        for l in 0..4 {
            let want = 1.69 * laguerre_fn(l, 0.4).unwrap();
            assert!((estimate_coeff_lm(&s, l, &cfg, &grid).unwrap() - want).abs() < 1e-15);
        }
    }

    #[test]
    fn fit_matches_per_coefficient_estimators() {
        let grid = make_grid(1.0, DEFAULT_ORDER).unwrap();
        let sim = Simulator::new(&ModelSpec { sigma: 0.4, ..spec(200) }).unwrap();
        let sample = sim.simulate(3, 0).unwrap();
        for cfg in [EstimatorConfig::iid(1.0, 0.4), EstimatorConfig::lm(1.0, 0.4, 0.3, 0.3)] {
            let est = fit(&sample, &cfg, &grid).unwrap();
            for l in [0, 1, 5, est.m - 1] {
                let single = match cfg.regime {
                    Regime::Iid => estimate_coeff_iid(&sample, l, &cfg, &grid).unwrap(),
                    Regime::Lm => estimate_coeff_lm(&sample, l, &cfg, &grid).unwrap(),
                };
                assert!((est.raw.theta()[l] - single).abs() < 1e-12, "l={l}");
            }
        }
    }

    #[test]
    fn mask_is_strict() {
        let grid = make_grid(1.0, DEFAULT_ORDER).unwrap();
        let s = hand_sample(vec![0.2, 0.7], vec![1.1, -0.6]);
        let probe = fit(&s, &EstimatorConfig::iid(1.0, 0.0), &grid).unwrap();
        let at = probe.raw.theta()[0].abs();
        let cfg = EstimatorConfig {
            threshold_override: Some(at),
            ..EstimatorConfig::iid(1.0, 0.0)
        };
        let est = fit(&s, &cfg, &grid).unwrap();
        assert!(!est.kept[0]);
        for (v, k) in est.raw.theta().iter().zip(&est.kept) {
            assert_eq!(*k, v.abs() > at);
        }
    }

    #[test]
    fn everything_thresholded_gives_zero() {
        let grid = make_grid(1.0, DEFAULT_ORDER).unwrap();
        let s = hand_sample(vec![0.2, 0.7], vec![0.1, -0.1]);
        let cfg = EstimatorConfig {
            threshold_override: Some(10.0),
            ..EstimatorConfig::iid(1.0, 0.0)
        };
        let est = fit(&s, &cfg, &grid).unwrap();
        assert_eq!(est.kept_count(), 0);
        for t in [0.0, 0.3, 0.9] {
            assert_eq!(est.evaluate(t).unwrap(), 0.0);
        }
    }

    #[test]
    fn zero_threshold_gives_full_series() {
        let grid = make_grid(1.0, DEFAULT_ORDER).unwrap();
        let s = hand_sample(vec![0.2, 0.7, 0.9], vec![0.5, -0.3, 0.8]);
        let cfg = EstimatorConfig {
            threshold_override: Some(0.0),
            ..EstimatorConfig::iid(1.0, 0.0)
        };
        let est = fit(&s, &cfg, &grid).unwrap();
        assert_eq!(est.masked(), est.raw.theta());
        let series = crate::basis::reconstruct(&est.raw, 0.45).unwrap();
        assert_eq!(est.evaluate(0.45).unwrap(), series);
    }

    #[test]
    fn clamping_is_post_processing() {
        let grid = make_grid(1.0, DEFAULT_ORDER).unwrap();
        let s = hand_sample(vec![0.2, 0.7], vec![0.0, 0.0]);
        let cfg = EstimatorConfig {
            threshold_override: Some(0.0),
            clamp_nonnegative: true,
            ..EstimatorConfig::iid(1.0, 0.5)
        };
        let est = fit(&s, &cfg, &grid).unwrap();
        assert!(est.raw.theta()[0] < 0.0);
        assert_eq!(est.evaluate(0.1).unwrap(), 0.0);
    }

    #[test]
    fn scaling_equivariance() {
        let grid = make_grid(1.0, DEFAULT_ORDER).unwrap();
        let sample = Simulator::new(&spec(300)).unwrap().simulate(5, 1).unwrap();
        let c = 1.7;
        let scaled = RegressionSample::new(
            sample.t.clone(),
            sample.y.iter().map(|y| c * y).collect(),
            sample.spec.clone(),
        )
        .unwrap();
        let cfg = EstimatorConfig {
            threshold_override: Some(0.0),
            ..EstimatorConfig::lm(1.0, 0.0, 0.7, 0.7)
        };
        let a = fit(&sample, &cfg, &grid).unwrap();
        let b = fit(&scaled, &cfg, &grid).unwrap();
        for (x, y) in a.raw.theta().iter().zip(b.raw.theta()) {
            assert!((y - c * c * x).abs() < 1e-12 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn noiseless_fit_recovers_phi0() {
        let b = 1.0;
        let grid = make_grid(b, DEFAULT_ORDER).unwrap();
        let n = 1 << 12;
        let s = ModelSpec {
            noise: NoiseSpec::noiseless(),
            ..spec(n)
        };
        let sample = Simulator::new(&s).unwrap().simulate(2, 0).unwrap();
        let est = fit(&sample, &EstimatorConfig::iid(1.0, 0.0), &grid).unwrap();
        assert!(est.kept[0]);
        let f = s.test_function().unwrap();
        let oracle = project(|t| f.h(t, b), est.m, &grid).unwrap();
        let tail = (grid.integrate(|t| f.h(t, b).powi(2)) - oracle.energy()).max(0.0);
        let err = ise(&est, &oracle, tail);
        // only the Monte Carlo error of the kept coefficients remains
        assert!(err < 20.0 * est.kept_count().max(1) as f64 / n as f64, "ise {err}");
    }

    #[test]
    fn ise_identities() {
        let oracle = LaguerreCoeffs::new(vec![0.5, -0.2, 0.1], 1.0).unwrap();
        let exact = ThresholdedEstimate {
            raw: oracle.clone(),
            kept: vec![true; 3],
            lambda: vec![0.0; 3],
            m: 3,
            clamp_nonnegative: false,
        };
        assert_eq!(ise(&exact, &oracle, 0.0), 0.0);
        let zero = ThresholdedEstimate {
            kept: vec![false; 3],
            ..exact.clone()
        };
        assert!((ise(&zero, &oracle, 0.01) - (oracle.energy() + 0.01)).abs() < 1e-15);
        // shorter oracle: surplus estimate coefficients count in full
        let short = LaguerreCoeffs::new(vec![0.5], 1.0).unwrap();
        assert!((ise(&exact, &short, 0.0) - 0.05).abs() < 1e-15);
    }

    #[test]
    fn parseval_ise_matches_quadrature() {
        let b = 1.0;
        let grid = make_grid(b, DEFAULT_ORDER).unwrap();
        let s = ModelSpec { sigma: 0.3, ..spec(64) };
        let sample = Simulator::new(&s).unwrap().simulate(1, 0).unwrap();
        let est = fit(&sample, &EstimatorConfig::iid(0.2, 0.3), &grid).unwrap();
        let f = s.test_function().unwrap();
        let oracle = project(|t| f.h(t, b), est.m, &grid).unwrap();
        let tail = (grid.integrate(|t| f.h(t, b).powi(2)) - oracle.energy()).max(0.0);
        let parseval = ise(&est, &oracle, tail);
        let direct = ise_by_quadrature(&est, |t| f.h(t, b), b, 600.0, 300, 32).unwrap();
        assert!((parseval - direct).abs() < 1e-6, "{parseval} vs {direct}");
    }

    #[test]
    fn assemble_then_fit_rejects_mismatched_grid() {
        let grid = make_grid(2.0, 16).unwrap();
        let s = assemble(&spec(3), vec![0.1, 0.2, 0.3], &[1.0; 3], &[0.0; 3]).unwrap();
        assert!(fit(&s, &EstimatorConfig::iid(1.0, 0.0), &grid).is_err());
    }
}
