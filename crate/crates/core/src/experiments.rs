//! Monte Carlo risk and variance studies over a grid of sample sizes.
//!
//! Replication `r` at sample size `n` draws every random quantity from
//! `derive_seed(master_seed, n)` on the streams of [`replication_streams`],
//! and results land in indexed slots, so every number is independent of the
//! thread schedule.
//!
//! [`replication_streams`]: crate::model::replication_streams

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{make_grid, project, BasisGrid, LaguerreCoeffs, DEFAULT_ORDER};
use crate::error::{Error, Result};
use crate::estimator::{
    estimate_coeff_iid, estimate_coeff_lm, fit, ise, truncation_level, EstimatorConfig, Regime,
};
use crate::model::{ModelSpec, Simulator};
use crate::rng::derive_seed;
use crate::stats::{fit_loglog_slope, mean_se, variance_se};

pub const MIN_N: usize = 64;
pub const MIN_REPLICATIONS: usize = 30;

/// Smoothness index `s` assumed for the target when computing the
/// reference exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Smoothness {
    Finite(f64),
    Infinite,
}

impl Smoothness {
    /// `2s / (2s + 1)`.
    pub fn rate_factor(&self) -> f64 {
        match *self {
            Smoothness::Finite(s) => 2.0 * s / (2.0 * s + 1.0),
            Smoothness::Infinite => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyPlan {
    /// Template; its `n` is replaced by each entry of `n_grid`.
    pub model: ModelSpec,
    pub cfg: EstimatorConfig,
    pub n_grid: Vec<usize>,
    pub replications: usize,
    pub master_seed: u64,
    pub smoothness: Smoothness,
    /// Gauss–Legendre order for basis integrals and the oracle.
    pub grid_order: usize,
}

impl StudyPlan {
    pub fn new(model: ModelSpec, cfg: EstimatorConfig, n_grid: Vec<usize>, replications: usize, master_seed: u64) -> Self {
        Self {
            model,
            cfg,
            n_grid,
            replications,
            master_seed,
            smoothness: Smoothness::Infinite,
            grid_order: DEFAULT_ORDER,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        self.cfg.validate()?;
        if self.cfg.sigma != self.model.sigma {
            return Err(Error::Invalid(format!(
                "estimator sigma {} differs from model sigma {}",
                self.cfg.sigma, self.model.sigma
            )));
        }
        if self.n_grid.is_empty() {
            return Err(Error::Invalid("n_grid must not be empty".into()));
        }
        if self.n_grid[0] < MIN_N {
            return Err(Error::Invalid(format!("n_grid entries must be at least {MIN_N}")));
        }
        if self.n_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Invalid("n_grid must be strictly increasing".into()));
        }
        if self.replications < MIN_REPLICATIONS {
            return Err(Error::Invalid(format!(
                "replications must be at least {MIN_REPLICATIONS}, got {}",
                self.replications
            )));
        }
        if let Smoothness::Finite(s) = self.smoothness {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::Invalid(format!("smoothness must be positive, got {s}")));
            }
        }
        if self.grid_order < 2 {
            return Err(Error::Invalid("grid_order must be at least 2".into()));
        }
        Ok(())
    }

    /// Reference risk exponent for this plan.
    pub fn theoretical_exponent(&self) -> f64 {
        let f = self.smoothness.rate_factor();
        if self.cfg.strong_memory() {
            -2.0 * self.cfg.min_alpha() * f
        } else {
            -f
        }
    }

    /// Reference exponent of `Var θ̂_l`.
    pub fn variance_exponent(&self) -> f64 {
        if self.cfg.strong_memory() {
            -2.0 * self.cfg.min_alpha()
        } else {
            -1.0
        }
    }

    fn grid(&self) -> Result<BasisGrid> {
        make_grid(self.model.b, self.grid_order)
    }
}

/// Quadrature projection of the target `h` and its tail energy
/// `‖h‖²_{[0,b]} − Σ θ_l²`.
#[derive(Debug, Clone, PartialEq)]
pub struct Oracle {
    pub coeffs: LaguerreCoeffs,
    pub tail: f64,
}

pub fn oracle(model: &ModelSpec, m: usize, grid: &BasisGrid) -> Result<Oracle> {
    let f = model.test_function()?;
    let b = model.b;
    let coeffs = project(|t| f.h(t, b), m, grid)?;
    let norm = grid.integrate(|t| f.h(t, b).powi(2));
    let tail = (norm - coeffs.energy()).max(0.0);
    Ok(Oracle { coeffs, tail })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskPoint {
    pub n: usize,
    pub mean_risk: f64,
    pub risk_se: f64,
    pub kept_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskStudyResult {
    pub per_n: Vec<RiskPoint>,
    pub slope: f64,
    pub slope_se: f64,
    pub theoretical_exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariancePoint {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    pub variance_se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceStudyResult {
    pub coeff: usize,
    pub per_n: Vec<VariancePoint>,
    pub slope: f64,
    pub slope_se: f64,
    pub theoretical_exponent: f64,
}

/// Runs `job` for every replication in parallel and returns the results in
/// replication order; the lowest failing replication wins.
fn replicate<T: Send>(n: usize, reps: usize, job: impl Fn(u64) -> Result<T> + Sync) -> Result<Vec<T>> {
    let slots: Vec<Result<T>> = (0..reps as u64).into_par_iter().map(&job).collect();
    slots
        .into_iter()
        .enumerate()
        .map(|(r, res)| {
            res.map_err(|e| Error::Replication {
                n,
                replication: r,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Mean integrated squared error of the thresholded fit at every `n`.
pub fn run_risk_study(plan: &StudyPlan) -> Result<RiskStudyResult> {
    plan.validate()?;
    let grid = plan.grid()?;
    let max_n = *plan.n_grid.last().expect("validated non-empty");
    let truth = oracle(&plan.model, truncation_level(&plan.cfg, max_n), &grid)?;
    let mut per_n = Vec::with_capacity(plan.n_grid.len());
    for &n in &plan.n_grid {
        let sim = Simulator::new(&plan.model.with_n(n))?;
        let seed = derive_seed(plan.master_seed, n as u64);
        let runs = replicate(n, plan.replications, |r| {
            let sample = sim.simulate(seed, r)?;
            let est = fit(&sample, &plan.cfg, &grid)?;
            Ok((ise(&est, &truth.coeffs, truth.tail), est.kept_count() as f64))
        })?;
        let risks: Vec<f64> = runs.iter().map(|r| r.0).collect();
        let kept: Vec<f64> = runs.iter().map(|r| r.1).collect();
        let (mean_risk, risk_se) = mean_se(&risks);
        let (kept_mean, _) = mean_se(&kept);
        log::info!("n={n}: mean risk {mean_risk:.4e} (se {risk_se:.2e}), kept {kept_mean:.2}");
        per_n.push(RiskPoint {
            n,
            mean_risk,
            risk_se,
            kept_mean,
        });
    }
    let pts: Vec<(f64, f64)> = per_n.iter().map(|p| (p.n as f64, p.mean_risk)).collect();
    let (slope, slope_se) = fit_loglog_slope(&pts)?;
    Ok(RiskStudyResult {
        per_n,
        slope,
        slope_se,
        theoretical_exponent: plan.theoretical_exponent(),
    })
}

/// Monte Carlo variance of the raw estimate `θ̂_l` at every `n`.
pub fn run_variance_study(plan: &StudyPlan, l: usize) -> Result<VarianceStudyResult> {
    plan.validate()?;
    let grid = plan.grid()?;
    let mut per_n = Vec::with_capacity(plan.n_grid.len());
    for &n in &plan.n_grid {
        let sim = Simulator::new(&plan.model.with_n(n))?;
        let seed = derive_seed(plan.master_seed, n as u64);
        let est: Vec<f64> = replicate(n, plan.replications, |r| {
            let sample = sim.simulate(seed, r)?;
            match plan.cfg.effective_regime() {
                Regime::Iid => estimate_coeff_iid(&sample, l, &plan.cfg, &grid),
                Regime::Lm => estimate_coeff_lm(&sample, l, &plan.cfg, &grid),
            }
        })?;
        let (mean, _) = mean_se(&est);
        let (variance, variance_se) = variance_se(&est);
        log::info!("n={n}: var(theta_{l}) {variance:.4e} (se {variance_se:.2e})");
        per_n.push(VariancePoint {
            n,
            mean,
            variance,
            variance_se,
        });
    }
    let pts: Vec<(f64, f64)> = per_n.iter().map(|p| (p.n as f64, p.variance)).collect();
    let (slope, slope_se) = fit_loglog_slope(&pts)?;
    Ok(VarianceStudyResult {
        coeff: l,
        per_n,
        slope,
        slope_se,
        theoretical_exponent: plan.variance_exponent(),
    })
}
