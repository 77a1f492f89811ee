use laguerre_thresh::basis::{gram_deviation, make_grid, max_abs_on};
use laguerre_thresh::experiments::{oracle, run_risk_study, run_variance_study, RiskStudyResult};
use laguerre_thresh::noise::{covariance_eigen_range, fgn_autocov, pooled_autocov, FgnSampler};
use laguerre_thresh::rng::derive_seed;
use laguerre_thresh::{fit, fit_loglog_slope, ise, simulate, StudyPlan};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Config;
use crate::error::Result;
use crate::output::{csv, fmt_f64, to_json};
use crate::Command;

pub type Files = Vec<(String, String)>;

#[derive(Serialize)]
struct Summary<'a, R: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: Command,
    #[serde(flatten)]
    result: R,
    config: &'a Config,
}

fn summary<R: Serialize>(command: Command, result: R, config: &Config) -> (String, String) {
    let s = Summary {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        result,
        config,
    };
    ("summary.json".into(), to_json(&s))
}

pub fn risk_csv(result: &RiskStudyResult) -> String {
    csv(
        "n,mean_risk,risk_se,kept_mean",
        result
            .per_n
            .iter()
            .map(|p| vec![p.n.to_string(), fmt_f64(p.mean_risk), fmt_f64(p.risk_se), fmt_f64(p.kept_mean)]),
    )
}

pub fn simulate_cmd(cfg: &Config) -> Result<Files> {
    let n = cfg.require_n()?;
    let sample = simulate(&cfg.model_spec(n)?, cfg.seed, 0)?;
    let body = csv(
        "i,t,y",
        sample
            .t
            .iter()
            .zip(&sample.y)
            .enumerate()
            .map(|(i, (t, y))| vec![i.to_string(), fmt_f64(*t), fmt_f64(*y)]),
    );
    #[derive(Serialize)]
    struct R {
        n: usize,
    }
    Ok(vec![("sample.csv".into(), body), summary(Command::Simulate, R { n }, cfg)])
}

pub fn estimate_cmd(cfg: &Config) -> Result<Files> {
    let n = cfg.require_n()?;
    let spec = cfg.model_spec(n)?;
    let est_cfg = cfg.estimator_config()?;
    let grid = make_grid(cfg.b, cfg.grid_order)?;
    let sample = simulate(&spec, cfg.seed, 0)?;
    let est = fit(&sample, &est_cfg, &grid)?;
    let truth = oracle(&spec, est.m, &grid)?;
    let body = csv(
        "l,theta_hat,kept,lambda",
        est.raw
            .theta()
            .iter()
            .zip(&est.kept)
            .zip(&est.lambda)
            .enumerate()
            .map(|(l, ((v, k), lam))| vec![l.to_string(), fmt_f64(*v), u8::from(*k).to_string(), fmt_f64(*lam)]),
    );
    #[derive(Serialize)]
    struct R {
        n: usize,
        m: usize,
        lambda: f64,
        kept_count: usize,
        ise: f64,
    }
    let r = R {
        n,
        m: est.m,
        lambda: est.lambda.first().copied().unwrap_or(0.0),
        kept_count: est.kept_count(),
        ise: ise(&est, &truth.coeffs, truth.tail),
    };
    Ok(vec![("coeffs.csv".into(), body), summary(Command::Estimate, r, cfg)])
}

#[derive(Serialize)]
struct SweepEntry {
    gamma: f64,
    file: String,
    slope: f64,
    slope_se: f64,
}

fn with_gamma(plan: &StudyPlan, gamma: f64) -> StudyPlan {
    let mut p = plan.clone();
    p.cfg.gamma = gamma;
    p.cfg.gamma1 = Some(gamma);
    p.cfg.gamma2 = Some(gamma);
    p
}

pub fn risk_study_cmd(cfg: &Config) -> Result<Files> {
    let plan = cfg.study_plan()?;
    let result = run_risk_study(&plan)?;
    let mut files = vec![("risk.csv".to_string(), risk_csv(&result))];
    let mut sweep = Vec::new();
    for &g in &cfg.gamma_sweep {
        log::info!("gamma sweep: gamma={g}");
        let r = run_risk_study(&with_gamma(&plan, g))?;
        let file = format!("risk_gamma_{g}.csv");
        files.push((file.clone(), risk_csv(&r)));
        sweep.push(SweepEntry {
            gamma: g,
            file,
            slope: r.slope,
            slope_se: r.slope_se,
        });
    }
    #[derive(Serialize)]
    struct R {
        slope: f64,
        slope_se: f64,
        theoretical_exponent: f64,
        #[serde(skip_serializing_if = "Vec::is_empty")]
        sweep: Vec<SweepEntry>,
    }
    let r = R {
        slope: result.slope,
        slope_se: result.slope_se,
        theoretical_exponent: result.theoretical_exponent,
        sweep,
    };
    files.push(summary(Command::RiskStudy, r, cfg));
    Ok(files)
}

pub fn variance_study_cmd(cfg: &Config) -> Result<Files> {
    let plan = cfg.study_plan()?;
    let result = run_variance_study(&plan, cfg.coeff_index)?;
    let body = csv(
        "n,mean,variance,variance_se",
        result
            .per_n
            .iter()
            .map(|p| vec![p.n.to_string(), fmt_f64(p.mean), fmt_f64(p.variance), fmt_f64(p.variance_se)]),
    );
    #[derive(Serialize)]
    struct R {
        coeff: usize,
        slope: f64,
        slope_se: f64,
        theoretical_exponent: f64,
    }
    let r = R {
        coeff: result.coeff,
        slope: result.slope,
        slope_se: result.slope_se,
        theoretical_exponent: result.theoretical_exponent,
    };
    Ok(vec![("variance.csv".into(), body), summary(Command::VarianceStudy, r, cfg)])
}

pub fn noise_check_cmd(cfg: &Config) -> Result<Files> {
    let n = cfg.require_n()?;
    let alpha = cfg.noise_spec().alpha(laguerre_thresh::noise::NoiseSource::Epsilon);
    let sampler = FgnSampler::new(n, alpha)?;
    let seed = derive_seed(cfg.seed, 0);
    let paths = (0..cfg.paths as u64)
        .into_par_iter()
        .map(|r| sampler.sample(seed, r))
        .collect::<laguerre_thresh::Result<Vec<_>>>()?;
    let pooled = pooled_autocov(&paths, cfg.max_lag);
    let theory = (0..pooled.mean.len())
        .map(|h| fgn_autocov(h, alpha))
        .collect::<laguerre_thresh::Result<Vec<_>>>()?;
    let body = csv(
        "lag,mean,se,theory",
        (0..pooled.mean.len()).map(|h| {
            vec![h.to_string(), fmt_f64(pooled.mean[h]), fmt_f64(pooled.se[h]), fmt_f64(theory[h])]
        }),
    );
    let max_z = (0..pooled.mean.len())
        .filter(|&h| pooled.se[h] > 0.0)
        .map(|h| (pooled.mean[h] - theory[h]).abs() / pooled.se[h])
        .fold(0.0, f64::max);
    let decay: Vec<(f64, f64)> = (10..pooled.mean.len()).map(|h| (h as f64, pooled.mean[h])).collect();
    let decay_slope = if alpha < 1.0 { fit_loglog_slope(&decay).ok().map(|s| s.0) } else { None };
    let (eigen_min, eigen_max) = covariance_eigen_range(cfg.eigen_n, alpha)?;
    #[derive(Serialize)]
    struct R {
        alpha: f64,
        n: usize,
        paths: usize,
        method: String,
        max_abs_z: f64,
        decay_slope: Option<f64>,
        eigen_n: usize,
        eigen_min: f64,
        eigen_max: f64,
    }
    let r = R {
        alpha,
        n,
        paths: cfg.paths,
        method: format!("{:?}", sampler.method()).to_lowercase(),
        max_abs_z: max_z,
        decay_slope,
        eigen_n: cfg.eigen_n,
        eigen_min,
        eigen_max,
    };
    Ok(vec![("autocov.csv".into(), body), summary(Command::NoiseCheck, r, cfg)])
}

pub fn basis_check_cmd(cfg: &Config) -> Result<Files> {
    let grid = make_grid(cfg.b, cfg.grid_order)?;
    let points: Vec<f64> = (0..1000).map(|i| cfg.b * i as f64 / 999.0).collect();
    #[derive(Serialize)]
    struct R {
        gram_k_max: usize,
        gram_deviation: f64,
        bound_k_max: usize,
        max_abs_phi: f64,
    }
    let r = R {
        gram_k_max: cfg.k_max,
        gram_deviation: gram_deviation(cfg.k_max, &grid),
        bound_k_max: cfg.bound_k_max,
        max_abs_phi: max_abs_on(cfg.bound_k_max, &points)?,
    };
    Ok(vec![summary(Command::BasisCheck, r, cfg)])
}
