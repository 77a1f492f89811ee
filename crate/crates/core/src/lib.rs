//! Laguerre-series hard-thresholding estimation of `h = f²` in the
//! regression model `y = f(t) ε + σ z`, with i.i.d. or long-memory Gaussian
//! errors, and Monte Carlo studies of its variance and risk.

pub mod basis;
pub mod error;
pub mod estimator;
pub mod experiments;
pub mod model;
pub mod noise;
pub mod rng;
pub mod stats;

pub use basis::{laguerre_fn, laguerre_fn_row, make_grid, project, reconstruct, BasisGrid, LaguerreCoeffs};
pub use error::{Error, Result};
pub use estimator::{fit, ise, threshold, truncation_level, EstimatorConfig, Regime, ThresholdedEstimate};
pub use experiments::{
    run_risk_study, run_variance_study, RiskPoint, RiskStudyResult, Smoothness, StudyPlan, VariancePoint,
    VarianceStudyResult,
};
pub use model::{simulate, Design, ModelSpec, RegressionSample, Simulator, TestFunction};
pub use noise::{gen_iid, gen_lm, NoiseKind, NoiseSpec};
pub use stats::fit_loglog_slope;
