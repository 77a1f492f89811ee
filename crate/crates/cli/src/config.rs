//! Flat TOML run configuration.
//!
//! Every key sits at the top level; values are strings, numbers, booleans,
//! or arrays of numbers. Unknown keys are rejected. See the README for the
//! full key table and defaults.

use std::path::{Path, PathBuf};

use laguerre_thresh::estimator::DEFAULT_M_CAP;
use laguerre_thresh::experiments::{MIN_N, MIN_REPLICATIONS};
use laguerre_thresh::model::{Design, MAX_RATE_SPAN};
use laguerre_thresh::{EstimatorConfig, ModelSpec, NoiseKind, NoiseSpec, Regime, Smoothness, StudyPlan, TestFunction};
use serde::Serialize;
use toml::{Table, Value};

use crate::error::{CliError, Result};

pub const KEYS: [&str; 28] = [
    "function",
    "amplitude",
    "design",
    "design_rate",
    "sigma",
    "b",
    "n",
    "noise",
    "alpha1",
    "alpha2",
    "regime",
    "gamma",
    "gamma1",
    "gamma2",
    "m_cap",
    "clamp_nonnegative",
    "n_grid",
    "replications",
    "seed",
    "smoothness",
    "grid_order",
    "gamma_sweep",
    "coeff_index",
    "max_lag",
    "paths",
    "eigen_n",
    "k_max",
    "bound_k_max",
];

/// Fully resolved configuration. Serialises back to the same key names, so
/// an emitted summary can be replayed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Config {
    #[serde(skip)]
    pub path: PathBuf,
    pub function: String,
    pub amplitude: f64,
    pub design: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub design_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    pub b: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub noise: String,
    pub alpha1: f64,
    pub alpha2: f64,
    pub regime: String,
    pub gamma: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub m_cap: usize,
    pub clamp_nonnegative: bool,
    pub n_grid: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replications: Option<usize>,
    pub seed: u64,
    pub smoothness: String,
    pub grid_order: usize,
    pub gamma_sweep: Vec<f64>,
    pub coeff_index: usize,
    pub max_lag: usize,
    pub paths: usize,
    pub eigen_n: usize,
    pub k_max: usize,
    pub bound_k_max: usize,
}

struct Source<'a> {
    path: &'a Path,
    text: &'a str,
    table: Table,
}

impl<'a> Source<'a> {
    fn line_of(&self, key: &str) -> Option<usize> {
        self.text.lines().position(|l| {
            let l = l.trim_start();
            l.strip_prefix(key)
                .is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map(|i| i + 1)
    }

    fn err(&self, key: &str, msg: impl Into<String>) -> CliError {
        CliError::Config {
            path: self.path.to_path_buf(),
            key: Some(key.to_string()),
            line: self.line_of(key),
            msg: msg.into(),
        }
    }

    fn type_err(&self, key: &str, want: &str, got: &Value) -> CliError {
        self.err(key, format!("expected {want}, found {}", got.type_str()))
    }

    fn missing(&self, key: &str, why: &str) -> CliError {
        self.err(key, format!("missing key `{key}` ({why})"))
    }

    fn string(&self, key: &str) -> Result<Option<String>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(v) => Err(self.type_err(key, "a string", v)),
        }
    }

    fn float(&self, key: &str) -> Result<Option<f64>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::Float(x)) => Ok(Some(*x)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(v) => Err(self.type_err(key, "a number", v)),
        }
    }

    fn uint(&self, key: &str) -> Result<Option<u64>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as u64)),
            Some(Value::Integer(i)) => Err(self.err(key, format!("must be nonnegative, got {i}"))),
            Some(v) => Err(self.type_err(key, "an integer", v)),
        }
    }

    fn size(&self, key: &str) -> Result<Option<usize>> {
        Ok(self.uint(key)?.map(|v| v as usize))
    }

    fn boolean(&self, key: &str) -> Result<Option<bool>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::Boolean(b)) => Ok(Some(*b)),
            Some(v) => Err(self.type_err(key, "a boolean", v)),
        }
    }

    fn array<T>(&self, key: &str, want: &str, item: impl Fn(&Value) -> Option<T>) -> Result<Option<Vec<T>>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::Array(a)) => a
                .iter()
                .map(|v| item(v).ok_or_else(|| self.type_err(key, want, v)))
                .collect::<Result<Vec<_>>>()
                .map(Some),
            Some(v) => Err(self.type_err(key, "an array", v)),
        }
    }
}

fn in_unit(x: f64) -> bool {
    x > 0.0 && x <= 1.0
}

/// Reads and validates the configuration at `path`.
pub fn parse_config(path: &Path) -> Result<Config> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_str(&text, path)
}

/// Parses configuration text; `path` is used only in messages.
pub fn parse_config_str(text: &str, path: &Path) -> Result<Config> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| CliError::Config {
        path: path.to_path_buf(),
        key: None,
        line: e.span().map(|s| text[..s.start].matches('\n').count() + 1),
        msg: e.message().to_string(),
    })?;
    let src = Source { path, text, table };
    for key in src.table.keys() {
        if !KEYS.contains(&key.as_str()) {
            return Err(src.err(key, format!("unknown key `{key}`")));
        }
    }

    let function = src.string("function")?.unwrap_or_else(|| "phi0-sqrt".into());
    let amplitude = src.float("amplitude")?.unwrap_or(1.0);
    if let Err(e) = TestFunction::new(&function, amplitude) {
        let key = if amplitude.is_finite() { "function" } else { "amplitude" };
        return Err(src.err(key, e.to_string()));
    }

    let b = src.float("b")?.unwrap_or(1.0);
    if !(b > 0.0 && b.is_finite()) {
        return Err(src.err("b", format!("b must be positive and finite, got {b}")));
    }
    let design = src.string("design")?.unwrap_or_else(|| "uniform".into());
    let design_rate = src.float("design_rate")?;
    match design.as_str() {
        "uniform" => {
            if design_rate.is_some() {
                return Err(src.err("design_rate", "only valid with design = \"trunc-exp\""));
            }
        }
        "trunc-exp" => {
            let rate = design_rate.ok_or_else(|| src.missing("design_rate", "required by trunc-exp design"))?;
            if !(rate > 0.0 && rate.is_finite()) {
                return Err(src.err("design_rate", format!("design_rate must be positive, got {rate}")));
            }
            if rate * b > MAX_RATE_SPAN {
                return Err(src.err(
                    "design_rate",
                    format!("design_rate*b = {} exceeds {MAX_RATE_SPAN}; density lower bound degenerates", rate * b),
                ));
            }
        }
        other => {
            return Err(src.err("design", format!("unknown design `{other}` (uniform, trunc-exp)")));
        }
    }

    let sigma = src.float("sigma")?;
    if let Some(s) = sigma {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(src.err("sigma", format!("sigma must be nonnegative, got {s}")));
        }
    }

    let noise = src.string("noise")?.unwrap_or_else(|| "iid".into());
    let long = match noise.as_str() {
        "iid" | "noiseless" => false,
        "long-memory" => true,
        other => return Err(src.err("noise", format!("unknown noise `{other}` (iid, long-memory, noiseless)"))),
    };
    let alpha = |key: &str| -> Result<f64> {
        match src.float(key)? {
            Some(a) if in_unit(a) => Ok(a),
            Some(a) => Err(src.err(key, format!("{key} must lie in (0,1], got {a}"))),
            None if long => Err(src.missing(key, "required by long-memory noise")),
            None => Ok(1.0),
        }
    };
    let alpha1 = alpha("alpha1")?;
    let alpha2 = alpha("alpha2")?;

    let regime = src
        .string("regime")?
        .unwrap_or_else(|| if long { "lm".into() } else { "iid".into() });
    if regime != "iid" && regime != "lm" {
        return Err(src.err("regime", format!("unknown regime `{regime}` (iid, lm)")));
    }
    let positive = |key: &str, default: Option<f64>| -> Result<f64> {
        let v = src.float(key)?.or(default).expect("default supplied");
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(src.err(key, format!("{key} must be positive, got {v}")))
        }
    };
    let gamma = positive("gamma", Some(1.0))?;
    let gamma1 = positive("gamma1", Some(gamma))?;
    let gamma2 = positive("gamma2", Some(gamma))?;
    let m_cap = src.size("m_cap")?.unwrap_or(DEFAULT_M_CAP);
    if m_cap == 0 {
        return Err(src.err("m_cap", "m_cap must be at least 1"));
    }
    let clamp_nonnegative = src.boolean("clamp_nonnegative")?.unwrap_or(false);

    let n = src.size("n")?;
    let n_grid = src
        .array("n_grid", "integers", |v| v.as_integer().filter(|i| *i >= 0).map(|i| i as usize))?
        .unwrap_or_default();
    if !n_grid.is_empty() {
        if n_grid[0] < MIN_N {
            return Err(src.err("n_grid", format!("n_grid entries must be at least {MIN_N}")));
        }
        if n_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(src.err("n_grid", "n_grid must be strictly increasing"));
        }
        if n_grid.len() < 3 {
            return Err(src.err("n_grid", "n_grid needs at least 3 sizes for a slope fit"));
        }
    }
    let replications = src.size("replications")?;
    if let Some(r) = replications {
        if r < MIN_REPLICATIONS {
            return Err(src.err("replications", format!("replications must be at least {MIN_REPLICATIONS}, got {r}")));
        }
    }
    let seed = src.uint("seed")?.unwrap_or(1);
    let smoothness = match src.table.get("smoothness") {
        None => "inf".to_string(),
        Some(Value::String(s)) if s == "inf" => s.clone(),
        Some(v) => match v.as_float().or(v.as_integer().map(|i| i as f64)) {
            Some(s) if s > 0.0 && s.is_finite() => format!("{s}"),
            _ => return Err(src.err("smoothness", "smoothness must be a positive number or \"inf\"")),
        },
    };
    let grid_order = src.size("grid_order")?.unwrap_or(laguerre_thresh::basis::DEFAULT_ORDER);
    if grid_order < 2 {
        return Err(src.err("grid_order", "grid_order must be at least 2"));
    }
    let gamma_sweep = src
        .array("gamma_sweep", "positive numbers", |v| {
            v.as_float().or(v.as_integer().map(|i| i as f64)).filter(|g| *g > 0.0 && g.is_finite())
        })?
        .unwrap_or_default();

    let max_lag = src.size("max_lag")?.unwrap_or(100);
    let paths = src.size("paths")?.unwrap_or(200);
    if paths < 2 {
        return Err(src.err("paths", "paths must be at least 2"));
    }
    let eigen_n = src.size("eigen_n")?.unwrap_or(512);
    if eigen_n == 0 || eigen_n > laguerre_thresh::noise::EIGEN_BUDGET {
        return Err(src.err("eigen_n", format!("eigen_n must lie in 1..={}", laguerre_thresh::noise::EIGEN_BUDGET)));
    }

    Ok(Config {
        path: path.to_path_buf(),
        function,
        amplitude,
        design,
        design_rate,
        sigma,
        b,
        n,
        noise,
        alpha1,
        alpha2,
        regime,
        gamma,
        gamma1,
        gamma2,
        m_cap,
        clamp_nonnegative,
        n_grid,
        replications,
        seed,
        smoothness,
        grid_order,
        gamma_sweep,
        coeff_index: src.size("coeff_index")?.unwrap_or(0),
        max_lag,
        paths,
        eigen_n,
        k_max: src.size("k_max")?.unwrap_or(30),
        bound_k_max: src.size("bound_k_max")?.unwrap_or(1 << 14),
    })
}

impl Config {
    fn missing(&self, key: &str, why: &str) -> CliError {
        CliError::Config {
            path: self.path.clone(),
            key: Some(key.into()),
            line: None,
            msg: format!("missing key `{key}` ({why})"),
        }
    }

    pub fn noise_spec(&self) -> NoiseSpec {
        let kind = match self.noise.as_str() {
            "long-memory" => NoiseKind::LongMemory,
            "noiseless" => NoiseKind::Noiseless,
            _ => NoiseKind::Iid,
        };
        NoiseSpec {
            kind,
            alpha1: self.alpha1,
            alpha2: self.alpha2,
        }
    }

    pub fn design_spec(&self) -> Design {
        match self.design_rate {
            Some(rate) => Design::TruncExp { rate },
            None => Design::Uniform,
        }
    }

    /// Known noise scale; required by every command that touches data.
    pub fn sigma(&self) -> Result<f64> {
        self.sigma
            .ok_or_else(|| self.missing("sigma", "the noise scale is a required input"))
    }

    pub fn model_spec(&self, n: usize) -> Result<ModelSpec> {
        Ok(ModelSpec {
            function: self.function.clone(),
            amplitude: self.amplitude,
            design: self.design_spec(),
            sigma: self.sigma()?,
            b: self.b,
            n,
            noise: self.noise_spec(),
        })
    }

    pub fn estimator_config(&self) -> Result<EstimatorConfig> {
        Ok(EstimatorConfig {
            regime: if self.regime == "lm" { Regime::Lm } else { Regime::Iid },
            gamma: self.gamma,
            gamma1: Some(self.gamma1),
            gamma2: Some(self.gamma2),
            sigma: self.sigma()?,
            alpha1: self.alpha1,
            alpha2: self.alpha2,
            m_cap: self.m_cap,
            clamp_nonnegative: self.clamp_nonnegative,
            threshold_override: None,
        })
    }

    pub fn smoothness_spec(&self) -> Smoothness {
        match self.smoothness.parse::<f64>() {
            Ok(s) if s.is_finite() => Smoothness::Finite(s),
            _ => Smoothness::Infinite,
        }
    }

    /// Sample size for single-sample commands.
    pub fn require_n(&self) -> Result<usize> {
        self.n
            .filter(|n| *n >= 2)
            .ok_or_else(|| self.missing("n", "a sample size of at least 2 is required"))
    }

    pub fn study_plan(&self) -> Result<StudyPlan> {
        if self.n_grid.is_empty() {
            return Err(self.missing("n_grid", "required by studies"));
        }
        let replications = self
            .replications
            .ok_or_else(|| self.missing("replications", "required by studies"))?;
        let mut plan = StudyPlan::new(
            self.model_spec(0)?,
            self.estimator_config()?,
            self.n_grid.clone(),
            replications,
            self.seed,
        );
        plan.smoothness = self.smoothness_spec();
        plan.grid_order = self.grid_order;
        plan.validate()?;
        Ok(plan)
    }
}
