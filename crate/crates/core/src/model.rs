//! Data generation for `y_i = f(t_i) ε_i + σ z_i` with random design
//! `t_i ~ g` on `[0, b]`, and the catalogs of test functions and design
//! densities.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::basis::LaguerreCoeffs;
use crate::error::{Error, Result};
use crate::noise::{gen_iid, FgnSampler, NoiseKind, NoiseSource, NoiseSpec};
use crate::rng::stream_rng;

/// Largest `rate·b` accepted for the truncated exponential, which keeps
/// `m_1 = g(b)` comfortably above zero.
pub const MAX_RATE_SPAN: f64 = 40.0;

/// Design density on `[0, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Design {
    Uniform,
    /// `g(t) ∝ e^{−rate·t}` restricted to `[0, b]`.
    TruncExp { rate: f64 },
}

impl Design {
    pub fn validate(&self, b: f64) -> Result<()> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::Invalid(format!("b must be positive and finite, got {b}")));
        }
        if let Design::TruncExp { rate } = *self {
            if !(rate > 0.0 && rate.is_finite()) {
                return Err(Error::Invalid(format!(
                    "design rate must be positive, got {rate} (lower density bound m_1 undefined)"
                )));
            }
            if rate * b > MAX_RATE_SPAN {
                return Err(Error::Invalid(format!(
                    "design rate*b = {} exceeds {MAX_RATE_SPAN}; lower density bound m_1 = {:e} is degenerate",
                    rate * b,
                    self.m1(b)
                )));
            }
        }
        Ok(())
    }

    /// `g(t)` for `t ∈ [0, b]`, zero outside.
    pub fn pdf(&self, t: f64, b: f64) -> f64 {
        if !(0.0..=b).contains(&t) {
            return 0.0;
        }
        match *self {
            Design::Uniform => 1.0 / b,
            Design::TruncExp { rate } => rate * (-rate * t).exp() / -(-rate * b).exp_m1(),
        }
    }

    /// Lower bound `m_1` of the density on `[0, b]`.
    pub fn m1(&self, b: f64) -> f64 {
        self.pdf(b, b)
    }

    /// Upper bound `m_2` of the density on `[0, b]`.
    pub fn m2(&self, b: f64) -> f64 {
        self.pdf(0.0, b)
    }

    /// Inverse CDF at `u ∈ [0, 1)`.
    pub fn quantile(&self, u: f64, b: f64) -> f64 {
        let t = match *self {
            Design::Uniform => u * b,
            Design::TruncExp { rate } => {
                let mass = -(-rate * b).exp_m1();
                -(-u * mass).ln_1p() / rate
            }
        };
        t.clamp(0.0, b)
    }
}

/// `n` i.i.d. draws from `design` on `[0, b]` by inverse CDF.
pub fn sample_design(n: usize, design: &Design, b: f64, seed: u64, stream_id: u64) -> Result<Vec<f64>> {
    design.validate(b)?;
    let mut rng = stream_rng(seed, stream_id);
    Ok((0..n).map(|_| design.quantile(rng.random::<f64>(), b)).collect())
}

/// Names accepted by [`TestFunction::new`].
pub const CATALOG: [&str; 4] = ["phi0-sqrt", "cosine-bump", "shifted-exp", "constant"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    /// `e^{−t/4}`, so `f² = φ_0`.
    Phi0Sqrt,
    /// `(1 + cos(πt/b)) / 2`.
    CosineBump,
    /// `(1 + e^{−t}) / 2`, bounded below by 1/2.
    ShiftedExp,
    Constant,
}

/// A catalog regression function scaled by `amplitude`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunction {
    shape: Shape,
    amplitude: f64,
}

impl TestFunction {
    pub fn new(name: &str, amplitude: f64) -> Result<Self> {
        let shape = match name {
            "phi0-sqrt" => Shape::Phi0Sqrt,
            "cosine-bump" => Shape::CosineBump,
            "shifted-exp" => Shape::ShiftedExp,
            "constant" => Shape::Constant,
            _ => {
                return Err(Error::UnknownFunction {
                    name: name.to_string(),
                    catalog: CATALOG.join(", "),
                })
            }
        };
        if !amplitude.is_finite() {
            return Err(Error::Invalid(format!("amplitude must be finite, got {amplitude}")));
        }
        Ok(Self { shape, amplitude })
    }

    pub fn name(&self) -> &'static str {
        match self.shape {
            Shape::Phi0Sqrt => CATALOG[0],
            Shape::CosineBump => CATALOG[1],
            Shape::ShiftedExp => CATALOG[2],
            Shape::Constant => CATALOG[3],
        }
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// `f(t)` on `[0, b]`.
    pub fn eval(&self, t: f64, b: f64) -> f64 {
        let base = match self.shape {
            Shape::Phi0Sqrt => (-t / 4.0).exp(),
            Shape::CosineBump => 0.5 * (1.0 + (std::f64::consts::PI * t / b).cos()),
            Shape::ShiftedExp => 0.5 * (1.0 + (-t).exp()),
            Shape::Constant => 1.0,
        };
        self.amplitude * base
    }

    /// `h(t) = f(t)²`, the estimation target.
    pub fn h(&self, t: f64, b: f64) -> f64 {
        self.eval(t, b).powi(2)
    }

    /// Bound `M_2 ≥ sup |f|` on `[0, b]`.
    pub fn m2(&self) -> f64 {
        self.amplitude.abs()
    }

    /// Whether the Laguerre coefficients of `h` on `[0, ∞)` are known in
    /// closed form.
    pub fn exact_coeffs(&self) -> bool {
        self.shape == Shape::Phi0Sqrt
    }
}

/// Full description of one data-generating process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub function: String,
    pub amplitude: f64,
    pub design: Design,
    pub sigma: f64,
    pub b: f64,
    pub n: usize,
    pub noise: NoiseSpec,
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        self.design.validate(self.b)?;
        TestFunction::new(&self.function, self.amplitude)?;
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::Invalid(format!("sigma must be nonnegative, got {}", self.sigma)));
        }
        self.noise.validate()
    }

    pub fn test_function(&self) -> Result<TestFunction> {
        TestFunction::new(&self.function, self.amplitude)
    }

    pub fn with_n(&self, n: usize) -> Self {
        Self { n, ..self.clone() }
    }
}

/// Observed pairs `(t_i, y_i)` and the process that generated them.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionSample {
    pub t: Vec<f64>,
    pub y: Vec<f64>,
    pub spec: ModelSpec,
}

impl RegressionSample {
    pub fn new(t: Vec<f64>, y: Vec<f64>, spec: ModelSpec) -> Result<Self> {
        if t.len() != y.len() {
            return Err(Error::Invalid(format!("{} design points but {} responses", t.len(), y.len())));
        }
        if let Some(i) = t.iter().position(|v| !(0.0..=spec.b).contains(v)) {
            return Err(Error::Invalid(format!("design point {i} = {} outside [0, {}]", t[i], spec.b)));
        }
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::Invalid(format!("response {i} is not finite")));
        }
        Ok(Self { t, y, spec })
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

/// `y_i = f(t_i) ε_i + σ z_i` for given design and noise vectors.
pub fn assemble(spec: &ModelSpec, t: Vec<f64>, eps: &[f64], z: &[f64]) -> Result<RegressionSample> {
    if eps.len() != t.len() || z.len() != t.len() {
        return Err(Error::Invalid("design and noise lengths differ".into()));
    }
    let f = spec.test_function()?;
    let y = t
        .iter()
        .zip(eps.iter().zip(z))
        .map(|(&ti, (&e, &zi))| f.eval(ti, spec.b) * e + spec.sigma * zi)
        .collect();
    RegressionSample::new(t, y, spec.clone())
}

/// Stream ids used by replication `r`: design, `ε`, `z`.
pub fn replication_streams(r: u64) -> [u64; 3] {
    [3 * r, 3 * r + 1, 3 * r + 2]
}

/// Reusable generator for one `ModelSpec`; holds the long-memory sampler
/// plans so repeated replications skip the setup FFT.
#[derive(Debug)]
pub struct Simulator {
    spec: ModelSpec,
    f: TestFunction,
    eps: Option<FgnSampler>,
    z: Option<FgnSampler>,
}

impl Simulator {
    pub fn new(spec: &ModelSpec) -> Result<Self> {
        spec.validate()?;
        let f = spec.test_function()?;
        let plan = |which| -> Result<Option<FgnSampler>> {
            let alpha = spec.noise.alpha(which);
            if spec.noise.kind == NoiseKind::LongMemory && alpha < 1.0 && spec.n > 0 {
                Ok(Some(FgnSampler::new(spec.n, alpha)?))
            } else {
                Ok(None)
            }
        };
        Ok(Self {
            spec: spec.clone(),
            f,
            eps: plan(NoiseSource::Epsilon)?,
            z: plan(NoiseSource::Z)?,
        })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn function(&self) -> TestFunction {
        self.f
    }

    fn noise(&self, sampler: &Option<FgnSampler>, seed: u64, stream: u64) -> Result<Vec<f64>> {
        match sampler {
            Some(s) => s.sample(seed, stream),
            None => Ok(gen_iid(self.spec.n, seed, stream)),
        }
    }

    /// Replication `replication` of the model, a pure function of
    /// `(seed, replication)`.
    pub fn simulate(&self, seed: u64, replication: u64) -> Result<RegressionSample> {
        let n = self.spec.n;
        let [s_t, s_eps, s_z] = replication_streams(replication);
        let t = sample_design(n, &self.spec.design, self.spec.b, seed, s_t)?;
        let (eps, z) = if self.spec.noise.kind == NoiseKind::Noiseless {
            (vec![1.0; n], vec![0.0; n])
        } else {
            (self.noise(&self.eps, seed, s_eps)?, self.noise(&self.z, seed, s_z)?)
        };
        assemble(&self.spec, t, &eps, &z)
    }
}

/// One-shot convenience over [`Simulator`].
pub fn simulate(spec: &ModelSpec, seed: u64, replication: u64) -> Result<RegressionSample> {
    Simulator::new(spec)?.simulate(seed, replication)
}

/// Membership in the Laguerre–Sobolev ball: `Σ (l ∨ 1)^{2s} θ_l² ≤ A`.
pub fn sobolev_tail_check(coeffs: &LaguerreCoeffs, s: f64, a: f64) -> bool {
    let sum: f64 = coeffs
        .theta()
        .iter()
        .enumerate()
        .map(|(l, th)| (l.max(1) as f64).powf(2.0 * s) * th * th)
        .sum();
    sum <= a
}
