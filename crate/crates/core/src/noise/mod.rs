//! Error sequences for the two noise sources.
//!
//! Long-memory noise is fractional Gaussian noise with Hurst index
//! `H = 1 − α/2`, whose autocovariance decays like `h^{−α}`. `α = 1` is white
//! noise and is generated by the i.i.d. path, bit for bit.

mod diagnostics;
mod sampler;

pub use diagnostics::{covariance_eigen_range, pooled_autocov, sample_autocov, PooledAutocov, EIGEN_BUDGET};
pub use sampler::{embedding_size, FgnSampler, SamplerMethod};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Error-structure family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    Iid,
    LongMemory,
    /// Diagnostic: `ε ≡ 1`, `z ≡ 0`, so `y = f(t)` exactly.
    Noiseless,
}

/// Which of the two error sequences a path feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NoiseSource {
    /// Multiplicative error `ε`.
    Epsilon,
    /// Additive error `z`.
    Z,
}

/// Noise descriptor. `alpha1` belongs to `ε`, `alpha2` to `z`; both are
/// forced to 1 unless the kind is long memory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub alpha1: f64,
    pub alpha2: f64,
}

fn check_alpha(name: &str, alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::Invalid(format!("{name} must lie in (0,1], got {alpha}")))
    }
}

impl NoiseSpec {
    pub fn iid() -> Self {
        Self {
            kind: NoiseKind::Iid,
            alpha1: 1.0,
            alpha2: 1.0,
        }
    }

    pub fn noiseless() -> Self {
        Self {
            kind: NoiseKind::Noiseless,
            alpha1: 1.0,
            alpha2: 1.0,
        }
    }

    pub fn long_memory(alpha1: f64, alpha2: f64) -> Result<Self> {
        check_alpha("alpha1", alpha1)?;
        check_alpha("alpha2", alpha2)?;
        Ok(Self {
            kind: NoiseKind::LongMemory,
            alpha1,
            alpha2,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind == NoiseKind::LongMemory {
            check_alpha("alpha1", self.alpha1)?;
            check_alpha("alpha2", self.alpha2)?;
        }
        Ok(())
    }

    /// Memory parameter in effect for `which`.
    pub fn alpha(&self, which: NoiseSource) -> f64 {
        match (self.kind, which) {
            (NoiseKind::LongMemory, NoiseSource::Epsilon) => self.alpha1,
            (NoiseKind::LongMemory, NoiseSource::Z) => self.alpha2,
            _ => 1.0,
        }
    }
}

/// A generated error sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePath {
    pub values: Vec<f64>,
    pub spec: NoiseSpec,
    pub which: NoiseSource,
}

/// `n` independent standard normal draws from stream `(seed, stream_id)`.
pub fn gen_iid(n: usize, seed: u64, stream_id: u64) -> Vec<f64> {
    sampler::white(n, &mut stream_rng(seed, stream_id))
}

/// Autocovariance of unit-variance fGn with `H = 1 − α/2` at lag `h`.
pub fn fgn_autocov(h: usize, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain(format!("memory parameter must lie in (0,1], got {alpha}")));
    }
    if h == 0 {
        return Ok(1.0);
    }
    if alpha == 1.0 {
        return Ok(0.0);
    }
    let p = 2.0 - alpha; // 2H
    if h == 1 {
        return Ok(0.5 * (2f64.powf(p) - 2.0));
    }
    // ½ h^{2H} [(1+x)^{2H} − 2 + (1−x)^{2H}] with x = 1/h, written with
    // expm1/ln_1p so the second difference does not cancel catastrophically.
    let hf = h as f64;
    let x = 1.0 / hf;
    let second = (p * x.ln_1p()).exp_m1() + (p * (-x).ln_1p()).exp_m1();
    Ok(0.5 * hf.powf(p) * second)
}

/// Exact long-memory path of length `n`; `α = 1` delegates to [`gen_iid`].
pub fn gen_lm(n: usize, alpha: f64, seed: u64, stream_id: u64) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain(format!("memory parameter must lie in (0,1], got {alpha}")));
    }
    if alpha == 1.0 {
        return Ok(gen_iid(n, seed, stream_id));
    }
    FgnSampler::new(n, alpha)?.sample(seed, stream_id)
}
