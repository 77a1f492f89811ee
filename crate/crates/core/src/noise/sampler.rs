use std::sync::Arc;

use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::fgn_autocov;
use crate::error::{Error, Result};
use crate::rng::{stream_rng, StreamRng};

/// Relative size below which a negative circulant eigenvalue is treated as
/// round-off and clamped to zero.
const EIGEN_TOLERANCE: f64 = 1e-10;

/// Which exact algorithm a sampler uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplerMethod {
    /// Independent draws (`α = 1`).
    White,
    /// Davies–Harte circulant embedding.
    Circulant,
    /// Durbin–Levinson recursion, i.e. sequential Cholesky of the Toeplitz
    /// covariance.
    Levinson,
}

enum Plan {
    White,
    Circulant {
        /// `sqrt(λ_k / m)` for the embedding eigenvalues.
        scale: Vec<f64>,
        fft: Arc<dyn Fft<f64>>,
    },
    Levinson {
        autocov: Vec<f64>,
    },
}

/// Exact sampler for a stationary Gaussian sequence of length `n` with fGn
/// autocovariance. Build once per `(n, α)` and reuse across replications.
pub struct FgnSampler {
    n: usize,
    alpha: f64,
    plan: Plan,
}

impl std::fmt::Debug for FgnSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FgnSampler")
            .field("n", &self.n)
            .field("alpha", &self.alpha)
            .field("method", &self.method())
            .finish()
    }
}

/// Smallest power of two `>= 2(n - 1)`, at least 2.
pub fn embedding_size(n: usize) -> usize {
    (2 * n.saturating_sub(1)).next_power_of_two().max(2)
}

impl FgnSampler {
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("noise length must be at least 1".into()));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Domain(format!("memory parameter must lie in (0,1], got {alpha}")));
        }
        if alpha == 1.0 {
            return Ok(Self { n, alpha, plan: Plan::White });
        }
        match circulant_plan(n, alpha)? {
            Some(plan) => Ok(Self { n, alpha, plan }),
            None => {
                log::warn!("circulant embedding not nonnegative for n={n}, alpha={alpha}; using Levinson");
                Self::levinson(n, alpha)
            }
        }
    }

    /// Forces the Durbin–Levinson path.
    pub fn levinson(n: usize, alpha: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("noise length must be at least 1".into()));
        }
        let autocov = (0..n).map(|h| fgn_autocov(h, alpha)).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            n,
            alpha,
            plan: Plan::Levinson { autocov },
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn method(&self) -> SamplerMethod {
        match self.plan {
            Plan::White => SamplerMethod::White,
            Plan::Circulant { .. } => SamplerMethod::Circulant,
            Plan::Levinson { .. } => SamplerMethod::Levinson,
        }
    }

    /// One path, a pure function of `(seed, stream)`.
    pub fn sample(&self, seed: u64, stream: u64) -> Result<Vec<f64>> {
        let mut rng = stream_rng(seed, stream);
        match &self.plan {
            Plan::White => Ok(white(self.n, &mut rng)),
            Plan::Circulant { scale, fft } => {
                let mut buf: Vec<Complex<f64>> = scale
                    .iter()
                    .map(|s| {
                        let re: f64 = StandardNormal.sample(&mut rng);
                        let im: f64 = StandardNormal.sample(&mut rng);
                        Complex::new(s * re, s * im)
                    })
                    .collect();
                fft.process(&mut buf);
                Ok(buf[..self.n].iter().map(|c| c.re).collect())
            }
            Plan::Levinson { autocov } => levinson_sample(autocov, &mut rng),
        }
    }
}

pub(crate) fn white(n: usize, rng: &mut StreamRng) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

fn circulant_plan(n: usize, alpha: f64) -> Result<Option<Plan>> {
    let m = embedding_size(n);
    let half = m / 2;
    let gamma = (0..=half).map(|h| fgn_autocov(h, alpha)).collect::<Result<Vec<_>>>()?;
    let mut row: Vec<Complex<f64>> = (0..m)
        .map(|j| Complex::new(if j <= half { gamma[j] } else { gamma[m - j] }, 0.0))
        .collect();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(m);
    fft.process(&mut row);
    let max = row.iter().map(|c| c.re).fold(f64::MIN, f64::max);
    let min = row.iter().map(|c| c.re).fold(f64::MAX, f64::min);
    if min < -EIGEN_TOLERANCE * max {
        return Ok(None);
    }
    let mf = m as f64;
    let scale = row.iter().map(|c| (c.re.max(0.0) / mf).sqrt()).collect();
    Ok(Some(Plan::Circulant { scale, fft }))
}

/// Sequential sampling by the Durbin–Levinson recursion for a Toeplitz
/// covariance with first row `autocov`.
pub(crate) fn levinson_sample(autocov: &[f64], rng: &mut StreamRng) -> Result<Vec<f64>> {
    let n = autocov.len();
    let mut x = Vec::with_capacity(n);
    if n == 0 {
        return Ok(x);
    }
    let not_pd = |t: usize, v: f64| Error::NotPositiveDefinite {
        n,
        detail: format!("innovation variance {v} at step {t}"),
    };
    let mut v = autocov[0];
    if !(v > 0.0) {
        return Err(not_pd(0, v));
    }
    let z: f64 = StandardNormal.sample(rng);
    x.push(v.sqrt() * z);
    let mut phi: Vec<f64> = Vec::with_capacity(n);
    let mut next = Vec::with_capacity(n);
    for t in 1..n {
        let mut acc = autocov[t];
        for (j, p) in phi.iter().enumerate() {
            acc -= p * autocov[t - 1 - j];
        }
        let kappa = acc / v;
        next.clear();
        for j in 0..phi.len() {
            next.push(phi[j] - kappa * phi[phi.len() - 1 - j]);
        }
        next.push(kappa);
        std::mem::swap(&mut phi, &mut next);
        v *= 1.0 - kappa * kappa;
        if !(v > 0.0) {
            return Err(not_pd(t, v));
        }
        // phi[j] multiplies x_{t-1-j}
        let mean: f64 = phi.iter().enumerate().map(|(j, p)| p * x[t - 1 - j]).sum();
        let z: f64 = StandardNormal.sample(rng);
        x.push(mean + v.sqrt() * z);
    }
    Ok(x)
}
