use nalgebra::DMatrix;

use super::fgn_autocov;
use crate::error::{Error, Result};

/// Largest dimension accepted by the dense eigensolve.
pub const EIGEN_BUDGET: usize = 4096;

/// Extreme eigenvalues of the `n × n` fGn Toeplitz covariance.
pub fn covariance_eigen_range(n: usize, alpha: f64) -> Result<(f64, f64)> {
    if n == 0 || n > EIGEN_BUDGET {
        return Err(Error::Domain(format!(
            "covariance dimension must lie in 1..={EIGEN_BUDGET}, got {n}"
        )));
    }
    let gamma = (0..n).map(|h| fgn_autocov(h, alpha)).collect::<Result<Vec<_>>>()?;
    if alpha == 1.0 || n == 1 {
        return Ok((1.0, 1.0));
    }
    let cov = DMatrix::from_fn(n, n, |i, j| gamma[i.abs_diff(j)]);
    let eig = cov.symmetric_eigenvalues();
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let max = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((min, max))
}

/// Autocovariance at lags `0..=max_lag` about the known mean zero:
/// `(1/(n−h)) Σ x_i x_{i+h}`, unbiased for every lag.
pub fn sample_autocov(path: &[f64], max_lag: usize) -> Vec<f64> {
    let n = path.len();
    (0..=max_lag.min(n.saturating_sub(1)))
        .map(|h| {
            let s: f64 = path[..n - h].iter().zip(&path[h..]).map(|(a, b)| a * b).sum();
            s / (n - h) as f64
        })
        .collect()
}

/// Per-lag mean and Monte Carlo standard error over independent paths.
#[derive(Debug, Clone, PartialEq)]
pub struct PooledAutocov {
    pub mean: Vec<f64>,
    pub se: Vec<f64>,
}

pub fn pooled_autocov<P: AsRef<[f64]>>(paths: &[P], max_lag: usize) -> PooledAutocov {
    let per_path: Vec<Vec<f64>> = paths.iter().map(|p| sample_autocov(p.as_ref(), max_lag)).collect();
    let lags = per_path.iter().map(Vec::len).min().unwrap_or(0);
    let r = per_path.len() as f64;
    let mut mean = vec![0.0; lags];
    let mut se = vec![0.0; lags];
    for h in 0..lags {
        let m = per_path.iter().map(|v| v[h]).sum::<f64>() / r;
        let var = if r > 1.0 {
            per_path.iter().map(|v| (v[h] - m).powi(2)).sum::<f64>() / (r - 1.0)
        } else {
            0.0
        };
        mean[h] = m;
        se[h] = (var / r).sqrt();
    }
    PooledAutocov { mean, se }
}
