//! Laguerre basis: function evaluation, quadrature on `[0, b]`, and the
//! projection / reconstruction pair used as the oracle side of experiments.

mod laguerre;
mod quadrature;

pub use laguerre::{fill_row, laguerre_fn, laguerre_fn_row};
pub use quadrature::{basis_integral, make_grid, BasisGrid, DEFAULT_ORDER};

pub(crate) use laguerre::fill_row_unchecked;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients `θ_0, …, θ_{M-1}` of an expansion in the Laguerre basis,
/// together with the support endpoint `b` they were computed against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaguerreCoeffs {
    theta: Vec<f64>,
    b: f64,
}

impl LaguerreCoeffs {
    pub fn new(theta: Vec<f64>, b: f64) -> Result<Self> {
        if let Some((k, v)) = theta.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Invalid(format!("coefficient {k} is not finite ({v})")));
        }
        Ok(Self { theta, b })
    }

    pub fn zeros(m: usize, b: f64) -> Self {
        Self {
            theta: vec![0.0; m],
            b,
        }
    }

    /// Truncation level `M`.
    pub fn m(&self) -> usize {
        self.theta.len()
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// `Σ θ_k²`, the squared L² norm of the expansion.
    pub fn energy(&self) -> f64 {
        self.theta.iter().map(|v| v * v).sum()
    }
}

/// `θ_k = ∫_0^b h(t) φ_k(t) dt` for `k < m`, by quadrature on `grid`.
pub fn project<F: Fn(f64) -> f64>(h: F, m: usize, grid: &BasisGrid) -> Result<LaguerreCoeffs> {
    let mut theta = vec![0.0; m];
    let mut row = vec![0.0; m];
    for (&t, &w) in grid.nodes().iter().zip(grid.weights()) {
        let v = h(t);
        if !v.is_finite() {
            return Err(Error::NonFiniteIntegrand { node: t, value: v });
        }
        fill_row_unchecked(t, &mut row);
        let wv = w * v;
        for (acc, phi) in theta.iter_mut().zip(&row) {
            *acc += wv * phi;
        }
    }
    LaguerreCoeffs::new(theta, grid.b())
}

/// `Σ_{k<M} θ_k φ_k(t)`.
pub fn reconstruct(coeffs: &LaguerreCoeffs, t: f64) -> Result<f64> {
    let mut row = vec![0.0; coeffs.m()];
    fill_row(t, &mut row)?;
    Ok(coeffs.theta.iter().zip(&row).map(|(c, p)| c * p).sum())
}

/// Gram matrix `G_{jk} = ∫_0^b φ_j φ_k dt` for `j, k ≤ k_max`.
pub fn gram_matrix(k_max: usize, grid: &BasisGrid) -> Vec<Vec<f64>> {
    let size = k_max + 1;
    let mut gram = vec![vec![0.0; size]; size];
    let mut row = vec![0.0; size];
    for (&t, &w) in grid.nodes().iter().zip(grid.weights()) {
        fill_row_unchecked(t, &mut row);
        for j in 0..size {
            let wj = w * row[j];
            for k in j..size {
                gram[j][k] += wj * row[k];
            }
        }
    }
    for j in 0..size {
        for k in 0..j {
            gram[j][k] = gram[k][j];
        }
    }
    gram
}

/// Largest `|G − I|` entry of the Gram matrix.
pub fn gram_deviation(k_max: usize, grid: &BasisGrid) -> f64 {
    gram_matrix(k_max, grid)
        .iter()
        .enumerate()
        .flat_map(|(j, row)| {
            row.iter()
                .enumerate()
                .map(move |(k, v)| (v - if j == k { 1.0 } else { 0.0 }).abs())
        })
        .fold(0.0, f64::max)
}

/// Largest `|φ_k(t)|` over `k ≤ k_max` and the given points.
pub fn max_abs_on(k_max: usize, points: &[f64]) -> Result<f64> {
    let mut row = vec![0.0; k_max + 1];
    let mut worst = 0.0_f64;
    for &t in points {
        fill_row(t, &mut row)?;
        worst = row.iter().fold(worst, |m, v| m.max(v.abs()));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn projection_of_basis_functions() {
        let grid = make_grid(200.0, 512).unwrap();
        let c = project(|t| laguerre_fn(0, t).unwrap(), 3, &grid).unwrap();
        assert!((c.theta()[0] - 1.0).abs() < 1e-10);
        assert!(c.theta()[1].abs() < 1e-10 && c.theta()[2].abs() < 1e-10);

        let c = project(|t| laguerre_fn(2, t).unwrap(), 5, &grid).unwrap();
        for (k, v) in c.theta().iter().enumerate() {
            let expected = if k == 2 { 1.0 } else { 0.0 };
            assert!((v - expected).abs() < 1e-10, "k={k}: {v}");
        }
    }

    #[test]
    fn projection_against_fine_composite_oracle() {
        // Oracle: composite 16-point rule over 400 panels of [0, 1].
        let panel = make_grid(1.0 / 400.0, 16).unwrap();
        let oracle: Vec<f64> = (0..4)
            .map(|k| {
                (0..400)
                    .map(|p| {
                        let off = p as f64 / 400.0;
                        panel.integrate(|s| {
                            let t = off + s;
                            (-t).exp() * laguerre_fn(k, t).unwrap()
                        })
                    })
                    .sum()
            })
            .collect();
        let grid = make_grid(1.0, DEFAULT_ORDER).unwrap();
        let c = project(|t| (-t).exp(), 4, &grid).unwrap();
        for k in 0..4 {
            assert!((c.theta()[k] - oracle[k]).abs() < 1e-8, "k={k}");
        }
    }

    #[test]
    fn projection_reports_bad_node() {
        let grid = make_grid(1.0, 8).unwrap();
        let err = project(|t| if t > 0.5 { f64::NAN } else { 1.0 }, 3, &grid).unwrap_err();
        match err {
            Error::NonFiniteIntegrand { node, .. } => assert!(node > 0.5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reconstruct_simple_cases() {
        let c = LaguerreCoeffs::new(vec![1.0, 0.0, 0.0], 1.0).unwrap();
        assert_eq!(reconstruct(&c, 0.0).unwrap(), 1.0);
        let z = LaguerreCoeffs::zeros(7, 1.0);
        for t in [0.0, 0.3, 5.0, 40.0] {
            assert_eq!(reconstruct(&z, t).unwrap(), 0.0);
        }
        assert!(reconstruct(&c, -1.0).is_err());
    }

    #[test]
    fn non_finite_coefficients_rejected() {
        assert!(LaguerreCoeffs::new(vec![0.0, f64::NAN], 1.0).is_err());
    }

    #[test]
    fn gram_is_identity_on_wide_support() {
        let grid = make_grid(200.0, 512).unwrap();
        assert!(gram_deviation(30, &grid) <= 1e-6);
    }

    #[test]
    fn bounded_on_dense_grid() {
        let points: Vec<f64> = (0..1000).map(|i| 50.0 * i as f64 / 999.0).collect();
        let worst = max_abs_on(1 << 14, &points).unwrap();
        assert!(worst <= 1.0 + 1e-9, "max |phi| = {worst}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn parseval_on_the_span(c in proptest::collection::vec(-1.0f64..1.0, 10)) {
            let grid = make_grid(200.0, 512).unwrap();
            let coeffs = LaguerreCoeffs::new(c.clone(), 200.0).unwrap();
            let h = |t: f64| reconstruct(&coeffs, t).unwrap();
            let back = project(h, 10, &grid).unwrap();
            for (a, b) in back.theta().iter().zip(&c) {
                prop_assert!((a - b).abs() < 1e-8);
            }
            let norm = grid.integrate(|t| h(t).powi(2));
            prop_assert!((norm - coeffs.energy()).abs() < 1e-8);
        }
    }
}
