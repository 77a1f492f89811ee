use std::f64::consts::PI;
use std::sync::RwLock;

use super::laguerre::fill_row_unchecked;
use crate::error::{Error, Result};

/// Default number of Gauss–Legendre nodes.
pub const DEFAULT_ORDER: usize = 256;

/// Gauss–Legendre rule mapped affinely onto `[0, b]`.
///
/// Exact for polynomials up to degree `2·order − 1`. Also memoises the basis
/// integrals `∫_0^b φ_l(t) dt`, which the estimator reuses for every
/// observation; the cache is behind an `RwLock` and may be filled from any
/// thread.
#[derive(Debug)]
pub struct BasisGrid {
    b: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    integrals: RwLock<Vec<f64>>,
}

impl Clone for BasisGrid {
    fn clone(&self) -> Self {
        Self {
            b: self.b,
            nodes: self.nodes.clone(),
            weights: self.weights.clone(),
            integrals: RwLock::new(self.integrals.read().expect("cache poisoned").clone()),
        }
    }
}

/// Nodes and weights of the `order`-point rule on `[-1, 1]`, ascending.
fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order;
    let nf = n as f64;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi's approximation of the i-th largest root.
        let theta = PI * (4.0 * i as f64 + 3.0) / (4.0 * nf + 2.0);
        let mut z = (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf)) * theta.cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, p_prev) = legendre_pair(n, z);
            dp = nf * (z * p - p_prev) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() <= 1e-16 * z.abs().max(1.0) {
                break;
            }
        }
        let (p, p_prev) = legendre_pair(n, z);
        dp = if p.is_finite() {
            nf * (z * p - p_prev) / (z * z - 1.0)
        } else {
            dp
        };
        let weight = 2.0 / ((1.0 - z * z) * dp * dp);
        x[n - 1 - i] = z;
        x[i] = -z;
        w[n - 1 - i] = weight;
        w[i] = weight;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// `(P_n(z), P_{n-1}(z))` by the Bonnet recurrence.
fn legendre_pair(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

/// Builds the `order`-point grid on `[0, b]`.
pub fn make_grid(b: f64, order: usize) -> Result<BasisGrid> {
    if !(b.is_finite() && b > 0.0) {
        return Err(Error::Domain(format!("grid endpoint b must be positive, got {b}")));
    }
    if order < 2 {
        return Err(Error::Domain(format!("grid order must be at least 2, got {order}")));
    }
    let (x, w) = gauss_legendre(order);
    let half = 0.5 * b;
    let nodes = x.iter().map(|xi| half * (xi + 1.0)).collect();
    let weights = w.iter().map(|wi| half * wi).collect();
    Ok(BasisGrid {
        b,
        nodes,
        weights,
        integrals: RwLock::new(Vec::new()),
    })
}

impl BasisGrid {
    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫_0^b f(t) dt` by the rule.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }

    /// Returns `∫_0^b φ_l dt` for `l < m`, filling the cache as needed.
    pub fn basis_integrals(&self, m: usize) -> Vec<f64> {
        {
            let cache = self.integrals.read().expect("cache poisoned");
            if cache.len() >= m {
                return cache[..m].to_vec();
            }
        }
        let mut cache = self.integrals.write().expect("cache poisoned");
        if cache.len() < m {
            let target = m.max(2 * cache.len()).max(16);
            let mut acc = vec![0.0; target];
            let mut row = vec![0.0; target];
            for (&t, &w) in self.nodes.iter().zip(&self.weights) {
                fill_row_unchecked(t, &mut row);
                for (a, phi) in acc.iter_mut().zip(&row) {
                    *a += w * phi;
                }
            }
            *cache = acc;
        }
        cache[..m].to_vec()
    }
}

/// `∫_0^b φ_l(t) dt` by quadrature on `grid`, memoised per grid.
pub fn basis_integral(l: usize, grid: &BasisGrid) -> f64 {
    {
        let cache = grid.integrals.read().expect("cache poisoned");
        if let Some(v) = cache.get(l) {
            return *v;
        }
    }
    grid.basis_integrals(l + 1)[l]
}
