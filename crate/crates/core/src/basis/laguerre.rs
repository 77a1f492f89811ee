//! Laguerre functions `φ_k(t) = e^{-t/2} L_k(t)`.
//!
//! The three-term recurrence is run on the damped values themselves, so the
//! iterates stay in `[-1, 1]` even where the raw polynomial `L_k(t)` is huge.
//! The seed `e^{-t/2}` underflows for `t` beyond roughly 1400; every support
//! used in this crate is far below that.

use crate::error::{Error, Result};

fn check_t(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::Domain(format!(
            "Laguerre functions are defined for t >= 0, got t = {t}"
        )));
    }
    Ok(())
}

/// Fills `out[k] = φ_k(t)` for `k < out.len()`. `t` must already be validated.
#[inline]
pub(crate) fn fill_row_unchecked(t: f64, out: &mut [f64]) {
    let Some(first) = out.first_mut() else {
        return;
    };
    let damp = (-0.5 * t).exp();
    *first = damp;
    if out.len() == 1 {
        return;
    }
    out[1] = (1.0 - t) * damp;
    let mut prev = damp;
    let mut cur = out[1];
    for k in 1..out.len() - 1 {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - t) * cur - kf * prev) / (kf + 1.0);
        out[k + 1] = next;
        prev = cur;
        cur = next;
    }
}

/// Writes `φ_0(t), …, φ_{out.len()-1}(t)` into `out`.
pub fn fill_row(t: f64, out: &mut [f64]) -> Result<()> {
    check_t(t)?;
    fill_row_unchecked(t, out);
    Ok(())
}

/// `φ_k(t)` for a single index.
pub fn laguerre_fn(k: usize, t: f64) -> Result<f64> {
    check_t(t)?;
    let mut row = vec![0.0; k + 1];
    fill_row_unchecked(t, &mut row);
    Ok(row[k])
}

/// All of `φ_0(t), …, φ_{k_max}(t)` from one pass of the recurrence.
pub fn laguerre_fn_row(k_max: usize, t: f64) -> Result<Vec<f64>> {
    check_t(t)?;
    let mut row = vec![0.0; k_max + 1];
    fill_row_unchecked(t, &mut row);
    Ok(row)
}
