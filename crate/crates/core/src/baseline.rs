//! Classical full-data Fourier extension.
//!
//! Fits `Σ_{|k|≤N} c_k e^{iπkt/T}` to all `2M+1` samples in the least-squares
//! sense with a truncated SVD. The cost is cubic in `M`, so this is a
//! reference method for moderate sizes only.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::approximant::FourierApproximant;
use crate::error::{Error, Result};
use crate::extension::half_count_of;
use crate::linalg::{svd, svd_project, truncated_pinv_apply, ComplexMatrix};

/// Largest `M` accepted by [`fulldata_fe`].
pub const MAX_HALF_COUNT: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullDataConfig {
    t: f64,
    gamma: f64,
    /// Relative to the largest singular value.
    tau: f64,
}

impl FullDataConfig {
    pub fn new(t: f64, gamma: f64, tau: f64) -> Result<Self> {
        if !t.is_finite() || t <= 1.0 {
            return Err(Error::invalid("T", format!("{t} must be a finite number > 1")));
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::invalid("gamma", format!("{gamma} must be positive")));
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::invalid("tau", format!("{tau} must be positive")));
        }
        Ok(Self { t, gamma, tau })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `N = round(M/γ)`.
    pub fn basis_half_count(&self, m_half: usize) -> Result<usize> {
        let n = (m_half as f64 / self.gamma).round() as usize;
        if n < 1 {
            return Err(Error::invalid(
                "gamma",
                format!("γ = {} leaves no basis functions at M = {m_half}", self.gamma),
            ));
        }
        Ok(n)
    }

    /// `M/N` after rounding `N`.
    pub fn realized_gamma(&self, m_half: usize) -> Result<f64> {
        Ok(m_half as f64 / self.basis_half_count(m_half)? as f64)
    }
}

impl Default for FullDataConfig {
    /// `T = 2`, `γ = 2`, `τ = 1e-14`.
    fn default() -> Self {
        Self::new(2.0, 2.0, 1e-14).expect("valid")
    }
}

/// `A[ℓ, k] = e^{iπ k t_ℓ / T}` for `t_ℓ = ℓ/M`, rows `ℓ = -M..=M`, columns
/// `k = -N..=N`.
pub fn fulldata_matrix(m_half: usize, n: usize, t: f64) -> ComplexMatrix {
    let (mh, nn) = (m_half as i64, n as i64);
    let w = PI / (m_half as f64 * t);
    ComplexMatrix::from_fn(2 * m_half + 1, 2 * n + 1, |i, j| {
        let l = i as i64 - mh;
        let k = j as i64 - nn;
        C64::from_polar(1.0, w * (k * l) as f64)
    })
}

/// Truncated least-squares fit to samples on `t_ℓ = ℓ/M`; the result has
/// period `2T`.
pub fn fulldata_fe(samples: &[C64], cfg: &FullDataConfig) -> Result<FourierApproximant> {
    let m_half = half_count_of(samples)?;
    if m_half > MAX_HALF_COUNT {
        return Err(Error::invalid(
            "M",
            format!("{m_half} exceeds the full-data limit {MAX_HALF_COUNT}"),
        ));
    }
    if samples.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite("samples"));
    }
    let n = cfg.basis_half_count(m_half)?;
    let a = fulldata_matrix(m_half, n, cfg.t);
    let coefficients = if a.rows() >= a.cols() {
        let p = svd_project(&a, samples)?;
        let cut = cfg.tau * p.singular_values[0];
        p.truncated_solve(cut)?.x
    } else {
        let f = svd(&a)?;
        let cut = cfg.tau * f.singular_values[0];
        truncated_pinv_apply(&f, samples, cut)?.x
    };
    FourierApproximant::new(2.0 * cfg.t, coefficients)
}
