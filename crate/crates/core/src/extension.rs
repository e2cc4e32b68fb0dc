//! Boundary-interval Fourier extension.
//!
//! Only the `m` outermost samples at each end of `[-1, 1]` feed the gluing
//! computation. They are placed on a `[0, 2π]` working grid (right end first,
//! left end half a period later), fitted by a short trigonometric sum
//! `g_c(x) = Σ_{|k|≤n} c_k e^{ikx}/√L` via truncated SVD, and the values of
//! `g_c` between the two data blocks are appended after `t = 1`. The result is
//! one period of a smooth `(2+λ)`-periodic function that an FFT can
//! approximate without Gibbs oscillations.
//!
//! The system matrix depends only on `(T, m, n)`, never on `M` or the data, so
//! its SVD is computed once and reused ([`ExtensionOperator`]).

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::approximant::{coefficients_from_period, FourierApproximant};
use crate::dft::{fft_in_place, Direction};
use crate::error::{Error, Result};
use crate::grids::{extension_geometry, period_lambda, ExtensionGeometry};
use crate::linalg::{svd, truncated_pinv_apply, ComplexMatrix, SvdFactorization, TruncatedSolution};

/// Tunable parameters of the boundary algorithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtensionConfig {
    t_delta: f64,
    m_delta: usize,
    gamma: f64,
    n_delta: usize,
    tau: f64,
}

impl Default for ExtensionConfig {
    /// `T = 6`, `m = 25`, `γ = 1`, `τ = 1e-14`.
    fn default() -> Self {
        Self::new(6.0, 25, 1.0, 1e-14).expect("recommended parameters are valid")
    }
}

impl ExtensionConfig {
    /// `n = round((m-1)/γ)`; the basis must fit on the working grid,
    /// `2n + 1 ≤ L`.
    pub fn new(t_delta: f64, m_delta: usize, gamma: f64, tau: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::invalid("gamma", format!("{gamma} must be positive")));
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::invalid("tau", format!("{tau} must be positive")));
        }
        let geom = extension_geometry(t_delta, m_delta)?;
        let n_delta = ((m_delta - 1) as f64 / gamma).round() as usize;
        if n_delta < 1 {
            return Err(Error::invalid(
                "gamma",
                format!("γ = {gamma} leaves no basis functions for m = {m_delta}"),
            ));
        }
        if 2 * n_delta + 1 > geom.l_delta() {
            return Err(Error::invalid(
                "gamma",
                format!(
                    "2n+1 = {} basis functions exceed the {} working-grid nodes (T·γ too small)",
                    2 * n_delta + 1,
                    geom.l_delta()
                ),
            ));
        }
        Ok(Self {
            t_delta,
            m_delta,
            gamma,
            n_delta,
            tau,
        })
    }

    /// `T = 2.3`, `m = 65`, `γ = 2`, `τ = 1e-14`.
    pub fn alternate() -> Self {
        Self::new(2.3, 65, 2.0, 1e-14).expect("alternate parameters are valid")
    }

    pub fn with_tau(self, tau: f64) -> Result<Self> {
        Self::new(self.t_delta, self.m_delta, self.gamma, tau)
    }

    pub fn t_delta(&self) -> f64 {
        self.t_delta
    }

    pub fn m_delta(&self) -> usize {
        self.m_delta
    }

    /// Requested oversampling ratio.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `(m-1)/n` after rounding `n`.
    pub fn realized_gamma(&self) -> f64 {
        (self.m_delta - 1) as f64 / self.n_delta as f64
    }

    pub fn n_delta(&self) -> usize {
        self.n_delta
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn geometry(&self) -> ExtensionGeometry {
        extension_geometry(self.t_delta, self.m_delta).expect("validated in new")
    }
}

/// One period `[-1, 1+λ)` of the extended function on the spacing `1/M`.
/// `values[p]` is the sample at `t = (p - M)/M`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSamples {
    m_half: usize,
    values: Vec<C64>,
}

impl PeriodicSamples {
    /// Wraps an arbitrary period of samples starting at `t = -1`.
    pub fn from_values(m_half: usize, values: Vec<C64>) -> Result<Self> {
        if m_half == 0 {
            return Err(Error::invalid("M", "must be positive"));
        }
        if values.len() < 2 * m_half + 1 {
            return Err(Error::LengthMismatch {
                what: "periodic samples (at least 2M+1)",
                expected: 2 * m_half + 1,
                actual: values.len(),
            });
        }
        Ok(Self { m_half, values })
    }

    pub fn m_half(&self) -> usize {
        self.m_half
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `2 + λ`.
    pub fn period(&self) -> f64 {
        self.values.len() as f64 / self.m_half as f64
    }

    pub fn lambda(&self) -> f64 {
        (self.values.len() - 2 * self.m_half) as f64 / self.m_half as f64
    }

    /// The gluing samples beyond `t = 1`.
    pub fn extension(&self) -> &[C64] {
        &self.values[2 * self.m_half + 1..]
    }
}

/// `A[l, k] = e^{ik x_l}/√L` over the `2m` constrained nodes (rows, in
/// `J_1` then `J_2` order) and `k = -n..=n` (columns, ascending).
pub fn build_system_matrix(geom: &ExtensionGeometry, n_delta: usize) -> Result<ComplexMatrix> {
    let l = geom.l_delta();
    if 2 * n_delta + 1 > l {
        return Err(Error::invalid(
            "n_delta",
            format!("2n+1 = {} exceeds L = {l}", 2 * n_delta + 1),
        ));
    }
    let norm = 1.0 / (l as f64).sqrt();
    let nodes: Vec<usize> = geom.constrained_nodes().collect();
    let n = n_delta as i64;
    Ok(ComplexMatrix::from_fn(nodes.len(), 2 * n_delta + 1, |row, col| {
        let k = col as i64 - n;
        // k·(j-1) reduced mod L keeps the phase exact on the grid.
        let r = (k * (nodes[row] as i64 - 1)).rem_euclid(l as i64);
        C64::from_polar(norm, 2.0 * PI * r as f64 / l as f64)
    }))
}

/// Version tag written into operator cache files.
pub const OPERATOR_FORMAT_VERSION: u32 = 1;

/// Precomputed SVD of the system matrix for one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionOperator {
    config: ExtensionConfig,
    geometry: ExtensionGeometry,
    factorization: SvdFactorization,
}

/// Factors the system matrix for `config`.
pub fn precompute_operator(config: ExtensionConfig) -> Result<ExtensionOperator> {
    let geometry = config.geometry();
    let a = build_system_matrix(&geometry, config.n_delta())?;
    let factorization = svd(&a)?;
    Ok(ExtensionOperator {
        config,
        geometry,
        factorization,
    })
}

/// Stacks `f(t_{M-m+j})`, `j ∈ J_1`, then `f(t_{-M+j-L/2-1})`, `j ∈ J_2`.
pub fn extract_boundary_data(
    samples: &[C64],
    geom: &ExtensionGeometry,
    m_half: usize,
) -> Result<Vec<C64>> {
    Error::check_len("samples (2M+1)", 2 * m_half + 1, samples.len())?;
    let m = geom.m_delta();
    if m > m_half {
        return Err(Error::invalid(
            "M",
            format!("M = {m_half} is smaller than the boundary node count {m}"),
        ));
    }
    let right = &samples[2 * m_half + 1 - m..];
    let left = &samples[..m];
    Ok(right.iter().chain(left).copied().collect())
}

/// `g_c(x_j)`, `j = 1..=L`, for the coefficient vector `c` (`k = -n..=n`).
fn synthesize(geom: &ExtensionGeometry, coeffs: &[C64]) -> Result<Vec<C64>> {
    let l = geom.l_delta();
    let n = (coeffs.len() / 2) as i64;
    let mut spectrum = vec![C64::new(0.0, 0.0); l];
    for (i, c) in coeffs.iter().enumerate() {
        let k = i as i64 - n;
        spectrum[k.rem_euclid(l as i64) as usize] += c;
    }
    // Inverse carries 1/L; the basis carries 1/√L.
    fft_in_place(&mut spectrum, Direction::Inverse)?;
    let scale = (l as f64).sqrt();
    spectrum.iter_mut().for_each(|z| *z *= scale);
    Ok(spectrum)
}

/// Values of the fitted `g_c` on the whole working grid (length `L`).
///
/// `c` is split into conjugate-even parts `c = a + ib`, each synthesizing a
/// real function. They go through separate transforms: the coefficients are
/// much larger than `g_c`, and rounding in a shared transform would leak
/// between the real and imaginary parts.
pub fn compute_extension_values(op: &ExtensionOperator, g: &[C64]) -> Result<Vec<C64>> {
    let x = op.solve(g)?.x;
    let len = x.len();
    let (a, b): (Vec<C64>, Vec<C64>) = (0..len)
        .map(|k| {
            let (p, q) = (x[k], x[len - 1 - k].conj());
            (0.5 * (p + q), (p - q) * C64::new(0.0, -0.5))
        })
        .unzip();
    let ga = synthesize(&op.geometry, &a)?;
    let gb = synthesize(&op.geometry, &b)?;
    Ok(ga.iter().zip(&gb).map(|(p, q)| C64::new(p.re, q.re)).collect())
}

/// Concatenates the original samples with `g_c(x_{m+1}), …, g_c(x_{L/2})`.
pub fn assemble_periodic_samples(
    samples: &[C64],
    g_c: &[C64],
    geom: &ExtensionGeometry,
    m_half: usize,
) -> Result<PeriodicSamples> {
    Error::check_len("samples (2M+1)", 2 * m_half + 1, samples.len())?;
    Error::check_len("extension values (L)", geom.l_delta(), g_c.len())?;
    period_lambda(geom, m_half)?;
    let ext = &g_c[geom.m_delta()..geom.half()];
    let mut values = Vec::with_capacity(samples.len() + ext.len());
    values.extend_from_slice(samples);
    values.extend_from_slice(ext);
    PeriodicSamples::from_values(m_half, values)
}

pub(crate) fn half_count_of(samples: &[C64]) -> Result<usize> {
    if samples.len() < 3 || samples.len().is_multiple_of(2) {
        return Err(Error::invalid(
            "samples",
            format!("need an odd count 2M+1 ≥ 3, got {}", samples.len()),
        ));
    }
    Ok((samples.len() - 1) / 2)
}

impl ExtensionOperator {
    /// Reassembles an operator from stored parts. The factorization must
    /// reproduce the system matrix of `config`.
    pub fn from_parts(config: ExtensionConfig, factorization: SvdFactorization) -> Result<Self> {
        let geometry = config.geometry();
        let a = build_system_matrix(&geometry, config.n_delta())?;
        let r = a.rows().min(a.cols());
        if factorization.u.rows() != a.rows()
            || factorization.v.rows() != a.cols()
            || factorization.u.cols() != r
            || factorization.v.cols() != r
            || factorization.singular_values.len() != r
        {
            return Err(Error::Cache(format!(
                "factor shapes do not match the {}x{} system matrix",
                a.rows(),
                a.cols()
            )));
        }
        if factorization
            .singular_values
            .windows(2)
            .any(|w| w[0] < w[1] || w[0].is_nan())
            || factorization.singular_values.iter().any(|s| s.is_nan() || *s < 0.0)
        {
            return Err(Error::Cache("singular values are not sorted non-negative".into()));
        }
        let rec = factorization.reconstruct();
        let diff = a
            .as_slice()
            .iter()
            .zip(rec.as_slice())
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if diff.is_nan() || diff > 1e-12 * a.frobenius_norm() {
            return Err(Error::Cache(format!(
                "factorization does not reconstruct the system matrix (relative error {:e})",
                diff / a.frobenius_norm()
            )));
        }
        Ok(Self {
            config,
            geometry,
            factorization,
        })
    }

    pub fn config(&self) -> &ExtensionConfig {
        &self.config
    }

    pub fn geometry(&self) -> &ExtensionGeometry {
        &self.geometry
    }

    pub fn factorization(&self) -> &SvdFactorization {
        &self.factorization
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.factorization.singular_values
    }

    /// Truncated least-squares coefficients `c_τ` for boundary data `g`.
    ///
    /// The real and imaginary parts of `g` are solved separately and each
    /// solution is replaced by its conjugate-even part `(c_k + conj c_{-k})/2`.
    /// Rounding noise in the singular vectors near the cut is not
    /// conjugate-symmetric and would otherwise leave imaginary residue of
    /// order 1e-3 in the gap values of real data.
    pub fn solve(&self, g: &[C64]) -> Result<TruncatedSolution> {
        Error::check_len("boundary data (2m)", 2 * self.geometry.m_delta(), g.len())?;
        let tau = self.config.tau();
        let part = |f: fn(&C64) -> f64| g.iter().map(|z| C64::new(f(z), 0.0)).collect::<Vec<_>>();
        let re = truncated_pinv_apply(&self.factorization, &part(|z| z.re), tau)?;
        let im = truncated_pinv_apply(&self.factorization, &part(|z| z.im), tau)?;
        let len = re.x.len();
        let even = |x: &[C64], k: usize| 0.5 * (x[k] + x[len - 1 - k].conj());
        let x = (0..len)
            .map(|k| even(&re.x, k) + C64::i() * even(&im.x, k))
            .collect();
        Ok(TruncatedSolution { x, rank: re.rank })
    }

    /// Runs the whole extension: boundary data → `g_c` → one period.
    pub fn extend(&self, samples: &[C64]) -> Result<PeriodicSamples> {
        let m_half = half_count_of(samples)?;
        let g = extract_boundary_data(samples, &self.geometry, m_half)?;
        let g_c = compute_extension_values(self, &g)?;
        assemble_periodic_samples(samples, &g_c, &self.geometry, m_half)
    }

    /// Extension followed by the final FFT.
    pub fn approximate(&self, samples: &[C64]) -> Result<FourierApproximant> {
        coefficients_from_period(&self.extend(samples)?)
    }
}
