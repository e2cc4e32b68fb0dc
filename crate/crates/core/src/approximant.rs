//! Trigonometric approximants built from one period of samples, plus the
//! dense-grid error metric.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::dft::{fft_in_place, Direction};
use crate::error::{Error, Result};
use crate::extension::PeriodicSamples;

/// `f(t) ≈ Σ_{k=-K}^{K} c_k e^{2πikt/P}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierApproximant {
    period: f64,
    /// `c_{-K}, …, c_K`.
    coefficients: Vec<C64>,
}

impl FourierApproximant {
    /// `coefficients` are ordered `k = -K..=K` and must have odd length.
    pub fn new(period: f64, coefficients: Vec<C64>) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::invalid("period", format!("{period} must be positive")));
        }
        if coefficients.len().is_multiple_of(2) {
            return Err(Error::invalid(
                "coefficients",
                "need an odd count ordered k = -K..=K",
            ));
        }
        Ok(Self {
            period,
            coefficients,
        })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn max_frequency(&self) -> usize {
        self.coefficients.len() / 2
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }

    /// `c_k` for a signed index, zero outside the stored band.
    pub fn coefficient(&self, k: i64) -> C64 {
        let kk = self.max_frequency() as i64;
        if k.abs() > kk {
            C64::new(0.0, 0.0)
        } else {
            self.coefficients[(k + kk) as usize]
        }
    }

    /// `(k, c_k)` pairs in ascending `k`.
    pub fn indexed_coefficients(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        let kk = self.max_frequency() as i64;
        self.coefficients
            .iter()
            .enumerate()
            .map(move |(i, c)| (i as i64 - kk, *c))
    }

    /// Direct summation at one point.
    pub fn eval(&self, t: f64) -> C64 {
        let t = t - self.period * (t / self.period).round();
        let kk = self.max_frequency() as i64;
        let theta = 2.0 * PI * t / self.period;
        // Walk e^{ikθ} by multiplication, re-anchoring periodically so the
        // rounding drift stays at a few ulps.
        const RESYNC: usize = 32;
        let step = C64::from_polar(1.0, theta);
        let mut acc = C64::new(0.0, 0.0);
        let mut w = C64::new(0.0, 0.0);
        for (i, c) in self.coefficients.iter().enumerate() {
            if i % RESYNC == 0 {
                w = C64::from_polar(1.0, (i as i64 - kk) as f64 * theta);
            }
            acc += c * w;
            w *= step;
        }
        acc
    }

    /// Evaluates at arbitrary points. Non-finite points yield NaN.
    pub fn evaluate(&self, points: &[f64]) -> Vec<C64> {
        points
            .iter()
            .map(|&t| {
                if t.is_finite() {
                    self.eval(t)
                } else {
                    C64::new(f64::NAN, f64::NAN)
                }
            })
            .collect()
    }

    /// Values at `t0 + q·step`, `q = 0..count`.
    ///
    /// When the period is an integer multiple `Q` of `step` this is a single
    /// zero-padded inverse transform of length `Q`; otherwise it falls back to
    /// direct summation.
    pub fn evaluate_uniform(&self, t0: f64, step: f64, count: usize) -> Result<Vec<C64>> {
        if !(step.is_finite() && step > 0.0 && t0.is_finite()) {
            return Err(Error::invalid("step", "uniform grid needs finite t0 and step > 0"));
        }
        let ratio = self.period / step;
        let q = ratio.round();
        let commensurate = (ratio - q).abs() <= 1e-9 * ratio && (1.0..=1e9).contains(&q);
        if !commensurate {
            return Ok((0..count).map(|i| self.eval(t0 + i as f64 * step)).collect());
        }
        let q = q as usize;
        let mut spectrum = vec![C64::new(0.0, 0.0); q];
        let shift = 2.0 * PI * t0 / self.period;
        for (k, c) in self.indexed_coefficients() {
            let bin = k.rem_euclid(q as i64) as usize;
            spectrum[bin] += c * C64::from_polar(1.0, k as f64 * shift);
        }
        fft_in_place(&mut spectrum, Direction::Inverse)?;
        let scale = q as f64;
        Ok((0..count).map(|i| spectrum[i % q] * scale).collect())
    }

    /// Values on `t = ℓ/(density·M)`, `ℓ = -density·M ..= density·M`.
    pub fn evaluate_dense(&self, m_half: usize, density: usize) -> Result<(Vec<f64>, Vec<C64>)> {
        let n = density * m_half;
        let step = 1.0 / n as f64;
        let ts: Vec<f64> = (-(n as i64)..=n as i64).map(|l| l as f64 * step).collect();
        let vals = self.evaluate_uniform(-1.0, step, 2 * n + 1)?;
        Ok((ts, vals))
    }
}

/// Interpolating approximant for one period of samples.
///
/// `c_k = (1/N) Σ_ℓ f_c(t_ℓ) e^{-2πikℓ/N}` with `ℓ` the signed node index, so
/// that `Σ c_k e^{2πikt/P}` reproduces the samples at `t_ℓ = ℓ/M`. For even
/// `N` the Nyquist bin is split evenly between `k = ±N/2`, which keeps real
/// data real.
pub fn coefficients_from_period(p: &PeriodicSamples) -> Result<FourierApproximant> {
    let n = p.len();
    if n < 3 {
        return Err(Error::invalid("periodic samples", format!("need at least 3, got {n}")));
    }
    let mut spectrum = p.values().to_vec();
    fft_in_place(&mut spectrum, Direction::Forward)?;
    let kk = n / 2;
    let offset = p.m_half() as i64;
    let inv_n = 1.0 / n as f64;
    let mut coeffs = Vec::with_capacity(2 * kk + 1);
    for k in -(kk as i64)..=kk as i64 {
        let bin = k.rem_euclid(n as i64) as usize;
        // e^{2πikM/N}, with the product reduced mod N before scaling.
        let r = (k * offset).rem_euclid(n as i64) as f64;
        let phase = C64::from_polar(1.0, 2.0 * PI * r / n as f64);
        let mut c = spectrum[bin] * phase * inv_n;
        if n.is_multiple_of(2) && k.unsigned_abs() as usize == kk {
            c *= 0.5;
        }
        coeffs.push(c);
    }
    FourierApproximant::new(p.period(), coeffs)
}

/// Maximum of `|a(t) - reference(t)|` over `t = ℓ/(density·M)` on `[-1, 1]`.
pub fn max_error(
    a: &FourierApproximant,
    reference: impl Fn(f64) -> C64,
    m_half: usize,
    density: usize,
) -> Result<f64> {
    if density < 2 {
        return Err(Error::invalid("density", format!("{density} < 2")));
    }
    let (ts, vals) = a.evaluate_dense(m_half, density)?;
    let mut worst = 0.0f64;
    for (t, v) in ts.iter().zip(&vals) {
        let d = (v - reference(*t)).norm();
        if d.is_nan() {
            return Ok(f64::NAN);
        }
        worst = worst.max(d);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dft::naive_dft;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn periodic(m_half: usize, len: usize, f: impl Fn(f64) -> C64) -> PeriodicSamples {
        let vals = (0..len)
            .map(|p| f((p as f64 - m_half as f64) / m_half as f64))
            .collect();
        PeriodicSamples::from_values(m_half, vals).unwrap()
    }

    fn random_periodic(m_half: usize, len: usize, seed: u64) -> PeriodicSamples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vals = (0..len)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        PeriodicSamples::from_values(m_half, vals).unwrap()
    }

    #[test]
    fn constant_samples_give_dc_only() {
        let c = C64::new(2.0, -0.5);
        let a = coefficients_from_period(&periodic(10, 27, |_| c)).unwrap();
        assert!((a.coefficient(0) - c).norm() < 1e-14);
        for (k, ck) in a.indexed_coefficients() {
            if k != 0 {
                assert!(ck.norm() <= 1e-14);
            }
        }
    }

    #[test]
    fn pure_mode_is_recovered() {
        for len in [27, 28] {
            let p = len as f64 / 10.0;
            let s = periodic(10, len, |t| C64::from_polar(1.0, 2.0 * PI * t / p));
            let a = coefficients_from_period(&s).unwrap();
            assert!((a.coefficient(1) - C64::new(1.0, 0.0)).norm() < 1e-12);
            for (k, ck) in a.indexed_coefficients() {
                if k != 1 {
                    assert!(ck.norm() <= 1e-12, "len {len}, k {k}: {ck}");
                }
            }
        }
    }

    #[test]
    fn too_few_samples_rejected() {
        assert!(PeriodicSamples::from_values(1, vec![C64::new(1.0, 0.0); 2]).is_err());
    }

    #[test]
    fn coefficients_match_naive_dft() {
        for (m, len, seed) in [(7, 20, 1), (7, 21, 2), (50, 171, 3), (64, 250, 4)] {
            let s = random_periodic(m, len, seed);
            let a = coefficients_from_period(&s).unwrap();
            let x = naive_dft(s.values(), Direction::Forward).unwrap();
            let n = len as i64;
            for (k, ck) in a.indexed_coefficients() {
                let mut want = x[k.rem_euclid(n) as usize]
                    * C64::from_polar(1.0, 2.0 * PI * (k * m as i64) as f64 / n as f64)
                    / n as f64;
                if len % 2 == 0 && k.unsigned_abs() as usize == len / 2 {
                    want *= 0.5;
                }
                assert!((ck - want).norm() < 1e-12, "k = {k}");
            }
        }
    }

    #[test]
    fn reproduces_samples_at_nodes() {
        for (m, len) in [(11, 40), (11, 41)] {
            let s = random_periodic(m, len, 9);
            let a = coefficients_from_period(&s).unwrap();
            for (p, v) in s.values().iter().enumerate() {
                let t = (p as f64 - m as f64) / m as f64;
                assert!((a.eval(t) - v).norm() < 1e-11);
            }
            // Same through the uniform path.
            let u = a.evaluate_uniform(-1.0, 1.0 / m as f64, len).unwrap();
            for (x, y) in u.iter().zip(s.values()) {
                assert!((x - y).norm() < 1e-11);
            }
        }
    }

    #[test]
    fn real_data_even_length_gives_real_values() {
        let s = random_periodic(9, 30, 4);
        let real: Vec<C64> = s.values().iter().map(|z| C64::new(z.re, 0.0)).collect();
        let s = PeriodicSamples::from_values(9, real).unwrap();
        let a = coefficients_from_period(&s).unwrap();
        for t in [-0.93, 0.1, 0.77, 1.9] {
            assert!(a.eval(t).im.abs() < 1e-11);
        }
    }

    #[test]
    fn periodic_in_t() {
        let a = coefficients_from_period(&random_periodic(8, 25, 5)).unwrap();
        let p = a.period();
        for t in [-0.7, 0.0, 0.33, 1.2] {
            assert!((a.eval(t) - a.eval(t + p)).norm() < 1e-12);
        }
    }

    #[test]
    fn dense_grid_agrees_with_direct_summation() {
        let a = coefficients_from_period(&random_periodic(20, 61, 6)).unwrap();
        let (ts, fast) = a.evaluate_dense(20, 10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let scale = fast.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for _ in 0..50 {
            let i = rng.gen_range(0..ts.len());
            let direct: C64 = a
                .indexed_coefficients()
                .map(|(k, c)| c * C64::from_polar(1.0, 2.0 * PI * k as f64 * ts[i] / a.period()))
                .sum();
            assert!((fast[i] - direct).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn incommensurate_grid_uses_direct_path() {
        let a = FourierApproximant::new(2.4, vec![C64::new(0.5, 0.0), C64::new(1.0, 0.0), C64::new(0.5, 0.0)])
            .unwrap();
        // 2.4 / (1/7) is not an integer.
        let v = a.evaluate_uniform(-1.0, 1.0 / 7.0, 15).unwrap();
        for (i, z) in v.iter().enumerate() {
            let t = -1.0 + i as f64 / 7.0;
            let want = 1.0 + (2.0 * PI * t / 2.4).cos();
            assert!((z - C64::new(want, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn max_error_of_own_band_limited_function_is_tiny() {
        let a = FourierApproximant::new(
            2.5,
            vec![C64::new(0.1, 0.2), C64::new(-0.3, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.4), C64::new(0.05, -0.05)],
        )
        .unwrap();
        let b = a.clone();
        let e = max_error(&a, |t| b.eval(t), 40, 10).unwrap();
        assert!(e <= 1e-12);
        assert!(max_error(&a, |t| b.eval(t) + 1e-3, 40, 10).unwrap() >= 1e-3 * 0.999);
        assert!(max_error(&a, |t| b.eval(t), 40, 1).is_err());
    }

    #[test]
    fn constructor_validation() {
        assert!(FourierApproximant::new(0.0, vec![C64::new(1.0, 0.0)]).is_err());
        assert!(FourierApproximant::new(1.0, vec![C64::new(1.0, 0.0); 2]).is_err());
    }

    #[test]
    fn non_finite_points_give_nan() {
        let a = FourierApproximant::new(2.0, vec![C64::new(1.0, 0.0)]).unwrap();
        assert!(a.evaluate(&[f64::NAN])[0].re.is_nan());
    }
}
