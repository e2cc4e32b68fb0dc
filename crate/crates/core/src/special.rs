//! `erf`, the Airy function `Ai`, and the catalog of test functions used in
//! the experiments.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const TWO_OVER_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
const INV_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// Error function, accurate to about `1e-15` absolute.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let a = x.abs();
    let v = if a < 2.5 { erf_series(a) } else { 1.0 - erfc_cf(a) };
    v.copysign(x)
}

/// `(2/√π) e^{-x²} Σ 2ⁿ x^{2n+1} / (2n+1)!!`; every term is positive.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= 2.0 * x2 / (2.0 * n + 1.0);
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    TWO_OVER_SQRT_PI * (-x2).exp() * sum
}

/// `erfc(x)` for `x ≥ 2.5` from the continued fraction
/// `e^{-x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + …))))`, by modified Lentz.
fn erfc_cf(x: f64) -> f64 {
    if x > 27.3 {
        return 0.0;
    }
    let tiny = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for n in 1..500 {
        let an = n as f64 / 2.0;
        d = x + an * d;
        d = if d == 0.0 { tiny } else { d };
        c = x + an / c;
        c = if c == 0.0 { tiny } else { c };
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    INV_SQRT_PI * (-x * x).exp() / f
}

/// Largest `|x|` accepted by [`airy_ai`].
pub const AIRY_MAX_ABS: f64 = 160.0;

/// `Ai(0)`.
const AI0: f64 = 0.355_028_053_887_817_2;
/// `-Ai'(0)`.
const AIP0: f64 = 0.258_819_403_792_806_8;

/// Airy function of the first kind for `|x| ≤ 160`.
///
/// Maclaurin series on `[-2, 2]`; Taylor stepping of `y'' = xy` from the
/// origin on `[-12, -2)` and from an asymptotic start at `x = 12` on
/// `(2, 12)`; asymptotic expansions beyond `|x| = 12`. Positive arguments
/// above about 104 underflow to zero.
pub fn airy_ai(x: f64) -> Result<f64> {
    if !x.is_finite() || x.abs() > AIRY_MAX_ABS {
        return Err(Error::invalid("x", format!("Ai({x}) is outside |x| ≤ {AIRY_MAX_ABS}")));
    }
    Ok(if x.abs() <= 2.0 {
        airy_maclaurin(x).0
    } else if x < -12.0 {
        airy_oscillatory(-x)
    } else if x < 0.0 {
        let (a, ap) = airy_maclaurin(0.0);
        taylor_march(0.0, a, ap, x)
    } else if x < 12.0 {
        let (a, ap) = airy_decaying(12.0);
        taylor_march(12.0, a, ap, x)
    } else {
        airy_decaying(x).0
    })
}

/// `(Ai(x), Ai'(x))` from the two Maclaurin series.
fn airy_maclaurin(x: f64) -> (f64, f64) {
    let x3 = x * x * x;
    // f = Σ 3^k (1/3)_k x^{3k}/(3k)!,  g = Σ 3^k (2/3)_k x^{3k+1}/(3k+1)!
    let (mut f, mut g) = (1.0, x);
    let (mut tf, mut tg) = (1.0, x);
    let (mut fp, mut gp) = (0.0, 1.0);
    for k in 1..60 {
        let k3 = 3.0 * k as f64;
        tf *= x3 / ((k3 - 1.0) * k3);
        tg *= x3 / (k3 * (k3 + 1.0));
        f += tf;
        g += tg;
        // d/dx of x^{3k} and x^{3k+1} terms.
        fp += tf * k3 / x;
        gp += tg * (k3 + 1.0) / x;
        if tf.abs() <= 1e-17 * f.abs() && tg.abs() <= 1e-17 * g.abs().max(1e-300) {
            break;
        }
    }
    if x == 0.0 {
        fp = 0.0;
        gp = 1.0;
    }
    (AI0 * f - AIP0 * g, AI0 * fp - AIP0 * gp)
}

/// Integrates `y'' = xy` from `(x0, y, y')` to `x` with local Taylor series.
fn taylor_march(x0: f64, mut y: f64, mut yp: f64, x: f64) -> f64 {
    const MAX_STEP: f64 = 0.5;
    let steps = ((x - x0).abs() / MAX_STEP).ceil().max(1.0) as usize;
    let h = (x - x0) / steps as f64;
    let mut xc = x0;
    for _ in 0..steps {
        // a_{n+2} = (xc a_n + a_{n-1}) / ((n+2)(n+1))
        let (mut am1, mut a0, mut a1) = (0.0, y, yp);
        let (mut val, mut der) = (a0 + a1 * h, a1);
        let mut hp = h; // h^{n+1}
        let mut n = 0usize;
        // At xc = 0 every third coefficient vanishes, so wait for three
        // negligible terms in a row.
        let mut quiet = 0;
        loop {
            let a2 = (xc * a0 + am1) / (((n + 2) * (n + 1)) as f64);
            // term a_{n+2} h^{n+2} and its derivative (n+2) a_{n+2} h^{n+1}
            let dterm = (n + 2) as f64 * a2 * hp;
            hp *= h;
            let term = a2 * hp;
            val += term;
            der += dterm;
            am1 = a0;
            a0 = a1;
            a1 = a2;
            n += 1;
            if term.abs() <= 1e-18 * val.abs() && dterm.abs() <= 1e-18 * der.abs() {
                quiet += 1;
            } else {
                quiet = 0;
            }
            if quiet == 3 || n > 200 {
                break;
            }
        }
        y = val;
        yp = der;
        xc += h;
    }
    y
}

/// `u_k` of the Airy asymptotic expansions, `u_0 = 1`.
fn airy_u(k: usize) -> impl Iterator<Item = f64> {
    (0..k).scan(1.0, |u, i| {
        let cur = *u;
        let k = (i + 1) as f64;
        *u *= (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) / ((2.0 * k - 1.0) * 216.0 * k);
        Some(cur)
    })
}

/// `(Ai(x), Ai'(x))` for large positive `x` from the exponentially decaying
/// expansions.
fn airy_decaying(x: f64) -> (f64, f64) {
    let sx = x.sqrt();
    let zeta = 2.0 / 3.0 * x * sx;
    let (mut s, mut sp) = (0.0, 0.0);
    let mut zk = 1.0;
    let mut prev = f64::INFINITY;
    for (k, u) in airy_u(60).enumerate() {
        let kf = k as f64;
        let v = if k == 0 { 1.0 } else { -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u };
        let t = u / zk;
        if t.abs() > prev {
            break;
        }
        prev = t.abs();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s += sign * t;
        sp += sign * v / zk;
        if t.abs() < 1e-17 {
            break;
        }
        zk *= zeta;
    }
    let q = x.sqrt().sqrt();
    let e = (-zeta).exp() * 0.5 * INV_SQRT_PI;
    (e / q * s, -e * q * sp)
}

/// `Ai(-z)` for `z > 12`.
fn airy_oscillatory(z: f64) -> f64 {
    let zeta = 2.0 / 3.0 * z * z.sqrt();
    let (mut p, mut q) = (0.0, 0.0);
    let mut zk = 1.0;
    for (k, u) in airy_u(40).enumerate() {
        let t = u / zk;
        // Σ (-1)^j u_{2j} ζ^{-2j} and Σ (-1)^j u_{2j+1} ζ^{-2j-1}
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * t;
        } else {
            q += sign * t;
        }
        if t.abs() < 1e-17 {
            break;
        }
        zk *= zeta;
    }
    let (s, c) = zeta.sin_cos();
    // cos(ζ - π/4) and sin(ζ - π/4) without forming ζ - π/4.
    let cm = (c + s) * FRAC_1_SQRT_2;
    let sm = (s - c) * FRAC_1_SQRT_2;
    INV_SQRT_PI / z.sqrt().sqrt() * (cm * p + sm * q)
}

/// Built-in functions on `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestFunction {
    /// `erf(2t)`
    F1,
    /// `Ai(1+3t)`
    F2,
    /// `exp(sin(2.7πt) + cos(πt))`
    F3,
    /// `1/(1+100t²)`
    F4,
    /// `cos(100/(1+25t²))`
    F5,
    /// `erf(100t)`
    F6,
    /// `cos(100t²)`
    F7,
    /// `Ai(-66-70t)`
    F8,
    /// `exp(sin(65.5πt - 27π) - cos(20.6πt))`
    F9,
    /// `1/(1.01-t²)`
    F10,
    /// `Ai(150t)`
    F11,
    /// `sin(1500t²)`
    F12,
    /// `exp(iπωt)`
    PlaneWave { omega: f64 },
    /// `exp(t)`
    Exp,
    /// `1`
    One,
}

impl TestFunction {
    /// Names accepted by [`TestFunction::from_name`], in catalog order.
    pub const NAMES: [&'static str; 15] = [
        "f1", "f2", "f3", "f4", "f5", "f6", "f7", "f8", "f9", "f10", "f11", "f12", "exp_iw", "exp",
        "one",
    ];

    /// `omega` is required by `exp_iw` and ignored otherwise.
    pub fn from_name(name: &str, omega: Option<f64>) -> Result<Self> {
        use TestFunction::*;
        Ok(match name.to_ascii_lowercase().as_str() {
            "f1" => F1,
            "f2" => F2,
            "f3" => F3,
            "f4" => F4,
            "f5" => F5,
            "f6" => F6,
            "f7" => F7,
            "f8" => F8,
            "f9" => F9,
            "f10" => F10,
            "f11" => F11,
            "f12" => F12,
            "exp" => Exp,
            "one" => One,
            "exp_iw" => {
                let omega = omega.ok_or_else(|| Error::invalid("omega", "exp_iw needs ω"))?;
                if !omega.is_finite() {
                    return Err(Error::invalid("omega", format!("{omega} is not finite")));
                }
                PlaneWave { omega }
            }
            _ => return Err(Error::UnknownFunction(name.to_string())),
        })
    }

    pub fn name(&self) -> &'static str {
        use TestFunction::*;
        match self {
            F1 => "f1",
            F2 => "f2",
            F3 => "f3",
            F4 => "f4",
            F5 => "f5",
            F6 => "f6",
            F7 => "f7",
            F8 => "f8",
            F9 => "f9",
            F10 => "f10",
            F11 => "f11",
            F12 => "f12",
            PlaneWave { .. } => "exp_iw",
            Exp => "exp",
            One => "one",
        }
    }

    /// Whether the function is real-valued on the real line.
    pub fn is_real(&self) -> bool {
        !matches!(self, TestFunction::PlaneWave { .. })
    }

    /// Value at `t`; NaN where the formula is undefined (Airy arguments
    /// beyond `|x| = 160`, the poles of `f10`).
    pub fn value(&self, t: f64) -> C64 {
        use TestFunction::*;
        let r = |v: f64| C64::new(v, 0.0);
        let ai = |x: f64| r(airy_ai(x).unwrap_or(f64::NAN));
        match *self {
            F1 => r(erf(2.0 * t)),
            F2 => ai(1.0 + 3.0 * t),
            F3 => r(((2.7 * PI * t).sin() + (PI * t).cos()).exp()),
            F4 => r(1.0 / (1.0 + 100.0 * t * t)),
            F5 => r((100.0 / (1.0 + 25.0 * t * t)).cos()),
            F6 => r(erf(100.0 * t)),
            F7 => r((100.0 * t * t).cos()),
            F8 => ai(-66.0 - 70.0 * t),
            F9 => r(((65.5 * PI * t - 27.0 * PI).sin() - (20.6 * PI * t).cos()).exp()),
            F10 => {
                let d = 1.01 - t * t;
                if d == 0.0 {
                    r(f64::NAN)
                } else {
                    r(1.0 / d)
                }
            }
            F11 => ai(150.0 * t),
            F12 => r((1500.0 * t * t).sin()),
            PlaneWave { omega } => C64::from_polar(1.0, PI * omega * t),
            Exp => r(t.exp()),
            One => r(1.0),
        }
    }

    /// Vectorized [`TestFunction::value`] that fails instead of producing
    /// NaN.
    pub fn evaluate(&self, ts: &[f64]) -> Result<Vec<C64>> {
        ts.iter()
            .map(|&t| {
                let v = self.value(t);
                if v.re.is_finite() && v.im.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::invalid(
                        "t",
                        format!("{} is undefined at t = {t}", self.name()),
                    ))
                }
            })
            .collect()
    }
}

/// Evaluates the catalog function `name` at every point of `ts`.
pub fn test_function(name: &str, omega: Option<f64>, ts: &[f64]) -> Result<Vec<C64>> {
    TestFunction::from_name(name, omega)?.evaluate(ts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erf_values() {
        assert_eq!(erf(0.0), 0.0);
        assert!((erf(1.0) - 0.842_700_792_949_714_9).abs() <= 1e-15);
        assert_eq!(erf(40.0), 1.0);
        assert!(erf(f64::NAN).is_nan());
        for x in [0.1, 0.7, 2.49, 2.5, 3.3, 6.0] {
            assert_eq!(erf(-x), -erf(x));
        }
    }

    #[test]
    fn airy_values() {
        assert!((airy_ai(0.0).unwrap() - 0.355_028_053_887_817_2).abs() <= 1e-16);
        assert!(airy_ai(-2.338_107_410_459_767).unwrap().abs() <= 1e-10);
        assert!(airy_ai(160.5).is_err());
        assert!(airy_ai(f64::NAN).is_err());
        let mut prev = airy_ai(5.0).unwrap();
        for i in 1..=150 {
            let v = airy_ai(5.0 + 0.1 * i as f64).unwrap();
            assert!(v > 0.0 && v < prev);
            prev = v;
        }
    }

    #[test]
    fn airy_methods_overlap() {
        let (a0, ap0) = airy_maclaurin(0.0);
        let (a12, ap12) = airy_decaying(12.0);
        for x in [-2.0, -1.5] {
            let d = taylor_march(0.0, a0, ap0, x) - airy_maclaurin(x).0;
            assert!(d.abs() <= 1e-14, "x = {x}: {d:e}");
        }
        for x in [-12.0, -12.5, -14.0] {
            let d = taylor_march(0.0, a0, ap0, x) - airy_oscillatory(-x);
            assert!(d.abs() <= 1e-13, "x = {x}: {d:e}");
        }
        for x in [1.5, 2.0] {
            let m = airy_maclaurin(x).0;
            let d = taylor_march(12.0, a12, ap12, x) - m;
            assert!(d.abs() <= 1e-13 * m, "x = {x}: {d:e}");
        }
        for x in [9.0, 10.5] {
            let a = airy_decaying(x).0;
            let d = taylor_march(12.0, a12, ap12, x) - a;
            assert!(d.abs() <= 1e-13 * a, "x = {x}: {d:e}");
        }
    }

    #[test]
    fn catalog_examples() {
        let v = |n: &str, t: f64| test_function(n, None, &[t]).unwrap()[0];
        assert_eq!(v("f4", 0.0), C64::new(1.0, 0.0));
        assert!((v("f10", 0.0).re - 1.0 / 1.01).abs() < 1e-16);
        assert_eq!(v("f7", 0.0), C64::new(1.0, 0.0));
        assert!((v("f5", 0.0).re - 100f64.cos()).abs() < 1e-15);
        assert!(matches!(
            test_function("f13", None, &[0.0]),
            Err(Error::UnknownFunction(_))
        ));
        assert!(TestFunction::from_name("exp_iw", None).is_err());
        let w = TestFunction::from_name("exp_iw", Some(2.0)).unwrap();
        assert!((w.value(0.25) - C64::new(0.0, 1.0)).norm() < 1e-15);
        assert!(TestFunction::F8.evaluate(&[2.0]).is_err());
        assert!(TestFunction::F10.value(1.01f64.sqrt()).re.abs() > 1e10);
    }

    #[test]
    fn names_round_trip() {
        for name in TestFunction::NAMES {
            let f = TestFunction::from_name(name, Some(3.0)).unwrap();
            assert_eq!(f.name(), name);
        }
    }

    #[test]
    fn symmetries() {
        use TestFunction::*;
        for t in [0.013, 0.31, 0.5, 0.77, 0.999] {
            for f in [F4, F5, F7, F10, F12] {
                assert!((f.value(t) - f.value(-t)).norm() <= 1e-14 * f.value(t).norm().max(1.0));
            }
            for f in [F1, F6] {
                assert_eq!(f.value(t), -f.value(-t));
            }
        }
    }
}
