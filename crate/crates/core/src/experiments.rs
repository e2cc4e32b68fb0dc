//! Parameter sweeps, resolution searches, the `T̂_1` / `m̂` estimators and
//! timing runs.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::time::Instant;

use num_complex::Complex64 as C64;

use crate::approximant::{coefficients_from_period, max_error, FourierApproximant};
use crate::baseline::{fulldata_fe, FullDataConfig};
use crate::error::{Error, Result};
use crate::extension::{precompute_operator, ExtensionConfig};
use crate::grids::UniformGrid;
use crate::refined::{precompute_refined, RefinedConfig, RefinedOperator};
use crate::special::TestFunction;

/// Dense-grid factor of the error metric.
pub const ERROR_DENSITY: usize = 10;

/// Which algorithm to run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Boundary-interval extension, refined by `r` (1 = unrefined).
    Boundary { config: ExtensionConfig, r: usize },
    FullData(FullDataConfig),
}

/// A method with its precomputed operator, if it has one.
#[derive(Debug, Clone)]
pub enum Solver {
    Boundary(Box<RefinedOperator>),
    FullData(FullDataConfig),
}

impl Solver {
    pub fn new(method: Method) -> Result<Self> {
        Ok(match method {
            Method::Boundary { config, r } => {
                Solver::Boundary(Box::new(precompute_refined(RefinedConfig::new(config, r)?)?))
            }
            Method::FullData(cfg) => Solver::FullData(cfg),
        })
    }

    pub fn approximate(&self, f: &TestFunction, m_half: usize) -> Result<FourierApproximant> {
        let g = |t: f64| f.value(t);
        match self {
            Solver::Boundary(op) => {
                let p = op.extend_fn(m_half, g)?;
                if p.values().iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                    return Err(Error::NonFinite("function samples"));
                }
                coefficients_from_period(&p)
            }
            Solver::FullData(cfg) => {
                let samples = f.evaluate(&UniformGrid::new(m_half)?.nodes())?;
                fulldata_fe(&samples, cfg)
            }
        }
    }

    /// Dense-grid max error of the approximation from `2M+1` samples.
    pub fn error(&self, f: &TestFunction, m_half: usize) -> Result<f64> {
        let a = self.approximate(f, m_half)?;
        max_error(&a, |t| f.value(t), m_half, ERROR_DENSITY)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParam {
    TDelta,
    MDelta,
    M,
    R,
    Gamma,
}

impl SweepParam {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "Tdelta" | "T" | "t_delta" => SweepParam::TDelta,
            "mdelta" | "m" | "m_delta" => SweepParam::MDelta,
            "M" => SweepParam::M,
            "R" => SweepParam::R,
            "gamma" => SweepParam::Gamma,
            _ => {
                return Err(Error::invalid(
                    "sweep parameter",
                    format!("`{s}` is not one of Tdelta, mdelta, M, R, gamma"),
                ))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            SweepParam::TDelta => "Tdelta",
            SweepParam::MDelta => "mdelta",
            SweepParam::M => "M",
            SweepParam::R => "R",
            SweepParam::Gamma => "gamma",
        }
    }

    fn is_integer(&self) -> bool {
        matches!(self, SweepParam::MDelta | SweepParam::M | SweepParam::R)
    }
}

/// Fixed parameters of a boundary-method sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepBase {
    pub t_delta: f64,
    pub m_delta: usize,
    pub gamma: f64,
    pub tau: f64,
    pub m_half: usize,
    pub r: usize,
}

impl Default for SweepBase {
    fn default() -> Self {
        Self {
            t_delta: 6.0,
            m_delta: 25,
            gamma: 1.0,
            tau: 1e-14,
            m_half: 500,
            r: 1,
        }
    }
}

impl SweepBase {
    fn with(&self, param: SweepParam, value: f64) -> Self {
        let mut b = *self;
        match param {
            SweepParam::TDelta => b.t_delta = value,
            SweepParam::MDelta => b.m_delta = value as usize,
            SweepParam::M => b.m_half = value as usize,
            SweepParam::R => b.r = value as usize,
            SweepParam::Gamma => b.gamma = value,
        }
        b
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<f64>,
    pub base: SweepBase,
    pub function: TestFunction,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::invalid("values", "sweep needs at least one value"));
        }
        if self.values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::invalid("values", "swept values must be positive"));
        }
        if self.values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("values", "swept values must be strictly increasing"));
        }
        if self.param.is_integer() && self.values.iter().any(|v| v.fract() != 0.0) {
            return Err(Error::invalid(
                "values",
                format!("{} takes integer values", self.param.name()),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    /// NaN when the point could not be computed.
    pub error: f64,
    pub seconds: f64,
}

type OperatorKey = (u64, usize, u64, u64, usize);

/// Runs one approximation per swept value. Points that fail (invalid
/// parameter combination, non-finite data) yield a NaN error instead of
/// aborting the sweep. Operators are shared between points with equal
/// configuration.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let mut ops: HashMap<OperatorKey, RefinedOperator> = HashMap::new();
    let mut rows = Vec::with_capacity(spec.values.len());
    for &value in &spec.values {
        let b = spec.base.with(spec.param, value);
        let start = Instant::now();
        let key = (b.t_delta.to_bits(), b.m_delta, b.gamma.to_bits(), b.tau.to_bits(), b.r);
        let mut run = || -> Result<f64> {
            if let Entry::Vacant(slot) = ops.entry(key) {
                let cfg = ExtensionConfig::new(b.t_delta, b.m_delta, b.gamma, b.tau)?;
                slot.insert(precompute_refined(RefinedConfig::new(cfg, b.r)?)?);
            }
            let op = &ops[&key];
            let f = spec.function;
            let a = coefficients_from_period(&op.extend_fn(b.m_half, |t| f.value(t))?)?;
            max_error(&a, |t| f.value(t), b.m_half, ERROR_DENSITY)
        };
        let error = run().unwrap_or(f64::NAN);
        rows.push(SweepRow {
            value,
            error,
            seconds: start.elapsed().as_secs_f64(),
        });
    }
    Ok(rows)
}

/// Search window for [`resolution`]: candidates are `lo, lo+step, …, ≤ hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolutionQuery {
    pub delta: f64,
    pub lo: usize,
    pub hi: usize,
    pub step: usize,
}

impl ResolutionQuery {
    pub fn new(delta: f64, lo: usize, hi: usize, step: usize) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::invalid("delta", format!("{delta} must lie in (0, 1)")));
        }
        if lo == 0 || hi < lo || step == 0 {
            return Err(Error::invalid("bounds", format!("need 0 < lo ≤ hi, step > 0 (got {lo}, {hi}, {step})")));
        }
        Ok(Self { delta, lo, hi, step })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolutionResult {
    pub m_star: usize,
    /// Every `(M, error)` pair evaluated, ascending in `M`.
    pub evaluations: Vec<(usize, f64)>,
}

/// Smallest candidate `M` with `error ≤ δ` there and at the next two
/// candidates inside the window, found by bisection.
///
/// The two look-ahead points keep an isolated lucky dip below `δ` from being
/// reported. Fails with [`Error::Numerical`] when even `hi` does not qualify.
pub fn resolution(solver: &Solver, f: &TestFunction, q: &ResolutionQuery) -> Result<ResolutionResult> {
    let count = (q.hi - q.lo) / q.step + 1;
    let at = |i: usize| q.lo + i * q.step;
    let mut memo: HashMap<usize, f64> = HashMap::new();
    let mut err = |i: usize| -> f64 {
        *memo
            .entry(i)
            .or_insert_with(|| solver.error(f, at(i)).unwrap_or(f64::NAN))
    };
    let mut passes = |i: usize| -> bool { (i..(i + 3).min(count)).all(|j| err(j) <= q.delta) };

    if !passes(count - 1) {
        return Err(Error::Numerical(format!(
            "no M in [{}, {}] reaches error {:e}",
            q.lo,
            at(count - 1),
            q.delta
        )));
    }
    // Invariant: `passes(hi)`, and `!passes(lo)` unless `hi == 0`.
    let mut hi = count - 1;
    if passes(0) {
        hi = 0;
    } else {
        let mut lo = 0;
        while hi > lo + 1 {
            let mid = lo + (hi - lo) / 2;
            if passes(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    let mut evaluations: Vec<(usize, f64)> = memo.into_iter().map(|(i, e)| (at(i), e)).collect();
    evaluations.sort_by_key(|p| p.0);
    Ok(ResolutionResult {
        m_star: at(hi),
        evaluations,
    })
}

/// Settings of the `T̂_1` estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct T1Options {
    pub omegas: Vec<f64>,
    pub t_start: f64,
    pub t_step: f64,
    pub t_max: f64,
    pub m_delta: usize,
    pub m_half: usize,
    pub threshold: f64,
    pub tau: f64,
}

impl Default for T1Options {
    /// `ω = 1..=50`, `T = 1.1, 1.2, …`, `m = 100`, `M = 500`, threshold `1e-13`.
    fn default() -> Self {
        Self {
            omegas: (1..=50).map(f64::from).collect(),
            t_start: 1.1,
            t_step: 0.1,
            t_max: 30.0,
            m_delta: 100,
            m_half: 500,
            threshold: 1e-13,
            tau: 1e-14,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdEstimate {
    /// First parameter value below the threshold for each `ω`, if any.
    pub per_omega: Vec<(f64, Option<f64>)>,
    /// Mean over the `ω` that crossed; NaN if none did.
    pub mean: f64,
}

fn summarize(per_omega: Vec<(f64, Option<f64>)>) -> ThresholdEstimate {
    let hits: Vec<f64> = per_omega.iter().filter_map(|p| p.1).collect();
    let mean = if hits.is_empty() {
        f64::NAN
    } else {
        hits.iter().sum::<f64>() / hits.len() as f64
    };
    ThresholdEstimate { per_omega, mean }
}

/// For each `ω`, the first `T` on the grid where the error for
/// `exp(iπωt)` drops below the threshold; reports their mean. One operator is
/// built per `T` and shared by all `ω`.
pub fn estimate_t1(gamma: f64, opts: &T1Options) -> Result<ThresholdEstimate> {
    let grid = UniformGrid::new(opts.m_half)?;
    let waves: Vec<(TestFunction, Vec<C64>)> = opts
        .omegas
        .iter()
        .map(|&omega| {
            let f = TestFunction::PlaneWave { omega };
            (f, grid.sample(|t| f.value(t)))
        })
        .collect();
    let mut first: Vec<Option<f64>> = vec![None; waves.len()];
    let mut i = 0usize;
    loop {
        let t = opts.t_start + i as f64 * opts.t_step;
        // Snap to the decimal grid so that 1.1 + 48·0.1 prints and rounds as 5.9.
        let t = (t * 1e9).round() / 1e9;
        if t > opts.t_max + 1e-12 || first.iter().all(Option::is_some) {
            break;
        }
        i += 1;
        let Ok(cfg) = ExtensionConfig::new(t, opts.m_delta, gamma, opts.tau) else {
            continue;
        };
        let op = precompute_operator(cfg)?;
        for ((f, samples), hit) in waves.iter().zip(first.iter_mut()) {
            if hit.is_some() {
                continue;
            }
            let a = op.approximate(samples)?;
            let e = max_error(&a, |x| f.value(x), opts.m_half, ERROR_DENSITY)?;
            if e < opts.threshold {
                *hit = Some(t);
            }
        }
    }
    Ok(summarize(opts.omegas.iter().copied().zip(first).collect()))
}

/// First `m` in `m_values` at which `exp(iπωt)` is approximated below
/// `threshold` with the given `T`, `γ`, `M`.
pub fn estimate_m_hat(
    t_delta: f64,
    gamma: f64,
    omega: f64,
    m_half: usize,
    m_values: impl IntoIterator<Item = usize>,
    threshold: f64,
    tau: f64,
) -> Result<Option<usize>> {
    let f = TestFunction::PlaneWave { omega };
    let samples = UniformGrid::new(m_half)?.sample(|t| f.value(t));
    for m in m_values {
        let Ok(cfg) = ExtensionConfig::new(t_delta, m, gamma, tau) else {
            continue;
        };
        let a = precompute_operator(cfg)?.approximate(&samples)?;
        if max_error(&a, |x| f.value(x), m_half, ERROR_DENSITY)? < threshold {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRow {
    pub m_half: usize,
    /// Median over the repetitions.
    pub seconds: f64,
    pub min_seconds: f64,
    pub max_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    /// Time to factor the system matrix (cold start).
    pub precompute_seconds: f64,
    pub rows: Vec<BenchRow>,
}

/// Times `samples → approximant` with a warm operator, `repeats` runs per
/// `M`. Sampling the function is not timed.
pub fn bench(m_values: &[usize], config: ExtensionConfig, repeats: usize) -> Result<BenchReport> {
    if m_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("M list", "must be strictly increasing"));
    }
    let repeats = repeats.max(1);
    let start = Instant::now();
    let op = precompute_operator(config)?;
    let precompute_seconds = start.elapsed().as_secs_f64();
    let f = TestFunction::Exp;
    let mut rows = Vec::with_capacity(m_values.len());
    for &m in m_values {
        let samples = UniformGrid::new(m)?.sample(|t| f.value(t));
        // Warm-up also plans the transforms for this length.
        std::hint::black_box(op.approximate(&samples)?);
        let mut times: Vec<f64> = (0..repeats)
            .map(|_| {
                let t0 = Instant::now();
                let a = op.approximate(&samples);
                let dt = t0.elapsed().as_secs_f64();
                std::hint::black_box(a).map(|_| dt)
            })
            .collect::<Result<_>>()?;
        times.sort_by(f64::total_cmp);
        rows.push(BenchRow {
            m_half: m,
            seconds: times[times.len() / 2],
            min_seconds: times[0],
            max_seconds: times[times.len() - 1],
        });
    }
    Ok(BenchReport {
        precompute_seconds,
        rows,
    })
}

/// Least-squares slope of `log(seconds)` against `log(M)`.
pub fn loglog_slope(rows: &[BenchRow]) -> f64 {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| ((r.m_half as f64).ln(), r.seconds.ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn boundary() -> Solver {
        Solver::new(Method::Boundary {
            config: ExtensionConfig::default(),
            r: 1,
        })
        .unwrap()
    }

    #[test]
    fn sweep_validation() {
        let mut spec = SweepSpec {
            param: SweepParam::M,
            values: vec![100.0, 200.0],
            base: SweepBase::default(),
            function: TestFunction::Exp,
        };
        assert!(spec.validate().is_ok());
        spec.values = vec![200.0, 100.0];
        assert!(spec.validate().is_err());
        spec.values = vec![100.5];
        assert!(spec.validate().is_err());
        spec.values = vec![-1.0];
        assert!(spec.validate().is_err());
        spec.values = vec![];
        assert!(spec.validate().is_err());
    }

    #[test]
    fn failed_points_are_nan() {
        let spec = SweepSpec {
            param: SweepParam::M,
            values: vec![10.0, 100.0],
            base: SweepBase::default(),
            function: TestFunction::Exp,
        };
        let rows = sweep(&spec).unwrap();
        assert!(rows[0].error.is_nan(), "M = 10 < m = 25");
        assert!(rows[1].error < 1e-11);
    }

    #[test]
    fn sweep_is_deterministic() {
        let spec = SweepSpec {
            param: SweepParam::TDelta,
            values: vec![3.0, 6.0],
            base: SweepBase {
                m_half: 120,
                ..SweepBase::default()
            },
            function: TestFunction::PlaneWave { omega: 7.0 },
        };
        let a: Vec<f64> = sweep(&spec).unwrap().iter().map(|r| r.error).collect();
        let b: Vec<f64> = sweep(&spec).unwrap().iter().map(|r| r.error).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn sweep_param_names() {
        for p in [SweepParam::TDelta, SweepParam::MDelta, SweepParam::M, SweepParam::R, SweepParam::Gamma] {
            assert_eq!(SweepParam::parse(p.name()).unwrap(), p);
        }
        assert!(SweepParam::parse("x").is_err());
    }

    #[test]
    fn resolution_finds_the_threshold() {
        let f = TestFunction::PlaneWave { omega: 20.0 };
        let q = ResolutionQuery::new(1e-10, 25, 400, 5).unwrap();
        let r = resolution(&boundary(), &f, &q).unwrap();
        let e = |m: usize| r.evaluations.iter().find(|p| p.0 == m).map(|p| p.1);
        assert!(e(r.m_star).unwrap() <= 1e-10);
        if r.m_star > 25 {
            let before = boundary().error(&f, r.m_star - 5).unwrap();
            let guard_fails = [r.m_star - 5, r.m_star, r.m_star + 5]
                .iter()
                .any(|&m| boundary().error(&f, m).unwrap() > 1e-10);
            assert!(before > 1e-10 || guard_fails);
        }
        assert!((20..=140).contains(&r.m_star), "{}", r.m_star);
    }

    #[test]
    fn resolution_reports_unreachable_targets() {
        let f = TestFunction::PlaneWave { omega: 200.0 };
        let q = ResolutionQuery::new(1e-10, 25, 60, 5).unwrap();
        assert!(matches!(resolution(&boundary(), &f, &q), Err(Error::Numerical(_))));
        assert!(ResolutionQuery::new(2.0, 1, 2, 1).is_err());
        assert!(ResolutionQuery::new(0.1, 5, 2, 1).is_err());
    }

    #[test]
    fn slope_of_exact_power_law() {
        let rows: Vec<BenchRow> = [100usize, 200, 400]
            .iter()
            .map(|&m| BenchRow {
                m_half: m,
                seconds: 1e-6 * (m as f64).powf(1.1),
                min_seconds: 0.0,
                max_seconds: 0.0,
            })
            .collect();
        assert!((loglog_slope(&rows) - 1.1).abs() < 1e-12);
    }

    #[test]
    fn bench_runs() {
        let r = bench(&[64, 128], ExtensionConfig::default(), 3).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert!(r.rows.iter().all(|b| b.min_seconds <= b.seconds && b.seconds <= b.max_seconds));
        assert!(bench(&[128, 64], ExtensionConfig::default(), 3).is_err());
    }
}
