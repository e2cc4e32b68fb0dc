//! `fext`: approximation runs, parameter sweeps, resolution searches, timing
//! and operator caching for boundary-interval Fourier extension.

mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use fourier_extension::approximant::{max_error, FourierApproximant};
use fourier_extension::baseline::FullDataConfig;
use fourier_extension::cache::{load_operator, save_operator};
use fourier_extension::error::Error;
use fourier_extension::experiments::{
    bench, estimate_m_hat, estimate_t1, loglog_slope, resolution, sweep, Method, ResolutionQuery,
    Solver, SweepBase, SweepParam, SweepSpec, T1Options, ERROR_DENSITY,
};
use fourier_extension::extension::{precompute_operator, ExtensionConfig};
use fourier_extension::refined::{fine_boundary_abscissae, precompute_refined, RefinedConfig};
use fourier_extension::special::TestFunction;
use serde::Serialize;

use crate::io::{match_abscissae, read_points, uniform_half_count, write_record, write_rows, Format, Point};

/// Failure classes, mapped to exit codes 2 and 3.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numerical(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Numerical(_) | Error::NonFinite(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "fext", version, about = "Fourier extension from boundary interval data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Approximate a catalog function or a samples file.
    Approximate(ApproximateArgs),
    /// Error against one swept parameter.
    Sweep(SweepArgs),
    /// Smallest M reaching a target error.
    Resolution(ResolutionArgs),
    /// Warm-operator timings over a list of M.
    Bench(BenchArgs),
    /// Save or validate a precomputed operator.
    Cache(CacheArgs),
    /// Boundary method against the full-data baseline at one M.
    Compare(CompareArgs),
    /// Threshold estimates for T and m.
    #[command(subcommand)]
    Estimate(EstimateCommand),
}

#[derive(Args, Clone, Copy)]
struct ConfigArgs {
    /// Extension ratio.
    #[arg(long = "Tdelta", default_value_t = 6.0)]
    t_delta: f64,
    /// Boundary nodes per side.
    #[arg(long = "mdelta", default_value_t = 25)]
    m_delta: usize,
    /// Oversampling ratio (m-1)/n.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Absolute singular value cut-off.
    #[arg(long, default_value_t = 1e-14)]
    tau: f64,
    /// Boundary refinement factor.
    #[arg(long = "R", default_value_t = 1)]
    r: usize,
}

impl ConfigArgs {
    fn config(&self) -> CliResult<ExtensionConfig> {
        Ok(ExtensionConfig::new(self.t_delta, self.m_delta, self.gamma, self.tau)?)
    }
}

#[derive(Args, Clone, Copy)]
struct BaselineArgs {
    /// Full-data extension ratio (period 2T).
    #[arg(long = "baseline-T", default_value_t = 2.0)]
    baseline_t: f64,
    #[arg(long = "baseline-gamma", default_value_t = 2.0)]
    baseline_gamma: f64,
    /// Cut-off relative to the largest singular value.
    #[arg(long = "baseline-tau", default_value_t = 1e-14)]
    baseline_tau: f64,
}

impl BaselineArgs {
    fn config(&self) -> CliResult<FullDataConfig> {
        Ok(FullDataConfig::new(self.baseline_t, self.baseline_gamma, self.baseline_tau)?)
    }
}

#[derive(Args, Clone)]
struct FunctionArgs {
    /// Catalog name: f1..f12, exp_iw, exp, one.
    #[arg(long)]
    function: Option<String>,
    /// Frequency of exp_iw; giving only ω selects exp_iw.
    #[arg(long)]
    omega: Option<f64>,
}

impl FunctionArgs {
    fn get(&self) -> CliResult<Option<TestFunction>> {
        match (&self.function, self.omega) {
            (Some(name), omega) => Ok(Some(TestFunction::from_name(name, omega)?)),
            (None, Some(omega)) => Ok(Some(TestFunction::from_name("exp_iw", Some(omega))?)),
            (None, None) => Ok(None),
        }
    }

    fn require(&self) -> CliResult<TestFunction> {
        self.get()?
            .ok_or_else(|| CliError::Validation("give --function or --omega".into()))
    }
}

#[derive(Args)]
struct ApproximateArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(flatten)]
    function: FunctionArgs,
    /// Half the number of samples (required with --function).
    #[arg(long = "M")]
    m_half: Option<usize>,
    /// Samples file with header `t,re[,im]` on the uniform grid of [-1, 1].
    #[arg(long)]
    input: Option<PathBuf>,
    /// Fine boundary samples (`t,re[,im]`, left block then right) for --R > 1
    /// with --input.
    #[arg(long)]
    fine_boundary: Option<PathBuf>,
    /// Prefix for `<prefix>.coefficients.*` and `<prefix>.dense.*`.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Dense grid factor.
    #[arg(long, default_value_t = ERROR_DENSITY)]
    density: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Serialize)]
struct CoefficientRow {
    k: i64,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct ApproximateSummary {
    m_half: usize,
    r: usize,
    period: f64,
    coefficients: usize,
    max_error: Option<f64>,
    seconds: f64,
}

fn approximate(a: ApproximateArgs) -> CliResult {
    let start = Instant::now();
    let cfg = a.config.config()?;
    let f = a.function.get()?;
    let (samples, m_half) = match (&a.input, f, a.m_half) {
        (Some(path), _, m) => {
            let pts = read_points(path)?;
            let m_half = uniform_half_count(&pts)?;
            if m.is_some_and(|m| m != m_half) {
                return Err(CliError::Validation(format!(
                    "--M {} disagrees with the {} samples in the file",
                    m.unwrap(),
                    pts.len()
                )));
            }
            (pts.iter().map(Point::value).collect::<Vec<_>>(), m_half)
        }
        (None, Some(f), Some(m)) => (f.evaluate(&uniform_nodes(m))?, m),
        (None, Some(_), None) => return Err(CliError::Validation("--function needs --M".into())),
        (None, None, _) => return Err(CliError::Validation("give --input or --function".into())),
    };

    let approx: FourierApproximant = if a.config.r == 1 {
        precompute_operator(cfg)?.approximate(&samples)?
    } else {
        let rc = RefinedConfig::new(cfg, a.config.r)?;
        let (lt, rt) = fine_boundary_abscissae(&rc, m_half)?;
        let (left, right) = match (&a.fine_boundary, f) {
            (Some(path), _) => {
                let pts = read_points(path)?;
                if pts.len() != lt.len() + rt.len() {
                    return Err(CliError::Validation(format!(
                        "fine boundary file needs {} rows, has {}",
                        lt.len() + rt.len(),
                        pts.len()
                    )));
                }
                let (pl, pr) = pts.split_at(lt.len());
                (
                    match_abscissae(pl, &lt, "left fine block")?,
                    match_abscissae(pr, &rt, "right fine block")?,
                )
            }
            (None, Some(f)) => (f.evaluate(&lt)?, f.evaluate(&rt)?),
            (None, None) => {
                return Err(CliError::Validation(
                    "--R > 1 with --input needs --fine-boundary".into(),
                ))
            }
        };
        let op = precompute_refined(rc)?;
        fourier_extension::approximant::coefficients_from_period(&op.extend(&samples, &left, &right)?)?
    };
    if approx.coefficients().iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(CliError::Numerical("non-finite coefficients".into()));
    }

    let error = match f {
        Some(f) => Some(max_error(&approx, |t| f.value(t), m_half, a.density)?),
        None => None,
    };
    if let Some(prefix) = &a.output {
        let coeffs: Vec<CoefficientRow> = approx
            .indexed_coefficients()
            .map(|(k, z)| CoefficientRow { k, re: z.re, im: z.im })
            .collect();
        write_rows(&coeffs, a.format, Some(&with_suffix(prefix, "coefficients", a.format)))?;
        let (ts, vs) = approx.evaluate_dense(m_half, a.density)?;
        let dense: Vec<Point> = ts.iter().zip(&vs).map(|(&t, &z)| Point::new(t, z)).collect();
        write_rows(&dense, a.format, Some(&with_suffix(prefix, "dense", a.format)))?;
    }
    write_record(
        &ApproximateSummary {
            m_half,
            r: a.config.r,
            period: approx.period(),
            coefficients: approx.coefficients().len(),
            max_error: error,
            seconds: start.elapsed().as_secs_f64(),
        },
        a.format,
        None,
    )
}

fn uniform_nodes(m: usize) -> Vec<f64> {
    (0..=2 * m).map(|i| (i as f64 - m as f64) / m as f64).collect()
}

fn with_suffix(prefix: &Path, what: &str, format: Format) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(format!(".{what}.{}", format.extension()));
    PathBuf::from(s)
}

#[derive(Args)]
struct SweepArgs {
    /// Tdelta, mdelta, M, R or gamma.
    #[arg(long)]
    param: String,
    /// Comma-separated increasing values.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    values: Vec<f64>,
    #[command(flatten)]
    config: ConfigArgs,
    #[command(flatten)]
    function: FunctionArgs,
    #[arg(long = "M", default_value_t = 500)]
    m_half: usize,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Serialize)]
struct SweepOut {
    value: f64,
    max_error: f64,
    seconds: f64,
}

fn run_sweep(a: SweepArgs) -> CliResult {
    let c = a.config;
    let spec = SweepSpec {
        param: SweepParam::parse(&a.param)?,
        values: a.values,
        base: SweepBase {
            t_delta: c.t_delta,
            m_delta: c.m_delta,
            gamma: c.gamma,
            tau: c.tau,
            m_half: a.m_half,
            r: c.r,
        },
        function: a.function.require()?,
    };
    let rows: Vec<SweepOut> = sweep(&spec)?
        .into_iter()
        .map(|r| SweepOut {
            value: r.value,
            max_error: r.error,
            seconds: r.seconds,
        })
        .collect();
    write_rows(&rows, a.format, a.output.as_deref())
}

#[derive(Args)]
struct ResolutionArgs {
    #[command(flatten)]
    function: FunctionArgs,
    /// Target error.
    #[arg(long, default_value_t = 1e-10)]
    delta: f64,
    #[arg(long, default_value_t = 10)]
    lo: usize,
    #[arg(long, default_value_t = 2000)]
    hi: usize,
    #[arg(long, default_value_t = 10)]
    step: usize,
    /// Use the full-data baseline instead of the boundary method.
    #[arg(long)]
    baseline: bool,
    #[command(flatten)]
    config: ConfigArgs,
    #[command(flatten)]
    baseline_config: BaselineArgs,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Serialize)]
struct Evaluation {
    #[serde(rename = "M")]
    m: usize,
    max_error: f64,
    selected: bool,
}

#[derive(Serialize)]
struct ResolutionOut {
    m_star: usize,
    evaluations: Vec<Evaluation>,
}

fn method_of(baseline: bool, c: &ConfigArgs, b: &BaselineArgs) -> CliResult<Method> {
    Ok(if baseline {
        Method::FullData(b.config()?)
    } else {
        Method::Boundary {
            config: c.config()?,
            r: c.r,
        }
    })
}

fn run_resolution(a: ResolutionArgs) -> CliResult {
    let f = a.function.require()?;
    let q = ResolutionQuery::new(a.delta, a.lo, a.hi, a.step)?;
    let solver = Solver::new(method_of(a.baseline, &a.config, &a.baseline_config)?)?;
    let r = resolution(&solver, &f, &q)?;
    eprintln!("M* = {}", r.m_star);
    let evaluations: Vec<Evaluation> = r
        .evaluations
        .iter()
        .map(|&(m, e)| Evaluation {
            m,
            max_error: e,
            selected: m == r.m_star,
        })
        .collect();
    match a.format {
        Format::Csv => write_rows(&evaluations, a.format, a.output.as_deref()),
        Format::Json => write_record(
            &ResolutionOut {
                m_star: r.m_star,
                evaluations,
            },
            a.format,
            a.output.as_deref(),
        ),
    }
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated increasing M values (default 2^14..2^20).
    #[arg(long = "M", value_delimiter = ',', num_args = 1..)]
    m_values: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Serialize)]
struct BenchOut {
    #[serde(rename = "M")]
    m: usize,
    seconds: f64,
    min_seconds: f64,
    max_seconds: f64,
}

#[derive(Serialize)]
struct BenchSummary {
    precompute_seconds: f64,
    slope: f64,
    rows: Vec<BenchOut>,
}

fn run_bench(a: BenchArgs) -> CliResult {
    let ms = if a.m_values.is_empty() {
        (14..=20).map(|k| 1usize << k).collect()
    } else {
        a.m_values
    };
    let report = bench(&ms, a.config.config()?, a.repeats)?;
    let slope = if report.rows.len() > 1 {
        loglog_slope(&report.rows)
    } else {
        f64::NAN
    };
    eprintln!(
        "precompute {:.3}s, log-log slope {slope:.3}",
        report.precompute_seconds
    );
    let rows: Vec<BenchOut> = report
        .rows
        .iter()
        .map(|r| BenchOut {
            m: r.m_half,
            seconds: r.seconds,
            min_seconds: r.min_seconds,
            max_seconds: r.max_seconds,
        })
        .collect();
    match a.format {
        Format::Csv => write_rows(&rows, a.format, a.output.as_deref()),
        Format::Json => write_record(
            &BenchSummary {
                precompute_seconds: report.precompute_seconds,
                slope,
                rows,
            },
            a.format,
            a.output.as_deref(),
        ),
    }
}

#[derive(Args)]
struct CacheArgs {
    /// `save` factors and writes the operator, `load` reads and validates it.
    #[arg(value_parser = ["save", "load"])]
    action: String,
    #[arg(long)]
    path: PathBuf,
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Serialize)]
struct CacheSummary {
    t_delta: f64,
    m_delta: usize,
    gamma: f64,
    tau: f64,
    n_delta: usize,
    l_delta: usize,
    rank: usize,
    sigma_max: f64,
    sigma_min: f64,
}

fn run_cache(a: CacheArgs) -> CliResult {
    let cfg = a.config.config()?;
    let op = if a.action == "save" {
        let op = precompute_operator(cfg)?;
        save_operator(&op, &a.path)?;
        op
    } else {
        load_operator(&a.path, &cfg)?
    };
    let s = op.singular_values();
    write_record(
        &CacheSummary {
            t_delta: cfg.t_delta(),
            m_delta: cfg.m_delta(),
            gamma: cfg.gamma(),
            tau: cfg.tau(),
            n_delta: cfg.n_delta(),
            l_delta: op.geometry().l_delta(),
            rank: op.factorization().rank_above(cfg.tau()),
            sigma_max: s[0],
            sigma_min: s[s.len() - 1],
        },
        a.format,
        None,
    )
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    function: FunctionArgs,
    #[arg(long = "M", default_value_t = 200)]
    m_half: usize,
    #[command(flatten)]
    config: ConfigArgs,
    #[command(flatten)]
    baseline_config: BaselineArgs,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Serialize)]
struct CompareRow {
    method: &'static str,
    max_error: f64,
    seconds: f64,
}

fn run_compare(a: CompareArgs) -> CliResult {
    let f = a.function.require()?;
    let mut rows = Vec::new();
    for (name, baseline) in [("boundary", false), ("fulldata", true)] {
        let start = Instant::now();
        let solver = Solver::new(method_of(baseline, &a.config, &a.baseline_config)?)?;
        let e = solver.error(&f, a.m_half)?;
        rows.push(CompareRow {
            method: name,
            max_error: e,
            seconds: start.elapsed().as_secs_f64(),
        });
    }
    write_rows(&rows, a.format, a.output.as_deref())
}

#[derive(Subcommand)]
enum EstimateCommand {
    /// Mean over ω of the first T on 1.1, 1.2, … with error below the threshold.
    T1 {
        #[arg(long)]
        gamma: f64,
        #[arg(long = "omega-max", default_value_t = 50)]
        omega_max: u32,
        #[arg(long = "mdelta", default_value_t = 100)]
        m_delta: usize,
        #[arg(long = "M", default_value_t = 500)]
        m_half: usize,
        #[arg(long, default_value_t = 1e-13)]
        threshold: f64,
        #[arg(long, default_value_t = 1e-14)]
        tau: f64,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// First m in a range with error below the threshold for exp(iπωt).
    Mhat {
        #[arg(long = "Tdelta")]
        t_delta: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long, default_value_t = 20.0)]
        omega: f64,
        #[arg(long = "M", default_value_t = 500)]
        m_half: usize,
        #[arg(long, default_value_t = 2)]
        from: usize,
        #[arg(long, default_value_t = 200)]
        to: usize,
        #[arg(long, default_value_t = 1e-12)]
        threshold: f64,
        #[arg(long, default_value_t = 1e-14)]
        tau: f64,
    },
}

#[derive(Serialize)]
struct T1Row {
    omega: f64,
    t_first: Option<f64>,
}

fn run_estimate(c: EstimateCommand) -> CliResult {
    match c {
        EstimateCommand::T1 {
            gamma,
            omega_max,
            m_delta,
            m_half,
            threshold,
            tau,
            output,
            format,
        } => {
            let opts = T1Options {
                omegas: (1..=omega_max).map(f64::from).collect(),
                m_delta,
                m_half,
                threshold,
                tau,
                ..T1Options::default()
            };
            let e = estimate_t1(gamma, &opts)?;
            eprintln!("T1 estimate for γ = {gamma}: {:.3}", e.mean);
            let rows: Vec<T1Row> = e
                .per_omega
                .iter()
                .map(|&(omega, t_first)| T1Row { omega, t_first })
                .collect();
            write_rows(&rows, format, output.as_deref())?;
            if e.mean.is_nan() {
                return Err(CliError::Numerical("no ω reached the threshold".into()));
            }
            Ok(())
        }
        EstimateCommand::Mhat {
            t_delta,
            gamma,
            omega,
            m_half,
            from,
            to,
            threshold,
            tau,
        } => match estimate_m_hat(t_delta, gamma, omega, m_half, from..=to, threshold, tau)? {
            Some(m) => {
                println!("{m}");
                Ok(())
            }
            None => Err(CliError::Numerical(format!(
                "no m in {from}..={to} reaches {threshold:e}"
            ))),
        },
    }
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Approximate(a) => approximate(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Resolution(a) => run_resolution(a),
        Command::Bench(a) => run_bench(a),
        Command::Cache(a) => run_cache(a),
        Command::Compare(a) => run_compare(a),
        Command::Estimate(c) => run_estimate(c),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn error_classes() {
        assert!(matches!(
            CliError::from(Error::Numerical("x".into())),
            CliError::Numerical(_)
        ));
        assert!(matches!(
            CliError::from(Error::UnknownFunction("g".into())),
            CliError::Validation(_)
        ));
    }

    #[test]
    fn suffixes() {
        assert_eq!(
            with_suffix(Path::new("out/run"), "dense", Format::Json),
            PathBuf::from("out/run.dense.json")
        );
    }

    #[test]
    fn omega_alone_selects_plane_wave() {
        let f = FunctionArgs {
            function: None,
            omega: Some(3.0),
        };
        assert_eq!(f.require().unwrap(), TestFunction::PlaneWave { omega: 3.0 });
        let none = FunctionArgs {
            function: None,
            omega: None,
        };
        assert!(none.require().is_err());
    }

    #[test]
    fn nodes_match_the_grid() {
        let n = uniform_nodes(4);
        assert_eq!(n.len(), 9);
        assert_eq!((n[0], n[4], n[8]), (-1.0, 0.0, 1.0));
    }
}
