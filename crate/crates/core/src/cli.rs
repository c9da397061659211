//! `maxq` command line: `analyze`, `simulate`, `compare`, `stability` and
//! `figures`, all writing CSV.
//!
//! Exit codes: 0 success, 2 usage or validation error, 3 numeric failure
//! (including `--strict` stability violations and failed figure checks),
//! 1 I/O failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analytic::{fmt_sig, max_cdf, stability, StabilityReport};
use crate::dist::{BatchDistribution, Discipline, ModelConfig, ServiceDistribution};
use crate::error::Error;
use crate::ordering::{
    check_lt_order, check_transform_at_lambda, default_theta_grid, family_curves, verify_dominance, FamilyCurves,
    FamilyKind, FamilySpec,
};
use crate::simulate::{estimate_cdf_with, SimOptions, DEFAULT_MAX_EVENTS, DEFAULT_MAX_QUEUE};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Tolerance for the family monotonicity check in `figures`.
pub const FIGURE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "maxq", version, about = "Busy-period maximum queue length under preemptive LCFS")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact table of P(M(k) <= b) and P(M <= b).
    Analyze(AnalyzeArgs),
    /// Monte Carlo estimate of P(M <= n).
    Simulate(SimulateArgs),
    /// Premise check and dominance verdict for two service laws.
    Compare(CompareArgs),
    /// Effective service time and offered load.
    Stability(ModelArgs),
    /// Curves for an equal-mean service family.
    Figures(FiguresArgs),
}

fn parse_service(s: &str) -> Result<ServiceDistribution, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_batch(s: &str) -> Result<BatchDistribution, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_discipline(s: &str) -> Result<Discipline, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_family(s: &str) -> Result<FamilyKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_lambda(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => Err(format!("arrival rate must be a positive number, got `{s}`")),
    }
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// resume | resample | noresample
    #[arg(long, default_value = "resume", value_parser = parse_discipline)]
    pub discipline: Discipline,
    /// det:d | exp:rate | unif:a,b | pareto:alpha | hyperexp:p1,r1;... | disc:v1,p1;...
    #[arg(long, value_parser = parse_service)]
    pub dist: ServiceDistribution,
    #[arg(long, value_parser = parse_lambda)]
    pub lambda: f64,
    /// unit | disc:k1,p1;k2,p2;...
    #[arg(long, default_value = "unit", value_parser = parse_batch)]
    pub batch: BatchDistribution,
}

impl ModelArgs {
    fn config(&self) -> Result<ModelConfig, Error> {
        ModelConfig::new(self.lambda, self.dist.clone(), self.batch.clone(), self.discipline)
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// CSV destination; stdout when absent.
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
    /// Treat an unstable configuration as an error.
    #[arg(long)]
    pub strict: bool,
    /// Also emit a gnuplot script (`<output>.gp`, or stderr without --output).
    #[arg(long)]
    pub gnuplot: bool,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
    pub bmax: u32,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, alias = "bmax", default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
    pub nmax: u32,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub replications: u64,
    #[arg(long, env = "MAXQ_SEED", default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_EVENTS)]
    pub max_events: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_QUEUE)]
    pub max_queue: u32,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[arg(long, default_value = "resume", value_parser = parse_discipline)]
    pub discipline: Discipline,
    /// Service law S' (expected to give the smaller maximum).
    #[arg(long = "distA", value_parser = parse_service)]
    pub dist_a: ServiceDistribution,
    /// Service law S.
    #[arg(long = "distB", value_parser = parse_service)]
    pub dist_b: ServiceDistribution,
    /// Arrival rate shared by both queues; repeat only with the same value.
    #[arg(long, required = true, value_parser = parse_lambda, action = clap::ArgAction::Append)]
    pub lambda: Vec<f64>,
    /// Arrival rate of queue B; must equal --lambda.
    #[arg(long = "lambdaB", value_parser = parse_lambda)]
    pub lambda_b: Option<f64>,
    #[arg(long, default_value = "unit", value_parser = parse_batch)]
    pub batch: BatchDistribution,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
    pub bmax: u32,
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FiguresArgs {
    /// uniform | pareto | hyperexp
    #[arg(long, value_parser = parse_family)]
    pub family: FamilyKind,
    /// Comma-separated family parameters; defaults per family.
    #[arg(long, value_delimiter = ',')]
    pub params: Option<Vec<f64>>,
    /// Overrides the family's default arrival rate.
    #[arg(long, value_parser = parse_lambda)]
    pub lambda: Option<f64>,
    /// Overrides the family's default n range.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub nmax: Option<u32>,
    #[arg(long, default_value = "resume", value_parser = parse_discipline)]
    pub discipline: Discipline,
    #[arg(long, default_value = "unit", value_parser = parse_batch)]
    pub batch: BatchDistribution,
    /// Directory for one `n,P` CSV per family member.
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Numeric { .. } => EXIT_NUMERIC,
            _ => EXIT_USAGE,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: EXIT_IO, message: format!("i/o error: {e}") }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli.command, out, err) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

pub fn execute(command: &Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Analyze(a) => run_analyze(a, out, err),
        Command::Simulate(a) => run_simulate(a, out, err),
        Command::Compare(a) => run_compare(a, out, err),
        Command::Stability(a) => {
            let report = stability(&a.config()?)?;
            writeln!(out, "{report}")?;
            Ok(())
        }
        Command::Figures(a) => run_figures(a, out, err),
    }
}

fn check_strict(report: &StabilityReport, strict: bool) -> Result<(), Failure> {
    if strict && !report.stable {
        return Err(Failure {
            code: EXIT_NUMERIC,
            message: format!("unstable configuration rejected by --strict ({report})"),
        });
    }
    Ok(())
}

/// Writes `csv` to `--output` (with `preamble` on stdout) or, without
/// `--output`, the preamble as `#` comments followed by the CSV on stdout.
fn emit(out_args: &OutputArgs, preamble: &[String], csv: &str, out: &mut dyn Write) -> Result<(), Failure> {
    match &out_args.output {
        Some(path) => {
            for line in preamble {
                writeln!(out, "{line}")?;
            }
            fs::write(path, csv)?;
        }
        None => {
            for line in preamble {
                writeln!(out, "# {line}")?;
            }
            out.write_all(csv.as_bytes())?;
        }
    }
    Ok(())
}

fn emit_gnuplot(out_args: &OutputArgs, script: impl Fn(&str) -> String, err: &mut dyn Write) -> Result<(), Failure> {
    if !out_args.gnuplot {
        return Ok(());
    }
    match &out_args.output {
        Some(path) => {
            let data = path.display().to_string();
            let mut gp = path.as_os_str().to_owned();
            gp.push(".gp");
            fs::write(PathBuf::from(gp), script(&data))?;
        }
        None => err.write_all(script("data.csv").as_bytes())?,
    }
    Ok(())
}

fn gnuplot_header(ylabel: &str) -> String {
    format!(
        "set datafile separator ','\nset datafile commentschars '#'\nset key bottom right\n\
         set xlabel 'n'\nset ylabel '{ylabel}'\nset yrange [0:1]\nset key autotitle columnhead\n"
    )
}

pub fn run_analyze(a: &AnalyzeArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let config = a.model.config()?;
    let report = stability(&config)?;
    check_strict(&report, a.out.strict)?;
    let table = max_cdf(&config, a.bmax as usize)?;
    let mut preamble = vec![report.to_string(), format!("config: {config}")];
    if table.is_defective() {
        preamble.push("defective: P(b) may not approach 1".into());
    }
    emit(&a.out, &preamble, &table.to_csv(), out)?;
    emit_gnuplot(
        &a.out,
        |data| format!("{}plot '{data}' using 1:2 with linespoints title 'P(M <= n)'\n", gnuplot_header("P(M <= n)")),
        err,
    )
}

pub fn run_simulate(a: &SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let config = a.model.config()?;
    let report = stability(&config)?;
    check_strict(&report, a.out.strict)?;
    if a.max_events == 0 || a.max_queue == 0 {
        return Err(usage("--max-events and --max-queue must be positive"));
    }
    let opts = SimOptions { max_events: a.max_events, max_queue: a.max_queue, ..SimOptions::default() };
    let estimate = estimate_cdf_with(&config, a.nmax, a.replications, a.seed, &opts)?;
    let preamble = vec![report.to_string()];
    emit(&a.out, &preamble, &estimate.to_csv(), out)?;
    emit_gnuplot(
        &a.out,
        |data| {
            format!(
                "{}plot '{data}' using 1:2:3:4 with yerrorlines title 'estimated P(M <= n)'\n",
                gnuplot_header("P(M <= n)")
            )
        },
        err,
    )
}

pub fn run_compare(a: &CompareArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let lambda = a.lambda[0];
    let all_rates = a.lambda.iter().chain(a.lambda_b.iter());
    if let Some(other) = all_rates.into_iter().find(|&&l| l != lambda) {
        return Err(usage(format!(
            "compare needs the same arrival rate for both queues, got {lambda} and {other}"
        )));
    }
    let config_a = ModelConfig::new(lambda, a.dist_a.clone(), a.batch.clone(), a.discipline)?;
    let config_b = ModelConfig::new(lambda, a.dist_b.clone(), a.batch.clone(), a.discipline)?;
    let report_a = stability(&config_a)?;
    let report_b = stability(&config_b)?;
    check_strict(&report_a, a.out.strict)?;
    check_strict(&report_b, a.out.strict)?;

    let premise = match a.discipline {
        Discipline::Resume | Discipline::RepeatNoResample => {
            check_lt_order(&a.dist_a, &a.dist_b, &default_theta_grid())?
        }
        Discipline::RepeatResample => check_transform_at_lambda(&a.dist_a, &a.dist_b, lambda)?,
    };
    let verdict = verify_dominance(&config_a, &config_b, a.bmax as usize, a.tolerance)?;
    let ta = max_cdf(&config_a, a.bmax as usize)?;
    let tb = max_cdf(&config_b, a.bmax as usize)?;

    let mut csv = String::from("b,P_A,P_B,gap\n");
    for b in 1..=a.bmax as usize {
        let (pa, pb) = (ta.marginal(b), tb.marginal(b));
        let _ = writeln!(csv, "{b},{},{},{}", fmt_sig(pa), fmt_sig(pb), fmt_sig(pa - pb));
    }
    let mut preamble = vec![
        format!("A: {report_a}"),
        format!("B: {report_b}"),
        format!("premise: {premise}"),
    ];
    if a.discipline == Discipline::RepeatNoResample {
        preamble.push("premise note: without resampling a variability order does not imply dominance; see verdict".into());
    }
    preamble.push(format!("verdict: {verdict}"));
    emit(&a.out, &preamble, &csv, out)?;
    emit_gnuplot(
        &a.out,
        |data| {
            format!(
                "{}plot '{data}' using 1:2 with linespoints, '' using 1:3 with linespoints\n",
                gnuplot_header("P(M <= n)")
            )
        },
        err,
    )
}

fn member_file(dir: &Path, family: FamilyKind, label: &str) -> PathBuf {
    dir.join(format!("{}_{}.csv", family.name(), label.replace('=', "")))
}

pub fn figure_curves(a: &FiguresArgs) -> Result<FamilyCurves, Failure> {
    let kind = a.family;
    let params = a.params.clone().unwrap_or_else(|| kind.default_params());
    let spec = FamilySpec::new(kind, params, a.lambda.unwrap_or(kind.figure_lambda()))?;
    let n_max = a.nmax.map_or(kind.figure_n_max(), |n| n as usize);
    Ok(family_curves(&spec, a.discipline, &a.batch, n_max)?)
}

pub fn run_figures(a: &FiguresArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let curves = figure_curves(a)?;
    let mut preamble = vec![format!(
        "family: {} lambda={} discipline={} batch={} n_max={}",
        a.family.name(),
        curves.spec.lambda,
        a.discipline,
        a.batch,
        curves.curves.first().map_or(0, |c| c.len() - 1)
    )];
    for service in crate::ordering::make_family(&curves.spec)? {
        let config = ModelConfig::new(curves.spec.lambda, service, a.batch.clone(), a.discipline)?;
        let report = stability(&config)?;
        check_strict(&report, a.out.strict)?;
        preamble.push(format!("{}: {report}", config.service));
    }
    let check = curves.check_monotone(FIGURE_TOLERANCE);
    if !check.holds() {
        return Err(Failure {
            code: EXIT_NUMERIC,
            message: format!("family curves are not monotone: {check}"),
        });
    }
    preamble.push(format!("monotone: {check}"));
    if let Some(dir) = &a.output_dir {
        fs::create_dir_all(dir)?;
        for (label, curve) in curves.labels.iter().zip(&curves.curves) {
            let mut csv = String::from("n,P\n");
            for (n, p) in curve.iter().enumerate().skip(1) {
                let _ = writeln!(csv, "{n},{}", fmt_sig(*p));
            }
            fs::write(member_file(dir, a.family, label), csv)?;
        }
    }
    emit(&a.out, &preamble, &curves.to_csv(), out)?;
    let members = curves.labels.len();
    emit_gnuplot(
        &a.out,
        |data| {
            let plots: Vec<String> = (0..members)
                .map(|i| format!("'{}' using 1:{} with linespoints", if i == 0 { data } else { "" }, i + 2))
                .collect();
            format!("{}plot {}\n", gnuplot_header("P(M <= n)"), plots.join(", "))
        },
        err,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("maxq").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn missing_lambda_is_a_usage_error() {
        let (code, _, err) = run_capture(&["analyze", "--dist", "det:1"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--lambda"), "{err}");
    }

    #[test]
    fn bad_specifier_names_the_token() {
        let (code, _, err) = run_capture(&["analyze", "--dist", "weibull:2", "--lambda", "0.5"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("weibull"), "{err}");
    }

    #[test]
    fn stability_line_comes_first() {
        let (code, out, _) = run_capture(&["analyze", "--dist", "det:1", "--lambda", "0.5", "--bmax", "2"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.starts_with("# stability: discipline=resume"), "{out}");
        assert!(out.contains("\n2,0.821"), "{out}");
    }

    #[test]
    fn strict_rejects_unstable() {
        let args = ["analyze", "--discipline", "noresample", "--dist", "pareto:2", "--lambda", "0.95"];
        let (code, out, _) = run_capture(&args);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("stable=false"));
        assert!(out.contains("defective"));
        let mut strict = args.to_vec();
        strict.push("--strict");
        assert_eq!(run_capture(&strict).0, EXIT_NUMERIC);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("analyze"));
    }
}
