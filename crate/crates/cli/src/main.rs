//! `selfinv`: sample, test and evaluate self-inverse laws from the command line.
//!
//! Exit status: 0 when a check passes, 1 when it rejects, 2 on usage, parse
//! or input errors.

use std::fs::{self, File};
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use selfinv::experiments::{self, ExperimentConfig, ExperimentReport, EXPERIMENTS, VERSION};
use selfinv::grammar::caret_diagnostic;
use selfinv::inference::{
    analytic_log_cf, empirical_cf, exact_symmetry_check, exchangeability_test,
    iid_decomposability_obstruction, ks_one_sample, log_abs, log_symmetry_test,
    self_inverse_test, Subject, TestReport,
};
use selfinv::io::{self as sio, format_float, CsvData};
use selfinv::ratio::{ratio_density, ratio_sample, ratios_of, Orientation};
use selfinv::{parse_dist, parse_joint, parse_spec, DistSpec, Error, JointSpec, Spec, StreamKey};

#[derive(Parser)]
#[command(name = "selfinv", version, about = "Self-inverse random variables: sampling, tests and experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a sample and write it as CSV.
    Sample(SampleArgs),
    /// Run a test and print its JSON report.
    Check(CheckArgs),
    /// Evaluate a density on a grid and write CSV.
    Density(DensityArgs),
    /// Run a named experiment, or `all`.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct Source {
    /// Scalar law, e.g. `cauchy` or `f-ratio(4)`.
    #[arg(long, conflicts_with = "joint")]
    dist: Option<String>,
    /// Joint law of (X, Y), e.g. `region-uniform:paper`.
    #[arg(long)]
    joint: Option<String>,
}

#[derive(Args)]
struct Draws {
    #[arg(long, default_value_t = 20_000)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// First stream id; commands that need several streams use consecutive ids.
    #[arg(long, default_value_t = 0)]
    streams: u64,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    draws: Draws,
    /// Output CSV; a provenance record goes to `<out>.json`. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TestName {
    SelfInverse,
    LogSymmetry,
    Exchangeable,
    IidObstruction,
    Ks,
}

#[derive(Args)]
struct CheckArgs {
    test: TestName,
    #[command(flatten)]
    source: Source,
    /// One- or two-column CSV instead of a spec.
    #[arg(long, conflicts_with_all = ["dist", "joint"])]
    input: Option<PathBuf>,
    #[command(flatten)]
    draws: Draws,
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    /// Pivot of the log-symmetry `Z / θ =d θ / Z`.
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    /// Bins (`quantiles:K`, `lo:hi:steps`, or comma-separated edges) or, for
    /// `iid-obstruction`, the t grid `lo:hi:steps`.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Exact path: table symmetry, or closed-form characteristic function.
    #[arg(long)]
    exact: bool,
    /// Reference law for `ks`.
    #[arg(long)]
    against: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DensityKind {
    /// Density of X / Y for a joint.
    Ratio,
    /// Density and CDF of a scalar law.
    Pdf,
}

#[derive(Args)]
struct DensityArgs {
    kind: DensityKind,
    #[command(flatten)]
    source: Source,
    /// `lo:hi:steps`.
    #[arg(long, default_value = "-5:5:100", allow_hyphen_values = true)]
    grid: String,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment name or `all`.
    name: String,
    /// Sample size; each experiment has its own default.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    streams: u64,
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    /// Directory for the JSON summary and CSV tables.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure with the text it refers to, for caret diagnostics.
struct Failure {
    error: Error,
    text: Option<String>,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure { error, text: None }
    }
}

type CliResult<T> = Result<T, Failure>;

fn parsed<T>(text: &str, f: impl Fn(&str) -> selfinv::Result<T>) -> CliResult<T> {
    f(text).map_err(|error| Failure { error, text: Some(text.to_string()) })
}

fn io_err(path: &Path, e: io::Error) -> Failure {
    Error::Input(format!("{}: {e}", path.display())).into()
}

enum Law {
    Dist(DistSpec, String),
    Joint(JointSpec, String),
}

impl Source {
    fn law(&self) -> CliResult<Law> {
        match (&self.dist, &self.joint) {
            (Some(t), None) => match parsed(t, parse_spec)? {
                Spec::Dist(d) => Ok(Law::Dist(d, t.clone())),
                Spec::Joint(j) => Ok(Law::Joint(j, t.clone())),
            },
            (None, Some(t)) => Ok(Law::Joint(parsed(t, parse_joint)?, t.clone())),
            _ => Err(Error::InvalidArgument("give exactly one of --dist or --joint".into()).into()),
        }
    }
}

fn write_out(out: &Option<PathBuf>, write: impl FnOnce(&mut dyn Write) -> selfinv::Result<()>) -> CliResult<()> {
    match out {
        Some(path) => {
            let mut f = File::create(path).map_err(|e| io_err(path, e))?;
            write(&mut f)?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)?;
        }
    }
    Ok(())
}

fn cmd_sample(args: &SampleArgs) -> CliResult<ExitCode> {
    let key = StreamKey::new(args.draws.seed, args.draws.streams);
    let mut stream = selfinv::new_stream(key);
    let n = args.draws.n;
    let law = args.source.law()?;
    let (spec, provenance) = match &law {
        Law::Dist(d, text) => {
            let s = d.sample(&mut stream, n)?;
            write_out(&args.out, |w| sio::write_values(w, &s.values))?;
            (text, s.provenance)
        }
        Law::Joint(j, text) => {
            let p = j.sample_joint(&mut stream, n)?;
            write_out(&args.out, |w| sio::write_pairs(w, &p))?;
            (text, p.provenance)
        }
    };
    if let Some(path) = &args.out {
        let record = json!({
            "spec": spec,
            "canonical_spec": provenance.as_ref().map(|p| p.spec.clone()),
            "seed": key.seed,
            "stream_base": key.stream_id,
            "streams": 1,
            "n": n,
            "version": VERSION,
        });
        let mut sidecar = path.clone().into_os_string();
        sidecar.push(".json");
        let sidecar = PathBuf::from(sidecar);
        fs::write(&sidecar, serde_json::to_string_pretty(&record).expect("serializable") + "\n")
            .map_err(|e| io_err(&sidecar, e))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn read_input(path: &Path) -> CliResult<CsvData> {
    let f = File::open(path).map_err(|e| io_err(path, e))?;
    Ok(sio::read_csv(BufReader::new(f))?)
}

/// Values under test: a scalar sample, or X / Y of pairs.
fn values_for(args: &CheckArgs, stream_offset: u64) -> CliResult<(Vec<f64>, String)> {
    if let Some(path) = &args.input {
        return match read_input(path)? {
            CsvData::Values(s) => Ok((s.values, path.display().to_string())),
            CsvData::Pairs(p) => Ok((ratios_of(&p, Orientation::Direct)?.values, format!("ratio({})", path.display()))),
        };
    }
    let mut s = selfinv::new_stream(StreamKey::new(args.draws.seed, args.draws.streams + stream_offset));
    match args.source.law()? {
        Law::Dist(d, t) => Ok((d.sample(&mut s, args.draws.n)?.values, t)),
        Law::Joint(j, t) => Ok((ratio_sample(&j, &mut s, args.draws.n)?.values, format!("ratio({t})"))),
    }
}

fn check_report(args: &CheckArgs) -> CliResult<TestReport> {
    let key = StreamKey::new(args.draws.seed, args.draws.streams);
    let mut stream = selfinv::new_stream(key);
    let n = args.draws.n;
    let from_file = args.input.is_some();
    let (report, spec) = match args.test {
        TestName::SelfInverse => {
            if from_file {
                let (v, spec) = values_for(args, 0)?;
                (self_inverse_test(Subject::Sample(&v), args.alpha, args.theta)?, spec)
            } else {
                match args.source.law()? {
                    Law::Dist(d, t) => (
                        self_inverse_test(Subject::Dist { spec: &d, n, stream: &mut stream }, args.alpha, args.theta)?,
                        t,
                    ),
                    Law::Joint(j, t) => (
                        self_inverse_test(Subject::Ratio { joint: &j, n, stream: &mut stream }, args.alpha, args.theta)?,
                        format!("ratio({t})"),
                    ),
                }
            }
        }
        TestName::LogSymmetry => {
            let (v, spec) = values_for(args, 0)?;
            (log_symmetry_test(&v, args.alpha)?, spec)
        }
        TestName::Exchangeable => {
            let grid_text = args.grid.clone().unwrap_or_else(|| "quantiles:6".into());
            let grid = parsed(&grid_text, sio::parse_bin_grid)?;
            if let Some(path) = &args.input {
                match read_input(path)? {
                    CsvData::Pairs(p) => (exchangeability_test(&p, &grid, args.alpha)?, path.display().to_string()),
                    CsvData::Values(_) => {
                        return Err(Error::Input("exchangeability needs a two-column x,y file".into()).into())
                    }
                }
            } else {
                match args.source.law()? {
                    Law::Joint(JointSpec::DiscreteTable(t), text) if args.exact => {
                        (exact_symmetry_check(&t, args.alpha)?, text)
                    }
                    Law::Joint(_, _) if args.exact => {
                        return Err(Error::InvalidArgument("--exact needs a discrete-table joint".into()).into())
                    }
                    Law::Joint(j, text) => {
                        let pairs = j.sample_joint(&mut stream, n)?;
                        (exchangeability_test(&pairs, &grid, args.alpha)?, text)
                    }
                    Law::Dist(_, _) => {
                        return Err(Error::InvalidArgument("exchangeability needs --joint".into()).into())
                    }
                }
            }
        }
        TestName::IidObstruction => {
            let grid_text = args.grid.clone().unwrap_or_else(|| "0:10:1000".into());
            let t_grid = parsed(&grid_text, sio::parse_grid)?;
            if args.exact {
                match args.source.law()? {
                    Law::Dist(d, t) => (iid_decomposability_obstruction(&analytic_log_cf(&d, &t_grid)?, args.alpha)?, t),
                    Law::Joint(_, _) => {
                        return Err(Error::InvalidArgument("--exact needs --dist log-uniform or log-rademacher".into()).into())
                    }
                }
            } else {
                let (v, spec) = values_for(args, 0)?;
                let curve = empirical_cf(&log_abs(&v)?, &t_grid)?;
                (iid_decomposability_obstruction(&curve, args.alpha)?, format!("log-abs({spec})"))
            }
        }
        TestName::Ks => {
            let against = args
                .against
                .as_deref()
                .ok_or_else(|| Failure::from(Error::InvalidArgument("ks needs --against <dist>".into())))?;
            let reference = parsed(against, parse_dist)?;
            let (v, spec) = values_for(args, 0)?;
            (ks_one_sample(&v, |x| reference.cdf(x), args.alpha)?.with("against", reference.to_string()), spec)
        }
    };
    let seed = if from_file { report.seed } else { Some(key.seed) };
    Ok(report
        .with_seed(seed)
        .with("spec", spec)
        .with("stream_base", key.stream_id)
        .with("version", VERSION))
}

fn cmd_check(args: &CheckArgs) -> CliResult<ExitCode> {
    let report = check_report(args)?;
    emit(&report.to_json());
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_density(args: &DensityArgs) -> CliResult<ExitCode> {
    let grid = parsed(&args.grid, sio::parse_grid)?;
    let law = args.source.law()?;
    let (header, rows): (Vec<&str>, Vec<Vec<String>>) = match (args.kind, law) {
        (DensityKind::Ratio, Law::Joint(j, _)) => {
            let mut rows = Vec::with_capacity(grid.len());
            for &z in &grid {
                let r = ratio_density(&j, z, args.tol)?;
                rows.push(vec![format_float(z), format_float(r.value), format_float(r.error_bound)]);
            }
            (vec!["z", "density", "error_bound"], rows)
        }
        (DensityKind::Pdf, Law::Dist(d, _)) => {
            let mut rows = Vec::with_capacity(grid.len());
            for &z in &grid {
                rows.push(vec![format_float(z), format_float(d.density(z)?), format_float(d.cdf(z))]);
            }
            (vec!["z", "density", "cdf"], rows)
        }
        (DensityKind::Ratio, Law::Dist(..)) => {
            return Err(Error::InvalidArgument("density ratio needs --joint".into()).into())
        }
        (DensityKind::Pdf, Law::Joint(..)) => {
            return Err(Error::InvalidArgument("density pdf needs --dist".into()).into())
        }
    };
    write_out(&args.out, |w| sio::write_table(w, &header, &rows))?;
    Ok(ExitCode::SUCCESS)
}

fn summary_line(r: &ExperimentReport) -> serde_json::Value {
    json!({
        "name": r.name,
        "passed": r.passed,
        "failing_claims": r.claims.iter().filter(|c| !c.pass).map(|c| c.label.clone()).collect::<Vec<_>>(),
    })
}

fn cmd_experiment(args: &ExperimentArgs) -> CliResult<ExitCode> {
    let template = ExperimentConfig {
        name: args.name.clone(),
        seed: args.seed,
        n: args.n,
        alpha: args.alpha,
        stream_base: args.streams,
        out: args.out.clone(),
    };
    let results = if args.name == "all" {
        // validate the shared settings once, with any real name
        ExperimentConfig { name: EXPERIMENTS[0].into(), ..template.clone() }.validate()?;
        experiments::run_all(&template)
    } else {
        template.validate()?;
        vec![(args.name.clone(), experiments::run_experiment(&template))]
    };
    let mut entries = Vec::new();
    let mut failing = Vec::new();
    for (name, result) in results {
        match result {
            Ok(report) => {
                if let Some(dir) = &args.out {
                    experiments::write_report(&report, dir)?;
                }
                if !report.passed {
                    failing.push(name.clone());
                }
                entries.push(if args.name == "all" {
                    summary_line(&report)
                } else {
                    serde_json::to_value(&report).expect("serializable")
                });
            }
            Err(e) => {
                failing.push(name.clone());
                entries.push(json!({ "name": name, "passed": false, "error": e.to_string() }));
            }
        }
    }
    let summary = json!({
        "version": VERSION,
        "seed": args.seed,
        "stream_base": args.streams,
        "alpha": args.alpha,
        "passed": failing.is_empty(),
        "failing": failing,
        "experiments": entries,
    });
    let text = serde_json::to_string_pretty(&summary).expect("serializable");
    if let Some(dir) = &args.out {
        if args.name == "all" {
            let path = dir.join("summary.json");
            fs::write(&path, text.clone() + "\n").map_err(|e| io_err(&path, e))?;
        }
    }
    emit(&text);
    Ok(if failing.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

/// Prints a line to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) {
    let _ = writeln!(io::stdout().lock(), "{text}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sample(a) => cmd_sample(a),
        Command::Check(a) => cmd_check(a),
        Command::Density(a) => cmd_density(a),
        Command::Experiment(a) => cmd_experiment(a),
    };
    match result {
        Ok(code) => code,
        Err(Failure { error, text }) => {
            match text {
                Some(t) => eprintln!("error: {}", caret_diagnostic(&t, &error)),
                None => eprintln!("error: {error}"),
            }
            ExitCode::from(2)
        }
    }
}
