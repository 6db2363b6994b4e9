//! Command-line front end. `run` parses arguments, optionally merges a
//! `key = value` config file, dispatches, and returns the process exit code:
//! 0 when every check passes, 1 when any check fails, 2 on usage or domain
//! errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use crate::bounds::{bounds_for_model, bounds_general, bounds_partially_symmetric, bounds_symmetric, bounds_symmetric_large_d, BoundSet, Component};
use crate::error::{Error, Result};
use crate::experiments::{
    render_report, reproduce_lemma21, tail_empirical_vs_bound, trend_large_d, verify_bounds, ExperimentConfig,
    ReportFormat, TailModel, VerificationReport,
};
use crate::model::{ModelSpec, Sample};
use crate::random::SeedSpec;
use crate::spectral::{uniform_norm, MaximizerConfig};
use crate::tensor::{Field, Tensor};
use crate::textio::{parse_records, write_sample};

#[derive(Debug, Parser)]
#[command(name = "rankone", version, about = "Best rank-one approximation ratios: bounds, sampling and Monte Carlo verification")]
#[command(args_override_self = true)]
struct Cli {
    /// Flat `key = value` file whose keys are long flag names; flags given on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker threads for sample-level parallelism (results do not depend on it).
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the bound table of a tensor space.
    Bounds(BoundsArgs),
    /// Draw samples from a random model and print them as text records.
    Sample(SampleArgs),
    /// Estimate the spectral norm and ratio of given or random elements.
    Ratio(RatioArgs),
    /// Check sampled ratios against the bounds of the model's space.
    Verify(VerifyArgs),
    /// Run a named experiment: tail, lemma21 or trend.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => ReportFormat::Json,
            Format::Csv => ReportFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, Args)]
struct ModelArgs {
    /// gaussian-tensor, kostlan, harmonic, kostlan-multi, multi-harmonic, rank-one or identity.
    #[arg(long)]
    model: Option<String>,
    /// Tensor shape, comma separated.
    #[arg(long, value_delimiter = ',')]
    shape: Option<Vec<usize>>,
    /// Degree.
    #[arg(long)]
    d: Option<u32>,
    /// Number of variables (projection model: ambient dimension N).
    #[arg(long)]
    n: Option<u32>,
    /// Block degrees, comma separated.
    #[arg(long, value_delimiter = ',')]
    ds: Option<Vec<u32>>,
    /// Block variable counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    ns: Option<Vec<u32>>,
    /// real or complex.
    #[arg(long, default_value = "real")]
    field: Field,
}

impl ModelArgs {
    fn spec(&self) -> Result<ModelSpec> {
        let name = self.model.as_deref().ok_or_else(|| Error::Usage("--model is required".into()))?;
        ModelSpec::from_parts(name, self.shape.clone(), self.d, self.n, self.ds.clone(), self.ns.clone(), self.field)
    }
}

#[derive(Debug, Clone, Args)]
struct MaximizerArgs {
    /// Random starts of the multi-start maximizer.
    #[arg(long, default_value_t = MaximizerConfig::default().starts)]
    starts: usize,
    /// Iteration cap per start.
    #[arg(long, default_value_t = MaximizerConfig::default().max_iters)]
    max_iters: usize,
    /// Relative improvement below which a start stops.
    #[arg(long, default_value_t = MaximizerConfig::default().tol)]
    tol: f64,
}

impl MaximizerArgs {
    fn config(&self, seed: u64) -> MaximizerConfig {
        MaximizerConfig { starts: self.starts, max_iters: self.max_iters, tol: self.tol, seed }
    }
}

#[derive(Debug, Clone, Args)]
struct BoundsArgs {
    /// Symmetric space Sym^d(K^n), from --d and --n.
    #[arg(long)]
    sym: bool,
    /// Use the large-degree sandwich (symmetric only).
    #[arg(long, requires = "sym")]
    large_d: bool,
    /// General tensor space of this shape.
    #[arg(long, value_delimiter = ',')]
    shape: Option<Vec<usize>>,
    #[arg(long)]
    d: Option<u32>,
    #[arg(long)]
    n: Option<u32>,
    /// Partially symmetric space, with --ns.
    #[arg(long, value_delimiter = ',')]
    ds: Option<Vec<u32>>,
    #[arg(long, value_delimiter = ',')]
    ns: Option<Vec<u32>>,
    /// Space of a named model instead of explicit dimensions.
    #[arg(long)]
    model: Option<String>,
    #[arg(long, default_value = "real")]
    field: Field,
    /// Also list every individual bound.
    #[arg(long)]
    components: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Clone, Args)]
struct SampleArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Write records here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
struct RatioArgs {
    /// File of text records (`-` for stdin).
    input: Option<PathBuf>,
    /// The n × n identity matrix.
    #[arg(long, conflicts_with_all = ["input", "random"])]
    identity: bool,
    /// Draw --count elements of --model.
    #[arg(long, conflicts_with = "input", requires = "seed")]
    random: bool,
    #[command(flatten)]
    model: ModelArgs,
    /// Seeds the maximizer and, with --random, the sampler.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[command(flatten)]
    maximizer: MaximizerArgs,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Clone, Args)]
struct VerifyArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    maximizer: MaximizerArgs,
    /// Write the report here; a one-line summary goes to stderr.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExperimentKind {
    Tail,
    Lemma21,
    Trend,
}

#[derive(Debug, Clone, Args)]
struct ExperimentArgs {
    kind: ExperimentKind,
    /// Tail: a model name, or `projection` with --n (ambient N) and --k.
    #[command(flatten)]
    model: ModelArgs,
    /// Rank of the projection.
    #[arg(long)]
    k: Option<usize>,
    /// Tail thresholds, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
    t_grid: Vec<f64>,
    /// Trend degrees, comma separated and increasing.
    #[arg(long, value_delimiter = ',')]
    d_grid: Option<Vec<u32>>,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    maximizer: MaximizerArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

/// Reads a flat `key = value` file; `#` starts a comment.
fn read_config(path: &PathBuf) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Usage(format!("{}:{}: expected `key = value`", path.display(), i + 1)))?;
        out.insert(k.trim().to_string(), v.trim().trim_matches('"').to_string());
    }
    Ok(out)
}

/// Splices config entries into `argv` right after the subcommand name, so
/// later command-line occurrences override them.
fn merge_config(argv: Vec<OsString>, config: &BTreeMap<String, String>) -> Result<Vec<OsString>> {
    let cmd = Cli::command();
    let names: Vec<String> = cmd.get_subcommands().map(|s| s.get_name().to_string()).collect();
    let Some(pos) = argv.iter().skip(1).position(|a| names.iter().any(|n| a == n.as_str())).map(|p| p + 1) else {
        return Ok(argv);
    };
    let sub_name = argv[pos].to_string_lossy().into_owned();
    let sub = cmd.find_subcommand(&sub_name).expect("matched above");
    let mut injected = Vec::new();
    for (key, value) in config {
        if key == "config" || key == "workers" {
            continue;
        }
        let Some(arg) = sub.get_arguments().find(|a| a.get_long() == Some(key.as_str())) else {
            return Err(Error::Usage(format!("config key `{key}` is not a flag of `{sub_name}`")));
        };
        let takes_value = arg.get_num_args().is_none_or(|r| r.takes_values());
        if takes_value {
            injected.push(OsString::from(format!("--{key}")));
            injected.push(OsString::from(value));
        } else {
            match value.as_str() {
                "true" => injected.push(OsString::from(format!("--{key}"))),
                "false" => {}
                _ => return Err(Error::Usage(format!("config key `{key}` expects true or false"))),
            }
        }
    }
    let mut out = argv[..=pos].to_vec();
    out.extend(injected);
    out.extend_from_slice(&argv[pos + 1..]);
    Ok(out)
}

/// Exit code for a finished command.
enum Outcome {
    Pass,
    Fail,
}

fn f(x: f64) -> String {
    format!("{x:.12e}")
}

fn bounds_problem(a: &BoundsArgs) -> Result<BoundSet> {
    if let Some(name) = &a.model {
        let spec = ModelSpec::from_parts(name, a.shape.clone(), a.d, a.n, a.ds.clone(), a.ns.clone(), a.field)?;
        return bounds_for_model(&spec);
    }
    let chosen = [a.sym, a.shape.is_some(), a.ds.is_some() || a.ns.is_some()].iter().filter(|&&b| b).count();
    if chosen != 1 {
        return Err(Error::Usage("give exactly one of --sym, --shape, --ds/--ns or --model".into()));
    }
    if a.sym {
        let d = a.d.ok_or_else(|| Error::Usage("--sym needs --d".into()))?;
        let n = a.n.ok_or_else(|| Error::Usage("--sym needs --n".into()))?;
        if a.large_d {
            bounds_symmetric_large_d(d, n, a.field)
        } else {
            bounds_symmetric(d, n, a.field)
        }
    } else if let Some(shape) = &a.shape {
        bounds_general(shape, a.field)
    } else {
        let ds = a.ds.as_ref().ok_or_else(|| Error::Usage("--ns needs --ds".into()))?;
        let ns = a.ns.as_ref().ok_or_else(|| Error::Usage("--ds needs --ns".into()))?;
        bounds_partially_symmetric(ds, ns, a.field)
    }
}

#[derive(serde::Serialize)]
struct BoundsRow<'a> {
    problem: String,
    field: Field,
    lower: f64,
    upper: f64,
    lower_log10: f64,
    upper_log10: f64,
    provenance: &'a [String],
    vacuous: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    components: Option<&'a [Component]>,
}

fn cmd_bounds(a: &BoundsArgs, out: &mut String) -> Result<Outcome> {
    let b = bounds_problem(a)?;
    match a.format {
        Format::Csv => {
            out.push_str("problem,field,lower,upper,lower_log10,upper_log10,provenance,vacuous\n");
            writeln!(
                out,
                "\"{}\",{},{},{},{},{},{},{}",
                b.problem,
                b.field,
                f(b.lower),
                f(b.upper),
                f(b.lower_log10),
                f(b.upper_log10),
                b.provenance.join(";"),
                b.vacuous
            )
            .unwrap();
            if a.components {
                out.push_str("\ntag,kind,value,log10,vacuous\n");
                for c in &b.components {
                    writeln!(out, "{},{:?},{},{},{}", c.tag, c.kind, f(c.value), f(c.log10), c.vacuous).unwrap();
                }
            }
        }
        Format::Json => {
            let row = BoundsRow {
                problem: b.problem.to_string(),
                field: b.field,
                lower: b.lower,
                upper: b.upper,
                lower_log10: b.lower_log10,
                upper_log10: b.upper_log10,
                provenance: &b.provenance,
                vacuous: b.vacuous,
                components: a.components.then_some(b.components.as_slice()),
            };
            out.push_str(&crate::experiments::to_json(&row)?);
        }
    }
    Ok(Outcome::Pass)
}

fn cmd_sample(a: &SampleArgs, out: &mut String) -> Result<Outcome> {
    let spec = a.model.spec()?;
    let seeds = SeedSpec::new(a.seed);
    let mut text = String::new();
    for i in 0..a.count as u64 {
        text.push_str(&write_sample(&spec.sample(&mut seeds.rng(i, "sample"))?));
    }
    match &a.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::io(path, e))?,
        None => out.push_str(&text),
    }
    Ok(Outcome::Pass)
}

#[derive(serde::Serialize)]
struct RatioRow {
    index: u64,
    value: f64,
    norm: f64,
    ratio: f64,
    approx_error: f64,
    converged: bool,
}

fn cmd_ratio(a: &RatioArgs, out: &mut String) -> Result<Outcome> {
    let seed = a.seed.unwrap_or(0);
    let samples: Vec<Sample> = if a.identity {
        let n = a.model.n.ok_or_else(|| Error::Usage("--identity needs --n".into()))?;
        vec![Sample::Tensor(Tensor::identity(n as usize)?)]
    } else if a.random {
        let spec = a.model.spec()?;
        let seeds = SeedSpec::new(seed);
        (0..a.count as u64)
            .map(|i| spec.sample(&mut seeds.rng(i, "sample")))
            .collect::<Result<_>>()?
    } else if let Some(path) = &a.input {
        let text = if path.as_os_str() == "-" {
            std::io::read_to_string(std::io::stdin()).map_err(|e| Error::io(path, e))?
        } else {
            std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?
        };
        parse_records(&text)?
    } else {
        return Err(Error::Usage("give an input file, --identity or --random".into()));
    };
    let seeds = SeedSpec::new(seed);
    let rows = samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let target = s.target();
            let norm = target.norm();
            if norm == 0.0 {
                return Err(Error::ZeroInput(format!("record {i} is zero")));
            }
            let res = uniform_norm(target, &a.maximizer.config(seeds.derive(i as u64, "maximizer")))?;
            let ratio = (res.value / norm).min(1.0);
            Ok(RatioRow {
                index: i as u64,
                value: res.value,
                norm,
                ratio,
                approx_error: (1.0 - ratio * ratio).max(0.0).sqrt(),
                converged: res.converged,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    match a.format {
        Format::Csv => {
            out.push_str("index,value,norm,ratio,approx_error,converged\n");
            for r in &rows {
                writeln!(out, "{},{},{},{},{},{}", r.index, f(r.value), f(r.norm), f(r.ratio), f(r.approx_error), r.converged)
                    .unwrap();
            }
        }
        Format::Json => out.push_str(&crate::experiments::to_json(&rows)?),
    }
    Ok(Outcome::Pass)
}

fn emit_report(report: &VerificationReport, format: Format, path: Option<&PathBuf>, out: &mut String, err: &mut String) -> Result<Outcome> {
    let text = render_report(report, format.into())?;
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::io(p, e))?,
        None => out.push_str(&text),
    }
    let failed = report.failures();
    for c in &failed {
        writeln!(err, "FAIL {}: {} {} {} (slack {}) [{}]", c.name, c.lhs, c.relation, c.rhs, c.slack, c.tag).unwrap();
    }
    writeln!(
        err,
        "{}: {} checks, {} failed",
        report.config.experiment,
        report.checks.len(),
        failed.len()
    )
    .unwrap();
    Ok(if failed.is_empty() { Outcome::Pass } else { Outcome::Fail })
}

fn experiment_config(samples: usize, seed: u64, m: &MaximizerArgs) -> ExperimentConfig {
    ExperimentConfig { samples, seed, maximizer: m.config(seed) }
}

fn cmd_verify(a: &VerifyArgs, out: &mut String, err: &mut String) -> Result<Outcome> {
    let spec = a.model.spec()?;
    let report = verify_bounds(&spec, &experiment_config(a.samples, a.seed, &a.maximizer))?;
    emit_report(&report, a.format, a.out.as_ref(), out, err)
}

fn cmd_experiment(a: &ExperimentArgs, out: &mut String, err: &mut String) -> Result<Outcome> {
    let cfg = experiment_config(a.samples, a.seed, &a.maximizer);
    let report = match a.kind {
        ExperimentKind::Tail => {
            let model = if a.model.model.as_deref() == Some("projection") {
                TailModel::Projection {
                    big_n: a.model.n.ok_or_else(|| Error::Usage("projection needs --n".into()))? as usize,
                    k: a.k.ok_or_else(|| Error::Usage("projection needs --k".into()))?,
                    field: a.model.field,
                }
            } else {
                TailModel::Model(a.model.spec()?)
            };
            tail_empirical_vs_bound(&model, &a.t_grid, &cfg)?
        }
        ExperimentKind::Lemma21 => {
            let d = a.model.d.ok_or_else(|| Error::Usage("lemma21 needs --d".into()))?;
            let n = a.model.n.ok_or_else(|| Error::Usage("lemma21 needs --n".into()))?;
            reproduce_lemma21(d, n, a.seed)?
        }
        ExperimentKind::Trend => {
            let n = a.model.n.ok_or_else(|| Error::Usage("trend needs --n".into()))?;
            let grid = a.d_grid.as_ref().ok_or_else(|| Error::Usage("trend needs --d-grid".into()))?;
            trend_large_d(n, grid, &cfg)?
        }
    };
    emit_report(&report, a.format, a.out.as_ref(), out, err)
}

fn dispatch(cli: &Cli, out: &mut String, err: &mut String) -> Result<Outcome> {
    match &cli.command {
        Command::Bounds(a) => cmd_bounds(a, out),
        Command::Sample(a) => cmd_sample(a, out),
        Command::Ratio(a) => cmd_ratio(a, out),
        Command::Verify(a) => cmd_verify(a, out, err),
        Command::Experiment(a) => cmd_experiment(a, out, err),
    }
}

fn parse(argv: Vec<OsString>) -> std::result::Result<Cli, clap::Error> {
    Cli::try_parse_from(argv)
}

/// Finds `--config FILE` or `--config=FILE` before full parsing.
fn config_path(argv: &[OsString]) -> Option<PathBuf> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

/// Runs the command line with explicit output sinks.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    if let Some(path) = config_path(&argv) {
        match read_config(&path).and_then(|c| merge_config(argv.clone(), &c)) {
            Ok(merged) => argv = merged,
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                return 2;
            }
        }
    }
    let cli = match parse(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    2
                }
            };
        }
    };
    let mut out = String::new();
    let mut err = String::new();
    let result = match cli.workers {
        Some(0) => Err(Error::Usage("--workers must be positive".into())),
        Some(w) => match rayon::ThreadPoolBuilder::new().num_threads(w).build() {
            Ok(pool) => pool.install(|| dispatch(&cli, &mut out, &mut err)),
            Err(e) => Err(Error::Usage(format!("cannot start {w} workers: {e}"))),
        },
        None => dispatch(&cli, &mut out, &mut err),
    };
    let _ = stdout.write_all(out.as_bytes());
    let _ = stderr.write_all(err.as_bytes());
    match result {
        Ok(Outcome::Pass) => 0,
        Ok(Outcome::Fail) => 1,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}

/// Runs the command line against the process's stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
