//! Command-line front end. `run` returns the process exit code so the
//! binary stays a one-liner and tests can drive it in-process.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bipartite::first_moment;
use crate::criteria::{detect, CriterionKind, DetectionReport};
use crate::error::{Error, Result};
use crate::estimator::sample_t1;
use crate::matsub::DEFAULT_RANK_TOL;
use crate::statefile::StateFile;
use crate::states::{
    ghz, max_entangled, max_mixed, product_basis_state, rho_a, rho_epsilon, rho_epsilon_symmetric, tri_basis_state,
    tri_family, DensityMatrix, DimensionSignature,
};
use crate::sweep::{sweep_1d, sweep_tri, write_csv_1d, write_csv_tri, Family, Grid};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_UNSUPPORTED: i32 = 4;
pub const EXIT_INTERNAL: i32 = 5;

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::Io(_) | Error::Argument(_) => EXIT_PARSE,
        Error::Unsupported(_) | Error::Signature(_) => EXIT_UNSUPPORTED,
        Error::Numerical(_) => EXIT_INTERNAL,
        e if e.is_validation() => EXIT_VALIDATION,
        _ => EXIT_INTERNAL,
    }
}

#[derive(Debug, Parser)]
#[command(name = "realign", version, about = "Realignment-based entanglement detection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file (stdout when omitted).
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run entanglement criteria on a state file.
    Detect {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated criterion names; defaults depend on the state's signature.
        #[arg(long, value_delimiter = ',')]
        criteria: Option<Vec<String>>,
        /// Relative threshold for the numerical rank of the realigned matrix.
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        rel_tol: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Sweep a state family and refine the violation boundaries.
    Sweep {
        #[arg(long)]
        family: String,
        #[arg(long)]
        criterion: Option<String>,
        #[arg(long)]
        min: Option<f64>,
        #[arg(long)]
        max: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        p1_min: f64,
        #[arg(long, default_value_t = 1.0)]
        p1_max: f64,
        #[arg(long, default_value_t = 0.01)]
        p1_step: f64,
        #[arg(long, default_value_t = 0.0)]
        p3_min: f64,
        #[arg(long, default_value_t = 1.0 / 3.0)]
        p3_max: f64,
        #[arg(long, default_value_t = 0.01)]
        p3_step: f64,
        #[arg(long, default_value_t = 1e-6)]
        refine_tol: f64,
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        rel_tol: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Simulate measuring the first realigned moment with a finite number of shots.
    Estimate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Write a built-in state to a state file.
    State {
        /// bell, product, max-mixed, ghz, basis3, rho-eps, rho-eps-symmetric, rho-a, tri-family
        name: String,
        /// Local dimension for bell, product and max-mixed.
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Family parameter(s); tri-family takes p1,p3.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        param: Vec<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Parses arguments and runs. Argument errors print clap's diagnostic and
/// return [`EXIT_PARSE`]; `--help` and `--version` return 0.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Detect {
            input,
            criteria,
            rel_tol,
            out,
        } => cmd_detect(input, criteria, rel_tol, out),
        Command::Sweep {
            family,
            criterion,
            min,
            max,
            step,
            p1_min,
            p1_max,
            p1_step,
            p3_min,
            p3_max,
            p3_step,
            refine_tol,
            rel_tol,
            out,
        } => {
            let family: Family = family.parse()?;
            if family == Family::TriFamily {
                let criterion = parse_criterion(criterion.as_deref(), CriterionKind::TriRealign)?;
                let rows = sweep_tri(
                    criterion,
                    Grid::new(p1_min, p1_max, p1_step)?,
                    Grid::new(p3_min, p3_max, p3_step)?,
                )?;
                emit(&out, Format::Csv, |w, fmt| match fmt {
                    Format::Json => write_json(w, &rows),
                    _ => write_csv_tri(&rows, w),
                })
            } else {
                let criterion = parse_criterion(criterion.as_deref(), CriterionKind::T1Moment)?;
                let (lo, hi, step) = match (min, max, step) {
                    (Some(a), Some(b), Some(s)) => (a, b, s),
                    _ => return Err(Error::Argument("1-D sweeps need --min, --max and --step".into())),
                };
                let res = sweep_1d(family, criterion, Grid::new(lo, hi, step)?, refine_tol, rel_tol)?;
                emit(&out, Format::Csv, |w, fmt| match fmt {
                    Format::Json => write_json(w, &res),
                    _ => {
                        for (a, b) in &res.detected_intervals {
                            eprintln!("violated on [{a:.6}, {b:.6}]");
                        }
                        write_csv_1d(&res, w)
                    }
                })
            }
        }
        Command::Estimate { input, shots, seed, out } => {
            let rho = StateFile::read(&input)?.to_state()?;
            let est = sample_t1(&rho, shots, seed)?;
            let exact = first_moment(&rho)?;
            let diff = est.estimate - exact;
            let z = if est.stderr > 0.0 { diff / est.stderr } else { f64::NAN };
            let report = EstimateReport {
                estimate: est.estimate,
                stderr: est.stderr,
                exact_t1: exact,
                difference: diff,
                difference_in_stderr: if z.is_finite() { Some(z) } else { None },
                shots: est.shots,
                seed: est.seed,
            };
            emit(&out, Format::Table, |w, fmt| match fmt {
                Format::Json => write_json(w, &report),
                Format::Csv => {
                    writeln!(w, "estimate,stderr,exact_t1,difference,shots,seed").map_err(io_err)?;
                    writeln!(
                        w,
                        "{:e},{:e},{:e},{:e},{},{}",
                        report.estimate, report.stderr, report.exact_t1, report.difference, report.shots, report.seed
                    )
                    .map_err(io_err)
                }
                Format::Table => {
                    let zs = report.difference_in_stderr.map_or("n/a".to_string(), |z| format!("{z:+.3}"));
                    writeln!(
                        w,
                        "t1 estimate  {:.6} ± {:.6}  ({} shots, seed {})\nt1 exact     {:.6}\ndifference   {:+.6}  ({} stderr)",
                        report.estimate, report.stderr, report.shots, report.seed, report.exact_t1, report.difference, zs
                    )
                    .map_err(io_err)
                }
            })
        }
        Command::State { name, d, param, output } => {
            let rho = builtin_state(&name, d, &param)?;
            let json = StateFile::from_state(&rho, Some(&name)).to_json();
            match output {
                Some(p) => std::fs::write(&p, json).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
                None => writeln!(io::stdout().lock(), "{json}").map_err(io_err),
            }
        }
    }
}

#[derive(Debug, Serialize)]
struct EstimateReport {
    estimate: f64,
    stderr: f64,
    exact_t1: f64,
    difference: f64,
    difference_in_stderr: Option<f64>,
    shots: u64,
    seed: u64,
}

fn cmd_detect(input: PathBuf, criteria: Option<Vec<String>>, rel_tol: f64, out: OutputArgs) -> Result<()> {
    if rel_tol.is_nan() || rel_tol <= 0.0 {
        return Err(Error::Argument(format!("--rel-tol must be positive, got {rel_tol}")));
    }
    let file = StateFile::read(&input)?;
    let rho = file.to_state()?;
    let selection = match &criteria {
        Some(names) => names.iter().map(|n| n.trim().parse()).collect::<Result<Vec<CriterionKind>>>()?,
        None => CriterionKind::defaults_for(rho.dims()),
    };
    let label = file
        .label
        .clone()
        .unwrap_or_else(|| input.file_stem().map_or("state".into(), |s| s.to_string_lossy().into_owned()));
    let report = detect(&rho, &label, &selection, rel_tol);
    emit(&out, Format::Table, |w, fmt| match fmt {
        Format::Json => write_json(w, &report),
        Format::Csv => write_report_csv(w, &report),
        Format::Table => w.write_all(render_table(&report).as_bytes()).map_err(io_err),
    })?;
    // The report is still printed; the first failure decides the exit code.
    match report.errors.first() {
        Some(f) => Err(f.error.clone()),
        None => Ok(()),
    }
}

fn parse_criterion(name: Option<&str>, default: CriterionKind) -> Result<CriterionKind> {
    name.map_or(Ok(default), str::parse)
}

fn builtin_state(name: &str, d: usize, param: &[f64]) -> Result<DensityMatrix> {
    let one = || match param {
        [x] => Ok(*x),
        _ => Err(Error::Argument(format!("{name} takes exactly one --param"))),
    };
    match name {
        "bell" => max_entangled(d),
        "product" => product_basis_state(0, 0, d),
        "max-mixed" => max_mixed(DimensionSignature::bipartite(d, d)?),
        "ghz" => Ok(ghz()),
        "basis3" => tri_basis_state(0),
        "rho-eps" => rho_epsilon(one()?),
        "rho-eps-symmetric" => rho_epsilon_symmetric(one()?),
        "rho-a" => rho_a(one()?),
        "tri-family" => match param {
            [p1, p3] => tri_family(*p1, *p3),
            _ => Err(Error::Argument("tri-family takes --param p1,p3".into())),
        },
        other => Err(Error::Argument(format!("unknown state {other:?}"))),
    }
}

pub fn render_table(report: &DetectionReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "state {} ({})", report.state_label, report.dims);
    let _ = writeln!(s, "{:<20} {:>14} {:>14} {:>14}  violated", "criterion", "value", "threshold", "margin");
    for r in &report.results {
        let _ = writeln!(
            s,
            "{:<20} {:>14.9} {:>14.9} {:>+14.3e}  {}",
            r.label(),
            r.value,
            r.threshold,
            r.margin(),
            if r.violated { "yes" } else { "no" }
        );
    }
    for e in &report.errors {
        let _ = writeln!(s, "{:<20} error: {}", e.name.name(), e.message);
    }
    if let Some(c) = report.classification {
        let _ = writeln!(s, "classification: {c}");
    }
    let _ = writeln!(s, "verdict: {} ({} violations)", report.verdict, report.violations());
    s
}

fn write_report_csv(w: &mut dyn Write, report: &DetectionReport) -> Result<()> {
    let mut c = csv::Writer::from_writer(w);
    let rec = |e: csv::Error| Error::Io(e.to_string());
    c.write_record(["criterion", "cut", "value", "threshold", "margin", "violated"]).map_err(rec)?;
    for r in &report.results {
        c.write_record([
            r.name.name().to_string(),
            r.cut.map_or(String::new(), |q| q.cut_label().to_string()),
            format!("{:e}", r.value),
            format!("{:e}", r.threshold),
            format!("{:e}", r.margin()),
            (r.violated as u8).to_string(),
        ])
        .map_err(rec)?;
    }
    c.flush().map_err(io_err)
}

fn write_json<T: Serialize>(w: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, value).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(w).map_err(io_err)
}

fn io_err(e: io::Error) -> Error {
    Error::Io(e.to_string())
}

fn emit<F>(out: &OutputArgs, default: Format, body: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write, Format) -> Result<()>,
{
    let fmt = out.format.unwrap_or(default);
    match &out.output {
        Some(p) => {
            let mut f = File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            body(&mut f, fmt)?;
            f.flush().map_err(io_err)
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock, fmt)?;
            lock.flush().map_err(io_err)
        }
    }
}
