//! Command-line front end: matrix I/O, seeded ensembles, batch verification
//! and reports.
//!
//! Exit codes: 0 when every verdict holds or is marginal, 1 when a check
//! fails where the theory demands that it hold, 2 for usage and I/O errors,
//! 3 for numerical solver failures.

pub mod report;
pub mod runner;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use opgeom::ensemble::{EnsembleKind, EnsembleSpec, Pairing};
use opgeom::{
    crawford_number, davis_wielandt_radius, io, is_bj_orthogonal, is_parallel, is_r_orthogonal, min_modulus,
    numerical_radius, op_norm, shift_truncation_table, Error, ToleranceConfig,
};

use report::{emit_report, ReportFormat};
use runner::{CheckKind, VerifyJob};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "OPGEOM_THREADS";

#[derive(Parser, Debug)]
#[command(name = "opgeom", version, about = "Numerical range geometry of complex matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a norm-like functional of one matrix and print it as JSON.
    Compute {
        #[arg(long, value_enum)]
        functional: Functional,
        /// Matrix file (.json or .csv).
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Decide a relation between two matrices and print the certificate.
    Check {
        #[arg(value_enum)]
        relation: Relation,
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Run a verification check over a seeded ensemble and write a report.
    Verify {
        #[arg(value_enum)]
        check: CheckKind,
        #[arg(long, value_parser = parse_kind)]
        ensemble: EnsembleKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        /// Multiplier applied to every generated matrix.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// How the partner operator (or vector) relates to the instance.
        #[arg(long, value_parser = parse_pairing, default_value = "independent")]
        pairing: Pairing,
        /// Report path; `.json` selects JSON, anything else CSV. Standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for matrix files of instances that fail a demanded check.
        #[arg(long, default_value = "opgeom-replay")]
        replay_dir: PathBuf,
        /// Fill `wall_time_ms`; reports are then no longer reproducible.
        #[arg(long)]
        timing: bool,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Demonstrations.
    Demo {
        #[command(subcommand)]
        demo: Demo,
    },
}

#[derive(Subcommand, Debug)]
enum Demo {
    /// Norm, numerical radius and Davis–Wielandt radius of truncated shifts.
    Shift {
        /// Comma-separated sizes, each at least 2.
        #[arg(long, value_delimiter = ',', default_value = "2,4,8,16,32,64")]
        sizes: Vec<usize>,
        /// CSV output path; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tol: TolArgs,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Functional {
    Opnorm,
    Minmod,
    W,
    C,
    Dw,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Relation {
    BjOrth,
    ROrth,
    Parallel,
}

#[derive(Args, Debug)]
struct TolArgs {
    #[arg(long)]
    unit_tol: Option<f64>,
    #[arg(long)]
    subspace_tol: Option<f64>,
    #[arg(long)]
    sweep_points: Option<usize>,
    #[arg(long)]
    sphere_directions: Option<usize>,
    #[arg(long)]
    refine_tol: Option<f64>,
    #[arg(long)]
    decision_margin: Option<f64>,
    #[arg(long)]
    oracle_samples: Option<usize>,
    #[arg(long)]
    rng_seed: Option<u64>,
}

impl TolArgs {
    fn config(&self) -> opgeom::Result<ToleranceConfig> {
        let d = ToleranceConfig::default();
        let cfg = ToleranceConfig {
            unit_tol: self.unit_tol.unwrap_or(d.unit_tol),
            subspace_tol: self.subspace_tol.unwrap_or(d.subspace_tol),
            sweep_points: self.sweep_points.unwrap_or(d.sweep_points),
            sphere_directions: self.sphere_directions.unwrap_or(d.sphere_directions),
            refine_tol: self.refine_tol.unwrap_or(d.refine_tol),
            decision_margin: self.decision_margin.unwrap_or(d.decision_margin),
            oracle_samples: self.oracle_samples.unwrap_or(d.oracle_samples),
            rng_seed: self.rng_seed.unwrap_or(d.rng_seed),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_kind(s: &str) -> Result<EnsembleKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_pairing(s: &str) -> Result<Pairing, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Solver(_) => EXIT_SOLVER,
        _ => EXIT_USAGE,
    }
}

fn print_json<T: serde::Serialize>(value: &T) -> opgeom::Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "{text}")?;
    Ok(())
}

/// Applies `OPGEOM_THREADS` to the global thread pool. Returns an error
/// message for values that are not positive integers.
fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = match raw.trim().parse() {
        Ok(n) if n >= 1 => n,
        _ => return Err(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")),
    };
    #[cfg(feature = "parallel")]
    {
        // A pool built earlier in the process keeps its size.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return EXIT_USAGE;
    }
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(command: Command) -> opgeom::Result<i32> {
    match command {
        Command::Compute { functional, input, tol } => {
            let cfg = tol.config()?;
            let t = io::read_matrix(&input)?;
            let result = match functional {
                Functional::Opnorm => op_norm(&t)?,
                Functional::Minmod => min_modulus(&t)?,
                Functional::W => numerical_radius(&t, &cfg)?,
                Functional::C => crawford_number(&t, &cfg)?,
                Functional::Dw => davis_wielandt_radius(&t, &cfg)?,
            };
            print_json(&result)?;
            Ok(EXIT_OK)
        }
        Command::Check { relation, left, right, tol } => {
            let cfg = tol.config()?;
            let t = io::read_matrix(&left)?;
            let s = io::read_matrix(&right)?;
            let cert = match relation {
                Relation::BjOrth => is_bj_orthogonal(&t, &s, &cfg)?,
                Relation::ROrth => is_r_orthogonal(&t, &s, &cfg)?,
                Relation::Parallel => is_parallel(&t, &s, &cfg)?,
            };
            print_json(&cert)?;
            Ok(EXIT_OK)
        }
        Command::Verify { check, ensemble, n, count, seed, scale, pairing, out, replay_dir, timing, tol } => {
            let job = VerifyJob {
                check,
                spec: EnsembleSpec { kind: ensemble, n, count, seed, scale },
                pairing,
                cfg: tol.config()?,
                timing,
            };
            let outcome = runner::run_verify(&job)?;
            let format = out.as_deref().map_or(ReportFormat::Csv, ReportFormat::for_path);
            emit_report(&outcome.rows, format, out.as_deref())?;
            if outcome.failed_instances.is_empty() {
                return Ok(EXIT_OK);
            }
            let files = runner::dump_replay(&job, &outcome.failed_instances, &replay_dir)?;
            eprintln!(
                "{} instance(s) failed a demanded check; {} matrix file(s) written to {}",
                outcome.failed_instances.len(),
                files.len(),
                replay_dir.display()
            );
            Ok(EXIT_FAILED)
        }
        Command::Demo { demo: Demo::Shift { sizes, out, tol } } => {
            let cfg = tol.config()?;
            let rows = shift_truncation_table(&sizes, &cfg)?;
            let mut text = String::from("n,norm,w,dw,gap,below_one\n");
            for r in &rows {
                text.push_str(&format!(
                    "{},{:.16e},{:.16e},{:.16e},{:.16e},{}\n",
                    r.n, r.norm, r.w, r.dw, r.gap, r.below_one
                ));
            }
            match out {
                Some(p) => std::fs::write(p, text)?,
                None => std::io::stdout().lock().write_all(text.as_bytes())?,
            }
            let mut order: Vec<_> = rows.iter().collect();
            order.sort_by_key(|r| r.n);
            let increasing = order
                .windows(2)
                .filter(|w| w[0].n < w[1].n)
                .all(|w| w[0].w < w[1].w && w[0].dw < w[1].dw);
            if !increasing {
                eprintln!("shift truncation radii are not strictly increasing in n");
                return Ok(EXIT_FAILED);
            }
            Ok(EXIT_OK)
        }
    }
}
