use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use segangle::report::{sidecar_path, write_file};
use segangle::runs::{self, ChordDensity};
use segangle::suite::{self, Level, Options};
use segangle::{csv, CliError, Parallel, RunReport};
use segangle_core::quadrature::QuadratureConfig;
use segangle_core::validation::describe;

#[derive(Parser)]
#[command(name = "segangle", version, about = "Angle between two crossing random segments in the unit disk")]
struct Cli {
    /// Worker threads; 0 picks one per core. Never changes results.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    #[value(name = "fL")]
    FL,
    #[value(name = "fD")]
    FD,
    #[value(name = "fDalt")]
    FDAlt,
    #[value(name = "h")]
    H,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the normalized angle density on a uniform grid of [0, pi].
    DensityTable {
        #[arg(long, default_value_t = 201)]
        grid: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long, default_value_t = 1e-9)]
        abs_tol: f64,
        #[arg(long, default_value_t = 1e-7)]
        rel_tol: f64,
        #[arg(long, default_value_t = 2000)]
        max_subdivisions: usize,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo estimates of the crossing probability and the conditional angle law.
    Simulate {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, default_value_t = 50)]
        bins: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the validation suite; exits 1 when a gating check fails.
    Validate {
        #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
        level: LevelArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Use 8/(3 pi) as the chord-distance constant; the suite must then fail.
        #[arg(long)]
        mutate_fl: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate one of the chord-geometry densities as `x,f` CSV.
    Chords {
        #[arg(long, value_enum)]
        which: Which,
        #[arg(long, default_value_t = 201)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Writes to `out`, or stdout when absent.
fn emit(out: Option<&PathBuf>, contents: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_file(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

/// CSV goes to `out` with the report beside it; on stdout the report goes to stderr.
fn emit_csv(out: Option<&PathBuf>, body: &str, report: &RunReport) -> Result<(), CliError> {
    match out {
        Some(path) => {
            write_file(path, body)?;
            write_file(&sidecar_path(path), &report.to_json())
        }
        None => {
            print!("{body}");
            eprint!("{}", report.to_json());
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let exec = Parallel::new(cli.threads)?;
    match cli.command {
        Command::DensityTable { grid, format, abs_tol, rel_tol, max_subdivisions, out } => {
            let cfg = QuadratureConfig { abs_tol, rel_tol, max_subdivisions };
            cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
            let run = runs::density_table(grid, cfg, &exec)?;
            match format {
                Format::Csv => {
                    let body = csv::two_columns(("theta", "g"), &run.table.thetas, &run.table.values);
                    emit_csv(out.as_ref(), &body, &run.report)
                }
                Format::Json => {
                    let mut json = serde_json::to_string_pretty(&run).expect("table serializes");
                    json.push('\n');
                    emit(out.as_ref(), &json)
                }
            }
        }
        Command::Simulate { seed, samples, bins, out } => {
            let report = runs::simulate(seed, samples, bins, &exec)?;
            emit(out.as_ref(), &report.to_json())
        }
        Command::Validate { level, seed, mutate_fl, out } => {
            let level = match level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            let (report, criteria) = suite::validate(level, seed, Options { mutate_fl }, &exec)?;
            for c in &criteria {
                let role = if c.gating { "" } else { " (informational)" };
                eprintln!("{} {}{role}", if c.pass() { "PASS" } else { "FAIL" }, c.name);
                for check in &c.checks {
                    eprintln!("    {}", describe(check));
                }
            }
            emit(out.as_ref(), &report.to_json())?;
            match report.failures() {
                0 => Ok(()),
                failed => Err(CliError::Validation { failed }),
            }
        }
        Command::Chords { which, grid, out } => {
            let which = match which {
                Which::FL => ChordDensity::FL,
                Which::FD => ChordDensity::FD,
                Which::FDAlt => ChordDensity::FDAlt,
                Which::H => ChordDensity::H,
            };
            let run = runs::chords(which, grid)?;
            let body = csv::two_columns(("x", "f"), &run.xs, &run.values);
            emit_csv(out.as_ref(), &body, &run.report)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // help and version are not errors
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
