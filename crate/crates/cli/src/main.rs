//! Command-line front end: sweeps, quadrature table maintenance and the
//! oracle self-test.

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use plcrf_core::harness::config::{CapacityUnit, Overrides};
use plcrf_core::harness::{load_config_with, parse_config, output, run_experiment, selftest, Preset};
use plcrf_core::special::quadrature::{
    half_range_recurrence_discretized, half_range_recurrence_embedded, render_half_range_table,
};
use plcrf_core::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_AGREEMENT: u8 = 3;
const EXIT_OTHER: u8 = 1;

#[derive(Parser)]
#[command(name = "plcrf", version, about = "Cascaded PLC/MIMO-RF relaying performance analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep a metric and write the results as CSV.
    Analyze(AnalyzeArgs),
    /// Maintain the embedded half-range quadrature tables.
    Quadtable {
        #[command(subcommand)]
        action: QuadAction,
    },
    /// Cross-check every closed form against its oracle.
    Selftest,
}

#[derive(clap::Args)]
struct AnalyzeArgs {
    /// Configuration file (TOML); optional when a preset is given.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in parameter set the file is layered on.
    #[arg(long, value_parser = parse_preset)]
    preset: Option<Preset>,
    /// Monte-Carlo trials per grid point; enables simulation.
    #[arg(long)]
    sim_trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Output CSV path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report capacity in bits/s/Hz instead of nats/s/Hz.
    #[arg(long)]
    bits: bool,
    /// Print a gnuplot script for the output to standard error.
    #[arg(long)]
    gnuplot_hints: bool,
}

#[derive(Subcommand)]
enum QuadAction {
    /// Regenerate the recurrence coefficients and compare with the embedded ones.
    Regen {
        #[arg(long, default_value_t = 64)]
        order: usize,
        /// Print the regenerated table as Rust source.
        #[arg(long)]
        emit: bool,
    },
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    let mut source = std::error::Error::source(e);
    while let Some(s) = source {
        eprintln!("  caused by: {s}");
        source = s.source();
    }
    ExitCode::from(if e.is_config_error() { EXIT_CONFIG } else { EXIT_OTHER })
}

fn analyze(args: AnalyzeArgs) -> Result<(), Error> {
    let overrides = Overrides {
        preset: args.preset,
        sim_trials: args.sim_trials,
        seed: args.seed,
        workers: args.workers,
        out: args.out,
    };
    let mut spec = match &args.config {
        Some(path) => load_config_with(path, &overrides)?,
        None if args.preset.is_some() => parse_config("", "<preset>".as_ref(), &overrides)?,
        None => {
            return Err(Error::Schema {
                field: "--config".into(),
                reason: "give a configuration file or a preset".into(),
            })
        }
    };
    if args.bits {
        spec.capacity_unit = CapacityUnit::Bits;
    }
    let curves = run_experiment(&spec)?;
    match &spec.output {
        Some(path) => output::emit_csv(&curves, path)?,
        None => output::write_csv(&curves, io::stdout().lock(), "<stdout>".as_ref())?,
    }
    if args.gnuplot_hints {
        let target = spec.output.clone().unwrap_or_else(|| PathBuf::from("results.csv"));
        eprint!("{}", output::gnuplot_hints(&spec, &curves, &target));
    }
    Ok(())
}

fn quadtable(order: usize, emit: bool) -> Result<bool, Error> {
    let fresh = half_range_recurrence_discretized(order)?;
    let embedded = half_range_recurrence_embedded(order)?;
    let worst = fresh
        .alpha
        .iter()
        .zip(&embedded.alpha)
        .chain(fresh.beta.iter().zip(&embedded.beta))
        .map(|(a, b)| ((a - b) / b).abs())
        .fold(0.0, f64::max);
    let ok = worst <= 1e-10;
    println!(
        "{} order {order}: worst relative difference from embedded table {worst:.3e}",
        if ok { "PASS" } else { "FAIL" }
    );
    if emit {
        print!("{}", render_half_range_table(&fresh));
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze(args) => match analyze(args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(&e),
        },
        Command::Quadtable { action: QuadAction::Regen { order, emit } } => match quadtable(order, emit) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(EXIT_AGREEMENT),
            Err(e) => fail(&e),
        },
        Command::Selftest => match selftest::run_selftest() {
            Ok(checks) => {
                let mut out = io::stdout().lock();
                for c in &checks {
                    let _ = writeln!(out, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                }
                let failed = checks.iter().filter(|c| !c.passed).count();
                let _ = writeln!(out, "{} of {} checks passed", checks.len() - failed, checks.len());
                if failed == 0 {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(EXIT_AGREEMENT)
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_AGREEMENT)
            }
        },
    }
}
