//! `sim`: command-line harness around the cvtele simulator.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::Context;
use crate::config::ExperimentConfig;
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "sim", version, about = "Microwave CV teleportation simulator")]
struct Cli {
    /// Run the built-in acceptance suite and print a pass/fail table.
    #[arg(long)]
    check: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Phase-averaged fidelity against input photon number.
    SweepPhoton(RunArgs),
    /// Fidelity and resource diagnostics against link temperature.
    SweepTemp(RunArgs),
    /// Fit (kappa, zeta) to measured fidelities.
    Fit(RunArgs),
    /// Qubit fidelities from fitted parameters at other squeezing levels.
    QubitPredict(RunArgs),
    /// Sample a state, accumulate moments and reconstruct it.
    Tomo(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: u16,
}

fn run(command: Command) -> Result<Vec<PathBuf>, CliError> {
    let (action, args): (fn(&Context) -> Result<Vec<PathBuf>, CliError>, RunArgs) = match command {
        Command::SweepPhoton(a) => (commands::sweep_photon, a),
        Command::SweepTemp(a) => (commands::sweep_temp, a),
        Command::Fit(a) => (commands::fit, a),
        Command::QubitPredict(a) => (commands::qubit_predict, a),
        Command::Tomo(a) => (commands::tomography, a),
    };
    let (config, base) = ExperimentConfig::load(&args.config)?;
    std::fs::create_dir_all(&args.out).map_err(|e| CliError::io(&args.out, e))?;
    let ctx = Context {
        config,
        base,
        out: args.out,
        seed: args.seed,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs as usize)
        .build()
        .map_err(|e| CliError::Io(e.to_string()))?;
    pool.install(|| action(&ctx))
}

fn check() -> ExitCode {
    println!("{:<4} {:<34} {:<6} {:>9}  detail", "id", "criterion", "result", "seconds");
    let mut all = true;
    for c in &cvtele::acceptance::CRITERIA {
        let o = c.run();
        all &= o.passed;
        println!(
            "{:<4} {:<34} {:<6} {:>9.2}  {}",
            o.id,
            o.title,
            if o.passed { "PASS" } else { "FAIL" },
            o.seconds,
            o.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.check {
        return check();
    }
    let Some(command) = cli.command else {
        eprintln!("{}", CliError::Schema("no subcommand given; see --help".into()).to_json());
        return ExitCode::from(2);
    };
    match run(command) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
