use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use squeezed_cli::run::{dump_density, execute, Outcome};
use squeezed_cli::{load, CliError, CliResult, Scenario};

#[derive(Parser)]
#[command(name = "squeezed", version, about = "Squeezed and mixed Gaussian oscillator states: time series, density dumps, verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Directory for output files
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,

    /// Seed for scenarios whose ensemble check runs in Monte Carlo mode
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Suppress progress and report output on stdout
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Write every product each scenario requests
    Run { config: PathBuf },
    /// Run only the verification checks
    Verify { config: PathBuf },
    /// Write the closed-form density matrix of each scenario at one time
    DumpDensity {
        config: PathBuf,
        #[arg(long)]
        time: f64,
        /// Restrict to one scenario
        #[arg(long)]
        scenario: Option<String>,
    },
}

fn run_all(scenarios: &[Scenario], out_dir: &Path, seed: Option<u64>, verify_only: bool, quiet: bool) -> CliResult<()> {
    let outcomes: Vec<CliResult<Outcome>> = scenarios
        .par_iter()
        .map(|sc| execute(sc, out_dir, seed, verify_only))
        .collect();
    let mut failed = 0;
    let mut first_error = None;
    for outcome in outcomes {
        match outcome {
            Ok(o) => {
                if !quiet {
                    print!("{}", o.report);
                    for f in &o.files {
                        println!("wrote {}", f.display());
                    }
                }
                failed += o.failed_checks;
            }
            // the first error decides the exit code and is printed by main
            Err(e) if first_error.is_none() => first_error = Some(e),
            Err(e) => eprintln!("error: {e}"),
        }
    }
    if let Some(e) = first_error {
        return Err(e);
    }
    if failed > 0 {
        return Err(CliError::Verification(format!("{failed} check(s) failed")));
    }
    Ok(())
}

fn main_inner(cli: Cli) -> CliResult<()> {
    if !cli.out_dir.exists() {
        std::fs::create_dir_all(&cli.out_dir).map_err(|e| CliError::Io {
            path: cli.out_dir.clone(),
            source: e,
        })?;
    }
    match &cli.command {
        Command::Run { config } => run_all(&load(config)?, &cli.out_dir, cli.seed, false, cli.quiet),
        Command::Verify { config } => run_all(&load(config)?, &cli.out_dir, cli.seed, true, cli.quiet),
        Command::DumpDensity { config, time, scenario } => {
            let scenarios = load(config)?;
            let selected: Vec<&Scenario> = scenarios
                .iter()
                .filter(|s| scenario.as_ref().is_none_or(|name| &s.name == name))
                .collect();
            if selected.is_empty() {
                return Err(CliError::Invariant {
                    scenario: scenario.clone().unwrap_or_default(),
                    message: "no scenario with this name in the config".into(),
                });
            }
            if !(time.is_finite() && *time >= 0.0) {
                return Err(CliError::Invariant {
                    scenario: String::new(),
                    message: format!("--time must be >= 0, got {time}"),
                });
            }
            for sc in selected {
                let path = cli.out_dir.join(format!("{}.density.txt", sc.name));
                dump_density(sc, *time, &path)?;
                if !cli.quiet {
                    println!("wrote {}", path.display());
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
