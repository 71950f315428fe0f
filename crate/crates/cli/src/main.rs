use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use udn_cli::{cmd_compare, cmd_solve_mfg, cmd_sweep, parse_config, Axis, CliError, RunManifest};

#[derive(Parser)]
#[command(
    name = "udn",
    version,
    about = "Mean-field power control and DPP scheduling experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override a key, e.g. `--set mfg.p_max=15` (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,

    /// Base seed for the Monte-Carlo runs.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0, global = true)]
    jobs: usize,

    /// Exit with code 3 if the MFG solve does not converge.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the mean-field game and write its surfaces.
    SolveMfg,
    /// Compare the proposed policy with the baseline on every ISD × k cell.
    Compare,
    /// Compare along one axis, holding the other at its first value.
    Sweep {
        #[arg(long)]
        axis: Axis,
    },
}

fn run(cli: Cli) -> Result<RunManifest, CliError> {
    let mut overrides = cli.overrides.clone();
    if let Some(seed) = cli.seed {
        overrides.push(format!("sim.base_seed={seed}"));
    }
    if let Some(out) = &cli.out {
        let dir = toml::Value::String(out.to_string_lossy().into_owned());
        overrides.push(format!("output.dir={dir}"));
    }
    let cfg = parse_config(cli.config.as_deref(), &overrides)?;
    match cli.command {
        Command::SolveMfg => cmd_solve_mfg(&cfg),
        Command::Compare => cmd_compare(&cfg, cli.jobs),
        Command::Sweep { axis } => cmd_sweep(&cfg, axis, cli.jobs),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let strict = cli.strict;
    match run(cli) {
        Ok(manifest) => {
            let s = &manifest.solver;
            eprintln!(
                "{}: {} files in {} ({:.1} s); solver {} after {} iterations, residual {:.3e}",
                manifest.command,
                manifest.files.len(),
                manifest.config.output.dir,
                manifest.wall_clock_seconds,
                if s.converged {
                    "converged"
                } else {
                    "did NOT converge"
                },
                s.iterations_used,
                s.final_residual
            );
            if strict && !s.converged {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
