use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use persuade_cli::plot::{cmd_plot, Axes};
use persuade_cli::report::cmd_optimal;
use persuade_cli::runner::{cmd_run, seed_override_from_env};
use persuade_cli::CliError;

/// Persuasion with an unknown prior: experiments, optimal schemes and regret plots.
#[derive(Parser)]
#[command(name = "persuade", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every learner x seed episode of a config and write the CSVs.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (default: one per core).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Print the optimal scheme, U* and margin constants of an instance.
    Optimal {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Render a results CSV as an SVG regret plot.
    Plot {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Axes::Linear)]
        axes: Axes,
        /// Config whose learners' regret bounds are overlaid as dashed curves.
        #[arg(long)]
        bound_config: Option<PathBuf>,
    },
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, out, threads } => {
            let files = cmd_run(&config, &out, threads, seed_override_from_env()?)?;
            eprintln!("wrote {} and {}", files.results.display(), files.summary.display());
            if let Some(path) = files.ball_checks {
                eprintln!("wrote {}", path.display());
            }
        }
        Command::Optimal { instance } => print!("{}", cmd_optimal(&instance)?),
        Command::Plot { input, out, axes, bound_config } => {
            cmd_plot(&input, &out, axes, bound_config.as_deref())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
