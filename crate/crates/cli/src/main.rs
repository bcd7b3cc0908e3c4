use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mhd1d::{read_config, run, sweep, verify, CliError, EXIT_OK, EXIT_VERIFICATION};

#[derive(Parser)]
#[command(name = "mhd1d", version, about = "1D Lagrangian planar MHD simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides output.dir).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the Cartesian product of the given axes.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// `alpha=0,1`, `beta=0.5,1` or `amplitude=...`; repeatable.
        #[arg(long = "axis")]
        axes: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the verification studies.
    Verify,
    /// Parse and validate a configuration, including its initial data.
    CheckConfig {
        #[arg(long)]
        config: PathBuf,
    },
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Run { config, out } => {
            let cfg = read_config(&config)?;
            let dir = out.unwrap_or_else(|| cfg.out_dir.clone());
            let summary = run::run(&cfg, &dir)?;
            println!("{}", summary.describe());
            if let Some(f) = &summary.failure {
                return Err(CliError::Step(f.clone()));
            }
            Ok(EXIT_OK)
        }
        Command::Sweep { config, axes, out } => {
            let cfg = read_config(&config)?;
            let axes = axes
                .iter()
                .map(|a| mhd1d::parse_axis(a))
                .collect::<Result<Vec<_>, _>>()
                .map_err(CliError::Config)?;
            let dir = out.unwrap_or_else(|| cfg.out_dir.clone());
            let rows = sweep::sweep(&cfg, &axes, &dir)?;
            for r in &rows {
                println!(
                    "{}: alpha = {}, beta = {}, amplitude = {} -> exit {}{}",
                    r.run,
                    r.alpha,
                    r.beta,
                    r.amplitude,
                    r.exit_status,
                    r.message.as_deref().map(|m| format!(" ({m})")).unwrap_or_default()
                );
            }
            println!("summary: {}", dir.join(sweep::SUMMARY_FILE).display());
            Ok(EXIT_OK)
        }
        Command::Verify => {
            let results = verify::all_studies();
            for r in &results {
                println!("{}", r.to_json());
            }
            let failed: Vec<&str> = results.iter().filter(|r| !r.pass).map(|r| r.study).collect();
            if failed.is_empty() {
                Ok(EXIT_OK)
            } else {
                eprintln!("verification failed: {}", failed.join(", "));
                Ok(EXIT_VERIFICATION)
            }
        }
        Command::CheckConfig { config } => {
            let cfg = read_config(&config)?;
            let state = cfg.initial_state().map_err(CliError::Config)?;
            println!(
                "ok: {} cells on [{}, {}], bc = {}, alpha = {}, beta = {}, t_end = {}",
                state.grid.cells,
                state.grid.left_edge,
                state.grid.right_edge(),
                cfg.bc,
                cfg.params.alpha,
                cfg.params.beta,
                cfg.t_end
            );
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("mhd1d: {e}");
            e.code()
        }
    };
    ExitCode::from(code as u8)
}
