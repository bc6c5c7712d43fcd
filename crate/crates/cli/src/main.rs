use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nozzleflow_cli::{cmd_levels, cmd_run, cmd_validate, load_config, output, parse_pair, CliError};
use nozzleflow_core::{solve_riemann, GasConstants, GasState};

#[derive(Parser)]
#[command(name = "nozzleflow", version, about = "Modified Godunov scheme for isentropic nozzle flow")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// March to T and write snapshots plus diagnostics.csv
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides `out` in the config)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run even if the nozzle fails the admissibility condition
        #[arg(long)]
        force: bool,
        /// Refinement study over this many meshes (dx, dx/2, ...)
        #[arg(long)]
        levels: Option<usize>,
    },
    /// Check the admissibility condition and parameter constraints
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Sample the exact Riemann fan as CSV on stdout
    Riemann {
        /// Left state "rho,v"
        #[arg(long, allow_hyphen_values = true)]
        left: String,
        /// Right state "rho,v"
        #[arg(long, allow_hyphen_values = true)]
        right: String,
        #[arg(long, default_value_t = 5.0 / 3.0)]
        gamma: f64,
        #[arg(long, default_value_t = 201)]
        samples: usize,
    },
}

fn config_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run {
            config,
            out,
            force,
            levels,
        } => {
            let cfg = load_config(&config)?;
            let base = config_dir(&config);
            let out = out.unwrap_or_else(|| base.join(cfg.out.clone().unwrap_or_else(|| PathBuf::from("out"))));
            if let Some(n) = levels {
                let rows = cmd_levels(&cfg, &base, &out, force, n.max(1))?;
                println!("{:>12} {:>8} {:>14} {:>14}", "dx", "steps", "violation", "l1_error");
                for r in &rows {
                    let l1 = r.l1_error.map(|v| format!("{v:.6e}")).unwrap_or_else(|| "-".into());
                    println!("{:>12.6e} {:>8} {:>14.6e} {:>14}", r.dx, r.steps, r.max_violation, l1);
                }
                return Ok(());
            }
            let s = cmd_run(&cfg, &base, &out, force)?;
            println!(
                "{} steps, {} snapshot(s) in {}, max pre-average violation {:e}",
                s.steps,
                s.snapshots.len(),
                s.out_dir.display(),
                s.max_violation
            );
            Ok(())
        }
        Command::Validate { config } => {
            let cfg = load_config(&config)?;
            let report = cmd_validate(&cfg, &config_dir(&config))?;
            println!("{report}");
            if report.passed() {
                Ok(())
            } else {
                Err(CliError::Validation(format!(
                    "clause {} violated",
                    report.violated_clause().unwrap_or("?")
                )))
            }
        }
        Command::Riemann {
            left,
            right,
            gamma,
            samples,
        } => {
            let bad = |e: String| CliError::Validation(e);
            let (l, r) = (parse_pair(&left).map_err(bad)?, parse_pair(&right).map_err(bad)?);
            let c = GasConstants::new(gamma).map_err(|e| CliError::Validation(e.to_string()))?;
            let fan = solve_riemann(GasState::from_velocity(l.0, l.1), GasState::from_velocity(r.0, r.1), &c)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            output::write_fan(&mut w, &fan, samples.max(1))
                .and_then(|_| w.flush())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
