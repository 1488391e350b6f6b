//! `cellassoc` — experiment runner for the cell-association library.
//!
//! Four subcommands: `run` executes a TOML experiment spec, `figure`
//! reproduces a canned study, `validate` cross-checks the two engines,
//! and `analytic` evaluates a single closed-form expression. Exit codes:
//! 0 success, 1 validation failure, 2 numerical failure, 3 bad arguments.

mod analytic_cmd;
mod error;
mod figures;
mod output;
mod runner;
mod spec;
mod validate;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::CliError;
use crate::output::write_csv;

#[derive(Parser)]
#[command(name = "cellassoc", version, about = "Multi-technology cell association: simulation and closed-form evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute an experiment described by a TOML spec file.
    Run {
        /// Path to the experiment spec.
        #[arg(long)]
        spec: PathBuf,
    },
    /// Reproduce a canned study (fig2, fig3-cov, fig3-rate, fig4).
    Figure {
        /// Figure id.
        id: String,
        /// Output directory (default: current directory).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worlds per Monte Carlo point (default: 10000).
        #[arg(long)]
        n_worlds: Option<u64>,
        /// Base seed (default: 7240).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Cross-check the simulation and analytic engines.
    Validate {
        /// Run the statistical checks at their minimum sample size.
        #[arg(long)]
        quick: bool,
        /// Override the statistical sample size.
        #[arg(long)]
        n_worlds: Option<u64>,
    },
    /// Evaluate one closed-form expression directly.
    Analytic {
        /// Formula id (eq11, eq12, eq13, eq15, eq16, eq19, eq20, lemma6, phi).
        formula: String,
        /// Parameters as key=value pairs; repeatable, commas allowed.
        #[arg(long)]
        params: Vec<String>,
    },
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return code;
        }
    };

    let outcome = match cli.command {
        Command::Run { spec } => run_spec(&spec),
        Command::Figure {
            id,
            out,
            n_worlds,
            seed,
        } => figures::run_figure(&id, out, n_worlds, seed),
        Command::Validate { quick, n_worlds } => validate::run_validate(quick, n_worlds),
        Command::Analytic { formula, params } => analytic_cmd::run_analytic(&formula, &params),
    };

    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run_spec(path: &PathBuf) -> Result<i32, CliError> {
    let experiment = spec::load(path)?;
    let resolved = experiment.resolve()?;
    let output = runner::execute(&resolved)?;

    let mut buf = Vec::new();
    write_csv(
        &mut buf,
        &resolved.sweep_var,
        &resolved.metric.to_string(),
        &output.rows,
    )?;
    match &resolved.output {
        Some(csv_path) => {
            if let Some(parent) = csv_path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            std::fs::write(csv_path, &buf)?;
            spec::write_sidecar(csv_path, &resolved)?;
            println!("wrote {} ({} rows)", csv_path.display(), output.rows.len());
        }
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&buf)?;
        }
    }

    if output.numerical_failures > 0 {
        eprintln!(
            "error: {} row(s) failed numerically",
            output.numerical_failures
        );
        Ok(2)
    } else {
        Ok(0)
    }
}
