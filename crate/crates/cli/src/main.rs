//! `transmute`: run the identity suite and the analytic checks from the command line.
//!
//! Exit status: 0 when everything passes, 1 on usage or I/O errors, 2 when a
//! statistical or numerical check fails.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::Failure;

#[derive(Debug, Parser)]
#[command(name = "transmute", version, about = "Check the Gauss-Laplace identities by simulation and quadrature")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the equivalence suite and write a report.
    Run(RunArgs),
    /// Print the identity catalogue.
    List {
        /// `text` (tab-separated, one identity per line) or `json`.
        #[arg(long, default_value = "text")]
        format: String,
    },
    /// Compare the mixture-density quadrature with the closed-form Laplace density.
    DensityCheck {
        #[arg(long = "lambda", default_value_t = 1.0)]
        lambda: f64,
        /// `start:stop:step`.
        #[arg(long, default_value = "-10:10:0.2", allow_hyphen_values = true)]
        grid: String,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Evaluate the duplication-formula residual on log-spaced points.
    DuplicationCheck {
        /// `start:stop`, both positive.
        #[arg(long, default_value = "0.5:50", allow_hyphen_values = true)]
        range: String,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// `all` or a comma-separated list such as `I1,I7`.
    #[arg(long)]
    identities: Option<String>,
    /// Draws per batch.
    #[arg(long = "n")]
    n: Option<usize>,
    #[arg(long)]
    replicates: Option<u32>,
    /// Master seed; defaults to $TRANSMUTE_SEED.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Report path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// `json` or `csv`.
    #[arg(long, value_parser = config::parse_format)]
    format: Option<transmute::engine::OutputFormat>,
    /// Flat `key = value` file; flags take precedence over it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Band half-width in standard errors for the MGF and log-moment tests.
    #[arg(long = "band-z")]
    band_z: Option<f64>,
    /// Degrees of freedom for I7, e.g. `1,2,5`.
    #[arg(long = "k-values", value_parser = config::parse_u32_list)]
    k_values: Option<Vec<u32>>,
    /// Sample counts for I8, e.g. `1,2,10`.
    #[arg(long = "n-values", value_parser = config::parse_u32_list)]
    n_values: Option<Vec<u32>>,
    /// Record per-identity wall-clock time (makes reports non-reproducible).
    #[arg(long)]
    timings: bool,
}

impl RunArgs {
    fn overrides(self) -> config::Overrides {
        config::Overrides {
            identities: self.identities,
            n: self.n,
            replicates: self.replicates,
            seed: self.seed,
            alpha: self.alpha,
            out: self.out,
            format: self.format,
            band_z: self.band_z,
            k_values: self.k_values,
            n_values: self.n_values,
            timings: self.timings.then_some(true),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Run(mut args) => {
            let file = args.config.take();
            commands::run(args.overrides(), file.as_deref())
        }
        Command::List { format } => commands::list(&format),
        Command::DensityCheck { lambda, grid, tol } => commands::density_check(lambda, &grid, tol),
        Command::DuplicationCheck { range, points, tol } => {
            commands::duplication_check(&range, points, tol)
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}
