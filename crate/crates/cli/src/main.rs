use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qderiv_cli::commands::{run, RunContext};

#[derive(Parser)]
#[command(name = "qderiv-cli", about = "Derivative-estimator experiments", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Master seed; overrides the seed in the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Bias/variance/MSE sweep of gradient estimators over a step grid.
    MseSweep(Common),
    /// MSE-vs-shots scaling with per-shot-budget optimal steps and fits.
    ScalingSweep(Common),
    /// Value, gradient and Hessian at a point.
    Hessian(Common),
    /// Fubini-Study metric tensor at a point.
    Metric(Common),
    /// Iterative optimization traces for one or more methods.
    Optimize(Common),
    /// Full trigonometric-surrogate coefficients with verification.
    Reconstruct(Common),
}

impl Command {
    fn parts(&self) -> (&'static str, &Common) {
        match self {
            Command::MseSweep(c) => ("mse-sweep", c),
            Command::ScalingSweep(c) => ("scaling-sweep", c),
            Command::Hessian(c) => ("hessian", c),
            Command::Metric(c) => ("metric", c),
            Command::Optimize(c) => ("optimize", c),
            Command::Reconstruct(c) => ("reconstruct", c),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, common) = cli.command.parts();
    let ctx = match RunContext::prepare(name, &common.config, common.seed, common.out.clone()) {
        Ok(ctx) => ctx,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match run(name, &ctx) {
        Ok(outcome) if outcome.calibration_met => ExitCode::SUCCESS,
        Ok(_) => {
            eprintln!("calibration unmet: reference circuit does not match its pinned values");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
