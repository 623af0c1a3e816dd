use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qvar_cli::{run, CliError, Command, ExperimentConfig};

#[derive(Parser)]
#[command(name = "qvar", version, about = "Run estimator, gradient and amplitude-estimation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Estimator sweep over shot levels (ESTIMATOR_SWEEP).
    Estimate(Common),
    /// Control-gradient grid refinement (GRAPE_CONVERGENCE).
    Gradient(Common),
    /// Series truncation error over GUE draws (SUN_REMAINDER).
    Remainder(Common),
    /// Amplitude-estimation error scaling (MLQAE_SCALING).
    Mlqae(Common),
    /// Classifier-cost variance sweep (QML_VARIANCE).
    Qml(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn execute(command: Command, args: &Common) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| CliError::Config(format!("{}: {e}", args.config.display())))?;
    let config = ExperimentConfig::parse(&text)?;
    let outcome = run(command, &config, args.seed, args.out.as_deref())?;
    for p in outcome.outputs.iter().chain(std::iter::once(&outcome.manifest)) {
        println!("{}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match &cli.command {
        Sub::Estimate(a) => (Command::Estimate, a),
        Sub::Gradient(a) => (Command::Gradient, a),
        Sub::Remainder(a) => (Command::Remainder, a),
        Sub::Mlqae(a) => (Command::Mlqae, a),
        Sub::Qml(a) => (Command::Qml, a),
    };
    match execute(command, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
