use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kolmo_lab::{run, ExperimentConfig, ExperimentKind};

#[derive(Parser)]
#[command(name = "kolmo-lab", version, about = "Run Kolmogorov-equation verification experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grid vs closed-form propagation, with an optional FD reference.
    Propagate(RunArgs),
    /// Spectral tail mass against the decay bound.
    DecayCheck(RunArgs),
    /// Thickness verdict and minimal δ of the configured set.
    Thickness(RunArgs),
    /// Fit the spectral-inequality constant of the configured set.
    SpectralFit(RunArgs),
    /// Interpolation estimate over the (T, α) grid.
    InterpVerify(RunArgs),
    /// Telescoping observability estimate over a time set.
    Telescope(RunArgs),
    /// Print the built-in config for an experiment kind.
    Preset { kind: String },
}

#[derive(Args)]
struct RunArgs {
    /// TOML config; the built-in preset is used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: the config's `output`, else `out/<kind>`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write SVG plots.
    #[arg(long)]
    plots: bool,
}

fn execute(kind: ExperimentKind, args: RunArgs) -> u8 {
    let text = match &args.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                return 1;
            }
        },
        None => kind.preset().to_string(),
    };
    let mut config = match ExperimentConfig::from_toml(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return 2;
        }
    };
    if config.kind != kind {
        eprintln!("config error: file describes `{}`, subcommand is `{}`", config.kind.name(), kind.name());
        return 2;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    config.plots |= args.plots;
    let out = args.out.or_else(|| config.output.clone()).unwrap_or_else(|| PathBuf::from("out").join(kind.name()));
    config.output = Some(out.clone());
    match run(&config, &out) {
        Ok(outcome) => {
            println!("{}: wrote {} files to {}", kind.name(), outcome.outputs.len(), out.display());
            if let Some(w) = &outcome.witness {
                println!("{} violation(s); first: {w}", outcome.violations);
            }
            outcome.exit_code() as u8
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code() as u8
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Propagate(a) => execute(ExperimentKind::Propagate, a),
        Command::DecayCheck(a) => execute(ExperimentKind::DecayCheck, a),
        Command::Thickness(a) => execute(ExperimentKind::Thickness, a),
        Command::SpectralFit(a) => execute(ExperimentKind::SpectralFit, a),
        Command::InterpVerify(a) => execute(ExperimentKind::InterpVerify, a),
        Command::Telescope(a) => execute(ExperimentKind::Telescope, a),
        Command::Preset { kind } => match ExperimentKind::ALL.iter().find(|k| k.name() == kind) {
            Some(k) => {
                print!("{}", k.preset());
                0
            }
            None => {
                eprintln!("unknown kind `{kind}`");
                2
            }
        },
    };
    ExitCode::from(code)
}
