use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use teamdiff_cli::{load_config, parse_mus, run_gan, run_quadratic, sweep_mu, verify_graph, CliError};

#[derive(Parser)]
#[command(name = "teamdiff", version, about = "Diffusion learning for two competing teams of agents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the topology invariants and print lambda2 and rho(B) per team.
    VerifyGraph {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte-Carlo runs of the quadratic zero-sum game.
    RunQuadratic {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs of the toy GAN.
    RunGan {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Step-size study; adjacent step sizes must differ by a factor of 2.
    SweepMu {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated, e.g. 0.02,0.01,0.005.
        #[arg(long)]
        mus: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::VerifyGraph { config, out } => verify_graph(&load_config(&config)?, out.as_deref()),
        Command::RunQuadratic { config, out } => run_quadratic(&load_config(&config)?, out.as_deref()),
        Command::RunGan { config, out } => run_gan(&load_config(&config)?, out.as_deref()),
        Command::SweepMu { config, mus, out } => {
            let mus = parse_mus(&mus)?;
            sweep_mu(&load_config(&config)?, &mus, out.as_deref())
        }
    }
    .map(|_| ())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
