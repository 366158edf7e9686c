use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use multitime_cli::commands::{self, EXIT_CONFIG};
use multitime_cli::config::RunConfig;
use multitime_cli::report::Envelope;
use multitime_cli::selftest::SelftestOptions;

#[derive(Parser)]
#[command(name = "multitime", version, about = "Multi-time Volterra solver for two Dirac particles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the identity, operator, causality and inequality suites.
    Selftest {
        /// Write the JSON report here.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use a coarse light-cone quadrature in the inequality suite.
        #[arg(long)]
        reduced_quadrature: bool,
        #[arg(long, hide = true)]
        tamper_g: bool,
    },
    /// Print the contraction certificate for a kernel norm and mass bound.
    Certify {
        #[arg(long)]
        norm_k: f64,
        #[arg(long, default_value_t = 0.0)]
        mu: f64,
    },
    /// Solve ψ = ψ_free + Aψ on Minkowski space.
    Solve { config: PathBuf },
    /// Solve the regularized massless FLRW problem.
    FlrwSolve { config: PathBuf },
    /// Norm tables for a stored field snapshot.
    Norms {
        field: PathBuf,
        /// Also report ‖ψ‖_g for this kernel norm.
        #[arg(long)]
        norm_k: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        mu: f64,
        /// Write the per-time-pair table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn load(path: &Path, command: &str) -> Result<RunConfig, u8> {
    RunConfig::load(path).map_err(|e| {
        let mut env: Envelope<()> = Envelope::new(command, None);
        env.exit_code = EXIT_CONFIG;
        env.error = Some(e.to_string());
        print!("{}", env.to_json());
        EXIT_CONFIG as u8
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Selftest {
            output_dir,
            seed,
            reduced_quadrature,
            tamper_g,
        } => {
            let mut opts = SelftestOptions {
                seed,
                tamper_g,
                ..SelftestOptions::default()
            };
            if reduced_quadrature {
                opts.quad = SelftestOptions::reduced_quadrature();
            }
            let (code, lines) = commands::cmd_selftest(&opts, output_dir.as_deref());
            for l in lines {
                println!("{l}");
            }
            code
        }
        Command::Certify { norm_k, mu } => {
            let (code, json) = commands::cmd_certify(norm_k, mu);
            print!("{json}");
            code
        }
        Command::Solve { config } => match load(&config, "solve") {
            Ok(cfg) => {
                let (code, json) = commands::cmd_solve(&cfg);
                print!("{json}");
                code
            }
            Err(c) => return ExitCode::from(c),
        },
        Command::FlrwSolve { config } => match load(&config, "flrw-solve") {
            Ok(cfg) => {
                let (code, json) = commands::cmd_flrw_solve(&cfg);
                print!("{json}");
                code
            }
            Err(c) => return ExitCode::from(c),
        },
        Command::Norms { field, norm_k, mu, csv } => {
            let (code, json) = commands::cmd_norms(&field, norm_k.map(|k| (k, mu)), csv.as_deref());
            print!("{json}");
            code
        }
    };
    ExitCode::from(code as u8)
}
