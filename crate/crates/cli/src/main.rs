use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vortex_cli::{run, Command};

/// Vortex-beam scattering: closed-form amplitudes, oracle checks and (m1, m2) intensity maps.
#[derive(Parser)]
#[command(name = "vortex", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Reduced triple-twisted amplitude at a single (q, m1, m2), as JSON.
    Eval(Paths),
    /// Compare the closed form with the constraint-solving oracle on random configurations.
    OracleCheck(Paths),
    /// q-integrated intensity map on the (m1, m2) grid, as CSV.
    Map {
        #[command(flatten)]
        paths: Paths,
        /// Also write a gnuplot script rendering the map.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Transverse Bessel field on a polar grid, as CSV.
    Field(Paths),
}

#[derive(Args)]
struct Paths {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output file.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, paths, plot) = match cli.command {
        Cmd::Eval(p) => (Command::Eval, p, None),
        Cmd::OracleCheck(p) => (Command::OracleCheck, p, None),
        Cmd::Map { paths, plot } => (Command::Map, paths, plot),
        Cmd::Field(p) => (Command::Field, p, None),
    };
    match run(command, &paths.config, &paths.out, plot.as_deref()) {
        Ok(outcome) => {
            eprintln!("{}", outcome.summary);
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
