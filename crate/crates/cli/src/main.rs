//! `grasscond`: command-line access to intrinsic volumes, tube and tail
//! bounds, twisted characteristic polynomial averages and condition number
//! sampling.

mod commands;
mod output;
mod selftest;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Format;

#[derive(Debug, Parser)]
#[command(name = "grasscond", version, about = "Grassmann condition, intrinsic volumes and tube bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct Common {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Run the invariant checks behind this subcommand instead.
    #[arg(long)]
    pub selftest: bool,
}

/// Monte Carlo controls.
#[derive(Debug, Clone, Args)]
pub struct Mc {
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact tube-formula coefficient matrices D_{n,m}.
    Coeffs(commands::CoeffsArgs),
    /// Intrinsic volumes of a cone given as JSON.
    Iv(commands::IvArgs),
    /// Tube-volume bounds around the ill-posed subspaces.
    TubeBound(commands::TubeArgs),
    /// Tail bounds for the Grassmann condition number.
    Tail(commands::TailArgs),
    /// Bounds on the expected log condition number.
    Expect(commands::ExpectArgs),
    /// Exact and sampled averages of twisted characteristic polynomials.
    AvgCharpoly(commands::CharpolyArgs),
    /// Sample condition numbers of random subspaces against a circular cone.
    McCondition(commands::ConditionArgs),
    /// Lorentz convolution and log-concavity sweeps.
    CheckConjectures(commands::ConjectureArgs),
    /// Numeric checks of the estimates used in the tail bounds.
    InequalitySuite(commands::SuiteArgs),
    /// Properties of g_m(n).
    GReport(commands::GArgs),
}

fn threads_from_env() -> Result<Option<usize>, commands::CliError> {
    match std::env::var("GRASSCOND_THREADS") {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(commands::CliError::Config(format!("GRASSCOND_THREADS must be a positive integer, got {s:?}"))),
        },
    }
}

fn dispatch(command: Command) -> Result<(Vec<u8>, Option<PathBuf>), commands::CliError> {
    macro_rules! go {
        ($args:expr, $run:path, $check:path) => {{
            let a = $args;
            let bytes = if a.common.selftest { $check()? } else { $run(&a)?.bytes(a.common.format) };
            Ok((bytes, a.common.output.clone()))
        }};
    }
    match command {
        Command::Coeffs(a) => go!(a, commands::coeffs, selftest::coeffs),
        Command::Iv(a) => go!(a, commands::iv, selftest::iv),
        Command::TubeBound(a) => go!(a, commands::tube_bound, selftest::tube_bound),
        Command::Tail(a) => go!(a, commands::tail, selftest::tail),
        Command::Expect(a) => go!(a, commands::expect, selftest::expect),
        Command::AvgCharpoly(a) => go!(a, commands::avg_charpoly, selftest::avg_charpoly),
        Command::McCondition(a) => go!(a, commands::mc_condition, selftest::mc_condition),
        Command::CheckConjectures(a) => go!(a, commands::check_conjectures, selftest::check_conjectures),
        Command::InequalitySuite(a) => go!(a, commands::inequality_suite, selftest::inequality_suite),
        Command::GReport(a) => go!(a, commands::g_report, selftest::g_report),
    }
}

fn run(cli: Cli) -> Result<(), commands::CliError> {
    let (bytes, path) = match threads_from_env()? {
        Some(n) => grasscond::parallel::with_threads(n, || dispatch(cli.command))?,
        None => dispatch(cli.command)?,
    };
    match path {
        Some(p) => std::fs::write(&p, &bytes).map_err(|e| commands::CliError::Io(format!("{}: {e}", p.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(&bytes).and_then(|_| out.flush()).map_err(|e| commands::CliError::Io(e.to_string()))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("grasscond: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
