use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use difflab::selftest::{SelftestOptions, Suite, DEFAULT_CASES, DEFAULT_SEED};
use difflab_cli::{init_workers, reduce, run_file, selftest, status, Kind};

/// Difference-polynomial experiments over finite fields.
///
/// Worker threads come from DIFFLAB_WORKERS (default: all cores).
#[derive(Parser)]
#[command(name = "difflab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config, writing CSV and summary.json
    Run {
        config: PathBuf,
        /// Overrides the config seed
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a config as a Jacobi-bound experiment
    Jacobi {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the Frobenius reduction of a difference polynomial
    Reduce {
        poly: String,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
    },
    /// Run the embedded property suites
    Selftest {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_CASES)]
        cases: u64,
        /// Replay a single case (needs --case)
        #[arg(long, requires = "case")]
        suite: Option<String>,
        #[arg(long, requires = "suite")]
        case: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { status::INVALID as u8 } else { 0 });
        }
    };
    if let Err(e) = init_workers() {
        eprintln!("error: {e}");
        return ExitCode::from(e.status() as u8);
    }
    let (mut out, mut err) = (std::io::stdout(), std::io::stderr());
    let code = match cli.command {
        Command::Run { config, seed } => run_file(&config, seed, None, &mut out, &mut err),
        Command::Jacobi { config, seed } => run_file(&config, seed, Some(Kind::Jacobi), &mut out, &mut err),
        Command::Reduce { poly, p, q } => match reduce(&poly, p, q) {
            Ok(s) => {
                println!("{s}");
                status::PASS
            }
            Err(e) => {
                eprintln!("error: {e}");
                e.status()
            }
        },
        Command::Selftest { seed, cases, suite, case } => {
            let only = match (suite, case) {
                (Some(name), Some(k)) => match Suite::from_name(&name) {
                    Some(s) => Some((s, k)),
                    None => {
                        let names: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
                        eprintln!("error: unknown suite {name:?}; one of {}", names.join(", "));
                        return ExitCode::from(status::INVALID as u8);
                    }
                },
                _ => None,
            };
            let opts = SelftestOptions {
                seed,
                cases,
                ..Default::default()
            };
            selftest(&opts, only, &mut out)
        }
    };
    ExitCode::from(code as u8)
}
