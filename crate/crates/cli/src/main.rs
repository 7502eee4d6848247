use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lkt_cli::bench::{self, BenchConfig};
use lkt_cli::commands::{self, CliError, EngineKind};
use lkt_core::timing::Timing;
use lkt_core::Policy;

const STACK_BYTES: usize = 1 << 30;
const DEFAULT_FAMILIES: &str = "linear,linear_cut,linear_acnf,square_diagonal,square_cut";

#[derive(Parser)]
#[command(name = "lkt", version, about = "Proof terms for the sequent calculus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Type-check a proof document.
    Check { file: Option<PathBuf> },
    /// Eliminate cuts.
    Normalize {
        file: Option<PathBuf>,
        #[arg(long, default_value = "full")]
        policy: Policy,
        /// Maximal number of reduction steps.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, default_value = "lkt")]
        engine: EngineKind,
    },
    /// Unfold inductions at numerals and normalize until none remain.
    Indelim {
        file: Option<PathBuf>,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Replace equational inferences on compound formulas by atomic ones.
    Atomize { file: Option<PathBuf> },
    /// Print the Herbrand sequent of a proof with quantifier-free cuts.
    Herbrand { file: Option<PathBuf> },
    /// Print a generated proof; the family `random` takes the depth as `n`.
    Gen {
        family: String,
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Time engines over families and write CSV.
    Bench {
        /// Comma-separated family names.
        #[arg(long, default_value = DEFAULT_FAMILIES)]
        families: String,
        #[arg(long, default_value = "0..8", value_parser = commands::parse_range)]
        n: std::ops::RangeInclusive<usize>,
        /// Comma-separated engine names.
        #[arg(long, default_value = "lkt-full,lkt-atomic,lkt-qfree,tree")]
        engines: String,
        #[arg(long, default_value_t = 3)]
        warmup: usize,
        #[arg(long, default_value_t = 5)]
        runs: usize,
        /// Step budget of one run.
        #[arg(long, default_value_t = 50_000_000)]
        budget: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the tree engine with the evaluator on equality-free families.
    Diff {
        /// Comma-separated family names.
        #[arg(long, default_value = DEFAULT_FAMILIES)]
        families: String,
        #[arg(long, default_value = "0..6", value_parser = commands::parse_range)]
        n: std::ops::RangeInclusive<usize>,
        #[arg(long)]
        budget: Option<u64>,
    },
}

fn input(file: &Option<PathBuf>) -> Result<String, CliError> {
    match file {
        Some(p) if p.as_os_str() != "-" => Ok(std::fs::read_to_string(p)?),
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Check { file } => commands::cmd_check(&input(&file)?),
        Command::Normalize {
            file,
            policy,
            budget,
            engine,
        } => commands::cmd_normalize(&input(&file)?, policy, budget, engine),
        Command::Indelim { file, budget } => commands::cmd_indelim(&input(&file)?, budget),
        Command::Atomize { file } => commands::cmd_atomize(&input(&file)?),
        Command::Herbrand { file } => commands::cmd_herbrand(&input(&file)?),
        Command::Gen { family, n, seed } => commands::cmd_gen(&family, n, seed),
        Command::Bench {
            families,
            n,
            engines,
            warmup,
            runs,
            budget,
            out,
        } => {
            let config = BenchConfig {
                families: commands::parse_families(&families).map_err(CliError::Usage)?,
                ns: n,
                engines: bench::parse_engines(&engines).map_err(CliError::Usage)?,
                timing: Timing::new(warmup, runs),
                budget: Some(budget),
            };
            let records = bench::run(&config, |r| eprintln!("{}", r.csv_row()));
            let csv = bench::to_csv(&records);
            match out {
                Some(path) => {
                    std::fs::write(path, csv)?;
                    Ok(String::new())
                }
                None => Ok(csv),
            }
        }
        Command::Diff { families, n, budget } => {
            let families = commands::parse_families(&families).map_err(CliError::Usage)?;
            commands::cmd_diff(&families, n, budget)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let worker = std::thread::Builder::new()
        .stack_size(STACK_BYTES)
        .spawn(move || run(cli))
        .expect("spawn worker thread");
    match worker.join().expect("worker thread panicked") {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            if let CliError::Rejected { report, .. } = &e {
                print!("{report}");
            }
            eprintln!("{}", e.machine_line());
            ExitCode::FAILURE
        }
    }
}
