use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use curio::compare::{compare, load_group};
use curio::config::{EnvKind, ExplorerKind, RunConfig};
use curio::replay::replay;
use curio::report::{allocation_table, runs_table};
use curio::run::{run_experiment, sweep};
use curio::Result;
use serde_json::{Map, Value};

#[derive(Parser)]
#[command(name = "curio", version, about = "Learning-progress exploration experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum)]
    env: Option<EnvKind>,
    #[arg(long, value_enum)]
    explorer: Option<ExplorerKind>,
    /// Total rollouts.
    #[arg(long)]
    budget: Option<u64>,
    /// JSON run config; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

impl RunArgs {
    fn overrides(&self, seed: Option<u64>) -> Map<String, Value> {
        let mut m = Map::new();
        if let Some(e) = self.env {
            m.insert("env".into(), e.as_str().into());
        }
        if let Some(e) = self.explorer {
            m.insert("explorer".into(), e.as_str().into());
        }
        if let Some(b) = self.budget {
            m.insert("budget".into(), b.into());
        }
        if let Some(s) = seed {
            m.insert("seed".into(), s.into());
        }
        m.insert("out".into(), self.out.display().to_string().into());
        m
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Table {
    Runs,
    Allocation,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its artifacts to --out.
    Run {
        #[command(flatten)]
        args: RunArgs,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run seeds 0..N-1 into --out/seed-<s>.
    Sweep {
        #[command(flatten)]
        args: RunArgs,
        #[arg(long)]
        seeds: u64,
    },
    /// Compare run groups (one directory per group) on a metric; prints JSON.
    Compare {
        /// coverage.<entity>, first_control.<entity>, best_reward, regions or allocation.<arm>.<quartile>
        #[arg(long)]
        metric: String,
        #[arg(required = true, num_args = 2..)]
        dirs: Vec<PathBuf>,
    },
    /// Re-execute a rollout log and check every outcome bit for bit.
    Replay {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Replay under a different seed than the config's.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print summary tables for every run under DIR as CSV.
    Report {
        dir: PathBuf,
        #[arg(long, value_enum, default_value = "runs")]
        table: Table,
    },
}

fn execute(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Run { args, seed } => {
            let cfg = RunConfig::load(args.config.as_deref(), args.overrides(seed))?;
            let outcome = run_experiment(&cfg)?;
            println!("{}", serde_json::to_string(&outcome.summary).expect("summary serializes"));
        }
        Command::Sweep { args, seeds } => {
            let mut overrides = args.overrides(Some(0));
            overrides.remove("out");
            let cfg = RunConfig::load(args.config.as_deref(), overrides)?;
            let summaries = sweep(&cfg, seeds, &args.out)?;
            eprintln!("{} runs written under {}", summaries.len(), args.out.display());
        }
        Command::Compare { metric, dirs } => {
            let groups =
                dirs.iter().map(|d| Ok((d.display().to_string(), load_group(d)?))).collect::<Result<Vec<_>>>()?;
            let report = compare(&groups, &metric)?;
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
        }
        Command::Replay { log, config, seed } => {
            let mut overrides = Map::new();
            if let Some(s) = seed {
                overrides.insert("seed".into(), s.into());
            }
            let cfg = RunConfig::load(Some(&config), overrides)?;
            let report = replay(&log, &cfg)?;
            match report.mismatch {
                None => println!("replay ok: {} rollouts match", report.rollouts),
                Some(t) => {
                    eprintln!("replay mismatch at tick {t}");
                    return Ok(ExitCode::FAILURE);
                }
            }
        }
        Command::Report { dir, table } => {
            let n = match table {
                Table::Runs => runs_table(&dir, io::stdout().lock())?,
                Table::Allocation => allocation_table(&dir, io::stdout().lock())?,
            };
            if n == 0 {
                return Err(curio::Error::Analysis(format!("no summary.json under {}", dir.display())));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
