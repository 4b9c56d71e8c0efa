use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ebstop::harness::{self, repro, Entry, RunConfig};
use ebstop::Error;

#[derive(Parser)]
#[command(
    name = "ebstop",
    version,
    about = "Evidence-based early stopping experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration and write its training log.
    Run(RunArgs),
    /// Run several configurations on the same data and tabulate their stops.
    Compare {
        /// Config files (at least one).
        #[arg(long = "config", required = true)]
        configs: Vec<PathBuf>,
        #[command(flatten)]
        common: Overrides,
    },
    /// Check analytic gradients against central finite differences.
    Gradcheck {
        #[arg(long, default_value_t = 10)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the acceptance checks and print one line per check.
    Repro {
        /// Only these checks (1-11); all when omitted.
        #[arg(long = "only")]
        only: Vec<u8>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Log file; overrides the `output` key.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Overrides,
}

#[derive(Args)]
struct Overrides {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "max-steps")]
    max_steps: Option<usize>,
    /// Override any config key, e.g. `--set lr=0.05`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

const EXIT_USAGE: u8 = 2;
const EXIT_DIVERGENCE: u8 = 3;
const EXIT_IO: u8 = 4;

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Divergence { .. } => EXIT_DIVERGENCE,
        Error::Io(_) => EXIT_IO,
        _ => EXIT_USAGE,
    }
}

fn load(path: &Path, common: &Overrides) -> Result<RunConfig, Error> {
    let text = std::fs::read_to_string(path)?;
    let mut entries = harness::parse_entries(&text)?;
    let mut push = |key: &str, value: String| {
        entries.push(Entry {
            key: key.into(),
            value,
            line: 0,
        })
    };
    if let Some(seed) = common.seed {
        push("seed", seed.to_string());
    }
    if let Some(n) = common.max_steps {
        push("max_steps", n.to_string());
    }
    for s in &common.set {
        entries.push(harness::parse_override(s)?);
    }
    harness::build_config(&entries)
}

fn execute(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Run(args) => {
            let mut config = load(&args.config, &args.common)?;
            if args.out.is_some() {
                config.output = args.out;
            }
            let summary = harness::run(&config)?;
            print!("{}", harness::summary_text(&config, &summary));
            Ok(true)
        }
        Command::Compare { configs, common } => {
            let configs = configs
                .iter()
                .map(|p| load(p, &common))
                .collect::<Result<Vec<_>, _>>()?;
            let rows = harness::compare(&configs)?;
            print!("{}", harness::compare_table(&rows));
            Ok(true)
        }
        Command::Gradcheck { points, seed } => {
            let checks = repro::gradient_checks(points, seed)?;
            let mut ok = true;
            for (name, err) in checks {
                let pass = err <= repro::GRADCHECK_TOL;
                ok &= pass;
                println!(
                    "{:<14} max rel. error {err:.3e} {}",
                    name,
                    if pass { "ok" } else { "FAIL" }
                );
            }
            Ok(ok)
        }
        Command::Repro { only } => {
            let ids: Vec<u8> = if only.is_empty() {
                (1..=11).collect()
            } else {
                only
            };
            let mut ok = true;
            for id in ids {
                let outcome = repro::run_criterion(id);
                ok &= outcome.passed;
                println!("{}", outcome.line());
            }
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
