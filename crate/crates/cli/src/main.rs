use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qdist_cli::{execute, prepare, write_outcome, Overrides, Task};

/// Entanglement-based distance estimation and the classifiers built on it.
#[derive(Parser)]
#[command(name = "qdist", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// JSON or TOML experiment config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Sample with this many shots per distance.
    #[arg(long, global = true, conflicts_with = "exact")]
    shots: Option<u64>,
    /// Use exact probabilities instead of sampling.
    #[arg(long, global = true)]
    exact: bool,
    /// Seed for all sampling (default 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Noise preset name, `none`, or path to a noise model file.
    #[arg(long, global = true, value_name = "PRESET|PATH")]
    noise: Option<String>,
    /// Output directory. Without it the summary goes to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write SVG plots (2-D data only).
    #[arg(long, global = true)]
    plot: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate one distance.
    Estimate {
        /// First vector, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        u: Option<Vec<f64>>,
        /// Second vector, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        v: Option<Vec<f64>>,
    },
    /// Assign vectors to the nearer of two references.
    Classify,
    /// Nearest-neighbor classification, optionally before/after adding training vectors.
    Nn,
    /// Unsupervised mean-distance clustering.
    Cluster,
    /// Run a built-in reproduction.
    Repro { which: Repro },
}

#[derive(Clone, Copy, ValueEnum)]
enum Repro {
    Fig2,
    Table1,
    Table2,
    Fig3,
    #[value(name = "figS1")]
    FigS1,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let (task, u, v) = match cli.command {
        Command::Estimate { u, v } => (Task::Estimate, u, v),
        Command::Classify => (Task::Classify, None, None),
        Command::Nn => (Task::Nn, None, None),
        Command::Cluster => (Task::Cluster, None, None),
        Command::Repro { which } => (
            match which {
                Repro::Fig2 => Task::Fig2,
                Repro::Table1 => Task::Table1,
                Repro::Table2 => Task::Table2,
                Repro::Fig3 => Task::Fig3,
                Repro::FigS1 => Task::FigS1,
            },
            None,
            None,
        ),
    };
    let c = cli.common;
    let overrides = Overrides {
        shots: c.shots,
        exact: c.exact,
        seed: c.seed,
        noise: c.noise,
        out: c.out,
        plot: c.plot,
        u,
        v,
    };
    let run = || -> qdist_cli::Result<()> {
        let cfg = prepare(task, c.config.as_deref(), &overrides)?;
        let outcome = execute(task, &cfg)?;
        match &cfg.output {
            Some(dir) => {
                for path in write_outcome(&outcome, dir, cfg.emit_plot)? {
                    eprintln!("wrote {}", path.display());
                }
            }
            None => print!("{}", outcome.summary),
        }
        Ok(())
    };
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
