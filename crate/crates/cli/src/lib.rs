//! Front end for the `qdist` binary: configuration, built-in datasets,
//! experiment runners and result files.

pub mod config;
pub mod datasets;
pub mod error;
pub mod input;
pub mod output;
pub mod runners;
pub mod svg;

use std::path::{Path, PathBuf};

pub use config::{ExperimentConfig, Overrides, Task};
pub use error::{CliError, Result};
use output::Metadata;
use runners::Report;

/// Rendered results of one run, before anything touches the disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub task: Task,
    pub metadata: Metadata,
    pub csv: String,
    pub summary: String,
    pub plots: Vec<(String, String)>,
}

/// Loads the config (if any), checks it agrees with the command, and
/// applies command-line overrides.
pub fn prepare(task: Task, config_path: Option<&Path>, overrides: &Overrides) -> Result<ExperimentConfig> {
    let mut cfg = match config_path {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    match cfg.task {
        Some(t) if t != task => {
            return Err(CliError::Config(format!(
                "config is for task '{t}' but the command runs '{task}'"
            )))
        }
        _ => cfg.task = Some(task),
    }
    cfg.apply(overrides)?;
    Ok(cfg)
}

fn render(task: Task, cfg: &ExperimentConfig, report: &dyn Report) -> Result<Outcome> {
    let config = serde_json::to_value(cfg).expect("config serializes");
    let metadata = Metadata::new(task.name(), cfg.seed(), config);
    Ok(Outcome {
        task,
        csv: output::render_csv(&metadata, &report.table())?,
        summary: output::render_summary(&metadata, report.summary()),
        plots: report.plots(),
        metadata,
    })
}

pub fn execute(task: Task, cfg: &ExperimentConfig) -> Result<Outcome> {
    use runners::*;
    match task {
        Task::Estimate => render(task, cfg, &run_estimate(cfg)?),
        Task::Classify => render(task, cfg, &run_classify(cfg)?),
        Task::Nn => render(task, cfg, &run_nn_task(cfg)?),
        Task::Cluster => render(task, cfg, &run_cluster_task(cfg)?),
        Task::Fig2 => render(task, cfg, &run_fig2(cfg)?),
        Task::Table1 => render(task, cfg, &run_table_repro(&datasets::TABLE1, cfg)?),
        Task::Table2 => render(task, cfg, &run_table_repro(&datasets::TABLE2, cfg)?),
        Task::Fig3 => render(task, cfg, &run_cluster_demo(cfg)?),
        Task::FigS1 => render(task, cfg, &run_nn_demo(cfg)?),
    }
}

/// Writes `results.csv`, `summary.json` and, if asked, the plots.
pub fn write_outcome(outcome: &Outcome, dir: &Path, emit_plot: bool) -> Result<Vec<PathBuf>> {
    let mut written = vec![
        output::write_file(dir, "results.csv", &outcome.csv)?,
        output::write_file(dir, "summary.json", &outcome.summary)?,
    ];
    if emit_plot {
        for (name, body) in &outcome.plots {
            written.push(output::write_file(dir, name, body)?);
        }
    }
    Ok(written)
}
