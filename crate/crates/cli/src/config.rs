//! Experiment configuration: one JSON (or TOML) document, with command-line
//! flags layered on top.
//!
//! ```json
//! {
//!   "task": "classify",
//!   "vectors": [[0.5, 1.0], [1.2, 0.3]],
//!   "references": [{"label": "A", "vector": [1.5, 0.55]},
//!                  {"label": "B", "vector": [0.86, 2.35]}],
//!   "estimator": {"mode": "sampled", "shots": 1000, "seed": 7},
//!   "noise": "paper-2012-optics",
//!   "output": "out",
//!   "emit_plot": true
//! }
//! ```
//!
//! `vectors`, `references`, `training` and `training_added` take either an
//! inline value or a path to a `.json` / `.csv` file, resolved relative to
//! the config file.

use std::fmt;
use std::path::{Path, PathBuf};

use qdist_core::{EstimationMode, EstimatorConfig, Initialization, LabeledReference, NoiseModel, RealVector};
use serde::{Deserialize, Serialize};

use crate::datasets::PolarSampling;
use crate::error::{CliError, Result};
use crate::input;

pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Estimate,
    Classify,
    Nn,
    Cluster,
    Fig2,
    Table1,
    Table2,
    Fig3,
    #[serde(rename = "figS1")]
    FigS1,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Estimate => "estimate",
            Task::Classify => "classify",
            Task::Nn => "nn",
            Task::Cluster => "cluster",
            Task::Fig2 => "fig2",
            Task::Table1 => "table1",
            Task::Table2 => "table2",
            Task::Fig3 => "fig3",
            Task::FigS1 => "figS1",
        }
    }

    pub fn is_repro(self) -> bool {
        matches!(
            self,
            Task::Fig2 | Task::Table1 | Task::Table2 | Task::Fig3 | Task::FigS1
        )
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// A preset name (or `"none"`), or explicit model parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NoiseSpec {
    Preset(String),
    Model(NoiseModel),
}

impl NoiseSpec {
    pub fn resolve(&self) -> Result<Option<NoiseModel>> {
        match self {
            NoiseSpec::Preset(name) if name == "none" => Ok(None),
            NoiseSpec::Preset(name) => Ok(Some(NoiseModel::preset(name)?)),
            NoiseSpec::Model(m) => {
                m.validate()?;
                Ok(Some(*m))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VectorSource {
    Inline(Vec<Vec<f64>>),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReferenceSource {
    Inline(Vec<InlineReference>),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineReference {
    pub label: String,
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub task: Option<Task>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vectors: Option<VectorSource>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub references: Option<ReferenceSource>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub training: Option<ReferenceSource>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub training_added: Option<ReferenceSource>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub init: Option<Initialization>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    pub estimator: EstimatorSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSpec>,
    /// `output` and `emit_plot` only decide where results go, so they are
    /// never echoed into the results themselves.
    #[serde(skip_serializing)]
    pub output: Option<PathBuf>,
    #[serde(skip_serializing)]
    pub emit_plot: bool,
    #[serde(skip_serializing_if = "PolarSampling::is_default")]
    pub fig2: PolarSampling,
    /// Directory that relative input paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// Command-line overrides; `None` / `false` leaves the config untouched.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub shots: Option<u64>,
    pub exact: bool,
    pub seed: Option<u64>,
    pub noise: Option<String>,
    pub out: Option<PathBuf>,
    pub plot: bool,
    pub u: Option<Vec<f64>>,
    pub v: Option<Vec<f64>>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg = Self::parse(&text, path)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    /// TOML when the path ends in `.toml`, JSON otherwise.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let parse_err = |message: String| CliError::Parse {
            path: path.to_path_buf(),
            message,
        };
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml")) {
            toml::from_str(text).map_err(|e| parse_err(e.to_string()))
        } else {
            serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))
        }
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(shots) = o.shots {
            self.estimator.mode = Some(Mode::Sampled);
            self.estimator.shots = Some(shots);
        }
        if o.exact {
            self.estimator.mode = Some(Mode::Exact);
        }
        if let Some(seed) = o.seed {
            self.estimator.seed = Some(seed);
        }
        if let Some(noise) = &o.noise {
            self.noise = Some(noise_from_arg(noise)?);
        }
        if let Some(out) = &o.out {
            self.output = Some(out.clone());
        }
        if o.plot {
            self.emit_plot = true;
        }
        if let Some(u) = &o.u {
            self.u = Some(u.clone());
        }
        if let Some(v) = &o.v {
            self.v = Some(v.clone());
        }
        Ok(())
    }

    pub fn seed(&self) -> u64 {
        self.estimator.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn noise_model(&self) -> Result<Option<NoiseModel>> {
        self.noise.as_ref().map_or(Ok(None), NoiseSpec::resolve)
    }

    /// Estimator for the main computation. `default_sampled` gives the shot
    /// count and noise used when the config asks for neither mode nor shots.
    pub fn estimator(&self, default_sampled: Option<(u64, NoiseModel)>) -> Result<EstimatorConfig> {
        let default_shots = default_sampled.map(|(s, _)| s);
        let mode = match (self.estimator.mode, self.estimator.shots.or(default_shots)) {
            (Some(Mode::Exact), _) | (None, None) => EstimationMode::Exact,
            (_, Some(shots)) => EstimationMode::Sampled { shots },
            (Some(Mode::Sampled), None) => {
                return Err(CliError::Config("sampled mode needs estimator.shots".into()))
            }
        };
        let noise = match (&self.noise, mode, default_sampled) {
            (Some(_), _, _) => self.noise_model()?,
            (None, EstimationMode::Sampled { .. }, Some((_, n))) => Some(n),
            _ => None,
        };
        let cfg = EstimatorConfig {
            mode,
            seed: self.seed(),
            noise,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn resolve_path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn load_vectors(&self) -> Result<Option<Vec<RealVector>>> {
        match &self.vectors {
            None => Ok(None),
            Some(VectorSource::Inline(rows)) => input::vectors_from_rows(rows.clone()).map(Some),
            Some(VectorSource::File(p)) => input::read_vectors(&self.resolve_path(p)).map(Some),
        }
    }

    pub fn load_references(&self, src: &Option<ReferenceSource>) -> Result<Option<Vec<LabeledReference>>> {
        match src {
            None => Ok(None),
            Some(ReferenceSource::Inline(refs)) => refs
                .iter()
                .map(|r| input::labeled(&r.label, r.vector.clone()))
                .collect::<Result<Vec<_>>>()
                .map(Some),
            Some(ReferenceSource::File(p)) => input::read_references(&self.resolve_path(p)).map(Some),
        }
    }
}

/// `--noise` takes a preset name, `none`, or a path to a JSON/TOML model.
pub fn noise_from_arg(arg: &str) -> Result<NoiseSpec> {
    if arg == "none" || NoiseModel::preset(arg).is_ok() {
        return Ok(NoiseSpec::Preset(arg.to_owned()));
    }
    let path = Path::new(arg);
    if !path.exists() {
        return Err(CliError::Config(format!(
            "'{arg}' is neither a noise preset nor an existing file"
        )));
    }
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let parse_err = |message: String| CliError::Parse {
        path: path.to_path_buf(),
        message,
    };
    let model: NoiseModel = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml")) {
        toml::from_str(&text).map_err(|e| parse_err(e.to_string()))?
    } else {
        serde_json::from_str(&text).map_err(|e| parse_err(e.to_string()))?
    };
    model.validate()?;
    Ok(NoiseSpec::Model(model))
}
