//! Experiment runners. Each returns a typed report; [`Report`] turns it
//! into the CSV table, summary body and plots that get written.

use std::collections::BTreeSet;

use qdist_core::ml::DEFAULT_MAX_ITERATIONS;
use qdist_core::{
    classify_two_cluster, estimate_distance, nearest_neighbor_classify, unsupervised_cluster,
    ClassificationResult, ClusteringState, DistanceEstimate, DistanceQuery, EstimatorConfig,
    Initialization, LabeledReference, NoiseModel, RealVector, PAPER_OPTICS_PRESET,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::datasets::{self, TableDataset};
use crate::error::{CliError, Result};
use crate::output::{num, opt_num, vector_cell, CsvTable};
use crate::svg;

pub trait Report {
    fn table(&self) -> CsvTable;
    fn summary(&self) -> Value;
    /// `(file name, svg)` pairs, only produced for 2-D data.
    fn plots(&self) -> Vec<(String, String)> {
        Vec::new()
    }
}

fn preset() -> NoiseModel {
    NoiseModel::preset(PAPER_OPTICS_PRESET).expect("built-in preset")
}

fn labels(c: &ClassificationResult) -> &str {
    c.assigned_label.as_str()
}

fn require_2d(vs: &[RealVector], what: &str) -> Result<()> {
    match vs.iter().find(|v| v.dim() != 2) {
        Some(v) => Err(CliError::Config(format!("{what} must be 2-dimensional, got dimension {}", v.dim()))),
        None => Ok(()),
    }
}

fn xy(v: &RealVector) -> [f64; 2] {
    [v.components()[0], v.components()[1]]
}

/// Nearest-rank percentile of `values` (`q` in (0, 1]).
pub fn percentile_nearest_rank(values: &[f64], q: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

/// Two decimals, compared the way a printed table is read.
pub fn rounds_to(value: f64, printed: f64) -> bool {
    (value * 100.0).round() == (printed * 100.0).round()
}

// ---------------------------------------------------------------- estimate

#[derive(Debug, Clone, Serialize)]
pub struct EstimateReport {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub estimator: EstimatorConfig,
    pub estimate: DistanceEstimate,
    /// Classical `u·v`, for comparison with `estimate.raw_inner_product`.
    pub dot: f64,
}

pub fn run_estimate(cfg: &ExperimentConfig) -> Result<EstimateReport> {
    let (Some(u), Some(v)) = (&cfg.u, &cfg.v) else {
        return Err(CliError::Config("estimate needs both u and v".into()));
    };
    let (ur, vr) = (RealVector::new(u.clone())?, RealVector::new(v.clone())?);
    let estimator = cfg.estimator(None)?;
    let q = DistanceQuery::new(ur.clone(), vr.clone())?;
    let estimate = estimate_distance(&q, &estimator)?;
    Ok(EstimateReport {
        u: u.clone(),
        v: v.clone(),
        estimator,
        estimate,
        dot: ur.dot(&vr)?,
    })
}

impl Report for EstimateReport {
    fn table(&self) -> CsvTable {
        let mut t = CsvTable::new(&[
            "u", "v", "p_hat", "p_ideal", "distance", "inner_product", "raw_inner_product", "dot",
            "inner_product_out_of_range", "shots_used", "std_error_p",
        ]);
        let e = &self.estimate;
        t.push(vec![
            vector_cell(&self.u),
            vector_cell(&self.v),
            num(e.p_hat),
            num(e.p_ideal),
            num(e.distance),
            num(e.inner_product),
            num(e.raw_inner_product),
            num(self.dot),
            e.inner_product_out_of_range.to_string(),
            e.shots_used.to_string(),
            num(e.std_error_p),
        ]);
        t
    }

    fn summary(&self) -> Value {
        let mut v = serde_json::to_value(&self.estimate).expect("estimate serializes");
        v["dot"] = json!(self.dot);
        v["estimator"] = json!(self.estimator);
        v
    }
}

// ------------------------------------------------------------------ tables

#[derive(Debug, Clone, Serialize)]
pub struct TableRowResult {
    pub index: usize,
    pub vector: Vec<f64>,
    pub theory_diff: f64,
    pub computed_diff: f64,
    pub group: String,
    pub matches_paper_theory: bool,
    pub paper_group: String,
    pub paper_experimental_diff: f64,
    /// Some vector within ±0.005 of the printed components reaches the
    /// printed theory value.
    pub within_rounding_box: bool,
    pub model_diff: Option<f64>,
    pub model_group: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableReport {
    pub name: String,
    /// `None` when only the exact column was requested.
    pub model: Option<EstimatorConfig>,
    pub rows: Vec<TableRowResult>,
}

impl TableReport {
    pub fn mismatched_rows(&self) -> Vec<usize> {
        self.rows.iter().filter(|r| !r.matches_paper_theory).map(|r| r.index).collect()
    }
}

fn diff_exact(u: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let d = |x: &[f64]| u.iter().zip(x).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
    d(a) - d(b)
}

/// Range of `D_A − D_B` over the box `center ± half` by projected gradient
/// from the linearized extreme corners.
pub fn diff_range_over_box(center: &[f64], half: f64, a: &[f64], b: &[f64]) -> (f64, f64) {
    let grad = |u: &[f64]| -> Vec<f64> {
        let norm = |x: &[f64]| u.iter().zip(x).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt().max(1e-15);
        let (na, nb) = (norm(a), norm(b));
        (0..u.len()).map(|i| (u[i] - a[i]) / na - (u[i] - b[i]) / nb).collect()
    };
    let clamp = |x: f64, i: usize| x.clamp(center[i] - half, center[i] + half);
    let extreme = |sign: f64| {
        let g = grad(center);
        let mut u: Vec<f64> = (0..center.len()).map(|i| clamp(center[i] + sign * half * g[i].signum(), i)).collect();
        for _ in 0..200 {
            let g = grad(&u);
            u = (0..u.len()).map(|i| clamp(u[i] + sign * 1e-4 * g[i], i)).collect();
        }
        diff_exact(&u, a, b)
    };
    let (lo, hi) = (extreme(-1.0), extreme(1.0));
    let c = diff_exact(center, a, b);
    (lo.min(c), hi.max(c))
}

pub fn run_table_repro(dataset: &TableDataset, cfg: &ExperimentConfig) -> Result<TableReport> {
    let est = cfg.estimator(Some((dataset.shots, preset())))?;
    let model = (!est.is_exact() || est.noise.is_some()).then_some(est);
    let ra = LabeledReference::new("A", RealVector::new(dataset.reference_a.to_vec())?)?;
    let rb = LabeledReference::new("B", RealVector::new(dataset.reference_b.to_vec())?)?;
    let mut rows = Vec::with_capacity(dataset.rows.len());
    for (i, row) in dataset.rows.iter().enumerate() {
        let u = RealVector::new(row.vector.to_vec())?;
        let exact = classify_two_cluster(&u, &ra, &rb, &EstimatorConfig::exact())?;
        let modeled = model
            .map(|m| classify_two_cluster(&u, &ra, &rb, &m.for_stream(i as u64)))
            .transpose()?;
        let (lo, hi) = diff_range_over_box(row.vector, 0.005, dataset.reference_a, dataset.reference_b);
        rows.push(TableRowResult {
            index: i + 1,
            vector: row.vector.to_vec(),
            theory_diff: row.theory_diff,
            computed_diff: exact.margin,
            group: labels(&exact).to_owned(),
            matches_paper_theory: rounds_to(exact.margin, row.theory_diff),
            paper_group: row.group.to_owned(),
            paper_experimental_diff: row.experimental_diff,
            within_rounding_box: lo <= row.theory_diff + 0.005 && hi >= row.theory_diff - 0.005,
            model_diff: modeled.as_ref().map(|c| c.margin),
            model_group: modeled.as_ref().map(|c| labels(c).to_owned()),
        });
    }
    Ok(TableReport {
        name: dataset.name.to_owned(),
        model,
        rows,
    })
}

impl Report for TableReport {
    fn table(&self) -> CsvTable {
        let mut header = vec![
            "index", "vector", "theory_diff", "computed_diff", "group", "matches_paper_theory",
            "paper_group", "paper_experimental_diff", "within_rounding_box",
        ];
        if self.model.is_some() {
            header.extend(["model_diff", "model_group"]);
        }
        let mut t = CsvTable::new(&header);
        for r in &self.rows {
            let comps: Vec<String> = r.vector.iter().map(|x| format!("{x:.2}")).collect();
            let mut cells = vec![
                r.index.to_string(),
                format!("({})", comps.join("; ")),
                format!("{:.2}", r.theory_diff),
                num(r.computed_diff),
                r.group.clone(),
                r.matches_paper_theory.to_string(),
                r.paper_group.clone(),
                format!("{:.2}", r.paper_experimental_diff),
                r.within_rounding_box.to_string(),
            ];
            if self.model.is_some() {
                cells.push(opt_num(r.model_diff));
                cells.push(r.model_group.clone().unwrap_or_default());
            }
            t.push(cells);
        }
        t
    }

    fn summary(&self) -> Value {
        let model_vs_exact: Vec<usize> = self
            .rows
            .iter()
            .filter(|r| r.model_group.as_deref().is_some_and(|g| g != r.group))
            .map(|r| r.index)
            .collect();
        json!({
            "dataset": self.name,
            "rows": self.rows.len(),
            "theory_matches": self.rows.iter().filter(|r| r.matches_paper_theory).count(),
            "theory_mismatched_rows": self.mismatched_rows(),
            "mismatched_rows_within_rounding_box": self.rows.iter()
                .filter(|r| !r.matches_paper_theory && r.within_rounding_box)
                .map(|r| r.index).collect::<Vec<_>>(),
            "exact_group_disagrees_with_paper": self.rows.iter()
                .filter(|r| r.group != r.paper_group).map(|r| r.index).collect::<Vec<_>>(),
            "model": self.model,
            "model_group_differs_from_exact": self.model.map(|_| model_vs_exact),
            "results": self.rows,
        })
    }
}

// -------------------------------------------------------------------- fig2

#[derive(Debug, Clone, Serialize)]
pub struct Fig2Point {
    pub index: usize,
    pub vector: [f64; 2],
    pub radius: f64,
    pub angle_deg: f64,
    pub oracle_diff: f64,
    pub exact_diff: f64,
    pub exact_group: String,
    pub model_diff: Option<f64>,
    pub model_group: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundaryCheck {
    pub misclassified: Vec<usize>,
    /// 90th percentile (nearest rank) of `|model diff − exact diff|`.
    pub p90_abs_error: f64,
    /// Largest exact `|D_A − D_B|` among the misclassified vectors.
    pub max_misclassified_abs_diff: Option<f64>,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig2Report {
    pub references: [[f64; 2]; 2],
    pub reference_margins: [f64; 2],
    pub reference_groups: [String; 2],
    pub model: Option<EstimatorConfig>,
    pub points: Vec<Fig2Point>,
    pub exact_oracle_disagreements: Vec<usize>,
    pub boundary: Option<BoundaryCheck>,
}

pub fn boundary_check(points: &[Fig2Point]) -> Option<BoundaryCheck> {
    let errors: Vec<f64> = points
        .iter()
        .map(|p| Some((p.model_diff? - p.exact_diff).abs()))
        .collect::<Option<_>>()?;
    let p90 = percentile_nearest_rank(&errors, 0.9);
    let misclassified: Vec<&Fig2Point> = points
        .iter()
        .filter(|p| p.model_group.as_deref() != Some(p.exact_group.as_str()))
        .collect();
    let max_abs = misclassified.iter().map(|p| p.exact_diff.abs()).reduce(f64::max);
    Some(BoundaryCheck {
        misclassified: misclassified.iter().map(|p| p.index).collect(),
        p90_abs_error: p90,
        max_misclassified_abs_diff: max_abs,
        holds: misclassified.iter().all(|p| p.exact_diff.abs() < p90),
    })
}

pub fn run_fig2(cfg: &ExperimentConfig) -> Result<Fig2Report> {
    cfg.fig2.validate().map_err(CliError::Config)?;
    let vectors = match cfg.load_vectors()? {
        Some(v) => v,
        None => cfg.fig2.generate(),
    };
    require_2d(&vectors, "fig2 vectors")?;
    let (ra, rb) = match cfg.load_references(&cfg.references)? {
        Some(r) if r.len() == 2 => (r[0].clone(), r[1].clone()),
        Some(r) => return Err(CliError::Config(format!("fig2 needs exactly 2 references, got {}", r.len()))),
        None => datasets::fig2_references(),
    };
    require_2d(&[ra.vector.clone(), rb.vector.clone()], "fig2 references")?;
    let est = cfg.estimator(Some((datasets::FIG2_SHOTS, preset())))?;
    let model = (!est.is_exact() || est.noise.is_some()).then_some(est);
    let exact_cfg = EstimatorConfig::exact();

    let mut points = Vec::with_capacity(vectors.len());
    for (i, u) in vectors.iter().enumerate() {
        let exact = classify_two_cluster(u, &ra, &rb, &exact_cfg)?;
        let modeled = model
            .map(|m| classify_two_cluster(u, &ra, &rb, &m.for_stream(i as u64)))
            .transpose()?;
        let [x, y] = xy(u);
        points.push(Fig2Point {
            index: i,
            vector: [x, y],
            radius: x.hypot(y),
            angle_deg: y.atan2(x).to_degrees(),
            oracle_diff: u.euclidean_distance(&ra.vector)? - u.euclidean_distance(&rb.vector)?,
            exact_diff: exact.margin,
            exact_group: labels(&exact).to_owned(),
            model_diff: modeled.as_ref().map(|c| c.margin),
            model_group: modeled.as_ref().map(|c| labels(c).to_owned()),
        });
    }
    let exact_oracle_disagreements = points
        .iter()
        .filter(|p| {
            let oracle = if p.oracle_diff < 0.0 { ra.label.as_str() } else { rb.label.as_str() };
            p.oracle_diff.abs() > qdist_core::ml::BOUNDARY_TOLERANCE && p.exact_group != oracle
        })
        .map(|p| p.index)
        .collect();
    let self_a = classify_two_cluster(&ra.vector, &ra, &rb, &exact_cfg)?;
    let self_b = classify_two_cluster(&rb.vector, &ra, &rb, &exact_cfg)?;
    let boundary = boundary_check(&points);
    Ok(Fig2Report {
        references: [xy(&ra.vector), xy(&rb.vector)],
        reference_margins: [self_a.margin, self_b.margin],
        reference_groups: [labels(&self_a).to_owned(), labels(&self_b).to_owned()],
        model,
        points,
        exact_oracle_disagreements,
        boundary,
    })
}

impl Report for Fig2Report {
    fn table(&self) -> CsvTable {
        let mut header = vec![
            "index", "x", "y", "radius", "angle_deg", "oracle_diff", "exact_diff", "exact_group",
        ];
        if self.model.is_some() {
            header.extend(["model_diff", "model_group", "misclassified"]);
        }
        let mut t = CsvTable::new(&header);
        for p in &self.points {
            let mut cells = vec![
                p.index.to_string(),
                num(p.vector[0]),
                num(p.vector[1]),
                num(p.radius),
                num(p.angle_deg),
                num(p.oracle_diff),
                num(p.exact_diff),
                p.exact_group.clone(),
            ];
            if self.model.is_some() {
                cells.push(opt_num(p.model_diff));
                cells.push(p.model_group.clone().unwrap_or_default());
                cells.push((p.model_group.as_deref() != Some(p.exact_group.as_str())).to_string());
            }
            t.push(cells);
        }
        t
    }

    fn summary(&self) -> Value {
        json!({
            "points": self.points.len(),
            "references": self.references,
            "reference_margins": self.reference_margins,
            "reference_groups": self.reference_groups,
            "exact_oracle_disagreements": self.exact_oracle_disagreements,
            "model": self.model,
            "boundary": self.boundary,
        })
    }

    fn plots(&self) -> Vec<(String, String)> {
        let r_max = self
            .points
            .iter()
            .map(|p| p.radius)
            .chain(self.references.iter().map(|r| r[0].hypot(r[1])))
            .fold(0.0f64, f64::max);
        let r_max = (r_max * 2.0).ceil() / 2.0;
        let scale = self.points.iter().map(|p| p.exact_diff.abs()).fold(1e-12, f64::max);
        let group = |g: &str| usize::from(g != "A");
        let exact: Vec<svg::PolarPoint> = self
            .points
            .iter()
            .map(|p| svg::PolarPoint {
                xy: p.vector,
                value: p.exact_diff,
                group: group(&p.exact_group),
            })
            .collect();
        let mut panels = vec![svg::PolarPanel {
            title: "exact",
            points: &exact,
            references: &self.references,
            r_max,
            value_scale: scale,
        }];
        let modeled: Vec<svg::PolarPoint>;
        let title;
        if let Some(m) = &self.model {
            modeled = self
                .points
                .iter()
                .map(|p| svg::PolarPoint {
                    xy: p.vector,
                    value: p.model_diff.unwrap_or(0.0),
                    group: group(p.model_group.as_deref().unwrap_or("A")),
                })
                .collect();
            title = match m.mode {
                qdist_core::EstimationMode::Sampled { shots } => format!("sampled, {shots} shots"),
                qdist_core::EstimationMode::Exact => "noisy".to_owned(),
            };
            panels.push(svg::PolarPanel {
                title: &title,
                points: &modeled,
                references: &self.references,
                r_max,
                value_scale: scale,
            });
        }
        vec![("plot.svg".to_owned(), svg::polar_panels(&panels))]
    }
}

// ---------------------------------------------------------- classify (generic)

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyReport {
    pub references: Vec<LabeledReference>,
    pub estimator: EstimatorConfig,
    pub vectors: Vec<RealVector>,
    pub results: Vec<ClassificationResult>,
}

pub fn run_classify(cfg: &ExperimentConfig) -> Result<ClassifyReport> {
    let vectors = cfg
        .load_vectors()?
        .ok_or_else(|| CliError::Config("classify needs vectors".into()))?;
    let refs = cfg
        .load_references(&cfg.references)?
        .ok_or_else(|| CliError::Config("classify needs references".into()))?;
    if refs.len() != 2 {
        return Err(CliError::Config(format!("classify needs exactly 2 references, got {}", refs.len())));
    }
    let estimator = cfg.estimator(None)?;
    let results = vectors
        .iter()
        .enumerate()
        .map(|(i, u)| classify_two_cluster(u, &refs[0], &refs[1], &estimator.for_stream(i as u64)))
        .collect::<qdist_core::Result<Vec<_>>>()?;
    Ok(ClassifyReport {
        references: refs,
        estimator,
        vectors,
        results,
    })
}

impl Report for ClassifyReport {
    fn table(&self) -> CsvTable {
        let mut t = CsvTable::new(&["index", "vector", "distance_a", "distance_b", "margin", "group", "boundary_flag"]);
        for (i, (v, r)) in self.vectors.iter().zip(&self.results).enumerate() {
            t.push(vec![
                i.to_string(),
                vector_cell(v.components()),
                num(r.reference_distances[0]),
                num(r.reference_distances[1]),
                num(r.margin),
                labels(r).to_owned(),
                r.boundary_flag.to_string(),
            ]);
        }
        t
    }

    fn summary(&self) -> Value {
        let mut counts = std::collections::BTreeMap::new();
        for r in &self.results {
            *counts.entry(labels(r).to_owned()).or_insert(0usize) += 1;
        }
        json!({
            "references": self.references,
            "estimator": self.estimator,
            "counts": counts,
            "boundary_flagged": self.results.iter().enumerate()
                .filter(|(_, r)| r.boundary_flag).map(|(i, _)| i).collect::<Vec<_>>(),
        })
    }

    fn plots(&self) -> Vec<(String, String)> {
        if self.vectors.iter().chain(self.references.iter().map(|r| &r.vector)).any(|v| v.dim() != 2) {
            return Vec::new();
        }
        let names: Vec<String> = self.references.iter().map(|r| r.label.to_string()).collect();
        let idx: Vec<String> = (0..self.vectors.len()).map(|i| i.to_string()).collect();
        let pts: Vec<svg::ScatterPoint> = self
            .vectors
            .iter()
            .zip(&self.results)
            .zip(&idx)
            .map(|((v, r), name)| svg::ScatterPoint {
                xy: xy(v),
                group: r.nearest_index,
                name,
            })
            .collect();
        let frame: Vec<[f64; 2]> = self
            .vectors
            .iter()
            .chain(self.references.iter().map(|r| &r.vector))
            .map(xy)
            .collect();
        vec![("plot.svg".to_owned(), svg::scatter("two-cluster classification", &frame, &pts, &names))]
    }
}

// ----------------------------------------------------------------- cluster

#[derive(Debug, Clone, Serialize)]
pub struct ClusterReport {
    pub names: Vec<String>,
    pub vectors: Vec<RealVector>,
    pub group_names: Vec<String>,
    pub estimator: EstimatorConfig,
    pub state: ClusteringState,
}

pub struct ClusterInput {
    pub names: Vec<String>,
    pub vectors: Vec<RealVector>,
    pub group_names: Vec<String>,
    pub init: Initialization,
}

pub fn run_cluster(input: ClusterInput, cfg: &ExperimentConfig) -> Result<ClusterReport> {
    let estimator = cfg.estimator(None)?;
    let k = input.group_names.len();
    let max_iterations = cfg.max_iterations.unwrap_or(DEFAULT_MAX_ITERATIONS);
    let state = unsupervised_cluster(&input.vectors, k, &input.init, &estimator, max_iterations)?;
    Ok(ClusterReport {
        names: input.names,
        vectors: input.vectors,
        group_names: input.group_names,
        estimator,
        state,
    })
}

pub fn run_cluster_demo(cfg: &ExperimentConfig) -> Result<ClusterReport> {
    let demo = datasets::cluster_demo();
    let init = cfg.init.clone().unwrap_or(Initialization::Labels(demo.initial_labels));
    let input = ClusterInput {
        names: demo.names,
        vectors: demo
            .points
            .iter()
            .map(|p| RealVector::new(p.to_vec()))
            .collect::<qdist_core::Result<_>>()?,
        group_names: demo.group_names,
        init,
    };
    run_cluster(input, cfg)
}

pub fn run_cluster_task(cfg: &ExperimentConfig) -> Result<ClusterReport> {
    let vectors = cfg
        .load_vectors()?
        .ok_or_else(|| CliError::Config("cluster needs vectors".into()))?;
    let k = cfg.k.unwrap_or(2);
    let input = ClusterInput {
        names: (0..vectors.len()).map(|i| i.to_string()).collect(),
        vectors,
        group_names: (0..k).map(|g| format!("group {g}")).collect(),
        init: cfg.init.clone().unwrap_or(Initialization::Random { seed: cfg.seed() }),
    };
    run_cluster(input, cfg)
}

impl Report for ClusterReport {
    fn table(&self) -> CsvTable {
        let mut t = CsvTable::new(&["index", "name", "vector", "initial_group", "final_group", "flipped_in_rounds"]);
        let s = &self.state;
        for (i, (name, v)) in self.names.iter().zip(&self.vectors).enumerate() {
            let rounds: Vec<String> = s
                .rounds
                .iter()
                .enumerate()
                .filter(|(_, r)| r.flipped.contains(&i))
                .map(|(n, _)| (n + 1).to_string())
                .collect();
            t.push(vec![
                i.to_string(),
                name.clone(),
                vector_cell(v.components()),
                self.group_names[s.history[0][i]].clone(),
                self.group_names[s.labels[i]].clone(),
                rounds.join(" "),
            ]);
        }
        t
    }

    fn summary(&self) -> Value {
        let s = &self.state;
        let named = |ls: &[usize]| -> Vec<String> { ls.iter().map(|&g| self.group_names[g].clone()).collect() };
        json!({
            "names": self.names,
            "group_names": self.group_names,
            "estimator": self.estimator,
            "converged": s.converged,
            "stop_reason": s.stop_reason,
            "iterations": s.iteration,
            "flips_per_round": s.flips_per_round(),
            "final_labels": named(&s.labels),
            "history": s.history.iter().map(|h| named(h)).collect::<Vec<_>>(),
            "rounds": s.rounds,
        })
    }

    fn plots(&self) -> Vec<(String, String)> {
        if self.vectors.iter().any(|v| v.dim() != 2) {
            return Vec::new();
        }
        let frame: Vec<[f64; 2]> = self.vectors.iter().map(xy).collect();
        self.state
            .history
            .iter()
            .enumerate()
            .map(|(round, labels)| {
                let pts: Vec<svg::ScatterPoint> = self
                    .vectors
                    .iter()
                    .zip(labels)
                    .zip(&self.names)
                    .map(|((v, &g), name)| svg::ScatterPoint { xy: xy(v), group: g, name })
                    .collect();
                let title = if round == 0 { "initial".to_owned() } else { format!("after round {round}") };
                (
                    format!("round_{round}.svg"),
                    svg::scatter(&title, &frame, &pts, &self.group_names),
                )
            })
            .collect()
    }
}

// ---------------------------------------------------------------------- nn

#[derive(Debug, Clone, Serialize)]
pub struct NamedReference {
    pub name: String,
    pub reference: LabeledReference,
}

#[derive(Debug, Clone, Serialize)]
pub struct NnReport {
    pub estimator: EstimatorConfig,
    pub training: Vec<NamedReference>,
    pub added: Vec<NamedReference>,
    pub test_names: Vec<String>,
    pub tests: Vec<RealVector>,
    pub before: Vec<ClassificationResult>,
    /// Empty when no vectors were added.
    pub after: Vec<ClassificationResult>,
}

impl NnReport {
    pub fn flipped(&self) -> Vec<usize> {
        self.before
            .iter()
            .zip(&self.after)
            .enumerate()
            .filter(|(_, (b, a))| b.assigned_label != a.assigned_label)
            .map(|(i, _)| i)
            .collect()
    }

    fn label_names(&self) -> Vec<String> {
        let set: BTreeSet<String> = self
            .training
            .iter()
            .chain(&self.added)
            .map(|r| r.reference.label.to_string())
            .collect();
        set.into_iter().collect()
    }
}

pub fn run_nn(
    training: Vec<NamedReference>,
    added: Vec<NamedReference>,
    test_names: Vec<String>,
    tests: Vec<RealVector>,
    cfg: &ExperimentConfig,
) -> Result<NnReport> {
    let estimator = cfg.estimator(None)?;
    let phase1: Vec<LabeledReference> = training.iter().map(|r| r.reference.clone()).collect();
    let phase2: Vec<LabeledReference> = phase1.iter().cloned().chain(added.iter().map(|r| r.reference.clone())).collect();
    let classify = |set: &[LabeledReference]| {
        tests
            .iter()
            .enumerate()
            .map(|(i, u)| nearest_neighbor_classify(u, set, &estimator.for_stream(i as u64)))
            .collect::<qdist_core::Result<Vec<_>>>()
    };
    let before = classify(&phase1)?;
    let after = if added.is_empty() { Vec::new() } else { classify(&phase2)? };
    Ok(NnReport {
        estimator,
        training,
        added,
        test_names,
        tests,
        before,
        after,
    })
}

pub fn run_nn_demo(cfg: &ExperimentConfig) -> Result<NnReport> {
    let demo = datasets::nn_demo();
    let named = |v: Vec<(String, LabeledReference)>| {
        v.into_iter()
            .map(|(name, reference)| NamedReference { name, reference })
            .collect()
    };
    run_nn(named(demo.training), named(demo.added), demo.test_names, demo.tests, cfg)
}

pub fn run_nn_task(cfg: &ExperimentConfig) -> Result<NnReport> {
    let tests = cfg
        .load_vectors()?
        .ok_or_else(|| CliError::Config("nn needs vectors".into()))?;
    let training = cfg
        .load_references(&cfg.training)?
        .ok_or_else(|| CliError::Config("nn needs training vectors".into()))?;
    let added = cfg.load_references(&cfg.training_added)?.unwrap_or_default();
    let n1 = training.len();
    let name = |offset: usize| {
        move |(i, reference): (usize, LabeledReference)| NamedReference {
            name: format!("R{}", offset + i + 1),
            reference,
        }
    };
    run_nn(
        training.into_iter().enumerate().map(name(0)).collect(),
        added.into_iter().enumerate().map(name(n1)).collect(),
        (0..tests.len()).map(|i| i.to_string()).collect(),
        tests,
        cfg,
    )
}

impl Report for NnReport {
    fn table(&self) -> CsvTable {
        let two_phase = !self.after.is_empty();
        let mut header = vec!["index", "name", "vector", "label_before", "nearest_before", "distance_before"];
        if two_phase {
            header.extend(["label_after", "nearest_after", "distance_after", "changed"]);
        }
        let refs: Vec<&NamedReference> = self.training.iter().chain(&self.added).collect();
        let mut t = CsvTable::new(&header);
        for (i, u) in self.tests.iter().enumerate() {
            let b = &self.before[i];
            let mut cells = vec![
                i.to_string(),
                self.test_names[i].clone(),
                vector_cell(u.components()),
                labels(b).to_owned(),
                refs[b.nearest_index].name.clone(),
                num(b.reference_distances[b.nearest_index]),
            ];
            if let Some(a) = self.after.get(i) {
                cells.extend([
                    labels(a).to_owned(),
                    refs[a.nearest_index].name.clone(),
                    num(a.reference_distances[a.nearest_index]),
                    (a.assigned_label != b.assigned_label).to_string(),
                ]);
            }
            t.push(cells);
        }
        t
    }

    fn summary(&self) -> Value {
        let flipped: Vec<&str> = self.flipped().iter().map(|&i| self.test_names[i].as_str()).collect();
        json!({
            "estimator": self.estimator,
            "training": self.training,
            "added": self.added,
            "test_names": self.test_names,
            "labels_before": self.before.iter().map(labels).collect::<Vec<_>>(),
            "labels_after": self.after.iter().map(labels).collect::<Vec<_>>(),
            "flipped": flipped,
        })
    }

    fn plots(&self) -> Vec<(String, String)> {
        let all_2d = self
            .tests
            .iter()
            .chain(self.training.iter().chain(&self.added).map(|r| &r.reference.vector))
            .all(|v| v.dim() == 2);
        if !all_2d {
            return Vec::new();
        }
        let names = self.label_names();
        let gi = |l: &str| names.iter().position(|n| n == l).unwrap_or(0);
        let train_pts = |rs: &[&NamedReference]| -> Vec<([f64; 2], usize, String)> {
            rs.iter()
                .map(|r| (xy(&r.reference.vector), gi(r.reference.label.as_str()), r.name.clone()))
                .collect()
        };
        let phase1: Vec<&NamedReference> = self.training.iter().collect();
        let phase2: Vec<&NamedReference> = self.training.iter().chain(&self.added).collect();
        let t1 = train_pts(&phase1);
        let t2 = train_pts(&phase2);
        let t1: Vec<([f64; 2], usize, &str)> = t1.iter().map(|(p, g, n)| (*p, *g, n.as_str())).collect();
        let t2: Vec<([f64; 2], usize, &str)> = t2.iter().map(|(p, g, n)| (*p, *g, n.as_str())).collect();
        let tests_for = |rs: &[ClassificationResult]| -> Vec<svg::ScatterPoint> {
            self.tests
                .iter()
                .zip(rs)
                .zip(&self.test_names)
                .map(|((v, r), name)| svg::ScatterPoint {
                    xy: xy(v),
                    group: gi(labels(r)),
                    name,
                })
                .collect()
        };
        let before = tests_for(&self.before);
        let after = tests_for(&self.after);
        let mut panels = vec![svg::NnPanel {
            title: "initial training set",
            training: &t1,
            tests: &before,
        }];
        if !self.after.is_empty() {
            panels.push(svg::NnPanel {
                title: "after adding training vectors",
                training: &t2,
                tests: &after,
            });
        }
        vec![("plot.svg".to_owned(), svg::nn_panels(&panels, &names))]
    }
}
