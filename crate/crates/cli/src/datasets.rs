//! Built-in datasets.
//!
//! The table datasets are transcribed digit-for-digit, including the
//! published theory and measured `D_A − D_B` values. The 2-D demo sets for
//! clustering and nearest-neighbor updates are synthetic: they reproduce
//! the published trajectory shapes, not unpublished coordinates.

use std::f64::consts::FRAC_PI_2;

use qdist_core::{LabeledReference, RealVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// One published row: test vector, theory and measured `D_A − D_B`, group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    pub vector: &'static [f64],
    pub theory_diff: f64,
    pub experimental_diff: f64,
    pub group: &'static str,
    pub correct: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableDataset {
    pub name: &'static str,
    pub reference_a: &'static [f64],
    pub reference_b: &'static [f64],
    pub shots: u64,
    pub rows: &'static [TableRow],
}

const fn row(
    vector: &'static [f64],
    theory_diff: f64,
    experimental_diff: f64,
    group: &'static str,
    correct: bool,
) -> TableRow {
    TableRow {
        vector,
        theory_diff,
        experimental_diff,
        group,
        correct,
    }
}

pub const TABLE1: TableDataset = TableDataset {
    name: "table1",
    reference_a: &[1.0, 0.0, 0.0, 0.0],
    reference_b: &[0.0, 0.0, 1.0, 1.0],
    shots: 500,
    rows: &[
        row(&[2.00, 0.00, 0.00, 0.00], -1.45, -0.93, "A", true),
        row(&[0.00, 0.00, 0.00, 2.00], 0.82, 0.50, "B", true),
        row(&[0.35, 0.20, 0.00, 0.00], -0.79, -0.71, "A", true),
        row(&[0.23, 0.19, 0.08, 0.07], -0.54, -0.51, "A", true),
        row(&[1.32, 3.62, 1.57, 4.32], 0.74, 0.48, "B", true),
        row(&[0.15, 0.17, 0.82, 0.98], 1.26, 0.72, "B", true),
        row(&[0.18, 0.10, 1.02, 0.59], 0.98, 0.76, "B", true),
        row(&[0.97, 0.17, 0.17, 0.03], -1.37, -0.93, "A", true),
        row(&[0.68, 0.25, 0.00, 0.00], -1.18, -0.79, "A", true),
        row(&[0.83, 0.48, 1.44, 0.83], 0.67, 0.17, "B", true),
        row(&[1.27, 1.06, 3.48, 2.92], 1.13, 0.76, "B", true),
        row(&[0.40, 0.40, 0.40, 0.40], -0.10, -0.26, "A", true),
        row(&[0.09, 0.15, 0.49, 0.85], 0.80, 0.55, "B", true),
        row(&[0.10, 0.55, 0.06, 0.32], -0.19, -0.28, "A", true),
        row(&[1.94, 0.34, 0.34, 0.06], -1.22, -1.10, "A", true),
        row(&[3.42, 1.24, 1.97, 0.72], -0.34, -0.39, "A", true),
        row(&[0.66, 0.00, 1.80, 0.00], 0.40, -0.02, "A", false),
    ],
};

pub const TABLE2: TableDataset = TableDataset {
    name: "table2",
    reference_a: &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    reference_b: &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
    shots: 500,
    rows: &[
        row(&[2.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00], -1.24, -0.84, "A", true),
        row(&[0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.60], 0.77, 0.55, "B", true),
        row(&[1.77, 0.00, 0.00, 0.00, 1.24, 0.00, 0.00, 0.00], -0.92, -0.52, "A", true),
        row(&[0.40, 0.23, 0.11, 0.06, 0.03, 0.02, 0.01, 0.01], -0.45, -0.14, "A", true),
        row(&[0.00, 0.00, 1.23, 1.23, 0.00, 0.00, 0.33, 0.33], 0.17, 0.10, "B", true),
        row(&[0.30, 0.03, 0.30, 0.03, 1.12, 0.10, 1.12, 0.10], -0.11, -0.24, "A", true),
        row(&[0.42, 0.90, 0.35, 0.76, 0.00, 0.00, 0.00, 0.00], -0.28, -0.21, "A", true),
        row(&[0.54, 0.54, 0.00, 0.00, 0.54, 0.54, 0.00, 0.00], -0.43, -0.50, "A", true),
        row(&[0.11, 1.24, 0.19, 2.15, 0.06, 0.72, 0.11, 1.24], 0.40, -0.17, "A", false),
    ],
};

pub fn table(name: &str) -> Option<&'static TableDataset> {
    match name {
        "table1" => Some(&TABLE1),
        "table2" => Some(&TABLE2),
        _ => None,
    }
}

/// Canonical text of a table: one row per line, two decimals, the way
/// the values are printed.
pub fn render_table(t: &TableDataset) -> String {
    let mut out = String::new();
    for (i, r) in t.rows.iter().enumerate() {
        let comps: Vec<String> = r.vector.iter().map(|x| format!("{x:.2}")).collect();
        out.push_str(&format!(
            "{} ({}) {:.2} {:.2} {} {}\n",
            i + 1,
            comps.join(", "),
            r.theory_diff,
            r.experimental_diff,
            r.group,
            if r.correct { "yes" } else { "no" }
        ));
    }
    out
}

pub const FIG2_REFERENCE_A: [f64; 2] = [1.50, 0.55];
pub const FIG2_REFERENCE_B: [f64; 2] = [0.86, 2.35];
pub const FIG2_SHOTS: u64 = 10_000;

/// Region and count of the random 2-D test vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolarSampling {
    pub count: usize,
    pub vector_seed: u64,
    pub radius_min: f64,
    pub radius_max: f64,
    pub angle_min_deg: f64,
    pub angle_max_deg: f64,
}

impl Default for PolarSampling {
    fn default() -> Self {
        Self {
            count: 100,
            vector_seed: 2015,
            radius_min: 0.2,
            radius_max: 3.0,
            angle_min_deg: 0.0,
            angle_max_deg: 90.0,
        }
    }
}

impl PolarSampling {
    pub fn is_default(&self) -> bool {
        *self == Self::default()
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.count == 0 {
            return Err("fig2 count must be positive".into());
        }
        if !(self.radius_min > 0.0 && self.radius_max >= self.radius_min && self.radius_max.is_finite()) {
            return Err("fig2 radius range must satisfy 0 < radius_min <= radius_max".into());
        }
        if !(self.angle_max_deg >= self.angle_min_deg) {
            return Err("fig2 angle range is empty".into());
        }
        Ok(())
    }

    /// Uniform draws in (radius, angle).
    pub fn generate(&self) -> Vec<RealVector> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.vector_seed);
        let (a0, a1) = (self.angle_min_deg.to_radians(), self.angle_max_deg.to_radians());
        (0..self.count)
            .map(|_| {
                let r = if self.radius_max > self.radius_min {
                    rng.random_range(self.radius_min..self.radius_max)
                } else {
                    self.radius_min
                };
                let t = if a1 > a0 { rng.random_range(a0..a1) } else { a0 };
                RealVector::new(vec![r * t.cos(), r * t.sin()]).expect("finite polar sample")
            })
            .collect()
    }
}

pub fn fig2_references() -> (LabeledReference, LabeledReference) {
    (
        LabeledReference::new("A", RealVector::new(FIG2_REFERENCE_A.to_vec()).unwrap()).unwrap(),
        LabeledReference::new("B", RealVector::new(FIG2_REFERENCE_B.to_vec()).unwrap()).unwrap(),
    )
}

/// Quarter-disc angle range used by the polar plots, in radians.
pub const POLAR_SPAN: (f64, f64) = (0.0, FRAC_PI_2);

/// Named 2-D points with an initial grouping for the clustering demo.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterDemo {
    pub names: Vec<String>,
    pub points: Vec<[f64; 2]>,
    pub group_names: Vec<String>,
    pub initial_labels: Vec<usize>,
}

/// Two tight clouds; the initial grouping puts only A and B in "red",
/// so C and D are the misplaced members of the red cloud.
pub fn cluster_demo() -> ClusterDemo {
    ClusterDemo {
        names: ["A", "B", "C", "D", "E", "F", "G", "H"].map(String::from).to_vec(),
        points: vec![
            [0.20, 1.00],
            [0.30, 1.10],
            [0.45, 0.95],
            [0.35, 0.85],
            [1.20, 0.30],
            [1.35, 0.20],
            [1.30, 0.40],
            [1.15, 0.15],
        ],
        group_names: vec!["red".into(), "blue".into()],
        initial_labels: vec![0, 0, 1, 1, 1, 1, 1, 1],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NnDemo {
    pub training: Vec<(String, LabeledReference)>,
    pub added: Vec<(String, LabeledReference)>,
    pub test_names: Vec<String>,
    pub tests: Vec<RealVector>,
}

fn labeled(label: &str, xy: [f64; 2]) -> LabeledReference {
    LabeledReference::new(label, RealVector::new(xy.to_vec()).unwrap()).unwrap()
}

/// Two training vectors, eight tests, and a third training vector that
/// captures exactly one test point (A).
pub fn nn_demo() -> NnDemo {
    let tests = [
        [1.00, 0.75],
        [0.45, 0.80],
        [0.30, 1.10],
        [0.60, 1.20],
        [1.10, 0.30],
        [1.30, 0.35],
        [0.90, 0.20],
        [1.20, 0.55],
    ];
    NnDemo {
        training: vec![
            ("R1".into(), labeled("blue", [0.50, 1.00])),
            ("R2".into(), labeled("red", [1.00, 0.40])),
        ],
        added: vec![("R3".into(), labeled("blue", [1.10, 0.90]))],
        test_names: ["A", "B", "C", "D", "E", "F", "G", "H"].map(String::from).to_vec(),
        tests: tests
            .iter()
            .map(|p| RealVector::new(p.to_vec()).unwrap())
            .collect(),
    }
}
