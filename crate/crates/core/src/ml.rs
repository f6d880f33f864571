//! Classification procedures driven by estimated distances.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::{estimate_distance, DistanceQuery, EstimatorConfig};
use crate::vectors::RealVector;

/// Distances closer than this are treated as an exact tie.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// `|margin|` below this sets [`ClassificationResult::boundary_flag`].
pub const BOUNDARY_TOLERANCE: f64 = 1e-9;

pub const DEFAULT_MAX_ITERATIONS: usize = 100;

/// Opaque cluster identifier. Ordering is lexicographic and is used for
/// tie-breaking.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(String);

impl Label {
    pub fn new(name: impl Into<String>) -> Self {
        Self(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledReference {
    pub label: Label,
    pub vector: RealVector,
}

impl LabeledReference {
    pub fn new(label: impl Into<Label>, vector: RealVector) -> Result<Self> {
        if vector.is_zero() {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            label: label.into(),
            vector,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    /// Smallest estimated distance to any reference carrying each label.
    pub per_label_distance: BTreeMap<Label, f64>,
    pub assigned_label: Label,
    /// For two-cluster assignment `D_A − D_B`; for nearest neighbor the
    /// assigned label's distance minus the runner-up label's (−∞ when only
    /// one label is present).
    pub margin: f64,
    pub boundary_flag: bool,
    /// Estimated distance to each reference, in input order.
    pub reference_distances: Vec<f64>,
    /// Index of the reference that decided the assignment.
    pub nearest_index: usize,
}

fn distance(u: &RealVector, v: &RealVector, cfg: &EstimatorConfig) -> Result<f64> {
    let q = DistanceQuery::new(u.clone(), v.clone())?;
    Ok(estimate_distance(&q, cfg)?.distance)
}

/// Assigns `u` to whichever of two references is closer, by the sign of
/// `D_A − D_B`. Reference `a` uses sub-stream 0 and `b` sub-stream 1.
pub fn classify_two_cluster(
    u: &RealVector,
    ref_a: &LabeledReference,
    ref_b: &LabeledReference,
    cfg: &EstimatorConfig,
) -> Result<ClassificationResult> {
    if ref_a.label == ref_b.label {
        return Err(Error::InvalidParameter(format!(
            "two-cluster references share the label '{}'",
            ref_a.label
        )));
    }
    let d_a = distance(u, &ref_a.vector, &cfg.for_stream(0))?;
    let d_b = distance(u, &ref_b.vector, &cfg.for_stream(1))?;
    let margin = d_a - d_b;

    let pick_a = if margin.abs() <= TIE_TOLERANCE {
        ref_a.label < ref_b.label
    } else {
        margin < 0.0
    };
    let (assigned_label, nearest_index) = if pick_a {
        (ref_a.label.clone(), 0)
    } else {
        (ref_b.label.clone(), 1)
    };

    Ok(ClassificationResult {
        per_label_distance: BTreeMap::from([
            (ref_a.label.clone(), d_a),
            (ref_b.label.clone(), d_b),
        ]),
        assigned_label,
        margin,
        boundary_flag: margin.abs() < BOUNDARY_TOLERANCE,
        reference_distances: vec![d_a, d_b],
        nearest_index,
    })
}

/// Labels `u` with the label of its nearest training vector. Training
/// vector `i` uses sub-stream `i`.
pub fn nearest_neighbor_classify(
    u: &RealVector,
    training: &[LabeledReference],
    cfg: &EstimatorConfig,
) -> Result<ClassificationResult> {
    if training.is_empty() {
        return Err(Error::InvalidParameter("training set is empty".into()));
    }
    let reference_distances = training
        .iter()
        .enumerate()
        .map(|(i, r)| distance(u, &r.vector, &cfg.for_stream(i as u64)))
        .collect::<Result<Vec<_>>>()?;

    let mut per_label_distance: BTreeMap<Label, f64> = BTreeMap::new();
    for (r, &d) in training.iter().zip(&reference_distances) {
        per_label_distance
            .entry(r.label.clone())
            .and_modify(|m| *m = m.min(d))
            .or_insert(d);
    }

    let best = per_label_distance.values().copied().fold(f64::INFINITY, f64::min);
    // BTreeMap order makes the first label within the tie band the smallest one.
    let (assigned_label, best_d) = per_label_distance
        .iter()
        .find(|(_, &d)| d <= best + TIE_TOLERANCE)
        .map(|(l, &d)| (l.clone(), d))
        .expect("at least one label");
    let runner_up = per_label_distance
        .iter()
        .filter(|(l, _)| **l != assigned_label)
        .map(|(_, &d)| d)
        .fold(f64::INFINITY, f64::min);
    let margin = best_d - runner_up;

    let nearest_index = training
        .iter()
        .zip(&reference_distances)
        .position(|(r, &d)| r.label == assigned_label && d == best_d)
        .expect("assigned label has a reference at its minimum");

    Ok(ClassificationResult {
        per_label_distance,
        assigned_label,
        margin,
        boundary_flag: margin.abs() < BOUNDARY_TOLERANCE,
        reference_distances,
        nearest_index,
    })
}

/// Position of the unordered pair `{i, j}` in a strict lower triangle.
fn pair_index(i: usize, j: usize) -> u64 {
    let (lo, hi) = if i < j { (i, j) } else { (j, i) };
    (hi * (hi - 1) / 2 + lo) as u64
}

fn pair_distance(vectors: &[RealVector], i: usize, j: usize, cfg: &EstimatorConfig) -> Result<f64> {
    let (lo, hi) = if i < j { (i, j) } else { (j, i) };
    distance(&vectors[lo], &vectors[hi], &cfg.for_stream(pair_index(lo, hi)))
}

/// Symmetric matrix of estimated pairwise distances. Pair `{i, j}` uses the
/// sub-stream given by its lower-triangle position.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseDistances {
    n: usize,
    lower: Vec<f64>,
}

impl PairwiseDistances {
    pub fn compute(vectors: &[RealVector], cfg: &EstimatorConfig) -> Result<Self> {
        let n = vectors.len();
        let mut lower = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for hi in 1..n {
            for lo in 0..hi {
                lower.push(pair_distance(vectors, lo, hi, cfg)?);
            }
        }
        Ok(Self { n, lower })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            0.0
        } else {
            self.lower[pair_index(i, j) as usize]
        }
    }

    /// Mean distance from `i` to `members`, excluding `i` itself.
    pub fn mean_to(&self, i: usize, members: impl IntoIterator<Item = usize>) -> Option<f64> {
        let (sum, count) = members
            .into_iter()
            .filter(|&j| j != i)
            .fold((0.0, 0usize), |(s, c), j| (s + self.get(i, j), c + 1));
        (count > 0).then(|| sum / count as f64)
    }
}

/// Mean estimated distance from `vectors[v_index]` to the other members
/// of a group. `Ok(None)` when no member remains after excluding
/// `v_index`.
pub fn mean_group_distance(
    v_index: usize,
    group_members: &[usize],
    vectors: &[RealVector],
    cfg: &EstimatorConfig,
) -> Result<Option<f64>> {
    let others: Vec<usize> = group_members.iter().copied().filter(|&j| j != v_index).collect();
    if others.is_empty() {
        return Ok(None);
    }
    if v_index >= vectors.len() || others.iter().any(|&j| j >= vectors.len()) {
        return Err(Error::InvalidParameter("group member index out of range".into()));
    }
    let mut sum = 0.0;
    for &j in &others {
        sum += pair_distance(vectors, v_index, j, cfg)?;
    }
    Ok(Some(sum / others.len() as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Initialization {
    /// Explicit group index per vector, each in `0..k`.
    Labels(Vec<usize>),
    /// Random assignment with every group non-empty.
    Random { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Converged,
    Cycle,
    IterationCap,
}

/// Per-round record of the mean distances that drove the update.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    /// `means[i][g]`: mean distance from vector `i` to group `g`, self
    /// excluded; `None` if that group had no other member.
    pub means: Vec<Vec<Option<f64>>>,
    /// Vectors whose label changed this round.
    pub flipped: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringState {
    pub labels: Vec<usize>,
    pub k: usize,
    pub iteration: usize,
    pub converged: bool,
    pub stop_reason: StopReason,
    /// Initial labels followed by the labels after each round.
    pub history: Vec<Vec<usize>>,
    pub rounds: Vec<RoundRecord>,
}

impl ClusteringState {
    pub fn flips_per_round(&self) -> Vec<usize> {
        self.rounds.iter().map(|r| r.flipped.len()).collect()
    }
}

fn initial_labels(n: usize, k: usize, init: &Initialization) -> Result<Vec<usize>> {
    let labels = match init {
        Initialization::Labels(l) => {
            if l.len() != n {
                return Err(Error::InvalidParameter(format!(
                    "{} initial labels for {n} vectors",
                    l.len()
                )));
            }
            if let Some(bad) = l.iter().find(|&&g| g >= k) {
                return Err(Error::InvalidParameter(format!("initial label {bad} >= k = {k}")));
            }
            l.clone()
        }
        Initialization::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            let mut labels = vec![0; n];
            for (pos, &i) in order.iter().enumerate() {
                labels[i] = if pos < k { pos } else { rng.random_range(0..k) };
            }
            labels
        }
    };
    if let Some(g) = (0..k).find(|g| !labels.contains(g)) {
        return Err(Error::InvalidParameter(format!("initial group {g} is empty")));
    }
    Ok(labels)
}

fn members(labels: &[usize], g: usize) -> impl Iterator<Item = usize> + '_ {
    labels.iter().enumerate().filter(move |(_, &l)| l == g).map(|(i, _)| i)
}

/// Reassigns every vector to the group with the smallest mean distance.
/// A tie keeps the current group when it is among the minima, otherwise
/// the lowest group index wins.
fn reassign(labels: &[usize], k: usize, dist: &PairwiseDistances) -> (Vec<usize>, Vec<Vec<Option<f64>>>) {
    let means: Vec<Vec<Option<f64>>> = (0..labels.len())
        .map(|i| (0..k).map(|g| dist.mean_to(i, members(labels, g))).collect())
        .collect();

    let mut next: Vec<usize> = labels
        .iter()
        .zip(&means)
        .map(|(&current, row)| {
            let best = row.iter().flatten().copied().fold(f64::INFINITY, f64::min);
            if !best.is_finite() {
                return current;
            }
            let tied = |g: usize| row[g].is_some_and(|m| m <= best + TIE_TOLERANCE);
            if tied(current) {
                current
            } else {
                (0..k).find(|&g| tied(g)).unwrap_or(current)
            }
        })
        .collect();

    // A group all of whose previous members leave keeps its most central
    // previous member, whatever arrives.
    for g in 0..k {
        let prev: Vec<usize> = members(labels, g).collect();
        if prev.iter().any(|&i| next[i] == g) {
            continue;
        }
        let keep = prev
            .iter()
            .copied()
            .map(|i| (i, dist.mean_to(i, prev.iter().copied()).unwrap_or(0.0)))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .map(|(i, _)| i)
            .expect("previous labels had every group populated");
        next[keep] = g;
    }
    (next, means)
}

/// Batch mean-distance clustering: every round recomputes, for each
/// vector, its mean distance to each group and moves all vectors at once.
/// Stops on a round with no change, on a repeated configuration, or at
/// `max_iterations`. Round `r` estimates distances from
/// `cfg.for_stream(r)`.
pub fn unsupervised_cluster(
    vectors: &[RealVector],
    k: usize,
    init: &Initialization,
    cfg: &EstimatorConfig,
    max_iterations: usize,
) -> Result<ClusteringState> {
    let n = vectors.len();
    if k < 2 || k > n {
        return Err(Error::InvalidParameter(format!(
            "k = {k} must satisfy 2 <= k <= {n}"
        )));
    }
    if max_iterations == 0 {
        return Err(Error::InvalidParameter("max_iterations must be at least 1".into()));
    }
    if let Some(v) = vectors.iter().find(|v| v.dim() != vectors[0].dim()) {
        return Err(Error::DimensionMismatch {
            left: vectors[0].dim(),
            right: v.dim(),
        });
    }
    cfg.validate()?;

    let mut labels = initial_labels(n, k, init)?;
    let mut history = vec![labels.clone()];
    let mut rounds = Vec::new();
    let mut seen: HashSet<Vec<usize>> = HashSet::from([labels.clone()]);
    let fixed = if cfg.is_exact() {
        Some(PairwiseDistances::compute(vectors, cfg)?)
    } else {
        None
    };

    let mut stop_reason = StopReason::IterationCap;
    for round in 1..=max_iterations {
        let sampled;
        let dist = match &fixed {
            Some(d) => d,
            None => {
                sampled = PairwiseDistances::compute(vectors, &cfg.for_stream(round as u64))?;
                &sampled
            }
        };
        let (next, means) = reassign(&labels, k, dist);
        let flipped: Vec<usize> = (0..n).filter(|&i| next[i] != labels[i]).collect();
        let unchanged = flipped.is_empty();
        rounds.push(RoundRecord { means, flipped });
        history.push(next.clone());
        labels = next;

        if unchanged {
            stop_reason = StopReason::Converged;
            break;
        }
        if !seen.insert(labels.clone()) {
            stop_reason = StopReason::Cycle;
            break;
        }
    }

    Ok(ClusteringState {
        labels,
        k,
        iteration: rounds.len(),
        converged: stop_reason == StopReason::Converged,
        stop_reason,
        history,
        rounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn rv(xs: &[f64]) -> RealVector {
        RealVector::new(xs.to_vec()).unwrap()
    }

    fn reference(label: &str, xs: &[f64]) -> LabeledReference {
        LabeledReference::new(label, rv(xs)).unwrap()
    }

    #[test]
    fn table_one_row_one() {
        let r = classify_two_cluster(
            &rv(&[2.0, 0.0, 0.0, 0.0]),
            &reference("A", &[1.0, 0.0, 0.0, 0.0]),
            &reference("B", &[0.0, 0.0, 1.0, 1.0]),
            &EstimatorConfig::exact(),
        )
        .unwrap();
        assert_abs_diff_eq!(r.margin, 1.0 - 6f64.sqrt(), epsilon = 1e-12);
        assert_eq!(r.assigned_label, Label::from("A"));
        assert!(!r.boundary_flag);
    }

    #[test]
    fn table_two_row_two() {
        let mut u = vec![0.0; 8];
        u[7] = 0.6;
        let mut a = vec![0.0; 8];
        a[0] = 1.0;
        let mut b = vec![0.0; 8];
        b[7] = 1.0;
        let r = classify_two_cluster(
            &rv(&u),
            &reference("A", &a),
            &reference("B", &b),
            &EstimatorConfig::exact(),
        )
        .unwrap();
        assert_abs_diff_eq!(r.margin, 1.36f64.sqrt() - 0.4, epsilon = 1e-12);
        assert_eq!(r.assigned_label.as_str(), "B");
    }

    #[test]
    fn midpoint_is_flagged_and_tie_goes_to_smaller_label() {
        let r = classify_two_cluster(
            &rv(&[0.5, 0.5]),
            &reference("red", &[1.0, 0.0]),
            &reference("blue", &[0.0, 1.0]),
            &EstimatorConfig::exact(),
        )
        .unwrap();
        assert!(r.boundary_flag);
        assert_eq!(r.assigned_label.as_str(), "blue");
    }

    #[test]
    fn duplicate_two_cluster_labels_rejected() {
        let a = reference("A", &[1.0, 0.0]);
        assert!(classify_two_cluster(&rv(&[1.0, 1.0]), &a, &a, &EstimatorConfig::exact()).is_err());
    }

    #[test]
    fn nearest_neighbor_single_reference() {
        let r = nearest_neighbor_classify(
            &rv(&[5.0, -1.0]),
            &[reference("only", &[0.1, 0.2])],
            &EstimatorConfig::exact(),
        )
        .unwrap();
        assert_eq!(r.assigned_label.as_str(), "only");
        assert_eq!(r.margin, f64::NEG_INFINITY);
        assert!(!r.boundary_flag);
    }

    #[test]
    fn nearest_neighbor_uses_min_per_label() {
        let training = [
            reference("blue", &[0.0, 1.0]),
            reference("red", &[1.0, 0.0]),
            reference("blue", &[1.0, 0.2]),
        ];
        let r = nearest_neighbor_classify(&rv(&[1.0, 0.15]), &training, &EstimatorConfig::exact()).unwrap();
        assert_eq!(r.assigned_label.as_str(), "blue");
        assert_eq!(r.nearest_index, 2);
        assert_abs_diff_eq!(r.per_label_distance[&Label::from("blue")], 0.05, epsilon = 1e-9);
        assert!(r.margin < 0.0);
        assert!(nearest_neighbor_classify(&rv(&[1.0, 0.0]), &[], &EstimatorConfig::exact()).is_err());
    }

    #[test]
    fn caption_distances_pick_blue() {
        // Place R1 and R2 at the captioned distances 0.24 and 0.62 from B.
        let b = rv(&[1.0, 1.0]);
        let training = [reference("blue", &[1.24, 1.0]), reference("red", &[1.0, 1.62])];
        let r = nearest_neighbor_classify(&b, &training, &EstimatorConfig::exact()).unwrap();
        assert_abs_diff_eq!(r.reference_distances[0], 0.24, epsilon = 1e-12);
        assert_abs_diff_eq!(r.reference_distances[1], 0.62, epsilon = 1e-12);
        assert_eq!(r.assigned_label.as_str(), "blue");
    }

    #[test]
    fn mean_group_distance_examples() {
        let vs = vec![rv(&[1.0, 1.0]), rv(&[2.0, 1.0]), rv(&[3.0, 1.0])];
        let cfg = EstimatorConfig::exact();
        assert_eq!(mean_group_distance(0, &[0], &vs, &cfg).unwrap(), None);
        assert_abs_diff_eq!(
            mean_group_distance(0, &[2], &vs, &cfg).unwrap().unwrap(),
            2.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            mean_group_distance(1, &[0, 1, 2], &vs, &cfg).unwrap().unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn pairwise_matches_mean_group_distance_in_sampled_mode() {
        let vs = vec![rv(&[1.0, 1.0]), rv(&[2.0, 0.5]), rv(&[0.3, 1.0]), rv(&[1.0, -1.0])];
        let cfg = EstimatorConfig::sampled(200, 11);
        let pd = PairwiseDistances::compute(&vs, &cfg).unwrap();
        let direct = mean_group_distance(2, &[0, 2, 3], &vs, &cfg).unwrap().unwrap();
        assert_eq!(pd.mean_to(2, [0, 2, 3]).unwrap(), direct);
        assert_eq!(pd.get(1, 3), pd.get(3, 1));
    }

    #[test]
    fn converged_input_takes_one_round() {
        let vs = vec![rv(&[0.1, 1.0]), rv(&[0.2, 1.1]), rv(&[1.0, 0.1]), rv(&[1.1, 0.2])];
        let s = unsupervised_cluster(
            &vs,
            2,
            &Initialization::Labels(vec![0, 0, 1, 1]),
            &EstimatorConfig::exact(),
            DEFAULT_MAX_ITERATIONS,
        )
        .unwrap();
        assert!(s.converged);
        assert_eq!(s.iteration, 1);
        assert_eq!(s.history.len(), 2);
        assert_eq!(s.labels, vec![0, 0, 1, 1]);
    }

    #[test]
    fn k_equal_n_is_trivially_converged() {
        let vs = vec![rv(&[0.1, 1.0]), rv(&[0.2, 1.1]), rv(&[1.0, 0.1])];
        let s = unsupervised_cluster(
            &vs,
            3,
            &Initialization::Labels(vec![0, 1, 2]),
            &EstimatorConfig::exact(),
            10,
        )
        .unwrap();
        assert!(s.converged);
        assert_eq!(s.labels, vec![0, 1, 2]);
        assert_eq!(s.iteration, 1);
    }

    #[test]
    fn emptied_group_keeps_a_member() {
        // Vector 2 sits alone in group 1 and is closer to group 0's members;
        // moving it would empty group 1.
        let vs = vec![rv(&[1.0, 0.0]), rv(&[1.2, 0.0]), rv(&[1.1, 0.1])];
        let s = unsupervised_cluster(
            &vs,
            2,
            &Initialization::Labels(vec![0, 0, 1]),
            &EstimatorConfig::exact(),
            10,
        )
        .unwrap();
        assert!(s.labels.contains(&0) && s.labels.contains(&1));
    }

    #[test]
    fn invalid_inputs() {
        let vs = vec![rv(&[1.0, 0.0]), rv(&[0.0, 1.0])];
        let cfg = EstimatorConfig::exact();
        assert!(unsupervised_cluster(&vs, 1, &Initialization::Random { seed: 0 }, &cfg, 5).is_err());
        assert!(unsupervised_cluster(&vs, 3, &Initialization::Random { seed: 0 }, &cfg, 5).is_err());
        assert!(unsupervised_cluster(&vs, 2, &Initialization::Labels(vec![0, 0]), &cfg, 5).is_err());
        assert!(unsupervised_cluster(&vs, 2, &Initialization::Labels(vec![0, 2]), &cfg, 5).is_err());
        assert!(unsupervised_cluster(&vs, 2, &Initialization::Labels(vec![0, 1]), &cfg, 0).is_err());
        let mixed = vec![rv(&[1.0, 0.0]), rv(&[0.0, 1.0, 0.0, 0.0])];
        assert!(unsupervised_cluster(&mixed, 2, &Initialization::Random { seed: 0 }, &cfg, 5).is_err());
    }

    #[test]
    fn random_init_populates_every_group() {
        for seed in 0..50 {
            let labels = initial_labels(6, 3, &Initialization::Random { seed }).unwrap();
            assert!((0..3).all(|g| labels.contains(&g)));
        }
    }

    #[test]
    fn sampled_clustering_terminates() {
        let vs: Vec<RealVector> = (0..6)
            .map(|i| rv(&[1.0 + 0.01 * i as f64, 1.0 - 0.01 * i as f64]))
            .collect();
        let s = unsupervised_cluster(
            &vs,
            2,
            &Initialization::Random { seed: 3 },
            &EstimatorConfig::sampled(50, 9),
            7,
        )
        .unwrap();
        assert!(s.iteration <= 7);
        assert_eq!(s.history.len(), s.iteration + 1);
    }
}
