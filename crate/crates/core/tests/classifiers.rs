//! Classification procedures against classical brute-force oracles.

use proptest::prelude::*;
use qdist_core::ml::{
    classify_two_cluster, nearest_neighbor_classify, unsupervised_cluster, Initialization,
    LabeledReference, StopReason, DEFAULT_MAX_ITERATIONS,
};
use qdist_core::{EstimatorConfig, NoiseModel, RealVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rv(xs: &[f64]) -> RealVector {
    RealVector::new(xs.to_vec()).unwrap()
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn random_vec(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
        if v.iter().any(|x| x.abs() > 1e-3) {
            return v;
        }
    }
}

#[test]
fn two_cluster_agrees_with_euclidean_classifier() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut checked = 0;
    for i in 0..1000 {
        let dim = [2, 4, 8][i % 3];
        let (u, a, b) = (random_vec(&mut rng, dim), random_vec(&mut rng, dim), random_vec(&mut rng, dim));
        let oracle = euclid(&u, &a) - euclid(&u, &b);
        if oracle.abs() < 1e-9 {
            continue;
        }
        let r = classify_two_cluster(
            &rv(&u),
            &LabeledReference::new("A", rv(&a)).unwrap(),
            &LabeledReference::new("B", rv(&b)).unwrap(),
            &EstimatorConfig::exact(),
        )
        .unwrap();
        let expected = if oracle < 0.0 { "A" } else { "B" };
        assert_eq!(r.assigned_label.as_str(), expected, "instance {i}");
        checked += 1;
    }
    assert!(checked > 990);
}

proptest! {
    #[test]
    fn assignment_is_scale_invariant(
        u in prop::collection::vec(0.05f64..2.0, 4),
        a in prop::collection::vec(0.05f64..2.0, 4),
        b in prop::collection::vec(0.05f64..2.0, 4),
        c in 0.05f64..20.0,
    ) {
        let cfg = EstimatorConfig::exact();
        let classify = |s: f64| {
            let scale = |v: &[f64]| rv(&v.iter().map(|x| x * s).collect::<Vec<_>>());
            classify_two_cluster(
                &scale(&u),
                &LabeledReference::new("A", scale(&a)).unwrap(),
                &LabeledReference::new("B", scale(&b)).unwrap(),
                &cfg,
            ).unwrap()
        };
        let base = classify(1.0);
        prop_assume!(!base.boundary_flag && base.margin.abs() > 1e-9);
        prop_assert_eq!(base.assigned_label, classify(c).assigned_label);
    }

    #[test]
    fn assignment_is_label_equivariant(
        u in prop::collection::vec(-2.0f64..2.0, 2),
        a in prop::collection::vec(0.05f64..2.0, 2),
        b in prop::collection::vec(-2.0f64..-0.05, 2),
    ) {
        prop_assume!(u.iter().any(|x| x.abs() > 1e-3));
        let cfg = EstimatorConfig::exact();
        let first = classify_two_cluster(
            &rv(&u),
            &LabeledReference::new("A", rv(&a)).unwrap(),
            &LabeledReference::new("B", rv(&b)).unwrap(),
            &cfg,
        ).unwrap();
        prop_assume!(!first.boundary_flag);
        let renamed = classify_two_cluster(
            &rv(&u),
            &LabeledReference::new("red", rv(&a)).unwrap(),
            &LabeledReference::new("blue", rv(&b)).unwrap(),
            &cfg,
        ).unwrap();
        let map = |l: &str| if l == "A" { "red" } else { "blue" };
        prop_assert_eq!(map(first.assigned_label.as_str()), renamed.assigned_label.as_str());
        prop_assert_eq!(first.margin, renamed.margin);
    }

    #[test]
    fn adding_a_training_vector_flips_exactly_the_points_it_captures(seed in 0u64..500) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tests: Vec<Vec<f64>> = (0..8).map(|_| random_vec(&mut rng, 2)).collect();
        let r1 = random_vec(&mut rng, 2);
        let r2 = random_vec(&mut rng, 2);
        let r3 = random_vec(&mut rng, 2);
        let phase1 = vec![
            LabeledReference::new("blue", rv(&r1)).unwrap(),
            LabeledReference::new("red", rv(&r2)).unwrap(),
        ];
        let mut phase2 = phase1.clone();
        phase2.push(LabeledReference::new("blue", rv(&r3)).unwrap());
        let cfg = EstimatorConfig::exact();

        for t in &tests {
            let d1 = euclid(t, &r1);
            let d2 = euclid(t, &r2);
            let d3 = euclid(t, &r3);
            prop_assume!((d1 - d2).abs() > 1e-9 && (d3 - d1.min(d2)).abs() > 1e-9);
            let before = nearest_neighbor_classify(&rv(t), &phase1, &cfg).unwrap().assigned_label;
            let after = nearest_neighbor_classify(&rv(t), &phase2, &cfg).unwrap().assigned_label;
            let oracle_before = if d1 < d2 { "blue" } else { "red" };
            let oracle_after = if d3 < d1.min(d2) { "blue" } else { oracle_before };
            prop_assert_eq!(before.as_str(), oracle_before);
            prop_assert_eq!(after.as_str(), oracle_after);
            let captured = d3 < d1.min(d2);
            prop_assert_eq!(before != after, captured && oracle_before == "red");
        }
    }
}

#[test]
fn duplicate_training_vector_changes_nothing() {
    let training = vec![
        LabeledReference::new("blue", rv(&[0.5, 1.0])).unwrap(),
        LabeledReference::new("red", rv(&[1.0, 0.4])).unwrap(),
    ];
    let mut extended = training.clone();
    extended.push(training[1].clone());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let u = rv(&random_vec(&mut rng, 2));
        let a = nearest_neighbor_classify(&u, &training, &EstimatorConfig::exact()).unwrap();
        let b = nearest_neighbor_classify(&u, &extended, &EstimatorConfig::exact()).unwrap();
        assert_eq!(a.assigned_label, b.assigned_label);
    }
}

/// Own-group-minimal test using classical distances. Singleton groups are
/// exempt because their member cannot leave.
fn is_fixed_point(points: &[Vec<f64>], labels: &[usize], k: usize) -> bool {
    (0..points.len()).all(|i| {
        let mean = |g: usize| {
            let ds: Vec<f64> = (0..points.len())
                .filter(|&j| j != i && labels[j] == g)
                .map(|j| euclid(&points[i], &points[j]))
                .collect();
            (!ds.is_empty()).then(|| ds.iter().sum::<f64>() / ds.len() as f64)
        };
        match mean(labels[i]) {
            None => true,
            Some(own) => (0..k).filter_map(mean).all(|m| own <= m + 1e-12),
        }
    })
}

fn two_clouds(rng: &mut ChaCha8Rng, per_cloud: usize) -> (Vec<Vec<f64>>, Vec<usize>) {
    let centers = [[0.4, 2.0], [2.2, 0.3]];
    let mut pts = Vec::new();
    let mut truth = Vec::new();
    for (c, center) in centers.iter().enumerate() {
        for _ in 0..per_cloud {
            pts.push(vec![
                center[0] + rng.random_range(-0.05..0.05),
                center[1] + rng.random_range(-0.05..0.05),
            ]);
            truth.push(c);
        }
    }
    (pts, truth)
}

#[test]
fn separated_clouds_have_a_unique_fixed_point_and_we_reach_it() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (pts, truth) = two_clouds(&mut rng, 4);
    let n = pts.len();

    // brute force over all labelings with both groups populated
    let fixed: Vec<Vec<usize>> = (1u32..(1 << n) - 1)
        .map(|mask| (0..n).map(|i| ((mask >> i) & 1) as usize).collect::<Vec<_>>())
        .filter(|l| is_fixed_point(&pts, l, 2))
        .collect();
    let same_partition = |a: &[usize], b: &[usize]| a == b || a.iter().zip(b).all(|(x, y)| x != y);
    assert!(fixed.iter().all(|l| same_partition(l, &truth)), "fixed points {fixed:?}");
    assert_eq!(fixed.len(), 2);

    let vectors: Vec<RealVector> = pts.iter().map(|p| rv(p)).collect();
    let mut tried = 0;
    for mask in 1u32..(1 << n) - 1 {
        let init: Vec<usize> = (0..n).map(|i| ((mask >> i) & 1) as usize).collect();
        let mixed = (0..n).any(|i| (0..n).any(|j| truth[i] != truth[j] && init[i] != init[j]));
        if !mixed {
            continue;
        }
        let s = unsupervised_cluster(
            &vectors,
            2,
            &Initialization::Labels(init.clone()),
            &EstimatorConfig::exact(),
            DEFAULT_MAX_ITERATIONS,
        )
        .unwrap();
        if s.converged {
            assert!(same_partition(&s.labels, &truth), "init {init:?} -> {:?}", s.labels);
        }
        tried += 1;
    }
    assert!(tried > 200);
}

#[test]
fn reported_fixed_points_satisfy_the_own_group_condition() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut converged = 0;
    for trial in 0..200 {
        let n = rng.random_range(4..10);
        let k = rng.random_range(2..=3.min(n));
        let pts: Vec<Vec<f64>> = (0..n).map(|_| random_vec(&mut rng, 2)).collect();
        let vectors: Vec<RealVector> = pts.iter().map(|p| rv(p)).collect();
        let s = unsupervised_cluster(
            &vectors,
            k,
            &Initialization::Random { seed: trial },
            &EstimatorConfig::exact(),
            DEFAULT_MAX_ITERATIONS,
        )
        .unwrap();
        assert!(s.iteration <= DEFAULT_MAX_ITERATIONS);
        assert_eq!(s.history.len(), s.iteration + 1);
        if s.converged {
            converged += 1;
            assert!(is_fixed_point(&pts, &s.labels, k), "trial {trial}: {:?}", s.labels);
        } else {
            assert_ne!(s.stop_reason, StopReason::Converged);
        }
    }
    assert!(converged > 150, "only {converged}/200 converged");
}

#[test]
fn noisy_sampled_clustering_always_halts() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let cfg = EstimatorConfig::sampled(100, 4).with_noise(NoiseModel::preset("paper-2012-optics").unwrap());
    for trial in 0..20 {
        let vectors: Vec<RealVector> = (0..8).map(|_| rv(&random_vec(&mut rng, 2))).collect();
        let s = unsupervised_cluster(&vectors, 2, &Initialization::Random { seed: trial }, &cfg, 15).unwrap();
        assert!(s.iteration <= 15);
        let again = unsupervised_cluster(&vectors, 2, &Initialization::Random { seed: trial }, &cfg, 15).unwrap();
        assert_eq!(s, again);
    }
}
