use std::collections::BTreeSet;
use std::sync::Mutex;

use hmr_core::data::{synthesize_piecewise, window, SupervisedSet, SynthConfig};
use hmr_core::selection::{
    cross_validate, feature_selection, forward_select, grid_search_theta, mean_std, nested_cv,
    plan_folds, rank_features, EvalOptions, GridSpec, Observer, Stage,
};
use hmr_core::{ClusterConfig, Jobs};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `cultures` groups of `per` rows with uniform random inputs and `f(x)` targets.
fn dataset(
    n_features: usize,
    cultures: usize,
    per: usize,
    seed: u64,
    f: impl Fn(&[f64]) -> f64,
) -> SupervisedSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inputs = Vec::new();
    let mut targets = Vec::new();
    let mut ids = Vec::new();
    for c in 0..cultures {
        for _ in 0..per {
            let x: Vec<f64> = (0..n_features)
                .map(|_| rng.random_range(0.0..1.0))
                .collect();
            targets.push(f(&x));
            inputs.push(x);
            ids.push(format!("c{c:03}"));
        }
    }
    let names = (0..n_features).map(|j| format!("f{j}")).collect();
    SupervisedSet::from_rows(inputs, targets, ids, names, "y").unwrap()
}

fn linear(x: &[f64]) -> f64 {
    0.3 + x
        .iter()
        .enumerate()
        .map(|(j, v)| (j as f64 + 1.0) * 0.1 * v)
        .sum::<f64>()
}

#[test]
fn single_box_on_linear_data_is_exact() {
    let data = dataset(2, 10, 12, 1, linear);
    let plan = plan_folds(&data.culture_ids(), 5, 3).unwrap();
    let report = cross_validate(
        &data,
        &plan,
        &ClusterConfig::with_theta(1.0).unwrap(),
        1.0,
        &EvalOptions::default(),
    )
    .unwrap();
    assert_eq!(report.folds.len(), 5);
    for f in &report.folds {
        assert_eq!(f.boxes, 1);
        assert!(f.train_rmse < 1e-9 && f.test_rmse < 1e-9, "{f:?}");
    }
}

#[test]
fn summary_recomputes_from_folds() {
    let data = dataset(2, 10, 12, 2, |x| (4.0 * x[0]).sin() + x[1]);
    let plan = plan_folds(&data.culture_ids(), 5, 3).unwrap();
    let report = cross_validate(
        &data,
        &plan,
        &ClusterConfig::default(),
        1.0,
        &EvalOptions::default(),
    )
    .unwrap();
    let test: Vec<f64> = report.folds.iter().map(|f| f.test_rmse).collect();
    let mean = test.iter().sum::<f64>() / 5.0;
    let var = test.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 4.0;
    assert!((report.summary.test_rmse_mean - mean).abs() < 1e-15);
    assert!((report.summary.test_rmse_std - var.sqrt()).abs() < 1e-15);
    assert_eq!(
        mean_std(&test),
        (report.summary.test_rmse_mean, report.summary.test_rmse_std)
    );
}

#[test]
fn serial_and_parallel_agree() {
    let data = dataset(2, 10, 12, 4, |x| (4.0 * x[0]).sin() * x[1]);
    let plan = plan_folds(&data.culture_ids(), 5, 9).unwrap();
    let run = |jobs| {
        cross_validate(
            &data,
            &plan,
            &ClusterConfig::default(),
            1.0,
            &EvalOptions::with_jobs(jobs),
        )
        .unwrap()
        .without_timings()
    };
    assert_eq!(run(Jobs::Serial), run(Jobs::Auto));
    assert_eq!(run(Jobs::Serial), run(Jobs::Threads(3)));
}

#[test]
fn grid_search_selection_rules() {
    let opts = EvalOptions::default();
    let base = ClusterConfig::default();
    let lin = dataset(1, 10, 10, 5, linear);
    let plan = plan_folds(&lin.culture_ids(), 5, 1).unwrap();

    let single = grid_search_theta(
        &lin,
        &plan,
        &GridSpec::new(vec![0.4]).unwrap(),
        &base,
        1.0,
        &opts,
    )
    .unwrap();
    assert_eq!(single.best_theta, 0.4);
    assert_eq!(single.points.len(), 1);

    // Every θ fits exact-linear data exactly; the tie goes to the larger θ.
    let default =
        grid_search_theta(&lin, &plan, &GridSpec::default_grid(), &base, 1.0, &opts).unwrap();
    assert_eq!(default.points.len(), 7);
    assert_eq!(default.best_theta, 0.7);
    let both = grid_search_theta(
        &lin,
        &plan,
        &GridSpec::new(vec![0.1, 1.0]).unwrap(),
        &base,
        1.0,
        &opts,
    )
    .unwrap();
    assert_eq!(both.best_theta, 1.0);

    let zigzag = dataset(1, 10, 30, 6, |x| {
        (x[0] * 10.0).fract().min(1.0 - (x[0] * 10.0).fract())
    });
    let plan = plan_folds(&zigzag.culture_ids(), 5, 1).unwrap();
    let search = grid_search_theta(
        &zigzag,
        &plan,
        &GridSpec::new(vec![0.05, 1.0]).unwrap(),
        &base,
        1.0,
        &opts,
    )
    .unwrap();
    assert!(search.best_theta < 1.0);
}

#[test]
fn forward_selection_finds_the_driving_features() {
    let opts = EvalOptions::default();
    let cfg = ClusterConfig::with_theta(1.0).unwrap();

    let single = dataset(3, 10, 12, 7, |x| 2.0 * x[1] + 0.5);
    let ranking = rank_features(&single).unwrap();
    assert_eq!(ranking.entries[0].name, "f1");
    let plan = plan_folds(&single.culture_ids(), 5, 2).unwrap();
    let fwd = forward_select(&single, &ranking, &plan, &cfg, 1.0, &opts).unwrap();
    assert_eq!(fwd.best_k, 1);
    assert_eq!(fwd.curve.len(), 3);

    let additive = dataset(5, 10, 12, 8, |x| 3.0 * x[0] + 2.0 * x[2] + x[4]);
    let ranking = rank_features(&additive).unwrap();
    let fwd = forward_select(&additive, &ranking, &plan, &cfg, 1.0, &opts).unwrap();
    assert_eq!(fwd.best_k, 3, "{ranking:?} {fwd:?}");
    let chosen: BTreeSet<String> = fwd.selected(&ranking).into_iter().collect();
    assert_eq!(
        chosen,
        ["f0", "f2", "f4"].iter().map(|s| s.to_string()).collect()
    );
}

type Event = (Vec<usize>, Stage, BTreeSet<String>);

#[derive(Default)]
struct Recorder(Mutex<Vec<Event>>);

impl Observer for Recorder {
    fn observe(&self, scope: &[usize], stage: Stage, cultures: &[String]) {
        let set = cultures.iter().cloned().collect();
        self.0.lock().unwrap().push((scope.to_vec(), stage, set));
    }
}

fn benchmark() -> SupervisedSet {
    let config = SynthConfig {
        n_cultures: 25,
        n_days: 8,
        noise: 0.01,
        seed: 3,
    };
    window(
        &synthesize_piecewise(&config).unwrap(),
        &["X", "U"],
        "X",
        1,
        false,
    )
    .unwrap()
    .set
}

#[test]
fn no_training_stage_sees_held_out_cultures() {
    let data = benchmark();
    let plan = plan_folds(&data.culture_ids(), 5, 11).unwrap();
    let recorder = Recorder::default();
    let opts = EvalOptions {
        jobs: Jobs::Auto,
        observer: &recorder,
    };
    let grid = GridSpec::new(vec![0.2, 0.5]).unwrap();
    nested_cv(
        &data,
        &plan,
        &grid,
        3,
        &ClusterConfig::default(),
        1.0,
        &opts,
    )
    .unwrap();
    feature_selection(&data, &plan, 3, &ClusterConfig::default(), 1.0, 3, &opts).unwrap();

    let events = recorder.0.into_inner().unwrap();
    let mut stages = BTreeSet::new();
    for (scope, stage, cultures) in &events {
        let outer = scope[0];
        let held_out = plan.test_cultures(outer);
        if stage.is_training() {
            assert!(
                cultures.is_disjoint(&held_out),
                "{scope:?} {stage:?} touched held-out cultures"
            );
            stages.insert(format!("{stage:?}"));
        } else if scope.len() == 1 {
            assert_eq!(cultures, &held_out);
        } else {
            assert!(cultures.is_disjoint(&held_out));
        }
    }
    assert_eq!(stages.len(), 3, "{stages:?}");
    assert!(
        events.iter().any(|(s, _, _)| s.len() == 2),
        "inner folds were not reported"
    );
}

#[test]
fn perturbing_test_cultures_leaves_fold_model_unchanged() {
    let data = benchmark();
    let plan = plan_folds(&data.culture_ids(), 5, 11).unwrap();
    let grid = GridSpec::new(vec![0.2, 0.5]).unwrap();
    let run = |d: &SupervisedSet| {
        nested_cv(
            d,
            &plan,
            &grid,
            3,
            &ClusterConfig::default(),
            1.0,
            &EvalOptions::default(),
        )
        .unwrap()
        .without_timings()
    };
    let clean = run(&data);

    let held_out = plan.test_cultures(2);
    let mut poisoned = data.clone();
    for (row, c) in poisoned.inputs.iter_mut().zip(&poisoned.cultures) {
        if held_out.contains(c) {
            row.iter_mut().for_each(|v| *v = *v * 7.0 + 100.0);
        }
    }
    let dirty = run(&poisoned);
    let (a, b) = (&clean.folds[2], &dirty.folds[2]);
    assert_eq!(a.best_theta, b.best_theta);
    assert_eq!(a.search, b.search);
    assert_eq!(a.result.train_rmse, b.result.train_rmse);
    assert_eq!(a.result.boxes, b.result.boxes);
    assert_ne!(a.result.test_rmse, b.result.test_rmse);
}
