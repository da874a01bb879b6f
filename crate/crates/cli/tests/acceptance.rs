//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use hmr_core::data::{
    synthesize, synthesize_piecewise, window, ScalerParams, SupervisedSet, SynthConfig,
    PIECEWISE_PARAMETERS,
};
use hmr_core::hyperbox::cluster;
use hmr_core::regressor::{assemble_design, residual_norm, solve_lso, DesignMatrix, LocalExpert};
use hmr_core::selection::{
    feature_selection, linear_baseline_cv, nested_cv, plan_folds, EvalOptions, GridSpec, Observer,
    Stage,
};
use hmr_core::{ClusterConfig, HmrModel, Hyperbox, Jobs, MembershipParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const MEMBERSHIP_CASES: usize = 100_000;
const MEMBERSHIP_BUDGET: Duration = Duration::from_secs(5);
const LSO_INSTANCES: usize = 100;
const LSO_RESIDUAL_TOL: f64 = 1e-6;
const LSO_BUDGET: Duration = Duration::from_secs(10);
const EQUIVALENCE_MODELS: usize = 1000;
const EQUIVALENCE_TOL: f64 = 1e-10;
const EXACT_RMSE_TOL: f64 = 1e-9;
const CONTAINMENT_DATASETS: usize = 50;
const ACCURACY_RATIO: f64 = 0.6;
const PIPELINE_BUDGET: Duration = Duration::from_secs(120);

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn hmr() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hmr"))
}

fn run_cli(args: &[&str]) -> Result<String, String> {
    run_cli_in(Path::new("."), args)
}

fn run_cli_in(dir: &Path, args: &[&str]) -> Result<String, String> {
    let out = hmr()
        .current_dir(dir)
        .args(args)
        .output()
        .map_err(|e| format!("spawn failed: {e}"))?;
    if !out.status.success() {
        return Err(format!(
            "hmr {} exited with {}: {}",
            args.join(" "),
            out.status,
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

fn run_json(args: &[&str]) -> Result<Value, String> {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let text = run_cli(&full)?;
    serde_json::from_str(&text).map_err(|e| format!("bad JSON from hmr {}: {e}", args.join(" ")))
}

fn num(v: &Value, path: &[&str]) -> Result<f64, String> {
    let mut cur = v;
    for key in path {
        cur = &cur[*key];
    }
    cur.as_f64()
        .ok_or_else(|| format!("missing number at {}", path.join(".")))
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

// AC1 ----------------------------------------------------------------------

/// Independent restatement of the membership rule.
fn oracle_membership(min: &[f64], max: &[f64], x: &[f64], lambda: &[f64]) -> f64 {
    let g = |r: f64, l: f64| (r * l).clamp(0.0, 1.0);
    let mut u = 1.0f64;
    for i in 0..x.len() {
        u = u
            .min(1.0 - g(x[i] - max[i], lambda[i]))
            .min(1.0 - g(min[i] - x[i], lambda[i]));
    }
    u
}

fn membership_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let started = Instant::now();
    let mut violations = 0usize;
    for _ in 0..MEMBERSHIP_CASES {
        let n = rng.random_range(1..=6);
        let (mut min, mut max) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for _ in 0..n {
            let a: f64 = rng.random_range(0.0..1.0);
            let b: f64 = rng.random_range(0.0..1.0);
            min.push(a.min(b));
            max.push(a.max(b));
        }
        let lambda: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..10.0)).collect();
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-0.5..1.5)).collect();
        let b = Hyperbox::new(min.clone(), max.clone()).unwrap();
        let params = MembershipParams::new(lambda.clone()).unwrap();
        let u = b.membership(&x, &params).unwrap();
        let inside = (0..n).all(|i| min[i] <= x[i] && x[i] <= max[i]);
        let mut bad = !(0.0..=1.0).contains(&u)
            || (u == 1.0) != inside
            || u != oracle_membership(&min, &max, &x, &lambda);
        // Moving away from the box along one coordinate never raises membership.
        let i = rng.random_range(0..n);
        let mut further = x.clone();
        further[i] += if x[i] > max[i] {
            rng.random_range(0.0..0.5)
        } else if x[i] < min[i] {
            -rng.random_range(0.0..0.5)
        } else {
            0.0
        };
        bad |= b.membership(&further, &params).unwrap() > u;
        violations += usize::from(bad);
    }
    let elapsed = started.elapsed();
    check(
        violations == 0 && elapsed < MEMBERSHIP_BUDGET,
        format!(
            "{MEMBERSHIP_CASES} cases, {violations} violations, {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

// AC2 ----------------------------------------------------------------------

/// Conjugate-gradient least squares from zero: converges to the minimum-norm
/// minimizer without any factorization.
fn cgls(a: &nalgebra::DMatrix<f64>, y: &[f64]) -> Vec<f64> {
    let (m, n) = a.shape();
    let at_mul = |r: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|j| (0..m).map(|i| a[(i, j)] * r[i]).sum())
            .collect()
    };
    let a_mul = |v: &[f64]| -> Vec<f64> {
        (0..m)
            .map(|i| (0..n).map(|j| a[(i, j)] * v[j]).sum())
            .collect()
    };
    let norm2 = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
    let mut x = vec![0.0; n];
    let mut r = y.to_vec();
    let mut s = at_mul(&r);
    let mut p = s.clone();
    let mut gamma = norm2(&s);
    let start = gamma;
    for _ in 0..20 * m.max(n) {
        if gamma <= 1e-24 * start {
            break;
        }
        let q = a_mul(&p);
        let qq = norm2(&q);
        if qq == 0.0 {
            break;
        }
        let alpha = gamma / qq;
        x.iter_mut().zip(&p).for_each(|(xj, pj)| *xj += alpha * pj);
        r.iter_mut().zip(&q).for_each(|(ri, qi)| *ri -= alpha * qi);
        s = at_mul(&r);
        let next = norm2(&s);
        let beta = next / gamma;
        gamma = next;
        p.iter_mut()
            .zip(&s)
            .for_each(|(pj, sj)| *pj = sj + beta * *pj);
    }
    x
}

fn lso_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let started = Instant::now();
    let mut worst = 0.0f64;
    let mut deficient = 0;
    for _ in 0..LSO_INSTANCES {
        let rows = rng.random_range(1..=50);
        let cols = rng.random_range(1..=12);
        let rank = rng.random_range(1..=cols.min(rows));
        let mut a = nalgebra::DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0));
        // Exact copies scaled by powers of two make the deficiency exact.
        for j in rank..cols {
            let src = rng.random_range(0..rank);
            let copy = a.column(src) * f64::powi(2.0, rng.random_range(-2..=2));
            a.set_column(j, &copy);
        }
        deficient += usize::from(rank < cols);
        let y: Vec<f64> = (0..rows).map(|_| rng.random_range(-1.0..1.0)).collect();
        let design = DesignMatrix::from_matrix(a.clone());
        let d = solve_lso(&design, &y).map_err(|e| e.to_string())?;
        let gap =
            (residual_norm(&design, &d, &y) - residual_norm(&design, &cgls(&a, &y), &y)).abs();
        worst = worst.max(gap);
    }
    let elapsed = started.elapsed();
    check(
        worst <= LSO_RESIDUAL_TOL && elapsed < LSO_BUDGET,
        format!(
            "{LSO_INSTANCES} instances ({deficient} rank-deficient), max residual gap {worst:.2e}, {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

// AC3 ----------------------------------------------------------------------

fn layer_matrix_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..EQUIVALENCE_MODELS {
        let n = rng.random_range(1..=4);
        let rows = rng.random_range(2..=40);
        let inputs: Vec<Vec<f64>> = (0..rows)
            .map(|_| (0..n).map(|_| rng.random_range(0.0..1.0)).collect())
            .collect();
        let targets: Vec<f64> = inputs
            .iter()
            .map(|x| x.iter().map(|v| (4.0 * v).cos()).product())
            .collect();
        let config =
            ClusterConfig::new(rng.random_range(0.05..1.0), rng.random_range(1..=4), 0.6).unwrap();
        let params = MembershipParams::uniform(1.0, n).unwrap();
        let model =
            HmrModel::fit_scaled(&inputs, &targets, &config, &params).map_err(|e| e.to_string())?;
        let mut queries = inputs;
        queries.push((0..n).map(|_| rng.random_range(-1.0..2.0)).collect());
        let a = assemble_design(&queries, model.boxes(), model.params()).unwrap();
        let d = model.coefficients();
        for (h, x) in queries.iter().enumerate() {
            let matrix: f64 = a.row(h).iter().zip(&d).map(|(p, q)| p * q).sum();
            worst = worst.max((model.predict_one(x).unwrap() - matrix).abs());
        }
    }
    check(
        worst <= EQUIVALENCE_TOL,
        format!("{EQUIVALENCE_MODELS} models, max |layered - matrix| {worst:.2e}"),
    )
}

// AC4 ----------------------------------------------------------------------

fn degenerate_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let inputs: Vec<Vec<f64>> = (0..200)
        .map(|_| (0..3).map(|_| rng.random_range(0.0..1.0)).collect())
        .collect();
    let targets: Vec<f64> = inputs
        .iter()
        .map(|x| 0.1 + 0.4 * x[0] - 0.2 * x[1] + 0.3 * x[2])
        .collect();
    let config = ClusterConfig::with_theta(1.0).unwrap();
    let params = MembershipParams::uniform(1.0, 3).unwrap();
    let model =
        HmrModel::fit_scaled(&inputs, &targets, &config, &params).map_err(|e| e.to_string())?;
    let sse: f64 = inputs
        .iter()
        .zip(&targets)
        .map(|(x, y)| (model.predict_one(x).unwrap() - y).powi(2))
        .sum();
    let rmse = (sse / targets.len() as f64).sqrt();
    check(
        model.n_boxes() == 1 && rmse < EXACT_RMSE_TOL,
        format!("L={} train RMSE {rmse:.2e}", model.n_boxes()),
    )
}

// AC5 ----------------------------------------------------------------------

fn single_pass_containment() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut uncovered = 0usize;
    let mut samples_seen = 0usize;
    for _ in 0..CONTAINMENT_DATASETS {
        let n = rng.random_range(1..=5);
        let rows = rng.random_range(1..=300);
        let samples: Vec<Vec<f64>> = (0..rows)
            .map(|_| (0..n).map(|_| rng.random_range(0.0..1.0)).collect())
            .collect();
        let config =
            ClusterConfig::new(rng.random_range(0.0..1.0), rng.random_range(1..=5), 0.6).unwrap();
        let params = MembershipParams::uniform(1.0, n).unwrap();
        let boxes = cluster(&samples, &config, &params).map_err(|e| e.to_string())?;
        for x in &samples {
            samples_seen += 1;
            if !boxes
                .iter()
                .any(|b| b.membership(x, &params).unwrap() == 1.0)
            {
                uncovered += 1;
            }
        }
    }
    check(
        uncovered == 0,
        format!("{CONTAINMENT_DATASETS} datasets, {samples_seen} samples, {uncovered} without a full-membership box"),
    )
}

// AC6 ----------------------------------------------------------------------

fn culture_set(features: &[&str], target: &str) -> SupervisedSet {
    let series = synthesize(&SynthConfig::default()).unwrap();
    window(&series, features, target, 1, false).unwrap().set
}

fn complexity_vs_theta() -> Outcome {
    let set = culture_set(&["VCD", "ECT", "Glutamine", "Temperature"], "VCD");
    let params = MembershipParams::uniform(1.0, set.n_features()).unwrap();
    let boxes = |theta: f64| {
        HmrModel::fit(&set, &ClusterConfig::with_theta(theta).unwrap(), &params)
            .map(|m| m.n_boxes())
    };
    let (low, high) = (
        boxes(0.1).map_err(|e| e.to_string())?,
        boxes(0.7).map_err(|e| e.to_string())?,
    );
    check(high < low, format!("L(0.1)={low}, L(0.7)={high}"))
}

// AC7 ----------------------------------------------------------------------

fn accuracy_vs_linear(dir: &Path) -> Outcome {
    let started = Instant::now();
    let data = dir.join("piecewise.csv");
    let data = path_str(&data);
    run_cli(&[
        "synth",
        "--generator",
        "piecewise",
        "--cultures",
        "106",
        "--days",
        "15",
        "--seed",
        "7",
        "-o",
        data,
    ])?;
    let report = run_json(&[
        "cv",
        "--data",
        data,
        "--target",
        "X",
        "--features",
        "X,U",
        "--folds",
        "5",
        "--nested",
        "--baseline",
        "--seed",
        "7",
    ])?;
    let elapsed = started.elapsed();
    let hmr = num(&report, &["nested", "summary", "test_rmse_mean"])?;
    let linear = num(&report, &["baseline", "summary", "test_rmse_mean"])?;
    check(
        hmr <= ACCURACY_RATIO * linear && elapsed < PIPELINE_BUDGET,
        format!(
            "tuned HMR {hmr:.4} vs linear {linear:.4} (ratio {:.3}, limit {ACCURACY_RATIO}), {:.1}s",
            hmr / linear,
            elapsed.as_secs_f64()
        ),
    )
}

// AC8 ----------------------------------------------------------------------

fn lag_feature_ranked_first(dir: &Path) -> Outcome {
    let data = dir.join("cultures.csv");
    let data = path_str(&data);
    run_cli(&[
        "synth",
        "--cultures",
        "106",
        "--days",
        "15",
        "--seed",
        "7",
        "-o",
        data,
    ])?;
    let report = run_json(&[
        "featsel", "--data", data, "--target", "mAb", "--folds", "5", "--seed", "7",
    ])?;
    let folds = report["featsel"]["folds"]
        .as_array()
        .ok_or("no folds in featsel report")?;
    let firsts: Vec<&str> = folds
        .iter()
        .map(|f| f["ranking"]["entries"][0]["name"].as_str().unwrap_or("?"))
        .collect();
    let consensus: Vec<&str> = report["featsel"]["consensus"]
        .as_array()
        .ok_or("no consensus")?
        .iter()
        .filter_map(Value::as_str)
        .collect();
    check(
        folds.len() == 5 && firsts.iter().all(|f| *f == "mAb") && consensus.contains(&"mAb"),
        format!(
            "top feature per fold {firsts:?}; consensus has mAb: {}",
            consensus.contains(&"mAb")
        ),
    )
}

// AC9 ----------------------------------------------------------------------

fn pass_through_model(first: &HmrModel) -> HmrModel {
    let n = first.n_features() + 1;
    let mut names = first.feature_names().to_vec();
    names.push(format!("{}(t+1)", first.target_name()));
    let mut slope = vec![0.0; n];
    slope[n - 1] = 1.0;
    HmrModel::from_parts(
        vec![Hyperbox::new(vec![0.0; n], vec![1.0; n]).unwrap()],
        vec![LocalExpert {
            slope,
            intercept: 0.0,
        }],
        MembershipParams::uniform(1.0, n).unwrap(),
        ClusterConfig::with_theta(1.0).unwrap(),
        ScalerParams::identity(n),
        names,
        first.target_name(),
    )
    .unwrap()
}

fn horizon_two_pipeline(dir: &Path) -> Outcome {
    let data = dir.join("piecewise.csv");
    let data = path_str(&data);
    let m1 = dir.join("h1.json");
    let m2 = dir.join("pass.json");
    let preds = dir.join("preds.csv");
    run_cli(&[
        "train",
        "--data",
        data,
        "--target",
        "X",
        "--features",
        "X,U",
        "-o",
        path_str(&m1),
    ])?;
    let first = HmrModel::load(&m1).map_err(|e| e.to_string())?;
    pass_through_model(&first)
        .save(&m2)
        .map_err(|e| e.to_string())?;
    run_cli(&[
        "predict",
        "--data",
        data,
        "--model",
        path_str(&m1),
        "--model2",
        path_str(&m2),
        "--horizon",
        "2",
        "-o",
        path_str(&preds),
    ])?;
    let text = std::fs::read_to_string(&preds).map_err(|e| e.to_string())?;
    let mut rows = 0;
    let mut mismatched = 0;
    for line in text.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        rows += 1;
        mismatched += usize::from(cells.len() != 4 || cells[2] != cells[3]);
    }

    let chained = run_json(&[
        "cv",
        "--data",
        data,
        "--target",
        "X",
        "--features",
        "X,U",
        "--horizon",
        "2",
        "--folds",
        "5",
        "--seed",
        "7",
    ])?;
    let h1 = num(&chained, &["horizon1", "summary", "test_rmse_mean"])?;
    let h2 = num(&chained, &["horizon2", "summary", "test_rmse_mean"])?;
    check(
        rows > 0 && mismatched == 0 && h2 >= h1,
        format!(
            "{rows} chained rows, {mismatched} with t+2 != t+1; test RMSE h1 {h1:.4}, h2 {h2:.4}"
        ),
    )
}

// AC10 ---------------------------------------------------------------------

type Event = (Vec<usize>, Stage, BTreeSet<String>);

#[derive(Default)]
struct Recorder(Mutex<Vec<Event>>);

impl Observer for Recorder {
    fn observe(&self, scope: &[usize], stage: Stage, cultures: &[String]) {
        self.0
            .lock()
            .unwrap()
            .push((scope.to_vec(), stage, cultures.iter().cloned().collect()));
    }
}

fn group_integrity() -> Outcome {
    let series = synthesize_piecewise(&SynthConfig {
        n_cultures: 40,
        n_days: 10,
        noise: 0.02,
        seed: 10,
    })
    .unwrap();
    let set = window(&series, &PIECEWISE_PARAMETERS, "X", 1, false)
        .unwrap()
        .set;
    let plan = plan_folds(&set.culture_ids(), 5, 10).unwrap();
    let recorder = Recorder::default();
    let opts = EvalOptions {
        jobs: Jobs::Auto,
        observer: &recorder,
    };
    let grid = GridSpec::new(vec![0.2, 0.4, 0.7]).unwrap();
    let base = ClusterConfig::default();
    nested_cv(&set, &plan, &grid, 4, &base, 1.0, &opts).map_err(|e| e.to_string())?;
    feature_selection(&set, &plan, 4, &base, 1.0, 3, &opts).map_err(|e| e.to_string())?;
    linear_baseline_cv(&set, &plan, &opts).map_err(|e| e.to_string())?;
    let events = recorder.0.into_inner().unwrap();

    // Each scope's held-out set is what it evaluates on.
    let mut held_out: BTreeMap<Vec<usize>, BTreeSet<String>> = BTreeMap::new();
    for (scope, stage, cultures) in &events {
        if *stage == Stage::Evaluate {
            held_out
                .entry(scope.clone())
                .or_default()
                .extend(cultures.iter().cloned());
        }
    }
    let mut leaks = 0;
    let mut stages = BTreeSet::new();
    for (scope, stage, cultures) in events.iter().filter(|e| e.1.is_training()) {
        stages.insert(format!("{stage:?}"));
        // Training at any depth must avoid the held-out cultures of every enclosing scope.
        for depth in 1..=scope.len() {
            if let Some(test) = held_out.get(&scope[..depth]) {
                leaks += usize::from(!cultures.is_disjoint(test));
            }
        }
        leaks += usize::from(!cultures.is_disjoint(&plan.test_cultures(scope[0])));
    }

    // Rewriting held-out data must not change anything fitted for that fold.
    let fold = 1;
    let mut poisoned = set.clone();
    let test = plan.test_cultures(fold);
    for (row, c) in poisoned.inputs.iter_mut().zip(&poisoned.cultures) {
        if test.contains(c) {
            row.iter_mut().for_each(|v| *v = -*v * 3.0 + 50.0);
        }
    }
    let run = |d: &SupervisedSet| {
        nested_cv(d, &plan, &grid, 4, &base, 1.0, &EvalOptions::default())
            .map(|r| r.without_timings())
    };
    let (clean, dirty) = (
        run(&set).map_err(|e| e.to_string())?,
        run(&poisoned).map_err(|e| e.to_string())?,
    );
    let (a, b) = (&clean.folds[fold], &dirty.folds[fold]);
    let unchanged = a.search == b.search
        && a.best_theta == b.best_theta
        && a.result.train_rmse == b.result.train_rmse
        && a.result.boxes == b.result.boxes;

    check(
        leaks == 0 && stages.len() == 3 && unchanged,
        format!(
            "{} events over {} scopes, training stages {stages:?}, {leaks} leaks; poisoned fold unchanged: {unchanged}",
            events.len(),
            held_out.len()
        ),
    )
}

// AC11 ---------------------------------------------------------------------

/// Runs every command from `dir` with relative paths, so reports from
/// different directories can be compared byte for byte.
fn pipeline_outputs(dir: &Path, jobs: &str) -> Result<Vec<(String, Vec<u8>)>, String> {
    std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
    let run = |args: &[&str]| run_cli_in(dir, args);
    run(&[
        "synth",
        "--generator",
        "piecewise",
        "--cultures",
        "30",
        "--days",
        "12",
        "--seed",
        "3",
        "-o",
        "data.csv",
    ])?;
    run(&[
        "train",
        "--data",
        "data.csv",
        "--target",
        "X",
        "--theta",
        "0.3",
        "-o",
        "model.json",
    ])?;
    run(&[
        "train",
        "--data",
        "data.csv",
        "--target",
        "X",
        "--horizon",
        "2",
        "-o",
        "model2.json",
    ])?;
    run(&[
        "predict",
        "--data",
        "data.csv",
        "--model",
        "model.json",
        "--model2",
        "model2.json",
        "--horizon",
        "2",
        "-o",
        "preds.csv",
    ])?;
    let common = [
        "--data", "data.csv", "--target", "X", "--seed", "3", "--jobs", jobs,
    ];
    run(&[
        &["cv", "--nested", "--baseline"][..],
        &common,
        &["-o", "cv.txt"],
    ]
    .concat())?;
    run(&[&["--json", "tune"][..], &common, &["-o", "tune.json"]].concat())?;
    run(&[&["featsel"][..], &common, &["-o", "featsel.txt"]].concat())?;

    [
        "data.csv",
        "model.json",
        "model2.json",
        "preds.csv",
        "cv.txt",
        "tune.json",
        "featsel.txt",
    ]
    .iter()
    .map(|name| {
        Ok((
            name.to_string(),
            std::fs::read(dir.join(name)).map_err(|e| e.to_string())?,
        ))
    })
    .collect()
}

fn determinism(dir: &Path) -> Outcome {
    let first = pipeline_outputs(&dir.join("run1"), "0")?;
    let second = pipeline_outputs(&dir.join("run2"), "0")?;
    let serial = pipeline_outputs(&dir.join("run3"), "1")?;
    let differing: Vec<&str> = first
        .iter()
        .zip(second.iter().zip(&serial))
        .filter(|(a, (b, c))| a.1 != b.1 || a.1 != c.1)
        .map(|(a, _)| a.0.as_str())
        .collect();
    check(
        differing.is_empty(),
        format!("{} files compared across 3 runs (parallel, parallel, serial); differing: {differing:?}", first.len()),
    )
}

fn main() {
    let tmp = tempfile::tempdir().expect("temp dir");
    let dir: PathBuf = tmp.path().to_owned();
    type Criterion = (&'static str, &'static str, Box<dyn Fn() -> Outcome>);
    let criteria: Vec<Criterion> = vec![
        (
            "AC1",
            "membership correctness",
            Box::new(membership_correctness),
        ),
        ("AC2", "LSO oracle equivalence", Box::new(lso_oracle)),
        (
            "AC3",
            "layer/matrix equivalence",
            Box::new(layer_matrix_equivalence),
        ),
        (
            "AC4",
            "degenerate exactness",
            Box::new(degenerate_exactness),
        ),
        (
            "AC5",
            "single-pass containment",
            Box::new(single_pass_containment),
        ),
        ("AC6", "complexity vs theta", Box::new(complexity_vs_theta)),
        (
            "AC7",
            "accuracy vs linear baseline",
            Box::new({
                let d = dir.clone();
                move || accuracy_vs_linear(&d)
            }),
        ),
        (
            "AC8",
            "lag feature ranked first",
            Box::new({
                let d = dir.clone();
                move || lag_feature_ranked_first(&d)
            }),
        ),
        (
            "AC9",
            "horizon-2 pipeline",
            Box::new({
                let d = dir.clone();
                move || horizon_two_pipeline(&d)
            }),
        ),
        ("AC10", "group integrity", Box::new(group_integrity)),
        (
            "AC11",
            "determinism",
            Box::new({
                let d = dir.clone();
                move || determinism(&d)
            }),
        ),
    ];

    let mut failed = 0;
    for (id, name, f) in &criteria {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {id} {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {id} {name}: {detail} [{secs:.1}s]");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
