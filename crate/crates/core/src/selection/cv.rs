use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::folds::FoldPlan;
use super::observe::{EvalOptions, Observer, Scoped, Stage};
use super::{mean_std, rmse};
use crate::data::SupervisedSet;
use crate::error::{HmrError, Result};
use crate::hyperbox::{ClusterConfig, MembershipParams};
use crate::parallel::try_par_map;
use crate::regressor::{predict_recursive, HmrModel};

/// Scores of one held-out fold. RMSE values are in the scaled target space of
/// the fold's training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub test_cultures: Vec<String>,
    pub train_rmse: f64,
    pub test_rmse: f64,
    pub boxes: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fit_seconds: Option<f64>,
}

/// Mean ± sample standard deviation across folds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvSummary {
    pub train_rmse_mean: f64,
    pub train_rmse_std: f64,
    pub test_rmse_mean: f64,
    pub test_rmse_std: f64,
    pub boxes_mean: f64,
    pub boxes_std: f64,
}

impl CvSummary {
    pub fn from_folds(folds: &[FoldResult]) -> Self {
        let col = |f: fn(&FoldResult) -> f64| folds.iter().map(f).collect::<Vec<_>>();
        let (train_rmse_mean, train_rmse_std) = mean_std(&col(|f| f.train_rmse));
        let (test_rmse_mean, test_rmse_std) = mean_std(&col(|f| f.test_rmse));
        let (boxes_mean, boxes_std) = mean_std(&col(|f| f.boxes as f64));
        CvSummary {
            train_rmse_mean,
            train_rmse_std,
            test_rmse_mean,
            test_rmse_std,
            boxes_mean,
            boxes_std,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub k: usize,
    pub seed: u64,
    pub theta: f64,
    pub top_k: usize,
    pub expansion_fraction: f64,
    pub lambda: f64,
    pub features: Vec<String>,
    pub target: String,
    pub horizon: u8,
    pub folds: Vec<FoldResult>,
    pub summary: CvSummary,
}

impl CvReport {
    /// Drops wall-clock timings so reports from identical runs compare equal.
    pub fn without_timings(mut self) -> Self {
        for f in &mut self.folds {
            f.fit_seconds = None;
        }
        self
    }

    pub fn total_fit_seconds(&self) -> f64 {
        self.folds.iter().filter_map(|f| f.fit_seconds).sum()
    }

    /// Flat table, one row per fold plus a `mean` and `std` row.
    pub fn to_table(&self, label: &str, timings: bool) -> String {
        let mut out = String::new();
        out.push_str("config,fold,n_train,n_test,train_rmse,test_rmse,boxes");
        if timings {
            out.push_str(",fit_seconds");
        }
        out.push('\n');
        for f in &self.folds {
            out.push_str(&format!(
                "{label},{},{},{},{},{},{}",
                f.fold, f.n_train, f.n_test, f.train_rmse, f.test_rmse, f.boxes
            ));
            if timings {
                out.push_str(&format!(",{}", f.fit_seconds.unwrap_or(f64::NAN)));
            }
            out.push('\n');
        }
        let s = &self.summary;
        out.push_str(&format!(
            "{label},mean,,,{},{},{}",
            s.train_rmse_mean, s.test_rmse_mean, s.boxes_mean
        ));
        if timings {
            out.push_str(&format!(
                ",{}",
                self.total_fit_seconds() / self.folds.len().max(1) as f64
            ));
        }
        out.push('\n');
        out
    }
}

pub(crate) struct FittedFold {
    pub model: HmrModel,
    pub result: FoldResult,
}

/// Fits on `train`, scores on `test`, and reports the data accesses.
pub(crate) fn fit_and_score(
    fold: usize,
    train: &SupervisedSet,
    test: &SupervisedSet,
    config: &ClusterConfig,
    lambda: f64,
    observer: &dyn Observer,
) -> Result<FittedFold> {
    if test.is_empty() {
        return Err(HmrError::Data(format!("fold {fold} has no test samples")));
    }
    if train.is_empty() {
        return Err(HmrError::Data(format!(
            "fold {fold} has no training samples"
        )));
    }
    let params = MembershipParams::uniform(lambda, train.n_features())?;
    observer.observe(&[], Stage::Scale, &train.cultures);
    observer.observe(&[], Stage::Fit, &train.cultures);
    let started = Instant::now();
    let model = HmrModel::fit(train, config, &params)?;
    let fit_seconds = started.elapsed().as_secs_f64();

    let train_rmse = scaled_rmse(&model, train)?;
    observer.observe(&[], Stage::Evaluate, &test.cultures);
    let test_rmse = scaled_rmse(&model, test)?;
    let result = FoldResult {
        fold,
        n_train: train.len(),
        n_test: test.len(),
        test_cultures: test.culture_ids(),
        train_rmse,
        test_rmse,
        boxes: model.n_boxes(),
        fit_seconds: Some(fit_seconds),
    };
    Ok(FittedFold { model, result })
}

fn scaled_rmse(model: &HmrModel, set: &SupervisedSet) -> Result<f64> {
    let pred = model.predict_scaled_batch(&set.inputs)?;
    let target: Vec<f64> = set
        .targets
        .iter()
        .map(|y| model.scaler().scale_target(*y))
        .collect();
    rmse(&pred, &target)
}

pub(crate) fn split(
    data: &SupervisedSet,
    plan: &FoldPlan,
    fold: usize,
) -> Result<(SupervisedSet, SupervisedSet)> {
    for c in &data.cultures {
        if plan.fold_of(c).is_none() {
            return Err(HmrError::Data(format!(
                "culture {c} is not in the fold plan"
            )));
        }
    }
    let train = data.filter_cultures(|c| plan.fold_of(c) != Some(fold));
    let test = data.filter_cultures(|c| plan.fold_of(c) == Some(fold));
    Ok((train, test))
}

fn report(
    data: &SupervisedSet,
    plan: &FoldPlan,
    config: &ClusterConfig,
    lambda: f64,
    folds: Vec<FoldResult>,
) -> CvReport {
    CvReport {
        k: plan.k(),
        seed: plan.seed(),
        theta: config.theta,
        top_k: config.top_k,
        expansion_fraction: config.expansion_fraction,
        lambda,
        features: data.feature_names.clone(),
        target: data.target_name.clone(),
        horizon: data.horizon,
        summary: CvSummary::from_folds(&folds),
        folds,
    }
}

/// Grouped k-fold cross-validation: each fold's cultures are held out in turn
/// while the model (scaler included) is fitted on the rest.
pub fn cross_validate(
    data: &SupervisedSet,
    plan: &FoldPlan,
    config: &ClusterConfig,
    lambda: f64,
    opts: &EvalOptions<'_>,
) -> Result<CvReport> {
    config.validate()?;
    let folds = try_par_map((0..plan.k()).collect(), opts.jobs, |fold| {
        let (train, test) = split(data, plan, fold)?;
        let scope = Scoped {
            parent: opts.observer,
            fold,
        };
        fit_and_score(fold, &train, &test, config, lambda, &scope).map(|f| f.result)
    })?;
    Ok(report(data, plan, config, lambda, folds))
}

/// Reports for a day-ahead model and a chained two-day-ahead model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainedReport {
    pub horizon1: CvReport,
    /// Test RMSE here uses the day-ahead prediction in place of the observed
    /// intermediate value.
    pub horizon2: CvReport,
}

/// Cross-validates the two-day-ahead chain. `h1` holds horizon-1 rows and
/// `h2` horizon-2 rows whose last input is the observed `t+1` target; both
/// must share the leading features. At test time that last input is replaced
/// by the day-ahead model's prediction.
#[allow(clippy::too_many_arguments)]
pub fn cross_validate_chained(
    h1: &SupervisedSet,
    h2: &SupervisedSet,
    plan: &FoldPlan,
    config_h1: &ClusterConfig,
    config_h2: &ClusterConfig,
    lambda: f64,
    opts: &EvalOptions<'_>,
) -> Result<ChainedReport> {
    HmrError::check_dim(h1.n_features() + 1, h2.n_features())?;
    if h1.feature_names[..] != h2.feature_names[..h1.n_features()] {
        return Err(HmrError::Data(
            "horizon-2 features must extend the horizon-1 features".into(),
        ));
    }
    let pairs = try_par_map((0..plan.k()).collect(), opts.jobs, |fold| {
        let scope = Scoped {
            parent: opts.observer,
            fold,
        };
        let (train1, test1) = split(h1, plan, fold)?;
        let (train2, test2) = split(h2, plan, fold)?;
        let first = fit_and_score(fold, &train1, &test1, config_h1, lambda, &scope)?;
        let mut second = fit_and_score(fold, &train2, &test2, config_h2, lambda, &scope)?;

        let n = h1.n_features();
        let scaler = second.model.scaler().clone();
        let mut pred = Vec::with_capacity(test2.len());
        let mut target = Vec::with_capacity(test2.len());
        for (row, y) in test2.inputs.iter().zip(&test2.targets) {
            let (_, t2) = predict_recursive(&first.model, &second.model, &row[..n])?;
            pred.push(scaler.scale_target(t2));
            target.push(scaler.scale_target(*y));
        }
        second.result.test_rmse = rmse(&pred, &target)?;
        Ok::<_, HmrError>((first.result, second.result))
    })?;
    let (r1, r2): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    Ok(ChainedReport {
        horizon1: report(h1, plan, config_h1, lambda, r1),
        horizon2: report(h2, plan, config_h2, lambda, r2),
    })
}
