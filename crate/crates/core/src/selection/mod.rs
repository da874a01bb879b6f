//! Culture-grouped cross-validation, θ grid search and correlation-ordered
//! forward feature selection.

mod baseline;
mod cv;
mod features;
mod folds;
mod grid;
mod observe;
mod pipeline;

pub use baseline::{linear_baseline_cv, LinearModel};
pub use cv::{
    cross_validate, cross_validate_chained, ChainedReport, CvReport, CvSummary, FoldResult,
};
pub use features::{
    consensus_features, forward_select, pearson, rank_features, FeatureRanking, FeatureScore,
    ForwardSelection,
};
pub use folds::{plan_folds, FoldPlan};
pub use grid::{grid_search_theta, GridPoint, GridSearch, GridSpec, THETA_TIE_TOLERANCE};
pub use observe::{EvalOptions, NoObserver, Observer, Stage};
pub use pipeline::{
    feature_selection, nested_cv, FeatureSelectionFold, FeatureSelectionReport, NestedFold,
    NestedReport,
};

use crate::error::{HmrError, Result};

/// Root mean squared difference between predictions and targets.
pub fn rmse(predictions: &[f64], targets: &[f64]) -> Result<f64> {
    if predictions.is_empty() {
        return Err(HmrError::Empty("prediction vector"));
    }
    HmrError::check_dim(targets.len(), predictions.len())?;
    let sse: f64 = predictions
        .iter()
        .zip(targets)
        .map(|(p, t)| (p - t).powi(2))
        .sum();
    Ok((sse / predictions.len() as f64).sqrt())
}

/// Arithmetic mean and sample standard deviation (n − 1 denominator; 0 for a
/// single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Derives a per-fold seed for inner fold plans.
pub(crate) fn inner_seed(seed: u64, fold: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(fold as u64 + 1)
}
