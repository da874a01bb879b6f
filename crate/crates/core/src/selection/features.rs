use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::cv::cross_validate;
use super::folds::FoldPlan;
use super::grid::THETA_TIE_TOLERANCE;
use super::observe::{EvalOptions, Stage};
use crate::data::SupervisedSet;
use crate::error::{HmrError, Result};
use crate::hyperbox::ClusterConfig;
use crate::parallel::try_par_map;

/// Pearson correlation; 0 when either side is constant.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    if n < 2 {
        return 0.0;
    }
    let mean = |v: &[f64]| v[..n].iter().sum::<f64>() / n as f64;
    let (ma, mb) = (mean(a), mean(b));
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let (da, db) = (a[i] - ma, b[i] - mb);
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if saa <= 0.0 || sbb <= 0.0 {
        return 0.0;
    }
    (sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureScore {
    pub name: String,
    pub correlation: f64,
}

/// Features sorted by descending |correlation| with the target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRanking {
    pub entries: Vec<FeatureScore>,
}

impl FeatureRanking {
    pub fn names(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.name.clone()).collect()
    }

    pub fn top(&self, k: usize) -> Vec<String> {
        self.entries
            .iter()
            .take(k)
            .map(|e| e.name.clone())
            .collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Ranks features by absolute Pearson correlation with the target. Ties keep
/// the input column order.
pub fn rank_features(train: &SupervisedSet) -> Result<FeatureRanking> {
    if train.len() < 2 {
        return Err(HmrError::invalid("ranking needs at least 2 samples"));
    }
    let first = train.targets[0];
    if train.targets.iter().all(|y| *y == first) {
        return Err(HmrError::Data(
            "target is constant; correlations are undefined".into(),
        ));
    }
    let mut entries: Vec<FeatureScore> = train
        .feature_names
        .iter()
        .enumerate()
        .map(|(j, name)| FeatureScore {
            name: name.clone(),
            correlation: pearson(&train.column(j), &train.targets),
        })
        .collect();
    entries.sort_by(|a, b| b.correlation.abs().total_cmp(&a.correlation.abs()));
    Ok(FeatureRanking { entries })
}

/// Validation RMSE as the top-ranked features are added one at a time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForwardSelection {
    /// Smallest number of leading features whose mean validation RMSE is
    /// within the tie tolerance of the lowest.
    pub best_k: usize,
    /// `curve[k - 1]` is the mean validation RMSE using the top `k` features.
    pub curve: Vec<f64>,
}

impl ForwardSelection {
    pub fn selected(&self, ranking: &FeatureRanking) -> Vec<String> {
        ranking.top(self.best_k)
    }
}

/// For k = 1..n, cross-validates the model on the top-k ranked features.
pub fn forward_select(
    train: &SupervisedSet,
    ranking: &FeatureRanking,
    plan_inner: &FoldPlan,
    config: &ClusterConfig,
    lambda: f64,
    opts: &EvalOptions<'_>,
) -> Result<ForwardSelection> {
    if ranking.len() != train.n_features() {
        return Err(HmrError::DimensionMismatch {
            expected: train.n_features(),
            found: ranking.len(),
        });
    }
    if ranking.is_empty() {
        return Err(HmrError::Empty("feature ranking"));
    }
    let names = ranking.names();
    let curve = try_par_map((1..=names.len()).collect(), opts.jobs, |k| {
        let subset = train.select_features(&names[..k])?;
        cross_validate(&subset, plan_inner, config, lambda, opts).map(|r| r.summary.test_rmse_mean)
    })?;
    let best = curve.iter().copied().fold(f64::INFINITY, f64::min);
    let best_k = curve
        .iter()
        .position(|v| *v <= best + THETA_TIE_TOLERANCE)
        .map_or(1, |i| i + 1);
    Ok(ForwardSelection { best_k, curve })
}

/// Features present in at least `min_folds` of the per-fold selections, in
/// order of first appearance.
pub fn consensus_features<S: AsRef<str>>(
    per_fold_topk: &[Vec<S>],
    min_folds: usize,
) -> Result<Vec<String>> {
    if min_folds == 0 {
        return Err(HmrError::invalid("min_folds must be at least 1"));
    }
    if per_fold_topk.len() < min_folds {
        return Err(HmrError::invalid(format!(
            "consensus over {} folds cannot require {min_folds}",
            per_fold_topk.len()
        )));
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    let mut order: Vec<&str> = Vec::new();
    for fold in per_fold_topk {
        let mut seen = std::collections::HashSet::new();
        for f in fold {
            let f = f.as_ref();
            if !seen.insert(f) {
                continue;
            }
            let c = counts.entry(f).or_insert(0);
            if *c == 0 {
                order.push(f);
            }
            *c += 1;
        }
    }
    Ok(order
        .into_iter()
        .filter(|f| counts[f] >= min_folds)
        .map(str::to_owned)
        .collect())
}

pub(crate) fn observe_rank(opts: &EvalOptions<'_>, train: &SupervisedSet) {
    opts.observer.observe(&[], Stage::Rank, &train.cultures);
}
