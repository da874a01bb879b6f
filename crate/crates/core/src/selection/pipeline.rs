//! Nested procedures: θ tuning and feature selection inside each outer fold.

use serde::{Deserialize, Serialize};

use super::cv::{fit_and_score, split, CvSummary, FoldResult};
use super::features::{
    consensus_features, forward_select, observe_rank, rank_features, FeatureRanking,
};
use super::folds::{plan_folds, FoldPlan};
use super::grid::{grid_search_theta, GridSearch, GridSpec};
use super::inner_seed;
use super::observe::{EvalOptions, Scoped};
use crate::data::SupervisedSet;
use crate::error::Result;
use crate::hyperbox::ClusterConfig;
use crate::parallel::try_par_map;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestedFold {
    pub result: FoldResult,
    pub best_theta: f64,
    pub search: GridSearch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestedReport {
    pub k: usize,
    pub inner_k: usize,
    pub seed: u64,
    pub folds: Vec<NestedFold>,
    pub summary: CvSummary,
}

impl NestedReport {
    pub fn without_timings(mut self) -> Self {
        for f in &mut self.folds {
            f.result.fit_seconds = None;
            f.search = f.search.clone().without_timings();
        }
        self
    }
}

/// Outer grouped CV where each training fold picks its own θ by an inner
/// grouped CV over its cultures only.
pub fn nested_cv(
    data: &SupervisedSet,
    outer: &FoldPlan,
    grid: &GridSpec,
    inner_k: usize,
    base: &ClusterConfig,
    lambda: f64,
    opts: &EvalOptions<'_>,
) -> Result<NestedReport> {
    let folds = try_par_map((0..outer.k()).collect(), opts.jobs, |fold| {
        let scope = Scoped {
            parent: opts.observer,
            fold,
        };
        let scoped = opts.scoped(&scope);
        let (train, test) = split(data, outer, fold)?;
        let inner = plan_folds(
            &train.culture_ids(),
            inner_k,
            inner_seed(outer.seed(), fold),
        )?;
        let search = grid_search_theta(&train, &inner, grid, base, lambda, &scoped)?;
        let config = ClusterConfig {
            theta: search.best_theta,
            ..*base
        };
        let fitted = fit_and_score(fold, &train, &test, &config, lambda, &scope)?;
        Ok(NestedFold {
            result: fitted.result,
            best_theta: search.best_theta,
            search,
        })
    })?;
    let results: Vec<FoldResult> = folds.iter().map(|f| f.result.clone()).collect();
    Ok(NestedReport {
        k: outer.k(),
        inner_k,
        seed: outer.seed(),
        summary: CvSummary::from_folds(&results),
        folds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSelectionFold {
    pub fold: usize,
    pub ranking: FeatureRanking,
    pub curve: Vec<f64>,
    pub best_k: usize,
    pub selected: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSelectionReport {
    pub k: usize,
    pub inner_k: usize,
    pub seed: u64,
    pub theta: f64,
    pub min_folds: usize,
    pub target: String,
    pub folds: Vec<FeatureSelectionFold>,
    pub consensus: Vec<String>,
}

/// Per outer training fold: rank features by correlation, sweep the top-k
/// prefix with an inner grouped CV, keep the best prefix. Features chosen in
/// at least `min_folds` folds form the consensus set.
#[allow(clippy::too_many_arguments)]
pub fn feature_selection(
    data: &SupervisedSet,
    outer: &FoldPlan,
    inner_k: usize,
    config: &ClusterConfig,
    lambda: f64,
    min_folds: usize,
    opts: &EvalOptions<'_>,
) -> Result<FeatureSelectionReport> {
    let folds = try_par_map((0..outer.k()).collect(), opts.jobs, |fold| {
        let scope = Scoped {
            parent: opts.observer,
            fold,
        };
        let scoped = opts.scoped(&scope);
        let (train, _test) = split(data, outer, fold)?;
        observe_rank(&scoped, &train);
        let ranking = rank_features(&train)?;
        let inner = plan_folds(
            &train.culture_ids(),
            inner_k,
            inner_seed(outer.seed(), fold),
        )?;
        let fwd = forward_select(&train, &ranking, &inner, config, lambda, &scoped)?;
        Ok(FeatureSelectionFold {
            fold,
            selected: fwd.selected(&ranking),
            best_k: fwd.best_k,
            curve: fwd.curve,
            ranking,
        })
    })?;
    let selections: Vec<Vec<String>> = folds.iter().map(|f| f.selected.clone()).collect();
    Ok(FeatureSelectionReport {
        k: outer.k(),
        inner_k,
        seed: outer.seed(),
        theta: config.theta,
        min_folds,
        target: data.target_name.clone(),
        consensus: consensus_features(&selections, min_folds)?,
        folds,
    })
}
