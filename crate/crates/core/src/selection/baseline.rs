use serde::{Deserialize, Serialize};

use super::cv::{split, CvReport, CvSummary, FoldResult};
use super::folds::FoldPlan;
use super::observe::{EvalOptions, Observer, Scoped, Stage};
use super::rmse;
use crate::data::{ScalerParams, SupervisedSet};
use crate::error::{HmrError, Result};
use crate::parallel::try_par_map;
use crate::regressor::{solve_lso, DesignMatrix};

/// Single global affine model fitted by least squares in scaled space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub scaler: ScalerParams,
    pub slope: Vec<f64>,
    pub intercept: f64,
}

impl LinearModel {
    pub fn fit(train: &SupervisedSet) -> Result<Self> {
        let scaler = ScalerParams::fit(train)?;
        let scaled = scaler.apply(train)?;
        let n = train.n_features();
        let mut a = nalgebra::DMatrix::<f64>::zeros(scaled.len(), n + 1);
        for (h, row) in scaled.inputs.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                a[(h, j)] = *v;
            }
            a[(h, n)] = 1.0;
        }
        let coeffs = solve_lso(&DesignMatrix::from_matrix(a), &scaled.targets)?;
        Ok(LinearModel {
            scaler,
            slope: coeffs[..n].to_vec(),
            intercept: coeffs[n],
        })
    }

    pub fn predict_scaled(&self, raw: &[f64]) -> Result<f64> {
        let x = self.scaler.scale_features(raw)?;
        Ok(x.iter().zip(&self.slope).map(|(a, b)| a * b).sum::<f64>() + self.intercept)
    }
}

/// Grouped cross-validation of the global linear baseline.
pub fn linear_baseline_cv(
    data: &SupervisedSet,
    plan: &FoldPlan,
    opts: &EvalOptions<'_>,
) -> Result<CvReport> {
    let folds = try_par_map((0..plan.k()).collect(), opts.jobs, |fold| {
        let (train, test) = split(data, plan, fold)?;
        if test.is_empty() || train.is_empty() {
            return Err(HmrError::Data(format!("fold {fold} is empty")));
        }
        let scope = Scoped {
            parent: opts.observer,
            fold,
        };
        scope.observe(&[], Stage::Scale, &train.cultures);
        scope.observe(&[], Stage::Fit, &train.cultures);
        let model = LinearModel::fit(&train)?;
        let score = |set: &SupervisedSet| -> Result<f64> {
            let pred = set
                .inputs
                .iter()
                .map(|r| model.predict_scaled(r))
                .collect::<Result<Vec<_>>>()?;
            let target: Vec<f64> = set
                .targets
                .iter()
                .map(|y| model.scaler.scale_target(*y))
                .collect();
            rmse(&pred, &target)
        };
        let train_rmse = score(&train)?;
        scope.observe(&[], Stage::Evaluate, &test.cultures);
        Ok(FoldResult {
            fold,
            n_train: train.len(),
            n_test: test.len(),
            test_cultures: test.culture_ids(),
            train_rmse,
            test_rmse: score(&test)?,
            boxes: 1,
            fit_seconds: None,
        })
    })?;
    Ok(CvReport {
        k: plan.k(),
        seed: plan.seed(),
        theta: 1.0,
        top_k: 1,
        expansion_fraction: 1.0,
        lambda: 1.0,
        features: data.feature_names.clone(),
        target: data.target_name.clone(),
        horizon: data.horizon,
        summary: CvSummary::from_folds(&folds),
        folds,
    })
}
