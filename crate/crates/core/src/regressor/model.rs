use serde::{Deserialize, Serialize};

use super::design::{assemble_design, dot, mixing_weights};
use super::lso::solve_lso;
use crate::data::{ScalerParams, SupervisedSet};
use crate::error::{HmrError, Result};
use crate::hyperbox::{cluster, ClusterConfig, Hyperbox, MembershipParams};

/// Affine expert attached to one hyperbox.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalExpert {
    pub slope: Vec<f64>,
    pub intercept: f64,
}

impl LocalExpert {
    pub fn eval(&self, x: &[f64]) -> f64 {
        dot(&self.slope, x) + self.intercept
    }
}

/// Trained hyperbox mixture regressor.
///
/// Boxes, experts and memberships all live in the scaled feature space; the
/// stored scaler maps raw measurements into it and predictions back out.
#[derive(Debug, Clone, PartialEq)]
pub struct HmrModel {
    pub(crate) config: ClusterConfig,
    pub(crate) params: MembershipParams,
    pub(crate) feature_names: Vec<String>,
    pub(crate) target_name: String,
    pub(crate) scaler: ScalerParams,
    pub(crate) boxes: Vec<Hyperbox>,
    pub(crate) experts: Vec<LocalExpert>,
}

impl HmrModel {
    /// Fits the scaler on `train`, then clusters and solves on scaled data.
    pub fn fit(
        train: &SupervisedSet,
        config: &ClusterConfig,
        params: &MembershipParams,
    ) -> Result<Self> {
        if train.is_empty() {
            return Err(HmrError::Empty("training set"));
        }
        let scaler = ScalerParams::fit(train)?;
        let scaled = scaler.apply(train)?;
        let mut model = HmrModel::fit_scaled(&scaled.inputs, &scaled.targets, config, params)?;
        model.scaler = scaler;
        model.feature_names = train.feature_names.clone();
        model.target_name = train.target_name.clone();
        Ok(model)
    }

    /// Fits on data already scaled to the unit cube. The returned model has an
    /// identity scaler and placeholder names `x1..xn`, `y`.
    pub fn fit_scaled(
        inputs: &[Vec<f64>],
        targets: &[f64],
        config: &ClusterConfig,
        params: &MembershipParams,
    ) -> Result<Self> {
        config.validate()?;
        if inputs.is_empty() {
            return Err(HmrError::Empty("training set"));
        }
        HmrError::check_dim(inputs.len(), targets.len())?;
        let n = inputs[0].len();
        HmrError::check_dim(n, params.dim())?;

        let boxes = cluster(inputs, config, params)?;
        let design = assemble_design(inputs, &boxes, params)?;
        let coeffs = solve_lso(&design, targets)?;
        let experts = coeffs
            .chunks(n + 1)
            .map(|c| LocalExpert {
                slope: c[..n].to_vec(),
                intercept: c[n],
            })
            .collect();
        Ok(HmrModel {
            config: *config,
            params: params.clone(),
            feature_names: (1..=n).map(|i| format!("x{i}")).collect(),
            target_name: "y".into(),
            scaler: ScalerParams::identity(n),
            boxes,
            experts,
        })
    }

    /// Assembles a model from explicit parts.
    pub fn from_parts(
        boxes: Vec<Hyperbox>,
        experts: Vec<LocalExpert>,
        params: MembershipParams,
        config: ClusterConfig,
        scaler: ScalerParams,
        feature_names: Vec<String>,
        target_name: impl Into<String>,
    ) -> Result<Self> {
        let model = HmrModel {
            config,
            params,
            feature_names,
            target_name: target_name.into(),
            scaler,
            boxes,
            experts,
        };
        model.validate()?;
        Ok(model)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        self.config.validate()?;
        let n = self.params.dim();
        HmrError::check_dim(n, self.feature_names.len())?;
        HmrError::check_dim(n, self.scaler.n_features())?;
        HmrError::check_dim(n, self.scaler.feature_max.len())?;
        HmrError::check_dim(self.boxes.len(), self.experts.len())?;
        for b in &self.boxes {
            HmrError::check_dim(n, b.dim())?;
        }
        for e in &self.experts {
            HmrError::check_dim(n, e.slope.len())?;
        }
        Ok(())
    }

    fn ensure_trained(&self) -> Result<()> {
        if self.boxes.is_empty() || self.experts.len() != self.boxes.len() {
            return Err(HmrError::Untrained("no hyperboxes or expert coefficients"));
        }
        Ok(())
    }

    /// Prediction in scaled space: membership-weighted mix of the experts.
    pub fn predict_one(&self, x_scaled: &[f64]) -> Result<f64> {
        self.ensure_trained()?;
        HmrError::check_dim(self.n_features(), x_scaled.len())?;
        Ok(self.predict_unchecked(x_scaled))
    }

    fn predict_unchecked(&self, x: &[f64]) -> f64 {
        let weights = mixing_weights(&self.boxes, x, &self.params);
        weights
            .iter()
            .zip(&self.experts)
            .map(|(w, e)| w * e.eval(x))
            .sum()
    }

    /// Prediction in raw units for a raw feature vector.
    pub fn predict(&self, x_raw: &[f64]) -> Result<f64> {
        self.ensure_trained()?;
        let x = self.scaler.scale_features(x_raw)?;
        Ok(self.scaler.unscale_target(self.predict_unchecked(&x)))
    }

    /// Scaled-space predictions for a batch of raw rows.
    pub fn predict_scaled_batch(&self, raw_rows: &[Vec<f64>]) -> Result<Vec<f64>> {
        self.ensure_trained()?;
        raw_rows
            .iter()
            .map(|row| {
                let x = self.scaler.scale_features(row)?;
                Ok(self.predict_unchecked(&x))
            })
            .collect()
    }

    /// Flattened coefficient vector `[d_1, r_1, …, d_L, r_L]`.
    pub fn coefficients(&self) -> Vec<f64> {
        self.experts
            .iter()
            .flat_map(|e| e.slope.iter().copied().chain(std::iter::once(e.intercept)))
            .collect()
    }

    pub fn boxes(&self) -> &[Hyperbox] {
        &self.boxes
    }

    pub fn experts(&self) -> &[LocalExpert] {
        &self.experts
    }

    pub fn n_boxes(&self) -> usize {
        self.boxes.len()
    }

    pub fn n_features(&self) -> usize {
        self.params.dim()
    }

    pub fn params(&self) -> &MembershipParams {
        &self.params
    }

    pub fn config(&self) -> &ClusterConfig {
        &self.config
    }

    pub fn scaler(&self) -> &ScalerParams {
        &self.scaler
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn target_name(&self) -> &str {
        &self.target_name
    }
}

/// Two-step forecast: the first model's day-ahead prediction is appended to
/// `x_raw` as the last input of the second model. Works in raw units, so each
/// model applies its own scaler.
pub fn predict_recursive(
    model_h1: &HmrModel,
    model_h2: &HmrModel,
    x_raw: &[f64],
) -> Result<(f64, f64)> {
    HmrError::check_dim(model_h1.n_features() + 1, model_h2.n_features())?;
    let first = model_h1.predict(x_raw)?;
    let mut chained = Vec::with_capacity(x_raw.len() + 1);
    chained.extend_from_slice(x_raw);
    chained.push(first);
    let second = model_h2.predict(&chained)?;
    Ok((first, second))
}
