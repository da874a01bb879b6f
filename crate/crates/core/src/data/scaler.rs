use serde::{Deserialize, Serialize};

use super::SupervisedSet;
use crate::error::{HmrError, Result};

/// Min-max scaling parameters taken from a training set.
///
/// Features with `max == min` map to 0. Values outside the training range are
/// not clipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub feature_min: Vec<f64>,
    pub feature_max: Vec<f64>,
    pub target_min: f64,
    pub target_max: f64,
}

impl ScalerParams {
    /// Scaler that leaves values untouched.
    pub fn identity(n_features: usize) -> Self {
        ScalerParams {
            feature_min: vec![0.0; n_features],
            feature_max: vec![1.0; n_features],
            target_min: 0.0,
            target_max: 1.0,
        }
    }

    pub fn fit(train: &SupervisedSet) -> Result<Self> {
        ScalerParams::fit_arrays(&train.inputs, &train.targets)
    }

    pub fn fit_arrays(inputs: &[Vec<f64>], targets: &[f64]) -> Result<Self> {
        let Some(first) = inputs.first() else {
            return Err(HmrError::Empty("training set for scaler"));
        };
        HmrError::check_dim(inputs.len(), targets.len())?;
        let n = first.len();
        let mut feature_min = vec![f64::INFINITY; n];
        let mut feature_max = vec![f64::NEG_INFINITY; n];
        for row in inputs {
            HmrError::check_dim(n, row.len())?;
            for (j, v) in row.iter().enumerate() {
                feature_min[j] = feature_min[j].min(*v);
                feature_max[j] = feature_max[j].max(*v);
            }
        }
        let target_min = targets.iter().copied().fold(f64::INFINITY, f64::min);
        let target_max = targets.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(ScalerParams {
            feature_min,
            feature_max,
            target_min,
            target_max,
        })
    }

    pub fn n_features(&self) -> usize {
        self.feature_min.len()
    }

    pub fn scale_features(&self, x: &[f64]) -> Result<Vec<f64>> {
        HmrError::check_dim(self.n_features(), x.len())?;
        Ok(x.iter()
            .enumerate()
            .map(|(j, v)| scale(*v, self.feature_min[j], self.feature_max[j]))
            .collect())
    }

    pub fn scale_target(&self, y: f64) -> f64 {
        scale(y, self.target_min, self.target_max)
    }

    pub fn unscale_target(&self, y: f64) -> f64 {
        let range = self.target_max - self.target_min;
        if range > 0.0 {
            y * range + self.target_min
        } else {
            self.target_min
        }
    }

    /// Scales every row and target of `set`.
    pub fn apply(&self, set: &SupervisedSet) -> Result<SupervisedSet> {
        let inputs = set
            .inputs
            .iter()
            .map(|row| self.scale_features(row))
            .collect::<Result<Vec<_>>>()?;
        let targets = set.targets.iter().map(|y| self.scale_target(*y)).collect();
        Ok(SupervisedSet {
            inputs,
            targets,
            ..set.clone()
        })
    }
}

fn scale(v: f64, lo: f64, hi: f64) -> f64 {
    let range = hi - lo;
    if range > 0.0 {
        (v - lo) / range
    } else {
        0.0
    }
}
