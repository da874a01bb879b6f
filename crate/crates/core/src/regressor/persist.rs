//! Model file: one pretty-printed JSON object.
//!
//! Field order is fixed and documented in the repository README:
//! `schema`, `feature_names`, `target_name`, `theta`, `top_k`,
//! `expansion_fraction`, `lambda`, `scaler`, `boxes`, `experts`.
//! Floats are written in shortest round-trip form, so a saved and reloaded
//! model predicts bit-for-bit the same values.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::model::{HmrModel, LocalExpert};
use crate::data::ScalerParams;
use crate::error::{HmrError, Result};
use crate::hyperbox::{ClusterConfig, Hyperbox, MembershipParams};

/// Schema tag stored in every model file.
pub const MODEL_SCHEMA: &str = "hmr-model/1";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    schema: String,
    feature_names: Vec<String>,
    target_name: String,
    theta: f64,
    top_k: usize,
    expansion_fraction: f64,
    lambda: Vec<f64>,
    scaler: ScalerParams,
    boxes: Vec<BoxEntry>,
    experts: Vec<LocalExpert>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoxEntry {
    min: Vec<f64>,
    max: Vec<f64>,
}

impl HmrModel {
    pub fn to_json(&self) -> String {
        let file = ModelFile {
            schema: MODEL_SCHEMA.to_owned(),
            feature_names: self.feature_names.clone(),
            target_name: self.target_name.clone(),
            theta: self.config.theta,
            top_k: self.config.top_k,
            expansion_fraction: self.config.expansion_fraction,
            lambda: self.params.lambda().to_vec(),
            scaler: self.scaler.clone(),
            boxes: self
                .boxes
                .iter()
                .map(|b| BoxEntry {
                    min: b.min().to_vec(),
                    max: b.max().to_vec(),
                })
                .collect(),
            experts: self.experts.clone(),
        };
        let mut text = serde_json::to_string_pretty(&file).expect("model serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile =
            serde_json::from_str(text).map_err(|e| HmrError::ModelFormat(e.to_string()))?;
        if file.schema != MODEL_SCHEMA {
            return Err(HmrError::ModelFormat(format!(
                "unsupported schema {:?}, expected {MODEL_SCHEMA:?}",
                file.schema
            )));
        }
        let wrap = |e: HmrError| HmrError::ModelFormat(e.to_string());
        let boxes = file
            .boxes
            .into_iter()
            .map(|b| Hyperbox::new(b.min, b.max))
            .collect::<Result<Vec<_>>>()
            .map_err(wrap)?;
        HmrModel::from_parts(
            boxes,
            file.experts,
            MembershipParams::new(file.lambda).map_err(wrap)?,
            ClusterConfig::new(file.theta, file.top_k, file.expansion_fraction).map_err(wrap)?,
            file.scaler,
            file.feature_names,
            file.target_name,
        )
        .map_err(wrap)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| HmrError::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| HmrError::io(path, e))?;
        HmrModel::from_json(&text)
            .map_err(|e| HmrError::ModelFormat(format!("{}: {e}", path.display())))
    }
}
