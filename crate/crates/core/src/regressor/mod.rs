//! The four-layer mixture: hyperbox memberships, normalization, affine local
//! experts and their weighted sum, plus the closed-form fit of the experts.

mod design;
mod lso;
mod model;
mod persist;

pub use design::{assemble_design, local_expert, normalize_memberships, DesignMatrix};
pub use lso::{residual_norm, solve_lso, SVD_RELATIVE_CUTOFF};
pub use model::{predict_recursive, HmrModel, LocalExpert};
pub use persist::MODEL_SCHEMA;

use crate::error::Result;

impl HmrModel {
    /// Design-matrix row of a scaled input; `row · coefficients()` equals
    /// [`HmrModel::predict_one`].
    pub fn design_row(&self, x_scaled: &[f64]) -> Result<Vec<f64>> {
        crate::error::HmrError::check_dim(self.n_features(), x_scaled.len())?;
        let mut row = vec![0.0; self.boxes.len() * (self.n_features() + 1)];
        design::design_row_into(&self.boxes, x_scaled, &self.params, &mut row);
        Ok(row)
    }
}
