use nalgebra::DMatrix;

use crate::error::{HmrError, Result};
use crate::hyperbox::{Hyperbox, MembershipParams};

/// Normalizes memberships into mixing weights that sum to one.
///
/// When every membership is zero the weights fall back to `1/L`.
pub fn normalize_memberships(memberships: &[f64]) -> Result<Vec<f64>> {
    if memberships.is_empty() {
        return Err(HmrError::Empty("membership vector"));
    }
    let mut weights = memberships.to_vec();
    normalize_in_place(&mut weights);
    Ok(weights)
}

pub(crate) fn normalize_in_place(weights: &mut [f64]) {
    let total: f64 = weights.iter().sum();
    if total > 0.0 {
        weights.iter_mut().for_each(|w| *w /= total);
    } else {
        let uniform = 1.0 / weights.len() as f64;
        weights.iter_mut().for_each(|w| *w = uniform);
    }
}

/// Affine local model `slope · x + intercept`.
pub fn local_expert(x: &[f64], slope: &[f64], intercept: f64) -> Result<f64> {
    HmrError::check_dim(slope.len(), x.len())?;
    Ok(dot(slope, x) + intercept)
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

/// Normalized weights of `x` over `boxes`.
pub(crate) fn mixing_weights(boxes: &[Hyperbox], x: &[f64], params: &MembershipParams) -> Vec<f64> {
    let mut w: Vec<f64> = boxes
        .iter()
        .map(|b| b.membership_unchecked(x, params))
        .collect();
    normalize_in_place(&mut w);
    w
}

/// The N × L·(n+1) linear system whose row `h` holds, for every box `l`, the
/// block `[w_hl·x_h1, …, w_hl·x_hn, w_hl]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix(pub(crate) DMatrix<f64>);

impl DesignMatrix {
    pub fn from_matrix(m: DMatrix<f64>) -> Self {
        DesignMatrix(m)
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[(row, col)]
    }

    pub fn row(&self, row: usize) -> Vec<f64> {
        self.0.row(row).iter().copied().collect()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }
}

/// Fills one design row for sample `x` into `out` (length L·(n+1)).
pub(crate) fn design_row_into(
    boxes: &[Hyperbox],
    x: &[f64],
    params: &MembershipParams,
    out: &mut [f64],
) {
    let n = x.len();
    let weights = mixing_weights(boxes, x, params);
    for (l, w) in weights.iter().enumerate() {
        let block = &mut out[l * (n + 1)..(l + 1) * (n + 1)];
        for (slot, xi) in block[..n].iter_mut().zip(x) {
            *slot = w * xi;
        }
        block[n] = *w;
    }
}

pub fn assemble_design(
    samples: &[Vec<f64>],
    boxes: &[Hyperbox],
    params: &MembershipParams,
) -> Result<DesignMatrix> {
    if boxes.is_empty() {
        return Err(HmrError::Empty("hyperbox list"));
    }
    let n = boxes[0].dim();
    HmrError::check_dim(n, params.dim())?;
    for b in boxes {
        HmrError::check_dim(n, b.dim())?;
    }
    for x in samples {
        HmrError::check_dim(n, x.len())?;
    }
    let cols = boxes.len() * (n + 1);
    let mut m = DMatrix::<f64>::zeros(samples.len(), cols);
    let mut row = vec![0.0; cols];
    for (h, x) in samples.iter().enumerate() {
        design_row_into(boxes, x, params, &mut row);
        for (c, v) in row.iter().enumerate() {
            m[(h, c)] = *v;
        }
    }
    Ok(DesignMatrix(m))
}
