use nalgebra::{DMatrix, DVector};

use super::design::DesignMatrix;
use crate::error::{HmrError, Result};

/// Relative singular-value cutoff of the pseudo-inverse.
pub const SVD_RELATIVE_CUTOFF: f64 = 1e-10;

/// Minimum-norm least-squares solution of `A·D ≈ Y` through a truncated SVD
/// pseudo-inverse. Singular values below `1e-10 · σ_max` are discarded, so
/// rank-deficient systems are solved rather than rejected.
pub fn solve_lso(a: &DesignMatrix, y: &[f64]) -> Result<Vec<f64>> {
    let (rows, cols) = (a.rows(), a.cols());
    if rows == 0 || cols == 0 {
        return Err(HmrError::Empty("design matrix"));
    }
    HmrError::check_dim(rows, y.len())?;
    if a.0.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(HmrError::Numeric(
            "non-finite entry in least-squares system".into(),
        ));
    }
    let rhs = DVector::from_column_slice(y);

    // Tall systems are first reduced to the square triangular factor R of
    // A = QR; R has the same singular values and right singular vectors.
    let (mat, rhs): (DMatrix<f64>, DVector<f64>) = if rows > cols {
        let qr = a.0.clone().qr();
        let qt_y = qr.q().tr_mul(&rhs);
        (qr.r(), qt_y)
    } else {
        (a.0.clone(), rhs)
    };

    let svd = mat.svd(true, true);
    let (Some(u), Some(v_t)) = (svd.u.as_ref(), svd.v_t.as_ref()) else {
        return Err(HmrError::Numeric(
            "SVD did not return singular vectors".into(),
        ));
    };
    let sigma_max = svd.singular_values.max();
    if sigma_max == 0.0 {
        return Ok(vec![0.0; cols]);
    }
    let cutoff = SVD_RELATIVE_CUTOFF * sigma_max;

    let mut projected = u.tr_mul(&rhs);
    for (p, s) in projected.iter_mut().zip(svd.singular_values.iter()) {
        *p = if *s > cutoff { *p / s } else { 0.0 };
    }
    let d = v_t.tr_mul(&projected);
    if d.iter().any(|v| !v.is_finite()) {
        return Err(HmrError::Numeric(
            "least-squares solution is not finite".into(),
        ));
    }
    Ok(d.iter().copied().collect())
}

/// Euclidean norm of `A·D − Y`.
pub fn residual_norm(a: &DesignMatrix, d: &[f64], y: &[f64]) -> f64 {
    let d = DVector::from_column_slice(d);
    let fitted = &a.0 * d;
    fitted
        .iter()
        .zip(y)
        .map(|(f, t)| (f - t).powi(2))
        .sum::<f64>()
        .sqrt()
}
