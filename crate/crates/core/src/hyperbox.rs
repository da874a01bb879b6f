//! Hyperbox fuzzy sets and the single-pass min-max clustering that builds
//! the first layer of the model.
//!
//! A hyperbox is an axis-aligned box `[min, max]` in the scaled feature cube.
//! Points inside it have membership 1; outside, membership decays linearly per
//! dimension at rate λ and the box reports the worst dimension.

use serde::{Deserialize, Serialize};

use crate::error::{HmrError, Result};

/// Axis-aligned box with per-dimension minima and maxima.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperbox {
    min: Vec<f64>,
    max: Vec<f64>,
}

impl Hyperbox {
    /// Builds a box from its corners. Fails unless both corners have the same
    /// nonzero length and `min[i] <= max[i]` everywhere.
    pub fn new(min: Vec<f64>, max: Vec<f64>) -> Result<Self> {
        if min.is_empty() {
            return Err(HmrError::Empty("hyperbox corners"));
        }
        HmrError::check_dim(min.len(), max.len())?;
        for (i, (lo, hi)) in min.iter().zip(&max).enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(HmrError::invalid(format!(
                    "non-finite corner in dimension {i}"
                )));
            }
            if lo > hi {
                return Err(HmrError::invalid(format!(
                    "inverted corner in dimension {i}: {lo} > {hi}"
                )));
            }
        }
        Ok(Hyperbox { min, max })
    }

    /// Degenerate box `min = max = x`.
    pub fn point(x: &[f64]) -> Result<Self> {
        Hyperbox::new(x.to_vec(), x.to_vec())
    }

    pub fn min(&self) -> &[f64] {
        &self.min
    }

    pub fn max(&self) -> &[f64] {
        &self.max
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.min.iter().zip(&self.max))
                .all(|(xi, (lo, hi))| lo <= xi && xi <= hi)
    }

    /// Fuzzy membership of `x` in this box.
    pub fn membership(&self, x: &[f64], params: &MembershipParams) -> Result<f64> {
        HmrError::check_dim(self.dim(), x.len())?;
        HmrError::check_dim(self.dim(), params.dim())?;
        Ok(self.membership_unchecked(x, params))
    }

    pub(crate) fn membership_unchecked(&self, x: &[f64], params: &MembershipParams) -> f64 {
        let mut u = 1.0f64;
        for (((xi, lo), hi), lambda) in x.iter().zip(&self.min).zip(&self.max).zip(&params.lambda) {
            let above = 1.0 - clamp_ramp(xi - hi, *lambda);
            let below = 1.0 - clamp_ramp(lo - xi, *lambda);
            u = u.min(above.min(below));
        }
        u
    }

    /// Whether absorbing `x` keeps enough dimensions within the expansion
    /// limit θ.
    pub fn can_expand(&self, x: &[f64], config: &ClusterConfig) -> Result<bool> {
        HmrError::check_dim(self.dim(), x.len())?;
        Ok(self.can_expand_unchecked(x, config))
    }

    fn can_expand_unchecked(&self, x: &[f64], config: &ClusterConfig) -> bool {
        let passing = x
            .iter()
            .zip(self.min.iter().zip(&self.max))
            .filter(|(xi, (lo, hi))| config.theta >= hi.max(**xi) - lo.min(**xi))
            .count();
        passing >= config.required_dims(x.len())
    }

    /// Returns the smallest box containing both `self` and `x`.
    pub fn expand(&self, x: &[f64]) -> Result<Hyperbox> {
        HmrError::check_dim(self.dim(), x.len())?;
        let mut out = self.clone();
        out.expand_in_place(x);
        Ok(out)
    }

    fn expand_in_place(&mut self, x: &[f64]) {
        for ((lo, hi), xi) in self.min.iter_mut().zip(self.max.iter_mut()).zip(x) {
            *lo = lo.min(*xi);
            *hi = hi.max(*xi);
        }
    }
}

/// Per-dimension sensitivity coefficients λ of the membership ramp.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipParams {
    lambda: Vec<f64>,
}

impl MembershipParams {
    pub fn new(lambda: Vec<f64>) -> Result<Self> {
        if lambda.is_empty() {
            return Err(HmrError::Empty("sensitivity vector"));
        }
        if let Some(bad) = lambda.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(HmrError::invalid(format!(
                "sensitivity must be finite and > 0, got {bad}"
            )));
        }
        Ok(MembershipParams { lambda })
    }

    /// Same λ in every one of `dim` dimensions.
    pub fn uniform(lambda: f64, dim: usize) -> Result<Self> {
        MembershipParams::new(vec![lambda; dim])
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn dim(&self) -> usize {
        self.lambda.len()
    }
}

/// Settings for the single-pass clustering stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterConfig {
    /// Largest per-dimension extent a box may reach, in `[0, 1]`.
    pub theta: f64,
    /// How many of the best-matching boxes are tried before a new one is made.
    pub top_k: usize,
    /// Fraction of dimensions that must respect θ for an expansion.
    pub expansion_fraction: f64,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        ClusterConfig {
            theta: 0.3,
            top_k: 3,
            expansion_fraction: 0.6,
        }
    }
}

impl ClusterConfig {
    pub fn new(theta: f64, top_k: usize, expansion_fraction: f64) -> Result<Self> {
        let cfg = ClusterConfig {
            theta,
            top_k,
            expansion_fraction,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_theta(theta: f64) -> Result<Self> {
        ClusterConfig::new(theta, 3, 0.6)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(HmrError::invalid(format!(
                "theta must lie in [0, 1], got {}",
                self.theta
            )));
        }
        if self.top_k == 0 {
            return Err(HmrError::invalid("top_k must be at least 1"));
        }
        if !(self.expansion_fraction > 0.0 && self.expansion_fraction <= 1.0) {
            return Err(HmrError::invalid(format!(
                "expansion_fraction must lie in (0, 1], got {}",
                self.expansion_fraction
            )));
        }
        Ok(())
    }

    /// Dimensions that must pass the θ test: `ceil(fraction · n)`.
    pub fn required_dims(&self, n: usize) -> usize {
        (self.expansion_fraction * n as f64).ceil() as usize
    }
}

/// Clamped linear ramp: `clamp(r · λ, 0, 1)`.
pub fn ramp(r: f64, lambda: f64) -> Result<f64> {
    if !r.is_finite() || !lambda.is_finite() {
        return Err(HmrError::invalid("ramp arguments must be finite"));
    }
    if lambda <= 0.0 {
        return Err(HmrError::invalid(format!(
            "sensitivity must be > 0, got {lambda}"
        )));
    }
    Ok(clamp_ramp(r, lambda))
}

#[inline]
fn clamp_ramp(r: f64, lambda: f64) -> f64 {
    (r * lambda).clamp(0.0, 1.0)
}

/// Up to `k` boxes ordered by descending membership of `x`; ties go to the
/// older (lower index) box.
pub fn rank_winners(
    boxes: &[Hyperbox],
    x: &[f64],
    params: &MembershipParams,
    k: usize,
) -> Result<Vec<(usize, f64)>> {
    if k == 0 {
        return Err(HmrError::invalid("k must be at least 1"));
    }
    HmrError::check_dim(params.dim(), x.len())?;
    for b in boxes {
        HmrError::check_dim(b.dim(), x.len())?;
    }
    Ok(rank_unchecked(boxes, x, params, k))
}

fn rank_unchecked(
    boxes: &[Hyperbox],
    x: &[f64],
    params: &MembershipParams,
    k: usize,
) -> Vec<(usize, f64)> {
    let mut scored: Vec<(usize, f64)> = boxes
        .iter()
        .enumerate()
        .map(|(i, b)| (i, b.membership_unchecked(x, params)))
        .collect();
    let by_rank = |a: &(usize, f64), b: &(usize, f64)| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0));
    let k = k.min(scored.len());
    if k > 0 && k < scored.len() {
        scored.select_nth_unstable_by(k - 1, by_rank);
        scored.truncate(k);
    }
    scored.sort_by(by_rank);
    scored
}

/// Single pass over `samples` in order. Each sample expands the first of its
/// top-K winners that passes the θ test, or seeds a new point box.
pub fn cluster(
    samples: &[Vec<f64>],
    config: &ClusterConfig,
    params: &MembershipParams,
) -> Result<Vec<Hyperbox>> {
    config.validate()?;
    let Some(first) = samples.first() else {
        return Ok(Vec::new());
    };
    let n = first.len();
    if n == 0 {
        return Err(HmrError::Empty("feature vector"));
    }
    HmrError::check_dim(n, params.dim())?;

    let mut boxes: Vec<Hyperbox> = Vec::new();
    for x in samples {
        HmrError::check_dim(n, x.len())?;
        if let Some(bad) = x.iter().find(|v| !v.is_finite()) {
            return Err(HmrError::invalid(format!("non-finite sample value {bad}")));
        }
        let winner = rank_unchecked(&boxes, x, params, config.top_k)
            .into_iter()
            .map(|(idx, _)| idx)
            .find(|&idx| boxes[idx].can_expand_unchecked(x, config));
        match winner {
            Some(idx) => boxes[idx].expand_in_place(x),
            None => boxes.push(Hyperbox::point(x)?),
        }
    }
    Ok(boxes)
}
