use serde::{Deserialize, Serialize};

use super::cv::{cross_validate, CvReport};
use super::folds::FoldPlan;
use super::observe::EvalOptions;
use crate::data::SupervisedSet;
use crate::error::{HmrError, Result};
use crate::hyperbox::ClusterConfig;
use crate::parallel::try_par_map;

/// Mean validation RMSEs closer than this count as a tie, and ties go to the
/// larger θ.
pub const THETA_TIE_TOLERANCE: f64 = 1e-9;

/// Candidate θ values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    theta_values: Vec<f64>,
}

impl GridSpec {
    pub fn new(theta_values: Vec<f64>) -> Result<Self> {
        if theta_values.is_empty() {
            return Err(HmrError::Empty("theta grid"));
        }
        if let Some(bad) = theta_values.iter().find(|t| !(0.0..=1.0).contains(*t)) {
            return Err(HmrError::invalid(format!(
                "grid value {bad} outside [0, 1]"
            )));
        }
        Ok(GridSpec { theta_values })
    }

    /// θ = 0.1, 0.2, …, 0.7.
    pub fn default_grid() -> Self {
        GridSpec {
            theta_values: (1..=7).map(|i| f64::from(i) / 10.0).collect(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.theta_values
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub theta: f64,
    pub report: CvReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSearch {
    pub best_theta: f64,
    pub points: Vec<GridPoint>,
}

impl GridSearch {
    pub fn without_timings(mut self) -> Self {
        self.points = self
            .points
            .into_iter()
            .map(|p| GridPoint {
                theta: p.theta,
                report: p.report.without_timings(),
            })
            .collect();
        self
    }

    /// One row per grid point.
    pub fn to_table(&self) -> String {
        let mut out = String::from(
            "theta,val_rmse_mean,val_rmse_std,train_rmse_mean,boxes_mean,boxes_std,selected\n",
        );
        for p in &self.points {
            let s = &p.report.summary;
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                p.theta,
                s.test_rmse_mean,
                s.test_rmse_std,
                s.train_rmse_mean,
                s.boxes_mean,
                s.boxes_std,
                p.theta == self.best_theta
            ));
        }
        out
    }
}

/// Scores every θ by cross-validation over `plan` on `data` (which should
/// already exclude any outer test cultures) and picks the lowest mean
/// validation RMSE, preferring larger θ among ties.
pub fn grid_search_theta(
    data: &SupervisedSet,
    plan: &FoldPlan,
    grid: &GridSpec,
    base: &ClusterConfig,
    lambda: f64,
    opts: &EvalOptions<'_>,
) -> Result<GridSearch> {
    let reports = try_par_map(grid.values().to_vec(), opts.jobs, |theta| {
        let config = ClusterConfig { theta, ..*base };
        cross_validate(data, plan, &config, lambda, opts).map(|report| GridPoint { theta, report })
    })?;
    let best_theta = pick_theta(&reports);
    Ok(GridSearch {
        best_theta,
        points: reports,
    })
}

fn pick_theta(points: &[GridPoint]) -> f64 {
    let best = points
        .iter()
        .map(|p| p.report.summary.test_rmse_mean)
        .fold(f64::INFINITY, f64::min);
    points
        .iter()
        .filter(|p| p.report.summary.test_rmse_mean <= best + THETA_TIE_TOLERANCE)
        .map(|p| p.theta)
        .fold(f64::NEG_INFINITY, f64::max)
}
