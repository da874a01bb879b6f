//! Culture time series, their CSV form, supervised windowing and scaling.

mod io;
mod scaler;
mod synth;
mod window;

pub use io::{load_cultures, read_cultures, write_cultures, MissingPolicy, CULTURE_SCHEMA};
pub use scaler::ScalerParams;
pub use synth::{
    synthesize, synthesize_piecewise, SynthConfig, PARAMETER_NAMES, PIECEWISE_PARAMETERS,
};
pub use window::{target_column_name, window, SupervisedSet, WindowWarning, Windowed};

use crate::error::{HmrError, Result};

/// One day of measurements for a culture.
#[derive(Debug, Clone, PartialEq)]
pub struct DayRecord {
    /// 1-based culture day.
    pub day: u32,
    /// Values in the order of the owning series' `parameters`.
    pub values: Vec<f64>,
}

/// Multi-day record of one bioreactor run.
#[derive(Debug, Clone, PartialEq)]
pub struct CultureSeries {
    pub culture_id: String,
    pub parameters: Vec<String>,
    pub records: Vec<DayRecord>,
}

impl CultureSeries {
    /// Checks that days are strictly increasing from 1 upward and that every
    /// record carries one value per parameter.
    pub fn validate(&self) -> Result<()> {
        let mut prev = 0u32;
        for rec in &self.records {
            if rec.day <= prev {
                return Err(HmrError::Data(format!(
                    "culture {}: day {} does not follow day {}",
                    self.culture_id, rec.day, prev
                )));
            }
            if rec.values.len() != self.parameters.len() {
                return Err(HmrError::Data(format!(
                    "culture {} day {}: {} values for {} parameters",
                    self.culture_id,
                    rec.day,
                    rec.values.len(),
                    self.parameters.len()
                )));
            }
            prev = rec.day;
        }
        Ok(())
    }

    pub fn parameter_index(&self, name: &str) -> Option<usize> {
        self.parameters.iter().position(|p| p == name)
    }

    pub fn record(&self, day: u32) -> Option<&DayRecord> {
        self.records
            .binary_search_by_key(&day, |r| r.day)
            .ok()
            .map(|i| &self.records[i])
    }

    /// Values of one parameter across all days.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.parameter_index(name)?;
        Some(self.records.iter().map(|r| r.values[idx]).collect())
    }

    pub fn n_days(&self) -> usize {
        self.records.len()
    }
}
