use std::collections::{BTreeSet, HashSet};
use std::io::Write;
use std::path::Path;

use super::CultureSeries;
use crate::error::{HmrError, Result};

/// Windowed design rows: `inputs[h]` observed on `days[h]` of culture
/// `cultures[h]`, target taken `horizon` days later.
#[derive(Debug, Clone, PartialEq)]
pub struct SupervisedSet {
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
    pub cultures: Vec<String>,
    pub days: Vec<u32>,
    pub feature_names: Vec<String>,
    pub target_name: String,
    pub horizon: u8,
}

impl SupervisedSet {
    /// Builds a set from raw arrays, checking shapes.
    pub fn from_rows(
        inputs: Vec<Vec<f64>>,
        targets: Vec<f64>,
        cultures: Vec<String>,
        feature_names: Vec<String>,
        target_name: impl Into<String>,
    ) -> Result<Self> {
        HmrError::check_dim(inputs.len(), targets.len())?;
        HmrError::check_dim(inputs.len(), cultures.len())?;
        for row in &inputs {
            HmrError::check_dim(feature_names.len(), row.len())?;
        }
        let days = vec![0; inputs.len()];
        Ok(SupervisedSet {
            inputs,
            targets,
            cultures,
            days,
            feature_names,
            target_name: target_name.into(),
            horizon: 1,
        })
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    /// Distinct culture ids in order of first appearance.
    pub fn culture_ids(&self) -> Vec<String> {
        let mut seen = HashSet::new();
        self.cultures
            .iter()
            .filter(|c| seen.insert(c.as_str()))
            .cloned()
            .collect()
    }

    /// Rows whose culture satisfies `keep`.
    pub fn filter_cultures(&self, keep: impl Fn(&str) -> bool) -> SupervisedSet {
        let idx: Vec<usize> = (0..self.len())
            .filter(|&i| keep(&self.cultures[i]))
            .collect();
        self.take_rows(&idx)
    }

    pub fn subset(&self, cultures: &BTreeSet<String>) -> SupervisedSet {
        self.filter_cultures(|c| cultures.contains(c))
    }

    pub fn take_rows(&self, idx: &[usize]) -> SupervisedSet {
        SupervisedSet {
            inputs: idx.iter().map(|&i| self.inputs[i].clone()).collect(),
            targets: idx.iter().map(|&i| self.targets[i]).collect(),
            cultures: idx.iter().map(|&i| self.cultures[i].clone()).collect(),
            days: idx.iter().map(|&i| self.days[i]).collect(),
            feature_names: self.feature_names.clone(),
            target_name: self.target_name.clone(),
            horizon: self.horizon,
        }
    }

    /// Keeps only the named features, in the given order.
    pub fn select_features<S: AsRef<str>>(&self, names: &[S]) -> Result<SupervisedSet> {
        let cols = names
            .iter()
            .map(|n| {
                let n = n.as_ref();
                self.feature_names
                    .iter()
                    .position(|f| f == n)
                    .ok_or_else(|| HmrError::Data(format!("unknown feature {n}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SupervisedSet {
            inputs: self
                .inputs
                .iter()
                .map(|row| cols.iter().map(|&c| row[c]).collect())
                .collect(),
            feature_names: names.iter().map(|n| n.as_ref().to_owned()).collect(),
            ..self.clone()
        })
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.inputs.iter().map(|r| r[j]).collect()
    }

    /// Writes `culture_id,day,<features>,<target>` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        let err = |e: csv::Error| HmrError::io("<supervised csv>", std::io::Error::other(e));
        let mut header = vec!["culture_id".to_string(), "day".to_string()];
        header.extend(self.feature_names.iter().cloned());
        header.push(target_column_name(&self.target_name, self.horizon));
        wtr.write_record(&header).map_err(err)?;
        for i in 0..self.len() {
            let mut row = vec![self.cultures[i].clone(), self.days[i].to_string()];
            row.extend(self.inputs[i].iter().map(|v| v.to_string()));
            row.push(self.targets[i].to_string());
            wtr.write_record(&row).map_err(err)?;
        }
        wtr.flush().map_err(|e| HmrError::io("<supervised csv>", e))
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        std::fs::write(path, buf).map_err(|e| HmrError::io(path, e))
    }
}

/// Column label for a target `horizon` days ahead, e.g. `mAb(t+1)`.
pub fn target_column_name(target: &str, horizon: u8) -> String {
    format!("{target}(t+{horizon})")
}

/// A culture left out of a windowed set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowWarning {
    pub culture_id: String,
    pub days: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Windowed {
    pub set: SupervisedSet,
    pub warnings: Vec<WindowWarning>,
}

/// Turns culture series into supervised rows.
///
/// Horizon 1 pairs the features on day `t` with the target on day `t+1`.
/// Horizon 2 targets day `t+2`; with `include_intermediate` the target's
/// day-`t+1` value is appended as the last input, named `<target>(t+1)`.
/// Rows never span two cultures. Cultures with too few days are skipped and
/// reported in `warnings`.
pub fn window<S: AsRef<str>>(
    series: &[CultureSeries],
    feature_names: &[S],
    target_name: &str,
    horizon: u8,
    include_intermediate: bool,
) -> Result<Windowed> {
    if !(1..=2).contains(&horizon) {
        return Err(HmrError::invalid(format!(
            "horizon must be 1 or 2, got {horizon}"
        )));
    }
    if include_intermediate && horizon != 2 {
        return Err(HmrError::invalid(
            "intermediate target input needs horizon 2",
        ));
    }
    if feature_names.is_empty() {
        return Err(HmrError::Empty("feature list"));
    }
    let mut names: Vec<String> = feature_names
        .iter()
        .map(|s| s.as_ref().to_owned())
        .collect();
    if include_intermediate {
        names.push(target_column_name(target_name, 1));
    }

    let mut set = SupervisedSet {
        inputs: Vec::new(),
        targets: Vec::new(),
        cultures: Vec::new(),
        days: Vec::new(),
        feature_names: names,
        target_name: target_name.to_owned(),
        horizon,
    };
    let mut warnings = Vec::new();

    for s in series {
        s.validate()?;
        let cols = feature_names
            .iter()
            .map(|n| {
                s.parameter_index(n.as_ref()).ok_or_else(|| {
                    HmrError::Data(format!(
                        "culture {} has no parameter {}",
                        s.culture_id,
                        n.as_ref()
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let target = s.parameter_index(target_name).ok_or_else(|| {
            HmrError::Data(format!(
                "culture {} has no parameter {target_name}",
                s.culture_id
            ))
        })?;

        if s.n_days() < horizon as usize + 1 {
            warnings.push(WindowWarning {
                culture_id: s.culture_id.clone(),
                days: s.n_days(),
                message: format!(
                    "culture {} has {} day(s); horizon {horizon} needs at least {}",
                    s.culture_id,
                    s.n_days(),
                    horizon + 1
                ),
            });
            continue;
        }

        for rec in &s.records {
            let Some(ahead) = s.record(rec.day + horizon as u32) else {
                continue;
            };
            let mut row: Vec<f64> = cols.iter().map(|&c| rec.values[c]).collect();
            if include_intermediate {
                let Some(next) = s.record(rec.day + 1) else {
                    continue;
                };
                row.push(next.values[target]);
            }
            set.inputs.push(row);
            set.targets.push(ahead.values[target]);
            set.cultures.push(s.culture_id.clone());
            set.days.push(rec.day);
        }
    }
    for w in &warnings {
        log::warn!("{}", w.message);
    }
    Ok(Windowed { set, warnings })
}
