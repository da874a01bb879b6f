use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use hmr_core::selection::{CvReport, FeatureSelectionReport, GridSearch, NestedReport};
use serde::Serialize;
use serde_json::{json, Value};

use crate::CliError;

/// Resolved settings of one run, embedded in every report.
#[derive(Debug, Default, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub features: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub missing: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub top_k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expansion_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub folds: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inner_folds: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_folds: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nested: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baseline: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cultures: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub days: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model2: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl RunConfig {
    /// `# key: value` lines heading a text report.
    pub fn header(&self) -> String {
        let mut out = String::new();
        if let Value::Object(map) = serde_json::to_value(self).expect("config serializes") {
            for (key, value) in map {
                let shown = match value {
                    Value::String(s) => s,
                    Value::Array(items) => items
                        .iter()
                        .map(|v| v.as_str().map_or_else(|| v.to_string(), str::to_owned))
                        .collect::<Vec<_>>()
                        .join(","),
                    other => other.to_string(),
                };
                let _ = writeln!(out, "# {key}: {shown}");
            }
        }
        out
    }
}

/// JSON document `{"config": ..., <body>}`, pretty-printed with a trailing newline.
pub fn json_document(config: &RunConfig, body: Value) -> String {
    let mut doc = json!({ "config": config });
    if let (Value::Object(doc), Value::Object(body)) = (&mut doc, body) {
        doc.extend(body);
    }
    let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
    text.push('\n');
    text
}

/// Prints the report and mirrors it to `path` when given.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    print!("{text}");
    if let Some(path) = path {
        std::fs::write(path, text).map_err(|e| {
            CliError::Core(hmr_core::HmrError::Io {
                path: path.to_owned(),
                source: e,
            })
        })?;
    }
    Ok(())
}

pub fn to_value<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("report serializes")
}

pub fn cv_table(report: &CvReport, label: &str, timings: bool) -> String {
    report.to_table(label, timings)
}

pub fn nested_table(report: &NestedReport, timings: bool) -> String {
    let mut out = String::from("fold,best_theta,n_train,n_test,train_rmse,test_rmse,boxes");
    if timings {
        out.push_str(",fit_seconds");
    }
    out.push('\n');
    for f in &report.folds {
        let r = &f.result;
        let _ = write!(
            out,
            "{},{},{},{},{},{},{}",
            r.fold, f.best_theta, r.n_train, r.n_test, r.train_rmse, r.test_rmse, r.boxes
        );
        if timings {
            let _ = write!(out, ",{}", r.fit_seconds.unwrap_or(f64::NAN));
        }
        out.push('\n');
    }
    let s = &report.summary;
    let _ = writeln!(
        out,
        "mean,,,,{},{},{}",
        s.train_rmse_mean, s.test_rmse_mean, s.boxes_mean
    );
    out
}

pub fn grid_table(search: &GridSearch) -> String {
    search.to_table()
}

pub fn featsel_tables(report: &FeatureSelectionReport) -> String {
    let mut out = String::from("fold,rank,feature,correlation\n");
    for f in &report.folds {
        for (rank, e) in f.ranking.entries.iter().enumerate() {
            let _ = writeln!(out, "{},{},{},{}", f.fold, rank + 1, e.name, e.correlation);
        }
    }
    out.push_str("\nfold,k,val_rmse_mean\n");
    for f in &report.folds {
        for (i, v) in f.curve.iter().enumerate() {
            let _ = writeln!(out, "{},{},{v}", f.fold, i + 1);
        }
    }
    out.push_str("\nfold,best_k,selected\n");
    for f in &report.folds {
        let _ = writeln!(out, "{},{},{}", f.fold, f.best_k, f.selected.join(";"));
    }
    let _ = writeln!(out, "\nconsensus,{}", report.consensus.join(";"));
    out
}
