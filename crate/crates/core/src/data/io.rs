//! Long-format culture CSV.
//!
//! ```text
//! # schema: hmr-cultures/1
//! culture_id,day,ECT,EGN,VCD,...
//! c001,1,0,0,0.41,...
//! ```
//!
//! One row per (culture, day). The schema comment line is optional on input
//! and always written on output. Missing cells are empty or `NA`.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::{CultureSeries, DayRecord};
use crate::error::{HmrError, Result};

/// Schema tag written as the first line of culture files.
pub const CULTURE_SCHEMA: &str = "hmr-cultures/1";

/// How the loader treats missing cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingPolicy {
    #[default]
    Reject,
    /// Fill from the same culture's previous day.
    CarryForward,
}

pub fn load_cultures(path: impl AsRef<Path>, missing: MissingPolicy) -> Result<Vec<CultureSeries>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| HmrError::io(path, e))?;
    read_cultures(file, path, missing)
}

/// Parses culture CSV from any reader; `origin` is only used in messages.
pub fn read_cultures<R: Read>(
    reader: R,
    origin: &Path,
    missing: MissingPolicy,
) -> Result<Vec<CultureSeries>> {
    let parse_err = |line: u64, message: String| HmrError::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers = rdr
        .headers()
        .map_err(|e| parse_err(csv_line(&e), e.to_string()))?
        .clone();
    if headers.is_empty() {
        return Ok(Vec::new());
    }
    if headers.get(0) != Some("culture_id") || headers.get(1) != Some("day") {
        return Err(parse_err(
            1,
            "header must start with the columns culture_id,day".into(),
        ));
    }
    let parameters: Vec<String> = headers.iter().skip(2).map(str::to_owned).collect();
    if let Some(dup) = first_duplicate(&parameters) {
        return Err(parse_err(1, format!("duplicate column {dup}")));
    }

    struct Pending {
        series: CultureSeries,
        lines: Vec<u64>,
        gaps: Vec<Vec<bool>>,
    }
    let mut order: Vec<String> = Vec::new();
    let mut by_id: HashMap<String, Pending> = HashMap::new();

    for result in rdr.records() {
        let record = result.map_err(|e| parse_err(csv_line(&e), e.to_string()))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if parameters.is_empty() {
            return Err(parse_err(
                line,
                "no parameter columns after culture_id,day".into(),
            ));
        }
        if record.len() != headers.len() {
            return Err(parse_err(
                line,
                format!("expected {} fields, found {}", headers.len(), record.len()),
            ));
        }
        let culture = record[0].to_owned();
        if culture.is_empty() {
            return Err(parse_err(line, "empty culture_id".into()));
        }
        let day: u32 = record[1].parse().ok().filter(|d| *d >= 1).ok_or_else(|| {
            parse_err(
                line,
                format!("day must be a positive integer, got {:?}", &record[1]),
            )
        })?;

        let mut values = Vec::with_capacity(parameters.len());
        let mut gaps = Vec::with_capacity(parameters.len());
        for (j, cell) in record.iter().skip(2).enumerate() {
            if cell.is_empty() || cell.eq_ignore_ascii_case("na") {
                if missing == MissingPolicy::Reject {
                    return Err(parse_err(
                        line,
                        format!("missing value for {}", parameters[j]),
                    ));
                }
                values.push(f64::NAN);
                gaps.push(true);
                continue;
            }
            let v: f64 = cell
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| {
                    parse_err(
                        line,
                        format!("non-numeric value {cell:?} for {}", parameters[j]),
                    )
                })?;
            values.push(v);
            gaps.push(false);
        }

        let entry = by_id.entry(culture.clone()).or_insert_with(|| {
            order.push(culture.clone());
            Pending {
                series: CultureSeries {
                    culture_id: culture.clone(),
                    parameters: parameters.clone(),
                    records: Vec::new(),
                },
                lines: Vec::new(),
                gaps: Vec::new(),
            }
        });
        if let Some(pos) = entry.series.records.iter().position(|r| r.day == day) {
            return Err(parse_err(
                line,
                format!(
                    "duplicate day {day} for culture {culture} (first seen on line {})",
                    entry.lines[pos]
                ),
            ));
        }
        entry.series.records.push(DayRecord { day, values });
        entry.lines.push(line);
        entry.gaps.push(gaps);
    }

    let mut out = Vec::with_capacity(order.len());
    for id in order {
        let Pending {
            mut series,
            lines,
            gaps,
        } = by_id.remove(&id).expect("culture registered in order");
        let mut idx: Vec<usize> = (0..series.records.len()).collect();
        idx.sort_by_key(|&i| series.records[i].day);
        let mut records: Vec<Option<DayRecord>> = series.records.into_iter().map(Some).collect();
        let mut sorted = Vec::with_capacity(idx.len());
        for (pos, &i) in idx.iter().enumerate() {
            let mut rec = records[i].take().expect("each record moved once");
            for (j, missing_cell) in gaps[i].iter().enumerate() {
                if !missing_cell {
                    continue;
                }
                if pos == 0 {
                    return Err(parse_err(
                        lines[i],
                        format!(
                            "missing {} on the first day of culture {id}; nothing to carry forward",
                            parameters[j]
                        ),
                    ));
                }
                let prev: &DayRecord = &sorted[pos - 1];
                rec.values[j] = prev.values[j];
            }
            sorted.push(rec);
        }
        series.records = sorted;
        out.push(series);
    }
    Ok(out)
}

/// Writes cultures in long format with the schema line.
pub fn write_cultures(path: impl AsRef<Path>, series: &[CultureSeries]) -> Result<()> {
    let path = path.as_ref();
    let mut file = File::create(path).map_err(|e| HmrError::io(path, e))?;
    let mut buf = Vec::new();
    write_cultures_to(&mut buf, series)?;
    file.write_all(&buf).map_err(|e| HmrError::io(path, e))
}

pub(crate) fn write_cultures_to<W: Write>(mut out: W, series: &[CultureSeries]) -> Result<()> {
    let io_err = |e: std::io::Error| HmrError::io("<culture csv>", e);
    writeln!(out, "# schema: {CULTURE_SCHEMA}").map_err(io_err)?;
    let Some(first) = series.first() else {
        writeln!(out, "culture_id,day").map_err(io_err)?;
        return Ok(());
    };
    let mut wtr = csv::Writer::from_writer(out);
    let mut header = vec!["culture_id".to_string(), "day".to_string()];
    header.extend(first.parameters.iter().cloned());
    wtr.write_record(&header).map_err(csv_to_io)?;
    for s in series {
        if s.parameters != first.parameters {
            return Err(HmrError::Data(format!(
                "culture {} has a different parameter set",
                s.culture_id
            )));
        }
        for rec in &s.records {
            let mut row = Vec::with_capacity(header.len());
            row.push(s.culture_id.clone());
            row.push(rec.day.to_string());
            row.extend(rec.values.iter().map(|v| v.to_string()));
            wtr.write_record(&row).map_err(csv_to_io)?;
        }
    }
    wtr.flush().map_err(io_err)
}

fn csv_to_io(e: csv::Error) -> HmrError {
    HmrError::io("<culture csv>", std::io::Error::other(e))
}

fn csv_line(e: &csv::Error) -> u64 {
    e.position().map(|p| p.line()).unwrap_or(0)
}

fn first_duplicate(names: &[String]) -> Option<&str> {
    let mut seen = std::collections::HashSet::new();
    names
        .iter()
        .find(|n| !seen.insert(n.as_str()))
        .map(String::as_str)
}
