//! Feature cache CSV: `source_id,f1,...,fN,label`, one row per signal,
//! floats written with 17 significant digits.

use std::path::Path;

use imfclass_core::{Label, LabeledDataset};

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct CacheRow {
    pub source_id: String,
    pub values: Vec<f64>,
    pub label: Label,
}

fn header(dim: usize) -> Vec<String> {
    std::iter::once("source_id".to_string())
        .chain((1..=dim).map(|i| format!("f{i}")))
        .chain(std::iter::once("label".to_string()))
        .collect()
}

pub fn write_cache(path: &Path, rows: &[CacheRow], dim: usize) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::csv(path, e))?;
    w.write_record(header(dim))
        .map_err(|e| CliError::csv(path, e))?;
    for row in rows {
        let mut record = Vec::with_capacity(dim + 2);
        record.push(row.source_id.clone());
        record.extend(row.values.iter().map(|v| format!("{v:.16e}")));
        record.push(row.label.to_string());
        w.write_record(&record)
            .map_err(|e| CliError::csv(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_cache(path: &Path) -> Result<Vec<CacheRow>, CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::csv(path, e))?;
    let found: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::csv(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let dim = found.len().saturating_sub(2);
    if found.len() < 3 || found != header(dim) {
        return Err(CliError::BadHeader {
            path: path.to_path_buf(),
            expected: "source_id,f1..fN,label".into(),
            found: found.join(","),
        });
    }

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::csv(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let bad = |message: String| CliError::BadRecord {
            path: path.to_path_buf(),
            line,
            message,
        };
        let values = (1..=dim)
            .map(|i| {
                record[i]
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| bad(format!("f{i} = {:?} is not a finite number", &record[i])))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        let label = match &record[dim + 1] {
            "0" => 0,
            "1" => 1,
            other => {
                return Err(CliError::BadLabel {
                    path: path.to_path_buf(),
                    line,
                    value: other.to_string(),
                })
            }
        };
        rows.push(CacheRow {
            source_id: record[0].to_string(),
            values,
            label,
        });
    }
    Ok(rows)
}

pub(crate) fn to_dataset(rows: &[CacheRow]) -> Result<LabeledDataset, CliError> {
    Ok(LabeledDataset::new(
        rows.iter().map(|r| r.values.clone()).collect(),
        rows.iter().map(|r| r.label).collect(),
    )?)
}
