//! CSV ingestion and emission. One numeric column holds the integer class
//! tag; every other column is a feature.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::dataset::{Dataset, Sample};
use crate::error::{Error, Result};

/// Loads a CSV file. `label_column` is the 0-based index of the class
/// column; the remaining columns become features in order.
pub fn load_csv(path: impl AsRef<Path>, label_column: usize, has_header: bool) -> Result<Dataset> {
    let path = path.as_ref();
    let mut reader = ::csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(false)
        .from_path(path)
        .map_err(|e| csv_error(e, 1))?;

    let mut samples = Vec::new();
    let mut dimension = None;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e
                .position()
                .map(|p| p.line() as usize)
                .unwrap_or(samples.len() + 1);
            csv_error(e, line)
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() < 2 {
            return Err(Error::Parse {
                line,
                message: "rows need at least one feature and a label".into(),
            });
        }
        if label_column >= record.len() {
            return Err(Error::Parse {
                line,
                message: format!(
                    "label column {label_column} out of range for {} columns",
                    record.len()
                ),
            });
        }
        let mut features = Vec::with_capacity(record.len() - 1);
        let mut label = 0i64;
        for (i, field) in record.iter().enumerate() {
            if i == label_column {
                label = field.trim().parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("non-integer label {field:?}"),
                })?;
            } else {
                features.push(field.trim().parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("non-numeric feature {field:?}"),
                })?);
            }
        }
        match dimension {
            None => dimension = Some(features.len()),
            Some(d) if d != features.len() => {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {d} features, found {}", features.len()),
                })
            }
            _ => {}
        }
        samples.push(Sample::new(features, label));
    }
    if samples.is_empty() {
        return Err(Error::Parse { line: 1, message: "empty dataset file".into() });
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "csv".to_string());
    Dataset::new(name, dimension.unwrap(), samples)
}

fn csv_error(e: ::csv::Error, fallback_line: usize) -> Error {
    let line = e
        .position()
        .map(|p| p.line() as usize)
        .unwrap_or(fallback_line);
    Error::Parse { line, message: e.to_string() }
}

/// Writes features followed by the label, one row per sample, no header.
/// The inverse of `load_csv(path, dimension, false)`.
pub fn write_csv<W: Write>(dataset: &Dataset, mut writer: W) -> std::io::Result<()> {
    for s in &dataset.samples {
        for f in &s.features {
            write!(writer, "{f},")?;
        }
        writeln!(writer, "{}", s.label)?;
    }
    Ok(())
}

/// Saves a dataset as CSV with the label in the last column.
pub fn save_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let mut file = File::create(path)?;
    write_csv(dataset, &mut file)?;
    Ok(())
}
