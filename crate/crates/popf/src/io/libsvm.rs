//! Parser for the sparse LIBSVM text format: `label index:value ...` with
//! 1-based, strictly ascending indices per line. The dataset dimension is
//! the largest feature index seen anywhere in the file; absent indices are
//! zero.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::dataset::{Dataset, Sample};
use crate::error::{Error, Result};

fn parse_line(line: &str, line_number: usize) -> Result<(i64, Vec<(usize, f64)>)> {
    let mut tokens = line.split_whitespace();
    let label_token = tokens.next().ok_or_else(|| Error::Parse {
        line: line_number,
        message: "missing label".into(),
    })?;
    let label: i64 = label_token.parse().map_err(|_| Error::Parse {
        line: line_number,
        message: format!("non-integer label {label_token:?}"),
    })?;

    let mut pairs = Vec::new();
    let mut previous_index = 0usize;
    for token in tokens {
        let (index_str, value_str) = token.split_once(':').ok_or_else(|| Error::Parse {
            line: line_number,
            message: format!("expected index:value, got {token:?}"),
        })?;
        let index: usize = index_str.parse().map_err(|_| Error::Parse {
            line: line_number,
            message: format!("bad feature index {index_str:?}"),
        })?;
        if index == 0 {
            return Err(Error::Parse {
                line: line_number,
                message: "feature indices are 1-based".into(),
            });
        }
        if index <= previous_index {
            return Err(Error::Parse {
                line: line_number,
                message: format!("feature index {index} out of ascending order"),
            });
        }
        let value: f64 = value_str.parse().map_err(|_| Error::Parse {
            line: line_number,
            message: format!("bad feature value {value_str:?}"),
        })?;
        pairs.push((index, value));
        previous_index = index;
    }
    Ok((label, pairs))
}

/// Loads a LIBSVM-format file into a dense dataset.
pub fn load_libsvm(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path)?);
    let mut rows = Vec::new();
    let mut dimension = 0usize;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (label, pairs) = parse_line(&line, i + 1)?;
        if let Some(&(max_index, _)) = pairs.last() {
            dimension = dimension.max(max_index);
        }
        rows.push((label, pairs));
    }
    if rows.is_empty() {
        return Err(Error::Parse { line: 1, message: "empty dataset file".into() });
    }
    if dimension == 0 {
        return Err(Error::Parse {
            line: 1,
            message: "no feature indices anywhere in the file".into(),
        });
    }
    let samples = rows
        .into_iter()
        .map(|(label, pairs)| {
            let mut features = vec![0.0; dimension];
            for (index, value) in pairs {
                features[index - 1] = value;
            }
            Sample::new(features, label)
        })
        .collect();
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "libsvm".to_string());
    Dataset::new(name, dimension, samples)
}
