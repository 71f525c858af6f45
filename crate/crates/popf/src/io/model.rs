//! Versioned JSON persistence for trained models.

use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

use crate::calibration::CalibrationModel;
use crate::dataset::{DistanceMetric, LabelMap};
use crate::error::{Error, Result};
use crate::forest::TrainedForest;

/// Current document schema version. Loaders reject anything newer.
pub const FORMAT_VERSION: u32 = 1;

/// On-disk model: the forest, the metric it was trained with, the binary
/// label mapping (when the training data had one) and the optional
/// calibration section.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelDocument {
    pub format_version: u32,
    pub metric: DistanceMetric,
    pub label_map: Option<LabelMap>,
    pub forest: TrainedForest,
    pub calibration: Option<CalibrationModel>,
}

impl ModelDocument {
    pub fn new(
        forest: TrainedForest,
        label_map: Option<LabelMap>,
        calibration: Option<CalibrationModel>,
    ) -> ModelDocument {
        ModelDocument {
            format_version: FORMAT_VERSION,
            metric: forest.metric(),
            label_map,
            forest,
            calibration,
        }
    }

    /// Canonical serialized form: compact JSON plus a trailing newline.
    /// Saving the same document twice yields identical bytes.
    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string(self)
            .map_err(|e| Error::ModelDocument(format!("serialization failed: {e}")))?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<ModelDocument> {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::ModelDocument(format!("invalid JSON: {e}")))?;
        let version = value
            .get("format_version")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| Error::ModelDocument("missing format_version".into()))?;
        if version != u64::from(FORMAT_VERSION) {
            return Err(Error::ModelDocument(format!(
                "unsupported format_version {version}, this build reads {FORMAT_VERSION}"
            )));
        }
        let mut document: ModelDocument = serde_json::from_value(value)
            .map_err(|e| Error::ModelDocument(format!("schema violation: {e}")))?;
        document.forest.rebuild_cache();
        Ok(document)
    }
}

/// Writes the model document to `path`.
pub fn save_model(document: &ModelDocument, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, document.to_json()?)?;
    Ok(())
}

/// Reads a model document back, rejecting unknown versions and malformed
/// content.
pub fn load_model(path: impl AsRef<Path>) -> Result<ModelDocument> {
    let text = fs::read_to_string(path)?;
    ModelDocument::from_json(&text)
}
