//! Dataset representation, label conventions, distance functions and the
//! deterministic randomness contract shared by every module.
//!
//! Samples keep both the original integer class tag and a binary label in
//! `{-1, +1}`. The binary form is what the probabilistic path consumes; the
//! original tag is what reports display. The mapping between the two is a
//! [`LabelMap`] attached to the dataset.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A single feature vector with its class tags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub features: Vec<f64>,
    /// Original class tag as found in the data source.
    pub label: i64,
    /// Binary form of `label` under the dataset's [`LabelMap`]; `+1` until a
    /// map is established.
    pub binary_label: i8,
}

impl Sample {
    pub fn new(features: Vec<f64>, label: i64) -> Self {
        Sample { features, label, binary_label: 1 }
    }
}

/// Maps two original class tags onto `{-1, +1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelMap {
    pub positive_label: i64,
    pub negative_label: i64,
}

impl LabelMap {
    /// Binary label of an original tag, or `None` if the tag is not covered.
    pub fn binary_label_of(&self, label: i64) -> Option<i8> {
        if label == self.positive_label {
            Some(1)
        } else if label == self.negative_label {
            Some(-1)
        } else {
            None
        }
    }

    /// Original tag for a binary label.
    pub fn original_label_of(&self, binary: i8) -> i64 {
        if binary > 0 {
            self.positive_label
        } else {
            self.negative_label
        }
    }
}

/// Distance function used to weight graph arcs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMetric {
    #[default]
    Euclidean,
    SquaredEuclidean,
    Manhattan,
}

impl DistanceMetric {
    /// Raw metric over two equal-length slices. Callers validate dimensions.
    pub(crate) fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        match self {
            DistanceMetric::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            DistanceMetric::SquaredEuclidean => {
                a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
            }
            DistanceMetric::Manhattan => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
        }
    }
}

impl fmt::Display for DistanceMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self {
            DistanceMetric::Euclidean => "euclidean",
            DistanceMetric::SquaredEuclidean => "squared_euclidean",
            DistanceMetric::Manhattan => "manhattan",
        };
        f.write_str(tag)
    }
}

impl FromStr for DistanceMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(DistanceMetric::Euclidean),
            "squared_euclidean" => Ok(DistanceMetric::SquaredEuclidean),
            "manhattan" => Ok(DistanceMetric::Manhattan),
            other => Err(Error::InvalidInput(format!("unknown metric {other:?}"))),
        }
    }
}

/// Distance between two samples.
///
/// Symmetric, non-negative, zero on identical vectors.
pub fn distance(a: &Sample, b: &Sample, metric: DistanceMetric) -> Result<f64> {
    if a.features.len() != b.features.len() {
        return Err(Error::InvalidInput(format!(
            "dimension mismatch: {} vs {}",
            a.features.len(),
            b.features.len()
        )));
    }
    Ok(metric.eval(&a.features, &b.features))
}

/// Seed for every stochastic operation in the toolkit.
///
/// Identical seed and identical inputs give bit-identical outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Derives an independent seed for a sub-task (run index, optimizer
    /// stream). splitmix64 decorrelates the streams of nearby salts.
    pub fn derive(&self, salt: u64) -> RngSeed {
        let mut z = (self.0 ^ salt).wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        RngSeed(z ^ (z >> 31))
    }
}

impl Default for RngSeed {
    fn default() -> Self {
        RngSeed(42)
    }
}

/// An ordered, fixed-dimension collection of labeled samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub samples: Vec<Sample>,
    pub dimension: usize,
    /// Present iff the dataset has been mapped onto `{-1, +1}`.
    pub label_map: Option<LabelMap>,
    pub name: String,
}

impl Dataset {
    /// Builds a dataset, validating dimensions. Datasets with exactly two
    /// distinct tags are binarized immediately with the larger tag positive;
    /// use [`Dataset::to_binary`] to pick the positive class explicitly.
    pub fn new(name: impl Into<String>, dimension: usize, samples: Vec<Sample>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        for (i, s) in samples.iter().enumerate() {
            if s.features.len() != dimension {
                return Err(Error::InvalidInput(format!(
                    "sample {} has {} features, expected {}",
                    i,
                    s.features.len(),
                    dimension
                )));
            }
        }
        let mut ds = Dataset { samples, dimension, label_map: None, name: name.into() };
        let labels = ds.distinct_labels();
        if labels.len() == 2 {
            let mut it = labels.iter();
            let lo = *it.next().unwrap();
            let hi = *it.next().unwrap();
            ds.apply_label_map(LabelMap { positive_label: hi, negative_label: lo });
        }
        Ok(ds)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Distinct original tags in ascending order.
    pub fn distinct_labels(&self) -> BTreeSet<i64> {
        self.samples.iter().map(|s| s.label).collect()
    }

    pub fn original_labels(&self) -> Vec<i64> {
        self.samples.iter().map(|s| s.label).collect()
    }

    pub fn binary_labels(&self) -> Vec<i8> {
        self.samples.iter().map(|s| s.binary_label).collect()
    }

    fn apply_label_map(&mut self, map: LabelMap) {
        for s in &mut self.samples {
            // unwrap is fine: callers guarantee the map covers every tag
            s.binary_label = map.binary_label_of(s.label).unwrap();
        }
        self.label_map = Some(map);
    }

    /// Remaps the dataset onto `{-1, +1}` with `positive_label` as the
    /// positive class. Idempotent under the same positive label.
    pub fn to_binary(&self, positive_label: i64) -> Result<Dataset> {
        let labels = self.distinct_labels();
        if labels.len() != 2 {
            return Err(Error::UnsupportedDataset(format!(
                "binary mapping needs exactly 2 classes, found {}",
                labels.len()
            )));
        }
        if !labels.contains(&positive_label) {
            return Err(Error::InvalidInput(format!(
                "positive label {positive_label} not present in dataset"
            )));
        }
        let negative_label = *labels.iter().find(|&&l| l != positive_label).unwrap();
        let mut out = self.clone();
        out.apply_label_map(LabelMap { positive_label, negative_label });
        Ok(out)
    }

    /// New dataset containing the samples at `indices`, in that order.
    pub fn subset(&self, name: impl Into<String>, indices: &[usize]) -> Dataset {
        Dataset {
            samples: indices.iter().map(|&i| self.samples[i].clone()).collect(),
            dimension: self.dimension,
            label_map: self.label_map,
            name: name.into(),
        }
    }

    /// Seeded permutation of the sample order.
    pub fn shuffled(&self, seed: RngSeed) -> Dataset {
        let mut out = self.clone();
        out.samples.shuffle(&mut seed.rng());
        out
    }
}
