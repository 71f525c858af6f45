//! Synthetic two-class Gaussian blobs with controllable separation.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::dataset::{Dataset, RngSeed, Sample};
use crate::error::{Error, Result};

/// Specification of a generated dataset: two equal-sized unit-variance
/// Gaussian blobs centered at `+separation/2` and `-separation/2` along
/// every axis, labeled `+1` and `-1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub n_samples: usize,
    pub n_features: usize,
    pub class_separation: f64,
    pub seed: RngSeed,
}

/// Deterministically generates the dataset described by `spec`.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Dataset> {
    if spec.n_samples == 0 || spec.n_samples % 2 != 0 {
        return Err(Error::InvalidInput(format!(
            "n_samples must be positive and even, got {}",
            spec.n_samples
        )));
    }
    if spec.n_features == 0 {
        return Err(Error::InvalidInput("n_features must be positive".into()));
    }
    let mut rng = spec.seed.rng();
    let offset = spec.class_separation / 2.0;
    let mut samples = Vec::with_capacity(spec.n_samples);
    for (label, center) in [(1i64, offset), (-1i64, -offset)] {
        for _ in 0..spec.n_samples / 2 {
            let features = (0..spec.n_features)
                .map(|_| center + rng.sample::<f64, _>(StandardNormal))
                .collect();
            samples.push(Sample::new(features, label));
        }
    }
    let name = format!(
        "synthetic-n{}-d{}-sep{}",
        spec.n_samples, spec.n_features, spec.class_separation
    );
    Dataset::new(name, spec.n_features, samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let spec = SyntheticSpec {
            n_samples: 20,
            n_features: 3,
            class_separation: 1.5,
            seed: RngSeed(77),
        };
        assert_eq!(generate_synthetic(&spec).unwrap(), generate_synthetic(&spec).unwrap());
    }

    #[test]
    fn classes_are_balanced_and_mapped() {
        let spec = SyntheticSpec {
            n_samples: 30,
            n_features: 2,
            class_separation: 2.0,
            seed: RngSeed(1),
        };
        let ds = generate_synthetic(&spec).unwrap();
        let positives = ds.samples.iter().filter(|s| s.label == 1).count();
        assert_eq!(positives, 15);
        assert!(ds.label_map.is_some());
        for s in &ds.samples {
            assert_eq!(i64::from(s.binary_label), s.label);
        }
    }

    #[test]
    fn odd_sample_count_is_rejected() {
        let spec = SyntheticSpec {
            n_samples: 7,
            n_features: 2,
            class_separation: 1.0,
            seed: RngSeed(1),
        };
        assert!(matches!(generate_synthetic(&spec), Err(Error::InvalidInput(_))));
    }
}
