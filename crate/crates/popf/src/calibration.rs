//! Probabilistic layer over the optimum-path forest.
//!
//! A fitted sigmoid maps signed path costs to the posterior probability of
//! the positive class. The two sigmoid parameters minimize a regularized
//! negative log-likelihood evaluated in a branch-stable form that never
//! computes `log(0)` or the catastrophic `1 - p`, so the optimizers can probe
//! the whole search box safely.

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, RngSeed, Sample};
use crate::error::{Error, Result};
use crate::forest::{Prediction, TrainedForest};
use crate::optim::{minimize, OptimizerConfig};

/// Fitted sigmoid parameters with the decision threshold and diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationModel {
    pub a: f64,
    pub b: f64,
    /// Decision threshold in (0, 1); probabilities at or above it go to the
    /// positive class.
    pub theta: f64,
    /// Objective value at (a, b) on the fitting scores.
    pub final_nll: f64,
    /// Tag of the optimizer that produced (a, b).
    pub optimizer_used: String,
    /// Warnings accumulated while fitting, e.g. an out-of-box optimizer
    /// result that had to be clamped.
    #[serde(default)]
    pub diagnostics: Vec<String>,
}

impl CalibrationModel {
    /// Replaces the decision threshold, which must lie strictly in (0, 1).
    pub fn with_theta(mut self, theta: f64) -> Result<CalibrationModel> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::InvalidInput(format!(
                "theta must be in (0, 1), got {theta}"
            )));
        }
        self.theta = theta;
        Ok(self)
    }
}

/// One fitting observation: a signed cost and its regularized target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredSample {
    pub score: f64,
    pub target: f64,
}

/// Probability of the positive class, `1 / (1 + exp(A*score + B))`, computed
/// in the overflow-safe branched form.
pub fn sigmoid_probability(a: f64, b: f64, score: f64) -> f64 {
    let q = a * score + b;
    if q >= 0.0 {
        let e = (-q).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + q.exp())
    }
}

/// Complement `1 - p` evaluated directly as `exp(q) / (1 + exp(q))`, which
/// stays accurate where the subtraction would cancel catastrophically.
pub fn sigmoid_complement(a: f64, b: f64, score: f64) -> f64 {
    sigmoid_probability(-a, -b, score)
}

/// Regularized targets: positives get `(N+ + 1)/(N+ + 2)`, negatives
/// `1/(N- + 2)`, from the class counts of the fitting set.
pub fn make_targets(labels: &[i8]) -> Vec<f64> {
    let positives = labels.iter().filter(|&&y| y > 0).count() as f64;
    let negatives = labels.len() as f64 - positives;
    let positive_target = (positives + 1.0) / (positives + 2.0);
    let negative_target = 1.0 / (negatives + 2.0);
    labels
        .iter()
        .map(|&y| if y > 0 { positive_target } else { negative_target })
        .collect()
}

/// Pairs signed scores with regularized targets.
pub fn scored_samples(scores: &[f64], labels: &[i8]) -> Vec<ScoredSample> {
    debug_assert_eq!(scores.len(), labels.len());
    make_targets(labels)
        .into_iter()
        .zip(scores)
        .map(|(target, &score)| ScoredSample { score, target })
        .collect()
}

/// Negative log-likelihood of the targets under the sigmoid at `(a, b)`.
///
/// Each term is evaluated as `t*q + ln(1 + exp(-q))` for `q >= 0` and
/// `(t - 1)*q + ln(1 + exp(q))` otherwise, so the sum stays finite for any
/// finite inputs.
pub fn objective(a: f64, b: f64, scored: &[ScoredSample]) -> Result<f64> {
    if scored.is_empty() {
        return Err(Error::InvalidInput("no scored samples".into()));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInput(format!("non-finite parameters ({a}, {b})")));
    }
    let mut sum = 0.0;
    for s in scored {
        if !s.score.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite score {}", s.score)));
        }
        let q = a * s.score + b;
        sum += if q >= 0.0 {
            s.target * q + (-q).exp().ln_1p()
        } else {
            (s.target - 1.0) * q + q.exp().ln_1p()
        };
    }
    Ok(sum)
}

/// Where the fitting scores come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScoreSource {
    /// Signed final training costs of the forest itself. No extra split.
    #[default]
    TrainingCosts,
    /// Costs obtained by internally holding out each fold and classifying it
    /// with a forest trained on the rest.
    CrossValidated { folds: usize },
}

/// Builds the fitting scores `y_i * C_i` for a forest and its training set.
fn fitting_scores(
    forest: &TrainedForest,
    train: &Dataset,
    source: ScoreSource,
    seed: RngSeed,
) -> Result<Vec<f64>> {
    match source {
        ScoreSource::TrainingCosts => Ok(forest
            .samples()
            .iter()
            .zip(forest.costs())
            .map(|(s, &c)| f64::from(s.binary_label) * c)
            .collect()),
        ScoreSource::CrossValidated { folds } => {
            if folds < 2 || folds > train.len() {
                return Err(Error::InvalidInput(format!(
                    "cross-validated scores need 2..=n folds, got {folds}"
                )));
            }
            // deterministic fold assignment: shuffled indices dealt round-robin
            let mut order: Vec<usize> = (0..train.len()).collect();
            use rand::seq::SliceRandom;
            order.shuffle(&mut seed.rng());
            let mut fold_of = vec![0usize; train.len()];
            for (pos, &idx) in order.iter().enumerate() {
                fold_of[idx] = pos % folds;
            }
            let mut scores = vec![0.0; train.len()];
            for fold in 0..folds {
                let held_out: Vec<usize> =
                    (0..train.len()).filter(|&i| fold_of[i] == fold).collect();
                let kept: Vec<usize> =
                    (0..train.len()).filter(|&i| fold_of[i] != fold).collect();
                let sub = train.subset(format!("{}-fold{}", train.name, fold), &kept);
                let sub_forest = TrainedForest::train(&sub, forest.metric())?;
                for &i in &held_out {
                    let pred = sub_forest.classify(&train.samples[i])?;
                    scores[i] = f64::from(train.samples[i].binary_label) * pred.cost;
                }
            }
            Ok(scores)
        }
    }
}

fn fit_scored(scored: &[ScoredSample], config: &OptimizerConfig, theta: f64) -> Result<CalibrationModel> {
    objective(0.0, 0.0, scored)?; // validate the scores once up front
    let result = minimize(
        |a, b| objective(a, b, scored).expect("scores validated, box points finite"),
        config,
    )?;
    let mut diagnostics = Vec::new();
    let (mut a, mut b) = result.point;
    if !config.search_box.contains(a, b) {
        let clamped = config.search_box.clamp(a, b);
        diagnostics.push(format!(
            "optimizer returned ({a}, {b}) outside the search box; clamped to ({}, {})",
            clamped.0, clamped.1
        ));
        (a, b) = clamped;
    }
    let final_nll = objective(a, b, scored)?;
    Ok(CalibrationModel {
        a,
        b,
        theta,
        final_nll,
        optimizer_used: config.algorithm.tag().to_string(),
        diagnostics,
    })
}

/// Fits the sigmoid on the forest's signed training costs with the default
/// threshold of one half. `seed` only feeds the internal split of the
/// cross-validated score mode; see [`fit_with_source`].
pub fn fit(
    forest: &TrainedForest,
    train: &Dataset,
    config: &OptimizerConfig,
    seed: RngSeed,
) -> Result<CalibrationModel> {
    fit_with_source(forest, train, config, seed, ScoreSource::TrainingCosts)
}

/// Fits the sigmoid with an explicit score source.
pub fn fit_with_source(
    forest: &TrainedForest,
    train: &Dataset,
    config: &OptimizerConfig,
    seed: RngSeed,
    source: ScoreSource,
) -> Result<CalibrationModel> {
    if train.label_map.is_none() {
        return Err(Error::UnsupportedDataset(
            "calibration requires a binary-mapped dataset".into(),
        ));
    }
    if train.len() != forest.len() {
        return Err(Error::InvalidInput(format!(
            "forest was trained on {} samples, dataset has {}",
            forest.len(),
            train.len()
        )));
    }
    let scores = fitting_scores(forest, train, source, seed)?;
    let scored = scored_samples(&scores, &train.binary_labels());
    fit_scored(&scored, config, 0.5)
}

/// Probability that `t` belongs to the positive class, together with the
/// underlying forest prediction. The score sign comes from the predicted
/// binary label, mirroring the signed decision value of margin classifiers.
pub fn predict_proba(
    forest: &TrainedForest,
    model: &CalibrationModel,
    t: &Sample,
) -> Result<(f64, Prediction)> {
    let prediction = forest.classify(t)?;
    let binary = forest.binary_label_of(prediction.label).ok_or_else(|| {
        Error::UnsupportedDataset(format!(
            "no binary mapping for propagated label {}",
            prediction.label
        ))
    })?;
    let probability = sigmoid_probability(model.a, model.b, f64::from(binary) * prediction.cost);
    Ok((probability, prediction))
}

/// Thresholded decision: `+1` iff the positive-class probability reaches
/// `model.theta`.
pub fn predict_label(forest: &TrainedForest, model: &CalibrationModel, t: &Sample) -> Result<i8> {
    let (probability, _) = predict_proba(forest, model, t)?;
    Ok(if probability >= model.theta { 1 } else { -1 })
}

/// Accuracy of the thresholded classifier over a grid of thresholds.
///
/// Probabilities are computed once; each grid value re-thresholds them. Grid
/// values must be strictly inside (0, 1) and ascending.
pub fn threshold_sweep(
    forest: &TrainedForest,
    model: &CalibrationModel,
    test: &Dataset,
    grid: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty threshold grid".into()));
    }
    for pair in grid.windows(2) {
        if pair[0] >= pair[1] {
            return Err(Error::InvalidInput("threshold grid must be ascending".into()));
        }
    }
    if grid[0] <= 0.0 || grid[grid.len() - 1] >= 1.0 {
        return Err(Error::InvalidInput("thresholds must lie in (0, 1)".into()));
    }
    if test.label_map.is_none() {
        return Err(Error::UnsupportedDataset(
            "threshold sweep requires a binary-mapped dataset".into(),
        ));
    }
    let mut probabilities = Vec::with_capacity(test.len());
    for s in &test.samples {
        probabilities.push(predict_proba(forest, model, s)?.0);
    }
    let truth: Vec<i64> = test.samples.iter().map(|s| i64::from(s.binary_label)).collect();
    let mut rows = Vec::with_capacity(grid.len());
    for &theta in grid {
        let predicted: Vec<i64> = probabilities
            .iter()
            .map(|&p| if p >= theta { 1 } else { -1 })
            .collect();
        rows.push((theta, crate::forest::balanced_accuracy_lenient(&truth, &predicted)));
    }
    Ok(rows)
}
