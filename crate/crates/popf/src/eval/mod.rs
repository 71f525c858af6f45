//! Experimental protocol: repeated holdout splits, timed training and
//! testing of each method on shared splits, and Wilcoxon signed-rank
//! comparison of the per-run accuracies.

pub mod wilcoxon;

pub use wilcoxon::{wilcoxon_signed_rank, WilcoxonMethod, WilcoxonOutcome};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use crate::calibration;
use crate::dataset::{Dataset, DistanceMetric, RngSeed};
use crate::error::{Error, Result};
use crate::forest::{balanced_accuracy, TrainedForest};
use crate::optim::OptimizerConfig;

/// Repeated holdout specification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    /// Fraction of samples that goes to training, strictly in (0, 1).
    pub train_fraction: f64,
    pub runs: usize,
    pub stratified: bool,
    pub seed: RngSeed,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec { train_fraction: 0.25, runs: 20, stratified: true, seed: RngSeed::default() }
    }
}

/// Proportional integer allocation by largest remainder, then clamped so
/// every class keeps at least one sample on each side of the split.
fn stratified_quotas(class_sizes: &[usize], total_quota: usize) -> Vec<usize> {
    let total: usize = class_sizes.iter().sum();
    let mut quotas: Vec<usize> = Vec::with_capacity(class_sizes.len());
    let mut remainders: Vec<(usize, f64)> = Vec::with_capacity(class_sizes.len());
    for (i, &size) in class_sizes.iter().enumerate() {
        let target = total_quota as f64 * size as f64 / total as f64;
        quotas.push(target.floor() as usize);
        remainders.push((i, target - target.floor()));
    }
    let mut assigned: usize = quotas.iter().sum();
    // largest remainder first; ties by class order
    remainders.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    let mut k = 0;
    while assigned < total_quota {
        quotas[remainders[k % remainders.len()].0] += 1;
        assigned += 1;
        k += 1;
    }
    // keep 1..=size-1 per class, compensating on the most flexible classes
    loop {
        let mut adjusted = false;
        for i in 0..quotas.len() {
            if quotas[i] == 0 {
                // steal one slot from the class with the most surplus
                if let Some(j) = (0..quotas.len())
                    .filter(|&j| quotas[j] > 1)
                    .max_by_key(|&j| quotas[j])
                {
                    quotas[j] -= 1;
                    quotas[i] += 1;
                    adjusted = true;
                }
            } else if quotas[i] >= class_sizes[i] {
                if let Some(j) = (0..quotas.len())
                    .filter(|&j| quotas[j] + 1 < class_sizes[j])
                    .min_by_key(|&j| quotas[j])
                {
                    quotas[j] += 1;
                    quotas[i] -= 1;
                    adjusted = true;
                }
            }
        }
        if !adjusted {
            break;
        }
    }
    quotas
}

/// Splits a dataset into disjoint train and test sets.
///
/// The split is a deterministic function of the spec seed and the run index.
/// Stratified mode preserves per-class proportions within one sample and
/// keeps at least one sample of every class on each side.
pub fn split(dataset: &Dataset, spec: &SplitSpec, run_index: usize) -> Result<(Dataset, Dataset)> {
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(Error::InvalidInput(format!(
            "train fraction must be in (0, 1), got {}",
            spec.train_fraction
        )));
    }
    if run_index >= spec.runs {
        return Err(Error::InvalidInput(format!(
            "run index {run_index} out of range for {} runs",
            spec.runs
        )));
    }
    let n = dataset.len();
    if n < 2 {
        return Err(Error::InvalidInput("cannot split fewer than 2 samples".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed.0 ^ run_index as u64);
    let total_quota = ((spec.train_fraction * n as f64).round() as usize).clamp(1, n - 1);

    let (train_idx, test_idx) = if spec.stratified {
        let mut by_class: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (i, s) in dataset.samples.iter().enumerate() {
            by_class.entry(s.label).or_default().push(i);
        }
        for (label, members) in &by_class {
            if members.len() < 2 {
                return Err(Error::DegenerateClass(format!(
                    "class {label} has fewer than 2 samples; cannot stratify"
                )));
            }
        }
        let sizes: Vec<usize> = by_class.values().map(Vec::len).collect();
        let quotas = stratified_quotas(&sizes, total_quota);
        let mut train_idx = Vec::with_capacity(total_quota);
        let mut test_idx = Vec::with_capacity(n - total_quota);
        for (members, &quota) in by_class.values_mut().zip(&quotas) {
            members.shuffle(&mut rng);
            train_idx.extend_from_slice(&members[..quota]);
            test_idx.extend_from_slice(&members[quota..]);
        }
        (train_idx, test_idx)
    } else {
        let mut indices: Vec<usize> = (0..n).collect();
        indices.shuffle(&mut rng);
        let test_idx = indices.split_off(total_quota);
        (indices, test_idx)
    };

    let train = dataset.subset(format!("{}-train{}", dataset.name, run_index), &train_idx);
    let test = dataset.subset(format!("{}-test{}", dataset.name, run_index), &test_idx);
    Ok((train, test))
}

/// Stable content fingerprint of a dataset (FNV-1a over features and
/// labels), used to verify that every method saw identical splits.
pub fn dataset_fingerprint(dataset: &Dataset) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut hash = OFFSET;
    let mut mix = |bytes: &[u8]| {
        for &b in bytes {
            hash ^= u64::from(b);
            hash = hash.wrapping_mul(PRIME);
        }
    };
    for s in &dataset.samples {
        mix(&s.label.to_le_bytes());
        for f in &s.features {
            mix(&f.to_bits().to_le_bytes());
        }
    }
    hash
}

/// One method to benchmark: plain forest classification or the
/// probabilistic variant with a given calibration optimizer.
#[derive(Debug, Clone, PartialEq)]
pub enum MethodConfig {
    Opf,
    Popf(OptimizerConfig),
}

impl MethodConfig {
    /// Report tag, e.g. `OPF` or `P-OPF-NM`.
    pub fn tag(&self) -> String {
        match self {
            MethodConfig::Opf => "OPF".to_string(),
            MethodConfig::Popf(config) => {
                format!("P-OPF-{}", config.algorithm.tag().to_uppercase())
            }
        }
    }
}

/// Accuracy and timing of one method on one run's split.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub run_index: usize,
    pub method: String,
    pub accuracy: f64,
    /// Wall-clock training seconds, calibration included for P-OPF.
    pub train_time_s: f64,
    /// Portion of `train_time_s` spent fitting the sigmoid; zero for OPF.
    pub calibration_time_s: f64,
    pub test_time_s: f64,
    /// Fingerprint of the (train, test) pair this record was measured on.
    pub split_hash: u64,
}

/// Per-method aggregate over all runs.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub method: String,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    pub mean_train_time_s: f64,
    pub std_train_time_s: f64,
    pub mean_test_time_s: f64,
    pub std_test_time_s: f64,
    pub mean_calibration_time_s: f64,
    /// Not significantly worse than the top-mean method.
    pub best: bool,
}

/// Wilcoxon comparison of a method against the top-mean baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct WilcoxonComparison {
    pub method: String,
    pub baseline: String,
    pub statistic: f64,
    pub p_value: f64,
    pub reject: bool,
    pub no_decision: bool,
}

/// Assembled benchmark results.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    pub dataset: String,
    pub runs: usize,
    pub records: Vec<RunRecord>,
    pub summaries: Vec<MethodSummary>,
    pub comparisons: Vec<WilcoxonComparison>,
    pub notices: Vec<String>,
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64).sqrt()
}

impl BenchmarkReport {
    pub fn summary_for(&self, method: &str) -> Option<&MethodSummary> {
        self.summaries.iter().find(|s| s.method == method)
    }

    pub fn comparison_for(&self, method: &str) -> Option<&WilcoxonComparison> {
        self.comparisons.iter().find(|c| c.method == method)
    }

    pub fn accuracies_of(&self, method: &str) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| r.method == method)
            .map(|r| r.accuracy)
            .collect()
    }

    /// Per-run CSV rows.
    pub fn write_runs_csv<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        writeln!(
            writer,
            "run,method,accuracy,train_time_s,calibration_time_s,test_time_s,split_hash"
        )?;
        for r in &self.records {
            writeln!(
                writer,
                "{},{},{},{},{},{},{:016x}",
                r.run_index,
                r.method,
                r.accuracy,
                r.train_time_s,
                r.calibration_time_s,
                r.test_time_s,
                r.split_hash
            )?;
        }
        Ok(())
    }

    /// Text table with mean +/- std per method; `*` marks the methods not
    /// significantly worse than the best.
    pub fn write_summary<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        writeln!(writer, "dataset: {} ({} runs)", self.dataset, self.runs)?;
        writeln!(
            writer,
            "{:<12} {:>18} {:>20} {:>18}  best",
            "method", "accuracy(%)", "train time(s)", "test time(s)"
        )?;
        for s in &self.summaries {
            writeln!(
                writer,
                "{:<12} {:>8.2} +- {:>5.2} {:>10.4} +- {:>5.4} {:>8.4} +- {:>5.4}  {}",
                s.method,
                100.0 * s.mean_accuracy,
                100.0 * s.std_accuracy,
                s.mean_train_time_s,
                s.std_train_time_s,
                s.mean_test_time_s,
                s.std_test_time_s,
                if s.best { "*" } else { "" }
            )?;
        }
        for c in &self.comparisons {
            writeln!(
                writer,
                "wilcoxon {} vs {}: W = {}, p = {:.6}{}",
                c.method,
                c.baseline,
                c.statistic,
                c.p_value,
                if c.no_decision {
                    " (no decision)"
                } else if c.reject {
                    " (significant)"
                } else {
                    " (not significant)"
                }
            )?;
        }
        for n in &self.notices {
            writeln!(writer, "note: {n}")?;
        }
        Ok(())
    }
}

/// Significance level of the benchmark's pairwise comparisons.
pub const BENCHMARK_ALPHA: f64 = 0.05;

/// Runs every method on the same sequence of splits and assembles the
/// report. Any failing run aborts the whole benchmark.
///
/// Training time includes calibration fitting for the probabilistic methods;
/// the calibration share is also recorded separately. Runs execute
/// sequentially so the wall-clock numbers stay comparable.
pub fn run_benchmark(
    dataset: &Dataset,
    methods: &[MethodConfig],
    spec: &SplitSpec,
) -> Result<BenchmarkReport> {
    if methods.is_empty() {
        return Err(Error::InvalidInput("no methods to benchmark".into()));
    }
    if spec.runs == 0 {
        return Err(Error::InvalidInput("benchmark needs at least one run".into()));
    }
    let needs_binary = methods.iter().any(|m| matches!(m, MethodConfig::Popf(_)));
    if needs_binary && dataset.label_map.is_none() {
        return Err(Error::UnsupportedDataset(
            "probabilistic methods require a binary-mapped dataset".into(),
        ));
    }

    let metric = DistanceMetric::default();
    let mut records = Vec::with_capacity(spec.runs * methods.len());
    for run_index in 0..spec.runs {
        let (train, test) = split(dataset, spec, run_index)?;
        let split_hash = dataset_fingerprint(&train) ^ dataset_fingerprint(&test).rotate_left(1);
        for method in methods {
            let record = match method {
                MethodConfig::Opf => {
                    let started = Instant::now();
                    let forest = TrainedForest::train(&train, metric)?;
                    let train_time_s = started.elapsed().as_secs_f64();

                    let started = Instant::now();
                    let predictions = forest.classify_dataset(&test)?;
                    let test_time_s = started.elapsed().as_secs_f64();

                    let truth: Vec<i64> = test.samples.iter().map(|s| s.label).collect();
                    let predicted: Vec<i64> = predictions.iter().map(|p| p.label).collect();
                    RunRecord {
                        run_index,
                        method: method.tag(),
                        accuracy: balanced_accuracy(&truth, &predicted)?,
                        train_time_s,
                        calibration_time_s: 0.0,
                        test_time_s,
                        split_hash,
                    }
                }
                MethodConfig::Popf(base_config) => {
                    let mut config = base_config.clone();
                    config.seed = spec.seed.derive(run_index as u64);

                    let started = Instant::now();
                    let forest = TrainedForest::train(&train, metric)?;
                    let forest_time_s = started.elapsed().as_secs_f64();

                    let started = Instant::now();
                    let model = calibration::fit(&forest, &train, &config, config.seed)?;
                    let calibration_time_s = started.elapsed().as_secs_f64();

                    let started = Instant::now();
                    let mut predicted = Vec::with_capacity(test.len());
                    for s in &test.samples {
                        predicted.push(i64::from(calibration::predict_label(&forest, &model, s)?));
                    }
                    let test_time_s = started.elapsed().as_secs_f64();

                    let truth: Vec<i64> =
                        test.samples.iter().map(|s| i64::from(s.binary_label)).collect();
                    RunRecord {
                        run_index,
                        method: method.tag(),
                        accuracy: balanced_accuracy(&truth, &predicted)?,
                        train_time_s: forest_time_s + calibration_time_s,
                        calibration_time_s,
                        test_time_s,
                        split_hash,
                    }
                }
            };
            records.push(record);
        }
    }

    let mut notices = Vec::new();

    // aggregate in method order
    let mut summaries = Vec::with_capacity(methods.len());
    for method in methods {
        let tag = method.tag();
        let of = |f: fn(&RunRecord) -> f64| -> Vec<f64> {
            records.iter().filter(|r| r.method == tag).map(f).collect()
        };
        let accuracy = of(|r| r.accuracy);
        let train_t = of(|r| r.train_time_s);
        let test_t = of(|r| r.test_time_s);
        let calib_t = of(|r| r.calibration_time_s);
        summaries.push(MethodSummary {
            method: tag,
            mean_accuracy: mean(&accuracy),
            std_accuracy: sample_std(&accuracy),
            mean_train_time_s: mean(&train_t),
            std_train_time_s: sample_std(&train_t),
            mean_test_time_s: mean(&test_t),
            std_test_time_s: sample_std(&test_t),
            mean_calibration_time_s: mean(&calib_t),
            best: false,
        });
    }

    // pairwise Wilcoxon against the top-mean method
    let baseline_pos = summaries
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.mean_accuracy.total_cmp(&b.1.mean_accuracy).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .unwrap();
    let baseline_tag = summaries[baseline_pos].method.clone();
    let baseline_acc: Vec<f64> = records
        .iter()
        .filter(|r| r.method == baseline_tag)
        .map(|r| r.accuracy)
        .collect();

    summaries[baseline_pos].best = true;
    let mut comparisons = Vec::new();
    if spec.runs < 5 {
        // not enough paired runs for any signed-rank decision
        if methods.len() > 1 {
            notices.push(format!(
                "wilcoxon skipped: {} runs give fewer than 5 paired differences",
                spec.runs
            ));
        }
        for summary in &mut summaries {
            summary.best = true;
            if summary.method != baseline_tag {
                comparisons.push(WilcoxonComparison {
                    method: summary.method.clone(),
                    baseline: baseline_tag.clone(),
                    statistic: f64::NAN,
                    p_value: f64::NAN,
                    reject: false,
                    no_decision: true,
                });
            }
        }
        return Ok(BenchmarkReport {
            dataset: dataset.name.clone(),
            runs: spec.runs,
            records,
            summaries,
            comparisons,
            notices,
        });
    }
    for i in 0..summaries.len() {
        if i == baseline_pos {
            continue;
        }
        let tag = summaries[i].method.clone();
        let acc: Vec<f64> = records
            .iter()
            .filter(|r| r.method == tag)
            .map(|r| r.accuracy)
            .collect();
        match wilcoxon_signed_rank(&baseline_acc, &acc, BENCHMARK_ALPHA) {
            Ok(outcome) => {
                summaries[i].best = !outcome.reject;
                comparisons.push(WilcoxonComparison {
                    method: tag,
                    baseline: baseline_tag.clone(),
                    statistic: outcome.statistic,
                    p_value: outcome.p_value,
                    reject: outcome.reject,
                    no_decision: outcome.no_decision,
                });
            }
            Err(Error::InvalidInput(reason)) => {
                // too few informative pairs to test; counts as undecided
                summaries[i].best = true;
                comparisons.push(WilcoxonComparison {
                    method: tag.clone(),
                    baseline: baseline_tag.clone(),
                    statistic: f64::NAN,
                    p_value: f64::NAN,
                    reject: false,
                    no_decision: true,
                });
                notices.push(format!("wilcoxon skipped for {tag}: {reason}"));
            }
            Err(other) => return Err(other),
        }
    }

    Ok(BenchmarkReport {
        dataset: dataset.name.clone(),
        runs: spec.runs,
        records,
        summaries,
        comparisons,
        notices,
    })
}
