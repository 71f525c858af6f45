//! Supervised optimum-path forest over the complete training graph.
//!
//! Training marks boundary samples as prototypes (endpoints of inter-class
//! edges of a minimum spanning tree), then grows optimum-path trees from the
//! prototypes with a best-first expansion of the minimax path cost: the cost
//! of reaching a node is the largest arc weight along the path, and every
//! node keeps the cheapest such path. Classification connects a query to all
//! training nodes and hands it to the node minimizing `max(cost, distance)`.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::dataset::{Dataset, DistanceMetric, Sample};
use crate::error::{Error, Result};

/// Outcome of classifying one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    /// Label propagated from the conquering node.
    pub label: i64,
    /// Minimax path cost extended to the query.
    pub cost: f64,
    /// Index of the conquering training node.
    pub conqueror_index: usize,
}

/// Min-heap entry ordered by cost, ties popped in lowest-index order.
#[derive(Debug, PartialEq)]
struct QueueEntry {
    cost: f64,
    index: usize,
}

impl Eq for QueueEntry {}

impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed: BinaryHeap is a max-heap
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.index.cmp(&self.index))
    }
}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Marks prototype nodes: both endpoints of every MST edge whose endpoints
/// carry different labels.
///
/// The MST is built with Prim's algorithm from node 0; equal-weight
/// candidates are broken by lowest node index so results are reproducible.
pub fn find_prototypes(train: &Dataset, metric: DistanceMetric) -> Result<Vec<bool>> {
    let n = train.len();
    if n == 0 {
        return Err(Error::InvalidInput("empty training set".into()));
    }
    if train.distinct_labels().len() < 2 {
        return Err(Error::InvalidInput(
            "prototype estimation needs at least 2 classes".into(),
        ));
    }

    let mut in_tree = vec![false; n];
    let mut key = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut prototypes = vec![false; n];
    key[0] = 0.0;

    for _ in 0..n {
        let mut best = usize::MAX;
        for v in 0..n {
            if !in_tree[v] && (best == usize::MAX || key[v] < key[best]) {
                best = v;
            }
        }
        in_tree[best] = true;
        if parent[best] != usize::MAX {
            let p = parent[best];
            if train.samples[p].label != train.samples[best].label {
                prototypes[p] = true;
                prototypes[best] = true;
            }
        }
        for v in 0..n {
            if !in_tree[v] {
                let d = metric.eval(&train.samples[best].features, &train.samples[v].features);
                if d < key[v] {
                    key[v] = d;
                    parent[v] = best;
                }
            }
        }
    }
    Ok(prototypes)
}

/// The trained classifier: per-node minimax cost, propagated label and
/// prototype flag over the training samples.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainedForest {
    training_samples: Vec<Sample>,
    cost: Vec<f64>,
    assigned_label: Vec<i64>,
    is_prototype: Vec<bool>,
    metric: DistanceMetric,
    /// Node indices sorted by (cost, index); rebuilt after deserialization.
    #[serde(skip)]
    by_cost: Vec<usize>,
}

impl TrainedForest {
    /// Trains on the dataset: prototypes get cost 0, everything else starts
    /// unreachable, and a priority queue relaxes `max(cost, arc)` until every
    /// node is conquered. The complete graph guarantees finite costs.
    pub fn train(train: &Dataset, metric: DistanceMetric) -> Result<TrainedForest> {
        let prototypes = find_prototypes(train, metric)?;
        let n = train.len();

        let mut cost = vec![f64::INFINITY; n];
        let mut assigned_label: Vec<i64> = train.samples.iter().map(|s| s.label).collect();
        let mut done = vec![false; n];
        let mut queue = BinaryHeap::new();

        for v in 0..n {
            if prototypes[v] {
                cost[v] = 0.0;
                queue.push(QueueEntry { cost: 0.0, index: v });
            }
        }

        while let Some(QueueEntry { cost: c, index: s }) = queue.pop() {
            if done[s] || c > cost[s] {
                continue; // stale entry
            }
            done[s] = true;
            for t in 0..n {
                if done[t] {
                    continue;
                }
                let arc = metric.eval(&train.samples[s].features, &train.samples[t].features);
                let offered = cost[s].max(arc);
                if offered < cost[t] {
                    cost[t] = offered;
                    assigned_label[t] = assigned_label[s];
                    queue.push(QueueEntry { cost: offered, index: t });
                }
            }
        }

        let mut forest = TrainedForest {
            training_samples: train.samples.clone(),
            cost,
            assigned_label,
            is_prototype: prototypes,
            metric,
            by_cost: Vec::new(),
        };
        forest.rebuild_cache();
        Ok(forest)
    }

    /// Restores derived state after deserialization.
    pub(crate) fn rebuild_cache(&mut self) {
        let mut order: Vec<usize> = (0..self.cost.len()).collect();
        order.sort_by(|&a, &b| self.cost[a].total_cmp(&self.cost[b]).then(a.cmp(&b)));
        self.by_cost = order;
    }

    pub fn len(&self) -> usize {
        self.training_samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.training_samples.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.training_samples.first().map_or(0, |s| s.features.len())
    }

    pub fn metric(&self) -> DistanceMetric {
        self.metric
    }

    pub fn samples(&self) -> &[Sample] {
        &self.training_samples
    }

    pub fn costs(&self) -> &[f64] {
        &self.cost
    }

    pub fn assigned_labels(&self) -> &[i64] {
        &self.assigned_label
    }

    pub fn prototype_flags(&self) -> &[bool] {
        &self.is_prototype
    }

    pub fn prototype_count(&self) -> usize {
        self.is_prototype.iter().filter(|&&p| p).count()
    }

    /// Binary label associated with an original tag, read off the training
    /// samples. Propagated labels always originate from training tags, so
    /// this is total for any label a [`Prediction`] can carry.
    pub fn binary_label_of(&self, label: i64) -> Option<i8> {
        self.training_samples
            .iter()
            .find(|s| s.label == label)
            .map(|s| s.binary_label)
    }

    fn check_dimension(&self, t: &Sample) -> Result<()> {
        if t.features.len() != self.dimension() {
            return Err(Error::InvalidInput(format!(
                "query has {} features, forest expects {}",
                t.features.len(),
                self.dimension()
            )));
        }
        Ok(())
    }

    /// Classifies by scanning every training node for the minimum of
    /// `max(cost, distance)`. Ties go to the lowest training index.
    pub fn classify(&self, t: &Sample) -> Result<Prediction> {
        self.check_dimension(t)?;
        let mut best = Prediction { label: 0, cost: f64::INFINITY, conqueror_index: 0 };
        for (v, sample) in self.training_samples.iter().enumerate() {
            let value = self.cost[v].max(self.metric.eval(&sample.features, &t.features));
            if value < best.cost {
                best = Prediction { label: self.assigned_label[v], cost: value, conqueror_index: v };
            }
        }
        Ok(best)
    }

    /// Cost-ordered classification that stops once no remaining node can
    /// improve on the incumbent. Produces exactly the same [`Prediction`] as
    /// [`TrainedForest::classify`], including tie handling.
    pub fn classify_fast(&self, t: &Sample) -> Result<Prediction> {
        self.check_dimension(t)?;
        debug_assert_eq!(self.by_cost.len(), self.cost.len(), "cache not rebuilt");
        let mut best = Prediction { label: 0, cost: f64::INFINITY, conqueror_index: usize::MAX };
        for &v in &self.by_cost {
            if self.cost[v] > best.cost {
                break; // every later node has cost >= this one
            }
            let value = self.cost[v].max(self.metric.eval(&self.training_samples[v].features, &t.features));
            if value < best.cost || (value == best.cost && v < best.conqueror_index) {
                best = Prediction { label: self.assigned_label[v], cost: value, conqueror_index: v };
            }
        }
        Ok(best)
    }

    /// Classifies every sample of a dataset with the full scan.
    pub fn classify_dataset(&self, data: &Dataset) -> Result<Vec<Prediction>> {
        data.samples.iter().map(|s| self.classify(s)).collect()
    }
}

/// Accuracy measure robust to unbalanced class sizes.
///
/// For class `i` with `n_i` true members out of `N`, the per-class error sums
/// the false-positive rate `FP_i / (N - n_i)` and false-negative rate
/// `FN_i / n_i`; the score is `1 - sum_i E_i / (2c)`.
///
/// Classes are the union of true and predicted tags. A class with no true
/// members or with all true members is rejected; see
/// [`balanced_accuracy_lenient`] for the total variant.
pub fn balanced_accuracy(truth: &[i64], predicted: &[i64]) -> Result<f64> {
    if truth.is_empty() || truth.len() != predicted.len() {
        return Err(Error::InvalidInput(format!(
            "label lists must be non-empty and equal length ({} vs {})",
            truth.len(),
            predicted.len()
        )));
    }
    let classes: std::collections::BTreeSet<i64> =
        truth.iter().chain(predicted.iter()).copied().collect();
    let total = truth.len();
    for &c in &classes {
        let n_i = truth.iter().filter(|&&t| t == c).count();
        if n_i == 0 {
            return Err(Error::DegenerateClass(format!(
                "class {c} has no true members"
            )));
        }
        if n_i == total {
            return Err(Error::DegenerateClass(format!(
                "class {c} covers every sample"
            )));
        }
    }
    Ok(balanced_accuracy_lenient(truth, predicted))
}

/// Total version of [`balanced_accuracy`]: empty denominators contribute no
/// error (0/0 is treated as 0). Used by threshold sweeps, where extreme
/// thresholds can empty out a predicted class.
pub fn balanced_accuracy_lenient(truth: &[i64], predicted: &[i64]) -> f64 {
    debug_assert_eq!(truth.len(), predicted.len());
    let classes: std::collections::BTreeSet<i64> =
        truth.iter().chain(predicted.iter()).copied().collect();
    let total = truth.len();
    let mut error_sum = 0.0;
    for &c in &classes {
        let n_i = truth.iter().filter(|&&t| t == c).count();
        let fp = truth
            .iter()
            .zip(predicted)
            .filter(|&(&t, &p)| p == c && t != c)
            .count();
        let fn_ = truth
            .iter()
            .zip(predicted)
            .filter(|&(&t, &p)| t == c && p != c)
            .count();
        let e1 = if total > n_i { fp as f64 / (total - n_i) as f64 } else { 0.0 };
        let e2 = if n_i > 0 { fn_ as f64 / n_i as f64 } else { 0.0 };
        error_sum += e1 + e2;
    }
    1.0 - error_sum / (2.0 * classes.len() as f64)
}
