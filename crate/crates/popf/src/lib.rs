//! Optimum-path forest classification with probabilistic calibration.
//!
//! The toolkit trains a supervised optimum-path forest over a complete graph
//! of training samples ([`forest`]), maps its path costs to posterior
//! probabilities through a two-parameter sigmoid fitted by derivative-free
//! minimization of a numerically stable negative log-likelihood
//! ([`calibration`], [`optim`]), and ships the evaluation protocol used to
//! compare the plain and probabilistic classifiers: repeated stratified
//! holdouts, wall-clock timing and Wilcoxon signed-rank comparisons
//! ([`eval`]). Dataset ingestion, synthetic data and model persistence live
//! in [`io`].

pub mod calibration;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod forest;
pub mod io;
pub mod optim;

pub use dataset::{distance, Dataset, DistanceMetric, LabelMap, RngSeed, Sample};
pub use error::{Error, Result};
pub use forest::{balanced_accuracy, balanced_accuracy_lenient, find_prototypes, Prediction, TrainedForest};
