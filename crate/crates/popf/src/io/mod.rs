//! Dataset ingestion (LIBSVM, CSV), synthetic data generation and model
//! persistence.

mod csv;
mod libsvm;
mod model;
mod synthetic;

pub use csv::{load_csv, save_csv, write_csv};
pub use libsvm::load_libsvm;
pub use model::{load_model, save_model, ModelDocument, FORMAT_VERSION};
pub use synthetic::{generate_synthetic, SyntheticSpec};
