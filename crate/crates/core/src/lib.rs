//! Layout-based classification of template documents.
//!
//! A class is registered from one sample document and a list of anchor
//! keywords; the position of each keyword in the sample becomes a row of a
//! [`CoordinateMatrix`]. A new document is scored against each class by how
//! far its copies of those keywords sit from the registered positions.

pub mod classifier;
pub mod error;
pub mod eval;
pub mod ingest;
pub mod model;
pub mod registry;
pub mod synth;

pub use classifier::{
    classify, classify_with_stats, explain, keyword_distance, ClassScore, ClassificationResult,
    KeywordDistance, MeanDistance,
};
pub use error::{Error, Result};
pub use eval::{evaluate, penalty_sweep, EvalReport, LabeledDoc, REJECTED};
pub use ingest::KeywordSpec;
pub use model::{ClassifierConfig, Coord, Document, Page, WordBox};
pub use registry::{build_matrix, build_matrix_with_warnings, CoordinateMatrix, MatrixRow};
