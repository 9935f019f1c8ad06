//! Feature-study toolkit for binary text classification over a hierarchical
//! label schema.
//!
//! The pipeline: load a corpus of labeled documents ([`corpus`]), encode each
//! document into grouped binary features ([`featurize`]), train a linear SVM
//! ([`model`]) under stratified cross-validation ([`eval`]), and run the two
//! studies ([`studies`]): per-group feature ablation and chi-square percentile
//! elimination ([`selection`]). Results serialize to canonical JSON, CSV, and
//! SVG charts ([`report`]).
//!
//! Everything downstream of the corpus is deterministic given a seed,
//! independent of thread count.

pub mod corpus;
pub mod eval;
pub mod featurize;
pub mod lexicon;
pub mod model;
pub mod report;
pub mod selection;
pub mod studies;
pub mod tokenize;

pub use corpus::{ClassSchema, Corpus, Document, LabeledTask};
pub use eval::{FoldPlan, MetricSummary};
pub use featurize::{FeatureDescriptor, FeatureGroup, FeatureMatrix, FeatureRegistry};
pub use lexicon::LexiconSet;
pub use model::{LinearModel, TrainParams};
pub use studies::{AblationResult, EliminationCurve};
