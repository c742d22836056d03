//! Dataset nutrition labels for tabular CSV data.
//!
//! The crate parses a CSV into an immutable [`DataTable`], infers a
//! [`ColumnKind`] per column, and computes the automated label modules:
//! stratified statistics, pair plots, a Dirichlet-categorical posterior,
//! and ground-truth correlations. [`label`] merges those with
//! human-supplied fields into a [`LabelDocument`] and owns its canonical
//! JSON form and validation rules.

pub mod error;
pub mod format;
pub mod ground_truth;
pub mod kind;
pub mod label;
pub mod pairs;
pub mod posterior;
pub mod stats;
pub mod table;

pub use error::{Error, Result};
pub use ground_truth::{
    aggregate_by_key, correlate, normalize_key, Aggregate, CorrelationReport, GroundTruthColumns, GroundTruthTable,
};
pub use kind::{infer_column_kind, infer_kinds, ColumnKind, Origin, Stratum, Subtype};
pub use label::{build_label, validate, BuildOutcome, LabelDocument, ModuleName, ValidationReport};
pub use pairs::{all_pairs, histogram, pair_payload, pearson, PairOptions, PairPlotCell};
pub use posterior::{
    credible_intervals, fit_conditional, sample_synthetic, DirichletBackend, DirichletPosterior, FitRequest,
    InferenceBackend, PosteriorDistribution,
};
pub use stats::{profile_categorical, profile_dataset, profile_numeric, StatisticsPayload};
pub use table::{parse_csv, DataTable, IngestOptions};
