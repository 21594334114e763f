//! Two-stage classification of negative news: a polarity gate followed by an
//! eight-way classifier over negativity categories, plus the corpus tooling,
//! evaluation, and geographic aggregation around it.
//!
//! ```
//! use negclass_core::{analyze, CategorySet};
//!
//! assert_eq!(analyze("Budget cuts hit #Lahore hospitals"), ["budget", "cuts", "hit", "lahore", "hospitals"]);
//! assert_eq!(CategorySet::canonical().len(), 8);
//! ```

pub mod categories;
pub mod config;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod geomap;
pub mod models;
pub mod pipeline;
pub mod polarity;
pub mod rng;
pub mod textprep;

pub use categories::{argmax, CategorySet, CANONICAL};
pub use config::{GateChoice, GeoChoice, PipelineConfig, CONFIG_ENV};
pub use corpus::{
    adjudicate, adjudicate_corpus, class_distribution, load_corpus, stratified_split, synthesize_corpus, write_corpus,
    Adjudication, CorpusFormat, DistributionSpec, Document, GeoTag, Polarity, SynthConfig,
};
pub use error::{DataError, DataResult, ModelError, ModelResult};
pub use eval::{compare_models, render_comparison, EvalReport, ReportFormat};
pub use features::{FeatureKind, Featurizer, SparseVector, Vocabulary};
pub use geomap::{aggregate_by_location, emit_geojson, parse_geojson, FeatureCollection, GeoMode, GeoSummary};
pub use models::{
    load_model, read_model, save_model, train_model, write_model, FeatureConfig, ModelKind, Prediction, TrainConfig,
    TrainedModel,
};
pub use pipeline::{evaluate_model, label_with_predictions, run_pipeline, PipelineOutcome};
pub use polarity::{gate_negative, GateMode, PolarityLexicon};
pub use textprep::{analyze, filter_english, Dictionary};
