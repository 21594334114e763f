use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use negclass_core::{CorpusFormat, GateChoice, GeoChoice, ModelKind, ReportFormat, CONFIG_ENV};

#[derive(Debug, Parser)]
#[command(name = "negclass", version, about = "Classify negative news into eight categories")]
pub struct Cli {
    /// Settings file (`key = value` lines) supplying defaults for every flag.
    #[arg(long, global = true, env = CONFIG_ENV, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a corpus and rewrite it in canonical form.
    Ingest(Ingest),
    /// Resolve three expert labels by majority vote.
    Adjudicate(Adjudicate),
    /// Keep documents whose dictionary-word share meets a threshold.
    FilterLang(FilterLang),
    /// Select negative documents.
    Gate(Gate),
    /// Stratified train/test split; prints the class distribution table.
    Split(Split),
    /// Generate a synthetic labeled corpus.
    Synth(Synth),
    /// Train one classifier.
    Train(Train),
    /// Label a corpus with a trained model.
    Predict(Predict),
    /// Score a model against a labeled corpus.
    Evaluate(Evaluate),
    /// Rank models by accuracy from JSON reports.
    Compare(Compare),
    /// Aggregate predicted labels by location into GeoJSON.
    Geomap(Geomap),
    /// Run every stage from a settings file.
    Pipeline(Pipeline),
}

#[derive(Debug, Args)]
pub struct CorpusIn {
    /// Corpus file (.csv or .jsonl).
    #[arg(long, short)]
    pub input: PathBuf,
    /// Input format; inferred from the extension when omitted.
    #[arg(long)]
    pub format: Option<CorpusFormat>,
}

#[derive(Debug, Args)]
pub struct Ingest {
    #[command(flatten)]
    pub corpus: CorpusIn,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct Adjudicate {
    #[command(flatten)]
    pub corpus: CorpusIn,
    #[arg(long, short)]
    pub out: PathBuf,
    /// Where to write documents without a majority.
    #[arg(long)]
    pub rejects: PathBuf,
}

#[derive(Debug, Args)]
pub struct FilterLang {
    #[command(flatten)]
    pub corpus: CorpusIn,
    /// Word list, one word per line.
    #[arg(long)]
    pub dictionary: Option<PathBuf>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long, short)]
    pub out: PathBuf,
    /// Where to write the documents that were filtered out.
    #[arg(long)]
    pub dropped: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Gate {
    #[command(flatten)]
    pub corpus: CorpusIn,
    /// none, column, or lexicon.
    #[arg(long)]
    pub mode: Option<GateChoice>,
    /// Tab-separated `token<TAB>pos|neg` lines.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Documents scoring below this are negative.
    #[arg(long, allow_negative_numbers = true)]
    pub threshold: Option<f64>,
    #[arg(long, short)]
    pub out: PathBuf,
    /// Where to write the non-negative documents.
    #[arg(long)]
    pub rest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Split {
    #[command(flatten)]
    pub corpus: CorpusIn,
    #[arg(long)]
    pub test_fraction: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
}

#[derive(Debug, Args)]
pub struct Synth {
    /// `category,train,test[,percent]` table; the built-in table when omitted
    /// or `builtin`.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, short)]
    pub out: PathBuf,
    #[arg(long)]
    pub signal_prob: Option<f64>,
    #[arg(long)]
    pub keyword_pool_size: Option<usize>,
    #[arg(long)]
    pub noise_pool_size: Option<usize>,
    /// Extra unlabeled positive documents.
    #[arg(long)]
    pub positive_docs: Option<usize>,
    /// Also emit three noisy expert labels per document.
    #[arg(long)]
    pub expert_accuracy: Option<f64>,
    #[arg(long)]
    pub no_geotag: bool,
}

#[derive(Debug, Args)]
pub struct Train {
    #[arg(long, short)]
    pub model: ModelKind,
    #[command(flatten)]
    pub corpus: CorpusIn,
    /// Model file to write.
    #[arg(long, short)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub l2_lambda: Option<f64>,
    #[arg(long)]
    pub hidden_units: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub min_df: Option<usize>,
    /// 0 keeps every token.
    #[arg(long)]
    pub max_features: Option<usize>,
    /// counts or tfidf; defaults by model.
    #[arg(long, value_parser = ["counts", "tfidf"])]
    pub features: Option<String>,
}

#[derive(Debug, Args)]
pub struct Predict {
    /// Model file.
    #[arg(long, short)]
    pub model: PathBuf,
    #[command(flatten)]
    pub corpus: CorpusIn,
    /// Corpus with `label` set to the prediction.
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct Evaluate {
    #[arg(long, short)]
    pub model: PathBuf,
    #[command(flatten)]
    pub corpus: CorpusIn,
    /// text, csv, or json.
    #[arg(long = "report-format")]
    pub report_format: Option<ReportFormat>,
    /// Write here instead of standard output.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Compare {
    /// Reports written by `evaluate --report-format json`.
    #[arg(required = true)]
    pub reports: Vec<PathBuf>,
    #[arg(long = "report-format")]
    pub report_format: Option<ReportFormat>,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Geomap {
    /// Corpus labeled by `predict`.
    #[command(flatten)]
    pub corpus: CorpusIn,
    #[arg(long, short)]
    pub out: PathBuf,
    /// auto, named, or grid.
    #[arg(long)]
    pub mode: Option<GeoChoice>,
    #[arg(long)]
    pub cell_deg: Option<f64>,
}

#[derive(Debug, Args)]
pub struct Pipeline {
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}
