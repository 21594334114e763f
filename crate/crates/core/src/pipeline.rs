//! End-to-end run driven by a [`PipelineConfig`].
//!
//! Every stage writes its output under `out_dir`:
//!
//! | file | contents |
//! |------|----------|
//! | `corpus.jsonl` | loaded or synthesized corpus |
//! | `rejected.jsonl` | adjudication rejects (only when experts are present) |
//! | `dropped_lang.jsonl` | documents failing the English filter |
//! | `non_negative.jsonl` | documents the gate let through as non-negative |
//! | `train.jsonl`, `test.jsonl`, `distribution.txt` | split and its table |
//! | `model_<kind>.bin`, `report_<kind>.<ext>` | one pair per model |
//! | `comparison.<ext>` | accuracy ranking |
//! | `predictions.jsonl`, `geomap.geojson` | best model on the test set |

use std::path::{Path, PathBuf};

use crate::categories::CategorySet;
use crate::config::{GateChoice, PipelineConfig};
use crate::corpus::{
    adjudicate_corpus, load_corpus, stratified_split, synthesize_corpus, write_corpus, CorpusFormat, DistributionSpec,
    Document,
};
use crate::error::{DataError, DataResult, ModelResult};
use crate::eval::{compare_models, render_comparison, ComparisonRow, EvalReport, ReportFormat};
use crate::geomap::{aggregate_by_location, emit_geojson, GeoSummary};
use crate::models::{save_model, train_model, ModelKind, TrainedModel};
use crate::polarity::{gate_negative, GateMode, PolarityLexicon};
use crate::textprep::{filter_english, Dictionary};

#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub out_dir: PathBuf,
    pub corpus_size: usize,
    pub rejected: usize,
    pub dropped_lang: usize,
    pub non_negative: usize,
    pub distribution: DistributionSpec,
    pub reports: Vec<(ModelKind, EvalReport)>,
    pub comparison: Vec<ComparisonRow>,
    pub best: ModelKind,
    /// `None` when no test document carries a geotag.
    pub geo: Option<GeoSummary>,
}

pub fn report_extension(format: ReportFormat) -> &'static str {
    match format {
        ReportFormat::Text => "txt",
        ReportFormat::Csv => "csv",
        ReportFormat::Json => "json",
    }
}

fn write_text(path: &Path, text: &str) -> DataResult<()> {
    std::fs::write(path, text).map_err(|e| DataError::io(path, e))
}

/// Applies `model` to `docs`, returning copies labeled with the prediction.
pub fn label_with_predictions(model: &TrainedModel, docs: &[Document]) -> ModelResult<Vec<Document>> {
    let predictions = model.predict_batch(docs)?;
    Ok(docs
        .iter()
        .zip(predictions)
        .map(|(d, p)| Document { label: Some(model.categories.name(p.label).to_string()), ..d.clone() })
        .collect())
}

/// Scores `model` against the labels already on `docs`.
pub fn evaluate_model(model: &TrainedModel, docs: &[Document]) -> ModelResult<EvalReport> {
    let cats = &model.categories;
    let truth = docs
        .iter()
        .map(|d| {
            let name = d.label.as_deref().ok_or_else(|| DataError::Document {
                id: d.id.clone(),
                message: "evaluation document is unlabeled".into(),
            })?;
            cats.require(name)
        })
        .collect::<DataResult<Vec<_>>>()?;
    let predicted: Vec<usize> = model.predict_batch(docs)?.into_iter().map(|p| p.label).collect();
    Ok(EvalReport::new(model.kind.title(), cats, &truth, &predicted)?)
}

fn load_or_synthesize(cfg: &PipelineConfig, cats: &CategorySet) -> DataResult<Vec<Document>> {
    match &cfg.input {
        Some(path) => {
            let format = match cfg.input_format {
                Some(f) => f,
                None => CorpusFormat::from_path(path)
                    .ok_or_else(|| DataError::Invalid(format!("cannot infer corpus format of {}", path.display())))?,
            };
            load_corpus(path, format, cats)
        }
        None => {
            let spec = match &cfg.spec {
                Some(path) => DistributionSpec::load(path, cats)?,
                None => DistributionSpec::builtin(),
            };
            synthesize_corpus(&spec, &cfg.synth_config(), cfg.seed)
        }
    }
}

pub fn run_pipeline(cfg: &PipelineConfig) -> ModelResult<PipelineOutcome> {
    cfg.validate().map_err(DataError::Invalid)?;
    let cats = CategorySet::canonical();
    let out = cfg.out_dir.clone();
    std::fs::create_dir_all(&out).map_err(|e| DataError::io(&out, e))?;
    let jsonl = CorpusFormat::Jsonl;

    let mut corpus = load_or_synthesize(cfg, &cats)?;
    if corpus.is_empty() {
        return Err(DataError::Empty("corpus has no documents".into()).into());
    }
    let corpus_size = corpus.len();
    write_corpus(out.join("corpus.jsonl"), &corpus, jsonl)?;

    let mut rejected = 0;
    if corpus.iter().all(|d| d.expert_labels.is_some()) {
        let (kept, rejects) = adjudicate_corpus(corpus)?;
        rejected = rejects.len();
        write_corpus(out.join("rejected.jsonl"), &rejects, jsonl)?;
        corpus = kept;
    }

    let mut dropped_lang = 0;
    if let Some(path) = &cfg.dictionary {
        let dict = Dictionary::load(path)?;
        let (kept, dropped) = filter_english(corpus, &dict, cfg.english_threshold)?;
        dropped_lang = dropped.len();
        write_corpus(out.join("dropped_lang.jsonl"), &dropped, jsonl)?;
        corpus = kept;
    }

    let mut non_negative = 0;
    let lexicon;
    let gate = match cfg.gate {
        GateChoice::None => None,
        GateChoice::Column => Some(GateMode::Column),
        GateChoice::Lexicon => {
            let path = cfg.lexicon.as_ref().expect("validated");
            lexicon = PolarityLexicon::load(path)?;
            Some(GateMode::Lexicon { lexicon: &lexicon, threshold: cfg.gate_threshold })
        }
    };
    if let Some(mode) = gate {
        let (neg, rest) = gate_negative(corpus, &mode)?;
        non_negative = rest.len();
        write_corpus(out.join("non_negative.jsonl"), &rest, jsonl)?;
        corpus = neg;
    }
    if corpus.is_empty() {
        return Err(DataError::Empty("no documents left after filtering".into()).into());
    }

    let (train, test) = stratified_split(&corpus, &cats, cfg.test_fraction, cfg.split_seed())?;
    let distribution = DistributionSpec::from_split(&train, &test, &cats)?;
    write_corpus(out.join("train.jsonl"), &train, jsonl)?;
    write_corpus(out.join("test.jsonl"), &test, jsonl)?;
    write_text(&out.join("distribution.txt"), &distribution.render())?;
    if test.is_empty() {
        return Err(DataError::Empty("test split is empty".into()).into());
    }

    let ext = report_extension(cfg.report_format);
    let features = cfg.feature_config();
    let mut models = Vec::new();
    let mut reports = Vec::new();
    for &kind in &cfg.models {
        let model = train_model(kind, &train, &cats, &features, &cfg.train_config(kind))?;
        save_model(&model, out.join(format!("model_{}.bin", kind.as_str())))?;
        let report = evaluate_model(&model, &test)?;
        write_text(&out.join(format!("report_{}.{ext}", kind.as_str())), &report.render(cfg.report_format))?;
        reports.push((kind, report));
        models.push(model);
    }

    let named: Vec<(String, EvalReport)> = reports.iter().map(|(k, r)| (k.as_str().to_string(), r.clone())).collect();
    let comparison = compare_models(&named)?;
    write_text(&out.join(format!("comparison.{ext}")), &render_comparison(&comparison, cfg.report_format))?;
    let best: ModelKind = comparison[0].model.parse().expect("kind names round-trip");
    let best_model = models.iter().find(|m| m.kind == best).expect("best was trained");

    let predicted = label_with_predictions(best_model, &test)?;
    write_corpus(out.join("predictions.jsonl"), &predicted, jsonl)?;
    let geo = if predicted.iter().any(|d| d.geotag.is_some()) {
        let summary = aggregate_by_location(&predicted, &cats, cfg.geo_mode())?;
        emit_geojson(&summary, out.join("geomap.geojson"))?;
        Some(summary)
    } else {
        None
    };

    Ok(PipelineOutcome {
        out_dir: out,
        corpus_size,
        rejected,
        dropped_lang,
        non_negative,
        distribution,
        reports,
        comparison,
        best,
        geo,
    })
}
