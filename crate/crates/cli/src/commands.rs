use std::path::Path;

use negclass_core::corpus::class_distribution;
use negclass_core::features::FeatureKind;
use negclass_core::pipeline::report_extension;
use negclass_core::{
    adjudicate_corpus, aggregate_by_location, compare_models, emit_geojson, evaluate_model, filter_english,
    gate_negative, label_with_predictions, load_corpus, load_model, render_comparison, run_pipeline, save_model,
    stratified_split, synthesize_corpus, train_model, write_corpus, CategorySet, CorpusFormat, DataError, Dictionary,
    DistributionSpec, Document, EvalReport, GateChoice, GateMode, PipelineConfig, PolarityLexicon,
};

use crate::cli::*;
use crate::failure::Failure;

type Outcome = Result<(), Failure>;

fn read_corpus(input: &CorpusIn, cats: &CategorySet) -> Result<Vec<Document>, Failure> {
    let format = match input.format {
        Some(f) => f,
        None => CorpusFormat::from_path(&input.input).ok_or_else(|| {
            Failure::usage(format!("cannot infer the format of {}; pass --format csv|jsonl", input.input.display()))
        })?,
    };
    Ok(load_corpus(&input.input, format, cats)?)
}

fn write_docs(path: &Path, docs: &[Document]) -> Outcome {
    let format = CorpusFormat::from_path(path).unwrap_or(CorpusFormat::Jsonl);
    write_corpus(path, docs, format)?;
    Ok(())
}

fn write_or_print(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| DataError::Io { path: path.to_path_buf(), source: e })?,
        None => print!("{text}"),
    }
    Ok(())
}

pub fn run(command: Command, cfg: PipelineConfig) -> Outcome {
    let cats = CategorySet::canonical();
    match command {
        Command::Ingest(a) => {
            let docs = read_corpus(&a.corpus, &cats)?;
            write_docs(&a.out, &docs)?;
            eprintln!("ingested {} documents", docs.len());
        }
        Command::Adjudicate(a) => {
            let docs = read_corpus(&a.corpus, &cats)?;
            let (kept, rejected) = adjudicate_corpus(docs)?;
            write_docs(&a.out, &kept)?;
            write_docs(&a.rejects, &rejected)?;
            eprintln!("{} labeled, {} without majority", kept.len(), rejected.len());
        }
        Command::FilterLang(a) => {
            let path =
                a.dictionary.or(cfg.dictionary).ok_or_else(|| Failure::usage("filter-lang needs --dictionary"))?;
            let dict = Dictionary::load(path)?;
            let docs = read_corpus(&a.corpus, &cats)?;
            let (kept, dropped) = filter_english(docs, &dict, a.threshold.unwrap_or(cfg.english_threshold))?;
            write_docs(&a.out, &kept)?;
            if let Some(p) = &a.dropped {
                write_docs(p, &dropped)?;
            }
            eprintln!("{} kept, {} dropped", kept.len(), dropped.len());
        }
        Command::Gate(a) => {
            let lexicon;
            let mode = match a.mode.unwrap_or(cfg.gate) {
                GateChoice::None => None,
                GateChoice::Column => Some(GateMode::Column),
                GateChoice::Lexicon => {
                    let path =
                        a.lexicon.or(cfg.lexicon).ok_or_else(|| Failure::usage("lexicon gate needs --lexicon"))?;
                    lexicon = PolarityLexicon::load(path)?;
                    Some(GateMode::Lexicon { lexicon: &lexicon, threshold: a.threshold.unwrap_or(cfg.gate_threshold) })
                }
            };
            let docs = read_corpus(&a.corpus, &cats)?;
            let (neg, rest) = match mode {
                Some(m) => gate_negative(docs, &m)?,
                None => (docs, Vec::new()),
            };
            write_docs(&a.out, &neg)?;
            if let Some(p) = &a.rest {
                write_docs(p, &rest)?;
            }
            eprintln!("{} negative, {} other", neg.len(), rest.len());
        }
        Command::Split(a) => {
            let docs = read_corpus(&a.corpus, &cats)?;
            let seed = a.seed.unwrap_or(cfg.split_seed());
            let (train, test) = stratified_split(&docs, &cats, a.test_fraction.unwrap_or(cfg.test_fraction), seed)?;
            write_docs(&a.train, &train)?;
            write_docs(&a.test, &test)?;
            print!("{}", DistributionSpec::from_split(&train, &test, &cats)?.render());
        }
        Command::Synth(a) => {
            let mut cfg = cfg;
            if let Some(v) = a.signal_prob {
                cfg.set("signal_prob", &v.to_string()).map_err(Failure::usage)?;
            }
            if let Some(v) = a.keyword_pool_size {
                cfg.set("keyword_pool_size", &v.to_string()).map_err(Failure::usage)?;
            }
            if let Some(v) = a.noise_pool_size {
                cfg.set("noise_pool_size", &v.to_string()).map_err(Failure::usage)?;
            }
            if let Some(v) = a.expert_accuracy {
                cfg.set("expert_accuracy", &v.to_string()).map_err(Failure::usage)?;
            }
            cfg.positive_docs = a.positive_docs.unwrap_or(cfg.positive_docs);
            cfg.geotag &= !a.no_geotag;
            let spec = match a.spec.as_ref().or(cfg.spec.as_ref()) {
                Some(p) if p.as_os_str() != "builtin" => DistributionSpec::load(p, &cats)?,
                _ => DistributionSpec::builtin(),
            };
            let docs = synthesize_corpus(&spec, &cfg.synth_config(), a.seed.unwrap_or(cfg.seed))?;
            write_docs(&a.out, &docs)?;
            let labeled: Vec<Document> = docs.iter().filter(|d| d.label.is_some()).cloned().collect();
            let dist = class_distribution(&labeled, &cats)?;
            for (i, name) in cats.names().iter().enumerate() {
                println!("{name},{},{:.2}", dist.counts[i], dist.percents[i]);
            }
            eprintln!("wrote {} documents", docs.len());
        }
        Command::Train(a) => {
            let mut cfg = cfg;
            let kind = a.model;
            let mut train_cfg = cfg.train_config(kind);
            if let Some(v) = a.seed {
                train_cfg.seed = v;
            }
            if let Some(v) = a.epochs {
                train_cfg.epochs = v;
            }
            if let Some(v) = a.learning_rate {
                train_cfg.learning_rate = v;
            }
            if let Some(v) = a.l2_lambda {
                train_cfg.l2_lambda = v;
            }
            if let Some(v) = a.hidden_units {
                train_cfg.hidden_units = v;
            }
            if let Some(v) = a.alpha {
                train_cfg.nb_alpha = v;
            }
            if let Some(v) = a.min_df {
                cfg.set("min_df", &v.to_string()).map_err(Failure::usage)?;
            }
            if let Some(v) = a.max_features {
                cfg.max_features = v;
            }
            let mut features = cfg.feature_config();
            features.kind = a.features.as_deref().map(|f| match f {
                "counts" => FeatureKind::Counts,
                _ => FeatureKind::Tfidf,
            });
            let docs = read_corpus(&a.corpus, &cats)?;
            let model = train_model(kind, &docs, &cats, &features, &train_cfg)?;
            save_model(&model, &a.out)?;
            eprintln!("trained {} on {} documents, {} features", kind.title(), docs.len(), model.featurizer.dim());
        }
        Command::Predict(a) => {
            let model = load_model(&a.model)?;
            let docs = read_corpus(&a.corpus, &model.categories)?;
            let labeled = label_with_predictions(&model, &docs)?;
            write_docs(&a.out, &labeled)?;
            eprintln!("labeled {} documents", labeled.len());
        }
        Command::Evaluate(a) => {
            let model = load_model(&a.model)?;
            let docs = read_corpus(&a.corpus, &model.categories)?;
            let report = evaluate_model(&model, &docs)?;
            let format = a.report_format.unwrap_or(cfg.report_format);
            write_or_print(a.out.as_deref(), &report.render(format))?;
        }
        Command::Compare(a) => {
            let mut reports = Vec::new();
            for path in &a.reports {
                let text =
                    std::fs::read_to_string(path).map_err(|e| DataError::Io { path: path.clone(), source: e })?;
                let report: EvalReport = serde_json::from_str(&text).map_err(|e| {
                    Failure::from(DataError::Invalid(format!("{}: not a JSON report: {e}", path.display())))
                })?;
                reports.push((report.model.clone(), report));
            }
            let rows = compare_models(&reports)?;
            let format = a.report_format.unwrap_or(cfg.report_format);
            write_or_print(a.out.as_deref(), &render_comparison(&rows, format))?;
        }
        Command::Geomap(a) => {
            let mut cfg = cfg;
            if let Some(m) = a.mode {
                cfg.geo_mode = m;
            }
            if let Some(c) = a.cell_deg {
                cfg.set("grid_cell_deg", &c.to_string()).map_err(Failure::usage)?;
            }
            let docs = read_corpus(&a.corpus, &cats)?;
            let summary = aggregate_by_location(&docs, &cats, cfg.geo_mode())?;
            emit_geojson(&summary, &a.out)?;
            eprintln!("{} locations, {} documents without a usable geotag", summary.aggregates.len(), summary.skipped);
        }
        Command::Pipeline(a) => {
            let mut cfg = cfg;
            if let Some(dir) = a.out_dir {
                cfg.out_dir = dir;
            }
            if let Some(seed) = a.seed {
                cfg.seed = seed;
            }
            let outcome = run_pipeline(&cfg)?;
            let ext = report_extension(cfg.report_format);
            eprintln!(
                "{} documents; best model {} ({:.4}); outputs in {}",
                outcome.corpus_size,
                outcome.best.title(),
                outcome.comparison[0].accuracy,
                outcome.out_dir.display()
            );
            print!(
                "{}",
                std::fs::read_to_string(outcome.out_dir.join(format!("comparison.{ext}"))).unwrap_or_default()
            );
        }
    }
    Ok(())
}
