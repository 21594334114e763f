//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each, and
//! exits non-zero if any fails.

#[path = "../../core/tests/oracle/mod.rs"]
mod oracle;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use negclass_core::{
    load_corpus, load_model, parse_geojson, save_model, synthesize_corpus, train_model, CategorySet, CorpusFormat,
    DistributionSpec, Document, EvalReport, FeatureConfig, ModelKind, SynthConfig, TrainConfig,
};

const REFERENCE_TRAIN: [usize; 8] = [395, 297, 252, 234, 209, 202, 195, 150];
const REFERENCE_TEST: [usize; 8] = [131, 99, 84, 76, 70, 68, 65, 50];
const REFERENCE_PERCENT: [f64; 8] = [20.41, 15.37, 13.04, 12.03, 10.83, 10.48, 10.09, 7.76];

type Verdict = Result<String, String>;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_negclass")
}

fn workspace_file(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

fn negclass(args: &[&str]) -> Result<String, String> {
    let out = Command::new(bin())
        .args(args)
        .env_remove(negclass_core::CONFIG_ENV)
        .output()
        .map_err(|e| format!("spawn: {e}"))?;
    if !out.status.success() {
        return Err(format!(
            "`negclass {}` exited {:?}: {}",
            args.join(" "),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

fn p(path: &Path) -> &str {
    path.to_str().expect("utf-8 temp path")
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    if elapsed < limit {
        Ok(())
    } else {
        Err(format!("took {elapsed:.2?}, limit {limit:?}"))
    }
}

fn metric_oracle() -> Verdict {
    let t = Instant::now();
    let err = oracle::metric_max_error(50, 1000, 8, 2024);
    within(t.elapsed(), Duration::from_secs(5))?;
    if err <= 1e-12 {
        Ok(format!("max deviation {err:.1e} over 50 x 1000 docs"))
    } else {
        Err(format!("max deviation {err:e} > 1e-12"))
    }
}

fn gradient_check() -> Verdict {
    let t = Instant::now();
    let lr = oracle::logistic_gradient_error(10, 5, 6, 3, 1e-6, 2024);
    let ff = oracle::feedforward_gradient_error(10, 5, 6, 3, 1e-6, 2024);
    within(t.elapsed(), Duration::from_secs(5))?;
    if lr < 1e-4 && ff < 1e-4 {
        Ok(format!("relative error logistic {lr:.1e}, feed-forward {ff:.1e}"))
    } else {
        Err(format!("relative error logistic {lr:e}, feed-forward {ff:e}, limit 1e-4"))
    }
}

fn naive_bayes_oracle() -> Verdict {
    let t = Instant::now();
    let err = oracle::naive_bayes_max_error(100, 2024);
    within(t.elapsed(), Duration::from_secs(5))?;
    if err < 1e-9 {
        Ok(format!("max log-posterior deviation {err:.1e} over 100 corpora"))
    } else {
        Err(format!("max deviation {err:e} >= 1e-9"))
    }
}

fn read_jsonl(path: &Path) -> Result<Vec<Document>, String> {
    load_corpus(path, CorpusFormat::Jsonl, &CategorySet::canonical()).map_err(|e| e.to_string())
}

fn label_counts(docs: &[Document]) -> Vec<usize> {
    let cats = CategorySet::canonical();
    let mut counts = vec![0; cats.len()];
    for d in docs {
        counts[cats.index_of(d.label.as_deref().unwrap()).unwrap()] += 1;
    }
    counts
}

fn distribution_synth(dir: &Path) -> Verdict {
    let spec = workspace_file("data/distribution.csv");
    let corpus = dir.join("corpus.jsonl");
    negclass(&["synth", "--spec", p(&spec), "--seed", "42", "--out", p(&corpus)])?;
    let docs = read_jsonl(&corpus)?;
    if docs.len() != 2577 {
        return Err(format!("{} documents, expected 2577", docs.len()));
    }
    let counts = label_counts(&docs);
    let mut worst = 0.0f64;
    for (c, &want) in counts.iter().zip(&REFERENCE_PERCENT) {
        worst = worst.max((*c as f64 * 100.0 / 2577.0 - want).abs());
    }
    let exact = counts.iter().zip(REFERENCE_TRAIN.iter().zip(&REFERENCE_TEST)).all(|(&c, (&a, &b))| c == a + b);
    if worst <= 0.01 && exact {
        Ok(format!("2577 documents, max percent deviation {worst:.4}"))
    } else {
        Err(format!("counts {counts:?}, max percent deviation {worst:.4}"))
    }
}

fn distribution_split(dir: &Path) -> Verdict {
    let corpus = dir.join("corpus.jsonl");
    let (train, test) = (dir.join("train.jsonl"), dir.join("test.jsonl"));
    negclass(&[
        "split",
        "-i",
        p(&corpus),
        "--test-fraction",
        "0.25",
        "--seed",
        "7",
        "--train",
        p(&train),
        "--test",
        p(&test),
    ])?;
    let got = label_counts(&read_jsonl(&test)?);
    let off: Vec<i64> = got.iter().zip(&REFERENCE_TEST).map(|(&g, &w)| g as i64 - w as i64).collect();
    if off.iter().all(|d| d.abs() <= 1) {
        Ok(format!("test counts {got:?}"))
    } else {
        Err(format!("test counts {got:?} vs {REFERENCE_TEST:?}"))
    }
}

fn write_config(path: &Path, out_dir: &Path, signal: f64) {
    let text = format!(
        "seed = 42\nout_dir = {}\nsignal_prob = {signal}\npositive_docs = 300\ngate = column\n\
         test_fraction = 0.25\nmodels = nb, logreg, svm, ffnn\nreport_format = json\n",
        out_dir.display()
    );
    std::fs::write(path, text).unwrap();
}

fn pipeline(dir: &Path, name: &str, signal: f64) -> Result<(PathBuf, Duration), String> {
    let out = dir.join(name);
    let conf = dir.join(format!("{name}.conf"));
    write_config(&conf, &out, signal);
    let t = Instant::now();
    negclass(&["--config", p(&conf), "pipeline"])?;
    Ok((out, t.elapsed()))
}

fn accuracies(out: &Path) -> Result<Vec<(ModelKind, f64)>, String> {
    ModelKind::ALL
        .iter()
        .map(|&k| {
            let path = out.join(format!("report_{}.json", k.as_str()));
            let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
            let report: EvalReport = serde_json::from_str(&text).map_err(|e| e.to_string())?;
            Ok((k, report.accuracy))
        })
        .collect()
}

fn end_to_end(dir: &Path) -> Verdict {
    let mut notes = Vec::new();
    for (signal, floor) in [(0.8, 0.90), (1.0, 0.99)] {
        let (out, elapsed) = pipeline(dir, &format!("e2e_{signal}"), signal)?;
        within(elapsed, Duration::from_secs(60))?;
        let acc = accuracies(&out)?;
        if let Some((k, a)) = acc.iter().find(|(_, a)| *a < floor) {
            return Err(format!("signal {signal}: {} accuracy {a:.4} < {floor}", k.as_str()));
        }
        let worst = acc.iter().map(|(_, a)| *a).fold(1.0, f64::min);
        notes.push(format!("signal {signal}: min accuracy {worst:.4} in {elapsed:.2?}"));
    }
    Ok(notes.join("; "))
}

fn determinism(dir: &Path) -> Verdict {
    let (a, _) = pipeline(dir, "det_a", 0.8)?;
    let (b, _) = pipeline(dir, "det_b", 0.8)?;
    let mut names: Vec<String> = std::fs::read_dir(&a)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    for required in ["model_nb.bin", "model_ffnn.bin", "report_logreg.json", "geomap.geojson"] {
        if !names.iter().any(|n| n == required) {
            return Err(format!("{required} not produced"));
        }
    }
    for name in &names {
        let x = std::fs::read(a.join(name)).map_err(|e| e.to_string())?;
        let y = std::fs::read(b.join(name)).map_err(|e| format!("{name}: {e}"))?;
        if x != y {
            return Err(format!("{name} differs between runs"));
        }
    }
    Ok(format!("{} artifacts byte-identical", names.len()))
}

fn serialization(dir: &Path) -> Verdict {
    let cats = CategorySet::canonical();
    let spec = |n: usize| DistributionSpec { categories: cats.clone(), train: vec![n; 8], test: vec![0; 8] };
    let train = synthesize_corpus(&spec(40), &SynthConfig::default(), 1).map_err(|e| e.to_string())?;
    let noisy = SynthConfig { signal_prob: 0.5, ..SynthConfig::default() };
    let probe = synthesize_corpus(&spec(125), &noisy, 2).map_err(|e| e.to_string())?;
    for kind in ModelKind::ALL {
        let model = train_model(kind, &train, &cats, &FeatureConfig::default(), &TrainConfig::for_kind(kind))
            .map_err(|e| e.to_string())?;
        let path = dir.join(format!("{}.bin", kind.as_str()));
        save_model(&model, &path).map_err(|e| e.to_string())?;
        let back = load_model(&path).map_err(|e| e.to_string())?;
        let a = model.predict_batch(&probe).map_err(|e| e.to_string())?;
        let b = back.predict_batch(&probe).map_err(|e| e.to_string())?;
        let identical = a.iter().zip(&b).all(|(x, y)| {
            x.label == y.label && x.scores.iter().zip(&y.scores).all(|(s, t)| s.to_bits() == t.to_bits())
        });
        if !identical || a.len() != 1000 {
            return Err(format!("{} predictions changed after reload", kind.as_str()));
        }
    }
    Ok("4 model kinds x 1000 documents, labels and scores bit-identical".into())
}

fn report_shape(dir: &Path) -> Verdict {
    let model = dir.join("shape.bin");
    let train = dir.join("train.jsonl");
    let test = dir.join("test.jsonl");
    negclass(&["train", "--model", "logreg", "-i", p(&train), "-o", p(&model)])?;
    let text = negclass(&["evaluate", "-m", p(&model), "-i", p(&test)])?;
    let lines: Vec<&str> = text.lines().collect();
    let header = lines
        .iter()
        .position(|l| ["Precision", "Recall", "F1", "Support"].iter().all(|c| l.contains(c)))
        .ok_or("no Precision/Recall/F1/Support header")?;
    let cats = CategorySet::canonical();
    for (i, name) in cats.names().iter().enumerate() {
        let row = lines.get(header + 1 + i).copied().unwrap_or_default();
        if !row.starts_with(name.as_str()) || row.split_whitespace().count() < 5 {
            return Err(format!("row {} is `{row}`, expected {name}", i + 1));
        }
    }
    let total = lines.get(header + 9).copied().unwrap_or_default();
    if !total.starts_with("Avg/Total") {
        return Err(format!("expected Avg/Total row, got `{total}`"));
    }
    let json = negclass(&["evaluate", "-m", p(&model), "-i", p(&test), "--report-format", "json"])?;
    let report: EvalReport = serde_json::from_str(&json).map_err(|e| e.to_string())?;
    let gap = (report.weighted_avg.recall - report.accuracy).abs();
    if gap <= 1e-9 {
        Ok(format!("8 rows + Avg/Total, |weighted recall - accuracy| = {gap:.1e}"))
    } else {
        Err(format!("weighted recall {} vs accuracy {}", report.weighted_avg.recall, report.accuracy))
    }
}

fn geo_output(dir: &Path) -> Verdict {
    let model = dir.join("shape.bin");
    let test = dir.join("test.jsonl");
    let predicted = dir.join("predicted.jsonl");
    let map = dir.join("map.geojson");
    negclass(&["predict", "-m", p(&model), "-i", p(&test), "-o", p(&predicted)])?;
    negclass(&["geomap", "-i", p(&predicted), "-o", p(&map)])?;
    let text = std::fs::read_to_string(&map).map_err(|e| e.to_string())?;
    let fc = parse_geojson(&text).map_err(|e| e.to_string())?;
    let cats = CategorySet::canonical();
    fc.validate(&cats).map_err(|e| e.to_string())?;

    let docs = read_jsonl(&predicted)?;
    let mut expected: BTreeMap<String, u64> = BTreeMap::new();
    let mut by_location: BTreeMap<String, (f64, f64)> = BTreeMap::new();
    for d in &docs {
        *expected.entry(d.label.clone().unwrap()).or_default() += 1;
        if let Some(g) = &d.geotag {
            by_location.insert(g.location.clone().unwrap_or_default(), (g.lat, g.lon));
        }
    }
    let mut got: BTreeMap<String, u64> = BTreeMap::new();
    for f in &fc.features {
        for (name, n) in &f.properties.counts {
            *got.entry(name.clone()).or_default() += n;
        }
        // every synthetic location sits well inside lon 60..78, lat 23..37,
        // so a swapped pair cannot pass
        let [lon, lat] = f.geometry.coordinates;
        let (doc_lat, doc_lon) = by_location[&f.properties.key];
        if (lon - doc_lon).abs() > 0.1 || (lat - doc_lat).abs() > 0.1 {
            return Err(format!("{}: coordinates [{lon}, {lat}] not in lon-lat order", f.properties.key));
        }
    }
    got.retain(|_, n| *n > 0);
    if got == expected {
        Ok(format!("{} features, category totals match {} predictions", fc.features.len(), docs.len()))
    } else {
        Err(format!("totals {got:?} vs predictions {expected:?}"))
    }
}

fn main() {
    let tmp = tempfile::tempdir().expect("temp dir");
    let dir = tmp.path();
    let criteria: [(&str, &dyn Fn() -> Verdict); 10] = [
        ("metric oracle equivalence", &metric_oracle),
        ("gradient correctness", &gradient_check),
        ("naive Bayes brute-force equivalence", &naive_bayes_oracle),
        ("class distribution reproduction", &|| distribution_synth(dir)),
        ("split reproduction", &|| distribution_split(dir)),
        ("end-to-end accuracy", &|| end_to_end(dir)),
        ("determinism", &|| determinism(dir)),
        ("serialization", &|| serialization(dir)),
        ("report shape", &|| report_shape(dir)),
        ("geo output", &|| geo_output(dir)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS  {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
