use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use negclass_core::eval::{aggregate, confusion, per_class_metrics};
use negclass_core::textprep::analyze;
use negclass_core::{
    stratified_split, synthesize_corpus, train_model, write_model, CategorySet, DistributionSpec, Document,
    FeatureConfig, FeatureKind, Featurizer, ModelKind, SynthConfig, TrainConfig,
};

fn corpus() -> (Vec<Document>, Vec<Document>) {
    let docs = synthesize_corpus(&DistributionSpec::builtin(), &SynthConfig::default(), 42).unwrap();
    stratified_split(&docs, &CategorySet::canonical(), 0.25, 7).unwrap()
}

fn featurize(c: &mut Criterion) {
    let (train, _) = corpus();
    let tokens: Vec<Vec<String>> = train.iter().map(|d| analyze(&d.text)).collect();
    c.bench_function("analyze 1935 docs", |b| {
        b.iter(|| train.iter().for_each(|d| drop(black_box(analyze(black_box(&d.text))))))
    });
    c.bench_function("fit tfidf", |b| {
        b.iter(|| Featurizer::fit(black_box(&tokens), FeatureKind::Tfidf, 2, Some(20000)).unwrap())
    });
}

fn train(c: &mut Criterion) {
    let (train, _) = corpus();
    let cats = CategorySet::canonical();
    let mut group = c.benchmark_group("train");
    group.sample_size(10);
    for kind in ModelKind::ALL {
        group.bench_function(kind.as_str(), |b| {
            b.iter(|| {
                train_model(kind, &train, &cats, &FeatureConfig::default(), &TrainConfig::for_kind(kind)).unwrap()
            })
        });
    }
    group.finish();
}

fn predict(c: &mut Criterion) {
    let (train, test) = corpus();
    let cats = CategorySet::canonical();
    let model =
        train_model(ModelKind::Logistic, &train, &cats, &FeatureConfig::default(), &TrainConfig::default()).unwrap();
    c.bench_function("predict logreg 642 docs", |b| b.iter(|| model.predict_batch(black_box(&test)).unwrap()));
    c.bench_function("serialize logreg", |b| b.iter(|| write_model(black_box(&model)).unwrap()));
}

fn metrics(c: &mut Criterion) {
    let truth: Vec<usize> = (0..10_000).map(|i| (i * 7) % 8).collect();
    let pred: Vec<usize> = (0..10_000).map(|i| (i * 5) % 8).collect();
    c.bench_function("metrics 10k docs", |b| {
        b.iter_batched(
            || (truth.clone(), pred.clone()),
            |(t, p)| {
                let m = confusion(&t, &p, 8).unwrap();
                aggregate(&per_class_metrics(&m), &m).unwrap()
            },
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, featurize, train, predict, metrics);
criterion_main!(benches);
