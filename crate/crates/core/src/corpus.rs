//! Document records, ingestion, expert-label adjudication, stratified
//! splitting, synthetic corpora, and class-distribution reporting.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::categories::CategorySet;
use crate::error::{DataError, DataResult};
use crate::rng;

pub const CSV_HEADER: [&str; 10] =
    ["id", "text", "label", "polarity", "lat", "lon", "location", "expert1", "expert2", "expert3"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Positive => "positive",
            Polarity::Negative => "negative",
        }
    }
}

impl FromStr for Polarity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "positive" => Ok(Polarity::Positive),
            "negative" => Ok(Polarity::Negative),
            other => Err(format!("expected `positive` or `negative`, got `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeoTag {
    pub lat: f64,
    pub lon: f64,
    pub location: Option<String>,
}

impl GeoTag {
    pub fn new(lat: f64, lon: f64, location: Option<String>) -> Result<Self, (&'static str, String)> {
        if !(-90.0..=90.0).contains(&lat) {
            return Err(("lat", format!("latitude {lat} outside [-90, 90]")));
        }
        if !(-180.0..=180.0).contains(&lon) {
            return Err(("lon", format!("longitude {lon} outside [-180, 180]")));
        }
        Ok(GeoTag { lat, lon, location })
    }
}

/// One text record. Optional fields stay `None` when the source omits them.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub label: Option<String>,
    pub polarity: Option<Polarity>,
    pub geotag: Option<GeoTag>,
    pub expert_labels: Option<[String; 3]>,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Document { id: id.into(), text: text.into(), label: None, polarity: None, geotag: None, expert_labels: None }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn with_polarity(mut self, polarity: Polarity) -> Self {
        self.polarity = Some(polarity);
        self
    }

    pub fn with_experts(mut self, a: &str, b: &str, c: &str) -> Self {
        self.expert_labels = Some([a.to_string(), b.to_string(), c.to_string()]);
        self
    }

    pub fn with_geotag(mut self, geotag: GeoTag) -> Self {
        self.geotag = Some(geotag);
        self
    }

    fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("id".into(), Value::from(self.id.as_str()));
        obj.insert("text".into(), Value::from(self.text.as_str()));
        if let Some(label) = &self.label {
            obj.insert("label".into(), Value::from(label.as_str()));
        }
        if let Some(p) = self.polarity {
            obj.insert("polarity".into(), Value::from(p.as_str()));
        }
        if let Some(g) = &self.geotag {
            obj.insert("lat".into(), Value::from(g.lat));
            obj.insert("lon".into(), Value::from(g.lon));
            if let Some(loc) = &g.location {
                obj.insert("location".into(), Value::from(loc.as_str()));
            }
        }
        if let Some(ex) = &self.expert_labels {
            obj.insert("expert_labels".into(), Value::Array(ex.iter().map(|s| Value::from(s.as_str())).collect()));
        }
        Value::Object(obj)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Csv,
    Jsonl,
}

impl CorpusFormat {
    /// Guesses the format from the file extension (`.csv` or `.jsonl`/`.json`).
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(CorpusFormat::Csv),
            "jsonl" | "ndjson" | "json" => Some(CorpusFormat::Jsonl),
            _ => None,
        }
    }
}

impl FromStr for CorpusFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(CorpusFormat::Csv),
            "jsonl" => Ok(CorpusFormat::Jsonl),
            other => Err(format!("unknown corpus format `{other}` (expected csv or jsonl)")),
        }
    }
}

/// Raw field values for one record, before validation.
#[derive(Default)]
struct RawRecord {
    id: Option<String>,
    text: Option<String>,
    label: Option<String>,
    polarity: Option<String>,
    lat: Option<String>,
    lon: Option<String>,
    location: Option<String>,
    experts: Vec<Option<String>>,
}

struct RecordContext<'a> {
    path: &'a str,
    line: usize,
    categories: &'a CategorySet,
}

impl RecordContext<'_> {
    fn err(&self, field: &str, message: impl Into<String>) -> DataError {
        DataError::Field {
            path: self.path.to_string(),
            line: self.line,
            field: field.to_string(),
            message: message.into(),
        }
    }

    fn category(&self, field: &str, value: String) -> DataResult<String> {
        if self.categories.index_of(&value).is_none() {
            return Err(self.err(field, format!("unknown category `{value}`")));
        }
        Ok(value)
    }

    fn coordinate(&self, field: &str, value: &str) -> DataResult<f64> {
        let v: f64 = value.trim().parse().map_err(|_| self.err(field, format!("`{value}` is not a number")))?;
        if !v.is_finite() {
            return Err(self.err(field, "coordinate is not finite"));
        }
        Ok(v)
    }

    fn build(&self, raw: RawRecord) -> DataResult<Document> {
        let id = raw.id.ok_or_else(|| self.err("id", "missing"))?;
        let text = raw.text.ok_or_else(|| self.err("text", "missing"))?;
        let label = raw.label.map(|l| self.category("label", l)).transpose()?;
        let polarity = raw.polarity.map(|p| p.parse::<Polarity>().map_err(|m| self.err("polarity", m))).transpose()?;
        let geotag = match (raw.lat, raw.lon) {
            (Some(lat), Some(lon)) => {
                let lat = self.coordinate("lat", &lat)?;
                let lon = self.coordinate("lon", &lon)?;
                Some(GeoTag::new(lat, lon, raw.location).map_err(|(f, m)| self.err(f, m))?)
            }
            (None, None) => {
                if raw.location.is_some() {
                    return Err(self.err("location", "location given without lat/lon"));
                }
                None
            }
            (None, Some(_)) => return Err(self.err("lat", "lon given without lat")),
            (Some(_), None) => return Err(self.err("lon", "lat given without lon")),
        };
        let expert_labels = if raw.experts.iter().all(Option::is_none) {
            None
        } else {
            if raw.experts.len() != 3 || raw.experts.iter().any(Option::is_none) {
                return Err(self.err(
                    "expert_labels",
                    format!("expected exactly 3 expert labels, got {}", raw.experts.iter().flatten().count()),
                ));
            }
            let mut labels = raw
                .experts
                .into_iter()
                .flatten()
                .enumerate()
                .map(|(i, l)| self.category(&format!("expert{}", i + 1), l));
            Some([labels.next().unwrap()?, labels.next().unwrap()?, labels.next().unwrap()?])
        };
        Ok(Document { id, text, label, polarity, geotag, expert_labels })
    }
}

fn non_empty(s: &str) -> Option<String> {
    if s.is_empty() {
        None
    } else {
        Some(s.to_string())
    }
}

/// Reads a corpus, validating every record against `categories`.
pub fn load_corpus(
    path: impl AsRef<Path>,
    format: CorpusFormat,
    categories: &CategorySet,
) -> DataResult<Vec<Document>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| DataError::io(path, e))?;
    let origin = path.display().to_string();
    let docs = match format {
        CorpusFormat::Csv => read_csv(BufReader::new(file), &origin, categories)?,
        CorpusFormat::Jsonl => read_jsonl(BufReader::new(file), &origin, categories)?,
    };
    check_unique_ids(&docs)?;
    Ok(docs)
}

pub fn check_unique_ids(docs: &[Document]) -> DataResult<()> {
    let mut seen = HashSet::with_capacity(docs.len());
    for d in docs {
        if !seen.insert(d.id.as_str()) {
            return Err(DataError::DuplicateId(d.id.clone()));
        }
    }
    Ok(())
}

pub fn read_csv<R: std::io::Read>(reader: R, origin: &str, categories: &CategorySet) -> DataResult<Vec<Document>> {
    let mut rdr = csv::ReaderBuilder::new().flexible(false).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let mut columns = Vec::with_capacity(headers.len());
    for h in headers.iter() {
        let h = h.trim();
        if !CSV_HEADER.contains(&h) {
            return Err(DataError::Field {
                path: origin.to_string(),
                line: 1,
                field: h.to_string(),
                message: "unknown column".into(),
            });
        }
        columns.push(h.to_string());
    }
    for required in ["id", "text"] {
        if !columns.iter().any(|c| c == required) {
            return Err(DataError::Field {
                path: origin.to_string(),
                line: 1,
                field: required.to_string(),
                message: "missing required column".into(),
            });
        }
    }
    let mut docs = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let mut raw = RawRecord { experts: vec![None; 3], ..Default::default() };
        for (col, value) in columns.iter().zip(record.iter()) {
            let v = non_empty(value);
            match col.as_str() {
                "id" => raw.id = v,
                "text" => raw.text = Some(value.to_string()),
                "label" => raw.label = v,
                "polarity" => raw.polarity = v,
                "lat" => raw.lat = v,
                "lon" => raw.lon = v,
                "location" => raw.location = v,
                "expert1" => raw.experts[0] = v,
                "expert2" => raw.experts[1] = v,
                "expert3" => raw.experts[2] = v,
                _ => unreachable!(),
            }
        }
        let ctx = RecordContext { path: origin, line, categories };
        docs.push(ctx.build(raw)?);
    }
    Ok(docs)
}

pub fn read_jsonl<R: BufRead>(reader: R, origin: &str, categories: &CategorySet) -> DataResult<Vec<Document>> {
    let mut docs = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| DataError::io(origin, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let ctx = RecordContext { path: origin, line: n + 1, categories };
        let value: Value = serde_json::from_str(&line).map_err(|e| ctx.err("record", format!("invalid JSON: {e}")))?;
        let Value::Object(obj) = value else {
            return Err(ctx.err("record", "expected a JSON object"));
        };
        let mut raw = RawRecord::default();
        for (key, value) in obj {
            let as_string = |field: &str, v: Value| -> DataResult<Option<String>> {
                match v {
                    Value::Null => Ok(None),
                    Value::String(s) => Ok(non_empty(&s).or(if field == "text" { Some(s) } else { None })),
                    Value::Number(num) if field == "lat" || field == "lon" => Ok(Some(num.to_string())),
                    other => Err(ctx.err(field, format!("unexpected value {other}"))),
                }
            };
            match key.as_str() {
                "id" => raw.id = as_string("id", value)?,
                "text" => raw.text = as_string("text", value)?,
                "label" => raw.label = as_string("label", value)?,
                "polarity" => raw.polarity = as_string("polarity", value)?,
                "lat" => raw.lat = as_string("lat", value)?,
                "lon" => raw.lon = as_string("lon", value)?,
                "location" => raw.location = as_string("location", value)?,
                "expert_labels" => match value {
                    Value::Null => {}
                    Value::Array(items) => {
                        raw.experts =
                            items.into_iter().map(|v| as_string("expert_labels", v)).collect::<DataResult<_>>()?;
                        if raw.experts.len() != 3 {
                            return Err(ctx.err(
                                "expert_labels",
                                format!("expected exactly 3 expert labels, got {}", raw.experts.len()),
                            ));
                        }
                    }
                    other => return Err(ctx.err("expert_labels", format!("expected array, got {other}"))),
                },
                other => return Err(ctx.err(other, "unknown field")),
            }
        }
        docs.push(ctx.build(raw)?);
    }
    Ok(docs)
}

/// Writes a corpus in the given format; output bytes depend only on the input.
pub fn write_corpus(path: impl AsRef<Path>, docs: &[Document], format: CorpusFormat) -> DataResult<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| DataError::io(path, e))?;
    let mut out = BufWriter::new(file);
    match format {
        CorpusFormat::Jsonl => {
            for d in docs {
                serde_json::to_writer(&mut out, &d.to_json())?;
                out.write_all(b"\n").map_err(|e| DataError::io(path, e))?;
            }
        }
        CorpusFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(CSV_HEADER)?;
            for d in docs {
                let (lat, lon, loc) = match &d.geotag {
                    Some(g) => (g.lat.to_string(), g.lon.to_string(), g.location.clone().unwrap_or_default()),
                    None => Default::default(),
                };
                let ex = d.expert_labels.clone().unwrap_or_default();
                w.write_record([
                    d.id.as_str(),
                    d.text.as_str(),
                    d.label.as_deref().unwrap_or(""),
                    d.polarity.map_or("", Polarity::as_str),
                    &lat,
                    &lon,
                    &loc,
                    &ex[0],
                    &ex[1],
                    &ex[2],
                ])?;
            }
            w.flush().map_err(|e| DataError::io(path, e))?;
        }
    }
    out.flush().map_err(|e| DataError::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Adjudication {
    Accepted(String),
    Rejected,
}

/// Two-of-three majority over the expert labels.
pub fn adjudicate(doc: &Document) -> DataResult<Adjudication> {
    let [a, b, c] = doc
        .expert_labels
        .as_ref()
        .ok_or_else(|| DataError::Document { id: doc.id.clone(), message: "no expert labels to adjudicate".into() })?;
    let winner = if a == b || a == c {
        Some(a)
    } else if b == c {
        Some(b)
    } else {
        None
    };
    Ok(winner.map_or(Adjudication::Rejected, |l| Adjudication::Accepted(l.clone())))
}

/// Returns (labeled, rejected). Accepted documents get their `label` set.
pub fn adjudicate_corpus(corpus: Vec<Document>) -> DataResult<(Vec<Document>, Vec<Document>)> {
    let mut labeled = Vec::new();
    let mut rejected = Vec::new();
    for mut doc in corpus {
        match adjudicate(&doc)? {
            Adjudication::Accepted(label) => {
                doc.label = Some(label);
                labeled.push(doc);
            }
            Adjudication::Rejected => rejected.push(doc),
        }
    }
    Ok((labeled, rejected))
}

fn label_indices(corpus: &[Document], categories: &CategorySet) -> DataResult<Vec<usize>> {
    corpus
        .iter()
        .map(|d| {
            let label = d
                .label
                .as_deref()
                .ok_or_else(|| DataError::Document { id: d.id.clone(), message: "document is unlabeled".into() })?;
            categories.require(label)
        })
        .collect()
}

/// Number of test documents taken from a class of size `n`.
pub fn test_count(n: usize, test_fraction: f64) -> usize {
    // absorbs representation error such as 0.57 * 100 = 56.99999999999999
    ((n as f64) * test_fraction + 1e-9).floor() as usize
}

/// Per-class seeded shuffle, then the first `floor(n_c * test_fraction)`
/// documents of each class go to the test set. Both outputs keep the input
/// order.
pub fn stratified_split(
    corpus: &[Document],
    categories: &CategorySet,
    test_fraction: f64,
    seed: u64,
) -> DataResult<(Vec<Document>, Vec<Document>)> {
    if !(0.0..1.0).contains(&test_fraction) {
        return Err(DataError::Invalid(format!("test fraction {test_fraction} outside [0, 1)")));
    }
    let labels = label_indices(corpus, categories)?;
    let mut in_test = vec![false; corpus.len()];
    for class in 0..categories.len() {
        let mut members: Vec<usize> = (0..corpus.len()).filter(|&i| labels[i] == class).collect();
        let take = test_count(members.len(), test_fraction);
        members.shuffle(&mut rng::stream(seed, class as u64));
        for &i in &members[..take] {
            in_test[i] = true;
        }
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (doc, is_test) in corpus.iter().zip(in_test) {
        if is_test {
            test.push(doc.clone());
        } else {
            train.push(doc.clone());
        }
    }
    Ok((train, test))
}

/// Per-category (train, test) counts, as in a dataset-distribution table.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionSpec {
    pub categories: CategorySet,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

impl DistributionSpec {
    /// The built-in 2577-document class distribution.
    pub fn builtin() -> Self {
        DistributionSpec {
            categories: CategorySet::canonical(),
            train: vec![395, 297, 252, 234, 209, 202, 195, 150],
            test: vec![131, 99, 84, 76, 70, 68, 65, 50],
        }
    }

    pub fn count(&self, class: usize) -> usize {
        self.train[class] + self.test[class]
    }

    pub fn total(&self) -> usize {
        (0..self.categories.len()).map(|c| self.count(c)).sum()
    }

    pub fn percent(&self, class: usize) -> f64 {
        let total = self.total();
        if total == 0 {
            return 0.0;
        }
        100.0 * self.count(class) as f64 / total as f64
    }

    /// Parses `category,train,test[,percent]` CSV. A percent column, when
    /// present, must agree with the counts to within 0.005.
    pub fn parse_csv(source: &str, origin: &str, categories: &CategorySet) -> DataResult<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source.as_bytes());
        let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let col = |name: &str| headers.iter().position(|h| h == name);
        let field_err = |line: usize, field: &str, message: String| DataError::Field {
            path: origin.to_string(),
            line,
            field: field.to_string(),
            message,
        };
        let (Some(cat_col), Some(train_col), Some(test_col)) = (col("category"), col("train"), col("test")) else {
            return Err(field_err(1, "header", "expected columns category,train,test".into()));
        };
        let pct_col = col("percent");
        let k = categories.len();
        let mut train = vec![None; k];
        let mut test = vec![0; k];
        let mut stated = Vec::new();
        for record in rdr.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            let get = |i: usize| record.get(i).unwrap_or("");
            let class = categories
                .index_of(get(cat_col))
                .ok_or_else(|| field_err(line, "category", format!("unknown category `{}`", get(cat_col))))?;
            if train[class].is_some() {
                return Err(field_err(line, "category", "category listed twice".into()));
            }
            let parse = |i: usize, name: &str| {
                get(i).parse::<usize>().map_err(|_| field_err(line, name, format!("`{}` is not a count", get(i))))
            };
            train[class] = Some(parse(train_col, "train")?);
            test[class] = parse(test_col, "test")?;
            if let Some(pc) = pct_col {
                let v: f64 = get(pc)
                    .parse()
                    .map_err(|_| field_err(line, "percent", format!("`{}` is not a number", get(pc))))?;
                stated.push((class, line, v));
            }
        }
        let train = train
            .into_iter()
            .enumerate()
            .map(|(c, t)| {
                t.ok_or_else(|| DataError::Invalid(format!("{origin}: category `{}` missing", categories.name(c))))
            })
            .collect::<DataResult<Vec<_>>>()?;
        let spec = DistributionSpec { categories: categories.clone(), train, test };
        if spec.total() == 0 {
            return Err(DataError::Empty(format!("{origin}: distribution has zero documents")));
        }
        for (class, line, v) in stated {
            if (spec.percent(class) - v).abs() > 0.005 {
                return Err(field_err(
                    line,
                    "percent",
                    format!("stated {v} but counts give {:.4}", spec.percent(class)),
                ));
            }
        }
        Ok(spec)
    }

    pub fn load(path: impl AsRef<Path>, categories: &CategorySet) -> DataResult<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| DataError::io(path, e))?;
        Self::parse_csv(&text, &path.display().to_string(), categories)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("category,train,test,percent\n");
        for (c, name) in self.categories.names().iter().enumerate() {
            let _ = writeln!(out, "{name},{},{},{:.2}", self.train[c], self.test[c], self.percent(c));
        }
        out
    }

    /// Plain-text table with a total row.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<16} {:>8} {:>8} {:>8}", "Class", "Train", "Test", "%");
        for (c, name) in self.categories.names().iter().enumerate() {
            let _ = writeln!(out, "{:<16} {:>8} {:>8} {:>8.2}", name, self.train[c], self.test[c], self.percent(c));
        }
        let train: usize = self.train.iter().sum();
        let test: usize = self.test.iter().sum();
        let _ = writeln!(out, "{:<16} {:>8} {:>8} {:>8.2}", "Total", train, test, 100.0);
        out
    }

    /// Counts of a labeled train/test pair.
    pub fn from_split(train: &[Document], test: &[Document], categories: &CategorySet) -> DataResult<Self> {
        let count = |docs: &[Document]| -> DataResult<Vec<usize>> {
            let mut counts = vec![0; categories.len()];
            for c in label_indices(docs, categories)? {
                counts[c] += 1;
            }
            Ok(counts)
        };
        Ok(DistributionSpec { categories: categories.clone(), train: count(train)?, test: count(test)? })
    }
}

/// Per-category counts and percentages (rounded to 2 decimals).
#[derive(Debug, Clone, PartialEq)]
pub struct ClassDistribution {
    pub categories: CategorySet,
    pub counts: Vec<usize>,
    pub percents: Vec<f64>,
}

impl ClassDistribution {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

pub fn class_distribution(corpus: &[Document], categories: &CategorySet) -> DataResult<ClassDistribution> {
    if corpus.is_empty() {
        return Err(DataError::Empty("corpus has no documents".into()));
    }
    let mut counts = vec![0usize; categories.len()];
    for c in label_indices(corpus, categories)? {
        counts[c] += 1;
    }
    let total = corpus.len() as f64;
    let percents = counts.iter().map(|&n| (100.0 * n as f64 / total * 100.0).round() / 100.0).collect();
    Ok(ClassDistribution { categories: categories.clone(), counts, percents })
}

/// A named place synthetic documents can be geotagged with.
#[derive(Debug, Clone, PartialEq)]
pub struct Location {
    pub name: String,
    pub lat: f64,
    pub lon: f64,
}

impl Location {
    pub fn new(name: &str, lat: f64, lon: f64) -> Self {
        Location { name: name.to_string(), lat, lon }
    }
}

pub fn default_locations() -> Vec<Location> {
    vec![
        Location::new("Islamabad", 33.6844, 73.0479),
        Location::new("Rawalpindi", 33.5651, 73.0169),
        Location::new("Lahore", 31.5204, 74.3587),
        Location::new("Karachi", 24.8607, 67.0011),
        Location::new("Peshawar", 34.0151, 71.5249),
        Location::new("Quetta", 30.1798, 66.9750),
        Location::new("Multan", 30.1575, 71.5249),
        Location::new("Faisalabad", 31.4504, 73.1350),
        Location::new("Hyderabad", 25.3960, 68.3578),
        Location::new("Gwadar", 25.1216, 62.3254),
    ]
}

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub keyword_pool_size: usize,
    pub noise_pool_size: usize,
    pub signal_prob: f64,
    pub doc_len: (usize, usize),
    /// Geotag every document with a location drawn from this list (empty: none).
    pub locations: Vec<Location>,
    /// Per-expert probability of recording the true label; `None` omits expert labels.
    pub expert_accuracy: Option<f64>,
    /// Extra unlabeled documents with positive polarity, drawn from the noise pool.
    pub positive_docs: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            keyword_pool_size: 20,
            noise_pool_size: 200,
            signal_prob: 0.8,
            doc_len: (5, 20),
            locations: default_locations(),
            expert_accuracy: None,
            positive_docs: 0,
        }
    }
}

impl SynthConfig {
    fn validate(&self) -> DataResult<()> {
        let bad = |m: &str| Err(DataError::Invalid(m.to_string()));
        if !(0.0..=1.0).contains(&self.signal_prob) {
            return bad("signal_prob must be in [0, 1]");
        }
        if self.keyword_pool_size == 0 || self.noise_pool_size == 0 {
            return bad("keyword and noise pools must be nonempty");
        }
        if self.doc_len.0 > self.doc_len.1 {
            return bad("doc length range has min > max");
        }
        if let Some(p) = self.expert_accuracy {
            if !(0.0..=1.0).contains(&p) {
                return bad("expert accuracy must be in [0, 1]");
            }
        }
        Ok(())
    }
}

/// Keyword token `j` of a category, e.g. `socialaspects07`.
pub fn keyword_token(category: &str, j: usize) -> String {
    let slug: String = category.chars().filter(|c| c.is_alphanumeric()).flat_map(char::to_lowercase).collect();
    format!("{slug}{j:02}")
}

pub fn noise_token(j: usize) -> String {
    format!("w{j:03}")
}

/// Generates a labeled corpus with exactly the spec's per-category counts.
/// Every token is drawn from the category's own keyword pool with
/// probability `signal_prob`, otherwise from the shared noise pool.
pub fn synthesize_corpus(spec: &DistributionSpec, cfg: &SynthConfig, seed: u64) -> DataResult<Vec<Document>> {
    cfg.validate()?;
    if spec.total() == 0 {
        return Err(DataError::Empty("distribution has zero documents".into()));
    }
    let cats = &spec.categories;
    let keywords: Vec<Vec<String>> =
        cats.names().iter().map(|name| (0..cfg.keyword_pool_size).map(|j| keyword_token(name, j)).collect()).collect();
    let noise: Vec<String> = (0..cfg.noise_pool_size).map(noise_token).collect();

    let mut text_rng = rng::stream(seed, 0);
    let mut meta_rng = rng::stream(seed, 1);
    let mut order_rng = rng::stream(seed, 2);

    let mut docs = Vec::with_capacity(spec.total() + cfg.positive_docs);
    let draw_text = |pool: Option<&[String]>, rng: &mut rand_chacha::ChaCha8Rng| {
        let len = rng.gen_range(cfg.doc_len.0..=cfg.doc_len.1);
        let mut words = Vec::with_capacity(len);
        for _ in 0..len {
            let word = match pool {
                Some(kw) if rng.gen_bool(cfg.signal_prob) => &kw[rng.gen_range(0..kw.len())],
                _ => &noise[rng.gen_range(0..noise.len())],
            };
            words.push(word.as_str());
        }
        words.join(" ")
    };
    let geotag = |rng: &mut rand_chacha::ChaCha8Rng| -> Option<GeoTag> {
        if cfg.locations.is_empty() {
            return None;
        }
        let loc = &cfg.locations[rng.gen_range(0..cfg.locations.len())];
        let lat = (loc.lat + rng.gen_range(-0.05..0.05)).clamp(-90.0, 90.0);
        let lon = (loc.lon + rng.gen_range(-0.05..0.05)).clamp(-180.0, 180.0);
        Some(GeoTag { lat, lon, location: Some(loc.name.clone()) })
    };

    for (class, pool) in keywords.iter().enumerate() {
        for _ in 0..spec.count(class) {
            let text = draw_text(Some(pool), &mut text_rng);
            let mut doc =
                Document::new(String::new(), text).with_label(cats.name(class)).with_polarity(Polarity::Negative);
            doc.geotag = geotag(&mut meta_rng);
            if let Some(p) = cfg.expert_accuracy {
                let mut expert = || {
                    if meta_rng.gen_bool(p) || cats.len() == 1 {
                        cats.name(class).to_string()
                    } else {
                        let other = meta_rng.gen_range(0..cats.len() - 1);
                        let other = if other >= class { other + 1 } else { other };
                        cats.name(other).to_string()
                    }
                };
                doc.expert_labels = Some([expert(), expert(), expert()]);
            }
            docs.push(doc);
        }
    }
    for _ in 0..cfg.positive_docs {
        let text = draw_text(None, &mut text_rng);
        let mut doc = Document::new(String::new(), text).with_polarity(Polarity::Positive);
        doc.geotag = geotag(&mut meta_rng);
        docs.push(doc);
    }
    docs.shuffle(&mut order_rng);
    for (i, doc) in docs.iter_mut().enumerate() {
        doc.id = format!("syn-{i:06}");
    }
    Ok(docs)
}
