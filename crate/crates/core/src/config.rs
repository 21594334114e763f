//! Flat `key = value` settings for every tunable default in the pipeline.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::corpus::{default_locations, CorpusFormat, SynthConfig};
use crate::error::{DataError, DataResult};
use crate::eval::ReportFormat;
use crate::geomap::GeoMode;
use crate::models::{FeatureConfig, ModelKind, TrainConfig};

/// Environment variable naming a default config file.
pub const CONFIG_ENV: &str = "NEGCLASS_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateChoice {
    None,
    Column,
    Lexicon,
}

impl FromStr for GateChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(GateChoice::None),
            "column" => Ok(GateChoice::Column),
            "lexicon" => Ok(GateChoice::Lexicon),
            other => Err(format!("expected none, column or lexicon, got `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeoChoice {
    Auto,
    Named,
    Grid,
}

impl FromStr for GeoChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(GeoChoice::Auto),
            "named" => Ok(GeoChoice::Named),
            "grid" => Ok(GeoChoice::Grid),
            other => Err(format!("expected auto, named or grid, got `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub seed: u64,
    pub split_seed: Option<u64>,
    pub out_dir: PathBuf,

    pub input: Option<PathBuf>,
    pub input_format: Option<CorpusFormat>,
    pub spec: Option<PathBuf>,
    pub keyword_pool_size: usize,
    pub noise_pool_size: usize,
    pub signal_prob: f64,
    pub doc_len_min: usize,
    pub doc_len_max: usize,
    pub geotag: bool,
    pub expert_accuracy: Option<f64>,
    pub positive_docs: usize,

    pub dictionary: Option<PathBuf>,
    pub english_threshold: f64,
    pub gate: GateChoice,
    pub lexicon: Option<PathBuf>,
    pub gate_threshold: f64,

    pub test_fraction: f64,
    pub min_df: usize,
    /// 0 disables the cap.
    pub max_features: usize,
    pub models: Vec<ModelKind>,
    pub nb_alpha: f64,
    pub logreg_learning_rate: f64,
    pub logreg_l2_lambda: f64,
    pub logreg_epochs: usize,
    pub svm_l2_lambda: f64,
    pub svm_epochs: usize,
    pub ffnn_hidden_units: usize,
    pub ffnn_learning_rate: f64,
    pub ffnn_l2_lambda: f64,
    pub ffnn_epochs: usize,

    pub geo_mode: GeoChoice,
    pub grid_cell_deg: f64,
    pub report_format: ReportFormat,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let lr = TrainConfig::for_kind(ModelKind::Logistic);
        let svm = TrainConfig::for_kind(ModelKind::Svm);
        let ff = TrainConfig::for_kind(ModelKind::FeedForward);
        let synth = SynthConfig::default();
        let features = FeatureConfig::default();
        PipelineConfig {
            seed: 42,
            split_seed: None,
            out_dir: PathBuf::from("negclass-out"),
            input: None,
            input_format: None,
            spec: None,
            keyword_pool_size: synth.keyword_pool_size,
            noise_pool_size: synth.noise_pool_size,
            signal_prob: synth.signal_prob,
            doc_len_min: synth.doc_len.0,
            doc_len_max: synth.doc_len.1,
            geotag: true,
            expert_accuracy: None,
            positive_docs: 0,
            dictionary: None,
            english_threshold: 0.7,
            gate: GateChoice::Column,
            lexicon: None,
            gate_threshold: 0.0,
            test_fraction: 0.25,
            min_df: features.min_df,
            max_features: features.max_features.unwrap_or(0),
            models: ModelKind::ALL.to_vec(),
            nb_alpha: lr.nb_alpha,
            logreg_learning_rate: lr.learning_rate,
            logreg_l2_lambda: lr.l2_lambda,
            logreg_epochs: lr.epochs,
            svm_l2_lambda: svm.l2_lambda,
            svm_epochs: svm.epochs,
            ffnn_hidden_units: ff.hidden_units,
            ffnn_learning_rate: ff.learning_rate,
            ffnn_l2_lambda: ff.l2_lambda,
            ffnn_epochs: ff.epochs,
            geo_mode: GeoChoice::Auto,
            grid_cell_deg: crate::geomap::DEFAULT_CELL_DEG,
            report_format: ReportFormat::Text,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
    value.parse().map_err(|_| format!("`{key}`: cannot parse `{value}`"))
}

fn parse_enum<T: FromStr<Err = String>>(key: &str, value: &str) -> Result<T, String> {
    value.parse().map_err(|e| format!("`{key}`: {e}"))
}

fn unit(key: &str, v: f64, closed_top: bool) -> Result<f64, String> {
    let ok = v >= 0.0 && if closed_top { v <= 1.0 } else { v < 1.0 };
    if ok {
        Ok(v)
    } else {
        Err(format!("`{key}` = {v} outside [0, 1{}", if closed_top { "]" } else { ")" }))
    }
}

fn positive(key: &str, v: f64) -> Result<f64, String> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{key}` must be positive, got {v}"))
    }
}

fn non_negative(key: &str, v: f64) -> Result<f64, String> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{key}` must be non-negative, got {v}"))
    }
}

fn at_least_one(key: &str, v: usize) -> Result<usize, String> {
    if v >= 1 {
        Ok(v)
    } else {
        Err(format!("`{key}` must be at least 1"))
    }
}

fn optional_path(value: &str) -> Option<PathBuf> {
    (!value.is_empty()).then(|| PathBuf::from(value))
}

impl PipelineConfig {
    /// Applies one setting, validating it on the way in.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let f = |v: &str| parse_value::<f64>(key, v);
        let u = |v: &str| parse_value::<usize>(key, v);
        match key {
            "seed" => self.seed = parse_value(key, value)?,
            "split_seed" => self.split_seed = Some(parse_value(key, value)?),
            "out_dir" => self.out_dir = PathBuf::from(value),
            "input" => self.input = optional_path(value),
            "input_format" => self.input_format = Some(parse_enum(key, value)?),
            "spec" => self.spec = optional_path(value),
            "keyword_pool_size" => self.keyword_pool_size = at_least_one(key, u(value)?)?,
            "noise_pool_size" => self.noise_pool_size = at_least_one(key, u(value)?)?,
            "signal_prob" => self.signal_prob = unit(key, f(value)?, true)?,
            "doc_len_min" => self.doc_len_min = u(value)?,
            "doc_len_max" => self.doc_len_max = u(value)?,
            "geotag" => self.geotag = parse_value(key, value)?,
            "expert_accuracy" => {
                self.expert_accuracy = if value == "none" { None } else { Some(unit(key, f(value)?, true)?) }
            }
            "positive_docs" => self.positive_docs = u(value)?,
            "dictionary" => self.dictionary = optional_path(value),
            "english_threshold" => self.english_threshold = unit(key, f(value)?, true)?,
            "gate" => self.gate = parse_enum(key, value)?,
            "lexicon" => self.lexicon = optional_path(value),
            "gate_threshold" => {
                let v = f(value)?;
                if !v.is_finite() {
                    return Err(format!("`{key}` must be finite"));
                }
                self.gate_threshold = v;
            }
            "test_fraction" => self.test_fraction = unit(key, f(value)?, false)?,
            "min_df" => self.min_df = at_least_one(key, u(value)?)?,
            "max_features" => self.max_features = u(value)?,
            "models" => {
                let models =
                    value.split(',').map(|m| parse_enum::<ModelKind>(key, m.trim())).collect::<Result<Vec<_>, _>>()?;
                if models.is_empty() {
                    return Err(format!("`{key}` lists no models"));
                }
                self.models = models;
            }
            "nb_alpha" => self.nb_alpha = positive(key, f(value)?)?,
            "logreg_learning_rate" => self.logreg_learning_rate = positive(key, f(value)?)?,
            "logreg_l2_lambda" => self.logreg_l2_lambda = non_negative(key, f(value)?)?,
            "logreg_epochs" => self.logreg_epochs = at_least_one(key, u(value)?)?,
            "svm_l2_lambda" => self.svm_l2_lambda = positive(key, f(value)?)?,
            "svm_epochs" => self.svm_epochs = at_least_one(key, u(value)?)?,
            "ffnn_hidden_units" => self.ffnn_hidden_units = at_least_one(key, u(value)?)?,
            "ffnn_learning_rate" => self.ffnn_learning_rate = positive(key, f(value)?)?,
            "ffnn_l2_lambda" => self.ffnn_l2_lambda = non_negative(key, f(value)?)?,
            "ffnn_epochs" => self.ffnn_epochs = at_least_one(key, u(value)?)?,
            "geo_mode" => self.geo_mode = parse_enum(key, value)?,
            "grid_cell_deg" => self.grid_cell_deg = positive(key, f(value)?)?,
            "report_format" => self.report_format = parse_enum(key, value)?,
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    /// Parses `key = value` lines over the defaults. Blank lines and `#`
    /// comments are ignored; values may be wrapped in double quotes.
    pub fn parse(source: &str, origin: &str) -> DataResult<Self> {
        let mut cfg = PipelineConfig::default();
        for (n, line) in source.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |field: &str, message: String| DataError::Field {
                path: origin.to_string(),
                line: n + 1,
                field: field.to_string(),
                message,
            };
            let (key, value) = line.split_once('=').ok_or_else(|| err("line", "expected `key = value`".into()))?;
            let key = key.trim();
            let value = value.trim();
            let value = value.strip_prefix('"').and_then(|v| v.strip_suffix('"')).unwrap_or(value);
            cfg.set(key, value).map_err(|m| err(key, m))?;
        }
        cfg.validate().map_err(|m| DataError::Invalid(format!("{origin}: {m}")))?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> DataResult<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| DataError::io(path, e))?;
        let mut cfg = Self::parse(&text, &path.display().to_string())?;
        // relative paths inside the file are relative to the file
        if let Some(dir) = path.parent() {
            for p in [&mut cfg.input, &mut cfg.spec, &mut cfg.dictionary, &mut cfg.lexicon].into_iter().flatten() {
                if p.is_relative() {
                    *p = dir.join(&*p);
                }
            }
            if cfg.out_dir.is_relative() {
                cfg.out_dir = dir.join(&cfg.out_dir);
            }
        }
        Ok(cfg)
    }

    /// Cross-field checks.
    pub fn validate(&self) -> Result<(), String> {
        if self.doc_len_min > self.doc_len_max {
            return Err(format!("doc_len_min {} exceeds doc_len_max {}", self.doc_len_min, self.doc_len_max));
        }
        if self.gate == GateChoice::Lexicon && self.lexicon.is_none() {
            return Err("gate = lexicon requires a lexicon path".into());
        }
        Ok(())
    }

    pub fn split_seed(&self) -> u64 {
        self.split_seed.unwrap_or(self.seed)
    }

    pub fn synth_config(&self) -> SynthConfig {
        SynthConfig {
            keyword_pool_size: self.keyword_pool_size,
            noise_pool_size: self.noise_pool_size,
            signal_prob: self.signal_prob,
            doc_len: (self.doc_len_min, self.doc_len_max),
            locations: if self.geotag { default_locations() } else { Vec::new() },
            expert_accuracy: self.expert_accuracy,
            positive_docs: self.positive_docs,
        }
    }

    pub fn feature_config(&self) -> FeatureConfig {
        FeatureConfig {
            min_df: self.min_df,
            max_features: (self.max_features > 0).then_some(self.max_features),
            kind: None,
        }
    }

    pub fn train_config(&self, kind: ModelKind) -> TrainConfig {
        let base = TrainConfig {
            seed: self.seed,
            nb_alpha: self.nb_alpha,
            hidden_units: self.ffnn_hidden_units,
            ..TrainConfig::for_kind(kind)
        };
        match kind {
            ModelKind::NaiveBayes => base,
            ModelKind::Logistic => TrainConfig {
                learning_rate: self.logreg_learning_rate,
                l2_lambda: self.logreg_l2_lambda,
                epochs: self.logreg_epochs,
                ..base
            },
            ModelKind::Svm => TrainConfig { l2_lambda: self.svm_l2_lambda, epochs: self.svm_epochs, ..base },
            ModelKind::FeedForward => TrainConfig {
                learning_rate: self.ffnn_learning_rate,
                l2_lambda: self.ffnn_l2_lambda,
                epochs: self.ffnn_epochs,
                ..base
            },
        }
    }

    pub fn geo_mode(&self) -> GeoMode {
        match self.geo_mode {
            GeoChoice::Auto => GeoMode::Auto { cell_deg: self.grid_cell_deg },
            GeoChoice::Named => GeoMode::Named,
            GeoChoice::Grid => GeoMode::Grid { cell_deg: self.grid_cell_deg },
        }
    }
}
