//! Experiment runner: corpus → preprocessing → encoders → models → metrics
//! over an encoder × model grid.
//!
//! Every encoder is fit on the training split only. Randomness comes from the
//! config seed alone: the split uses it directly, everything else uses
//! [`derive_seed`] with a stable label (`augment`, `word2vec`, or the cell
//! name `<encoder>/<model>`), so serial and parallel runs agree.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{
    augment, class_distribution, load_corpus, stratified_split, write_corpus, CorpusFormat, LabeledCorpus,
    SentimentLabel,
};
use crate::error::{Error, Result};
use crate::eval::{confusion_matrix_indices, format_results, metrics, EvalReport};
use crate::features::{fit_encoder, transform_spec, BaseEncoder, EncoderSettings, EncoderSpec, FittedEncoder};
use crate::models::{train_model, ModelKind, TrainConfig, TrainedModel};
use crate::preprocess::{default_stoplist, parse_stoplist, preprocess_pipeline, PreprocessConfig, TokenSequence};
use crate::seed::derive_seed;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TEST_FRACTION: f64 = 0.2;
pub const DEFAULT_OUTPUT_DIR: &str = "results";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub corpus_path: PathBuf,
    pub corpus_format: CorpusFormat,
    pub preprocess: PreprocessConfig,
    pub stopwords_path: Option<PathBuf>,
    pub augment_target: Option<usize>,
    pub augment_after_split: bool,
    pub test_fraction: f64,
    pub seed: u64,
    #[serde(serialize_with = "serialize_encoders")]
    pub encoders: Vec<EncoderSpec>,
    pub models: Vec<ModelKind>,
    pub features: EncoderSettings,
    pub hyperparameters: TrainConfig,
    pub output_dir: PathBuf,
    pub parallel: bool,
}

fn serialize_encoders<S: serde::Serializer>(specs: &[EncoderSpec], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(specs.iter().map(ToString::to_string))
}

impl ExperimentConfig {
    /// Config with documented defaults for everything but the corpus and grid.
    pub fn new(corpus_path: impl Into<PathBuf>, encoders: Vec<EncoderSpec>, models: Vec<ModelKind>) -> Self {
        let corpus_path = corpus_path.into();
        ExperimentConfig {
            corpus_format: infer_format(&corpus_path),
            corpus_path,
            preprocess: PreprocessConfig::default(),
            stopwords_path: None,
            augment_target: None,
            augment_after_split: false,
            test_fraction: DEFAULT_TEST_FRACTION,
            seed: DEFAULT_SEED,
            encoders,
            models,
            features: EncoderSettings::default(),
            hyperparameters: TrainConfig::default(),
            output_dir: PathBuf::from(DEFAULT_OUTPUT_DIR),
            parallel: true,
        }
    }

    pub fn from_toml_str(text: &str, base_dir: &Path) -> std::result::Result<Self, ConfigErrors> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigErrors(vec![format!("invalid config: {e}")]))?;
        raw.validate(base_dir)
    }
}

fn infer_format(path: &Path) -> CorpusFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("jsonl") => CorpusFormat::Jsonl,
        _ => CorpusFormat::Csv,
    }
}

/// Every problem found in a config file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigErrors(pub Vec<String>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join("\n"))
    }
}

impl std::error::Error for ConfigErrors {}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    seed: Option<u64>,
    output_dir: Option<PathBuf>,
    parallel: Option<bool>,
    corpus: Option<RawCorpus>,
    #[serde(default)]
    preprocess: RawPreprocess,
    #[serde(default)]
    augment: RawAugment,
    #[serde(default)]
    split: RawSplit,
    #[serde(default)]
    encoders: Vec<String>,
    #[serde(default)]
    models: Vec<String>,
    #[serde(default)]
    features: EncoderSettings,
    #[serde(default)]
    hyperparameters: TrainConfig,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCorpus {
    path: PathBuf,
    format: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPreprocess {
    remove_urls: Option<bool>,
    strip_mention_hashtag_sigils: Option<bool>,
    remove_stopwords: Option<bool>,
    apply_stemming: Option<bool>,
    stopwords_path: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAugment {
    target_per_class: Option<usize>,
    after_split: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSplit {
    test_fraction: Option<f64>,
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

impl RawConfig {
    fn validate(self, base: &Path) -> std::result::Result<ExperimentConfig, ConfigErrors> {
        let mut errors = Vec::new();

        let (corpus_path, corpus_format) = match &self.corpus {
            None => {
                errors.push("corpus: missing [corpus] section with `path`".to_string());
                (PathBuf::new(), CorpusFormat::Csv)
            }
            Some(c) => {
                let path = resolve(base, &c.path);
                if !path.is_file() {
                    errors.push(format!("corpus.path: file not found: {}", path.display()));
                }
                let format = match &c.format {
                    None => infer_format(&path),
                    Some(f) => f.parse().unwrap_or_else(|e: Error| {
                        errors.push(format!("corpus.format: {e}"));
                        CorpusFormat::Csv
                    }),
                };
                (path, format)
            }
        };

        let defaults = PreprocessConfig::default();
        let preprocess = PreprocessConfig {
            remove_urls: self.preprocess.remove_urls.unwrap_or(defaults.remove_urls),
            strip_mention_hashtag_sigils: self
                .preprocess
                .strip_mention_hashtag_sigils
                .unwrap_or(defaults.strip_mention_hashtag_sigils),
            remove_stopwords: self.preprocess.remove_stopwords.unwrap_or(defaults.remove_stopwords),
            apply_stemming: self.preprocess.apply_stemming.unwrap_or(defaults.apply_stemming),
        };
        let stopwords_path = self.preprocess.stopwords_path.map(|p| resolve(base, &p));
        if let Some(p) = &stopwords_path {
            if !p.is_file() {
                errors.push(format!("preprocess.stopwords_path: file not found: {}", p.display()));
            }
        }

        if self.augment.target_per_class == Some(0) {
            errors.push("augment.target_per_class: must be at least 1".to_string());
        }

        let test_fraction = self.split.test_fraction.unwrap_or(DEFAULT_TEST_FRACTION);
        if !(test_fraction > 0.0 && test_fraction < 1.0) {
            errors.push(format!("split.test_fraction: {test_fraction} is outside (0, 1)"));
        }

        if self.encoders.is_empty() {
            errors.push("encoders: at least one encoder is required".to_string());
        }
        let mut encoders = Vec::new();
        for name in &self.encoders {
            match name.parse::<EncoderSpec>() {
                Ok(mut spec) => {
                    for part in spec.parts_mut() {
                        if let BaseEncoder::External(p) = part {
                            let full = resolve(base, p);
                            if !full.is_file() {
                                errors.push(format!(
                                    "encoders: external embedding file not found: {}",
                                    full.display()
                                ));
                            }
                            *p = full;
                        }
                    }
                    encoders.push(spec);
                }
                Err(Error::Config(msg)) => errors.push(msg),
                Err(e) => errors.push(e.to_string()),
            }
        }

        if self.models.is_empty() {
            errors.push("models: at least one model is required".to_string());
        }
        let mut models = Vec::new();
        for name in &self.models {
            match name.parse::<ModelKind>() {
                Ok(kind) if models.contains(&kind) => errors.push(format!("models: {kind} listed twice")),
                Ok(kind) => models.push(kind),
                Err(Error::Config(msg)) => errors.push(msg),
                Err(e) => errors.push(e.to_string()),
            }
        }

        if self.features.min_df == 0 {
            errors.push("features.min_df: must be at least 1".to_string());
        }
        if self.features.max_features == Some(0) {
            errors.push("features.max_features: must be at least 1".to_string());
        }
        let w2v = &self.features.word2vec;
        if w2v.dim == 0 || w2v.epochs == 0 || w2v.min_count == 0 || !positive(w2v.learning_rate) {
            errors.push("features.word2vec: dim, epochs, min_count and learning_rate must be positive".to_string());
        }
        errors.extend(check_hyperparameters(&self.hyperparameters));

        if !errors.is_empty() {
            return Err(ConfigErrors(errors));
        }
        Ok(ExperimentConfig {
            corpus_path,
            corpus_format,
            preprocess,
            stopwords_path,
            augment_target: self.augment.target_per_class,
            augment_after_split: self.augment.after_split.unwrap_or(false),
            test_fraction,
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            encoders,
            models,
            features: self.features,
            hyperparameters: self.hyperparameters,
            output_dir: resolve(
                base,
                &self.output_dir.unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)),
            ),
            parallel: self.parallel.unwrap_or(true),
        })
    }
}

// false for NaN as well
fn positive(v: f64) -> bool {
    v > 0.0
}

fn non_negative(v: f64) -> bool {
    v >= 0.0
}

fn check_hyperparameters(h: &TrainConfig) -> Vec<String> {
    let mut errors = Vec::new();
    let lr = &h.logistic;
    if !positive(lr.learning_rate) || !non_negative(lr.l2_lambda) || lr.epochs == 0 || !non_negative(lr.tolerance) {
        errors.push(
            "hyperparameters.logistic: learning_rate and epochs must be positive, l2_lambda and tolerance non-negative"
                .to_string(),
        );
    }
    let svm = &h.svm;
    if !positive(svm.learning_rate) || !non_negative(svm.l2_lambda) || svm.epochs == 0 {
        errors
            .push("hyperparameters.svm: learning_rate and epochs must be positive, l2_lambda non-negative".to_string());
    }
    if h.tree.min_samples_split < 2 {
        errors.push("hyperparameters.tree.min_samples_split: must be at least 2".to_string());
    }
    if h.forest.n_trees == 0 {
        errors.push("hyperparameters.forest.n_trees: must be at least 1".to_string());
    }
    if h.forest.min_samples_split < 2 {
        errors.push("hyperparameters.forest.min_samples_split: must be at least 2".to_string());
    }
    errors
}

/// Read and validate a TOML config; relative paths resolve against the
/// config file's directory. All problems are reported together.
pub fn validate_config(path: impl AsRef<Path>) -> std::result::Result<ExperimentConfig, ConfigErrors> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| ConfigErrors(vec![format!("cannot read config {}: {e}", path.display())]))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    ExperimentConfig::from_toml_str(&text, base)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub encoder: String,
    pub model: Option<String>,
    pub stage: String,
    pub message: String,
}

impl fmt::Display for CellFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.model {
            Some(m) => write!(f, "[{}/{m}] {} failed: {}", self.encoder, self.stage, self.message),
            None => write!(f, "[{}] {} failed: {}", self.encoder, self.stage, self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub millis: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub derived_seeds: BTreeMap<String, u64>,
    pub corpus_sha256: String,
    pub corpus_documents: usize,
    pub class_distribution: BTreeMap<String, usize>,
    pub train_documents: usize,
    pub test_documents: usize,
    pub timings: Vec<StageTiming>,
    pub cells_total: usize,
    pub cells_succeeded: usize,
    pub failures: Vec<CellFailure>,
    pub artifacts: BTreeMap<String, PathBuf>,
}

/// Corpus after augmentation policy and split.
#[derive(Debug, Clone)]
pub struct PreparedData {
    pub corpus: LabeledCorpus,
    pub train: LabeledCorpus,
    pub test: LabeledCorpus,
    pub corpus_sha256: String,
    pub derived_seeds: BTreeMap<String, u64>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Load, optionally augment (before or after the split) and split.
pub fn prepare_data(config: &ExperimentConfig) -> Result<PreparedData> {
    let bytes = fs::read(&config.corpus_path).map_err(|e| Error::io(&config.corpus_path, e))?;
    let corpus_sha256 = sha256_hex(&bytes);
    let loaded = load_corpus(&config.corpus_path, config.corpus_format)?;

    let mut derived_seeds = BTreeMap::new();
    derived_seeds.insert("split".to_string(), config.seed);
    let augment_seed = derive_seed(config.seed, "augment");

    let corpus = match config.augment_target {
        Some(target) if !config.augment_after_split => {
            derived_seeds.insert("augment".to_string(), augment_seed);
            augment(&loaded, target, augment_seed)?
        }
        _ => loaded,
    };
    let (mut train, test) = stratified_split(&corpus, config.test_fraction, config.seed)?;
    if let (Some(target), true) = (config.augment_target, config.augment_after_split) {
        derived_seeds.insert("augment".to_string(), augment_seed);
        train = augment(&train, target, augment_seed)?;
    }
    Ok(PreparedData {
        corpus,
        train,
        test,
        corpus_sha256,
        derived_seeds,
    })
}

fn load_stoplist(config: &ExperimentConfig) -> Result<HashSet<String>> {
    match &config.stopwords_path {
        Some(p) => Ok(parse_stoplist(&fs::read_to_string(p).map_err(|e| Error::io(p, e))?)),
        None => Ok(default_stoplist()),
    }
}

fn tokenize_corpus(
    corpus: &LabeledCorpus,
    config: &PreprocessConfig,
    stoplist: &HashSet<String>,
) -> Vec<TokenSequence> {
    corpus
        .documents()
        .par_iter()
        .map(|d| preprocess_pipeline(d, config, stoplist))
        .collect()
}

fn label_indices(corpus: &LabeledCorpus) -> Vec<usize> {
    corpus.documents().iter().map(|d| d.label.index()).collect()
}

/// Everything a run produced, before anything is written to disk.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub reports: Vec<EvalReport>,
    pub failures: Vec<CellFailure>,
    pub results_csv: String,
    pub tables: String,
    pub manifest: RunManifest,
    /// Fitted state per base encoder that fit successfully.
    pub fitted_encoders: Vec<(String, FittedEncoder)>,
    /// Trained model per successful cell, in grid order.
    pub models: Vec<(String, TrainedModel)>,
    pub train_ids: Vec<String>,
    pub test_ids: Vec<String>,
}

impl ExperimentOutcome {
    pub fn is_complete(&self) -> bool {
        self.failures.is_empty()
    }

    /// Write `results.csv`, `tables.txt`, one JSON file per model and
    /// `manifest.json` into `dir`. Returns the manifest as written.
    pub fn write_to(&mut self, dir: impl AsRef<Path>) -> Result<RunManifest> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let write = |name: &str, contents: &str| -> Result<PathBuf> {
            let path = dir.join(name);
            fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
            Ok(path)
        };
        let mut artifacts = BTreeMap::new();
        artifacts.insert("results".to_string(), write("results.csv", &self.results_csv)?);
        artifacts.insert("tables".to_string(), write("tables.txt", &self.tables)?);
        if !self.models.is_empty() {
            let model_dir = dir.join("models");
            fs::create_dir_all(&model_dir).map_err(|e| Error::io(&model_dir, e))?;
            for (cell, model) in &self.models {
                let path = model_dir.join(format!("{}.json", file_safe(cell)));
                model.save(&path)?;
                artifacts.insert(format!("model:{cell}"), path);
            }
        }
        let manifest_path = dir.join("manifest.json");
        artifacts.insert("manifest".to_string(), manifest_path.clone());
        self.manifest.artifacts = artifacts;
        let json = serde_json::to_string_pretty(&self.manifest)?;
        fs::write(&manifest_path, json + "\n").map_err(|e| Error::io(&manifest_path, e))?;
        Ok(self.manifest.clone())
    }
}

fn file_safe(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '+' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

struct Timer {
    timings: Vec<StageTiming>,
}

impl Timer {
    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings.push(StageTiming {
            stage: stage.to_string(),
            millis: start.elapsed().as_secs_f64() * 1e3,
        });
        out
    }
}

enum CellResult {
    Done(EvalReport, Box<TrainedModel>),
    Failed(CellFailure),
}

/// Run the full grid. Errors before the grid (loading, splitting,
/// preprocessing) abort the run; errors inside a cell are recorded and the
/// remaining cells still run.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let mut timer = Timer { timings: Vec::new() };
    let data = timer.time("load+split", || prepare_data(config))?;
    let stoplist = load_stoplist(config)?;
    let (train_tokens, test_tokens) = timer.time("preprocess", || {
        (
            tokenize_corpus(&data.train, &config.preprocess, &stoplist),
            tokenize_corpus(&data.test, &config.preprocess, &stoplist),
        )
    });
    let y_train = label_indices(&data.train);
    let y_test = label_indices(&data.test);
    let classes = SentimentLabel::class_names();

    let mut derived_seeds = data.derived_seeds.clone();
    let bases: BTreeSet<BaseEncoder> = config.encoders.iter().flat_map(|s| s.parts().iter().cloned()).collect();
    let mut settings = config.features.clone();
    settings.word2vec.seed = derive_seed(config.seed, "word2vec");
    if bases.contains(&BaseEncoder::Word2Vec) {
        derived_seeds.insert("word2vec".to_string(), settings.word2vec.seed);
    }

    let fitted: Vec<(BaseEncoder, Result<FittedEncoder>)> = timer.time("fit-encoders", || {
        let bases: Vec<BaseEncoder> = bases.into_iter().collect();
        let fit = |b: &BaseEncoder| (b.clone(), fit_encoder(b, &train_tokens, &settings));
        if config.parallel {
            bases.par_iter().map(fit).collect()
        } else {
            bases.iter().map(fit).collect()
        }
    });
    let lookup = |b: &BaseEncoder| {
        fitted
            .iter()
            .find(|(base, _)| base == b)
            .and_then(|(_, r)| r.as_ref().ok())
    };

    let mut failures = Vec::new();
    // (encoder name, train matrix, test matrix) for encoders whose parts all fit
    let mut encoded = Vec::new();
    timer.time("encode", || {
        for spec in &config.encoders {
            let name = spec.to_string();
            let broken: Vec<String> = spec
                .parts()
                .iter()
                .filter_map(|p| match fitted.iter().find(|(b, _)| b == p) {
                    Some((_, Err(e))) => Some(format!("{p}: {e}")),
                    _ => None,
                })
                .collect();
            if !broken.is_empty() {
                failures.push(CellFailure {
                    encoder: name,
                    model: None,
                    stage: "fit-encoder".into(),
                    message: broken.join("; "),
                });
                continue;
            }
            let train = transform_spec(spec, &train_tokens, lookup);
            let test = transform_spec(spec, &test_tokens, lookup);
            match (train, test) {
                (Ok(a), Ok(b)) => encoded.push((name, a, b)),
                (Err(e), _) | (_, Err(e)) => failures.push(CellFailure {
                    encoder: name,
                    model: None,
                    stage: "encode".into(),
                    message: e.to_string(),
                }),
            }
        }
    });

    let cells: Vec<(usize, ModelKind)> = (0..encoded.len())
        .flat_map(|e| config.models.iter().map(move |&m| (e, m)))
        .collect();
    for (e, m) in &cells {
        let cell = format!("{}/{}", encoded[*e].0, m);
        derived_seeds.insert(format!("cell:{cell}"), derive_seed(config.seed, &cell));
    }

    let run_cell = |&(e, kind): &(usize, ModelKind)| -> CellResult {
        let (name, x_train, x_test) = &encoded[e];
        let cell = format!("{name}/{kind}");
        let fail = |stage: &str, err: Error| {
            CellResult::Failed(CellFailure {
                encoder: name.clone(),
                model: Some(kind.to_string()),
                stage: stage.into(),
                message: err.to_string(),
            })
        };
        let seed = derive_seed(config.seed, &cell);
        let model = match train_model(kind, x_train, &y_train, &classes, &config.hyperparameters, seed) {
            Ok(m) => m,
            Err(err) => return fail("train", err),
        };
        let predicted = match model.predict(x_test) {
            Ok(p) => p,
            Err(err) => return fail("predict", err),
        };
        let report = confusion_matrix_indices(&y_test, &predicted, &classes).and_then(|cm| metrics(&cm));
        match report {
            Ok(r) => CellResult::Done(
                EvalReport {
                    encoder: name.clone(),
                    model: kind.to_string(),
                    ..r
                },
                Box::new(model),
            ),
            Err(err) => fail("evaluate", err),
        }
    };
    let results: Vec<CellResult> = timer.time("train+evaluate", || {
        if config.parallel {
            cells.par_iter().map(run_cell).collect()
        } else {
            cells.iter().map(run_cell).collect()
        }
    });

    let mut reports = Vec::new();
    let mut models = Vec::new();
    for result in results {
        match result {
            CellResult::Done(report, model) => {
                models.push((format!("{}/{}", report.encoder, report.model), *model));
                reports.push(report);
            }
            CellResult::Failed(f) => failures.push(f),
        }
    }
    let formatted = format_results(&reports);

    let fitted_encoders: Vec<(String, FittedEncoder)> = fitted
        .into_iter()
        .filter_map(|(b, r)| r.ok().map(|f| (b.to_string(), f)))
        .collect();

    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: serde_json::to_value(config)?,
        seed: config.seed,
        derived_seeds,
        corpus_sha256: data.corpus_sha256.clone(),
        corpus_documents: data.corpus.len(),
        class_distribution: class_distribution(&data.corpus)
            .into_iter()
            .map(|(l, n)| (l.to_string(), n))
            .collect(),
        train_documents: data.train.len(),
        test_documents: data.test.len(),
        timings: timer.timings,
        cells_total: config.encoders.len() * config.models.len(),
        cells_succeeded: reports.len(),
        failures: failures.clone(),
        artifacts: BTreeMap::new(),
    };

    Ok(ExperimentOutcome {
        reports,
        failures,
        results_csv: formatted.csv,
        tables: formatted.tables,
        manifest,
        fitted_encoders,
        models,
        train_ids: data.train.ids().map(str::to_string).collect(),
        test_ids: data.test.ids().map(str::to_string).collect(),
    })
}

/// Write the train and test halves (after the augmentation policy) as JSONL.
pub fn export_splits(config: &ExperimentConfig, dir: impl AsRef<Path>) -> Result<(PathBuf, PathBuf)> {
    let dir = dir.as_ref();
    let data = prepare_data(config)?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let train = dir.join("train.jsonl");
    let test = dir.join("test.jsonl");
    write_corpus(&data.train, &train, CorpusFormat::Jsonl)?;
    write_corpus(&data.test, &test, CorpusFormat::Jsonl)?;
    Ok((train, test))
}

/// Class counts and a histogram of preprocessed token counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusSummary {
    pub documents: usize,
    pub class_distribution: BTreeMap<String, usize>,
    /// `(label, count)` buckets of tokens per document.
    pub length_histogram: Vec<(String, usize)>,
    pub mean_tokens: f64,
}

const LENGTH_BUCKETS: [(usize, usize); 6] = [(0, 0), (1, 5), (6, 10), (11, 20), (21, 40), (41, usize::MAX)];

pub fn inspect_corpus(corpus: &LabeledCorpus, config: &PreprocessConfig, stoplist: &HashSet<String>) -> CorpusSummary {
    let lengths: Vec<usize> = tokenize_corpus(corpus, config, stoplist)
        .iter()
        .map(|s| s.tokens.len())
        .collect();
    let length_histogram = LENGTH_BUCKETS
        .iter()
        .map(|&(lo, hi)| {
            let label = match (lo, hi) {
                (0, 0) => "0".to_string(),
                (lo, usize::MAX) => format!("{lo}+"),
                (lo, hi) => format!("{lo}-{hi}"),
            };
            (label, lengths.iter().filter(|&&n| n >= lo && n <= hi).count())
        })
        .collect();
    CorpusSummary {
        documents: corpus.len(),
        class_distribution: class_distribution(corpus)
            .into_iter()
            .map(|(l, n)| (l.to_string(), n))
            .collect(),
        length_histogram,
        mean_tokens: if lengths.is_empty() {
            0.0
        } else {
            lengths.iter().sum::<usize>() as f64 / lengths.len() as f64
        },
    }
}

impl fmt::Display for CorpusSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "documents: {}", self.documents)?;
        writeln!(f, "classes:")?;
        for (label, n) in &self.class_distribution {
            writeln!(f, "  {label:<9} {n}")?;
        }
        writeln!(f, "tokens per document (mean {:.2}):", self.mean_tokens)?;
        for (bucket, n) in &self.length_histogram {
            writeln!(f, "  {bucket:>6} {n}")?;
        }
        Ok(())
    }
}
