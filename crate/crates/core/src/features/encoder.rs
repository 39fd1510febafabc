use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::external::{align_external_ids, load_external_embeddings, ExternalEmbeddingSet};
use super::matrix::{concat_features, FeatureMatrix};
use super::vocab::{encode_counts, encode_tfidf, fit_idf, fit_vocab, IdfTable, Vocabulary};
use super::word2vec::{encode_mean_embedding, train_word_embeddings, EmbeddingTable, Word2VecParams};
use crate::error::{Error, Result};
use crate::preprocess::TokenSequence;

/// One of the single encodings a grid encoder is built from.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaseEncoder {
    Counts,
    Tfidf,
    Word2Vec,
    External(PathBuf),
}

impl fmt::Display for BaseEncoder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseEncoder::Counts => f.write_str("counts"),
            BaseEncoder::Tfidf => f.write_str("tfidf"),
            BaseEncoder::Word2Vec => f.write_str("word2vec"),
            BaseEncoder::External(p) => write!(f, "external:{}", p.display()),
        }
    }
}

impl FromStr for BaseEncoder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "counts" => Ok(BaseEncoder::Counts),
            "tfidf" => Ok(BaseEncoder::Tfidf),
            "word2vec" => Ok(BaseEncoder::Word2Vec),
            _ => match s.strip_prefix("external:") {
                Some(path) if !path.trim().is_empty() => Ok(BaseEncoder::External(PathBuf::from(path.trim()))),
                _ => Err(Error::Config(format!("unknown encoder: {s}"))),
            },
        }
    }
}

/// A grid encoder: one base encoding or a `+`-joined concatenation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncoderSpec {
    parts: Vec<BaseEncoder>,
}

impl EncoderSpec {
    pub fn new(parts: Vec<BaseEncoder>) -> Self {
        EncoderSpec { parts }
    }

    pub fn parts(&self) -> &[BaseEncoder] {
        &self.parts
    }

    pub fn parts_mut(&mut self) -> &mut [BaseEncoder] {
        &mut self.parts
    }
}

impl fmt::Display for EncoderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.parts.iter().map(ToString::to_string).collect();
        f.write_str(&names.join("+"))
    }
}

impl FromStr for EncoderSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().is_empty() {
            return Err(Error::Config("unknown encoder: (empty)".into()));
        }
        let parts = s.split('+').map(str::parse).collect::<Result<Vec<_>>>()?;
        Ok(EncoderSpec { parts })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EncoderSettings {
    pub min_df: usize,
    pub max_features: Option<usize>,
    pub word2vec: Word2VecParams,
}

impl Default for EncoderSettings {
    fn default() -> Self {
        EncoderSettings {
            min_df: 1,
            max_features: None,
            word2vec: Word2VecParams::default(),
        }
    }
}

/// Fitted state of a base encoder. Immutable once fitted.
#[derive(Debug, Clone)]
pub enum FittedEncoder {
    Counts(Vocabulary),
    Tfidf(Vocabulary, IdfTable),
    Word2Vec(EmbeddingTable),
    External(ExternalEmbeddingSet),
}

/// Fit on training sequences only. External encoders just load their file.
pub fn fit_encoder(base: &BaseEncoder, train: &[TokenSequence], settings: &EncoderSettings) -> Result<FittedEncoder> {
    Ok(match base {
        BaseEncoder::Counts => FittedEncoder::Counts(fit_vocab(train, settings.min_df, settings.max_features)?),
        BaseEncoder::Tfidf => {
            let vocab = fit_vocab(train, settings.min_df, settings.max_features)?;
            let idf = fit_idf(train, &vocab);
            FittedEncoder::Tfidf(vocab, idf)
        }
        BaseEncoder::Word2Vec => FittedEncoder::Word2Vec(train_word_embeddings(train, &settings.word2vec)?),
        BaseEncoder::External(path) => FittedEncoder::External(load_external_embeddings(path)?),
    })
}

impl FittedEncoder {
    pub fn name(&self) -> &'static str {
        match self {
            FittedEncoder::Counts(_) => "counts",
            FittedEncoder::Tfidf(..) => "tfidf",
            FittedEncoder::Word2Vec(_) => "word2vec",
            FittedEncoder::External(_) => "external",
        }
    }

    /// Terms the encoder learned from training text (empty for external sets).
    pub fn vocabulary_terms(&self) -> Vec<&str> {
        match self {
            FittedEncoder::Counts(v) | FittedEncoder::Tfidf(v, _) => v.terms().iter().map(String::as_str).collect(),
            FittedEncoder::Word2Vec(t) => t.terms().iter().map(String::as_str).collect(),
            FittedEncoder::External(_) => Vec::new(),
        }
    }

    pub fn width(&self) -> usize {
        match self {
            FittedEncoder::Counts(v) | FittedEncoder::Tfidf(v, _) => v.len(),
            FittedEncoder::Word2Vec(t) => t.dim(),
            FittedEncoder::External(s) => s.dim(),
        }
    }

    pub fn transform(&self, docs: &[TokenSequence], encoding_name: &str) -> Result<FeatureMatrix> {
        let ids: Vec<String> = docs.iter().map(|d| d.doc_id.clone()).collect();
        match self {
            FittedEncoder::Counts(vocab) => {
                let rows = docs.iter().map(|d| encode_counts(d, vocab)).collect();
                FeatureMatrix::sparse(ids, vocab.len(), rows, encoding_name)
            }
            FittedEncoder::Tfidf(vocab, idf) => {
                let rows = docs.iter().map(|d| encode_tfidf(d, vocab, idf)).collect();
                FeatureMatrix::sparse(ids, vocab.len(), rows, encoding_name)
            }
            FittedEncoder::Word2Vec(table) => {
                let rows = docs.iter().map(|d| encode_mean_embedding(d, table)).collect();
                FeatureMatrix::dense(ids, table.dim(), rows, encoding_name)
            }
            FittedEncoder::External(set) => align_external_ids(set, &ids, encoding_name),
        }
    }
}

/// Encode `docs` with every part of `spec`, concatenating in spec order.
/// `lookup` returns the fitted state for each base encoder.
pub fn transform_spec<'a>(
    spec: &EncoderSpec,
    docs: &[TokenSequence],
    mut lookup: impl FnMut(&BaseEncoder) -> Option<&'a FittedEncoder>,
) -> Result<FeatureMatrix> {
    let blocks = spec
        .parts()
        .iter()
        .map(|part| {
            let fitted = lookup(part).ok_or_else(|| Error::Config(format!("encoder {part} was not fitted")))?;
            fitted.transform(docs, &part.to_string())
        })
        .collect::<Result<Vec<_>>>()?;
    concat_features(&blocks)
}
