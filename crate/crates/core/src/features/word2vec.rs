//! Skip-gram word embeddings with negative sampling, trained single-threaded
//! on the experiment corpus.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preprocess::TokenSequence;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Word2VecParams {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    /// Starting learning rate, decayed linearly to `1e-4 * learning_rate`.
    pub learning_rate: f64,
    pub min_count: usize,
    /// Set per run by the experiment runner.
    #[serde(skip)]
    pub seed: u64,
}

impl Default for Word2VecParams {
    fn default() -> Self {
        Word2VecParams {
            dim: 100,
            window: 5,
            negatives: 5,
            epochs: 5,
            learning_rate: 0.025,
            min_count: 1,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    terms: Vec<String>,
    index: HashMap<String, usize>,
    vectors: Vec<f64>,
}

impl EmbeddingTable {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn vector(&self, term: &str) -> Option<&[f64]> {
        self.index
            .get(term)
            .map(|&i| &self.vectors[i * self.dim..(i + 1) * self.dim])
    }

    pub fn cosine(&self, a: &str, b: &str) -> Option<f64> {
        let (u, v) = (self.vector(a)?, self.vector(b)?);
        let dot: f64 = u.iter().zip(v).map(|(x, y)| x * y).sum();
        let nu = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        Some(if nu == 0.0 || nv == 0.0 { 0.0 } else { dot / (nu * nv) })
    }

    /// Build a table from explicit vectors (used for fixtures and tests).
    pub fn from_vectors(dim: usize, entries: Vec<(String, Vec<f64>)>) -> Result<Self> {
        let mut sorted: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for (term, v) in entries {
            if v.len() != dim {
                return Err(Error::WidthMismatch {
                    expected: dim,
                    actual: v.len(),
                });
            }
            sorted.insert(term, v);
        }
        let terms: Vec<String> = sorted.keys().cloned().collect();
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        let vectors = sorted.into_values().flatten().collect();
        Ok(EmbeddingTable {
            dim,
            terms,
            index,
            vectors,
        })
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Cumulative unigram^0.75 weights for negative sampling.
struct NoiseDistribution {
    cumulative: Vec<f64>,
}

impl NoiseDistribution {
    fn new(counts: &[usize]) -> Self {
        let mut acc = 0.0;
        let cumulative = counts
            .iter()
            .map(|&c| {
                acc += (c as f64).powf(0.75);
                acc
            })
            .collect();
        NoiseDistribution { cumulative }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().expect("non-empty vocabulary");
        let x = rng.gen::<f64>() * total;
        self.cumulative
            .partition_point(|&c| c <= x)
            .min(self.cumulative.len() - 1)
    }
}

pub fn train_word_embeddings(corpus: &[TokenSequence], params: &Word2VecParams) -> Result<EmbeddingTable> {
    if params.dim == 0 || params.epochs == 0 || params.learning_rate <= 0.0 || params.min_count == 0 {
        return Err(Error::InvalidParameter {
            name: "word2vec",
            reason: "dim, epochs, learning_rate and min_count must be positive".into(),
        });
    }
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for seq in corpus {
        for t in &seq.tokens {
            *counts.entry(t.as_str()).or_default() += 1;
        }
    }
    counts.retain(|_, c| *c >= params.min_count);
    if counts.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let terms: Vec<String> = counts.keys().map(|t| t.to_string()).collect();
    let index: HashMap<String, usize> = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    let freq: Vec<usize> = counts.values().copied().collect();
    let sentences: Vec<Vec<usize>> = corpus
        .iter()
        .map(|s| s.tokens.iter().filter_map(|t| index.get(t).copied()).collect())
        .collect();

    let dim = params.dim;
    let vocab_size = terms.len();
    let mut rng = seed::rng(params.seed);
    let mut input: Vec<f64> = (0..vocab_size * dim)
        .map(|_| (rng.gen::<f64>() - 0.5) / dim as f64)
        .collect();
    let mut output = vec![0.0; vocab_size * dim];
    let noise = NoiseDistribution::new(&freq);

    let words_per_epoch: usize = sentences.iter().map(Vec::len).sum();
    let total_words = (words_per_epoch * params.epochs) as f64;
    let min_lr = params.learning_rate * 1e-4;
    let mut processed = 0usize;
    let mut grad = vec![0.0; dim];

    for _ in 0..params.epochs {
        for sentence in &sentences {
            for (pos, &center) in sentence.iter().enumerate() {
                let lr = (params.learning_rate * (1.0 - processed as f64 / total_words)).max(min_lr);
                processed += 1;
                let lo = pos.saturating_sub(params.window);
                let hi = (pos + params.window).min(sentence.len() - 1);
                for (ctx_pos, &context) in sentence.iter().enumerate().take(hi + 1).skip(lo) {
                    if ctx_pos == pos {
                        continue;
                    }
                    grad.iter_mut().for_each(|g| *g = 0.0);
                    let center_vec = center * dim..(center + 1) * dim;
                    for k in 0..=params.negatives {
                        let (target, label) = if k == 0 {
                            (context, 1.0)
                        } else {
                            let t = noise.sample(&mut rng);
                            if t == context {
                                continue;
                            }
                            (t, 0.0)
                        };
                        let out_vec = target * dim..(target + 1) * dim;
                        let score: f64 = input[center_vec.clone()]
                            .iter()
                            .zip(&output[out_vec.clone()])
                            .map(|(a, b)| a * b)
                            .sum();
                        let g = (label - sigmoid(score)) * lr;
                        for ((acc, o), i) in grad
                            .iter_mut()
                            .zip(&mut output[out_vec])
                            .zip(&input[center_vec.clone()])
                        {
                            *acc += g * *o;
                            *o += g * i;
                        }
                    }
                    for (i, g) in input[center_vec].iter_mut().zip(&grad) {
                        *i += g;
                    }
                }
            }
        }
    }

    Ok(EmbeddingTable {
        dim,
        terms,
        index,
        vectors: input,
    })
}

/// Mean of in-vocabulary token vectors; zero vector when none are known.
pub fn encode_mean_embedding(tokens: &TokenSequence, table: &EmbeddingTable) -> Vec<f64> {
    let mut sum = vec![0.0; table.dim()];
    let mut n = 0usize;
    for v in tokens.tokens.iter().filter_map(|t| table.vector(t)) {
        for (s, x) in sum.iter_mut().zip(v) {
            *s += x;
        }
        n += 1;
    }
    if n > 0 {
        let inv = n as f64;
        sum.iter_mut().for_each(|s| *s /= inv);
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(tokens: &[&str]) -> TokenSequence {
        TokenSequence {
            doc_id: "d".into(),
            tokens: tokens.iter().map(|t| t.to_string()).collect(),
        }
    }

    fn small_params() -> Word2VecParams {
        Word2VecParams {
            dim: 16,
            epochs: 3,
            ..Word2VecParams::default()
        }
    }

    #[test]
    fn vectors_have_requested_dimension() {
        let corpus = vec![seq(&["ice", "melts", "fast"]), seq(&["sea", "rises"])];
        let table = train_word_embeddings(&corpus, &small_params()).unwrap();
        assert_eq!(table.len(), 5);
        for t in table.terms() {
            assert_eq!(table.vector(t).unwrap().len(), 16);
        }
    }

    #[test]
    fn training_is_deterministic() {
        let corpus = vec![seq(&["ice", "melts", "fast"]), seq(&["sea", "rises", "fast"])];
        let a = train_word_embeddings(&corpus, &small_params()).unwrap();
        let b = train_word_embeddings(&corpus, &small_params()).unwrap();
        assert_eq!(a, b);
        let c = train_word_embeddings(
            &corpus,
            &Word2VecParams {
                seed: 7,
                ..small_params()
            },
        )
        .unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn empty_corpus_is_rejected() {
        assert!(matches!(
            train_word_embeddings(&[seq(&[])], &small_params()),
            Err(Error::EmptyCorpus)
        ));
    }

    #[test]
    fn mean_pooling() {
        let table =
            EmbeddingTable::from_vectors(2, vec![("u".into(), vec![1.0, 2.0]), ("v".into(), vec![3.0, -4.0])]).unwrap();
        assert_eq!(encode_mean_embedding(&seq(&["u"]), &table), vec![1.0, 2.0]);
        assert_eq!(encode_mean_embedding(&seq(&[]), &table), vec![0.0, 0.0]);
        assert_eq!(encode_mean_embedding(&seq(&["zz"]), &table), vec![0.0, 0.0]);
        assert_eq!(encode_mean_embedding(&seq(&["u", "v"]), &table), vec![2.0, -1.0]);
        assert_eq!(encode_mean_embedding(&seq(&["v", "v", "v"]), &table), vec![3.0, -4.0]);
    }
}
