use std::collections::{BTreeMap, HashMap, HashSet};

use super::matrix::SparseRow;
use crate::error::{Error, Result};
use crate::preprocess::TokenSequence;

/// Fitted term index. Indices are dense and follow lexicographic term order,
/// so the same corpus yields the same vocabulary regardless of document order.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    terms: Vec<String>,
    document_frequency: Vec<usize>,
    corpus_size: usize,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    fn from_sorted(entries: Vec<(String, usize)>, corpus_size: usize) -> Self {
        let index = entries.iter().enumerate().map(|(i, (t, _))| (t.clone(), i)).collect();
        let (terms, document_frequency) = entries.into_iter().unzip();
        Vocabulary {
            terms,
            document_frequency,
            corpus_size,
            index,
        }
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

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn document_frequency(&self, term: &str) -> Option<usize> {
        self.index_of(term).map(|i| self.document_frequency[i])
    }

    pub fn corpus_size(&self) -> usize {
        self.corpus_size
    }

    pub fn contains(&self, term: &str) -> bool {
        self.index.contains_key(term)
    }
}

fn document_frequencies(corpus: &[TokenSequence]) -> BTreeMap<&str, usize> {
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for seq in corpus {
        let unique: HashSet<&str> = seq.tokens.iter().map(String::as_str).collect();
        for term in unique {
            *df.entry(term).or_default() += 1;
        }
    }
    df
}

/// Keep terms with `df >= min_df`; with `max_features`, keep the highest-df
/// terms (ties to the lexicographically smaller term) and reindex.
pub fn fit_vocab(corpus: &[TokenSequence], min_df: usize, max_features: Option<usize>) -> Result<Vocabulary> {
    if min_df == 0 {
        return Err(Error::InvalidParameter {
            name: "min_df",
            reason: "must be at least 1".into(),
        });
    }
    if corpus.iter().all(|s| s.tokens.is_empty()) {
        return Err(Error::EmptyVocabulary);
    }
    let df = document_frequencies(corpus);
    let mut kept: Vec<(String, usize)> = df
        .into_iter()
        .filter(|&(_, n)| n >= min_df)
        .map(|(t, n)| (t.to_string(), n))
        .collect();
    if let Some(limit) = max_features {
        if kept.len() > limit {
            kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            kept.truncate(limit);
            kept.sort_by(|a, b| a.0.cmp(&b.0));
        }
    }
    if kept.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    Ok(Vocabulary::from_sorted(kept, corpus.len()))
}

/// Raw in-vocabulary term counts; out-of-vocabulary tokens are ignored.
pub fn encode_counts(tokens: &TokenSequence, vocab: &Vocabulary) -> SparseRow {
    let pairs = tokens
        .tokens
        .iter()
        .filter_map(|t| vocab.index_of(t))
        .map(|i| (i, 1.0))
        .collect();
    SparseRow::from_pairs(pairs)
}

/// Smoothed inverse document frequency per vocabulary term:
/// `ln((1 + N) / (1 + df)) + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct IdfTable {
    weights: Vec<f64>,
}

impl IdfTable {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn get(&self, index: usize) -> f64 {
        self.weights[index]
    }
}

pub fn smoothed_idf(corpus_size: usize, df: usize) -> f64 {
    ((1.0 + corpus_size as f64) / (1.0 + df as f64)).ln() + 1.0
}

pub fn fit_idf(corpus: &[TokenSequence], vocab: &Vocabulary) -> IdfTable {
    let mut df = vec![0usize; vocab.len()];
    for seq in corpus {
        let unique: HashSet<usize> = seq.tokens.iter().filter_map(|t| vocab.index_of(t)).collect();
        for i in unique {
            df[i] += 1;
        }
    }
    let n = corpus.len();
    IdfTable {
        weights: df.into_iter().map(|d| smoothed_idf(n, d)).collect(),
    }
}

/// Count × idf, then L2-normalized. Rows with no in-vocabulary token stay zero.
pub fn encode_tfidf(tokens: &TokenSequence, vocab: &Vocabulary, idf: &IdfTable) -> SparseRow {
    let mut row = encode_counts(tokens, vocab);
    let weighted: Vec<(usize, f64)> = row.iter().map(|(i, c)| (i, c * idf.get(i))).collect();
    row = SparseRow::from_pairs(weighted);
    let norm = row.norm();
    if norm > 0.0 {
        row.scale(1.0 / norm);
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seqs(docs: &[&[&str]]) -> Vec<TokenSequence> {
        docs.iter()
            .enumerate()
            .map(|(i, d)| TokenSequence {
                doc_id: format!("d{i}"),
                tokens: d.iter().map(|t| t.to_string()).collect(),
            })
            .collect()
    }

    #[test]
    fn vocab_is_lexicographic_with_df() {
        let corpus = seqs(&[&["a", "b"], &["b", "c"]]);
        let v = fit_vocab(&corpus, 1, None).unwrap();
        assert_eq!(v.terms(), &["a", "b", "c"]);
        assert_eq!(v.document_frequency("a"), Some(1));
        assert_eq!(v.document_frequency("b"), Some(2));
        assert_eq!(v.document_frequency("c"), Some(1));

        let v2 = fit_vocab(&corpus, 2, None).unwrap();
        assert_eq!(v2.terms(), &["b"]);
        assert_eq!(v2.index_of("b"), Some(0));

        let v3 = fit_vocab(&corpus, 1, Some(2)).unwrap();
        assert_eq!(v3.terms(), &["a", "b"]);
    }

    #[test]
    fn vocab_errors() {
        assert!(matches!(fit_vocab(&seqs(&[&[]]), 1, None), Err(Error::EmptyVocabulary)));
        assert!(matches!(
            fit_vocab(&seqs(&[&["a"]]), 2, None),
            Err(Error::EmptyVocabulary)
        ));
        assert!(fit_vocab(&seqs(&[&["a"]]), 0, None).is_err());
    }

    #[test]
    fn counts_ignore_oov() {
        let v = fit_vocab(&seqs(&[&["a", "b"]]), 1, None).unwrap();
        let row = encode_counts(&seqs(&[&["b", "a", "b"]])[0], &v);
        assert_eq!(row.iter().collect::<Vec<_>>(), vec![(0, 1.0), (1, 2.0)]);
        assert_eq!(encode_counts(&seqs(&[&[]])[0], &v).nnz(), 0);
        assert_eq!(encode_counts(&seqs(&[&["z"]])[0], &v).nnz(), 0);
    }

    #[test]
    fn idf_values() {
        let corpus = seqs(&[&["climate", "change"], &["climate"]]);
        let v = fit_vocab(&corpus, 1, None).unwrap();
        let idf = fit_idf(&corpus, &v);
        let change = idf.get(v.index_of("change").unwrap());
        let climate = idf.get(v.index_of("climate").unwrap());
        assert_eq!(climate, 1.0);
        assert!((change - 1.405465).abs() < 1e-6);

        let everywhere = seqs(&[&["x", "y"], &["y", "x"]]);
        let v = fit_vocab(&everywhere, 1, None).unwrap();
        assert!(fit_idf(&everywhere, &v).weights().iter().all(|&w| w == 1.0));
    }

    #[test]
    fn tfidf_rows_are_unit_norm() {
        let corpus = seqs(&[&["climate", "change"], &["climate"]]);
        let v = fit_vocab(&corpus, 1, None).unwrap();
        let idf = fit_idf(&corpus, &v);
        let row = encode_tfidf(&corpus[0], &v, &idf);
        let change = row.get(v.index_of("change").unwrap());
        let climate = row.get(v.index_of("climate").unwrap());
        assert!((climate - 0.5797).abs() < 1e-4);
        assert!((change - 0.8148).abs() < 1e-4);
        assert!((row.norm() - 1.0).abs() < 1e-12);

        assert_eq!(encode_tfidf(&seqs(&[&[]])[0], &v, &idf).norm(), 0.0);
        let single = encode_tfidf(&seqs(&[&["change", "change", "change"]])[0], &v, &idf);
        assert_eq!(single.indices(), &[0]);
        assert!((single.values()[0] - 1.0).abs() < 1e-12);
    }
}
