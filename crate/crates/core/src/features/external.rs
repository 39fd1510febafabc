//! Reader for precomputed document embeddings in the JSONL interchange
//! format:
//!
//! ```text
//! {"meta": {"model": "sentence-encoder", "pooling": "mean", "dim": 768}}
//! {"id": "row-1", "dim": 768, "values": [0.12, -0.03, ...]}
//! ```
//!
//! The `meta` header is optional; when present its `dim` must match every row.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::matrix::FeatureMatrix;
use crate::corpus::LabeledCorpus;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingMeta {
    pub model: String,
    pub pooling: String,
    pub dim: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HeaderLine {
    meta: EmbeddingMeta,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordLine {
    id: String,
    dim: usize,
    values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExternalEmbeddingSet {
    dim: usize,
    meta: Option<EmbeddingMeta>,
    ids: Vec<String>,
    vectors: HashMap<String, Vec<f64>>,
}

impl ExternalEmbeddingSet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn meta(&self) -> Option<&EmbeddingMeta> {
        self.meta.as_ref()
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Ids in file order.
    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn get(&self, id: &str) -> Option<&[f64]> {
        self.vectors.get(id).map(Vec::as_slice)
    }
}

pub fn load_external_embeddings(path: impl AsRef<Path>) -> Result<ExternalEmbeddingSet> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_external_embeddings(BufReader::new(file), path)
}

fn parse_external_embeddings<R: BufRead>(reader: R, path: &Path) -> Result<ExternalEmbeddingSet> {
    let mut meta: Option<EmbeddingMeta> = None;
    let mut dim: Option<usize> = None;
    let mut ids = Vec::new();
    let mut vectors = HashMap::new();
    let mut seen_content = false;

    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |reason: String| Error::EmbeddingFormat { line: line_no, reason };
        let value: serde_json::Value = serde_json::from_str(&line).map_err(|e| bad(format!("invalid JSON: {e}")))?;

        if value.get("meta").is_some() {
            if seen_content {
                return Err(bad("meta header must be the first line".into()));
            }
            let header: HeaderLine = serde_json::from_value(value).map_err(|e| bad(format!("invalid header: {e}")))?;
            dim = Some(header.meta.dim);
            meta = Some(header.meta);
            seen_content = true;
            continue;
        }
        seen_content = true;

        let record: RecordLine = serde_json::from_value(value).map_err(|e| bad(format!("invalid record: {e}")))?;
        if record.values.len() != record.dim {
            return Err(bad(format!(
                "declared dim {} but {} values",
                record.dim,
                record.values.len()
            )));
        }
        match dim {
            Some(d) if d != record.dim => {
                return Err(bad(format!("dimension {} differs from {d}", record.dim)));
            }
            None => dim = Some(record.dim),
            _ => {}
        }
        if record.values.iter().any(|v| !v.is_finite()) {
            return Err(bad(format!("non-finite value in vector for {}", record.id)));
        }
        if vectors.contains_key(&record.id) {
            return Err(bad(format!("duplicate id {}", record.id)));
        }
        ids.push(record.id.clone());
        vectors.insert(record.id, record.values);
    }

    Ok(ExternalEmbeddingSet {
        dim: dim.unwrap_or(0),
        meta,
        ids,
        vectors,
    })
}

/// Rows for the given ids, in that order. Every id must be present; extra
/// ids in the set are ignored.
pub fn align_external_ids(set: &ExternalEmbeddingSet, ids: &[String], encoding_name: &str) -> Result<FeatureMatrix> {
    let missing: Vec<String> = ids.iter().filter(|id| set.get(id).is_none()).cloned().collect();
    if !missing.is_empty() {
        return Err(Error::MissingEmbeddings(missing));
    }
    let rows = ids.iter().map(|id| set.get(id).unwrap().to_vec()).collect();
    FeatureMatrix::dense(ids.to_vec(), set.dim(), rows, encoding_name)
}

pub fn align_external(set: &ExternalEmbeddingSet, corpus: &LabeledCorpus) -> Result<FeatureMatrix> {
    let ids: Vec<String> = corpus.ids().map(str::to_string).collect();
    align_external_ids(set, &ids, "external")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Document, SentimentLabel};

    fn parse(text: &str) -> Result<ExternalEmbeddingSet> {
        parse_external_embeddings(text.as_bytes(), Path::new("mem"))
    }

    #[test]
    fn reads_header_and_rows() {
        let set = parse(concat!(
            "{\"meta\": {\"model\": \"m\", \"pooling\": \"mean\", \"dim\": 4}}\n",
            "{\"id\": \"a\", \"dim\": 4, \"values\": [1, 2, 3, 4]}\n",
            "{\"id\": \"b\", \"dim\": 4, \"values\": [0.5, 0, -1, 2e-3]}\n",
        ))
        .unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.dim(), 4);
        assert_eq!(set.meta().unwrap().pooling, "mean");
        assert_eq!(set.get("b").unwrap(), &[0.5, 0.0, -1.0, 0.002]);
    }

    #[test]
    fn dimension_mismatch_names_the_line() {
        let err = parse(concat!(
            "{\"id\": \"a\", \"dim\": 4, \"values\": [1, 2, 3, 4]}\n",
            "{\"id\": \"b\", \"dim\": 3, \"values\": [1, 2, 3]}\n",
        ))
        .unwrap_err();
        assert!(matches!(err, Error::EmbeddingFormat { line: 2, .. }), "{err}");

        let header = parse(concat!(
            "{\"meta\": {\"model\": \"m\", \"pooling\": \"mean\", \"dim\": 3}}\n",
            "{\"id\": \"a\", \"dim\": 4, \"values\": [1, 2, 3, 4]}\n",
        ));
        assert!(matches!(header, Err(Error::EmbeddingFormat { line: 2, .. })));

        let short = parse("{\"id\": \"a\", \"dim\": 4, \"values\": [1, 2]}\n");
        assert!(matches!(short, Err(Error::EmbeddingFormat { line: 1, .. })));
    }

    #[test]
    fn nan_and_duplicates_are_rejected() {
        let nan = parse("{\"id\": \"a\", \"dim\": 2, \"values\": [NaN, 1]}\n");
        assert!(matches!(nan, Err(Error::EmbeddingFormat { line: 1, .. })));
        let overflow = parse("{\"id\": \"a\", \"dim\": 2, \"values\": [1e999, 1]}\n");
        assert!(matches!(overflow, Err(Error::EmbeddingFormat { line: 1, .. })));
        let dup = parse(concat!(
            "{\"id\": \"a\", \"dim\": 1, \"values\": [1]}\n",
            "{\"id\": \"a\", \"dim\": 1, \"values\": [2]}\n",
        ));
        assert!(matches!(dup, Err(Error::EmbeddingFormat { line: 2, .. })));
    }

    #[test]
    fn alignment_follows_corpus_order() {
        let set = parse(concat!(
            "{\"id\": \"b\", \"dim\": 2, \"values\": [3, 4]}\n",
            "{\"id\": \"a\", \"dim\": 2, \"values\": [1, 2]}\n",
            "{\"id\": \"extra\", \"dim\": 2, \"values\": [9, 9]}\n",
        ))
        .unwrap();
        let corpus = LabeledCorpus::new(
            vec![
                Document::new("a", "x", SentimentLabel::Positive),
                Document::new("b", "y", SentimentLabel::Negative),
            ],
            "t",
        )
        .unwrap();
        let m = align_external(&set, &corpus).unwrap();
        assert_eq!(m.to_dense(), vec![vec![1.0, 2.0], vec![3.0, 4.0]]);

        let bigger = LabeledCorpus::new(
            vec![
                Document::new("a", "x", SentimentLabel::Positive),
                Document::new("c", "y", SentimentLabel::Negative),
                Document::new("d", "z", SentimentLabel::Neutral),
            ],
            "t",
        )
        .unwrap();
        match align_external(&set, &bigger) {
            Err(Error::MissingEmbeddings(ids)) => assert_eq!(ids, vec!["c", "d"]),
            other => panic!("unexpected {other:?}"),
        }
    }
}
