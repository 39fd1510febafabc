//! Labeled corpora: loading, class statistics, stratified splitting and
//! label-preserving augmentation.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// Sentiment class. Declaration order is the class order used for every
/// tie-break in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SentimentLabel {
    Positive,
    Negative,
    Neutral,
}

impl SentimentLabel {
    pub const ALL: [SentimentLabel; 3] = [
        SentimentLabel::Positive,
        SentimentLabel::Negative,
        SentimentLabel::Neutral,
    ];

    pub fn index(self) -> usize {
        match self {
            SentimentLabel::Positive => 0,
            SentimentLabel::Negative => 1,
            SentimentLabel::Neutral => 2,
        }
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SentimentLabel::Positive => "Positive",
            SentimentLabel::Negative => "Negative",
            SentimentLabel::Neutral => "Neutral",
        }
    }

    /// Class names in class order.
    pub fn class_names() -> Vec<String> {
        Self::ALL.iter().map(|l| l.as_str().to_string()).collect()
    }
}

impl fmt::Display for SentimentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SentimentLabel {
    type Err = Error;

    /// Trims surrounding whitespace and ignores case.
    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim();
        Self::ALL
            .iter()
            .copied()
            .find(|l| l.as_str().eq_ignore_ascii_case(wanted))
            .ok_or_else(|| Error::UnknownLabel(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub label: SentimentLabel,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>, label: SentimentLabel) -> Self {
        Document {
            id: id.into(),
            text: text.into(),
            label,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusFormat {
    Csv,
    Jsonl,
}

impl FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(CorpusFormat::Csv),
            "jsonl" => Ok(CorpusFormat::Jsonl),
            other => Err(Error::InvalidParameter {
                name: "format",
                reason: format!("unknown corpus format {other:?} (expected csv or jsonl)"),
            }),
        }
    }
}

/// Ordered collection of documents with unique ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledCorpus {
    documents: Vec<Document>,
    provenance: String,
}

impl LabeledCorpus {
    /// Validates id uniqueness and non-empty ids and texts. An empty document
    /// list is allowed here; [`load_corpus`] rejects empty files.
    pub fn new(documents: Vec<Document>, provenance: impl Into<String>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(documents.len());
        for (i, doc) in documents.iter().enumerate() {
            if doc.id.is_empty() {
                return Err(Error::MalformedRow {
                    row: i + 1,
                    reason: "empty id".into(),
                });
            }
            if doc.text.trim().is_empty() {
                return Err(Error::MalformedRow {
                    row: i + 1,
                    reason: format!("document {} has empty text", doc.id),
                });
            }
            if !seen.insert(doc.id.as_str()) {
                return Err(Error::DuplicateId(doc.id.clone()));
            }
        }
        Ok(LabeledCorpus {
            documents,
            provenance: provenance.into(),
        })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.documents.iter().map(|d| d.id.as_str())
    }

    pub fn labels(&self) -> Vec<SentimentLabel> {
        self.documents.iter().map(|d| d.label).collect()
    }
}

#[derive(Deserialize, Serialize)]
struct JsonlRecord {
    id: String,
    content: String,
    label: String,
}

pub fn load_corpus(path: impl AsRef<Path>, format: CorpusFormat) -> Result<LabeledCorpus> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let documents = match format {
        CorpusFormat::Csv => read_csv(BufReader::new(file))?,
        CorpusFormat::Jsonl => read_jsonl(BufReader::new(file), path)?,
    };
    if documents.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    LabeledCorpus::new(documents, format!("{}", path.display()))
}

fn read_csv<R: std::io::Read>(reader: R) -> Result<Vec<Document>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::MalformedRow {
            row: 0,
            reason: format!("unreadable header: {e}"),
        })?
        .clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::MalformedRow {
                row: 0,
                reason: format!("header is missing the `{name}` column"),
            })
    };
    let content_col = column("content")?;
    let label_col = column("label")?;

    let mut documents = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::MalformedRow {
            row,
            reason: e.to_string(),
        })?;
        let text = record.get(content_col).unwrap_or_default();
        if text.trim().is_empty() {
            return Err(Error::MalformedRow {
                row,
                reason: "empty content".into(),
            });
        }
        let label: SentimentLabel = record.get(label_col).unwrap_or_default().parse()?;
        documents.push(Document::new(format!("row-{row}"), text, label));
    }
    Ok(documents)
}

fn read_jsonl<R: BufRead>(reader: R, path: &Path) -> Result<Vec<Document>> {
    let mut documents = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let row = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: JsonlRecord = serde_json::from_str(&line).map_err(|e| Error::MalformedRow {
            row,
            reason: e.to_string(),
        })?;
        if record.content.trim().is_empty() {
            return Err(Error::MalformedRow {
                row,
                reason: "empty content".into(),
            });
        }
        let label: SentimentLabel = record.label.parse()?;
        documents.push(Document::new(record.id, record.content, label));
    }
    Ok(documents)
}

/// Write a corpus in either format. CSV output carries no id column, so a
/// CSV round trip only preserves ids of the `row-<n>` form.
pub fn write_corpus(corpus: &LabeledCorpus, path: impl AsRef<Path>, format: CorpusFormat) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    match format {
        CorpusFormat::Csv => {
            let mut wtr = csv::Writer::from_writer(&mut out);
            let io_err = |e: csv::Error| Error::io(path, std::io::Error::other(e));
            wtr.write_record(["content", "label"]).map_err(io_err)?;
            for doc in corpus.documents() {
                wtr.write_record([doc.text.as_str(), doc.label.as_str()])
                    .map_err(io_err)?;
            }
            wtr.flush().map_err(|e| Error::io(path, e))?;
        }
        CorpusFormat::Jsonl => {
            for doc in corpus.documents() {
                let record = JsonlRecord {
                    id: doc.id.clone(),
                    content: doc.text.clone(),
                    label: doc.label.as_str().to_string(),
                };
                serde_json::to_writer(&mut out, &record)?;
                out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
            }
        }
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Per-class document counts; every class is present, absent ones as 0.
pub fn class_distribution(corpus: &LabeledCorpus) -> BTreeMap<SentimentLabel, usize> {
    let mut counts: BTreeMap<SentimentLabel, usize> = SentimentLabel::ALL.iter().map(|&l| (l, 0)).collect();
    for doc in corpus.documents() {
        *counts.entry(doc.label).or_default() += 1;
    }
    counts
}

/// Number of test documents per class: floors of `n_c * f`, with the
/// remaining `round(N * f) - sum(floors)` seats handed out by largest
/// fractional remainder (ties in class order).
pub fn allocate_test_counts(class_counts: &[usize], test_fraction: f64) -> Vec<usize> {
    let total: usize = class_counts.iter().sum();
    let test_total = (total as f64 * test_fraction).round() as usize;
    let quotas: Vec<f64> = class_counts.iter().map(|&n| n as f64 * test_fraction).collect();
    let mut alloc: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = alloc.iter().sum();
    let mut seats = test_total.saturating_sub(assigned);

    let mut order: Vec<usize> = (0..class_counts.len()).collect();
    // stable sort keeps class order among equal remainders
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.total_cmp(&ra)
    });
    for &c in &order {
        if seats == 0 {
            break;
        }
        if alloc[c] < class_counts[c] {
            alloc[c] += 1;
            seats -= 1;
        }
    }
    alloc
}

/// Seeded stratified partition. Both halves keep the input document order.
pub fn stratified_split(
    corpus: &LabeledCorpus,
    test_fraction: f64,
    seed: u64,
) -> Result<(LabeledCorpus, LabeledCorpus)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidParameter {
            name: "test_fraction",
            reason: format!("{test_fraction} is outside (0, 1)"),
        });
    }
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); SentimentLabel::ALL.len()];
    for (i, doc) in corpus.documents().iter().enumerate() {
        by_class[doc.label.index()].push(i);
    }
    let counts: Vec<usize> = by_class.iter().map(Vec::len).collect();
    let alloc = allocate_test_counts(&counts, test_fraction);

    let mut rng = seed::rng(seed);
    let mut in_test = vec![false; corpus.len()];
    for (members, &take) in by_class.iter_mut().zip(&alloc) {
        members.shuffle(&mut rng);
        for &i in members.iter().take(take) {
            in_test[i] = true;
        }
    }

    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (doc, &is_test) in corpus.documents().iter().zip(&in_test) {
        if is_test {
            test.push(doc.clone());
        } else {
            train.push(doc.clone());
        }
    }
    let note = |part: &str| {
        format!(
            "{} [{part} split, fraction {test_fraction}, seed {seed}]",
            corpus.provenance()
        )
    };
    Ok((
        LabeledCorpus::new(train, note("train"))?,
        LabeledCorpus::new(test, note("test"))?,
    ))
}

const AUGMENT_DELETE_P: f64 = 0.1;

/// Random deletion (p = 0.1, at least one token survives) followed by one
/// random adjacent swap.
fn perturb_tokens<R: Rng>(tokens: &[&str], rng: &mut R) -> Vec<String> {
    let mut kept: Vec<String> = tokens
        .iter()
        .filter(|_| !rng.gen_bool(AUGMENT_DELETE_P))
        .map(|t| t.to_string())
        .collect();
    if kept.is_empty() {
        kept.push(tokens[rng.gen_range(0..tokens.len())].to_string());
    }
    if kept.len() >= 2 {
        let i = rng.gen_range(0..kept.len() - 1);
        kept.swap(i, i + 1);
    }
    kept
}

/// Grow every class below `target_per_class` with synthetic documents made
/// from uniformly drawn same-class originals. Originals are left untouched
/// and appear first, in their original order.
pub fn augment(corpus: &LabeledCorpus, target_per_class: usize, seed: u64) -> Result<LabeledCorpus> {
    let mut by_class: Vec<Vec<&Document>> = vec![Vec::new(); SentimentLabel::ALL.len()];
    for doc in corpus.documents() {
        by_class[doc.label.index()].push(doc);
    }

    let mut rng = seed::rng(seed);
    let mut documents = corpus.documents().to_vec();
    let mut next_suffix: HashMap<&str, usize> = HashMap::new();
    for (label, originals) in SentimentLabel::ALL.iter().zip(&by_class) {
        if originals.len() >= target_per_class {
            continue;
        }
        if originals.is_empty() {
            return Err(Error::EmptyClass(label.to_string()));
        }
        for _ in originals.len()..target_per_class {
            let origin = originals[rng.gen_range(0..originals.len())];
            let tokens: Vec<&str> = origin.text.split_whitespace().collect();
            let text = perturb_tokens(&tokens, &mut rng).join(" ");
            let k = next_suffix.entry(origin.id.as_str()).or_insert(0);
            *k += 1;
            documents.push(Document::new(format!("{}-aug-{k}", origin.id), text, *label));
        }
    }
    LabeledCorpus::new(
        documents,
        format!(
            "{} [augmented to {target_per_class}/class, seed {seed}]",
            corpus.provenance()
        ),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus_with(counts: &[(SentimentLabel, usize)]) -> LabeledCorpus {
        let mut docs = Vec::new();
        for &(label, n) in counts {
            for i in 0..n {
                docs.push(Document::new(
                    format!("{label}-{i}"),
                    format!("climate words for {label} number {i}"),
                    label,
                ));
            }
        }
        LabeledCorpus::new(docs, "test").unwrap()
    }

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn label_parsing_trims_and_folds_case() {
        assert_eq!("positive ".parse::<SentimentLabel>().unwrap(), SentimentLabel::Positive);
        assert_eq!(" NEUTRAL".parse::<SentimentLabel>().unwrap(), SentimentLabel::Neutral);
        assert!("mixed".parse::<SentimentLabel>().is_err());
        assert!("".parse::<SentimentLabel>().is_err());
    }

    #[test]
    fn loads_snapshot_csv() {
        let f = write_tmp(
            "content,label\n\
             \"Researchers use deep learning to simulate chlorophylla & phycocyanin #cyanobacteria\",Positive\n\
             \"Why is our @Conservatives government so evil? #climateChange https://t.co/cCGyylmYlf\",Negative\n\
             \"Sierra snowpack 205% of its historical average | Climate Change ... dlvr.it/ShpGVN #ClimateChange\",Neutral\n",
        );
        let corpus = load_corpus(f.path(), CorpusFormat::Csv).unwrap();
        assert_eq!(corpus.len(), 3);
        assert_eq!(
            corpus.labels(),
            vec![
                SentimentLabel::Positive,
                SentimentLabel::Negative,
                SentimentLabel::Neutral
            ]
        );
        assert_eq!(corpus.ids().collect::<Vec<_>>(), vec!["row-1", "row-2", "row-3"]);
    }

    #[test]
    fn header_only_file_is_an_empty_corpus() {
        let f = write_tmp("content,label\n");
        assert!(matches!(
            load_corpus(f.path(), CorpusFormat::Csv),
            Err(Error::EmptyCorpus)
        ));
        let g = write_tmp("");
        assert!(matches!(
            load_corpus(g.path(), CorpusFormat::Jsonl),
            Err(Error::EmptyCorpus)
        ));
    }

    #[test]
    fn jsonl_label_is_normalized() {
        let f = write_tmp(r#"{"id":"t1","content":"heat wave again","label":"positive "}"#);
        let corpus = load_corpus(f.path(), CorpusFormat::Jsonl).unwrap();
        assert_eq!(corpus.documents()[0].label, SentimentLabel::Positive);
    }

    #[test]
    fn load_errors_are_specific() {
        let missing = load_corpus("/nonexistent/corpus.csv", CorpusFormat::Csv);
        assert!(matches!(missing, Err(Error::Io { .. })));

        let bad_label = write_tmp("content,label\nsome text,Angry\n");
        assert!(matches!(
            load_corpus(bad_label.path(), CorpusFormat::Csv),
            Err(Error::UnknownLabel(l)) if l == "Angry"
        ));

        let ragged = write_tmp("content,label\nok,Positive\nfine,Negative,extra\n");
        assert!(matches!(
            load_corpus(ragged.path(), CorpusFormat::Csv),
            Err(Error::MalformedRow { row: 2, .. })
        ));

        let dup = write_tmp(
            "{\"id\":\"a\",\"content\":\"x\",\"label\":\"Positive\"}\n{\"id\":\"a\",\"content\":\"y\",\"label\":\"Neutral\"}\n",
        );
        assert!(matches!(
            load_corpus(dup.path(), CorpusFormat::Jsonl),
            Err(Error::DuplicateId(id)) if id == "a"
        ));

        let broken = write_tmp("{\"id\":\"a\",\"content\":\"x\",\"label\":\"Positive\"}\n{not json}\n");
        assert!(matches!(
            load_corpus(broken.path(), CorpusFormat::Jsonl),
            Err(Error::MalformedRow { row: 2, .. })
        ));
    }

    #[test]
    fn class_distribution_counts() {
        let c = corpus_with(&[
            (SentimentLabel::Positive, 2),
            (SentimentLabel::Negative, 2),
            (SentimentLabel::Neutral, 1),
        ]);
        let d = class_distribution(&c);
        assert_eq!(d[&SentimentLabel::Positive], 2);
        assert_eq!(d[&SentimentLabel::Negative], 2);
        assert_eq!(d[&SentimentLabel::Neutral], 1);

        let empty = LabeledCorpus::new(vec![], "empty").unwrap();
        assert!(class_distribution(&empty).values().all(|&n| n == 0));
        assert_eq!(class_distribution(&empty).len(), 3);
    }

    #[test]
    fn largest_remainder_allocation() {
        // floors 1/0/0, the single remaining seat goes to remainder .6
        assert_eq!(allocate_test_counts(&[6, 3, 1], 0.2), vec![1, 1, 0]);
        assert_eq!(allocate_test_counts(&[2, 2, 0], 0.5), vec![1, 1, 0]);
    }

    #[test]
    fn split_matches_allocation_and_is_deterministic() {
        let c = corpus_with(&[
            (SentimentLabel::Positive, 6),
            (SentimentLabel::Negative, 3),
            (SentimentLabel::Neutral, 1),
        ]);
        let (train, test) = stratified_split(&c, 0.2, 42).unwrap();
        assert_eq!(test.len(), 2);
        assert_eq!(train.len(), 8);
        let d = class_distribution(&test);
        assert_eq!(d[&SentimentLabel::Positive], 1);
        assert_eq!(d[&SentimentLabel::Negative], 1);
        assert_eq!(d[&SentimentLabel::Neutral], 0);

        let (_, again) = stratified_split(&c, 0.2, 42).unwrap();
        assert_eq!(test.ids().collect::<Vec<_>>(), again.ids().collect::<Vec<_>>());
    }

    #[test]
    fn split_rejects_bad_fraction() {
        let c = corpus_with(&[
            (SentimentLabel::Positive, 2),
            (SentimentLabel::Negative, 2),
            (SentimentLabel::Neutral, 2),
        ]);
        for f in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(
                stratified_split(&c, f, 1),
                Err(Error::InvalidParameter {
                    name: "test_fraction",
                    ..
                })
            ));
        }
    }

    #[test]
    fn split_of_two_class_corpus_halves_each_class() {
        let two = corpus_with(&[(SentimentLabel::Positive, 2), (SentimentLabel::Negative, 2)]);
        let (train, test) = stratified_split(&two, 0.5, 1).unwrap();
        for half in [&train, &test] {
            let dist: Vec<usize> = class_distribution(half).into_values().collect();
            assert_eq!(dist, [1, 1, 0]);
        }
    }

    #[test]
    fn augment_fills_minority_classes() {
        let c = corpus_with(&[
            (SentimentLabel::Positive, 3),
            (SentimentLabel::Negative, 1),
            (SentimentLabel::Neutral, 3),
        ]);
        let out = augment(&c, 3, 7).unwrap();
        let d = class_distribution(&out);
        assert_eq!(d[&SentimentLabel::Negative], 3);
        assert_eq!(out.len(), 9);
        let synthetic: Vec<_> = out.documents()[7..].iter().collect();
        assert!(synthetic.iter().all(|d| d.label == SentimentLabel::Negative));
        assert_eq!(synthetic[0].id, "Negative-0-aug-1");
        assert_eq!(synthetic[1].id, "Negative-0-aug-2");
        assert_eq!(&out.documents()[..7], c.documents());
    }

    #[test]
    fn augment_is_a_no_op_at_target() {
        let c = corpus_with(&[
            (SentimentLabel::Positive, 2),
            (SentimentLabel::Negative, 2),
            (SentimentLabel::Neutral, 2),
        ]);
        assert_eq!(augment(&c, 2, 1).unwrap().documents(), c.documents());
    }

    #[test]
    fn augment_cannot_grow_an_empty_class() {
        let c = corpus_with(&[(SentimentLabel::Positive, 3), (SentimentLabel::Negative, 1)]);
        assert!(matches!(augment(&c, 3, 7), Err(Error::EmptyClass(l)) if l == "Neutral"));
    }

    #[test]
    fn augment_reaches_published_dataset_size() {
        // 4410 originals grown to 5506: Positive already above target, the
        // other two classes grow to 1803 each.
        let c = corpus_with(&[
            (SentimentLabel::Positive, 1900),
            (SentimentLabel::Negative, 1500),
            (SentimentLabel::Neutral, 1010),
        ]);
        assert_eq!(c.len(), 4410);
        let out = augment(&c, 1803, 42).unwrap();
        assert_eq!(out.len(), 5506);
        assert_eq!(class_distribution(&out).values().sum::<usize>(), 5506);
        let original: HashMap<&str, SentimentLabel> = c.documents().iter().map(|d| (d.id.as_str(), d.label)).collect();
        let synthetic = &out.documents()[4410..];
        assert_eq!(synthetic.len(), 1096);
        for doc in synthetic {
            let origin = doc.id.split("-aug-").next().unwrap();
            assert_eq!(original[origin], doc.label);
        }
    }

    #[test]
    fn jsonl_and_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let c = LabeledCorpus::new(
            vec![
                Document::new("row-1", "a \"quoted\", text\nwith newline", SentimentLabel::Positive),
                Document::new("row-2", "plain", SentimentLabel::Neutral),
            ],
            "rt",
        )
        .unwrap();
        for format in [CorpusFormat::Csv, CorpusFormat::Jsonl] {
            let p = dir.path().join("c.out");
            write_corpus(&c, &p, format).unwrap();
            let back = load_corpus(&p, format).unwrap();
            assert_eq!(back.documents(), c.documents());
        }
    }
}
