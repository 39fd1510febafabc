//! Seeded synthetic sentiment corpus for desk-scale end-to-end runs.
//!
//! Each class owns a small cue vocabulary; documents mix cue words, a larger
//! shared vocabulary and tweet noise (stopwords, URLs, hashtags, mentions,
//! digits) so the full preprocessing path is exercised.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::corpus::{Document, LabeledCorpus, SentimentLabel};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub n_docs: usize,
    pub cue_words_per_class: usize,
    pub shared_words: usize,
    /// Probability that a content token is drawn from a cue vocabulary.
    pub cue_rate: f64,
    /// Probability that a cue token comes from another class's vocabulary.
    pub cue_confusion: f64,
    pub min_len: usize,
    pub max_len: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_docs: 600,
            cue_words_per_class: 25,
            shared_words: 150,
            cue_rate: 0.30,
            cue_confusion: 0.10,
            min_len: 8,
            max_len: 20,
            seed: 42,
        }
    }
}

const ONSETS: [&str; 16] = [
    "b", "c", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "sh",
];
const NUCLEI: [&str; 5] = ["a", "e", "i", "o", "u"];
const FILLERS: [&str; 12] = [
    "the", "is", "and", "of", "to", "a", "in", "for", "this", "on", "with", "our",
];

/// Distinct pronounceable pseudo-word for each index. Three syllables keep
/// the words long enough to avoid the stoplist.
fn pseudo_word(mut index: usize) -> String {
    let mut word = String::new();
    for _ in 0..3 {
        let syllable = index % (ONSETS.len() * NUCLEI.len());
        index /= ONSETS.len() * NUCLEI.len();
        word.push_str(ONSETS[syllable / NUCLEI.len()]);
        word.push_str(NUCLEI[syllable % NUCLEI.len()]);
    }
    word
}

/// Zipf-like pick: index `i` has weight `1 / (i + 1)`.
fn zipf_pick<'a, R: Rng>(words: &'a [String], rng: &mut R) -> &'a str {
    let total: f64 = (1..=words.len()).map(|i| 1.0 / i as f64).sum();
    let mut x = rng.gen::<f64>() * total;
    for (i, w) in words.iter().enumerate() {
        x -= 1.0 / (i + 1) as f64;
        if x <= 0.0 {
            return w;
        }
    }
    &words[words.len() - 1]
}

pub fn generate_synthetic_corpus(config: &SynthConfig) -> LabeledCorpus {
    let mut rng = seed::rng(config.seed);
    let k = SentimentLabel::ALL.len();
    let cues: Vec<Vec<String>> = (0..k)
        .map(|c| {
            (0..config.cue_words_per_class)
                .map(|i| pseudo_word(1000 + c * config.cue_words_per_class + i))
                .collect()
        })
        .collect();
    let shared: Vec<String> = (0..config.shared_words).map(|i| pseudo_word(5000 + i)).collect();

    let mut labels: Vec<SentimentLabel> = (0..config.n_docs).map(|i| SentimentLabel::ALL[i % k]).collect();
    labels.shuffle(&mut rng);

    let documents = labels
        .into_iter()
        .enumerate()
        .map(|(i, label)| {
            let len = rng.gen_range(config.min_len..=config.max_len);
            let mut tokens: Vec<String> = Vec::with_capacity(len + 4);
            for _ in 0..len {
                let roll: f64 = rng.gen();
                let token = if roll < config.cue_rate {
                    let class = if rng.gen_bool(config.cue_confusion) {
                        rng.gen_range(0..k)
                    } else {
                        label.index()
                    };
                    zipf_pick(&cues[class], &mut rng).to_string()
                } else if roll < config.cue_rate + 0.15 {
                    FILLERS[rng.gen_range(0..FILLERS.len())].to_string()
                } else {
                    zipf_pick(&shared, &mut rng).to_string()
                };
                tokens.push(token);
            }
            if rng.gen_bool(0.3) {
                let w = &tokens[rng.gen_range(0..tokens.len())];
                tokens.push(format!("#{}", capitalize(w)));
            }
            if rng.gen_bool(0.2) {
                tokens.insert(0, format!("@{}", shared[rng.gen_range(0..shared.len())]));
            }
            if rng.gen_bool(0.25) {
                tokens.push(format!("https://t.co/{}{}", pseudo_word(i), rng.gen_range(0..1000)));
            }
            if rng.gen_bool(0.2) {
                tokens.push(format!("{}%", rng.gen_range(1..300)));
            }
            Document::new(format!("syn-{:04}", i + 1), tokens.join(" "), label)
        })
        .collect();

    LabeledCorpus::new(documents, format!("synthetic corpus, seed {}", config.seed))
        .expect("generated ids are unique and texts non-empty")
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(first) => first.to_ascii_uppercase().to_string() + chars.as_str(),
        None => String::new(),
    }
}
