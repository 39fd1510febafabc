//! Tweet normalization, tokenization, stopword removal and stemming.

mod porter;

use std::collections::HashSet;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpus::Document;

pub use porter::stem_word;

/// Bundled English stoplist, one word per line.
pub const STOPWORDS_EN: &str = include_str!("../../../../data/stopwords_en.txt");

pub fn default_stoplist() -> HashSet<String> {
    parse_stoplist(STOPWORDS_EN)
}

pub fn parse_stoplist(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreprocessConfig {
    pub remove_urls: bool,
    /// When on, `@user` / `#tag` keep their word and lose the sigil. When
    /// off, mentions and hashtags are dropped whole.
    pub strip_mention_hashtag_sigils: bool,
    pub remove_stopwords: bool,
    pub apply_stemming: bool,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            remove_urls: true,
            strip_mention_hashtag_sigils: true,
            remove_stopwords: true,
            apply_stemming: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenSequence {
    pub doc_id: String,
    pub tokens: Vec<String>,
}

fn url_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)(?:https?://|www\.)\S*").expect("valid url regex"))
}

fn sigil_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(^|\s)[@#]+").expect("valid sigil regex"))
}

fn tagged_word_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(^|\s)[@#]\S*").expect("valid tag regex"))
}

/// Apply, in order: URL removal, sigil handling, lowercasing, replacement of
/// every character outside `[a-z ]` with a space, whitespace collapse.
pub fn normalize(text: &str, config: &PreprocessConfig) -> String {
    let mut s = if config.remove_urls {
        url_pattern().replace_all(text, " ").into_owned()
    } else {
        text.to_string()
    };
    s = if config.strip_mention_hashtag_sigils {
        sigil_pattern().replace_all(&s, "$1").into_owned()
    } else {
        tagged_word_pattern().replace_all(&s, "$1").into_owned()
    };
    let lowered = s.to_lowercase();
    let cleaned: String = lowered
        .chars()
        .map(|c| if c.is_ascii_lowercase() { c } else { ' ' })
        .collect();
    cleaned.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn tokenize(text: &str) -> Vec<String> {
    text.split(' ').filter(|t| !t.is_empty()).map(str::to_string).collect()
}

pub fn remove_stopwords(tokens: &[String], stoplist: &HashSet<String>) -> Vec<String> {
    tokens
        .iter()
        .filter(|t| !stoplist.contains(t.as_str()))
        .cloned()
        .collect()
}

pub fn stem(tokens: &[String]) -> Vec<String> {
    tokens.iter().map(|t| stem_word(t)).collect()
}

/// normalize → tokenize → stopwords (optional) → stemming (optional).
pub fn preprocess_pipeline(doc: &Document, config: &PreprocessConfig, stoplist: &HashSet<String>) -> TokenSequence {
    let mut tokens = tokenize(&normalize(&doc.text, config));
    if config.remove_stopwords {
        tokens = remove_stopwords(&tokens, stoplist);
    }
    if config.apply_stemming {
        tokens = stem(&tokens);
    }
    TokenSequence {
        doc_id: doc.id.clone(),
        tokens,
    }
}
