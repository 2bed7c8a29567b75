//! Grounding text into graph concepts.
//!
//! Concepts are found by greedy longest match: at each token position the
//! longest n-gram (tokens joined with `_`) that names a graph concept wins
//! and the scan resumes after it. A single token that is a stopword is never
//! matched on its own.

mod tokenize;

use std::collections::{BTreeMap, HashSet};
use std::io::BufRead;
use std::path::Path;

pub use tokenize::{tokenize, TokenizedText};

use crate::error::{Error, Result};
use crate::graph::{ConceptId, KnowledgeGraph};

pub const DEFAULT_MAX_NGRAM: usize = 4;

const ENGLISH_STOPWORDS: &str = include_str!("../../data/stopwords_en.txt");

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Stopwords {
    words: HashSet<String>,
}

impl Stopwords {
    /// The built-in English list.
    pub fn english() -> Self {
        Self::parse(ENGLISH_STOPWORDS.lines())
    }

    pub fn none() -> Self {
        Self::default()
    }

    fn parse<'a>(lines: impl Iterator<Item = &'a str>) -> Self {
        let words = lines
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        Stopwords { words }
    }

    /// One token per line, UTF-8. Blank lines and `#` comments are ignored.
    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self> {
        let lines = reader.lines().collect::<Result<Vec<_>, _>>()?;
        Ok(Self::parse(lines.iter().map(String::as_str)))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_reader(std::io::BufReader::new(file))
    }

    pub fn contains(&self, token: &str) -> bool {
        self.words.contains(token)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// A matched concept occurrence: tokens `start..start + len`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mention {
    pub concept: ConceptId,
    pub start: usize,
    pub len: usize,
}

/// Concept occurrence counts over a source text of `source_len` tokens.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConceptMentionSet {
    pub mentions: BTreeMap<ConceptId, u32>,
    pub source_len: usize,
}

impl ConceptMentionSet {
    pub fn from_mentions(mentions: &[Mention], source_len: usize) -> Self {
        let mut counts = BTreeMap::new();
        for m in mentions {
            *counts.entry(m.concept).or_insert(0) += 1;
        }
        ConceptMentionSet {
            mentions: counts,
            source_len,
        }
    }

    pub fn count(&self, c: ConceptId) -> u32 {
        self.mentions.get(&c).copied().unwrap_or(0)
    }

    pub fn contains(&self, c: ConceptId) -> bool {
        self.mentions.contains_key(&c)
    }

    pub fn total(&self) -> u64 {
        self.mentions.values().map(|&n| u64::from(n)).sum()
    }

    pub fn len(&self) -> usize {
        self.mentions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mentions.is_empty()
    }
}

/// `count(c) / |C|`, zero for concepts the context never mentions.
pub fn term_frequency(c: ConceptId, m: &ConceptMentionSet) -> Result<f64> {
    if m.source_len == 0 {
        return Err(Error::EmptyContext);
    }
    Ok(f64::from(m.count(c)) / m.source_len as f64)
}

/// Grounded context/query pair.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroundedPair {
    pub context_mentions: ConceptMentionSet,
    /// Distinct query concepts in first-occurrence order.
    pub query_concepts: Vec<ConceptId>,
}

#[derive(Debug, Clone)]
pub struct Grounder {
    stopwords: Stopwords,
    max_ngram: usize,
}

impl Default for Grounder {
    fn default() -> Self {
        Grounder {
            stopwords: Stopwords::english(),
            max_ngram: DEFAULT_MAX_NGRAM,
        }
    }
}

impl Grounder {
    pub fn new(stopwords: Stopwords, max_ngram: usize) -> Result<Self> {
        if max_ngram == 0 {
            return Err(Error::Config("max_ngram must be at least 1".into()));
        }
        Ok(Grounder { stopwords, max_ngram })
    }

    pub fn max_ngram(&self) -> usize {
        self.max_ngram
    }

    pub fn stopwords(&self) -> &Stopwords {
        &self.stopwords
    }

    /// Greedy left-to-right longest-match scan.
    pub fn mentions(&self, text: &TokenizedText, g: &KnowledgeGraph) -> Vec<Mention> {
        let tokens = &text.tokens;
        let mut out = Vec::new();
        let mut key = String::new();
        let mut i = 0;
        'scan: while i < tokens.len() {
            let longest = self.max_ngram.min(tokens.len() - i);
            for n in (1..=longest).rev() {
                if n == 1 && self.stopwords.contains(&tokens[i]) {
                    continue;
                }
                key.clear();
                for (j, tok) in tokens[i..i + n].iter().enumerate() {
                    if j > 0 {
                        key.push('_');
                    }
                    key.push_str(tok);
                }
                if let Some(concept) = g.find_concept(&key) {
                    out.push(Mention {
                        concept,
                        start: i,
                        len: n,
                    });
                    i += n;
                    continue 'scan;
                }
            }
            i += 1;
        }
        out
    }

    pub fn extract_concepts(&self, text: &TokenizedText, g: &KnowledgeGraph) -> ConceptMentionSet {
        ConceptMentionSet::from_mentions(&self.mentions(text, g), text.token_count())
    }

    /// Distinct concepts of `text` in order of first mention.
    pub fn ordered_concepts(&self, text: &TokenizedText, g: &KnowledgeGraph) -> Vec<ConceptId> {
        let mut seen = HashSet::new();
        self.mentions(text, g)
            .into_iter()
            .map(|m| m.concept)
            .filter(|c| seen.insert(*c))
            .collect()
    }

    pub fn ground(&self, context: &str, query: &str, g: &KnowledgeGraph) -> GroundedPair {
        GroundedPair {
            context_mentions: self.extract_concepts(&tokenize(context), g),
            query_concepts: self.ordered_concepts(&tokenize(query), g),
        }
    }
}

/// Longest-match extraction with the built-in English stopwords.
pub fn extract_concepts(t: &TokenizedText, g: &KnowledgeGraph, max_ngram: usize) -> Result<ConceptMentionSet> {
    Ok(Grounder::new(Stopwords::english(), max_ngram)?.extract_concepts(t, g))
}
