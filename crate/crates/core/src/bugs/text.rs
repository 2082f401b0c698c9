//! Tokenization, n-gram enumeration and membership vectors.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const STOPWORDS: &[&str] = &[
    "a", "an", "and", "are", "as", "at", "be", "but", "by", "for", "from", "has", "have", "i",
    "in", "into", "is", "it", "its", "of", "on", "or", "so", "that", "the", "their", "then",
    "there", "these", "this", "to", "was", "we", "were", "which", "will", "with",
];

/// Lowercase, split on non-alphanumerics, drop empties and stopwords.
pub fn preprocess(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .filter(|t| !STOPWORDS.contains(&t.as_str()))
        .collect()
}

/// Grams are stored as their tokens joined by a single space.
pub fn gram_key(tokens: &[String]) -> String {
    tokens.join(" ")
}

/// All contiguous grams of length `1..=n_max`, shorter lengths first.
pub fn extract_ngrams(tokens: &[String], n_max: usize) -> Vec<String> {
    let mut out = Vec::new();
    for n in 1..=n_max.min(tokens.len()) {
        for w in tokens.windows(n) {
            out.push(gram_key(w));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NGramVocabulary {
    pub n_max: usize,
    pub min_df: usize,
    pub n_docs: usize,
    grams: Vec<String>,
    df: Vec<usize>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl NGramVocabulary {
    fn from_parts(n_max: usize, min_df: usize, n_docs: usize, grams: Vec<String>, df: Vec<usize>) -> Self {
        let index = grams.iter().enumerate().map(|(i, g)| (g.clone(), i)).collect();
        NGramVocabulary {
            n_max,
            min_df,
            n_docs,
            grams,
            df,
            index,
        }
    }

    /// Rebuild the lookup table after deserializing.
    pub fn reindex(&mut self) {
        self.index = self.grams.iter().enumerate().map(|(i, g)| (g.clone(), i)).collect();
    }

    pub fn len(&self) -> usize {
        self.grams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grams.is_empty()
    }

    pub fn index_of(&self, gram: &str) -> Option<usize> {
        self.index.get(gram).copied()
    }

    pub fn gram(&self, i: usize) -> &str {
        &self.grams[i]
    }

    pub fn grams(&self) -> &[String] {
        &self.grams
    }

    pub fn df(&self, i: usize) -> usize {
        self.df[i]
    }

    pub fn idf(&self, i: usize) -> f64 {
        (self.n_docs as f64 / self.df[i] as f64).ln()
    }
}

pub const DEFAULT_VOCAB_CAP: usize = 5000;

/// Keep grams with document frequency at least `min_df`.
///
/// When more than `cap` grams qualify, the top `cap` by collection frequency
/// times idf are kept (ties broken lexicographically). Indices follow
/// lexicographic gram order.
pub fn build_ngram_vocab(
    docs: &[Vec<String>],
    n_max: usize,
    min_df: usize,
    cap: usize,
) -> Result<NGramVocabulary> {
    if docs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut df: BTreeMap<String, usize> = BTreeMap::new();
    let mut cf: HashMap<String, usize> = HashMap::new();
    for doc in docs {
        let grams = extract_ngrams(doc, n_max);
        let mut seen: Vec<&String> = grams.iter().collect();
        for g in &grams {
            *cf.entry(g.clone()).or_default() += 1;
        }
        seen.sort_unstable();
        seen.dedup();
        for g in seen {
            *df.entry(g.clone()).or_default() += 1;
        }
    }
    let n_docs = docs.len();
    let mut kept: Vec<(String, usize)> = df.into_iter().filter(|(_, d)| *d >= min_df.max(1)).collect();
    if kept.len() > cap {
        let score = |g: &str, d: usize| cf[g] as f64 * (n_docs as f64 / d as f64).ln();
        kept.sort_by(|a, b| {
            score(&b.0, b.1)
                .total_cmp(&score(&a.0, a.1))
                .then_with(|| a.0.cmp(&b.0))
        });
        kept.truncate(cap);
        kept.sort_by(|a, b| a.0.cmp(&b.0));
    }
    let (grams, dfs) = kept.into_iter().unzip();
    Ok(NGramVocabulary::from_parts(n_max, min_df, n_docs, grams, dfs))
}

/// Sparse raw counts of vocabulary grams in one document.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MembershipVector {
    pub counts: BTreeMap<usize, u32>,
}

impl MembershipVector {
    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn to_dense(&self, width: usize) -> Vec<f64> {
        let mut v = vec![0.0; width];
        for (&i, &c) in &self.counts {
            v[i] = c as f64;
        }
        v
    }
}

pub fn featurize(tokens: &[String], vocab: &NGramVocabulary) -> MembershipVector {
    let mut counts = BTreeMap::new();
    for g in extract_ngrams(tokens, vocab.n_max) {
        if let Some(i) = vocab.index_of(&g) {
            *counts.entry(i).or_insert(0) += 1;
        }
    }
    MembershipVector { counts }
}
