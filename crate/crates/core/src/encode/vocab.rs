use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::ast::{kind, AstNode};

pub const PAD: usize = 0;
pub const UNK: usize = 1;
pub const END_BLOCK: usize = 2;

/// Dense symbol indices: `PAD`, `UNK`, `END_BLOCK`, then every node-kind label,
/// then tokens ordered by descending frequency and lexicographically on ties.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "VocabRepr", into = "VocabRepr")]
pub struct Vocabulary {
    kinds: Vec<String>,
    tokens: Vec<String>,
    kind_index: HashMap<String, usize>,
    token_index: HashMap<String, usize>,
    /// Identifier leaves embed as their kind rather than their name.
    abstract_identifiers: bool,
}

#[derive(Serialize, Deserialize)]
struct VocabRepr {
    kinds: Vec<String>,
    tokens: Vec<String>,
    #[serde(default)]
    abstract_identifiers: bool,
}

impl From<VocabRepr> for Vocabulary {
    fn from(r: VocabRepr) -> Self {
        let mut v = Vocabulary::from_parts(r.kinds, r.tokens);
        v.abstract_identifiers = r.abstract_identifiers;
        v
    }
}

impl From<Vocabulary> for VocabRepr {
    fn from(v: Vocabulary) -> Self {
        VocabRepr {
            kinds: v.kinds,
            tokens: v.tokens,
            abstract_identifiers: v.abstract_identifiers,
        }
    }
}

const RESERVED: usize = 3;

impl Vocabulary {
    fn from_parts(kinds: Vec<String>, tokens: Vec<String>) -> Self {
        let kind_index = kinds
            .iter()
            .enumerate()
            .map(|(i, k)| (k.clone(), RESERVED + i))
            .collect();
        let offset = RESERVED + kinds.len();
        let token_index = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), offset + i))
            .collect();
        Vocabulary {
            kinds,
            tokens,
            kind_index,
            token_index,
            abstract_identifiers: false,
        }
    }

    /// Same vocabulary, but every identifier embeds as the `Identifier` kind.
    pub fn with_abstract_identifiers(mut self, on: bool) -> Self {
        self.abstract_identifiers = on;
        self
    }

    pub fn abstracts_identifiers(&self) -> bool {
        self.abstract_identifiers
    }

    pub fn len(&self) -> usize {
        RESERVED + self.kinds.len() + self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn token(&self, token: &str) -> usize {
        self.token_index.get(token).copied().unwrap_or(UNK)
    }

    pub fn kind(&self, kind_label: &str) -> usize {
        if kind_label == kind::END_BLOCK {
            return END_BLOCK;
        }
        self.kind_index.get(kind_label).copied().unwrap_or(UNK)
    }

    /// Index embedded for a node: its token when present, else its kind.
    pub fn node(&self, node: &AstNode) -> usize {
        if self.abstract_identifiers && node.is(kind::IDENTIFIER) {
            return self.kind(kind::IDENTIFIER);
        }
        match &node.token {
            Some(t) => self.token(t),
            None => self.kind(&node.kind),
        }
    }

    pub fn contains_token(&self, token: &str) -> bool {
        self.token_index.contains_key(token)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// Human-readable symbol for an index.
    pub fn symbol(&self, index: usize) -> &str {
        match index {
            PAD => "<PAD>",
            UNK => "<UNK>",
            END_BLOCK => kind::END_BLOCK,
            i if i < RESERVED + self.kinds.len() => &self.kinds[i - RESERVED],
            i => self.tokens.get(i - RESERVED - self.kinds.len()).map_or("<UNK>", String::as_str),
        }
    }
}

/// Build a vocabulary keeping tokens seen at least `min_count` times.
pub fn build_vocab(corpus: &[&AstNode], min_count: usize) -> Vocabulary {
    let min_count = min_count.max(1);
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    let mut extra_kinds: BTreeSet<&str> = BTreeSet::new();
    for ast in corpus {
        for node in ast.preorder() {
            if let Some(t) = &node.token {
                *counts.entry(t).or_default() += 1;
            }
            if !kind::ALL.contains(&node.kind.as_str()) {
                extra_kinds.insert(&node.kind);
            }
        }
    }
    let kinds: Vec<String> = kind::ALL
        .iter()
        .copied()
        .filter(|k| *k != kind::END_BLOCK)
        .chain(extra_kinds)
        .map(String::from)
        .collect();
    let mut tokens: Vec<(&str, usize)> = counts.into_iter().filter(|(_, c)| *c >= min_count).collect();
    tokens.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    Vocabulary::from_parts(kinds, tokens.into_iter().map(|(t, _)| t.to_string()).collect())
}
