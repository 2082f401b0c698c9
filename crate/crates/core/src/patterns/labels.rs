use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const NONE_PATTERN: &str = "NONE";

pub const DEFAULT_PATTERNS: [&str; 6] = ["SINGLETON", "FACTORY_METHOD", "ADAPTER", "DECORATOR", "OBSERVER", NONE_PATTERN];

/// Ordered pattern label inventory; order fixes class indices and tie-breaking.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternSet {
    labels: Vec<String>,
}

impl Default for PatternSet {
    fn default() -> Self {
        PatternSet {
            labels: DEFAULT_PATTERNS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl PatternSet {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.len() < 2 {
            return Err(Error::Config("a pattern set needs at least two labels".into()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::Config(format!("duplicate pattern label `{l}`")));
            }
        }
        Ok(PatternSet { labels })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// One-hot over the set, with `NONE` mapped to the zero vector.
    pub fn one_hot(&self, label: &str) -> Result<Vec<f64>> {
        let i = self.index(label)?;
        let mut v = vec![0.0; self.len()];
        if label != NONE_PATTERN {
            v[i] = 1.0;
        }
        Ok(v)
    }
}
