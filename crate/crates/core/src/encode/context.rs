use serde::{Deserialize, Serialize};

use crate::nn::Tensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Channel {
    Bug,
    Pattern,
}

/// Which statement trees a context applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scope {
    /// Index into the statement sequence produced by `split_statements`.
    Statement(usize),
    WholeUnit,
}

impl Scope {
    pub fn applies_to(self, statement: usize) -> bool {
        match self {
            Scope::Statement(i) => i == statement,
            Scope::WholeUnit => true,
        }
    }
}

/// A projected static-analysis feature vector of the embedding width.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextVector {
    pub channel: Channel,
    pub scope: Scope,
    pub values: Vec<f64>,
}

/// Unprojected channel features; the encoder owns the projection so it can learn it.
#[derive(Debug, Clone, PartialEq)]
pub struct RawContext {
    pub channel: Channel,
    pub scope: Scope,
    pub features: Vec<f64>,
}

impl RawContext {
    pub fn project(&self, projection: &Tensor) -> crate::Result<ContextVector> {
        Ok(ContextVector {
            channel: self.channel,
            scope: self.scope,
            values: projection.matvec(&self.features)?,
        })
    }
}
