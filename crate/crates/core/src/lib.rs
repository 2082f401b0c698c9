//! Statement-tree code representations enriched with static-analysis context.
//!
//! Programs are split into statement trees, each tree is encoded by one
//! bottom-up message pass over node inputs that are max-pooled with bug-warning
//! and design-pattern context vectors, and a bidirectional GRU pools the
//! statement vectors into a code vector used by the classification and
//! clone-detection heads.

pub mod ast;
pub mod bugs;
pub mod encode;
pub mod error;
pub mod ingest;
pub mod metrics;
pub mod nn;
pub mod patterns;
pub mod run;
pub mod synth;
pub mod tasks;

pub use ast::AstNode;
pub use error::{Error, Result};
