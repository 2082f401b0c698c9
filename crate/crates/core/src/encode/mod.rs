//! Statement splitting, symbol vocabulary, embeddings and the context-aware encoder.

pub mod context;
pub mod embed;
pub mod encoder;
pub mod split;
pub mod vocab;

pub use context::{Channel, ContextVector, RawContext, Scope};
pub use embed::{cosine, symbol_sequences, train_embeddings, train_skipgram, SkipGramConfig};
pub use encoder::{
    encode_code, encode_statement, encode_unit, CompiledTree, EncoderParams, EncoderShape, Fusion,
    PreparedUnit,
};
pub use split::{split_statements, StatementTree};
pub use vocab::{build_vocab, Vocabulary};
