//! Bug-report filtering with n-gram features, and bug-warning context vectors.

pub mod context;
pub mod filter;
pub mod forest;
pub mod logreg;
pub mod text;

pub use context::{bug_context, bug_features, bug_raw_contexts, statement_spans};
pub use filter::{
    cross_validate_filter, filter_warnings, fit_filter, select_filter, train_filter, BugFilterModel,
    FilterClassifier, FilterConfig, FilterKind, FilterOutcome, FilterSelection,
};
pub use forest::{ForestConfig, RandomForest};
pub use logreg::{LogRegConfig, LogisticRegression};
pub use text::{build_ngram_vocab, extract_ngrams, featurize, preprocess, MembershipVector, NGramVocabulary};
