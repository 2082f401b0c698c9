//! Loading programs, detector warnings, bug reports and task datasets.

pub mod corpus;
pub mod lexer;
pub mod mini;
pub mod record;
pub mod warnings;

pub use corpus::{
    attach_warnings, load_bug_reports, load_classification_corpus, load_clone_corpus, load_pattern_corpus,
    read_text, write_code_store, write_pairs,
    BugReportDoc, ClassificationSample, CloneCorpus, ClonePair, CloneType, CodeUnit,
    PatternSample, ReportLabel,
};
pub use mini::{parse_mini, parse_mini_with_lines};
pub use record::{load_ast_record, serialize_ast};
pub use warnings::{load_warnings, BugWarning};
