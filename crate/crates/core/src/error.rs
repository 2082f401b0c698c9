use std::path::PathBuf;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("format error in field `{field}`{}", detail_suffix(.detail))]
    Format { field: String, detail: String },
    #[error("label out of range for samples: {}", .0.join(", "))]
    LabelRange(Vec<String>),
    #[error("pairs reference unknown ids: {}", .0.join(", "))]
    DanglingId(Vec<String>),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("training labels are degenerate: {0}")]
    DegenerateLabels(String),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("root node `{0}` is not a class")]
    NotAClass(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("unsupported clone type request: {0}")]
    UnsupportedType(String),
    #[error("variant needs a channel that is not available: {0}")]
    MissingChannel(String),
    #[error("bundle format version {found} is newer than supported version {supported}")]
    Version { found: u32, supported: u32 },
    #[error("invalid fold count {0}: cross-validation needs at least 2 folds")]
    InvalidFolds(usize),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn detail_suffix(detail: &str) -> String {
    if detail.is_empty() {
        String::new()
    } else {
        format!(": {detail}")
    }
}

impl Error {
    pub fn format(field: impl Into<String>) -> Self {
        Error::Format {
            field: field.into(),
            detail: String::new(),
        }
    }

    pub fn format_detail(field: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Format {
            field: field.into(),
            detail: detail.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for problems with user-supplied inputs (as opposed to usage or internal faults).
    pub fn is_data_error(&self) -> bool {
        !matches!(self, Error::Config(_) | Error::InvalidFolds(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
