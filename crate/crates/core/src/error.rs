use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// What went wrong while reading a KEEL or CSV file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    MalformedHeader(String),
    MissingDataSection,
    EmptyData,
    NominalFeature(String),
    FieldCount { expected: usize, found: usize },
    NonNumeric { column: String, value: String },
    UnknownClass(String),
    TooManyClasses(Vec<String>),
    SingleClass(String),
    MissingColumn(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::MalformedHeader(msg) => write!(f, "malformed header: {msg}"),
            Self::MissingDataSection => f.write_str("missing @data section"),
            Self::EmptyData => f.write_str("empty data section"),
            Self::NominalFeature(name) => write!(
                f,
                "nominal feature `{name}` is not supported (drop it explicitly or convert it to numeric)"
            ),
            Self::FieldCount { expected, found } => {
                write!(f, "expected {expected} fields, found {found}")
            }
            Self::NonNumeric { column, value } => {
                write!(f, "column `{column}`: `{value}` is not a finite number")
            }
            Self::UnknownClass(value) => write!(f, "class value `{value}` is not declared"),
            Self::TooManyClasses(values) => {
                write!(f, "expected a binary class, found {}: {}", values.len(), values.join(", "))
            }
            Self::SingleClass(value) => write!(f, "only one class present (`{value}`)"),
            Self::MissingColumn(name) => write!(f, "no column `{name}`"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {kind}")]
    Parse { line: usize, kind: ParseErrorKind },

    #[error("{what}: need at least {required} samples, found {found}")]
    InsufficientSamples {
        what: &'static str,
        required: usize,
        found: usize,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid data: {0}")]
    Data(String),

    #[error("borderline-SMOTE found no danger points; use plain SMOTE for this dataset")]
    NoDangerPoints,

    #[error("training diverged (loss is not finite); try a smaller learning rate")]
    Diverged,

    #[error("fold {fold}: synthetic row derived from test row {row}")]
    Leakage { fold: usize, row: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, kind: ParseErrorKind) -> Self {
        Error::Parse { line, kind }
    }
}
