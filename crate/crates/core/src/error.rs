use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("player `{0}` is not part of the game")]
    PlayerNotFound(String),

    #[error("duplicate player `{0}`")]
    DuplicatePlayer(String),

    #[error("enumeration needs {needed} evaluations but the budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown relation `{0}`")]
    UnknownRelation(String),

    #[error("relation `{relation}` has arity {expected}, got {found}")]
    ArityMismatch {
        relation: String,
        expected: usize,
        found: usize,
    },

    #[error("duplicate tuple {0}")]
    DuplicateTuple(String),

    #[error("duplicate tuple id `{0}`")]
    DuplicateTupleId(String),

    #[error("unknown tuple id `{0}`")]
    UnknownTuple(String),

    #[error("negation is not allowed in a lineage formula (line {line}, column {column})")]
    NonMonotone { line: usize, column: usize },

    #[error("{}: {message}", path.display())]
    Csv {
        path: PathBuf,
        row: Option<usize>,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("the query is false on the database; there is nothing to explain")]
    QueryFalse,

    #[error("value `{0}` is not numeric")]
    NonNumeric(String),

    #[error("entity width {found} does not match feature space width {expected}")]
    WidthMismatch { expected: usize, found: usize },

    #[error("width {width} exceeds the exact enumeration cap of {cap}")]
    WidthCap { width: usize, cap: usize },

    #[error("conditioning event has zero probability: {0}")]
    ZeroMass(String),

    #[error("inconsistent constraint: {0}")]
    InconsistentConstraint(String),

    #[error("external classifier protocol error: {0}")]
    Protocol(String),

    #[error("entity has label 0; only label 1 outcomes are explained")]
    LabelConvention,

    #[error("unknown feature `{0}`")]
    UnknownFeature(String),

    #[error("invalid feature space: {0}")]
    FeatureSpace(String),

    #[error("truth table: {0}")]
    TruthTable(String),
}

impl Error {
    pub(crate) fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            line,
            column,
            message: message.into(),
        }
    }
}
