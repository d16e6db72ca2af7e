use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: malformed DIMACS header: {msg}")]
    MalformedHeader { line: usize, msg: String },
    #[error("line {line}: {msg}")]
    MalformedClause { line: usize, msg: String },
    #[error("line {line}: literal {literal} exceeds declared variable count {num_vars}")]
    LiteralOutOfRange { line: usize, literal: i64, num_vars: usize },
    #[error("line {line}: empty clause")]
    EmptyClause { line: usize },
    #[error("unterminated clause at end of input")]
    UnterminatedClause,
    #[error("header declares {declared} clauses but {found} were read")]
    ClauseCountMismatch { declared: usize, found: usize },
    #[error("missing `p cnf` header")]
    MissingHeader,

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("formula has no clauses")]
    NoClauses,
    #[error("formula has no variables")]
    NoVariables,
    #[error("random 3-SAT needs at least 3 variables, got {0}")]
    TooFewVariables(usize),

    #[error("model set is empty; backbone is undefined for an unsatisfiable formula")]
    EmptyModelSet,
    #[error("exhaustive scan limited to {limit} variables, formula has {num_vars}")]
    TooManyVariables { num_vars: usize, limit: usize },

    #[error("clause of length {0} is not supported (maximum 3)")]
    ClauseTooLong(usize),
    #[error("clause mentions variable {0} more than once")]
    RepeatedVariable(usize),
    #[error("invalid penalty factor {0}: must be finite, positive and dyadic-representable")]
    InvalidPenaltyFactor(f64),
    #[error("invalid spin value {0}: must be -1 or +1")]
    InvalidSpin(i8),

    #[error("invalid Hamiltonian table: {0}")]
    InvalidTable(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("Hamiltonian has {core} core spins but formula has {num_vars} variables")]
    HamiltonianMismatch { core: usize, num_vars: usize },

    #[error("series is empty")]
    EmptySeries,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("correlation undefined: {0} has zero variance")]
    ZeroVariance(&'static str),
    #[error("need at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("fit needs at least 3 usable points in the window, got {0}")]
    TooFewFitPoints(usize),
    #[error("instance label mismatch: {0} vs {1}")]
    InstanceMismatch(String, String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
