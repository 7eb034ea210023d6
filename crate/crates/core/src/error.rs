use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at position {position} in {input:?}: {message}")]
    Syntax {
        input: String,
        position: usize,
        message: String,
    },

    #[error("operation {op:?} is not unimodular (det = {det})")]
    NotUnimodular { op: String, det: i64 },

    #[error("coefficient {coefficient} on axis {axis} in {op:?} exceeds magnitude 1")]
    CoefficientTooLarge {
        op: String,
        axis: char,
        coefficient: i64,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported dimension {0} (expected 2 or 3)")]
    UnsupportedDimension(usize),

    #[error("unknown group {key:?} in dimension {dim}")]
    UnknownGroup { dim: usize, key: String },

    #[error("groups database line {line}: {message}")]
    MalformedDatabase { line: usize, message: String },

    #[error("closure of group {group} exceeds {limit} elements")]
    ClosureOverflow { group: String, limit: usize },

    #[error("closure of group {group} produced translation denominator {denominator}")]
    DenominatorGrowth { group: String, denominator: i64 },

    #[error("lattice box with {nodes} nodes exceeds node budget {budget}")]
    NodeBudget { nodes: u128, budget: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("lattice matrix is singular")]
    SingularLattice,

    #[error("matrix market line {line}: {message}")]
    MatrixMarket { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
