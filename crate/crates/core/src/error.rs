use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed tree: {0}")]
    InvalidTree(String),

    #[error("tree is not contractible to a (0)-root: {0}")]
    NotContractible(String),

    #[error("weight overflow at vertex {0}")]
    WeightOverflow(usize),

    #[error("(-1)-root with {children} children cannot be contracted")]
    NotPseudominimalizable { children: usize },

    #[error("invalid blowup step {step} in batch {batch}: {reason}")]
    InvalidStep {
        batch: usize,
        step: usize,
        reason: String,
    },

    #[error("level {level} out of range for fiber over {point} (height {height})")]
    LevelOutOfRange {
        point: String,
        level: i64,
        height: usize,
    },

    #[error("unknown point label `{0}`")]
    UnknownPoint(String),

    #[error("invalid graph divisor: {}", .0.join("; "))]
    InvalidDivisor(Vec<String>),

    #[error("equivariance data broken: {0}")]
    EquivarianceBroken(String),

    #[error("operation requires a base with one point at infinity, got {0}")]
    UnsupportedBase(usize),

    #[error("fiber over {0} is not reduced")]
    NonReducedFiber(String),

    #[error("no fiber tree branches; the surface is a line bundle")]
    NoBranchingFiber,

    #[error("invalid b_0: {0}")]
    InvalidB0(String),

    #[error("invalid Danielewski form: {0}")]
    InvalidForm(String),

    #[error("malformed Masuda-Miyanishi form: {0}")]
    MalformedMMForm(String),

    #[error("{e}/{m} at {point} does not lift to an integral coefficient under a degree {d} cover")]
    NonIntegral {
        point: String,
        e: i64,
        m: u64,
        d: u64,
    },

    #[error("multiplicity 1 gives a smooth point")]
    NotSingular,

    #[error("bad parameters: {0}")]
    BadParameters(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
