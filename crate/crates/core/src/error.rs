use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrime(u32),
    #[error("field order {p}^{k} exceeds the configured bound {bound}")]
    OrderTooLarge { p: u32, k: u32, bound: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("field of odd degree has no involution")]
    NoInvolution,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operation needs a {0} form")]
    WrongKind(&'static str),
    #[error("{what} count {count} exceeds cap {cap}")]
    TooLarge { what: &'static str, count: usize, cap: usize },
    #[error("subspaces are not opposite")]
    NotOpposite,
    #[error("subspace is not contained in the base")]
    NotContained,
    #[error("bad dimension: {0}")]
    BadDimension(String),
    #[error("no third point: {0}")]
    NoSuchP3(String),
    #[error("degenerate configuration: D = 0")]
    DegenerateD,
    #[error("not a homology: {0}")]
    NotAHomology(String),
    #[error("singular: 1 + a*b^2 = 0")]
    Singular,
    #[error("permutation degree mismatch: {expected} vs {got}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("not a subgroup")]
    NotSubgroup,
    #[error("unknown group family {0}")]
    UnknownFamily(String),
    #[error("condition not met: {0}")]
    ConditionNotMet(String),
    #[error("opposition graph is disconnected ({reached} of {total} nodes reached)")]
    DisconnectedOppositionGraph { reached: usize, total: usize },
    #[error("no configuration found: {0}")]
    NoConfigurationFound(String),
    #[error("invalid form: {0}")]
    InvalidForm(String),
}

pub type Result<T> = std::result::Result<T, Error>;
