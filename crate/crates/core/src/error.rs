use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unsupported form: {0}")]
    UnsupportedForm(String),

    #[error("floor of a({n}) could not be certified within the precision cap")]
    UndecidableFloor { n: i64 },

    #[error("a({n}) is undefined")]
    Undefined { n: i64 },

    #[error("value does not fit into a 64-bit integer at n = {n}")]
    Overflow { n: i64 },

    #[error("sequence must satisfy the first convergence condition (got {0})")]
    RequiresCond1(String),

    #[error("growth out of range: {0}")]
    GrowthOutOfRange(String),

    #[error("brute-force budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("degenerate family: {0}")]
    DegenerateFamily(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("derivation did not terminate within depth {0}")]
    NonTermination(usize),

    #[error("family grew beyond {limit} members at depth {depth}")]
    FamilyTooLarge { limit: usize, depth: usize },

    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),

    #[error("empty window: {0}")]
    EmptyWindow(String),

    #[error("Taylor remainder reached {max_remainder} at n = {n}; window too long")]
    RemainderTooLarge { n: i64, max_remainder: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
