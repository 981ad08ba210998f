use crate::ordinal::ParseOrdinalError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseOrdinalError),

    #[error("{value} is not below {bound}")]
    OutOfRange { value: String, bound: String },

    #[error("{0} is not a power of omega")]
    NotOmegaPower(String),

    #[error("{ordinal} is outside the bound {bound} of family `{family}`")]
    OutOfFamilyBound {
        family: String,
        ordinal: String,
        bound: String,
    },

    #[error("family `{family}` has no C-sequence at limit {ordinal}")]
    MissingSequence { family: String, ordinal: String },

    #[error("C-set at {beta} meets [{lambda}, {alpha}) in more than {limit} points")]
    InfiniteSegment {
        alpha: String,
        beta: String,
        lambda: String,
        limit: usize,
    },

    #[error("rho recursion exceeded depth {0}")]
    RecursionBudget(usize),

    #[error("enumeration exceeded {cap} points")]
    EnumerationCap { cap: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("hypothesis `{clause}` failed: {detail}")]
    Hypothesis { clause: String, detail: String },

    #[error("search exhausted: {0}")]
    SearchExhausted(String),

    #[error("closure did not stabilize within {0} steps")]
    ClosureBudget(usize),

    #[error("budget of {budget} exhausted ({needed} needed)")]
    BudgetExhausted { budget: usize, needed: usize },

    #[error("tree invariant violated: {0}")]
    TreeInvariant(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("family file line {line}: {message}")]
    FamilyFile { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
