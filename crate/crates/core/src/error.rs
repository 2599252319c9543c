use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Operands (or subsets) do not live in the group they were handed to.
    #[error("structural mismatch: {0}")]
    Mismatch(String),

    #[error("invalid group description: {0}")]
    InvalidSpec(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An enumeration or verification would exceed its configured budget.
    /// Never reported as a negative verdict.
    #[error("resource limit exceeded: {what} needs {required}, limit is {limit}")]
    ResourceLimit {
        what: String,
        required: String,
        limit: u64,
    },

    #[error("unsupported group: {0}")]
    Unsupported(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// The inequality defining an exponent bound already fails at omega = 2.
    #[error("infeasible bound input: {0}")]
    Infeasible(String),

    /// A construction or multiplication premise (TPP, STPP, ...) is false.
    #[error("premise violated: {0}")]
    PremiseViolated(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn resource(what: impl Into<String>, required: impl ToString, limit: u64) -> Self {
        Error::ResourceLimit {
            what: what.into(),
            required: required.to_string(),
            limit,
        }
    }

    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::ResourceLimit { .. })
    }
}
