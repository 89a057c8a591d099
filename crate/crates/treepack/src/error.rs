use thiserror::Error;

/// Failure modes shared by every operation in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The caller handed in an input that violates a documented precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A step that is supposed to be impossible happened. Always a bug.
    #[error("internal invariant failed: {0}")]
    Invariant(String),
    /// The instance has no solution (for example too few disjoint trees).
    #[error("infeasible: {0}")]
    Infeasible(String),
    /// A search or construction exceeded its configured size limit.
    #[error("budget exceeded: {0}")]
    Budget(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! precondition {
    ($($arg:tt)*) => { $crate::error::Error::Precondition(format!($($arg)*)) };
}

macro_rules! invariant {
    ($($arg:tt)*) => { $crate::error::Error::Invariant(format!($($arg)*)) };
}

pub(crate) use invariant;
pub(crate) use precondition;
