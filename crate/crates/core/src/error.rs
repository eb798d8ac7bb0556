use thiserror::Error;

use crate::construction::DominationResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad argument combination or value supplied by the caller.
    #[error("invalid argument: {0}")]
    Usage(String),

    /// Bound parameters outside the region where the formula is valid.
    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    /// A full scan of the space would exceed the configured enumeration guard.
    #[error("space {q}^{n} exceeds the enumeration guard of {guard} words")]
    SpaceTooLarge { q: u32, n: usize, guard: u64 },

    #[error("malformed code file: {0}")]
    Parse(String),

    #[error(
        "no trial met |N̄(X)| <= {threshold} within {trials} trials (best {best_missed})",
        best_missed = best.undominated.len()
    )]
    DominationFailed {
        threshold: usize,
        trials: usize,
        best: Box<DominationResult>,
    },

    /// Raised by the recursive construction, carrying the word length of the
    /// level that failed.
    #[error("construction failed at level n={n}: {source}")]
    Construction {
        n: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("exact search stopped by its budget (best known size {best_known})")]
    BudgetExceeded { best_known: usize },
}
