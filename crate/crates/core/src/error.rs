use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// An intersection whose stored witness point violates one of its members.
    #[error("empty intersection: stored witness violates a member by {margin:.3e}")]
    EmptySet { margin: f64 },

    /// Iterative projection ran out of its cycle budget.
    #[error("projection did not converge after {cycles} cycles (residual {residual:.3e})")]
    NonConvergence { cycles: usize, residual: f64 },

    /// Support function diverges along the requested direction.
    #[error("support is unbounded along the requested direction")]
    Unbounded,

    /// Regret comparator lies outside the final feasible set.
    #[error("comparator is infeasible for the final set (distance {distance:.3e})")]
    InfeasibleComparator { distance: f64 },

    /// Cone apex lies inside the target set, so no separating cone exists.
    #[error("cone apex lies inside the target set")]
    DegenerateConfiguration,

    /// Input data does not determine a meaningful answer.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// Monotone instance generation exhausted its retry budget.
    #[error("monotone instance generation failed after {retries} retries")]
    MonotonicityUnattainable { retries: usize },

    /// Bad user-facing configuration (wrong field, missing value, ...).
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A policy run aborted mid-way; the partial trace is flagged invalid.
    #[error("run aborted: {reason}")]
    RunAborted { reason: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
