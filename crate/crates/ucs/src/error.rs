use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid graph: {0}")]
    Validation(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("parameter out of domain: {0}")]
    ParamDomain(String),

    #[error("numerical rank {found} does not match expected rank {expected}")]
    RankMismatch { expected: usize, found: usize },

    #[error("root solver failed: {0}")]
    Solver(String),

    #[error("no admissible candidate at iteration {iteration}: {message}")]
    Infeasible { iteration: usize, message: String },

    #[error("degenerate rank-one update: denominator {denominator:e}")]
    DegenerateUpdate { denominator: f64 },

    #[error("combinatorial guard exceeded: {0}")]
    CombinatorialGuard(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}
