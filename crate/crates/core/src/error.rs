use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("c^2 must be < 1 (got c = {c})")]
    VelocityOutOfRange { c: f64 },

    #[error("alpha is singular at c = 0")]
    DegenerateVelocity,

    #[error(
        "domain too short: boundary/peak ratio {ratio:.3e} exceeds {tol:.1e}; try L >= {suggested_length:.6}"
    )]
    TailTooFat {
        ratio: f64,
        tol: f64,
        suggested_length: f64,
    },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("root count {count} in (0,1) is inconsistent for p = {p}, mu = {mu}: {detail}")]
    InconsistentRootCount {
        p: f64,
        mu: f64,
        count: usize,
        detail: String,
    },

    #[error("critical mu is only defined for p > 5 (got p = {0})")]
    NotApplicable(f64),

    #[error("time step {dt:.6e} exceeds the stability bound {bound:.6e}")]
    StepRejected { dt: f64, bound: f64 },

    #[error("non-finite value encountered at t = {t}")]
    NonFinite { t: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
