use thiserror::Error;

/// Errors produced by the numerical kernels and file readers.
#[derive(Debug, Error)]
pub enum Error {
    /// A pivot fell below the singularity threshold during factorization.
    #[error("matrix numerically singular: |pivot| = {pivot:.3e} < {threshold:.3e} at elimination step {step}")]
    SingularMatrix {
        step: usize,
        pivot: f64,
        threshold: f64,
    },

    /// A resolvent factorization failed at a specific quadrature node.
    #[error("resolvent singular at quadrature node k = {node} (x = {x:.6e})")]
    SingularResolvent { node: i64, x: f64 },

    /// The QR eigenvalue iteration hit its sweep cap before deflating every eigenvalue.
    #[error("eigenvalue iteration did not converge within {sweeps} sweeps (n = {n})")]
    NoConvergence { sweeps: usize, n: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("invalid tolerance: eps = {eps:.3e} (must be > 0)")]
    InvalidTolerance { eps: f64 },

    /// The truncation scan exceeded its node cap: the tolerance is
    /// unattainable at this mesh size.
    #[error("truncation interval exceeds {cap} nodes (h = {h}, eps = {eps:.3e})")]
    IntervalOverflow { cap: i64, h: f64, eps: f64 },

    /// The convergence-rate estimate is unusable (errors equal, zero, or increasing).
    #[error("degenerate rate estimate: eps1 = {eps1:.3e}, eps2 = {eps2:.3e}")]
    DegenerateEstimate { eps1: f64, eps2: f64 },

    /// The mesh size required to hit the target tolerance is below the configured floor.
    #[error("required mesh size {h:.3e} below minimum {h_min:.3e}")]
    MeshFloor { h: f64, h_min: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
