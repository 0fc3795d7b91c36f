use thiserror::Error;

/// Errors surfaced by the numerical kernels and the sampling machinery.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("series did not converge within {max_terms} terms ({context})")]
    NonConvergence { context: &'static str, max_terms: usize },

    #[error("quadrature tolerance not met ({context}): err_est={err_est:.3e}, tol={tol:.3e}")]
    ToleranceNotMet {
        context: &'static str,
        err_est: f64,
        tol: f64,
    },

    #[error("cross-check failed ({context}): |delta|={delta:.3e} exceeds {tol:.3e}")]
    CrossCheck {
        context: &'static str,
        delta: f64,
        tol: f64,
    },

    #[error("count grid does not match accumulator grid")]
    GridMismatch,

    #[error("insufficient samples: need at least {need}, got {got}")]
    InsufficientSamples { need: usize, got: usize },

    #[error("eigenvalue pairing failed: {0}")]
    Pairing(String),

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("campaign had {failed} failed samples out of {total} (limit 0.1%)")]
    CampaignFailures { failed: usize, total: usize },

    #[error("checkpoint error: {0}")]
    Checkpoint(String),
}

pub type Result<T> = std::result::Result<T, Error>;
