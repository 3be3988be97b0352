use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "quadrature for G_{k} did not reach tolerance {abs_tol:e} within {panels} panels \
         (estimated error {estimate:e}); the integrand is near-singular close to h = 1 at T = 0"
    )]
    QuadratureNonConvergence {
        k: i64,
        abs_tol: f64,
        estimate: f64,
        panels: usize,
    },

    #[error("reduced density matrix is not positive: minimum eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("symmetric eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    EigenNonConvergence { sweeps: usize, off_norm: f64 },

    #[error("two-spin state is not X-shaped: off-pattern entry of magnitude {magnitude:e}")]
    ShapeViolation { magnitude: f64 },

    #[error("chain of {n_sites} sites exceeds the exact-diagonalization limit of {max_sites}")]
    SizeLimit { n_sites: usize, max_sites: usize },

    #[error("{quantity} is still nonzero at t_max = {t_max}; no bracket for its death temperature")]
    NoBracket { quantity: &'static str, t_max: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
