//! Error type shared by every layer of the library.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("unsupported element: {symbol}")]
    UnsupportedElement { symbol: String },

    #[error("closed-shell violation: {n_electrons} electrons (charge {charge}); restricted calculations require an even electron count")]
    ClosedShellViolation { n_electrons: i64, charge: i64 },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("parameter layout mismatch: expected {expected} values, got {got}")]
    Layout { expected: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("linear dependence in basis: {0}")]
    LinearDependence(String),

    #[error("SCF did not converge after {iterations} iterations (max|dP| = {delta_p:.3e}, |dE| = {delta_e:.3e})")]
    ScfNonConvergence {
        iterations: usize,
        delta_p: f64,
        delta_e: f64,
    },

    #[error("eigensolver did not converge: {0}")]
    EigenNonConvergence(String),

    #[error("singular geometry: {0}")]
    SingularGeometry(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("non-Hermitian input: imaginary residue {residue:.3e}")]
    NonHermitian { residue: f64 },

    #[error("unsupported gradient: {0}")]
    UnsupportedGradient(String),

    #[error("optimization diverged: energy {energy:.6} rose more than {allowed:.1} above the initial {initial:.6}; try a smaller step size")]
    Divergence {
        energy: f64,
        initial: f64,
        allowed: f64,
    },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
