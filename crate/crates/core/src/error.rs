use thiserror::Error;

pub type Result<T> = std::result::Result<T, QbmError>;

/// Failure modes of the physics and numerics layers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum QbmError {
    #[error("pole of {function} at z = {z}")]
    Pole { function: &'static str, z: String },

    #[error("{what} did not converge: {detail}")]
    NonConvergence { what: &'static str, detail: String },

    #[error("overdamped input (gamma = {gamma} >= 2 omega0 = {two_omega0}); use the quadrature route")]
    Overdamped { gamma: f64, two_omega0: f64 },

    #[error("resonant denominator cosh(hbar beta omega_bar) - cos(hbar beta gamma/2) = {value:e}")]
    ResonantDenominator { value: f64 },

    #[error("divergent moment: {0}")]
    DivergentMoment(String),

    #[error("divergent product: {0}")]
    DivergentProduct(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("insufficient bath coverage: reconstructed gamma(0) = {reconstructed}, target {target}")]
    InsufficientCoverage { reconstructed: f64, target: f64 },

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("matrix exponential failed: {0}")]
    MatrixExponential(String),

    #[error("extrapolation did not converge: {0}")]
    Extrapolation(String),

    #[error("Bromwich inversion unstable: {0}")]
    ContourFailure(String),

    #[error("{what}: routes disagree ({a} vs {b}, tolerance {tol:e})")]
    RouteDisagreement { what: &'static str, a: f64, b: f64, tol: f64 },

    #[error("no root: {0}")]
    NoRoot(String),
}
