//! Error type shared by all core modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    /// A parameter violates its mathematical domain (e.g. Hurst index
    /// outside (1/2, 1), nonpositive step, exponent sum <= 1).
    #[error("domain error: {0}")]
    Domain(String),

    /// An evaluation fell outside the sampled grid window.
    #[error("range error: {0}")]
    Range(String),

    /// A time is not an integer multiple of the grid step.
    #[error("grid misalignment: {0}")]
    Misaligned(String),

    /// The circulant embedding produced an eigenvalue below the tolerated
    /// floor, or a Cholesky pivot was nonpositive.
    #[error("covariance factorization failed: {0}")]
    Factorization(String),

    /// exp() argument exceeded the double-precision safe range.
    #[error("exponential overflow at t = {time}: |beta * omega| = {magnitude}")]
    Overflow { time: f64, magnitude: f64 },

    /// Newton iteration failed to converge within the configured budget.
    #[error("Newton did not converge at step {step} (residual {residual})")]
    NewtonDiverged { step: usize, residual: f64 },

    /// The H-norm passed the blow-up threshold during a solve.
    #[error("solution blow-up at t = {time}: |u|_H = {norm}")]
    BlowUp { time: f64, norm: f64 },

    /// Discrete coercivity inequality violated beyond tolerance.
    #[error("energy inequality violated at t = {time}: relative slack {slack}")]
    EnergyViolation { time: f64, slack: f64 },

    /// Inconsistent model/state/forcing configuration.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CoreError>;
