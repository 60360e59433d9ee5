//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced while loading configuration or evaluating the model.
#[derive(Debug, Error)]
pub enum ModelError {
    /// The configuration file could not be read or parsed.
    #[error("config parse error: {0}")]
    Parse(String),

    /// A configuration value violates a model invariant. `field` is the
    /// dotted path of the offending entry.
    #[error("config validation error at `{field}`: {message}")]
    Validation { field: String, message: String },

    /// A frequency triplet does not satisfy the mixing condition
    /// f_j + f_k − f_m = f_i within tolerance.
    #[error("triplet mismatch: |f_j + f_k - f_m - f_i| = {gap_hz:.3e} Hz exceeds tolerance {tol_hz:.1e} Hz")]
    TripletMismatch { gap_hz: f64, tol_hz: f64 },

    /// Degenerate parameter where a closed form is singular (e.g. an XPM
    /// pair with f_k = f_i).
    #[error("degenerate parameter: {0}")]
    Degenerate(String),

    /// The coupled power ODE produced a non-positive channel power.
    #[error("ODE instability: channel {channel} power became non-positive at z = {z_m:.1} m")]
    OdeInstability { channel: usize, z_m: f64 },

    /// A quadrature failed its internal convergence check.
    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergence(String),

    /// The requested numerical-reference run exceeds the configured cell
    /// budget.
    #[error("resource budget exceeded: {cells} integration cells requested, budget is {budget}")]
    BudgetExceeded { cells: usize, budget: usize },

    /// A special-function evaluation was requested outside its domain.
    #[error("domain error: {0}")]
    Domain(String),
}

impl ModelError {
    /// Process exit code convention: 1 validation, 2 numeric failure,
    /// 3 resource budget.
    pub fn exit_code(&self) -> i32 {
        match self {
            ModelError::Parse(_) | ModelError::Validation { .. } => 1,
            ModelError::BudgetExceeded { .. } => 3,
            _ => 2,
        }
    }
}
