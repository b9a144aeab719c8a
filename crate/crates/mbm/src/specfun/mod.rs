//! Special-function kernel.
//!
//! Self-contained double-precision implementations of the functions the
//! error-rate analysis needs: the Gaussian tail Q, log-gamma, incomplete
//! gamma, (noncentral) chi-squared density/CDF, the Gauss and confluent
//! hypergeometric series, and a tanh-sinh quadrature engine used by the
//! oracle integrals.
//!
//! All functions here are pure; they can be called concurrently from any
//! number of workers.

mod chi2;
mod erf;
mod gamma;
mod hyper;
mod quad;

pub use chi2::{chi2_cdf, chi2_pdf, chi2_sf, chi2_tail_cutoff, noncentral_chi2_pdf};
pub use erf::{erfc, q_function};
pub use gamma::{
    ln_gamma, ln_upper_incomplete_gamma, regularized_gamma_p, regularized_gamma_q,
    upper_incomplete_gamma,
};
pub use hyper::{confluent_1f1, gauss_2f1, SeriesEval};
pub use quad::{integrate, QuadResult};

use core::fmt;

/// Truncation control for series evaluations (hypergeometric sums,
/// Poisson mixtures).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    /// Relative tolerance on the trailing term versus the partial sum.
    pub rel_tol: f64,
    /// Hard cap on the number of terms before giving up.
    pub max_terms: usize,
}

impl SeriesControl {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self, SpecFunError> {
        if !(rel_tol > 0.0) || max_terms == 0 {
            return Err(SpecFunError::Domain {
                what: "SeriesControl requires rel_tol > 0 and max_terms >= 1",
            });
        }
        Ok(SeriesControl { rel_tol, max_terms })
    }
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl {
            rel_tol: 1e-12,
            max_terms: 10_000,
        }
    }
}

/// Errors from special-function evaluation.
///
/// Non-convergence is always reported, never silently truncated; the
/// partial sum travels with the error for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpecFunError {
    /// Input outside the function's domain.
    Domain { what: &'static str },
    /// A series or quadrature did not reach the requested tolerance.
    NotConverged { partial: f64, terms: usize },
}

impl fmt::Display for SpecFunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecFunError::Domain { what } => write!(f, "domain error: {what}"),
            SpecFunError::NotConverged { partial, terms } => write!(
                f,
                "did not converge after {terms} terms (partial sum {partial:e})"
            ),
        }
    }
}

impl std::error::Error for SpecFunError {}
