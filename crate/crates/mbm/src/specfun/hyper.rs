//! Gauss ₂F₁ and confluent ₁F₁ hypergeometric series.
//!
//! Both are plain power-series evaluations with term-recurrence; the
//! callers in this crate only need arguments where the series converge
//! (z ∈ [0, 1) for ₂F₁ with b < c, and z ≥ 0 for ₁F₁).

use super::{SeriesControl, SpecFunError};

/// A converged series evaluation together with its truncation evidence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesEval {
    pub value: f64,
    /// Number of terms summed, including the leading 1.
    pub terms_used: usize,
    /// Magnitude of the last term relative to the sum.
    pub achieved_rel_tol: f64,
}

/// Gauss hypergeometric ₂F₁(a, b; c; z) = Σₖ (a)ₖ(b)ₖ/(c)ₖ · zᵏ/k!.
///
/// Requires c > 0 and 0 ≤ z < 1.
pub fn gauss_2f1(
    a: f64,
    b: f64,
    c: f64,
    z: f64,
    ctrl: &SeriesControl,
) -> Result<SeriesEval, SpecFunError> {
    if !(c > 0.0) || !(0.0..1.0).contains(&z) || !a.is_finite() || !b.is_finite() {
        return Err(SpecFunError::Domain {
            what: "gauss_2f1 requires c > 0 and 0 <= z < 1",
        });
    }
    if z == 0.0 {
        return Ok(SeriesEval {
            value: 1.0,
            terms_used: 1,
            achieved_rel_tol: 0.0,
        });
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..ctrl.max_terms {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
        let rel = term.abs() / sum.abs();
        if rel <= ctrl.rel_tol {
            return Ok(SeriesEval {
                value: sum,
                terms_used: k + 2,
                achieved_rel_tol: rel,
            });
        }
    }
    Err(SpecFunError::NotConverged {
        partial: sum,
        terms: ctrl.max_terms,
    })
}

/// Confluent hypergeometric ₁F₁(a; b; z) = Σₖ (a)ₖ/(b)ₖ · zᵏ/k!.
///
/// Requires b > 0 and z ≥ 0 (the only regime this crate uses; negative z
/// would need Kummer's transformation to stay accurate).
pub fn confluent_1f1(
    a: f64,
    b: f64,
    z: f64,
    ctrl: &SeriesControl,
) -> Result<SeriesEval, SpecFunError> {
    if !(b > 0.0) || !(z >= 0.0) || !z.is_finite() || !a.is_finite() {
        return Err(SpecFunError::Domain {
            what: "confluent_1f1 requires b > 0 and finite z >= 0",
        });
    }
    if z == 0.0 {
        return Ok(SeriesEval {
            value: 1.0,
            terms_used: 1,
            achieved_rel_tol: 0.0,
        });
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..ctrl.max_terms {
        let kf = k as f64;
        term *= (a + kf) / ((b + kf) * (kf + 1.0)) * z;
        sum += term;
        let rel = term.abs() / sum.abs();
        // Terms can grow before the factorial wins; require the tail test
        // only once the term is shrinking.
        if rel <= ctrl.rel_tol && kf + 1.0 > z {
            return Ok(SeriesEval {
                value: sum,
                terms_used: k + 2,
                achieved_rel_tol: rel,
            });
        }
    }
    Err(SpecFunError::NotConverged {
        partial: sum,
        terms: ctrl.max_terms,
    })
}
