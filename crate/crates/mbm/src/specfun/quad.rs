//! Adaptive tanh-sinh quadrature on a finite interval.
//!
//! Double-exponential node decay makes this robust for the smooth
//! chi-squared-weighted integrands here, including the k = 1 endpoint
//! singularity. Nodes and weights come from elementary functions, so
//! there are no tabulated constants to mistype; accuracy is governed by
//! level doubling with a successive-difference error estimate.

use super::SpecFunError;

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    /// Successive-refinement error estimate (conservative for smooth f).
    pub error_estimate: f64,
    pub evaluations: usize,
}

const MAX_LEVEL: u32 = 12;
const FRAC_PI_2: f64 = std::f64::consts::FRAC_PI_2;

/// ∫ₐᵇ f(x) dx to absolute tolerance `abs_tol`.
///
/// The integrand is evaluated strictly inside (a, b); integrable endpoint
/// singularities are fine.
pub fn integrate<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
) -> Result<QuadResult, SpecFunError> {
    if !(a.is_finite() && b.is_finite()) || !(abs_tol > 0.0) {
        return Err(SpecFunError::Domain {
            what: "integrate requires finite bounds and abs_tol > 0",
        });
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
        });
    }
    if a > b {
        let r = integrate(f, b, a, abs_tol)?;
        return Ok(QuadResult {
            value: -r.value,
            ..r
        });
    }

    let half = 0.5 * (b - a);
    let mut evals = 0usize;

    // Contribution of the symmetric node pair at |t|, with x evaluated as
    // an offset from each endpoint so no precision is lost as the nodes
    // crowd the boundary. A side whose node rounds onto its endpoint is
    // dropped individually (its weighted value is below resolution for
    // integrable f); the scan itself only ends when the offset or weight
    // underflows, so no node mass on the live side is silently skipped.
    let mut pair_contribution = |t: f64| -> Option<f64> {
        let u = FRAC_PI_2 * t.sinh();
        let weight = FRAC_PI_2 * t.cosh() / u.cosh().powi(2);
        if weight == 0.0 || !weight.is_finite() {
            return None;
        }
        // 1 - tanh(u) = 2 / (1 + e^{2u})
        let off = half * (2.0 / (1.0 + (2.0 * u).exp()));
        if off == 0.0 {
            return None;
        }
        let x_lo = a + off;
        let x_hi = b - off;
        let mut s = 0.0;
        if x_lo > a {
            evals += 1;
            s += f(x_lo);
        }
        if x_hi < b {
            evals += 1;
            s += f(x_hi);
        }
        Some(weight * s)
    };

    // Level 0, h = 1. The t = 0 node counts once (the pair degenerates).
    let mut h = 1.0;
    let mut node_sum = 0.5 * pair_contribution(0.0).unwrap_or(0.0);
    for j in 1..=64u64 {
        match pair_contribution(j as f64 * h) {
            None => break,
            Some(c) if c.is_finite() => node_sum += c,
            Some(_) => {
                return Err(SpecFunError::Domain {
                    what: "integrand produced a non-finite value",
                })
            }
        }
    }
    let mut value = node_sum * h * half;

    for _level in 1..=MAX_LEVEL {
        h *= 0.5;
        // New nodes sit at odd multiples of the refined step.
        let mut j = 1u64;
        loop {
            match pair_contribution(j as f64 * h) {
                None => break,
                Some(c) if c.is_finite() => node_sum += c,
                Some(_) => {
                    return Err(SpecFunError::Domain {
                        what: "integrand produced a non-finite value",
                    })
                }
            }
            j += 2;
            if j > 1 << 21 {
                break;
            }
        }
        let new_value = node_sum * h * half;
        let error = (new_value - value).abs();
        value = new_value;
        if error <= abs_tol {
            return Ok(QuadResult {
                value,
                error_estimate: error,
                evaluations: evals,
            });
        }
    }
    Err(SpecFunError::NotConverged {
        partial: value,
        terms: evals,
    })
}
