//! Central and noncentral chi-squared distributions.

use super::gamma::{ln_gamma, regularized_gamma_p, regularized_gamma_q};
use super::{SeriesControl, SpecFunError};

fn check_dof(k: u32) -> Result<(), SpecFunError> {
    if k == 0 {
        return Err(SpecFunError::Domain {
            what: "chi-squared requires k >= 1 degrees of freedom",
        });
    }
    Ok(())
}

/// Chi-squared density f(x; k) = x^{k/2−1} e^{−x/2} / (2^{k/2} Γ(k/2)).
///
/// The k = 1 density diverges at the origin, so x = 0 with k = 1 is a
/// domain error rather than an infinity.
pub fn chi2_pdf(x: f64, k: u32) -> Result<f64, SpecFunError> {
    check_dof(k)?;
    if !(x >= 0.0) || !x.is_finite() {
        return Err(SpecFunError::Domain {
            what: "chi2_pdf requires finite x >= 0",
        });
    }
    let a = k as f64 / 2.0;
    if x == 0.0 {
        return match k {
            1 => Err(SpecFunError::Domain {
                what: "chi2_pdf(0, 1) is a density singularity",
            }),
            2 => Ok(0.5),
            _ => Ok(0.0),
        };
    }
    let ln_pdf = (a - 1.0) * x.ln() - 0.5 * x - a * std::f64::consts::LN_2 - ln_gamma(a)?;
    Ok(ln_pdf.exp())
}

/// Chi-squared CDF F(x; k) = P(k/2, x/2).
pub fn chi2_cdf(x: f64, k: u32) -> Result<f64, SpecFunError> {
    check_dof(k)?;
    if !(x >= 0.0) || !x.is_finite() {
        return Err(SpecFunError::Domain {
            what: "chi2_cdf requires finite x >= 0",
        });
    }
    regularized_gamma_p(k as f64 / 2.0, x / 2.0)
}

/// Chi-squared survival function 1 − F(x; k), computed without the
/// cancellation of forming the CDF first.
pub fn chi2_sf(x: f64, k: u32) -> Result<f64, SpecFunError> {
    check_dof(k)?;
    if !(x >= 0.0) || !x.is_finite() {
        return Err(SpecFunError::Domain {
            what: "chi2_sf requires finite x >= 0",
        });
    }
    regularized_gamma_q(k as f64 / 2.0, x / 2.0)
}

/// Smallest grid point x with tail mass 1 − F(x; k) below `eps`.
///
/// Used to truncate the semi-infinite oracle integrals at a certified
/// cutoff.
pub fn chi2_tail_cutoff(k: u32, eps: f64) -> Result<f64, SpecFunError> {
    check_dof(k)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(SpecFunError::Domain {
            what: "chi2_tail_cutoff requires 0 < eps < 1",
        });
    }
    let mut hi = k as f64 + 10.0;
    while chi2_sf(hi, k)? > eps {
        hi *= 2.0;
        if hi > 1e9 {
            return Err(SpecFunError::NotConverged {
                partial: hi,
                terms: 0,
            });
        }
    }
    Ok(hi)
}

/// Noncentral chi-squared density with k degrees of freedom and
/// noncentrality `lambda`, as the Poisson mixture
/// Σᵢ e^{−λ/2} (λ/2)ⁱ/i! · f(x; k + 2i), truncated per `ctrl`.
///
/// `lambda` = 0 returns the central density exactly (no series).
pub fn noncentral_chi2_pdf(
    x: f64,
    k: u32,
    lambda: f64,
    ctrl: &SeriesControl,
) -> Result<f64, SpecFunError> {
    check_dof(k)?;
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(SpecFunError::Domain {
            what: "noncentral_chi2_pdf requires lambda >= 0",
        });
    }
    if lambda == 0.0 {
        return chi2_pdf(x, k);
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(SpecFunError::Domain {
            what: "noncentral_chi2_pdf requires finite x >= 0",
        });
    }
    if x == 0.0 {
        // Only the i = 0 mixture term is nonzero (or singular) at the origin.
        return Ok((-lambda / 2.0).exp() * chi2_pdf(0.0, k)?);
    }
    let half_lambda = lambda / 2.0;
    let mut weight = (-half_lambda).exp(); // Poisson(i = 0) mass
    let mut sum = 0.0;
    let mode = half_lambda;
    for i in 0..ctrl.max_terms {
        let term = weight * chi2_pdf(x, k + 2 * i as u32)?;
        sum += term;
        // Terms rise toward the Poisson mode before decaying; only trust
        // the tail test beyond it.
        if i as f64 >= mode && term <= ctrl.rel_tol * sum {
            return Ok(sum);
        }
        weight *= half_lambda / (i as f64 + 1.0);
    }
    Err(SpecFunError::NotConverged {
        partial: sum,
        terms: ctrl.max_terms,
    })
}
