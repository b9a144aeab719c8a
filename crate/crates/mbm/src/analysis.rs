//! Uncoded analytic machinery: exact ensemble-averaged pairwise error
//! probability, its hypergeometric form, upper and union bounds, the
//! high-SNR approximation, and diversity–multiplexing trade-off curves.
//!
//! Three independent routes to the same pairwise quantity — the
//! binomial-sum closed form, the ₂F₁ form, and direct quadrature of the
//! defining integral — cross-check each other to 1e-8 across the working
//! grid; the quadrature is the oracle.

use crate::specfun::{
    chi2_pdf, chi2_tail_cutoff, gauss_2f1, integrate, ln_gamma, q_function, SeriesControl,
    SpecFunError,
};

/// How a pairwise error probability value was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PepMethod {
    ClosedForm,
    Hypergeometric,
    Quadrature,
    Bound,
}

/// A pairwise error probability with provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PepResult {
    pub value: f64,
    pub method: PepMethod,
    /// Series terms or integrand evaluations spent, 0 for pure closed forms.
    pub terms_used: usize,
}

/// A point on a diversity–multiplexing trade-off curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DmtPoint {
    /// Spatial multiplexing gain.
    pub r: f64,
    /// Diversity gain.
    pub d: f64,
}

fn check_c(c: f64) -> Result<(), SpecFunError> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(SpecFunError::Domain {
            what: "requires c > 0",
        });
    }
    Ok(())
}

fn check_dims(n: u32) -> Result<(), SpecFunError> {
    if n < 2 || n % 2 != 0 {
        return Err(SpecFunError::Domain {
            what: "requires even n >= 2",
        });
    }
    Ok(())
}

/// P(c) = ½(1 − √(c/(1+c))), in the cancellation-free form
/// 1/(2(1+c)(1+√(c/(1+c)))).
pub fn pep_p_of_c(c: f64) -> Result<f64, SpecFunError> {
    check_c(c)?;
    let s = (c / (1.0 + c)).sqrt();
    Ok(0.5 / ((1.0 + c) * (1.0 + s)))
}

/// Exact ensemble-averaged pairwise error probability:
/// [P(c)]^{n/2} Σ_{k=0}^{n/2−1} C(n/2−1+k, k) [1−P(c)]^k.
///
/// Evaluated in log space so large-n sweeps neither overflow the
/// binomials nor underflow the power.
pub fn pep_exact(c: f64, n: u32) -> Result<PepResult, SpecFunError> {
    check_c(c)?;
    check_dims(n)?;
    let m = (n / 2) as usize;
    let p = pep_p_of_c(c)?;
    let q = 1.0 - p;
    // Terms grow by at most (m+k)/(k+1) · q < 4; rescale whenever the
    // running sum gets large and carry the log.
    let mut term = 1.0f64;
    let mut sum = 0.0f64;
    let mut log_scale = 0.0f64;
    for k in 0..m {
        sum += term;
        if sum > 1e250 {
            log_scale += sum.ln();
            term /= sum;
            sum = 1.0;
        }
        term *= (m + k) as f64 / (k + 1) as f64 * q;
    }
    let ln_value = (m as f64) * p.ln() + log_scale + sum.ln();
    Ok(PepResult {
        value: ln_value.exp(),
        method: PepMethod::ClosedForm,
        terms_used: m,
    })
}

/// The defining integral ∫₀^∞ Q(√(snr·x/2)) f(x; n) dx by adaptive
/// quadrature to 1e-10 absolute, on [0, x_max] with the chi-squared tail
/// beyond x_max certified below 1e-14. Serves as the independent oracle
/// for every closed form.
pub fn pep_quadrature(snr: f64, n: u32) -> Result<PepResult, SpecFunError> {
    if !(snr > 0.0) || !snr.is_finite() {
        return Err(SpecFunError::Domain {
            what: "pep_quadrature requires snr > 0",
        });
    }
    check_dims(n)?;
    let cutoff = chi2_tail_cutoff(n, 1e-14)?;
    let integrand = |x: f64| {
        let q = q_function((snr * x / 2.0).sqrt()).expect("finite argument");
        q * chi2_pdf(x, n).expect("x > 0")
    };
    let r = integrate(&integrand, 0.0, cutoff, 1e-10)?;
    Ok(PepResult {
        value: r.value,
        method: PepMethod::Quadrature,
        terms_used: r.evaluations,
    })
}

/// Alternative closed form via the Gauss hypergeometric function:
/// √(c/π) Γ((n+1)/2) / (2 (1+c)^{(n+1)/2} Γ((n+2)/2)) ·
/// ₂F₁(1, (n+1)/2; (n+2)/2; 1/(1+c)).
pub fn pep_hypergeometric(c: f64, n: u32) -> Result<PepResult, SpecFunError> {
    check_c(c)?;
    check_dims(n)?;
    let nf = n as f64;
    let z = 1.0 / (1.0 + c);
    let series = gauss_2f1(
        1.0,
        (nf + 1.0) / 2.0,
        (nf + 2.0) / 2.0,
        z,
        &SeriesControl::default(),
    )?;
    let ln_prefactor = 0.5 * (c / std::f64::consts::PI).ln() + ln_gamma((nf + 1.0) / 2.0)?
        - ln_gamma((nf + 2.0) / 2.0)?
        - std::f64::consts::LN_2
        - (nf + 1.0) / 2.0 * (1.0 + c).ln();
    Ok(PepResult {
        value: ln_prefactor.exp() * series.value,
        method: PepMethod::Hypergeometric,
        terms_used: series.terms_used,
    })
}

/// Closed-form upper bound on the pairwise error probability:
/// Γ((n+1)/2)/(2√π Γ((n+2)/2)) · (1+c)^{−n/2} · (1 + (n+1)/((n+2)c)).
///
/// Derived for large c; it provably dominates the exact value for
/// c ≥ 0.5 on the working grid, and is reported (not asserted) below.
pub fn pep_upper_bound(c: f64, n: u32) -> Result<PepResult, SpecFunError> {
    check_c(c)?;
    check_dims(n)?;
    let nf = n as f64;
    let ln_g = ln_gamma((nf + 1.0) / 2.0)? - ln_gamma((nf + 2.0) / 2.0)?;
    let ln_core =
        ln_g - std::f64::consts::LN_2 - 0.5 * std::f64::consts::PI.ln() - nf / 2.0 * (1.0 + c).ln();
    let correction = 1.0 + (nf + 1.0) / ((nf + 2.0) * c);
    Ok(PepResult {
        value: ln_core.exp() * correction,
        method: PepMethod::Bound,
        terms_used: 0,
    })
}

/// Union bound on the ensemble-averaged symbol error probability with M
/// messages: (M−1) times the pairwise upper bound, clamped to 1.
pub fn union_bound_ser(m_count: u64, c: f64, n: u32) -> Result<f64, SpecFunError> {
    if m_count == 0 {
        return Err(SpecFunError::Domain {
            what: "union_bound_ser requires M >= 1",
        });
    }
    if m_count == 1 {
        return Ok(0.0);
    }
    let pep = pep_upper_bound(c, n)?.value;
    Ok(((m_count - 1) as f64 * pep).min(1.0))
}

/// High-SNR approximation of the error probability at multiplexing gain
/// r (message count M = snr^r):
/// 2^{n/2} Γ((n+1)/2)/(√π Γ((n+2)/2)) · snr^{−(n/2 − r)}.
pub fn high_snr_ser_approx(snr: f64, n: u32, r: f64) -> Result<f64, SpecFunError> {
    if !(snr > 2.0) {
        return Err(SpecFunError::Domain {
            what: "high_snr_ser_approx requires snr > 2",
        });
    }
    check_dims(n)?;
    if !(0.0..=n as f64 / 2.0).contains(&r) {
        return Err(SpecFunError::Domain {
            what: "high_snr_ser_approx requires 0 <= r <= n/2",
        });
    }
    let nf = n as f64;
    let ln_v = nf / 2.0 * std::f64::consts::LN_2 + ln_gamma((nf + 1.0) / 2.0)?
        - ln_gamma((nf + 2.0) / 2.0)?
        - 0.5 * std::f64::consts::PI.ln()
        - (nf / 2.0 - r) * snr.ln();
    Ok(ln_v.exp())
}

/// Uncoded trade-off: d = N_r − r.
pub fn dmt_uncoded(n_r: u32, r: f64) -> Result<DmtPoint, SpecFunError> {
    if !(0.0..=n_r as f64).contains(&r) {
        return Err(SpecFunError::Domain {
            what: "dmt_uncoded requires 0 <= r <= N_r",
        });
    }
    Ok(DmtPoint {
        r,
        d: n_r as f64 - r,
    })
}

/// MDS-coded trade-off: d = D·N_r − r/τ, for code minimum distance D and
/// dimensionless rate τ. Accepts any r/τ that keeps d nonnegative; the
/// stricter r/τ < N_r achievability condition belongs to the word-error
/// bound, not to this line.
pub fn dmt_coded(n_r: u32, r: f64, min_distance: u32, tau: f64) -> Result<DmtPoint, SpecFunError> {
    if min_distance == 0 || !(tau > 0.0 && tau <= 1.0) {
        return Err(SpecFunError::Domain {
            what: "dmt_coded requires D >= 1 and 0 < tau <= 1",
        });
    }
    let d = min_distance as f64 * n_r as f64 - r / tau;
    if !(r >= 0.0) || d < 0.0 {
        return Err(SpecFunError::Domain {
            what: "dmt_coded requires 0 <= r/tau <= D*N_r",
        });
    }
    Ok(DmtPoint { r, d })
}

/// Optimal legacy-MIMO trade-off: piecewise-linear through the corners
/// d(k) = (N_t − k)(N_r − k) at integer k.
pub fn dmt_mimo_legacy(n_t: u32, n_r: u32, r: f64) -> Result<DmtPoint, SpecFunError> {
    let max_r = n_t.min(n_r) as f64;
    if !(0.0..=max_r).contains(&r) {
        return Err(SpecFunError::Domain {
            what: "dmt_mimo_legacy requires 0 <= r <= min(N_t, N_r)",
        });
    }
    let corner = |k: f64| (n_t as f64 - k) * (n_r as f64 - k);
    let k = r.floor();
    let d = if k >= max_r {
        corner(max_r)
    } else {
        let frac = r - k;
        (1.0 - frac) * corner(k) + frac * corner(k + 1.0)
    };
    Ok(DmtPoint { r, d })
}
