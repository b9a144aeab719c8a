//! Selection gain from pruning low-energy constellation points.
//!
//! A point whose squared norm falls below n·E is removed (the feedback
//! link tells the transmitter which patterns those are). This module
//! carries the closed-form SNR gain γ_c, the removed fraction and the
//! extra-mirror count δ that restores the rate, the conditional
//! error-probability approximation chain with its quadrature oracle, and
//! the Monte-Carlo gain measurement that checks γ_c end to end.
//!
//! Sign conventions: the removed fraction is F(nE; n) — the lower tail,
//! points *below* the threshold — and δ = −log₂(1 − F) ≥ 0 so that
//! "additional mirrors" is nonnegative.

use crate::analysis::pep_quadrature;
use crate::constellation::{ml_detect_scaled, transmit_into, Constellation, SnrSpec};
use crate::rng::{substream, Purpose, RngSpec};
use crate::sim::{
    least_squares_slope, mc_error_counts, simulate_ser_detailed, DetailedEstimate, SimError,
};
use crate::specfun::{
    chi2_cdf, confluent_1f1, ln_upper_incomplete_gamma, regularized_gamma_q, SeriesControl,
    SpecFunError,
};
use rand::Rng;

/// Energy-pruning policy: points with ‖g‖² < n·E are removed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionSpec {
    /// Normalized per-dimension energy threshold.
    pub energy_threshold: f64,
    /// Real receive dimensions n.
    pub dims: u32,
}

/// Analytic summary of one pruning policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionReport {
    /// Linear SNR gain γ_c ≥ 1.
    pub gamma_c: f64,
    pub gamma_c_db: f64,
    /// Fraction of points removed, F(nE; n) ∈ [0, 1).
    pub removed_fraction: f64,
    /// Average extra RF mirrors δ = −log₂(1 − F) to hold the rate.
    pub extra_mirrors: f64,
}

fn check_en(energy_threshold: f64, dims: u32) -> Result<(), SpecFunError> {
    if !(energy_threshold > 0.0) || !energy_threshold.is_finite() {
        return Err(SpecFunError::Domain {
            what: "selection requires E > 0",
        });
    }
    if dims < 2 || dims % 2 != 0 {
        return Err(SpecFunError::Domain {
            what: "selection requires even n >= 2",
        });
    }
    Ok(())
}

/// SNR gain from pruning: γ_c = (Γ(n/2, nE/2) / Γ(n/2, nE))^{2/n},
/// evaluated through log-space gamma ratios so large thresholds cannot
/// underflow.
pub fn selection_gain_analytic(energy_threshold: f64, dims: u32) -> Result<f64, SpecFunError> {
    check_en(energy_threshold, dims)?;
    let a = dims as f64 / 2.0;
    let ne = dims as f64 * energy_threshold;
    let ln_ratio = ln_upper_incomplete_gamma(a, ne / 2.0)? - ln_upper_incomplete_gamma(a, ne)?;
    Ok((2.0 / dims as f64 * ln_ratio).exp())
}

/// Fraction of constellation points the policy removes: the chi-squared
/// probability F(nE; n) that a point's energy falls below n·E.
pub fn removed_fraction(energy_threshold: f64, dims: u32) -> Result<f64, SpecFunError> {
    check_en(energy_threshold, dims)?;
    chi2_cdf(dims as f64 * energy_threshold, dims)
}

/// Average additional RF mirrors to keep the rate after pruning:
/// δ = −log₂(1 − F(nE; n)) ≥ 0.
pub fn extra_mirrors(energy_threshold: f64, dims: u32) -> Result<f64, SpecFunError> {
    check_en(energy_threshold, dims)?;
    // Survival probability straight from the regularized upper gamma;
    // no 1 − F cancellation.
    let sf = regularized_gamma_q(dims as f64 / 2.0, dims as f64 * energy_threshold / 2.0)?;
    if sf <= 0.0 {
        return Err(SpecFunError::Domain {
            what: "threshold removes every point",
        });
    }
    Ok(-sf.log2())
}

/// Full analytic report for one (E, n).
pub fn selection_report(energy_threshold: f64, dims: u32) -> Result<SelectionReport, SpecFunError> {
    let gamma_c = selection_gain_analytic(energy_threshold, dims)?;
    Ok(SelectionReport {
        gamma_c,
        gamma_c_db: 10.0 * gamma_c.log10(),
        removed_fraction: removed_fraction(energy_threshold, dims)?,
        extra_mirrors: extra_mirrors(energy_threshold, dims)?,
    })
}

/// Final high-SNR approximation of the pairwise error probability given
/// the transmitted point's energy λ:
/// P_e(λ) ≈ e^{−λ/2} (1 + snr/4)^{−n/2} / √(2πn).
pub fn pe_given_energy(lambda: f64, snr: f64, dims: u32) -> Result<f64, SpecFunError> {
    check_lambda_snr(lambda, snr, dims)?;
    let nf = dims as f64;
    Ok((-lambda / 2.0).exp() * (1.0 + snr / 4.0).powf(-nf / 2.0)
        / (2.0 * std::f64::consts::PI * nf).sqrt())
}

/// Intermediate form that keeps the confluent-hypergeometric factor the
/// final approximation drops:
/// P_e(λ) ≈ e^{−λ/2}(1+snr/4)^{−n/2}/√(2πn) · ₁F₁((n+1)/2; (n+2)/2; λ/(2(1+snr/4))).
///
/// Exposed so the size of the dropped factor can be measured directly.
pub fn pe_given_energy_hyp(lambda: f64, snr: f64, dims: u32) -> Result<f64, SpecFunError> {
    check_lambda_snr(lambda, snr, dims)?;
    let nf = dims as f64;
    let z = lambda / (2.0 * (1.0 + snr / 4.0));
    let hyp = confluent_1f1(
        (nf + 1.0) / 2.0,
        (nf + 2.0) / 2.0,
        z,
        &SeriesControl::default(),
    )?;
    Ok(pe_given_energy(lambda, snr, dims)? * hyp.value)
}

/// Exact conditional pairwise error probability by quadrature:
/// ∫ Q(√(snr·z/4)) f(z; n, λ) dz, the noncentral chi-squared average.
///
/// Evaluated as the Poisson mixture of central integrals — the same
/// exchange the analysis itself makes — with the mixture tail truncated
/// below 1e-12 and each integral solved to 1e-10, i.e. an overall
/// absolute tolerance comfortably inside 1e-9. This is the oracle the
/// two approximations above are judged against.
pub fn pe_given_energy_oracle(lambda: f64, snr: f64, dims: u32) -> Result<f64, SpecFunError> {
    check_lambda_snr(lambda, snr, dims)?;
    if !(lambda >= 0.0) {
        return Err(SpecFunError::Domain {
            what: "lambda must be >= 0",
        });
    }
    // ∫Q(√(snr·z/4)) f(z; k) dz is the pairwise integral at c = snr/4,
    // i.e. pep_quadrature evaluated at snr/2.
    let half = lambda / 2.0;
    let mut weight = (-half).exp();
    let mut covered = 0.0;
    let mut sum = 0.0;
    for i in 0..10_000u32 {
        if weight > 0.0 {
            sum += weight * pep_quadrature(snr / 2.0, dims + 2 * i)?.value;
        }
        covered += weight;
        // The remaining Poisson mass bounds the truncated contribution
        // by its 0.5 maximum.
        if i as f64 >= half && (1.0 - covered) * 0.5 < 1e-12 {
            return Ok(sum);
        }
        weight *= half / (i as f64 + 1.0);
    }
    Err(SpecFunError::NotConverged {
        partial: sum,
        terms: 10_000,
    })
}

fn check_lambda_snr(lambda: f64, snr: f64, dims: u32) -> Result<(), SpecFunError> {
    if !(snr > 2.0) || !snr.is_finite() {
        return Err(SpecFunError::Domain {
            what: "high-SNR form requires snr > 2",
        });
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(SpecFunError::Domain {
            what: "requires lambda >= 0",
        });
    }
    if dims < 2 || dims % 2 != 0 {
        return Err(SpecFunError::Domain {
            what: "requires even n >= 2",
        });
    }
    Ok(())
}

/// Average error probability after pruning, the closed-form chain tail:
/// P_e(E) ≈ Γ(n/2, nE)/Γ(n/2, nE/2) · (snr/2)^{−n/2} / √(2πn).
pub fn pe_after_pruning(energy_threshold: f64, snr: f64, dims: u32) -> Result<f64, SpecFunError> {
    check_en(energy_threshold, dims)?;
    if !(snr > 2.0) {
        return Err(SpecFunError::Domain {
            what: "high-SNR form requires snr > 2",
        });
    }
    let a = dims as f64 / 2.0;
    let ne = dims as f64 * energy_threshold;
    let ln_ratio = ln_upper_incomplete_gamma(a, ne)? - ln_upper_incomplete_gamma(a, ne / 2.0)?;
    let nf = dims as f64;
    Ok((ln_ratio - nf / 2.0 * (snr / 2.0).ln()).exp() / (2.0 * std::f64::consts::PI * nf).sqrt())
}

/// Outcome of the Monte-Carlo selection-gain measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionGainResult {
    /// Measured SNR gain at the target error rate, in dB.
    pub gain_db: f64,
    pub snr_db_at_target_baseline: f64,
    pub snr_db_at_target_pruned: f64,
    /// Constellation draws rejected for leaving fewer than 2 survivors.
    pub redrawn_ensembles: u64,
    /// (linear snr, estimate) pairs for the unpruned system.
    pub baseline_curve: Vec<(f64, DetailedEstimate)>,
    /// (linear snr, estimate) pairs for the pruned system.
    pub pruned_curve: Vec<(f64, DetailedEstimate)>,
}

/// Simulates SER curves with and without pruning on the given linear-snr
/// grid, locates the SNR achieving `target_ser` on each curve by log-log
/// interpolation, and returns the dB difference.
///
/// The pruned system keeps M fixed and draws messages uniformly over the
/// survivors, while the detector still scores all M hypotheses — the
/// analysis averages the competing point over the unconditioned
/// ensemble, so only the transmit side is conditioned. Ensembles where
/// pruning leaves fewer than 2 points are redrawn (and counted). Both
/// curves share constellation substreams, so the comparison is paired.
#[allow(clippy::too_many_arguments)]
pub fn simulate_selection_gain(
    dims: usize,
    m_count: usize,
    energy_threshold: f64,
    target_ser: f64,
    snr_grid: &[f64],
    trials_per_ensemble: u64,
    ensembles: u64,
    rng: &RngSpec,
) -> Result<SelectionGainResult, SimError> {
    if !(target_ser > 0.0 && target_ser < 1.0) {
        return Err(SimError::BadInput("target_ser must be in (0, 1)"));
    }
    if snr_grid.len() < 2 || snr_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SimError::BadInput(
            "snr grid must be increasing with >= 2 points",
        ));
    }
    let mut baseline_curve = Vec::with_capacity(snr_grid.len());
    let mut pruned_curve = Vec::with_capacity(snr_grid.len());
    let mut redrawn_total = 0u64;
    for &snr_lin in snr_grid {
        let snr = SnrSpec::new(snr_lin).map_err(SimError::Model)?;
        let base = simulate_ser_detailed(m_count, dims, &snr, trials_per_ensemble, ensembles, rng)?;
        let (pruned, redrawn) = simulate_ser_pruned(
            m_count,
            dims,
            energy_threshold,
            &snr,
            trials_per_ensemble,
            ensembles,
            rng,
        )?;
        redrawn_total += redrawn;
        baseline_curve.push((snr_lin, base));
        pruned_curve.push((snr_lin, pruned));
    }
    let base_at = snr_at_target(&baseline_curve, target_ser)?;
    let pruned_at = snr_at_target(&pruned_curve, target_ser)?;
    Ok(SelectionGainResult {
        gain_db: base_at - pruned_at,
        snr_db_at_target_baseline: base_at,
        snr_db_at_target_pruned: pruned_at,
        redrawn_ensembles: redrawn_total,
        baseline_curve,
        pruned_curve,
    })
}

/// SER of the pruned system. Returns (estimate, redrawn ensembles).
pub fn simulate_ser_pruned(
    m_count: usize,
    dims: usize,
    energy_threshold: f64,
    snr: &SnrSpec,
    trials_per_ensemble: u64,
    ensembles: u64,
    rng: &RngSpec,
) -> Result<(DetailedEstimate, u64), SimError> {
    if trials_per_ensemble == 0 || ensembles == 0 {
        return Err(SimError::BadInput("trials and ensembles must be >= 1"));
    }
    Constellation::sample(m_count, dims, rng, 0)?;
    let sqrt_snr = snr.snr().sqrt();
    let threshold = dims as f64 * energy_threshold;
    // Deterministic redraw: ensemble e uses the first attempt index that
    // yields >= 2 survivors, identically in every block and worker.
    let survivors_for = |e: u64| -> (Constellation, Vec<usize>, u64) {
        let mut attempt = 0u64;
        loop {
            let c = Constellation::sample_attempt(m_count, dims, rng, e, attempt)
                .expect("checked shape");
            let survivors: Vec<usize> =
                (0..m_count).filter(|&m| c.energy(m) >= threshold).collect();
            if survivors.len() >= 2 {
                return (c, survivors, attempt);
            }
            attempt += 1;
            assert!(
                attempt < 10_000,
                "threshold leaves < 2 survivors in every draw"
            );
        }
    };
    let per_ensemble = mc_error_counts(ensembles, trials_per_ensemble, |e, b, len| {
        let (constellation, survivors, _) = survivors_for(e);
        let mut src = substream(rng, Purpose::Trials, e, b);
        let mut y = vec![0.0; dims];
        let mut errors = 0u64;
        for _ in 0..len {
            let m = survivors[src.gen_range(0..survivors.len())];
            transmit_into(&constellation, m, sqrt_snr, 1.0, &mut src, &mut y);
            // Full-hypothesis detection: pruning conditions the transmit
            // side only; deciding for a pruned row is an error.
            if ml_detect_scaled(&constellation, &y, sqrt_snr) != m {
                errors += 1;
            }
        }
        errors
    });
    // Redraw count, tallied once per ensemble (not per block).
    let redrawn: u64 = (0..ensembles).map(|e| survivors_for(e).2).sum();
    Ok((
        DetailedEstimate::new(per_ensemble, trials_per_ensemble),
        redrawn,
    ))
}

/// Log-log interpolated snr (in dB) where the curve crosses the target
/// rate. The curve must bracket the target.
fn snr_at_target(curve: &[(f64, DetailedEstimate)], target: f64) -> Result<f64, SimError> {
    let pts: Vec<(f64, f64)> = curve
        .iter()
        .filter(|(_, est)| est.estimate.error_rate > 0.0)
        .map(|(s, est)| (s.log10(), est.estimate.error_rate.log10()))
        .collect();
    let lt = target.log10();
    for w in pts.windows(2) {
        let (x0, y0) = w[0];
        let (x1, y1) = w[1];
        if (y0 >= lt && lt >= y1) || (y1 >= lt && lt >= y0) {
            let frac = if (y1 - y0).abs() < 1e-300 {
                0.5
            } else {
                (lt - y0) / (y1 - y0)
            };
            return Ok(10.0 * (x0 + frac * (x1 - x0)));
        }
    }
    Err(SimError::InsufficientData(
        "target error rate is outside the simulated range",
    ))
}

/// Least-squares slope diagnostic shared with the CLI (log10-rate vs
/// log10-snr over an explicit window).
pub fn window_slope(curve: &[(f64, f64)]) -> Result<f64, SimError> {
    if curve.len() < 2 || curve.iter().any(|&(_, p)| !(p > 0.0)) {
        return Err(SimError::InsufficientData(
            "slope window needs >= 2 positive rates",
        ));
    }
    let pts: Vec<(f64, f64)> = curve.iter().map(|&(s, p)| (s.log10(), p.log10())).collect();
    Ok(least_squares_slope(&pts))
}
