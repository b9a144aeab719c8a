//! Uncoded Monte-Carlo symbol-error-rate estimation and slope fitting.
//!
//! Trials are partitioned into fixed blocks; each (ensemble, block) unit
//! owns a substream and runs independently, and the integer error counts
//! reduce associatively, so the estimate is bit-identical for any worker
//! count. Error rates average over independent constellation draws
//! (ensemble averaging).

use crate::constellation::{ml_detect_scaled, transmit_into, Constellation, ModelError, SnrSpec};
use crate::rng::{substream, Purpose, RngSpec, TRIAL_BLOCK};
use core::fmt;
use rand::Rng;
use rayon::prelude::*;

/// Monte-Carlo error-rate estimate with its bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    /// errors / trials.
    pub error_rate: f64,
    /// Total trials across all ensembles.
    pub trials: u64,
    /// Total errors across all ensembles.
    pub errors: u64,
    /// Number of independent constellation realizations averaged.
    pub ensembles: u64,
    /// Binomial normal-approximation 95% half-width.
    pub ci95_halfwidth: f64,
}

impl SimEstimate {
    pub(crate) fn from_counts(errors: u64, trials: u64, ensembles: u64) -> Self {
        let p = errors as f64 / trials as f64;
        let ci = 1.96 * (p * (1.0 - p) / trials as f64).sqrt();
        SimEstimate {
            error_rate: p,
            trials,
            errors,
            ensembles,
            ci95_halfwidth: ci,
        }
    }
}

/// A [`SimEstimate`] together with its per-ensemble error counts.
///
/// Ensemble averaging adds a between-ensemble variance component that
/// the binomial interval cannot see; the per-ensemble counts let callers
/// form the full confidence interval for the mean.
#[derive(Debug, Clone, PartialEq)]
pub struct DetailedEstimate {
    pub estimate: SimEstimate,
    pub per_ensemble_errors: Vec<u64>,
    pub trials_per_ensemble: u64,
}

impl DetailedEstimate {
    pub(crate) fn new(per_ensemble_errors: Vec<u64>, trials_per_ensemble: u64) -> Self {
        let errors = per_ensemble_errors.iter().sum();
        let ensembles = per_ensemble_errors.len() as u64;
        DetailedEstimate {
            estimate: SimEstimate::from_counts(errors, trials_per_ensemble * ensembles, ensembles),
            per_ensemble_errors,
            trials_per_ensemble,
        }
    }

    /// 95% half-width for the ensemble-averaged rate, from the spread of
    /// the per-ensemble rates (the dominant term whenever constellation
    /// realizations matter). Zero for a single ensemble.
    pub fn ensemble_ci95(&self) -> f64 {
        let r = self.per_ensemble_errors.len();
        if r < 2 {
            return 0.0;
        }
        let t = self.trials_per_ensemble as f64;
        let rates: Vec<f64> = self
            .per_ensemble_errors
            .iter()
            .map(|&e| e as f64 / t)
            .collect();
        let mean = rates.iter().sum::<f64>() / r as f64;
        let var = rates.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (r as f64 - 1.0);
        1.96 * (var / r as f64).sqrt()
    }

    /// The larger of the binomial and between-ensemble 95% half-widths.
    pub fn ci95_total(&self) -> f64 {
        self.estimate.ci95_halfwidth.max(self.ensemble_ci95())
    }
}

/// Errors from simulation drivers and curve fitting.
#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    BadInput(&'static str),
    /// A slope window contained zero error rates (or too few points).
    InsufficientData(&'static str),
    Model(ModelError),
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::BadInput(what) => write!(f, "bad input: {what}"),
            SimError::InsufficientData(what) => write!(f, "insufficient data: {what}"),
            SimError::Model(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for SimError {}

impl From<ModelError> for SimError {
    fn from(e: ModelError) -> Self {
        SimError::Model(e)
    }
}

/// Deterministic parallel reduction: runs `unit` over every
/// (ensemble, block) pair and returns per-ensemble error counts.
/// `unit(ensemble, block_index, trials_in_block) -> errors`.
pub(crate) fn mc_error_counts<U>(ensembles: u64, trials_per_ensemble: u64, unit: U) -> Vec<u64>
where
    U: Fn(u64, u64, u64) -> u64 + Sync,
{
    let blocks_per_ensemble = trials_per_ensemble.div_ceil(TRIAL_BLOCK);
    let units: Vec<(u64, u64)> = (0..ensembles)
        .flat_map(|e| (0..blocks_per_ensemble).map(move |b| (e, b)))
        .collect();
    let partials: Vec<u64> = units
        .par_iter()
        .map(|&(e, b)| {
            let len = if b == blocks_per_ensemble - 1 {
                trials_per_ensemble - b * TRIAL_BLOCK
            } else {
                TRIAL_BLOCK
            };
            unit(e, b, len)
        })
        .collect();
    let mut per_ensemble = vec![0u64; ensembles as usize];
    for (i, &(e, _)) in units.iter().enumerate() {
        per_ensemble[e as usize] += partials[i];
    }
    per_ensemble
}

/// Symbol error rate of uncoded MBM under ML detection, averaged over
/// `ensembles` independent constellation draws with uniform messages.
pub fn simulate_ser(
    m_count: usize,
    dims: usize,
    snr: &SnrSpec,
    trials_per_ensemble: u64,
    ensembles: u64,
    rng: &RngSpec,
) -> Result<SimEstimate, SimError> {
    Ok(simulate_ser_detailed(m_count, dims, snr, trials_per_ensemble, ensembles, rng)?.estimate)
}

/// As [`simulate_ser`], keeping the per-ensemble error counts.
pub fn simulate_ser_detailed(
    m_count: usize,
    dims: usize,
    snr: &SnrSpec,
    trials_per_ensemble: u64,
    ensembles: u64,
    rng: &RngSpec,
) -> Result<DetailedEstimate, SimError> {
    if trials_per_ensemble == 0 || ensembles == 0 {
        return Err(SimError::BadInput("trials and ensembles must be >= 1"));
    }
    // Shape check up front so workers cannot fail.
    Constellation::sample(m_count, dims, rng, 0)?;
    let sqrt_snr = snr.snr().sqrt();
    let per_ensemble = mc_error_counts(ensembles, trials_per_ensemble, |e, b, len| {
        let constellation = Constellation::sample(m_count, dims, rng, e).expect("checked shape");
        let mut src = substream(rng, Purpose::Trials, e, b);
        let mut y = vec![0.0; dims];
        let mut errors = 0u64;
        for _ in 0..len {
            let m = src.gen_range(0..m_count);
            transmit_into(&constellation, m, sqrt_snr, 1.0, &mut src, &mut y);
            if ml_detect_scaled(&constellation, &y, sqrt_snr) != m {
                errors += 1;
            }
        }
        errors
    });
    Ok(DetailedEstimate::new(per_ensemble, trials_per_ensemble))
}

/// Zero-noise sanity variant used by tests: identical structure to
/// [`simulate_ser`] with the noise amplitude forced to zero.
pub fn simulate_ser_noiseless(
    m_count: usize,
    dims: usize,
    snr: &SnrSpec,
    trials_per_ensemble: u64,
    ensembles: u64,
    rng: &RngSpec,
) -> Result<SimEstimate, SimError> {
    Constellation::sample(m_count, dims, rng, 0)?;
    let sqrt_snr = snr.snr().sqrt();
    let per_ensemble = mc_error_counts(ensembles, trials_per_ensemble, |e, b, len| {
        let constellation = Constellation::sample(m_count, dims, rng, e).expect("checked shape");
        let mut src = substream(rng, Purpose::Trials, e, b);
        let mut y = vec![0.0; dims];
        let mut errors = 0u64;
        for _ in 0..len {
            let m = src.gen_range(0..m_count);
            transmit_into(&constellation, m, sqrt_snr, 0.0, &mut src, &mut y);
            if ml_detect_scaled(&constellation, &y, sqrt_snr) != m {
                errors += 1;
            }
        }
        errors
    });
    let errors = per_ensemble.iter().sum();
    Ok(SimEstimate::from_counts(
        errors,
        trials_per_ensemble * ensembles,
        ensembles,
    ))
}

/// Least-squares slope of log10(error_rate) against log10(snr) over the
/// highest-SNR half of the curve; the negated value estimates the
/// diversity gain d.
///
/// Points must be (linear snr, error rate) with strictly increasing snr.
/// Any zero rate inside the fit window is an error: a vanished count
/// carries no slope information.
pub fn estimate_diversity_slope(curve: &[(f64, f64)]) -> Result<f64, SimError> {
    if curve.len() < 4 {
        return Err(SimError::BadInput("need at least 4 curve points"));
    }
    if curve.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(SimError::BadInput("snr values must be strictly increasing"));
    }
    let window = &curve[curve.len() / 2..];
    if window.iter().any(|&(_, p)| !(p > 0.0)) {
        return Err(SimError::InsufficientData(
            "zero error rate inside the fit window",
        ));
    }
    let pts: Vec<(f64, f64)> = window
        .iter()
        .map(|&(s, p)| (s.log10(), p.log10()))
        .collect();
    Ok(least_squares_slope(&pts))
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> RngSpec {
        RngSpec::new(0x5EED, 1)
    }

    #[test]
    fn ser_half_when_points_indistinguishable() {
        // snr -> 0: transmit points collapse, detection is a coin toss
        // among M = 2.
        let snr = SnrSpec::new(1e-9).unwrap();
        let est = simulate_ser(2, 2, &snr, 20_000, 10, &spec()).unwrap();
        assert!((est.error_rate - 0.5).abs() < 0.01, "{}", est.error_rate);
    }

    #[test]
    fn ser_is_deterministic_across_worker_counts() {
        let snr = SnrSpec::new(4.0).unwrap();
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| simulate_ser(8, 4, &snr, 150_000, 7, &spec()).unwrap())
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a, b);
        assert_eq!(a.trials, 150_000 * 7);
    }

    #[test]
    fn two_point_ser_matches_exact_pairwise_probability() {
        // For M = 2 the ensemble-averaged SER is exactly the pairwise
        // probability: 0.146447 at snr = 2 (c = 1). Between-ensemble
        // spread dominates the uncertainty, so judge against the
        // ensemble-aware interval.
        let snr = SnrSpec::new(2.0).unwrap();
        let d = simulate_ser_detailed(2, 2, &snr, 2_500, 4_000, &spec()).unwrap();
        let want = crate::analysis::pep_exact(1.0, 2).unwrap().value;
        assert!((want - 0.146447).abs() < 1e-6);
        let band = 3.0 * d.ci95_total() / 1.96;
        assert!(
            (d.estimate.error_rate - want).abs() <= band,
            "ser {} vs pep {want} (band {band})",
            d.estimate.error_rate
        );
    }

    #[test]
    fn ser_zero_noise_is_error_free() {
        let snr = SnrSpec::new(1.0).unwrap();
        let est = simulate_ser_noiseless(16, 6, &snr, 10_000, 4, &spec()).unwrap();
        assert_eq!(est.errors, 0);
    }

    #[test]
    fn estimate_counts_are_consistent() {
        let snr = SnrSpec::new(2.0).unwrap();
        let est = simulate_ser(4, 4, &snr, 30_000, 3, &spec()).unwrap();
        assert!(est.errors <= est.trials);
        assert_eq!(est.error_rate, est.errors as f64 / est.trials as f64);
        assert!(est.ci95_halfwidth > 0.0);
        assert_eq!(est.ensembles, 3);
    }

    #[test]
    fn slope_recovers_exact_power_laws() {
        let curve: Vec<(f64, f64)> = (1..=8)
            .map(|i| {
                let s = 10.0 * i as f64;
                (s, s.powi(-3))
            })
            .collect();
        let slope = estimate_diversity_slope(&curve).unwrap();
        assert!((slope + 3.0).abs() < 1e-9, "slope {slope}");

        let curve: Vec<(f64, f64)> = (1..=8)
            .map(|i| {
                let s = 7.0 * i as f64;
                (s, 5.0 * s.powi(-2))
            })
            .collect();
        let slope = estimate_diversity_slope(&curve).unwrap();
        assert!((slope + 2.0).abs() < 1e-9, "prefactor must not matter");
    }

    #[test]
    fn slope_rejects_bad_curves() {
        assert!(matches!(
            estimate_diversity_slope(&[(1.0, 0.1), (2.0, 0.05), (3.0, 0.02)]),
            Err(SimError::BadInput(_))
        ));
        let with_zero = [(1.0, 0.1), (2.0, 0.05), (4.0, 0.0), (8.0, 0.001)];
        assert!(matches!(
            estimate_diversity_slope(&with_zero),
            Err(SimError::InsufficientData(_))
        ));
        let unsorted = [(1.0, 0.1), (3.0, 0.05), (2.0, 0.02), (4.0, 0.01)];
        assert!(matches!(
            estimate_diversity_slope(&unsorted),
            Err(SimError::BadInput(_))
        ));
    }
}
