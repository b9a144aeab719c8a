//! MBM constellation, channel, and maximum-likelihood detection.
//!
//! A constellation stores the M normalized gain vectors g_m (unit
//! variance per real dimension); the transmitted point is √snr·g_m and
//! the receiver sees y = √snr·g_m + z with unit-variance noise. Keeping
//! the points normalized and applying √snr at transmit time puts the
//! uncoded and selection analyses under one convention.

use crate::rng::{substream, Purpose, RngSpec};
use core::fmt;
use rand::Rng;
use rand_distr::StandardNormal;

/// Errors from constellation construction and channel use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelError {
    BadDims(&'static str),
    IndexOutOfRange { index: usize, limit: usize },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::BadDims(what) => write!(f, "invalid dimensions: {what}"),
            ModelError::IndexOutOfRange { index, limit } => {
                write!(f, "index {index} out of range (limit {limit})")
            }
        }
    }
}

impl std::error::Error for ModelError {}

/// Linear SNR per real receive dimension, with the derived c = snr/2
/// that the closed forms are written in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrSpec {
    snr: f64,
    c: f64,
}

impl SnrSpec {
    pub fn new(snr: f64) -> Result<Self, ModelError> {
        if !(snr > 0.0) || !snr.is_finite() {
            return Err(ModelError::BadDims("snr must be finite and > 0"));
        }
        Ok(SnrSpec { snr, c: snr / 2.0 })
    }

    pub fn from_db(snr_db: f64) -> Result<Self, ModelError> {
        Self::new(10f64.powf(snr_db / 10.0))
    }

    pub fn snr(&self) -> f64 {
        self.snr
    }

    /// c := snr/2.
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn snr_db(&self) -> f64 {
        10.0 * self.snr.log10()
    }
}

/// M × n matrix of normalized constellation points, one row per message.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    gains: Vec<f64>,
    m_count: usize,
    dims: usize,
}

impl Constellation {
    /// Draw M i.i.d. standard-normal points of dimension n for the given
    /// ensemble index. Same spec + index always yields the same matrix.
    pub fn sample(
        m_count: usize,
        dims: usize,
        rng: &RngSpec,
        ensemble: u64,
    ) -> Result<Self, ModelError> {
        Self::sample_attempt(m_count, dims, rng, ensemble, 0)
    }

    /// As [`Constellation::sample`], with a redraw counter for callers
    /// that must reject certain realizations (selection pruning).
    pub fn sample_attempt(
        m_count: usize,
        dims: usize,
        rng: &RngSpec,
        ensemble: u64,
        attempt: u64,
    ) -> Result<Self, ModelError> {
        check_shape(m_count, dims)?;
        let mut src = substream(rng, Purpose::Constellation, ensemble, attempt);
        let gains = (0..m_count * dims)
            .map(|_| src.sample::<f64, _>(StandardNormal))
            .collect();
        Ok(Constellation {
            gains,
            m_count,
            dims,
        })
    }

    /// Build from explicit rows (tests inject degenerate geometries).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, ModelError> {
        let m_count = rows.len();
        let dims = rows.first().map_or(0, Vec::len);
        check_shape(m_count, dims)?;
        if rows.iter().any(|r| r.len() != dims) {
            return Err(ModelError::BadDims("ragged rows"));
        }
        Ok(Constellation {
            gains: rows.concat(),
            m_count,
            dims,
        })
    }

    pub fn m_count(&self) -> usize {
        self.m_count
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn row(&self, m: usize) -> &[f64] {
        &self.gains[m * self.dims..(m + 1) * self.dims]
    }

    /// Squared norm ‖g_m‖² (the appendix's λ for that point).
    pub fn energy(&self, m: usize) -> f64 {
        self.row(m).iter().map(|g| g * g).sum()
    }
}

fn check_shape(m_count: usize, dims: usize) -> Result<(), ModelError> {
    if m_count < 2 {
        return Err(ModelError::BadDims("need at least M = 2 messages"));
    }
    if dims < 2 || dims % 2 != 0 {
        return Err(ModelError::BadDims(
            "n must be even and >= 2 (two real dimensions per receive antenna)",
        ));
    }
    Ok(())
}

/// One channel use: y = √snr·g_m + z, with z i.i.d. standard normal,
/// drawn from the (ensemble, trial-block) substream so the result is
/// reproducible.
pub fn transmit(
    constellation: &Constellation,
    m: usize,
    snr: &SnrSpec,
    rng: &RngSpec,
    ensemble: u64,
    trial: u64,
) -> Result<Vec<f64>, ModelError> {
    if m >= constellation.m_count() {
        return Err(ModelError::IndexOutOfRange {
            index: m,
            limit: constellation.m_count(),
        });
    }
    let block = trial / crate::rng::TRIAL_BLOCK;
    let offset = trial % crate::rng::TRIAL_BLOCK;
    let mut src = substream(rng, Purpose::Trials, ensemble, block);
    // Burn earlier trials in the block to land on this one.
    let n = constellation.dims();
    for _ in 0..offset * n as u64 {
        let _: f64 = src.sample(StandardNormal);
    }
    let mut y = vec![0.0; n];
    transmit_into(constellation, m, snr.snr().sqrt(), 1.0, &mut src, &mut y);
    Ok(y)
}

/// Hot-path transmit: writes √snr·g_m + noise_scale·z into `out`.
/// `noise_scale` = 0 is the zero-noise test hook.
pub(crate) fn transmit_into<R: Rng>(
    constellation: &Constellation,
    m: usize,
    sqrt_snr: f64,
    noise_scale: f64,
    rng: &mut R,
    out: &mut [f64],
) {
    let row = constellation.row(m);
    for (o, &g) in out.iter_mut().zip(row) {
        let z: f64 = rng.sample(StandardNormal);
        *o = sqrt_snr * g + noise_scale * z;
    }
}

/// Maximum-likelihood detection: argmin over m of ‖y − √snr·g_m‖².
/// Ties resolve to the lowest index.
pub fn ml_detect(constellation: &Constellation, y: &[f64], snr: &SnrSpec) -> usize {
    debug_assert_eq!(y.len(), constellation.dims());
    ml_detect_scaled(constellation, y, snr.snr().sqrt())
}

pub(crate) fn ml_detect_scaled(constellation: &Constellation, y: &[f64], sqrt_snr: f64) -> usize {
    let mut best = 0usize;
    let mut best_d = f64::INFINITY;
    for m in 0..constellation.m_count() {
        let row = constellation.row(m);
        let d: f64 = y
            .iter()
            .zip(row)
            .map(|(&yi, &g)| {
                let e = yi - sqrt_snr * g;
                e * e
            })
            .sum();
        if d < best_d {
            best_d = d;
            best = m;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> RngSpec {
        RngSpec::new(0xD0E5, 0)
    }

    #[test]
    fn sampling_matches_unit_normal_moments() {
        // One big ensemble: 10^6 entries.
        let c = Constellation::sample(1000, 1000, &spec(), 0).unwrap();
        let m = c.gains.iter().sum::<f64>() / c.gains.len() as f64;
        let v = c.gains.iter().map(|g| g * g).sum::<f64>() / c.gains.len() as f64;
        assert!(m.abs() < 0.005, "mean {m}");
        assert!((v - 1.0).abs() < 0.01, "variance {v}");
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = Constellation::sample(16, 8, &spec(), 3).unwrap();
        let b = Constellation::sample(16, 8, &spec(), 3).unwrap();
        assert_eq!(a, b);
        let other = Constellation::sample(16, 8, &spec(), 4).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn shape_validation() {
        assert!(Constellation::sample(1, 4, &spec(), 0).is_err());
        assert!(Constellation::sample(4, 3, &spec(), 0).is_err());
        assert!(Constellation::sample(4, 0, &spec(), 0).is_err());
    }

    #[test]
    fn transmit_zero_snr_limit_is_pure_noise() {
        // Mean energy per dimension -> 1 as snr -> 0.
        let c = Constellation::sample(4, 4, &spec(), 0).unwrap();
        let snr = SnrSpec::new(1e-12).unwrap();
        let mut acc = 0.0;
        let trials = 100_000u64;
        let mut rng = substream(&spec(), Purpose::Trials, 0, 0);
        let mut y = vec![0.0; 4];
        for _ in 0..trials {
            transmit_into(&c, 1, snr.snr().sqrt(), 1.0, &mut rng, &mut y);
            acc += y.iter().map(|v| v * v).sum::<f64>();
        }
        let per_dim = acc / (trials as f64 * 4.0);
        assert!((per_dim - 1.0).abs() < 0.01, "got {per_dim}");
    }

    #[test]
    fn transmit_is_deterministic_with_injected_constellation() {
        let ones = Constellation::from_rows(&[vec![1.0; 4], vec![-1.0; 4]]).unwrap();
        let snr = SnrSpec::new(4.0).unwrap();
        let y1 = transmit(&ones, 0, &snr, &spec(), 0, 17).unwrap();
        let y2 = transmit(&ones, 0, &snr, &spec(), 0, 17).unwrap();
        assert_eq!(y1, y2);
        // y = 2·1 + z(seed): subtracting the signal leaves the seeded noise.
        let z: Vec<f64> = y1.iter().map(|v| v - 2.0).collect();
        let y3 = transmit(&ones, 1, &snr, &spec(), 0, 17).unwrap();
        for (a, b) in y3.iter().zip(&z) {
            assert!((a - (-2.0 + b)).abs() < 1e-15);
        }
    }

    #[test]
    fn received_energy_is_signal_plus_noise() {
        // E‖y‖²/n = snr + 1, within 2% at snr = 10 over 10^5 trials.
        let snr = SnrSpec::new(10.0).unwrap();
        let c = Constellation::sample(8, 8, &spec(), 1).unwrap();
        let mut rng = substream(&spec(), Purpose::Trials, 1, 0);
        let mut acc = 0.0;
        let trials = 100_000u64;
        let mut y = vec![0.0; 8];
        for t in 0..trials {
            let m = (t % 8) as usize;
            transmit_into(&c, m, snr.snr().sqrt(), 1.0, &mut rng, &mut y);
            acc += y.iter().map(|v| v * v).sum::<f64>();
        }
        let per_dim = acc / (trials as f64 * 8.0);
        // The signal part averages snr·‖g‖²/n over the fixed ensemble, so
        // allow the ensemble wobble on top of the trial noise.
        let ensemble_mean =
            (0..8).map(|m| c.energy(m)).sum::<f64>() / (8.0 * 8.0) * snr.snr() + 1.0;
        assert!(
            (per_dim - ensemble_mean).abs() / ensemble_mean < 0.02,
            "got {per_dim}, ensemble mean {ensemble_mean}"
        );
        assert!((per_dim - (snr.snr() + 1.0)).abs() / (snr.snr() + 1.0) < 0.1);
    }

    #[test]
    fn transmit_index_out_of_range() {
        let c = Constellation::sample(4, 4, &spec(), 0).unwrap();
        let snr = SnrSpec::new(1.0).unwrap();
        assert!(transmit(&c, 4, &snr, &spec(), 0, 0).is_err());
    }

    #[test]
    fn ml_detect_recovers_noiseless_point() {
        let c = Constellation::sample(8, 6, &spec(), 2).unwrap();
        let snr = SnrSpec::new(3.0).unwrap();
        let y: Vec<f64> = c.row(3).iter().map(|g| g * snr.snr().sqrt()).collect();
        assert_eq!(ml_detect(&c, &y, &snr), 3);
    }

    #[test]
    fn ml_detect_breaks_ties_low() {
        let twin =
            Constellation::from_rows(&[vec![0.5, -0.25], vec![1.0, 2.0], vec![1.0, 2.0]]).unwrap();
        let snr = SnrSpec::new(1.0).unwrap();
        assert_eq!(ml_detect(&twin, &[1.0, 2.0], &snr), 1);
    }

    #[test]
    fn ml_detect_agrees_with_brute_force_scan() {
        // Independent oracle: recompute every distance with fresh code.
        let snr = SnrSpec::new(2.5).unwrap();
        let mut rng = substream(&spec(), Purpose::Trials, 9, 9);
        for trial in 0..100u64 {
            let c = Constellation::sample(12, 6, &spec(), 100 + trial).unwrap();
            let y: Vec<f64> = (0..6)
                .map(|_| rng.sample::<f64, _>(StandardNormal) * 3.0)
                .collect();
            let got = ml_detect(&c, &y, &snr);
            let s = snr.snr().sqrt();
            let mut oracle = 0usize;
            let mut best = f64::INFINITY;
            for m in 0..12 {
                let mut d = 0.0;
                for i in 0..6 {
                    let e = y[i] - s * c.row(m)[i];
                    d += e * e;
                }
                if d < best {
                    best = d;
                    oracle = m;
                }
            }
            assert_eq!(got, oracle, "trial {trial}");
        }
    }

    #[test]
    fn ml_detect_scale_invariant() {
        let c = Constellation::sample(8, 4, &spec(), 5).unwrap();
        let snr = SnrSpec::new(2.0).unwrap();
        let mut rng = substream(&spec(), Purpose::Trials, 5, 0);
        for _ in 0..50 {
            let y: Vec<f64> = (0..4)
                .map(|_| rng.sample::<f64, _>(StandardNormal) * 2.0)
                .collect();
            let d0 = ml_detect(&c, &y, &snr);
            for &k in &[0.25, 3.0, 17.0] {
                let yk: Vec<f64> = y.iter().map(|v| v * k).collect();
                let ck = Constellation::from_rows(
                    &(0..8)
                        .map(|m| c.row(m).iter().map(|g| g * k).collect::<Vec<_>>())
                        .collect::<Vec<_>>(),
                )
                .unwrap();
                assert_eq!(ml_detect(&ck, &yk, &snr), d0);
            }
        }
    }
}
