//! Resolved experiment configurations and the CSV emitters behind each
//! subcommand. Every emitter is a pure function of its resolved config,
//! which is what makes `replay` byte-exact.

use crate::config::{prime_power_split, snr_db_grid, CodeSpec, FileConfig, FloatList};
use crate::output::{fmt_f, Csv};
use crate::Validation;
use anyhow::Result;
use mbm::analysis::{
    dmt_coded, dmt_mimo_legacy, dmt_uncoded, high_snr_ser_approx, pep_exact, pep_hypergeometric,
    pep_quadrature, pep_upper_bound, union_bound_ser,
};
use mbm::coded::{coded_union_bound_chain, coded_word_error_bound, simulate_wer_detailed};
use mbm::constellation::SnrSpec;
use mbm::gf::Field;
use mbm::mds::MdsCode;
use mbm::rng::RngSpec;
use mbm::selection::{selection_report, simulate_selection_gain, SelectionGainResult};
use mbm::sim::{estimate_diversity_slope, simulate_ser_detailed, DetailedEstimate};

/// Substream ids per command, so reusing one master seed across
/// subcommands never aliases draws.
const STREAM_UNCODED: u64 = 1;
const STREAM_CODED: u64 = 2;
const STREAM_SELECTION: u64 = 3;

fn pair(k: &str, v: impl std::fmt::Display) -> (String, String) {
    (k.to_string(), v.to_string())
}

fn get_req<'a>(cfg: &'a FileConfig, key: &str) -> Result<&'a str> {
    cfg.get(key)
        .ok_or_else(|| Validation(format!("replay header is missing `{key}`")).into())
}

fn parse_key<T: std::str::FromStr>(cfg: &FileConfig, key: &str) -> Result<T>
where
    <T as std::str::FromStr>::Err: std::fmt::Display,
{
    get_req(cfg, key)?
        .parse()
        .map_err(|e| Validation(format!("replay header `{key}`: {e}")).into())
}

// ---------------------------------------------------------------------
// pep
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct PepCfg {
    pub dims: u32,
    pub from_db: f64,
    pub to_db: f64,
    pub step_db: f64,
}

impl PepCfg {
    pub fn header(&self) -> Vec<(String, String)> {
        vec![
            pair("dims", self.dims),
            pair("snr-db-from", self.from_db),
            pair("snr-db-to", self.to_db),
            pair("snr-db-step", self.step_db),
        ]
    }

    pub fn from_header(cfg: &FileConfig) -> Result<Self> {
        Ok(PepCfg {
            dims: parse_key(cfg, "dims")?,
            from_db: parse_key(cfg, "snr-db-from")?,
            to_db: parse_key(cfg, "snr-db-to")?,
            step_db: parse_key(cfg, "snr-db-step")?,
        })
    }
}

pub fn run_pep(cfg: &PepCfg) -> Result<String> {
    let grid = snr_db_grid(cfg.from_db, cfg.to_db, cfg.step_db)?;
    let mut csv = Csv::new("pep", &cfg.header());
    csv.columns(&[
        "snr_db",
        "c",
        "n",
        "pep_exact",
        "pep_hypergeometric",
        "pep_quadrature",
        "pep_upper_bound",
    ]);
    for &db in &grid {
        let snr = SnrSpec::from_db(db).map_err(|e| Validation(e.to_string()))?;
        let c = snr.c();
        csv.row(&[
            fmt_f(db),
            fmt_f(c),
            cfg.dims.to_string(),
            fmt_f(pep_exact(c, cfg.dims)?.value),
            fmt_f(pep_hypergeometric(c, cfg.dims)?.value),
            fmt_f(pep_quadrature(snr.snr(), cfg.dims)?.value),
            fmt_f(pep_upper_bound(c, cfg.dims)?.value),
        ]);
    }
    Ok(csv.finish())
}

// ---------------------------------------------------------------------
// uncoded
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct UncodedCfg {
    pub dims: u32,
    /// Fixed message count, or None when a rate schedule drives M.
    pub m_count: Option<u64>,
    /// Multiplexing gain for the schedule M(snr) = max(2, round(snr^r)).
    pub rate_r: Option<f64>,
    pub from_db: f64,
    pub to_db: f64,
    pub step_db: f64,
    pub trials: u64,
    pub ensembles: u64,
    pub seed: u64,
}

impl UncodedCfg {
    pub fn header(&self) -> Vec<(String, String)> {
        let mut h = vec![pair("dims", self.dims)];
        match (self.m_count, self.rate_r) {
            (Some(m), None) => h.push(pair("m-count", m)),
            (None, Some(r)) => h.push(pair("rate-r", r)),
            _ => unreachable!("validated at resolution"),
        }
        h.extend([
            pair("snr-db-from", self.from_db),
            pair("snr-db-to", self.to_db),
            pair("snr-db-step", self.step_db),
            pair("trials", self.trials),
            pair("ensembles", self.ensembles),
            pair("seed", self.seed),
        ]);
        h
    }

    pub fn from_header(cfg: &FileConfig) -> Result<Self> {
        let m_count = crate::config::merge_opt::<u64>(None, cfg, "m-count")?;
        let rate_r = crate::config::merge_opt::<f64>(None, cfg, "rate-r")?;
        Ok(UncodedCfg {
            dims: parse_key(cfg, "dims")?,
            m_count,
            rate_r,
            from_db: parse_key(cfg, "snr-db-from")?,
            to_db: parse_key(cfg, "snr-db-to")?,
            step_db: parse_key(cfg, "snr-db-step")?,
            trials: parse_key(cfg, "trials")?,
            ensembles: parse_key(cfg, "ensembles")?,
            seed: parse_key(cfg, "seed")?,
        })
    }

    fn message_count(&self, snr: f64) -> u64 {
        match (self.m_count, self.rate_r) {
            (Some(m), _) => m,
            (None, Some(r)) => (snr.powf(r).round() as u64).max(2),
            _ => unreachable!(),
        }
    }
}

pub fn run_uncoded(cfg: &UncodedCfg) -> Result<String> {
    let grid = snr_db_grid(cfg.from_db, cfg.to_db, cfg.step_db)?;
    let rng = RngSpec::new(cfg.seed, STREAM_UNCODED);
    let mut csv = Csv::new("uncoded", &cfg.header());
    csv.columns(&[
        "snr_db",
        "ebn0_db",
        "ser_sim",
        "ci95",
        "union_bound",
        "high_snr_approx",
    ]);
    let mut curve = Vec::new();
    for &db in &grid {
        let snr = SnrSpec::from_db(db).map_err(|e| Validation(e.to_string()))?;
        let m = cfg.message_count(snr.snr());
        let est = simulate_ser_detailed(
            m as usize,
            cfg.dims as usize,
            &snr,
            cfg.trials,
            cfg.ensembles,
            &rng,
        )?;
        let rate_bits = (m as f64).log2();
        let ebn0_db = 10.0 * (snr.snr() / rate_bits).log10();
        let approx = high_snr_ser_approx(snr.snr(), cfg.dims, cfg.rate_r.unwrap_or(0.0))
            .map(|v| v.min(1.0))
            .unwrap_or(f64::NAN);
        csv.row(&[
            fmt_f(db),
            fmt_f(ebn0_db),
            fmt_f(est.estimate.error_rate),
            fmt_f(est.ci95_total()),
            fmt_f(union_bound_ser(m, snr.c(), cfg.dims)?),
            fmt_f(approx),
        ]);
        curve.push((snr.snr(), est.estimate.error_rate));
    }
    match estimate_diversity_slope(&curve) {
        Ok(slope) => csv.comment(&format!("fitted-slope: {}", fmt_f(slope))),
        Err(_) => csv.comment("fitted-slope: nan"),
    }
    Ok(csv.finish())
}

// ---------------------------------------------------------------------
// coded
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct CodedCfg {
    pub dims: u32,
    pub code: CodeSpec,
    pub from_db: f64,
    pub to_db: f64,
    pub step_db: f64,
    pub trials: u64,
    pub ensembles: u64,
    pub seed: u64,
}

impl CodedCfg {
    pub fn header(&self) -> Vec<(String, String)> {
        vec![
            pair("dims", self.dims),
            pair("code", self.code),
            pair("snr-db-from", self.from_db),
            pair("snr-db-to", self.to_db),
            pair("snr-db-step", self.step_db),
            pair("trials", self.trials),
            pair("ensembles", self.ensembles),
            pair("seed", self.seed),
        ]
    }

    pub fn from_header(cfg: &FileConfig) -> Result<Self> {
        Ok(CodedCfg {
            dims: parse_key(cfg, "dims")?,
            code: parse_key(cfg, "code")?,
            from_db: parse_key(cfg, "snr-db-from")?,
            to_db: parse_key(cfg, "snr-db-to")?,
            step_db: parse_key(cfg, "snr-db-step")?,
            trials: parse_key(cfg, "trials")?,
            ensembles: parse_key(cfg, "ensembles")?,
            seed: parse_key(cfg, "seed")?,
        })
    }

    pub fn build_code(&self) -> Result<MdsCode> {
        let (p, m) = prime_power_split(self.code.q)?;
        let field = Field::new(p, m).map_err(|e| Validation(e.to_string()))?;
        MdsCode::reed_solomon(field, self.code.n, self.code.k)
            .map_err(|e| Validation(e.to_string()).into())
    }
}

pub fn run_coded(cfg: &CodedCfg) -> Result<String> {
    let code = cfg.build_code()?;
    let grid = snr_db_grid(cfg.from_db, cfg.to_db, cfg.step_db)?;
    let rng = RngSpec::new(cfg.seed, STREAM_CODED);
    let n_r = cfg.dims / 2;
    let mut csv = Csv::new("coded", &cfg.header());
    csv.comment(&format!("code-description: {}", code.description()));
    csv.columns(&[
        "snr_db",
        "wer_sim",
        "ci95",
        "chain_bound",
        "eq26_bound",
        "q_used",
    ]);
    let mut non_dominant = Vec::new();
    for &db in &grid {
        let snr = SnrSpec::from_db(db).map_err(|e| Validation(e.to_string()))?;
        let c = snr.c();
        let est = simulate_wer_detailed(
            &code,
            cfg.dims as usize,
            &snr,
            cfg.trials,
            cfg.ensembles,
            &rng,
        )?;
        let chain = coded_union_bound_chain(&code, cfg.dims, c)?;
        if !chain.dominant {
            non_dominant.push(db);
        }
        // The multiplexing the fixed field size realizes at this snr:
        // r/τ = ln q / ln(1+c); the closed-form bound needs r/τ < N_r.
        let r_over_tau = (code.field().q() as f64).ln() / (1.0 + c).ln();
        let eq26 = if r_over_tau < n_r as f64 {
            coded_word_error_bound(
                code.block_length() as u32,
                n_r,
                code.min_distance() as u32,
                r_over_tau,
                1.0,
                c,
            )?
        } else {
            f64::NAN
        };
        csv.row(&[
            fmt_f(db),
            fmt_f(est.estimate.error_rate),
            fmt_f(est.ci95_total()),
            fmt_f(chain.value),
            fmt_f(eq26),
            code.field().q().to_string(),
        ]);
    }
    if !non_dominant.is_empty() {
        let pts: Vec<String> = non_dominant.iter().map(|v| fmt_f(*v)).collect();
        csv.comment(&format!(
            "chain-bound-non-dominant-at-snr-db: {}",
            pts.join(" ")
        ));
    }
    Ok(csv.finish())
}

// ---------------------------------------------------------------------
// selection
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionCfg {
    pub dims: u32,
    pub m_count: u64,
    pub energies: FloatList,
    pub target_ser: f64,
    pub from_db: f64,
    pub to_db: f64,
    pub step_db: f64,
    pub trials: u64,
    pub ensembles: u64,
    pub seed: u64,
}

impl SelectionCfg {
    pub fn header(&self) -> Vec<(String, String)> {
        vec![
            pair("dims", self.dims),
            pair("m-count", self.m_count),
            pair("energy-e", &self.energies),
            pair("target-ser", self.target_ser),
            pair("snr-db-from", self.from_db),
            pair("snr-db-to", self.to_db),
            pair("snr-db-step", self.step_db),
            pair("trials", self.trials),
            pair("ensembles", self.ensembles),
            pair("seed", self.seed),
        ]
    }

    pub fn from_header(cfg: &FileConfig) -> Result<Self> {
        Ok(SelectionCfg {
            dims: parse_key(cfg, "dims")?,
            m_count: parse_key(cfg, "m-count")?,
            energies: parse_key(cfg, "energy-e")?,
            target_ser: parse_key(cfg, "target-ser")?,
            from_db: parse_key(cfg, "snr-db-from")?,
            to_db: parse_key(cfg, "snr-db-to")?,
            step_db: parse_key(cfg, "snr-db-step")?,
            trials: parse_key(cfg, "trials")?,
            ensembles: parse_key(cfg, "ensembles")?,
            seed: parse_key(cfg, "seed")?,
        })
    }
}

/// Half-width (dB) of the interpolated crossing, from the per-point
/// confidence intervals and the local log-log slope at the bracket.
fn crossing_ci_db(curve: &[(f64, DetailedEstimate)], target: f64) -> f64 {
    let mut best = f64::NAN;
    for w in curve.windows(2) {
        let (s0, ref e0) = w[0];
        let (s1, ref e1) = w[1];
        let (p0, p1) = (e0.estimate.error_rate, e1.estimate.error_rate);
        if !(p0 > 0.0 && p1 > 0.0) {
            continue;
        }
        let brackets = (p0 >= target && target >= p1) || (p1 >= target && target >= p0);
        if !brackets {
            continue;
        }
        let slope = (p1.log10() - p0.log10()) / (s1.log10() - s0.log10());
        if slope.abs() < 1e-9 {
            continue;
        }
        let rel = (e0.ci95_total() / p0).max(e1.ci95_total() / p1);
        best = 10.0 * (rel / std::f64::consts::LN_10) / slope.abs();
        break;
    }
    best
}

pub fn run_selection(cfg: &SelectionCfg) -> Result<String> {
    let grid_db = snr_db_grid(cfg.from_db, cfg.to_db, cfg.step_db)?;
    let grid_lin: Vec<f64> = grid_db.iter().map(|db| 10f64.powf(db / 10.0)).collect();
    let rng = RngSpec::new(cfg.seed, STREAM_SELECTION);
    let mut csv = Csv::new("selection", &cfg.header());
    csv.columns(&[
        "E",
        "delta_mirrors",
        "gamma_c_db",
        "removed_fraction",
        "sim_gain_db",
        "sim_ci",
    ]);
    for &e in &cfg.energies.0 {
        let report = selection_report(e, cfg.dims)?;
        let sim: SelectionGainResult = simulate_selection_gain(
            cfg.dims as usize,
            cfg.m_count as usize,
            e,
            cfg.target_ser,
            &grid_lin,
            cfg.trials,
            cfg.ensembles,
            &rng,
        )?;
        let ci = crossing_ci_db(&sim.baseline_curve, cfg.target_ser)
            .hypot(crossing_ci_db(&sim.pruned_curve, cfg.target_ser));
        csv.row(&[
            fmt_f(e),
            fmt_f(report.extra_mirrors),
            fmt_f(report.gamma_c_db),
            fmt_f(report.removed_fraction),
            fmt_f(sim.gain_db),
            fmt_f(ci),
        ]);
    }
    Ok(csv.finish())
}

// ---------------------------------------------------------------------
// dmt
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct DmtCfg {
    pub nr: u32,
    pub nt: u32,
    pub min_distance: u32,
    pub tau: f64,
    pub r_from: f64,
    pub r_to: f64,
    pub r_step: f64,
}

impl DmtCfg {
    pub fn header(&self) -> Vec<(String, String)> {
        vec![
            pair("nr", self.nr),
            pair("nt", self.nt),
            pair("min-distance", self.min_distance),
            pair("tau", self.tau),
            pair("r-from", self.r_from),
            pair("r-to", self.r_to),
            pair("r-step", self.r_step),
        ]
    }

    pub fn from_header(cfg: &FileConfig) -> Result<Self> {
        Ok(DmtCfg {
            nr: parse_key(cfg, "nr")?,
            nt: parse_key(cfg, "nt")?,
            min_distance: parse_key(cfg, "min-distance")?,
            tau: parse_key(cfg, "tau")?,
            r_from: parse_key(cfg, "r-from")?,
            r_to: parse_key(cfg, "r-to")?,
            r_step: parse_key(cfg, "r-step")?,
        })
    }
}

pub fn run_dmt(cfg: &DmtCfg) -> Result<String> {
    let grid = snr_db_grid(cfg.r_from, cfg.r_to, cfg.r_step)?; // same inclusive stepping
    let mut csv = Csv::new("dmt", &cfg.header());
    csv.columns(&["r", "d_uncoded", "d_coded", "d_mimo"]);
    for &r in &grid {
        let unc = dmt_uncoded(cfg.nr, r).map(|p| p.d).unwrap_or(f64::NAN);
        let cod = dmt_coded(cfg.nr, r, cfg.min_distance, cfg.tau)
            .map(|p| p.d)
            .unwrap_or(f64::NAN);
        let mimo = dmt_mimo_legacy(cfg.nt, cfg.nr, r)
            .map(|p| p.d)
            .unwrap_or(f64::NAN);
        csv.row(&[fmt_f(r), fmt_f(unc), fmt_f(cod), fmt_f(mimo)]);
    }
    Ok(csv.finish())
}
