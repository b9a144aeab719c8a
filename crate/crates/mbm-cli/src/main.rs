//! Experiment driver emitting reproducible CSV curve data for
//! media-based modulation error-rate studies.
//!
//! Subcommands: pep | uncoded | coded | selection | dmt | selfcheck |
//! replay. Every CSV starts with `# key = value` lines recording the
//! resolved configuration; `replay` regenerates a byte-identical file
//! from that header at any worker count.
//!
//! Exit codes: 0 success, 2 validation error, 3 budget or convergence
//! error.

// `!(x > 0)`-style guards deliberately reject NaN on the same branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::manual_is_multiple_of)]

mod config;
mod output;
mod runs;
mod selfcheck;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use config::{merge, merge_opt, resolve_dims, FileConfig};
use core::fmt;
use std::path::PathBuf;

/// Rejected input (flags, config file, or replay header). Exits with 2;
/// every other failure exits with 3.
#[derive(Debug)]
pub struct Validation(pub String);

impl fmt::Display for Validation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for Validation {}

#[derive(Parser)]
#[command(
    name = "mbm",
    version,
    about = "Media-based modulation curve generator"
)]
struct Cli {
    /// Worker threads (default: all cores). Output bytes do not depend
    /// on this.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// key=value file supplying defaults for any long flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct GridArgs {
    /// Lower edge of the SNR grid in dB.
    #[arg(long)]
    snr_db_from: Option<f64>,
    /// Upper edge of the SNR grid in dB (inclusive).
    #[arg(long)]
    snr_db_to: Option<f64>,
    /// Grid step in dB.
    #[arg(long)]
    snr_db_step: Option<f64>,
}

impl GridArgs {
    fn resolve(&self, file: &FileConfig, defaults: (f64, f64, f64)) -> Result<(f64, f64, f64)> {
        Ok((
            merge(self.snr_db_from, file, "snr-db-from", defaults.0)?,
            merge(self.snr_db_to, file, "snr-db-to", defaults.1)?,
            merge(self.snr_db_step, file, "snr-db-step", defaults.2)?,
        ))
    }
}

#[derive(Args, Debug, Default)]
struct DimArgs {
    /// Number of receive antennas N_r (n = 2·N_r real dimensions).
    #[arg(long)]
    nr: Option<u32>,
    /// Real receive dimensions n (even; alternative to --nr).
    #[arg(long)]
    dims: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Pairwise error probability closed forms and the quadrature oracle.
    Pep {
        #[command(flatten)]
        dims: DimArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Uncoded Monte-Carlo symbol error rate against the analytic bounds.
    Uncoded {
        #[command(flatten)]
        dims: DimArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Fixed message count M (mutually exclusive with --rate-r).
        #[arg(long)]
        m_count: Option<u64>,
        /// Multiplexing gain r driving M(snr) = max(2, round(snr^r)).
        #[arg(long)]
        rate_r: Option<f64>,
        /// Monte-Carlo trials per ensemble.
        #[arg(long)]
        trials: Option<u64>,
        /// Independent constellation realizations.
        #[arg(long)]
        ensembles: Option<u64>,
        /// Master seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// MDS-coded word error rate against the bound chain.
    Coded {
        #[command(flatten)]
        dims: DimArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Reed-Solomon parameters N,K,q.
        #[arg(long)]
        code: Option<config::CodeSpec>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        ensembles: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Selection gain from pruning low-energy constellation points.
    Selection {
        #[command(flatten)]
        dims: DimArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Energy thresholds E, comma separated.
        #[arg(long)]
        energy_e: Option<config::FloatList>,
        /// Symbol error rate at which the gain is read off.
        #[arg(long)]
        target_ser: Option<f64>,
        /// Message count M (kept fixed; messages are uniform over the
        /// pruning survivors).
        #[arg(long)]
        m_count: Option<u64>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        ensembles: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Diversity-multiplexing trade-off table (uncoded, coded, MIMO).
    Dmt {
        /// Receive antennas N_r.
        #[arg(long)]
        nr: Option<u32>,
        /// Transmit antennas of the legacy MIMO baseline.
        #[arg(long)]
        nt: Option<u32>,
        /// Code minimum distance D.
        #[arg(long)]
        min_distance: Option<u32>,
        /// Code rate τ = K/N.
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        r_from: Option<f64>,
        #[arg(long)]
        r_to: Option<f64>,
        #[arg(long)]
        r_step: Option<f64>,
    },
    /// Run the oracle-equivalence battery; exit 0 iff everything passes.
    Selfcheck,
    /// Regenerate a CSV from the header of an existing one.
    Replay {
        /// File whose header to replay.
        #[arg(long)]
        from: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    let workers = cli
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
    {
        eprintln!("mbm: cannot configure {workers} workers: {e}");
        std::process::exit(3);
    }
    match run(&cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("mbm: {e}");
            let code = if e.is::<Validation>() { 2 } else { 3 };
            std::process::exit(code);
        }
    }
}

fn run(cli: &Cli) -> Result<i32> {
    let file = FileConfig::load(cli.config.as_deref())?;
    let text = match &cli.command {
        Command::Pep { dims, grid } => {
            let dims = resolve_dims(
                merge_opt(dims.nr, &file, "nr")?,
                merge_opt(dims.dims, &file, "dims")?,
                4,
            )?;
            let (from_db, to_db, step_db) = grid.resolve(&file, (0.0, 30.0, 1.0))?;
            runs::run_pep(&runs::PepCfg {
                dims,
                from_db,
                to_db,
                step_db,
            })?
        }
        Command::Uncoded {
            dims,
            grid,
            m_count,
            rate_r,
            trials,
            ensembles,
            seed,
        } => {
            let dims = resolve_dims(
                merge_opt(dims.nr, &file, "nr")?,
                merge_opt(dims.dims, &file, "dims")?,
                4,
            )?;
            let (from_db, to_db, step_db) = grid.resolve(&file, (0.0, 20.0, 1.0))?;
            let m_count = merge_opt(*m_count, &file, "m-count")?;
            let rate_r = merge_opt(*rate_r, &file, "rate-r")?;
            let (m_count, rate_r) = match (m_count, rate_r) {
                (Some(_), Some(_)) => {
                    return Err(Validation("give --m-count or --rate-r, not both".into()).into())
                }
                (None, None) => (Some(4), None),
                other => other,
            };
            if let Some(m) = m_count {
                if m < 2 {
                    return Err(Validation("--m-count must be >= 2".into()).into());
                }
            }
            runs::run_uncoded(&runs::UncodedCfg {
                dims,
                m_count,
                rate_r,
                from_db,
                to_db,
                step_db,
                trials: merge(*trials, &file, "trials", 100_000)?,
                ensembles: merge(*ensembles, &file, "ensembles", 100)?,
                seed: merge(*seed, &file, "seed", 1)?,
            })?
        }
        Command::Coded {
            dims,
            grid,
            code,
            trials,
            ensembles,
            seed,
        } => {
            let dims = resolve_dims(
                merge_opt(dims.nr, &file, "nr")?,
                merge_opt(dims.dims, &file, "dims")?,
                2,
            )?;
            let (from_db, to_db, step_db) = grid.resolve(&file, (0.0, 12.0, 1.0))?;
            let cfg = runs::CodedCfg {
                dims,
                code: merge(*code, &file, "code", config::CodeSpec { n: 3, k: 1, q: 5 })?,
                from_db,
                to_db,
                step_db,
                trials: merge(*trials, &file, "trials", 20_000)?,
                ensembles: merge(*ensembles, &file, "ensembles", 100)?,
                seed: merge(*seed, &file, "seed", 1)?,
            };
            cfg.build_code()?; // fail fast on bad code parameters
            runs::run_coded(&cfg)?
        }
        Command::Selection {
            dims,
            grid,
            energy_e,
            target_ser,
            m_count,
            trials,
            ensembles,
            seed,
        } => {
            let dims = resolve_dims(
                merge_opt(dims.nr, &file, "nr")?,
                merge_opt(dims.dims, &file, "dims")?,
                2,
            )?;
            let (from_db, to_db, step_db) = grid.resolve(&file, (14.0, 26.0, 1.5))?;
            let energies = merge(
                energy_e.clone(),
                &file,
                "energy-e",
                config::FloatList(vec![0.25, 0.5, 1.0]),
            )?;
            if energies.0.iter().any(|&e| !(e > 0.0)) {
                return Err(Validation("--energy-e entries must be > 0".into()).into());
            }
            runs::run_selection(&runs::SelectionCfg {
                dims,
                m_count: merge(*m_count, &file, "m-count", 16)?,
                energies,
                target_ser: merge(*target_ser, &file, "target-ser", 1e-3)?,
                from_db,
                to_db,
                step_db,
                trials: merge(*trials, &file, "trials", 10_000)?,
                ensembles: merge(*ensembles, &file, "ensembles", 400)?,
                seed: merge(*seed, &file, "seed", 1)?,
            })?
        }
        Command::Dmt {
            nr,
            nt,
            min_distance,
            tau,
            r_from,
            r_to,
            r_step,
        } => {
            let nr = merge(*nr, &file, "nr", 8)?;
            let cfg = runs::DmtCfg {
                nr,
                nt: merge(*nt, &file, "nt", nr)?,
                min_distance: merge(*min_distance, &file, "min-distance", 8)?,
                tau: merge(*tau, &file, "tau", 8.0 / 9.0)?,
                r_from: merge(*r_from, &file, "r-from", 0.0)?,
                r_to: merge(*r_to, &file, "r-to", nr as f64 - 1.0)?,
                r_step: merge(*r_step, &file, "r-step", 0.25)?,
            };
            if !(cfg.tau > 0.0 && cfg.tau <= 1.0) || cfg.min_distance == 0 || cfg.nr == 0 {
                return Err(Validation("dmt requires nr, D >= 1 and 0 < tau <= 1".into()).into());
            }
            runs::run_dmt(&cfg)?
        }
        Command::Selfcheck => {
            let checks = selfcheck::run_selfcheck();
            let mut all = true;
            for c in &checks {
                if c.passed {
                    println!("PASS {}", c.name);
                } else {
                    all = false;
                    println!("FAIL {} ({})", c.name, c.detail);
                }
            }
            return Ok(if all { 0 } else { 3 });
        }
        Command::Replay { from } => {
            let text = std::fs::read_to_string(from)
                .map_err(|e| Validation(format!("cannot read {}: {e}", from.display())))?;
            let (command, pairs) = output::parse_header(&text)
                .ok_or_else(|| Validation("no replayable header found".into()))?;
            let cfg = FileConfig::from_pairs(&pairs);
            match command.as_str() {
                "pep" => runs::run_pep(&runs::PepCfg::from_header(&cfg)?)?,
                "uncoded" => runs::run_uncoded(&runs::UncodedCfg::from_header(&cfg)?)?,
                "coded" => runs::run_coded(&runs::CodedCfg::from_header(&cfg)?)?,
                "selection" => runs::run_selection(&runs::SelectionCfg::from_header(&cfg)?)?,
                "dmt" => runs::run_dmt(&runs::DmtCfg::from_header(&cfg)?)?,
                other => return Err(Validation(format!("cannot replay command `{other}`")).into()),
            }
        }
    };
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(0)
}
