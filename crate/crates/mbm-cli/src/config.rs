//! Option resolution: defaults < config file < command-line flags, plus
//! the header round-trip that `replay` uses to regenerate a file.

use crate::Validation;
use anyhow::Result;
use std::collections::BTreeMap;
use std::fmt::Display;
use std::str::FromStr;

/// key=value pairs loaded from --config (later flags override these).
#[derive(Debug, Default, Clone)]
pub struct FileConfig(BTreeMap<String, String>);

impl FileConfig {
    pub fn load(path: Option<&std::path::Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Validation(format!("cannot read config {}: {e}", path.display())))?;
        let mut map = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(
                    Validation(format!("config line {} is not key=value", lineno + 1)).into(),
                );
            };
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(FileConfig(map))
    }

    pub fn from_pairs(pairs: &[(String, String)]) -> Self {
        FileConfig(pairs.iter().cloned().collect())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }
}

/// Flag value if given, else config-file value, else default.
pub fn merge<T>(cli: Option<T>, file: &FileConfig, key: &str, default: T) -> Result<T>
where
    T: FromStr,
    <T as FromStr>::Err: Display,
{
    if let Some(v) = cli {
        return Ok(v);
    }
    match file.get(key) {
        Some(raw) => raw
            .parse()
            .map_err(|e| Validation(format!("config key {key}: {e}")).into()),
        None => Ok(default),
    }
}

/// As [`merge`] with no default (stays None when absent everywhere).
pub fn merge_opt<T>(cli: Option<T>, file: &FileConfig, key: &str) -> Result<Option<T>>
where
    T: FromStr,
    <T as FromStr>::Err: Display,
{
    if cli.is_some() {
        return Ok(cli);
    }
    match file.get(key) {
        Some(raw) => raw
            .parse()
            .map(Some)
            .map_err(|e| Validation(format!("config key {key}: {e}")).into()),
        None => Ok(None),
    }
}

/// Receive dimensions from --nr or --dims (exactly one source; a bare
/// default of nr applies when neither is given).
pub fn resolve_dims(nr: Option<u32>, dims: Option<u32>, default_nr: u32) -> Result<u32> {
    match (nr, dims) {
        (Some(_), Some(_)) => {
            Err(Validation("give --nr or --dims, not both (n = 2*N_r)".into()).into())
        }
        (Some(nr), None) => {
            if nr == 0 {
                return Err(Validation("--nr must be >= 1".into()).into());
            }
            Ok(2 * nr)
        }
        (None, Some(d)) => {
            if d < 2 || d % 2 != 0 {
                return Err(Validation(format!(
                    "--dims must be even and >= 2 (got {d}); each receive antenna contributes two real dimensions"
                ))
                .into());
            }
            Ok(d)
        }
        (None, None) => Ok(2 * default_nr),
    }
}

/// Inclusive dB grid; empty when from > to.
pub fn snr_db_grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !step.is_finite() || !from.is_finite() || !to.is_finite() {
        return Err(Validation("snr grid requires finite bounds and step > 0".into()).into());
    }
    let mut grid = Vec::new();
    let mut i = 0u32;
    loop {
        let v = from + step * i as f64;
        if v > to + 1e-9 {
            break;
        }
        grid.push(v);
        i += 1;
        if i > 100_000 {
            return Err(Validation("snr grid has over 100000 points".into()).into());
        }
    }
    Ok(grid)
}

/// Comma-separated f64 list ("0.25,0.5,1").
#[derive(Debug, Clone, PartialEq)]
pub struct FloatList(pub Vec<f64>);

impl FromStr for FloatList {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let vals: Result<Vec<f64>, _> = s.split(',').map(|p| p.trim().parse::<f64>()).collect();
        vals.map(FloatList).map_err(|e| e.to_string())
    }
}

impl Display for FloatList {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(f64::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// "N,K,q" code triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeSpec {
    pub n: usize,
    pub k: usize,
    pub q: u64,
}

impl FromStr for CodeSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err("expected N,K,q".into());
        }
        Ok(CodeSpec {
            n: parts[0].parse().map_err(|e| format!("N: {e}"))?,
            k: parts[1].parse().map_err(|e| format!("K: {e}"))?,
            q: parts[2].parse().map_err(|e| format!("q: {e}"))?,
        })
    }
}

impl Display for CodeSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{},{}", self.n, self.k, self.q)
    }
}

/// Splits q into (p, m) with q = p^m, p prime.
pub fn prime_power_split(q: u64) -> Result<(u32, u32)> {
    if q < 2 {
        return Err(Validation("field size q must be >= 2".into()).into());
    }
    let mut p = 0u64;
    for d in 2..=q {
        if d * d > q {
            p = q; // q itself is prime
            break;
        }
        if q % d == 0 {
            p = d;
            break;
        }
    }
    let mut m = 0u32;
    let mut v = q;
    while v % p == 0 {
        v /= p;
        m += 1;
    }
    if v != 1 {
        return Err(Validation(format!("q = {q} is not a prime power")).into());
    }
    Ok((p as u32, m))
}
