//! Run configuration: defaults, a flat `key = value` file, then flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Failure;

    fn from_str(s: &str) -> Result<Self, Failure> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Failure::Usage(format!(
                "unknown format '{other}' (expected csv or json)"
            ))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    /// Sieve limit for the arithmetic tables.
    pub limit: u64,
    pub table_cache: Option<PathBuf>,
    pub seed: u64,
    /// Default tolerance for series and `L(1, χ)` evaluations.
    pub tol: f64,
    pub format: Format,
    /// Worker threads; `None` leaves the choice to rayon.
    pub jobs: Option<usize>,
    /// Report directory; nothing is written when absent.
    pub out: Option<PathBuf>,
    /// Largest conductor in the Siegel scan.
    pub qmax: u64,
    /// Largest `t` in the exponential-sum scan.
    pub tmax: f64,
    /// Random pairs in the triangle fuzz.
    pub pairs: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            limit: 1_000_000,
            table_cache: None,
            seed: 1,
            tol: 1e-8,
            format: Format::Csv,
            jobs: None,
            out: None,
            qmax: 3000,
            tmax: 1e6,
            pairs: 1000,
        }
    }
}

/// Positive integer, accepting float notation such as `1e6`.
pub fn parse_count(key: &str, value: &str) -> Result<u64, Failure> {
    let value = value.trim();
    if let Ok(n) = value.parse::<u64>() {
        return if n > 0 {
            Ok(n)
        } else {
            Err(Failure::Usage(format!("{key} must be positive")))
        };
    }
    match value.parse::<f64>() {
        Ok(x) if x >= 1.0 && x.fract() == 0.0 && x <= 9.007_199_254_740_992e15 => Ok(x as u64),
        _ => Err(Failure::Usage(format!("{key}: '{value}' is not a positive integer"))),
    }
}

pub fn parse_real(key: &str, value: &str) -> Result<f64, Failure> {
    match value.trim().parse::<f64>() {
        Ok(x) if x.is_finite() && x > 0.0 => Ok(x),
        _ => Err(Failure::Usage(format!("{key}: '{value}' is not a positive number"))),
    }
}

impl RunConfig {
    /// Sets one key; the same names are used in files and as flags.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), Failure> {
        match key {
            "limit" => self.limit = parse_count(key, value)?,
            "table_cache" | "table-cache" => self.table_cache = Some(PathBuf::from(value.trim())),
            "seed" => {
                self.seed = value
                    .trim()
                    .parse()
                    .map_err(|_| Failure::Usage(format!("seed: '{value}' is not an unsigned integer")))?
            }
            "tol" => self.tol = parse_real(key, value)?,
            "format" => self.format = value.parse()?,
            "jobs" => self.jobs = Some(parse_count(key, value)? as usize),
            "out" => self.out = Some(PathBuf::from(value.trim())),
            "qmax" => self.qmax = parse_count(key, value)?,
            "tmax" => self.tmax = parse_real(key, value)?,
            "pairs" => self.pairs = parse_count(key, value)?,
            other => return Err(Failure::Usage(format!("unknown configuration key '{other}'"))),
        }
        Ok(())
    }

    /// Applies a `key = value` text; `#` starts a comment.
    pub fn apply_str(&mut self, text: &str) -> Result<(), Failure> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Failure::Usage(format!("config line {}: expected key = value", i + 1)))?;
            self.set(key.trim(), value)
                .map_err(|e| Failure::Usage(format!("config line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
        self.apply_str(&text)
    }

    /// Flat `key = value` rendering that [`RunConfig::apply_str`] reads back.
    pub fn to_kv(&self) -> String {
        let mut out = format!(
            "limit = {}\nseed = {}\ntol = {:e}\nformat = {}\nqmax = {}\ntmax = {:e}\npairs = {}\n",
            self.limit, self.seed, self.tol, self.format, self.qmax, self.tmax, self.pairs
        );
        if let Some(p) = &self.table_cache {
            out.push_str(&format!("table_cache = {}\n", p.display()));
        }
        if let Some(j) = self.jobs {
            out.push_str(&format!("jobs = {j}\n"));
        }
        if let Some(p) = &self.out {
            out.push_str(&format!("out = {}\n", p.display()));
        }
        out
    }
}
