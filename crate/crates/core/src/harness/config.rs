//! Sweep configuration.
//!
//! The file is UTF-8 text with one `key: value` or `key: [v1, v2, ...]` per
//! line. `#` starts a comment. Keys are `num_qubits`, `nodes`, `theta`,
//! `shots`, `modes`, `seed`, `repeats` and `output_path`; any key left out
//! takes its default. Example:
//!
//! ```text
//! num_qubits: [4, 6, 8, 10, 12]
//! nodes: [1, 2, 4, 8]
//! theta: [0.0, 0.333333, 0.666667]
//! shots: 100
//! modes: [telegate, semiclassical]
//! seed: 7
//! repeats: 1
//! output_path: results/sweep.csv
//! ```

use std::path::{Path, PathBuf};
use std::time::Duration;

use crate::error::{Error, Result};
use crate::qft::Mode;

/// Overrides the directory of `output_path` when set.
pub const OUTPUT_DIR_ENV: &str = "DQC_OUTPUT_DIR";

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(600);

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub num_qubits: Vec<usize>,
    pub nodes: Vec<usize>,
    /// Normalized phases, see [`normalize_theta`].
    pub theta: Vec<f64>,
    pub shots: usize,
    pub modes: Vec<Mode>,
    pub seed: u64,
    pub repeats: usize,
    pub output_path: PathBuf,
    /// Per-run time limit. Not read from the file.
    pub timeout: Duration,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            num_qubits: (4..=20).step_by(2).collect(),
            nodes: vec![1, 2, 4, 8],
            theta: vec![0.0, 1.0 / 3.0, 2.0 / 3.0],
            shots: 100,
            modes: vec![Mode::Telegate],
            seed: 0,
            repeats: 1,
            output_path: PathBuf::from("results/sweep.csv"),
            timeout: DEFAULT_TIMEOUT,
        }
    }
}

/// Snaps decimals such as `0.333333` to the nearby fraction `p/q` with
/// `q <= 16` when they agree to within 5e-6. Other values pass through.
pub fn normalize_theta(theta: f64) -> f64 {
    for q in 1..=16u32 {
        let p = (theta * q as f64).round();
        let snapped = p / q as f64;
        if (theta - snapped).abs() < 5e-6 {
            return snapped;
        }
    }
    theta
}

fn parse_list(raw: &str) -> Vec<&str> {
    let raw = raw.trim();
    let inner = raw
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .unwrap_or(raw);
    inner
        .split(',')
        .map(|s| s.trim().trim_matches(|c| c == '"' || c == '\''))
        .filter(|s| !s.is_empty())
        .collect()
}

fn parse_items<T: std::str::FromStr>(key: &str, raw: &str) -> Result<Vec<T>> {
    let items = parse_list(raw)
        .into_iter()
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| Error::Config(format!("{key}: cannot parse {s:?}")))
        })
        .collect::<Result<Vec<T>>>()?;
    if items.is_empty() {
        return Err(Error::Config(format!("{key}: list is empty")));
    }
    Ok(items)
}

fn parse_scalar<T: std::str::FromStr>(key: &str, raw: &str) -> Result<T> {
    let raw = raw.trim();
    raw.parse::<T>()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {raw:?}")))
}

impl SweepConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = SweepConfig::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once(':')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key: value`", lineno + 1)))?;
            let key = key.trim();
            match key {
                "num_qubits" => cfg.num_qubits = parse_items(key, value)?,
                "nodes" => cfg.nodes = parse_items(key, value)?,
                "theta" => {
                    cfg.theta = parse_items::<f64>(key, value)?
                        .into_iter()
                        .map(normalize_theta)
                        .collect()
                }
                "modes" => cfg.modes = parse_items(key, value)?,
                "shots" => cfg.shots = parse_scalar(key, value)?,
                "seed" => cfg.seed = parse_scalar(key, value)?,
                "repeats" => cfg.repeats = parse_scalar(key, value)?,
                "output_path" => {
                    let path = value.trim().trim_matches(|c| c == '"' || c == '\'');
                    if path.is_empty() {
                        return Err(Error::Config("output_path is empty".into()));
                    }
                    cfg.output_path = PathBuf::from(path);
                }
                other => return Err(Error::Config(format!("unknown key {other:?}"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_qubits.is_empty() || self.nodes.is_empty() || self.theta.is_empty() || self.modes.is_empty() {
            return Err(Error::Config("every list must be nonempty".into()));
        }
        if self.shots == 0 {
            return Err(Error::Config("shots must be at least 1".into()));
        }
        if self.repeats == 0 {
            return Err(Error::Config("repeats must be at least 1".into()));
        }
        if self.num_qubits.contains(&0) || self.nodes.contains(&0) {
            return Err(Error::Config("qubit and node counts must be positive".into()));
        }
        if let Some(t) = self.theta.iter().find(|t| !(0.0..1.0).contains(*t)) {
            return Err(Error::InvalidTheta(*t));
        }
        Ok(())
    }

    /// Output file after applying the [`OUTPUT_DIR_ENV`] override.
    pub fn resolved_output_path(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(dir) if !dir.is_empty() => {
                let name = self
                    .output_path
                    .file_name()
                    .map(PathBuf::from)
                    .unwrap_or_else(|| PathBuf::from("sweep.csv"));
                PathBuf::from(dir).join(name)
            }
            _ => self.output_path.clone(),
        }
    }

    /// Valid `(n, k)` pairs in config order; pairs with `k > n` are dropped.
    pub fn valid_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for &n in &self.num_qubits {
            for &k in &self.nodes {
                if k <= n {
                    pairs.push((n, k));
                }
            }
        }
        pairs
    }

    /// Number of rows a complete sweep produces.
    pub fn expected_rows(&self) -> usize {
        self.valid_pairs().len() * self.theta.len() * self.modes.len() * self.repeats
    }
}
