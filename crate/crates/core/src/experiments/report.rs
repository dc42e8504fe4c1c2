//! Benchmark reports: rows, binomial statistics, CSV/JSON files.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `trials` at 95%.
/// Returns `(0, 1)` when `trials == 0`.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// One aggregated group of trials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    /// `bf`, `bp`, `mcmc` or `hybrid`.
    pub decoder: String,
    pub k: usize,
    pub epsilon: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub trials: u64,
    /// Trials that reached the target.
    pub successes: u64,
    /// Trials that reached some codeword (sampling strategies only).
    pub any_codeword: Option<u64>,
    /// Trials with at least one majority-vote tie (counted as failures).
    pub ties: u64,
    /// Mean iterations (BF/BP) or mean samples consumed (sampling).
    pub mean_iterations: f64,
    pub failure_probability: f64,
    /// Binomial standard error of the failure probability.
    pub std_error: f64,
    pub failure_ci_low: f64,
    pub failure_ci_high: f64,
}

impl ReportRow {
    pub(crate) fn new(decoder: &str, k: usize, trials: u64, successes: u64) -> Self {
        let (p, se, lo, hi) = if trials == 0 {
            (0.0, 0.0, 0.0, 1.0)
        } else {
            let n = trials as f64;
            let p = 1.0 - successes as f64 / n;
            let (slo, shi) = wilson_interval(successes, trials);
            (p, (p * (1.0 - p) / n).sqrt(), 1.0 - shi, 1.0 - slo)
        };
        Self {
            decoder: decoder.to_string(),
            k,
            epsilon: None,
            beta: None,
            gamma: None,
            trials,
            successes,
            any_codeword: None,
            ties: 0,
            mean_iterations: 0.0,
            failure_probability: p,
            std_error: se,
            failure_ci_low: lo,
            failure_ci_high: hi,
        }
    }

    pub fn success_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.successes as f64 / self.trials as f64
        }
    }

    /// Wilson interval of the success rate.
    pub fn success_interval(&self) -> (f64, f64) {
        wilson_interval(self.successes, self.trials)
    }
}

/// Rows plus the configuration and master seed that produced them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    /// Verbatim configuration echo.
    pub config: serde_json::Value,
    pub seed: u64,
    pub rows: Vec<ReportRow>,
}

impl BenchmarkReport {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        if self.rows.is_empty() {
            out.write_record(CSV_HEADER)?;
        }
        for r in &self.rows {
            out.serialize(r)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn read_csv_rows<R: Read>(r: R) -> Result<Vec<ReportRow>> {
        let mut rd = csv::Reader::from_reader(r);
        Ok(rd
            .deserialize()
            .collect::<std::result::Result<Vec<ReportRow>, _>>()?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// `<prefix>-<config hash>-seed<seed>`.
    pub fn file_stem(&self, prefix: &str) -> String {
        format!("{prefix}-{}-seed{}", config_hash(&self.config), self.seed)
    }

    /// Writes `<stem>.csv` and `<stem>.json` into `dir` and returns both paths.
    pub fn write_files(&self, dir: &Path, prefix: &str) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let stem = self.file_stem(prefix);
        let csv_path = dir.join(format!("{stem}.csv"));
        let json_path = dir.join(format!("{stem}.json"));
        self.write_csv(fs::File::create(&csv_path)?)?;
        fs::write(&json_path, self.to_json()?)?;
        Ok((csv_path, json_path))
    }

    /// The row matching `decoder`, `k` and the given parameters, if any.
    pub fn find(&self, decoder: &str, k: usize, epsilon: Option<f64>) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.decoder == decoder && r.k == k && r.epsilon == epsilon)
    }
}

const CSV_HEADER: [&str; 14] = [
    "decoder",
    "k",
    "epsilon",
    "beta",
    "gamma",
    "trials",
    "successes",
    "any_codeword",
    "ties",
    "mean_iterations",
    "failure_probability",
    "std_error",
    "failure_ci_low",
    "failure_ci_high",
];

/// First 12 hex digits of the SHA-256 of the compact JSON config.
pub fn config_hash(config: &serde_json::Value) -> String {
    let digest = Sha256::digest(config.to_string().as_bytes());
    hex::encode(digest)[..12].to_string()
}
