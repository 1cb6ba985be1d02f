use crate::error::Result;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

/// One row of the trial table. `wall_time_ms` is kept in memory and in the
/// summary only, so the per-trial files are byte-reproducible.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub trial_id: usize,
    pub protocol: String,
    pub d: usize,
    pub t: usize,
    pub eps: f64,
    pub n_batches: usize,
    pub copies_used: usize,
    pub statistic: f64,
    pub threshold: f64,
    pub verdict: Verdict,
    pub seed: u64,
    #[serde(skip)]
    pub wall_time_ms: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
}

impl From<bool> for Verdict {
    fn from(accept: bool) -> Self {
        if accept {
            Verdict::Accept
        } else {
            Verdict::Reject
        }
    }
}

/// Aggregates over the trials of one arm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmSummary {
    pub arm: String,
    pub expect_accept: bool,
    pub trials: usize,
    pub errors: usize,
    pub error_rate: f64,
    pub error_rate_se: f64,
    pub mean_statistic: f64,
    pub statistic_se: f64,
    pub statistic_variance: f64,
    pub mean_copies: f64,
    /// Exact mean and variance of the statistic, when an oracle exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<(f64, f64)>,
}

impl ArmSummary {
    pub fn from_reports(arm: &str, expect_accept: bool, rows: &[&TrialReport]) -> ArmSummary {
        let k = rows.len();
        let kf = k as f64;
        let errors = rows.iter().filter(|r| (r.verdict == Verdict::Accept) != expect_accept).count();
        let error_rate = if k > 0 { errors as f64 / kf } else { 0.0 };
        let stats: Vec<f64> = rows.iter().map(|r| r.statistic).collect();
        let mean = if k > 0 { crate::par::pairwise_sum(&stats) / kf } else { f64::NAN };
        let var = if k > 1 { stats.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (kf - 1.0) } else { 0.0 };
        ArmSummary {
            arm: arm.into(),
            expect_accept,
            trials: k,
            errors,
            error_rate,
            error_rate_se: if k > 0 { (error_rate * (1.0 - error_rate) / kf).sqrt() } else { 0.0 },
            mean_statistic: mean,
            statistic_se: if k > 0 { (var / kf).sqrt() } else { 0.0 },
            statistic_variance: var,
            mean_copies: rows.iter().map(|r| r.copies_used as f64).sum::<f64>() / kf.max(1.0),
            exact: None,
        }
    }
}

/// Aggregate over a whole run. `pass` requires every arm's error rate to be
/// at most 1/3.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub protocol: String,
    pub mode: String,
    pub d: usize,
    pub t: usize,
    pub eps: f64,
    pub n: Option<usize>,
    pub seed: u64,
    pub arms: Vec<ArmSummary>,
    pub pass: bool,
    pub wall_time_ms: f64,
}

pub const CSV_HEADER: [&str; 11] =
    ["trial_id", "protocol", "d", "t", "eps", "n_batches", "copies_used", "statistic", "threshold", "verdict", "seed"];

pub fn write_csv<W: Write>(rows: &[TrialReport], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(rows: &[TrialReport]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

/// Writes `trials.csv`, `trials.json` and `summary.json` under `dir`.
pub fn write_reports(dir: &Path, rows: &[TrialReport], summary: &RunSummary) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_csv(rows, std::fs::File::create(dir.join("trials.csv"))?)?;
    std::fs::write(dir.join("trials.json"), serde_json::to_string_pretty(rows)? + "\n")?;
    std::fs::write(dir.join("summary.json"), serde_json::to_string_pretty(summary)? + "\n")?;
    Ok(())
}

/// Wilson score interval lower bound for `k` successes out of `n` at normal
/// quantile `z`.
pub fn wilson_lower(k: usize, n: usize, z: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = z * z;
    let centre = p + z2 / (2.0 * nf);
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    (centre - half) / (1.0 + z2 / nf)
}
