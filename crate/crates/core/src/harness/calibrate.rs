use super::report::wilson_lower;
use super::{run, ExperimentConfig, Profile, ProfileEntry, Protocol};
use crate::error::{QcError, Result};
use crate::par::Exec;
use crate::qcore::Caps;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub protocol: Protocol,
    pub d: usize,
    pub t: usize,
    pub eps: f64,
}

/// Grid file: the points to calibrate and how hard to test each candidate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationGrid {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub points: Vec<GridPoint>,
}

fn default_name() -> String {
    "calibrated".into()
}

fn default_trials() -> usize {
    200
}

fn default_seed() -> u64 {
    1
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchSettings {
    pub n_min: usize,
    pub n_max: usize,
    /// Ratio between consecutive candidates.
    pub growth: f64,
    /// Normal quantile of the Wilson lower bound every arm must clear.
    pub z: f64,
}

impl Default for SearchSettings {
    fn default() -> Self {
        SearchSettings { n_min: 2, n_max: 1 << 14, growth: 2f64.sqrt(), z: 2.0 }
    }
}

/// Smallest candidate `n` on the geometric ladder for which every arm's
/// success count has a Wilson lower bound of at least `target`.
pub fn calibrate_point(
    point: &GridPoint,
    target: f64,
    trials: usize,
    seed: u64,
    settings: SearchSettings,
    caps: &Caps,
    exec: Exec,
) -> Result<usize> {
    if !point.protocol.uses_batches() {
        return Err(QcError::InvalidParameter(format!("{} has no batch count to calibrate", point.protocol)));
    }
    if !(target > 0.0 && target < 1.0) {
        return Err(QcError::Calibration(format!(
            "target {target} is unreachable: the Wilson lower bound of {trials} trials is below 1"
        )));
    }
    let profile = Profile::builtin();
    let mut n = settings.n_min.max(2);
    let mut last = Vec::new();
    while n <= settings.n_max {
        let cfg = ExperimentConfig::new(point.protocol, point.d, point.t, point.eps, trials, seed).with_n(n);
        let out = run(&cfg, &profile, caps, exec)?;
        last = out.summary.arms.iter().map(|a| (a.arm.clone(), 1.0 - a.error_rate)).collect();
        let ok = out
            .summary
            .arms
            .iter()
            .all(|a| wilson_lower(a.trials - a.errors, a.trials, settings.z) >= target);
        if ok {
            return Ok(n);
        }
        n = ((n as f64 * settings.growth).ceil() as usize).max(n + 1);
    }
    Err(QcError::Calibration(format!(
        "{} at d={}, t={}, eps={}: no n <= {} reaches success {target}; success rates at the largest n: {last:?}",
        point.protocol, point.d, point.t, point.eps, settings.n_max
    )))
}

pub fn calibrate(grid: &CalibrationGrid, target: f64, settings: SearchSettings, caps: &Caps, exec: Exec) -> Result<Profile> {
    let mut profile = Profile { name: grid.name.clone(), target, trials: grid.trials, entries: Vec::new() };
    for p in &grid.points {
        let n = calibrate_point(p, target, grid.trials, grid.seed, settings, caps, exec)?;
        profile.upsert(ProfileEntry { protocol: p.protocol, d: p.d, t: p.t, eps: p.eps, n });
    }
    Ok(profile)
}
