use crate::error::{ensure, QcError, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    VerifyMoments,
    Purity,
    Mixedness,
    Certify,
    ClosenessUnif,
    ClosenessTcopy,
    Bow,
    Chi2,
}

impl Protocol {
    pub const ALL: [Protocol; 8] = [
        Protocol::VerifyMoments,
        Protocol::Purity,
        Protocol::Mixedness,
        Protocol::Certify,
        Protocol::ClosenessUnif,
        Protocol::ClosenessTcopy,
        Protocol::Bow,
        Protocol::Chi2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::VerifyMoments => "verify-moments",
            Protocol::Purity => "purity",
            Protocol::Mixedness => "mixedness",
            Protocol::Certify => "certify",
            Protocol::ClosenessUnif => "closeness-unif",
            Protocol::ClosenessTcopy => "closeness-tcopy",
            Protocol::Bow => "bow",
            Protocol::Chi2 => "chi2",
        }
    }

    /// Whether `mode = exact` has an oracle to run against.
    pub fn has_exact_mode(self) -> bool {
        matches!(self, Protocol::VerifyMoments | Protocol::Purity | Protocol::Bow | Protocol::Chi2)
    }

    /// Whether the protocol consumes a calibrated batch count.
    pub fn uses_batches(self) -> bool {
        !matches!(self, Protocol::VerifyMoments | Protocol::Chi2)
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Protocol {
    type Err = QcError;

    fn from_str(s: &str) -> Result<Self> {
        Protocol::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| QcError::InvalidParameter(format!("unknown protocol '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Mc,
    Exact,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Mc => "mc",
            Mode::Exact => "exact",
        })
    }
}

impl FromStr for Mode {
    type Err = QcError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mc" => Ok(Mode::Mc),
            "exact" => Ok(Mode::Exact),
            _ => Err(QcError::InvalidParameter(format!("unknown mode '{s}'"))),
        }
    }
}

/// One experiment. `n = None` takes the batch count from the profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub protocol: Protocol,
    pub d: usize,
    pub t: usize,
    pub eps: f64,
    #[serde(default)]
    pub n: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default = "default_profile")]
    pub profile: String,
}

fn default_profile() -> String {
    "default".into()
}

impl ExperimentConfig {
    pub fn new(protocol: Protocol, d: usize, t: usize, eps: f64, trials: usize, seed: u64) -> Self {
        ExperimentConfig { protocol, d, t, eps, n: None, trials, seed, mode: Mode::Mc, out: None, profile: default_profile() }
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.d >= 2, || format!("d must be at least 2, got {}", self.d))?;
        ensure(self.t >= 1, || "t must be positive".into())?;
        ensure(self.eps > 0.0 && self.eps.is_finite(), || format!("eps must be positive, got {}", self.eps))?;
        ensure(self.trials >= 1, || "trials must be positive".into())?;
        if let Some(n) = self.n {
            ensure(n >= 2 || !self.protocol.uses_batches(), || format!("n must be at least 2, got {n}"))?;
            ensure(n >= 1, || "n must be positive".into())?;
        }
        ensure(self.mode == Mode::Mc || self.protocol.has_exact_mode(), || {
            format!("mode=exact has no oracle for protocol {}", self.protocol)
        })?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn protocol_names_round_trip() {
        for p in Protocol::ALL {
            assert_eq!(p.name().parse::<Protocol>().unwrap(), p);
            let json = serde_json::to_string(&p).unwrap();
            assert_eq!(json, format!("\"{}\"", p.name()));
        }
    }

    #[test]
    fn validation() {
        let ok = ExperimentConfig::new(Protocol::Mixedness, 2, 2, 0.6, 10, 1);
        ok.validate().unwrap();
        assert!(ExperimentConfig { d: 1, ..ok.clone() }.validate().is_err());
        assert!(ExperimentConfig { eps: 0.0, ..ok.clone() }.validate().is_err());
        assert!(ok.clone().with_mode(Mode::Exact).validate().is_err());
        let json = r#"{"protocol":"bow","d":2,"t":4,"eps":0.5,"trials":3,"seed":9,"mode":"exact"}"#;
        let c: ExperimentConfig = serde_json::from_str(json).unwrap();
        c.validate().unwrap();
        assert_eq!(c.profile, "default");
    }
}
