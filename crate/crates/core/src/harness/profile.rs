use super::Protocol;
use crate::error::{QcError, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

const DEFAULT_PROFILE: &str = include_str!("../../profiles/default.json");
const EPS_MATCH: f64 = 1e-9;

/// Calibrated batch count for one grid point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub protocol: Protocol,
    pub d: usize,
    pub t: usize,
    pub eps: f64,
    pub n: usize,
}

/// Named set of batch counts with the success target they were
/// calibrated for.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub name: String,
    pub target: f64,
    /// Trials per arm used to certify each entry.
    pub trials: usize,
    pub entries: Vec<ProfileEntry>,
}

impl Profile {
    /// The profile shipped with the crate.
    pub fn builtin() -> Profile {
        serde_json::from_str(DEFAULT_PROFILE).expect("bundled profile parses")
    }

    /// `"default"` resolves to the bundled profile; anything else is read
    /// as a JSON file path.
    pub fn load(name: &str) -> Result<Profile> {
        if name == "default" {
            return Ok(Self::builtin());
        }
        let path = Path::new(name);
        if !path.is_file() {
            return Err(QcError::InvalidParameter(format!("no profile named '{name}'")));
        }
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    pub fn lookup(&self, protocol: Protocol, d: usize, t: usize, eps: f64) -> Option<usize> {
        self.entries
            .iter()
            .find(|e| e.protocol == protocol && e.d == d && e.t == t && (e.eps - eps).abs() < EPS_MATCH)
            .map(|e| e.n)
    }

    /// Inserts or replaces the entry for the same grid point.
    pub fn upsert(&mut self, entry: ProfileEntry) {
        match self.entries.iter_mut().find(|e| {
            e.protocol == entry.protocol && e.d == entry.d && e.t == entry.t && (e.eps - entry.eps).abs() < EPS_MATCH
        }) {
            Some(e) => *e = entry,
            None => self.entries.push(entry),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_parses_and_lookup_matches_eps_loosely() {
        let mut p = Profile::builtin();
        p.upsert(ProfileEntry { protocol: Protocol::Mixedness, d: 2, t: 1, eps: 0.6, n: 12 });
        p.upsert(ProfileEntry { protocol: Protocol::Mixedness, d: 2, t: 1, eps: 0.6, n: 10 });
        assert_eq!(p.lookup(Protocol::Mixedness, 2, 1, 0.6 + 1e-12), Some(10));
        assert_eq!(p.lookup(Protocol::Mixedness, 2, 3, 0.6), None);
    }

    #[test]
    fn unknown_names_are_config_errors() {
        assert!(matches!(Profile::load("no-such-profile"), Err(QcError::InvalidParameter(_))));
    }
}
