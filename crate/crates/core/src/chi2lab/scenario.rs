use super::{
    adversarial_basis, chi2_exact, induced_channel, ingster_suslina_bound, lueders_channel, mean_phi, Enumeration,
    HardInstanceEnsemble, PovmJson, RankOnePovm,
};
use crate::error::{QcError, Result};
use crate::qcore::{checked_pow, Caps, CMat, C64};
use crate::rng::Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisChoice {
    Gellmann,
    Adversarial,
}

/// Either explicit POVMs (one per round, or one reused for all rounds) or
/// `"random:k"` for fresh random rank-one POVMs with `k` outcomes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScheduleSpec {
    Explicit(Vec<PovmJson>),
    Random(String),
}

/// Lower-bound scenario file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub d: usize,
    pub t: usize,
    pub n: usize,
    pub ell: usize,
    pub eps: f64,
    pub c: f64,
    pub basis: BasisChoice,
    pub schedule: ScheduleSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundTerm {
    pub round: usize,
    pub mean_phi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub chi2_exact: f64,
    pub is_bound: f64,
    pub per_term_breakdown: Vec<RoundTerm>,
}

impl Scenario {
    pub fn schedule(&self, rng: &mut Rng) -> Result<Vec<RankOnePovm>> {
        let dim = checked_pow(self.d, self.t).ok_or_else(|| QcError::InvalidParameter("d^t overflows".into()))?;
        let povms = match &self.schedule {
            ScheduleSpec::Explicit(list) => {
                let parsed = list.iter().map(RankOnePovm::from_json).collect::<Result<Vec<_>>>()?;
                match parsed.len() {
                    1 => vec![parsed[0].clone(); self.n],
                    k if k == self.n => parsed,
                    k => return Err(QcError::InvalidParameter(format!("{k} POVMs for n = {} rounds", self.n))),
                }
            }
            ScheduleSpec::Random(spec) => {
                let k: usize = spec
                    .strip_prefix("random:")
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| QcError::InvalidParameter(format!("schedule '{spec}' is not random:k")))?;
                (0..self.n).map(|_| RankOnePovm::random(dim, k, rng)).collect::<Result<Vec<_>>>()?
            }
        };
        if let Some(p) = povms.iter().find(|p| p.dim() != dim) {
            return Err(QcError::Shape(format!("POVM dimension {} for d^t = {dim}", p.dim())));
        }
        Ok(povms)
    }

    /// Ensemble for the given schedule. The adversarial basis uses the
    /// induced channel of the round-averaged Lüders channel.
    pub fn ensemble(&self, schedule: &[RankOnePovm], caps: &Caps) -> Result<HardInstanceEnsemble> {
        match self.basis {
            BasisChoice::Gellmann => HardInstanceEnsemble::gell_mann(self.d, self.ell, self.eps, self.c),
            BasisChoice::Adversarial => {
                let mut avg: Option<CMat> = None;
                for p in schedule {
                    let s = lueders_channel(p)?.liouville().clone();
                    avg = Some(match avg {
                        Some(a) => a + s,
                        None => s,
                    });
                }
                let avg = avg.ok_or_else(|| QcError::InvalidParameter("empty schedule".into()))?
                    / C64::new(schedule.len() as f64, 0.0);
                let h = super::Superoperator::new(schedule[0].dim(), avg)?;
                let ind = induced_channel(&h, self.d, self.t, caps)?;
                let (basis, _) = adversarial_basis(&ind, self.ell)?;
                HardInstanceEnsemble::new(self.d, self.ell, self.eps, self.c, basis)
            }
        }
    }

    pub fn run(&self, rng: &mut Rng, caps: &Caps, en: Enumeration) -> Result<ScenarioResult> {
        let schedule = self.schedule(rng)?;
        let ens = self.ensemble(&schedule, caps)?;
        let chi2 = chi2_exact(&ens, &schedule, self.t, en)?;
        let bound = ingster_suslina_bound(&ens, &schedule, self.t, en)?;
        let per_term_breakdown = mean_phi(&ens, &schedule, self.t)?
            .into_iter()
            .enumerate()
            .map(|(round, mean_phi)| RoundTerm { round, mean_phi })
            .collect();
        Ok(ScenarioResult { chi2_exact: chi2, is_bound: bound, per_term_breakdown })
    }
}
