//! Lower-bound laboratory: rank-one POVMs, Lüders and induced channels,
//! Rademacher hard instances, exact χ² divergences against the
//! Ingster–Suslina bound, the linear/non-linear split of the likelihood
//! correlations and adversarial perturbation bases.

mod channel;
mod divergence;
mod instance;
mod povm;
mod scenario;

pub use channel::{induced_channel, lueders_channel, Superoperator};
pub use divergence::{
    chi2_exact, ingster_suslina_bound, linear_split, linearized_terms, mean_phi, normalization_check, phi_likelihood,
    phi_lueders, tensor_perturbation, Enumeration, LinearizedTerms, ENUMERATION_BUDGET,
};
pub use instance::{adversarial_basis, calibrate_scale, frame_norm, HardInstanceEnsemble};
pub use povm::{outcome_distribution, PovmJson, RankOnePovm};
pub use scenario::{BasisChoice, RoundTerm, Scenario, ScenarioResult, ScheduleSpec};
