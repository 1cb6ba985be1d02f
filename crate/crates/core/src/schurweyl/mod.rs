//! Symmetric-group representation theory on `(C^d)^{⊗t}`: partitions,
//! characters, isotypic projectors, weak Schur sampling and the Haar moment
//! oracle used to validate every closed-form moment identity.

mod character;
mod oracle;
mod partition;
mod projector;
mod sampling;
mod symfun;

pub use character::{character, class_size};
pub use oracle::{haar_moment_oracle, haar_moment_oracle_factor, symmetrize_columns};
pub use partition::{partitions, partitions_with_max_len, Partition};
pub use projector::{apply_isotypic, isotypic_projector, projector_coefficients};
pub use symfun::{
    max_monomial, power_sum, schur_distribution, schur_poly, schur_poly_power_sums,
};
pub use sampling::{
    expected_partition_length, schur_outcomes, weak_schur_sample, SchurOutcome,
};
