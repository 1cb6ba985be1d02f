//! Simulation lab for quantum state certification.
//!
//! The crate is organised bottom-up: [`qcore`] holds dense complex linear
//! algebra and state types, [`schurweyl`] the symmetric-group machinery,
//! [`estimators`] the single-shot state estimators, [`testers`] the
//! hypothesis tests built on them, [`chi2lab`] the exact chi-square
//! lower-bound computations, and [`harness`] the experiment runner behind the
//! `qcertlab` binary.

pub mod chi2lab;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod par;
pub mod qcore;
pub mod rng;
pub mod schurweyl;
pub mod testers;

pub use error::{QcError, Result};
