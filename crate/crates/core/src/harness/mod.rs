//! Experiment orchestration: configuration, calibration profiles, the trial
//! runner with CSV/JSON reports, and the invariant verification suite.

mod calibrate;
mod config;
pub mod instances;
mod profile;
mod report;
mod run;
mod verify;

pub use calibrate::{calibrate, calibrate_point, CalibrationGrid, GridPoint, SearchSettings};
pub use config::{ExperimentConfig, Mode, Protocol};
pub use profile::{Profile, ProfileEntry};
pub use report::{
    csv_string, wilson_lower, write_csv, write_reports, ArmSummary, RunSummary, TrialReport, Verdict, CSV_HEADER,
};
pub use run::{resolve_n, run, RunOutput};
pub use verify::{moment_checks, verify_suite, verify_suite_with, Check, Fault, Scope, VerifyReport};
