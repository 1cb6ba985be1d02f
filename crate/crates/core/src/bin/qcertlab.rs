use clap::{Args, Parser, Subcommand};
use qcertlab::harness::{
    calibrate, run, write_reports, CalibrationGrid, ExperimentConfig, Fault, Mode, Profile, Protocol, Scope,
    SearchSettings,
};
use qcertlab::par::Exec;
use qcertlab::qcore::Caps;
use qcertlab::QcError;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_PASS: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_RESOURCE: u8 = 2;
const EXIT_CONFIG: u8 = 3;

#[derive(Parser)]
#[command(name = "qcertlab", version, about = "Simulation lab for quantum state certification")]
struct Cli {
    /// Run trials on the calling thread only.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Moment identities against the oracle at (d, t).
    VerifyMoments(RunArgs),
    /// Collision purity estimate with t-copy PTSW batches.
    Purity(RunArgs),
    /// Maximally mixed vs far state.
    Mixedness(RunArgs),
    /// Bucketed certification of a known state.
    Certify(RunArgs),
    /// Closeness with single-copy uniform POVM outcomes.
    ClosenessUnif(RunArgs),
    /// Closeness with t-copy estimates of both states.
    ClosenessTcopy(RunArgs),
    /// Batched BOW closeness tester.
    Bow(RunArgs),
    /// Exact chi-square against the Ingster-Suslina bound.
    Chi2(RunArgs),
    /// Runs an experiment from a JSON config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Runs the invariant suite.
    Verify {
        #[arg(long, default_value = "all")]
        scope: String,
        /// Inject a deliberate defect (perturbed-projector).
        #[arg(long)]
        fault: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Finds the smallest batch counts reaching a success probability.
    Calibrate {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        target: f64,
        /// Where to write the profile; printed to stdout otherwise.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Normal quantile of the Wilson lower bound each arm must clear.
        #[arg(long, default_value_t = 2.0)]
        z: f64,
        #[arg(long, default_value_t = 1 << 14)]
        n_max: usize,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 1)]
    t: usize,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    /// Batch count; taken from the profile when omitted.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "mc")]
    mode: String,
    #[arg(long, default_value = "default")]
    profile: String,
    /// Directory for trials.csv, trials.json and summary.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn into_config(self, protocol: Protocol) -> Result<ExperimentConfig, QcError> {
        Ok(ExperimentConfig {
            protocol,
            d: self.d,
            t: self.t,
            eps: self.eps,
            n: self.n,
            trials: self.trials,
            seed: self.seed,
            mode: self.mode.parse::<Mode>()?,
            out: self.out,
            profile: self.profile,
        })
    }
}

fn exit_code(e: &QcError) -> u8 {
    match e {
        QcError::ResourceLimit { .. } => EXIT_RESOURCE,
        QcError::InvalidParameter(_) | QcError::InvalidDimension(_) | QcError::Io(_) | QcError::Serde(_) => {
            EXIT_CONFIG
        }
        _ => EXIT_FAIL,
    }
}

fn print_json<T: serde::Serialize>(v: &T) -> Result<(), QcError> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn run_experiment(config: ExperimentConfig, exec: Exec) -> Result<u8, QcError> {
    let caps = Caps::from_env()?;
    let profile = Profile::load(&config.profile)?;
    let out = run(&config, &profile, &caps, exec)?;
    if let Some(dir) = &config.out {
        write_reports(dir, &out.reports, &out.summary)?;
    }
    print_json(&out.summary)?;
    Ok(if out.summary.pass { EXIT_PASS } else { EXIT_FAIL })
}

fn dispatch(cli: Cli) -> Result<u8, QcError> {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::default() };
    let protocol_run = |p: Protocol, a: RunArgs| run_experiment(a.into_config(p)?, exec);
    match cli.command {
        Command::VerifyMoments(a) => protocol_run(Protocol::VerifyMoments, a),
        Command::Purity(a) => protocol_run(Protocol::Purity, a),
        Command::Mixedness(a) => protocol_run(Protocol::Mixedness, a),
        Command::Certify(a) => protocol_run(Protocol::Certify, a),
        Command::ClosenessUnif(a) => protocol_run(Protocol::ClosenessUnif, a),
        Command::ClosenessTcopy(a) => protocol_run(Protocol::ClosenessTcopy, a),
        Command::Bow(a) => protocol_run(Protocol::Bow, a),
        Command::Chi2(a) => protocol_run(Protocol::Chi2, a),
        Command::Run { config } => {
            let cfg: ExperimentConfig = serde_json::from_str(&std::fs::read_to_string(config)?)?;
            run_experiment(cfg, exec)
        }
        Command::Verify { scope, fault, out } => {
            let scope: Scope = scope.parse()?;
            let faults = fault
                .iter()
                .map(|f| serde_json::from_value::<Fault>(serde_json::Value::String(f.clone())))
                .collect::<Result<Vec<_>, _>>()?;
            let report = qcertlab::harness::verify_suite_with(scope, &Caps::from_env()?, &faults);
            if let Some(path) = out {
                std::fs::write(path, serde_json::to_string_pretty(&report)? + "\n")?;
            }
            for c in report.failures() {
                eprintln!("FAIL [{}] {}: {} > {} {}", c.scope, c.invariant, c.value, c.tolerance, c.detail);
            }
            print_json(&report)?;
            Ok(if report.pass { EXIT_PASS } else { EXIT_FAIL })
        }
        Command::Calibrate { grid, target, out, z, n_max } => {
            let grid: CalibrationGrid = serde_json::from_str(&std::fs::read_to_string(grid)?)?;
            let settings = SearchSettings { z, n_max, ..SearchSettings::default() };
            let profile = calibrate(&grid, target, settings, &Caps::from_env()?, exec)?;
            match out {
                Some(path) => profile.save(&path)?,
                None => print_json(&profile)?,
            }
            Ok(EXIT_PASS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
