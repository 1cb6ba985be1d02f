use super::instances::{far_from_mixed, hs_shifted, planted_coherence, reference_state};
use super::report::{ArmSummary, RunSummary, TrialReport, Verdict};
use super::verify::moment_checks;
use super::{ExperimentConfig, Mode, Profile, Protocol};
use crate::chi2lab::{BasisChoice, Enumeration, Scenario, ScheduleSpec};
use crate::error::{QcError, Result};
use crate::estimators::{ptsw_source, PtswEstimator, StateEstimator};
use crate::par::Exec;
use crate::qcore::{Caps, DensityMatrix};
use crate::rng::{stream, Rng};
use crate::testers::{
    bow_batched_test, closeness_test_tcopy, closeness_test_uniform, mixedness_test_with, purity_estimate,
    BowEstimator, CertifyParams, Certifier, EstimatorMoments, TesterVerdict,
};
use std::time::Instant;

/// Largest `ℓ` used by the chi-square protocol.
const CHI2_MAX_ELL: usize = 3;

type TrialFn = Box<dyn Fn(&mut Rng) -> Result<TesterVerdict> + Send + Sync>;

/// One hypothesis of a protocol together with the verdict it should get.
struct Arm {
    name: &'static str,
    expect_accept: bool,
    trial: TrialFn,
    exact: Option<(f64, f64)>,
}

impl Arm {
    fn new(name: &'static str, expect_accept: bool, trial: TrialFn) -> Self {
        Arm { name, expect_accept, trial, exact: None }
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub reports: Vec<TrialReport>,
    pub summary: RunSummary,
}

/// Batch count for `config`: explicit `n`, else the profile entry.
pub fn resolve_n(config: &ExperimentConfig, profile: &Profile) -> Result<usize> {
    if let Some(n) = config.n {
        return Ok(n);
    }
    if !config.protocol.uses_batches() {
        return Ok(2);
    }
    profile.lookup(config.protocol, config.d, config.t, config.eps).ok_or_else(|| {
        QcError::InvalidParameter(format!(
            "profile '{}' has no batch count for {} at d={}, t={}, eps={}; pass --n",
            profile.name, config.protocol, config.d, config.t, config.eps
        ))
    })
}

/// Names the offending `(d, t)` in resource-limit errors.
fn in_context(e: QcError, d: usize, t: usize) -> QcError {
    match e {
        QcError::ResourceLimit { what, size, cap } => {
            QcError::ResourceLimit { what: format!("{what} at (d={d}, t={t})"), size, cap }
        }
        other => other,
    }
}

pub fn run(config: &ExperimentConfig, profile: &Profile, caps: &Caps, exec: Exec) -> Result<RunOutput> {
    config.validate()?;
    let start = Instant::now();
    if config.protocol == Protocol::VerifyMoments {
        return verify_moments(config, caps, start);
    }
    let n = resolve_n(config, profile)?;
    let arms = build_arms(config, n, caps).map_err(|e| in_context(e, config.d, config.t))?;
    let trials = if config.mode == Mode::Exact { 1 } else { config.trials };
    let mut reports = Vec::with_capacity(arms.len() * trials);
    let mut summaries = Vec::with_capacity(arms.len());
    for arm in &arms {
        let label = arm_label(config.protocol, arm.name);
        let rows = exec.map(trials, |i| {
            let t0 = Instant::now();
            let mut rng = stream(config.seed, &label, i as u64);
            let v = (arm.trial)(&mut rng)?;
            Ok(TrialReport {
                trial_id: i,
                protocol: label.clone(),
                d: config.d,
                t: v.t,
                eps: config.eps,
                n_batches: v.n_batches,
                copies_used: v.copies_used,
                statistic: v.statistic,
                threshold: v.threshold,
                verdict: v.accept.into(),
                seed: config.seed,
                wall_time_ms: t0.elapsed().as_secs_f64() * 1e3,
            })
        });
        let rows = rows.into_iter().collect::<Result<Vec<_>>>().map_err(|e| in_context(e, config.d, config.t))?;
        let refs: Vec<&TrialReport> = rows.iter().collect();
        let mut s = ArmSummary::from_reports(arm.name, arm.expect_accept, &refs);
        s.exact = arm.exact;
        summaries.push(s);
        reports.extend(rows);
    }
    Ok(finish(config, Some(n), reports, summaries, start))
}

fn arm_label(p: Protocol, arm: &str) -> String {
    if arm.is_empty() {
        p.name().to_string()
    } else {
        format!("{}/{arm}", p.name())
    }
}

fn finish(
    config: &ExperimentConfig,
    n: Option<usize>,
    reports: Vec<TrialReport>,
    arms: Vec<ArmSummary>,
    start: Instant,
) -> RunOutput {
    let pass = arms.iter().all(|a| 3 * a.errors <= a.trials);
    let summary = RunSummary {
        protocol: config.protocol.name().into(),
        mode: config.mode.to_string(),
        d: config.d,
        t: config.t,
        eps: config.eps,
        n,
        seed: config.seed,
        arms,
        pass,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    RunOutput { reports, summary }
}

fn verify_moments(config: &ExperimentConfig, caps: &Caps, start: Instant) -> Result<RunOutput> {
    let (d, t) = (config.d, config.t);
    Caps::check_pow("(d·ℓ)^(t+2)", d * d.min(t), t + 2, caps.oracle).map_err(|e| in_context(e, d, t))?;
    let checks = moment_checks(d, t, config.seed, caps);
    let mut reports = Vec::with_capacity(checks.len());
    let mut arms = Vec::with_capacity(checks.len());
    for (i, c) in checks.iter().enumerate() {
        let row = TrialReport {
            trial_id: i,
            protocol: format!("verify-moments/{}", c.invariant),
            d,
            t,
            eps: config.eps,
            n_batches: 0,
            copies_used: 0,
            statistic: c.value,
            threshold: c.tolerance,
            verdict: Verdict::from(c.pass),
            seed: config.seed,
            wall_time_ms: 0.0,
        };
        arms.push(ArmSummary::from_reports(&c.invariant, true, &[&row]));
        reports.push(row);
    }
    Ok(finish(config, None, reports, arms, start))
}

fn boxed_source(rho: &DensityMatrix, t: usize, caps: &Caps) -> Result<std::sync::Arc<dyn StateEstimator>> {
    Ok(std::sync::Arc::from(ptsw_source(rho, t, caps)?))
}

fn build_arms(config: &ExperimentConfig, n: usize, caps: &Caps) -> Result<Vec<Arm>> {
    let (d, t, eps) = (config.d, config.t, config.eps);
    let exact = config.mode == Mode::Exact;
    let arms = match config.protocol {
        Protocol::VerifyMoments => unreachable!("handled separately"),
        Protocol::Purity => {
            let rho = reference_state(d)?;
            let p = rho.purity();
            // For purity, eps is the allowed relative error.
            let allowed = eps;
            if exact {
                let est = PtswEstimator::new(&rho, t, caps)?;
                let m = EstimatorMoments { m1: rho.mat().clone(), m2: est.second_moment()? };
                let (mean, var) = (m.mean(), m.collision_variance(n));
                let rel = (mean / p - 1.0).abs();
                let trial: TrialFn = Box::new(move |_| {
                    Ok(TesterVerdict {
                        accept: rel <= allowed,
                        statistic: rel,
                        raw_statistic: mean,
                        threshold: allowed,
                        copies_used: n * t,
                        n_batches: n,
                        t,
                    })
                });
                vec![Arm { exact: Some((mean, var)), ..Arm::new("", true, trial) }]
            } else {
                let src = boxed_source(&rho, t, caps)?;
                vec![Arm::new(
                    "",
                    true,
                    Box::new(move |rng| {
                        let r = purity_estimate(src.as_ref(), n, rng)?;
                        let rel = (r.statistic / p - 1.0).abs();
                        Ok(TesterVerdict {
                            accept: rel <= allowed,
                            statistic: rel,
                            raw_statistic: r.statistic,
                            threshold: allowed,
                            copies_used: r.copies_used,
                            n_batches: n,
                            t: r.t,
                        })
                    }),
                )]
            }
        }
        Protocol::Mixedness => {
            let t_eff = t.min(d * d);
            let mut arms = Vec::new();
            for (name, rho, expect) in
                [("null", DensityMatrix::maximally_mixed(d), true), ("alt", far_from_mixed(d, eps)?, false)]
            {
                let src = boxed_source(&rho, t_eff, caps)?;
                arms.push(Arm::new(name, expect, Box::new(move |rng| mixedness_test_with(src.as_ref(), eps, n, 1, rng))));
            }
            arms
        }
        Protocol::Certify => {
            let sigma = reference_state(d)?;
            let params = CertifyParams { t, n, ..CertifyParams::default() };
            let mut arms = Vec::new();
            for (name, rho, expect) in [("null", sigma.clone(), true), ("alt", planted_coherence(&sigma, eps)?, false)] {
                let c = std::sync::Arc::new(Certifier::new(&sigma, &rho, eps, params, caps)?);
                arms.push(Arm::new(name, expect, Box::new(move |rng| Ok(c.run(rng)?.verdict))));
            }
            arms
        }
        Protocol::ClosenessUnif => {
            let sigma = DensityMatrix::maximally_mixed(d);
            let mut arms = Vec::new();
            for (name, rho, expect) in [("null", sigma.clone(), true), ("alt", hs_shifted(d, eps)?, false)] {
                let sigma = sigma.clone();
                arms.push(Arm::new(name, expect, Box::new(move |rng| closeness_test_uniform(&rho, &sigma, eps, n, rng))));
            }
            arms
        }
        Protocol::ClosenessTcopy => {
            let sigma = DensityMatrix::maximally_mixed(d);
            let sigma_src = boxed_source(&sigma, t, caps)?;
            let mut arms = Vec::new();
            for (name, rho, expect) in [("null", sigma.clone(), true), ("alt", hs_shifted(d, eps)?, false)] {
                let rho_src = boxed_source(&rho, t, caps)?;
                let sigma_src = sigma_src.clone();
                arms.push(Arm::new(
                    name,
                    expect,
                    Box::new(move |rng| closeness_test_tcopy(rho_src.as_ref(), sigma_src.as_ref(), eps, n, rng)),
                ));
            }
            arms
        }
        Protocol::Bow => {
            let sigma = DensityMatrix::maximally_mixed(d);
            let mut arms = Vec::new();
            for (name, rho, expect) in [("null", sigma.clone(), true), ("alt", hs_shifted(d, eps)?, false)] {
                let est = std::sync::Arc::new(BowEstimator::new(&rho, &sigma, t, caps)?);
                let arm = if exact {
                    let (mean, var) = (est.exact_mean(), est.exact_variance() / n as f64);
                    let threshold = 0.75 * eps * eps;
                    let trial: TrialFn = Box::new(move |_| {
                        Ok(TesterVerdict {
                            accept: mean <= threshold,
                            statistic: mean,
                            raw_statistic: mean,
                            threshold,
                            copies_used: 2 * n * t,
                            n_batches: n,
                            t,
                        })
                    });
                    Arm { exact: Some((mean, var)), ..Arm::new(name, expect, trial) }
                } else {
                    Arm::new(name, expect, Box::new(move |rng| bow_batched_test(&est, eps, n, rng)))
                };
                arms.push(arm);
            }
            arms
        }
        Protocol::Chi2 => {
            let dim = caps.check_dim("d^t", d, t)?;
            let scenario = Scenario {
                d,
                t,
                n,
                ell: (d * d - 1).min(CHI2_MAX_ELL),
                eps,
                c: 1.0,
                basis: BasisChoice::Gellmann,
                schedule: ScheduleSpec::Random(format!("random:{}", dim + 2)),
            };
            let caps = *caps;
            vec![Arm::new(
                "",
                true,
                Box::new(move |rng| {
                    let r = scenario.run(rng, &caps, Enumeration { exec: Exec::Sequential, ..Enumeration::default() })?;
                    Ok(TesterVerdict {
                        accept: r.chi2_exact <= r.is_bound + 1e-12,
                        statistic: r.chi2_exact,
                        raw_statistic: r.chi2_exact,
                        threshold: r.is_bound,
                        copies_used: n * t,
                        n_batches: n,
                        t,
                    })
                }),
            )]
        }
    };
    Ok(arms)
}
