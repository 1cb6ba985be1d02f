//! Executable invariants for every module, grouped by scope.

use crate::chi2lab::{
    adversarial_basis, chi2_exact, frame_norm, induced_channel, ingster_suslina_bound, linearized_terms,
    lueders_channel, phi_likelihood, phi_lueders, Enumeration, HardInstanceEnsemble, RankOnePovm,
};
use crate::error::{QcError, Result};
use crate::estimators::{
    gps_second_moment, hayashi_first_moment, hayashi_second_moment, register_marginals,
    tau_lambda_marginal_check, uniform_first_moment, uniform_second_moment, PtswEstimator, PurificationChannel,
};
use crate::qcore::{
    eigh, eye, gell_mann_basis, haar_unitary, kron, max_abs_diff, partial_trace, permutation_operator,
    random_density, symmetric_projector, sym_dim, trace_product, Caps, CMat, DensityMatrix, Perm, C64,
};
use crate::rng::{stream, Rng};
use crate::schurweyl::{
    character, class_size, expected_partition_length, haar_moment_oracle, isotypic_projector, partitions,
    partitions_with_max_len, schur_distribution, schur_outcomes,
};
use crate::testers::{
    bucket_plan, collision_mean, mixedness_test, BowEstimator, CertifyParams, Certifier, RadiusConstants,
};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

const SEED: u64 = 0x5eed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    All,
    Qcore,
    Schurweyl,
    Estimators,
    Testers,
    Chi2lab,
}

impl Scope {
    const MODULES: [Scope; 5] = [Scope::Qcore, Scope::Schurweyl, Scope::Estimators, Scope::Testers, Scope::Chi2lab];

    fn name(self) -> &'static str {
        match self {
            Scope::All => "all",
            Scope::Qcore => "qcore",
            Scope::Schurweyl => "schurweyl",
            Scope::Estimators => "estimators",
            Scope::Testers => "testers",
            Scope::Chi2lab => "chi2lab",
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scope {
    type Err = QcError;

    fn from_str(s: &str) -> Result<Self> {
        [Scope::All, Scope::Qcore, Scope::Schurweyl, Scope::Estimators, Scope::Testers, Scope::Chi2lab]
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| QcError::InvalidParameter(format!("unknown scope '{s}'")))
    }
}

/// Deliberate defects for exercising the suite itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Adds `1e-3` to one entry of an isotypic projector before checking it.
    PerturbedProjector,
}

/// One invariant evaluation: `value` is a deviation compared against
/// `tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub scope: Scope,
    pub invariant: String,
    pub pass: bool,
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    fn measured(scope: Scope, invariant: &str, value: f64, tolerance: f64) -> Check {
        Check {
            scope,
            invariant: invariant.into(),
            pass: value <= tolerance,
            value,
            tolerance,
            detail: String::new(),
        }
    }

    fn from_result(scope: Scope, invariant: &str, tolerance: f64, r: Result<f64>) -> Check {
        match r {
            Ok(v) if v.is_finite() => Self::measured(scope, invariant, v, tolerance),
            Ok(v) => Check { detail: "non-finite deviation".into(), ..Self::measured(scope, invariant, v, tolerance) },
            Err(e) => Check {
                scope,
                invariant: invariant.into(),
                pass: false,
                value: f64::NAN,
                tolerance,
                detail: e.to_string(),
            },
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub scope: Scope,
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

pub fn verify_suite(scope: Scope, caps: &Caps) -> VerifyReport {
    verify_suite_with(scope, caps, &[])
}

/// Runs the scoped invariants with the given faults injected.
pub fn verify_suite_with(scope: Scope, caps: &Caps, faults: &[Fault]) -> VerifyReport {
    let scopes: Vec<Scope> = if scope == Scope::All { Scope::MODULES.to_vec() } else { vec![scope] };
    let mut checks = Vec::new();
    for s in scopes {
        match s {
            Scope::Qcore => checks.extend(qcore_checks()),
            Scope::Schurweyl => checks.extend(schurweyl_checks(caps, faults)),
            Scope::Estimators => {
                for (d, t) in [(2, 1), (2, 2), (2, 3), (3, 2)] {
                    checks.extend(moment_checks(d, t, SEED, caps));
                }
                checks.push(purification_check(caps));
            }
            Scope::Testers => checks.extend(tester_checks(caps)),
            Scope::Chi2lab => checks.extend(chi2_checks(caps)),
            Scope::All => unreachable!("expanded above"),
        }
    }
    let pass = checks.iter().all(|c| c.pass);
    VerifyReport { scope, pass, checks }
}

fn rng_for(label: &str, i: u64) -> Rng {
    stream(SEED, label, i)
}

fn qcore_checks() -> Vec<Check> {
    let s = Scope::Qcore;
    let mut out = Vec::new();
    let mut rng = rng_for("qcore", 0);
    out.push(Check::from_result(s, "random states are unit-trace PSD", 1e-12, (|| {
        let mut worst: f64 = 0.0;
        for d in 2..=5 {
            let rho = random_density(d, d, &mut rng)?;
            worst = worst.max((rho.mat().trace().re - 1.0).abs()).max(-rho.spectrum()[0]);
        }
        Ok(worst)
    })()));
    out.push(Check::from_result(s, "partial trace of a product keeps the factor", 1e-12, (|| {
        let a = random_density(2, 2, &mut rng)?;
        let b = random_density(3, 3, &mut rng)?;
        let ab = kron(a.mat(), b.mat());
        Ok(max_abs_diff(&partial_trace(&ab, &[2, 3], &[0])?, a.mat())
            .max(max_abs_diff(&partial_trace(&ab, &[2, 3], &[1])?, b.mat())))
    })()));
    out.push(Check::from_result(s, "Gell-Mann basis is orthonormal and Hermitian", 1e-12, (|| {
        let mut worst: f64 = 0.0;
        for d in 2..=4 {
            let g = gell_mann_basis(d);
            for (i, x) in g.iter().enumerate() {
                worst = worst.max(max_abs_diff(x, &x.adjoint()));
                for (j, y) in g.iter().enumerate() {
                    let e = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((trace_product(x, y) - C64::new(e, 0.0)).norm());
                }
            }
        }
        Ok(worst)
    })()));
    out.push(Check::from_result(s, "Haar unitaries are unitary", 1e-12, (|| {
        let u = haar_unitary(4, &mut rng);
        Ok(max_abs_diff(&(u.adjoint() * &u), &eye(4)))
    })()));
    out.push(Check::from_result(s, "eigendecomposition reconstructs Hermitian input", 1e-10, (|| {
        let rho = random_density(5, 3, &mut rng)?;
        let (vals, vecs) = eigh(rho.mat());
        let mut m = CMat::zeros(5, 5);
        for (k, v) in vals.iter().enumerate() {
            let col = vecs.column(k);
            m += &col * col.adjoint() * C64::new(*v, 0.0);
        }
        Ok(max_abs_diff(&m, rho.mat()))
    })()));
    out.push(Check::from_result(s, "permutation operators form a representation", 1e-15, (|| {
        let perms = crate::qcore::all_permutations(3);
        let mut worst: f64 = 0.0;
        for a in &perms {
            for b in &perms {
                let lhs = permutation_operator(&Perm(a.clone()).compose(&Perm(b.clone())).0, 2);
                let rhs = permutation_operator(a, 2) * permutation_operator(b, 2);
                worst = worst.max(max_abs_diff(&lhs, &rhs));
            }
        }
        Ok(worst)
    })()));
    out.push(Check::from_result(s, "symmetric projector is idempotent with trace d[n]", 1e-10, (|| {
        let p = symmetric_projector(3, 3, &Caps::default())?;
        Ok(max_abs_diff(&(&p * &p), &p).max((p.trace().re - sym_dim(3, 3)).abs()))
    })()));
    out
}

fn schurweyl_checks(caps: &Caps, faults: &[Fault]) -> Vec<Check> {
    let s = Scope::Schurweyl;
    let mut out = Vec::new();
    out.push(Check::from_result(s, "isotypic projectors are orthogonal idempotents summing to identity", 1e-10, (|| {
        let mut worst: f64 = 0.0;
        for (d, t) in [(2usize, 3usize), (3, 3), (2, 4)] {
            let dim = d.pow(t as u32);
            let mut projs: Vec<CMat> = partitions_with_max_len(t, d)
                .iter()
                .map(|l| isotypic_projector(l, d, caps).map(|p| (*p).clone()))
                .collect::<Result<_>>()?;
            if faults.contains(&Fault::PerturbedProjector) {
                projs[0][(0, 1)] += C64::new(1e-3, 0.0);
            }
            let mut sum = CMat::zeros(dim, dim);
            for (i, p) in projs.iter().enumerate() {
                worst = worst.max(max_abs_diff(&(p * p), p)).max(max_abs_diff(p, &p.adjoint()));
                for q in &projs[i + 1..] {
                    worst = worst.max((p * q).norm());
                }
                sum += p;
            }
            worst = worst.max(max_abs_diff(&sum, &eye(dim)));
        }
        Ok(worst)
    })()));
    out.push(Check::from_result(s, "projector rank is dim Specht times dim GL", 1e-8, (|| {
        let mut worst: f64 = 0.0;
        for (d, t) in [(2, 4), (3, 3)] {
            for l in partitions_with_max_len(t, d) {
                let p = isotypic_projector(&l, d, caps)?;
                let rank = (l.dim_specht() as u128 * l.dim_gl(d)) as f64;
                worst = worst.max((p.trace().re - rank).abs());
            }
        }
        Ok(worst)
    })()));
    out.push(Check::from_result(s, "Specht dimensions square-sum to t!", 0.0, (|| {
        let mut worst: f64 = 0.0;
        for t in 1..=7 {
            let sum: u64 = partitions(t).iter().map(|l| l.dim_specht().pow(2)).sum();
            worst = worst.max((sum as f64 - crate::qcore::factorial(t) as f64).abs());
        }
        Ok(worst)
    })()));
    out.push(Check::from_result(s, "characters satisfy column orthogonality", 1e-9, (|| {
        let mut worst: f64 = 0.0;
        for t in 2..=6 {
            let classes = partitions(t);
            for a in &classes {
                for b in &classes {
                    let sum: i64 = classes.iter().map(|l| character(l, a.parts()) * character(l, b.parts())).sum();
                    let expect =
                        if a == b { crate::qcore::factorial(t) as f64 / class_size(a.parts()) } else { 0.0 };
                    worst = worst.max((sum as f64 - expect).abs());
                }
            }
        }
        Ok(worst)
    })()));
    out.push(Check::from_result(s, "weak Schur sampling matches Schur polynomials", 1e-10, (|| {
        let mut rng = rng_for("schurweyl", 0);
        let mut worst: f64 = 0.0;
        for (d, t) in [(2, 3), (3, 3)] {
            let rho = random_density(d, d, &mut rng)?;
            let dist = schur_distribution(&rho.spectrum(), t);
            worst = worst.max((dist.iter().map(|x| x.1).sum::<f64>() - 1.0).abs());
            for o in schur_outcomes(&rho, t, caps)? {
                let p = dist.iter().find(|x| x.0 == o.lambda).map_or(0.0, |x| x.1);
                worst = worst.max((p - o.prob).abs());
            }
        }
        Ok(worst)
    })()));
    out.push(Check::from_result(s, "expected partition length is at most min(2 sqrt t, d)", 0.0, (|| {
        let mut rng = rng_for("schurweyl", 1);
        let mut worst = f64::NEG_INFINITY;
        for d in 2..=4 {
            for t in 1..=5 {
                let rho = random_density(d, d, &mut rng)?;
                let bound = (2.0 * (t as f64).sqrt()).min(d as f64);
                worst = worst.max(expected_partition_length(&rho, t, caps)? - bound);
            }
        }
        Ok(worst.max(0.0))
    })()));
    out.push(Check::from_result(s, "oracle returns the symmetric projector on flat input", 1e-12, (|| {
        let (big_d, n) = (2, 2);
        let p = symmetric_projector(big_d, n, caps)?;
        let flat = &p / C64::new(sym_dim(big_d, n), 0.0);
        let m1 = haar_moment_oracle(&flat, big_d, n, 1, caps)?;
        Ok(max_abs_diff(&m1, &(eye(big_d) / C64::new(big_d as f64, 0.0))))
    })()));
    out
}

/// Projection of a random density on `(C^D)^{⊗n}` onto the symmetric subspace.
fn random_symmetric_state(big_d: usize, n: usize, rng: &mut Rng, caps: &Caps) -> Result<CMat> {
    let p = symmetric_projector(big_d, n, caps)?;
    let dim = big_d.pow(n as u32);
    let x = random_density(dim, dim.min(3), rng)?;
    let m = &p * x.mat() * &p;
    let tr = m.trace();
    Ok(m / tr)
}

/// Closed-form moment identities against the oracle at one `(d, t)`: the
/// uniform POVM on `C^d`, Hayashi and GPS moments with `D = d`, `n = t`,
/// PTSW unbiasedness and second moments, and the `τ_λ` marginals.
pub fn moment_checks(d: usize, t: usize, seed: u64, caps: &Caps) -> Vec<Check> {
    let s = Scope::Estimators;
    let tag = |name: &str| format!("{name} (d={d}, t={t})");
    let mut out = Vec::new();
    let mut rng = stream(seed, "verify-moments", (d * 100 + t) as u64);
    out.push(Check::from_result(s, &tag("uniform POVM moments match the oracle"), 1e-9, (|| {
        let rho = random_density(d, d, &mut rng)?;
        let m1 = haar_moment_oracle(rho.mat(), d, 1, 1, caps)?;
        let m2 = haar_moment_oracle(rho.mat(), d, 1, 2, caps)?;
        Ok((m1 - uniform_first_moment(rho.mat())).norm().max((m2 - uniform_second_moment(rho.mat())).norm()))
    })()));
    let sym = random_symmetric_state(d, t, &mut rng, caps);
    let marg = sym.as_ref().map_err(clone_err).and_then(|p| register_marginals(p, d, t));
    out.push(Check::from_result(s, &tag("Hayashi moments match the oracle"), 1e-9, (|| {
        let psi = sym.as_ref().map_err(clone_err)?;
        let (m1, m12) = marg.as_ref().map_err(clone_err)?;
        let o1 = haar_moment_oracle(psi, d, t, 1, caps)?;
        let o2 = haar_moment_oracle(psi, d, t, 2, caps)?;
        Ok((o1 - hayashi_first_moment(m1, t)).norm().max((o2 - hayashi_second_moment(m1, m12, t)).norm()))
    })()));
    out.push(Check::from_result(s, &tag("GPS second moment matches the oracle"), 1e-9, (|| {
        let psi = sym.as_ref().map_err(clone_err)?;
        let (m1, m12) = marg.as_ref().map_err(clone_err)?;
        let o1 = haar_moment_oracle(psi, d, t, 1, caps)?;
        let o2 = haar_moment_oracle(psi, d, t, 2, caps)?;
        let a = (d + t) as f64 / t as f64;
        let tf = t as f64;
        let id = eye(d);
        let oracle = &o2 * C64::new(a * a, 0.0) - (kron(&o1, &id) + kron(&id, &o1)) * C64::new(a / tf, 0.0)
            + eye(d * d) / C64::new(tf * tf, 0.0);
        Ok((oracle - gps_second_moment(m1, m12, t)).norm())
    })()));
    let rho = random_density(d, d, &mut rng);
    out.push(Check::from_result(s, &tag("PTSW estimate is unbiased"), 1e-8, (|| {
        let rho = rho.as_ref().map_err(clone_err)?;
        let est = PtswEstimator::new(rho, t, caps)?;
        let (m1, _) = est.exact_moments_oracle(caps)?;
        Ok((m1 - rho.mat()).norm())
    })()));
    out.push(Check::from_result(s, &tag("PTSW conditional second moments match the oracle"), 1e-8, (|| {
        let rho = rho.as_ref().map_err(clone_err)?;
        let est = PtswEstimator::new(rho, t, caps)?;
        let mut worst: f64 = 0.0;
        for i in 0..est.blocks().len() {
            let (_, o2) = est.conditional_moments_oracle(i, caps)?;
            worst = worst.max((o2 - est.conditional_second_moment(i)?).norm());
        }
        Ok(worst)
    })()));
    for k in 1..=t.min(2) {
        out.push(Check::from_result(s, &tag(&format!("tau marginals on {k} registers average to rho^{k}")), 1e-8, (|| {
            let rho = rho.as_ref().map_err(clone_err)?;
            tau_lambda_marginal_check(rho, t, k, caps)
        })()));
    }
    out
}

fn clone_err(e: &QcError) -> QcError {
    match e {
        QcError::ResourceLimit { what, size, cap } => QcError::ResourceLimit { what: what.clone(), size: *size, cap: *cap },
        other => QcError::Precondition(other.to_string()),
    }
}

fn purification_check(caps: &Caps) -> Check {
    Check::from_result(Scope::Estimators, "purification channel is completely positive and trace preserving", 1e-9, (|| {
        let ch = PurificationChannel::build(2, 2, 2, caps)?;
        let mut rng = rng_for("estimators", 0);
        let x = random_density(4, 4, &mut rng)?;
        let y = ch.apply(x.mat())?;
        Ok((y.trace().re - 1.0).abs().max(-ch.choi_min_eigenvalue()?))
    })())
}

fn tester_checks(caps: &Caps) -> Vec<Check> {
    let s = Scope::Testers;
    let mut out = Vec::new();
    out.push(Check::from_result(s, "collision mean equals the pairwise average", 1e-12, (|| {
        let mut rng = rng_for("testers", 0);
        let mats: Vec<CMat> =
            (0..7).map(|_| random_density(3, 3, &mut rng).map(|r| r.into_mat())).collect::<Result<_>>()?;
        let mut acc = 0.0;
        for i in 0..mats.len() {
            for j in i + 1..mats.len() {
                acc += trace_product(&mats[i], &mats[j]).re;
            }
        }
        Ok((collision_mean(&mats)? - acc / 21.0).abs())
    })()));
    out.push(Check::from_result(s, "bucket plans satisfy their structural invariants", 0.0, (|| {
        let mut rng = rng_for("testers", 1);
        let mut states = vec![DensityMatrix::from_diag(&[0.5, 0.25, 0.125, 0.125])?];
        for d in [3, 5, 8] {
            states.push(random_density(d, d, &mut rng)?);
        }
        for sigma in &states {
            for eps in [0.1, 0.3, 0.6] {
                bucket_plan(sigma, eps, RadiusConstants::default())?.check_invariants()?;
            }
        }
        Ok(0.0)
    })()));
    out.push(Check::from_result(s, "BOW per-batch estimate is unbiased with bounded variance", 1e-10, (|| {
        let sigma = DensityMatrix::maximally_mixed(2);
        let rho = DensityMatrix::from_diag(&[0.8, 0.2])?;
        let hs2 = 0.18;
        let mut worst: f64 = 0.0;
        for t in [2, 4] {
            let b = BowEstimator::new(&rho, &sigma, t, caps)?;
            worst = worst.max((b.exact_mean() - hs2).abs());
            let bound = 10.0 * (1.0 / (t * t) as f64 + hs2 / t as f64);
            if b.exact_variance() > bound {
                return Err(QcError::Invariant(format!("variance {} above {bound} at t = {t}", b.exact_variance())));
            }
        }
        Ok(worst)
    })()));
    out.push(Check::from_result(s, "copy accounting matches the analytic formulas", 0.0, (|| {
        let mut rng = rng_for("testers", 2);
        let rho = DensityMatrix::maximally_mixed(2);
        let v = mixedness_test(&rho, 0.6, 2, 6, 3, &mut rng, caps)?;
        let mut err = (v.copies_used as f64 - 36.0).abs();
        let sigma = DensityMatrix::from_diag(&[0.5, 0.25, 0.125, 0.125])?;
        let c = Certifier::new(&sigma, &sigma, 0.6, CertifyParams::default(), caps)?;
        let r = c.run(&mut rng)?;
        let sum: usize = r.subtests.iter().map(|x| x.copies_used).sum();
        err += (sum as f64 - r.verdict.copies_used as f64).abs();
        Ok(err)
    })()));
    out
}

fn chi2_checks(caps: &Caps) -> Vec<Check> {
    let s = Scope::Chi2lab;
    let mut out = Vec::new();
    let en = Enumeration::default();
    out.push(Check::from_result(s, "chi-square never exceeds the Ingster-Suslina bound", 1e-12, (|| {
        let mut rng = rng_for("chi2lab", 0);
        let mut worst = f64::NEG_INFINITY;
        for (t, n, ell, k) in [(1, 3, 3, 3), (2, 2, 3, 6), (2, 1, 2, 8)] {
            let ens = HardInstanceEnsemble::gell_mann(2, ell, 0.4, 1.0)?;
            let schedule = (0..n).map(|_| RankOnePovm::random(2usize.pow(t as u32), k, &mut rng)).collect::<Result<Vec<_>>>()?;
            worst = worst.max(chi2_exact(&ens, &schedule, t, en)? - ingster_suslina_bound(&ens, &schedule, t, en)?);
        }
        Ok(worst.max(0.0))
    })()));
    out.push(Check::from_result(s, "likelihood and Lueders correlations agree", 1e-10, (|| {
        let mut rng = rng_for("chi2lab", 1);
        let ens = HardInstanceEnsemble::gell_mann(2, 3, 0.5, 1.0)?;
        let povm = RankOnePovm::random(4, 6, &mut rng)?;
        let h = lueders_channel(&povm)?;
        let mut worst: f64 = 0.0;
        for (a, b) in [(0, 1), (3, 5), (7, 7)] {
            let (z, zp) = (ens.signs(a), ens.signs(b));
            worst = worst.max((phi_likelihood(&ens, &povm, &z, &zp, 2)? - phi_lueders(&ens, &h, &z, &zp, 2)?).abs());
        }
        Ok(worst)
    })()));
    out.push(Check::from_result(s, "Lueders and induced channels satisfy their axioms", 1e-9, (|| {
        let mut rng = rng_for("chi2lab", 2);
        let mut worst: f64 = 0.0;
        for t in [1, 2] {
            let dim = 2usize.pow(t as u32);
            let h = lueders_channel(&RankOnePovm::random(dim, dim + 2, &mut rng)?)?;
            let spec = h.spectrum();
            worst = worst
                .max(h.unitality_error())
                .max((h.trace() - dim as f64).abs())
                .max(-spec[0])
                .max(spec[spec.len() - 1] - 1.0);
            let ind = induced_channel(&h, 2, t, caps)?;
            worst = worst.max(ind.trace() - 2.0).max(ind.spectrum().last().copied().unwrap_or(0.0) - 1.0);
        }
        Ok(worst)
    })()));
    out.push(Check::from_result(s, "linear and non-linear terms reconstruct the correlation", 1e-10, (|| {
        let mut rng = rng_for("chi2lab", 3);
        let ens = HardInstanceEnsemble::gell_mann(2, 3, 0.3, 1.0)?;
        let h = lueders_channel(&RankOnePovm::random(4, 5, &mut rng)?)?;
        let (z, zp) = (ens.signs(2), ens.signs(5));
        let terms = linearized_terms(&ens, &h, &z, &zp, 2, caps)?;
        Ok((4.0 * terms.total() - phi_lueders(&ens, &h, &z, &zp, 2)?).abs())
    })()));
    out.push(Check::from_result(s, "adversarial frame norm is at most sqrt 2", 1e-9, (|| {
        let mut rng = rng_for("chi2lab", 4);
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..5 {
            let ind = induced_channel(&lueders_channel(&RankOnePovm::random(2, 4, &mut rng)?)?, 2, 1, caps)?;
            let (basis, _) = adversarial_basis(&ind, 2)?;
            worst = worst.max(frame_norm(&ind, &basis, 2) - 2f64.sqrt());
        }
        Ok(worst.max(0.0))
    })()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schurweyl_scope_passes_and_fault_is_named() {
        let caps = Caps::default();
        let r = verify_suite(Scope::Schurweyl, &caps);
        assert!(r.pass, "{:?}", r.failures());
        let bad = verify_suite_with(Scope::Schurweyl, &caps, &[Fault::PerturbedProjector]);
        assert!(!bad.pass);
        let names: Vec<&str> = bad.failures().iter().map(|c| c.invariant.as_str()).collect();
        assert_eq!(names, ["isotypic projectors are orthogonal idempotents summing to identity"]);
    }

    #[test]
    fn moment_checks_pass_for_small_cases() {
        let checks = moment_checks(2, 2, 1, &Caps::default());
        assert!(checks.iter().all(|c| c.pass), "{checks:?}");
        assert_eq!(checks.len(), 7);
    }

    #[test]
    fn scope_names_parse() {
        for s in ["all", "qcore", "schurweyl", "estimators", "testers", "chi2lab"] {
            assert_eq!(s.parse::<Scope>().unwrap().to_string(), s);
        }
    }
}
