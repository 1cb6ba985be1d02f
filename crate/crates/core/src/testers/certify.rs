use super::bucket::{bucket_plan, BucketPlan, RadiusConstants};
use super::{collision_mean, median, TesterVerdict};
use crate::error::{QcError, Result};
use crate::estimators::{ptsw_source, StateEstimator};
use crate::qcore::{diag, Caps, CMat, DensityMatrix, C64};
use crate::rng::Rng;
use rand_distr::{Binomial, Distribution, Geometric};
use serde::{Deserialize, Serialize};

/// Tunable constants of the certification pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifyParams {
    /// Copies per PTSW batch inside each local test.
    pub t: usize,
    /// Batches per repetition of each local test.
    pub n: usize,
    /// Overall failure budget split over the sub-tests.
    pub delta: f64,
    pub radii: RadiusConstants,
}

impl Default for CertifyParams {
    fn default() -> Self {
        CertifyParams { t: 2, n: 16, delta: 1.0 / 3.0, radii: RadiusConstants::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubTestKind {
    Tail,
    Mass,
    Diagonal,
    Pair,
}

/// Outcome and copy count of one sub-test.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubTestRecord {
    pub kind: SubTestKind,
    pub buckets: Vec<i32>,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
    pub copies_used: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertifyReport {
    pub verdict: TesterVerdict,
    pub subtests: Vec<SubTestRecord>,
    /// True when a tail or bucket-mass pre-check failed.
    pub mass_check_failed: bool,
}

/// A local Hilbert–Schmidt test on the block spanned by some buckets.
struct LocalTest {
    kind: SubTestKind,
    labels: Vec<i32>,
    /// `tr(Π ρ)`: acceptance probability of the block filter.
    rho_mass: f64,
    /// PTSW source on the normalised block of ρ.
    source: Box<dyn StateEstimator>,
    /// Normalised block of σ, diagonal in plan order.
    sigma_block: CMat,
    radius: f64,
    reps: usize,
}

/// Certification of a known σ from copies of ρ, reduced to local tests
/// on σ's dyadic eigenvalue buckets.
///
/// Sub-tests, each with its own share of `δ`:
/// a tail-mass check (`δ/3`), one mass check per bucket (`δ/(6m)`),
/// diagonal block tests (`δ/(6m)`) and pairwise block tests (`δ/(6m²)`).
/// Local tests run the collision estimator on PTSW estimates of the
/// normalised block state against the known block of σ, boosted by the
/// median over repetitions. Block copies are obtained by measuring
/// `{Π, I − Π}` on copies of ρ and keeping the `Π` outcomes.
pub struct Certifier {
    plan: BucketPlan,
    params: CertifyParams,
    rho_tail_mass: f64,
    rho_bucket_mass: Vec<f64>,
    tests: Vec<LocalTest>,
}

fn odd_reps(delta: f64) -> usize {
    let r = (1.0 / delta).ln().ceil().max(1.0) as usize;
    if r % 2 == 0 {
        r + 1
    } else {
        r
    }
}

impl Certifier {
    pub fn new(sigma: &DensityMatrix, rho: &DensityMatrix, eps: f64, params: CertifyParams, caps: &Caps) -> Result<Self> {
        if sigma.dim() != rho.dim() {
            return Err(QcError::Shape(format!("sigma has dimension {}, rho {}", sigma.dim(), rho.dim())));
        }
        if params.t == 0 || params.n < 2 || !(params.delta > 0.0 && params.delta < 1.0) {
            return Err(QcError::InvalidParameter(format!("invalid certify parameters {params:?}")));
        }
        let plan = bucket_plan(sigma, eps, params.radii)?;
        let m = plan.buckets.len() as f64;
        let v = &plan.eigenvectors;
        let mass_in = |idx: &[usize]| -> f64 {
            idx.iter().map(|&i| {
                let col = v.column(i);
                (col.adjoint() * rho.mat() * col)[(0, 0)].re
            }).sum::<f64>().max(0.0)
        };
        let rho_tail_mass = mass_in(&plan.tail_set);
        let rho_bucket_mass: Vec<f64> = plan.buckets.iter().map(|b| mass_in(&b.indices)).collect();

        let mut specs: Vec<(SubTestKind, Vec<usize>, f64, usize)> = Vec::new();
        for &(a, r) in &plan.diag_tests {
            specs.push((SubTestKind::Diagonal, vec![a], r, odd_reps(params.delta / (6.0 * m))));
        }
        for &(a, b, r) in &plan.pair_tests {
            specs.push((SubTestKind::Pair, vec![a, b], r, odd_reps(params.delta / (6.0 * m * m))));
        }
        let mut tests = Vec::with_capacity(specs.len());
        for (kind, positions, radius, reps) in specs {
            let (idx, vecs) = plan.block(&positions);
            let rho_mass = mass_in(&idx);
            let sig: Vec<f64> = idx.iter().map(|&i| plan.eigenvalues[i]).collect();
            let sig_total: f64 = sig.iter().sum();
            let sigma_block = diag(&sig.iter().map(|x| x / sig_total).collect::<Vec<_>>());
            let block = if rho_mass > 1e-12 {
                let b = vecs.adjoint() * rho.mat() * &vecs / C64::new(rho_mass, 0.0);
                DensityMatrix::new(crate::qcore::hermitize(&b))?
            } else {
                DensityMatrix::maximally_mixed(idx.len())
            };
            let source = ptsw_source(&block, params.t, caps)?;
            let labels = positions.iter().map(|&a| plan.buckets[a].j).collect();
            tests.push(LocalTest { kind, labels, rho_mass, source, sigma_block, radius, reps });
        }
        Ok(Certifier { plan, params, rho_tail_mass, rho_bucket_mass, tests })
    }

    pub fn plan(&self) -> &BucketPlan {
        &self.plan
    }

    /// Copies of ρ drawn until `k` of them pass the block filter.
    fn filtered_draws(k: usize, p: f64, rng: &mut Rng) -> Result<usize> {
        if p >= 1.0 {
            return Ok(k);
        }
        let g = Geometric::new(p).map_err(|e| QcError::InvalidParameter(format!("block mass {p}: {e}")))?;
        Ok(k + (0..k).map(|_| g.sample(rng) as usize).sum::<usize>())
    }

    pub fn run(&self, rng: &mut Rng) -> Result<CertifyReport> {
        let eps = self.plan.eps;
        let delta = self.params.delta;
        let m = self.plan.buckets.len() as f64;
        let mut subtests = Vec::new();
        let mut mass_failed = false;

        if !self.plan.tail_set.is_empty() {
            let budget = eps * eps / 20.0;
            let n = (3.0 * (3.0 / delta).ln() / budget).ceil() as u64;
            let hits = Binomial::new(n, self.rho_tail_mass.min(1.0)).expect("valid binomial").sample(rng);
            let est = hits as f64 / n as f64;
            let pass = est <= 2.0 * budget;
            mass_failed |= !pass;
            subtests.push(SubTestRecord {
                kind: SubTestKind::Tail,
                buckets: vec![],
                statistic: est,
                threshold: 2.0 * budget,
                pass,
                copies_used: n as usize,
            });
        }
        for (b, &p_rho) in self.plan.buckets.iter().zip(&self.rho_bucket_mass) {
            let budget = delta / (6.0 * m);
            let n = (12.0 * (2.0 / budget).ln() / b.mass).ceil() as u64;
            let hits = Binomial::new(n, p_rho.min(1.0)).expect("valid binomial").sample(rng);
            let est = hits as f64 / n as f64;
            let pass = est >= b.mass / 2.0 && est <= 2.0 * b.mass;
            mass_failed |= !pass;
            subtests.push(SubTestRecord {
                kind: SubTestKind::Mass,
                buckets: vec![b.j],
                statistic: est,
                threshold: b.mass,
                pass,
                copies_used: n as usize,
            });
        }
        if !mass_failed {
            for test in &self.tests {
                subtests.push(self.run_local(test, rng)?);
            }
        }
        let accept = subtests.iter().all(|s| s.pass);
        let copies_used = subtests.iter().map(|s| s.copies_used).sum();
        let n_batches = self.tests.iter().map(|t| t.reps * self.params.n).sum();
        let worst = subtests
            .iter()
            .filter(|s| matches!(s.kind, SubTestKind::Diagonal | SubTestKind::Pair))
            .map(|s| s.statistic / s.threshold)
            .fold(0.0, f64::max);
        Ok(CertifyReport {
            verdict: TesterVerdict {
                accept,
                statistic: worst,
                raw_statistic: worst,
                threshold: 2.0,
                copies_used,
                n_batches,
                t: self.params.t,
            },
            subtests,
            mass_check_failed: mass_failed,
        })
    }

    fn run_local(&self, test: &LocalTest, rng: &mut Rng) -> Result<SubTestRecord> {
        let threshold = test.radius * test.radius / 2.0;
        let (n, t) = (self.params.n, self.params.t);
        if test.rho_mass <= 1e-12 {
            return Ok(SubTestRecord {
                kind: test.kind,
                buckets: test.labels.clone(),
                statistic: f64::INFINITY,
                threshold,
                pass: false,
                copies_used: 0,
            });
        }
        let mut copies = 0;
        let mut stats = Vec::with_capacity(test.reps);
        for _ in 0..test.reps {
            let mut diffs = Vec::with_capacity(n);
            for _ in 0..n {
                copies += Self::filtered_draws(t, test.rho_mass, rng)?;
                diffs.push(test.source.estimate(rng)? - &test.sigma_block);
            }
            stats.push(collision_mean(&diffs)?);
        }
        let statistic = median(&stats);
        Ok(SubTestRecord {
            kind: test.kind,
            buckets: test.labels.clone(),
            statistic,
            threshold,
            pass: statistic < threshold,
            copies_used: copies,
        })
    }
}

/// Builds a [`Certifier`] and runs it once.
pub fn certify(
    sigma: &DensityMatrix,
    rho: &DensityMatrix,
    eps: f64,
    params: CertifyParams,
    rng: &mut Rng,
    caps: &Caps,
) -> Result<CertifyReport> {
    Certifier::new(sigma, rho, eps, params, caps)?.run(rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_sigma() -> DensityMatrix {
        DensityMatrix::from_diag(&[0.5, 0.25, 0.125, 0.125]).unwrap()
    }

    #[test]
    fn maximally_mixed_runs_a_single_local_test() {
        let mm = DensityMatrix::maximally_mixed(4);
        let c = Certifier::new(&mm, &mm, 0.6, CertifyParams::default(), &Caps::default()).unwrap();
        assert_eq!(c.tests.len(), 1);
        assert_eq!(c.tests[0].kind, SubTestKind::Diagonal);
        assert!((c.tests[0].radius - 0.5 * 0.6 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn copy_accounting_adds_up() {
        let s = example_sigma();
        let mut rng = crate::rng::stream(9, "certify", 0);
        let r = certify(&s, &s, 0.6, CertifyParams::default(), &mut rng, &Caps::default()).unwrap();
        let total: usize = r.subtests.iter().map(|s| s.copies_used).sum();
        assert_eq!(total, r.verdict.copies_used);
        assert_eq!(r.subtests.iter().filter(|s| s.kind == SubTestKind::Mass).count(), 3);
    }

    #[test]
    fn mass_check_rejects_missing_bucket() {
        let s = example_sigma();
        let rho = DensityMatrix::from_diag(&[0.75, 0.25, 0.0, 0.0]).unwrap();
        let mut rng = crate::rng::stream(9, "certify", 1);
        let r = certify(&s, &rho, 0.6, CertifyParams::default(), &mut rng, &Caps::default()).unwrap();
        assert!(r.mass_check_failed);
        assert!(!r.verdict.accept);
    }
}
