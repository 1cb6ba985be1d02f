use crate::error::{QcError, Result};
use crate::qcore::{eigh, outer, CMat, DensityMatrix, HermitianOp, C64};
use serde::{Deserialize, Serialize};

/// Multipliers of the local Hilbert–Schmidt radii.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusConstants {
    pub diag: f64,
    pub off: f64,
}

impl Default for RadiusConstants {
    fn default() -> Self {
        RadiusConstants { diag: 0.5, off: 0.5 }
    }
}

/// Eigenvalues of σ in `(2^{−j−1}, 2^{−j}]`.
#[derive(Clone, Debug)]
pub struct Bucket {
    pub j: i32,
    /// Positions in the descending eigenvalue order.
    pub indices: Vec<usize>,
    pub projector: CMat,
    pub mass: f64,
}

impl Bucket {
    pub fn dim(&self) -> usize {
        self.indices.len()
    }
}

/// Dyadic decomposition of σ's spectrum with the local test radii.
#[derive(Clone, Debug)]
pub struct BucketPlan {
    pub eps: f64,
    /// Eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// Matching eigenvectors as columns.
    pub eigenvectors: CMat,
    pub sigma_star: HermitianOp,
    pub tail_set: Vec<usize>,
    pub tail_mass: f64,
    pub buckets: Vec<Bucket>,
    /// `(a, b, ε_{a,b})` over bucket positions `a < b`.
    pub pair_tests: Vec<(usize, usize, f64)>,
    /// `(a, ε_a)` for buckets of dimension at least two.
    pub diag_tests: Vec<(usize, f64)>,
}

const LABEL_SLACK: f64 = 1e-9;

fn label(lambda: f64) -> i32 {
    (-lambda.log2() + LABEL_SLACK).floor() as i32
}

/// Removes as many of σ's smallest eigenvalues as fit in mass `ε²/20`, then
/// groups the rest by `j = ⌊−log₂ λ⌋`.
pub fn bucket_plan(sigma: &DensityMatrix, eps: f64, radii: RadiusConstants) -> Result<BucketPlan> {
    if !(eps > 0.0 && eps <= 2.0) {
        return Err(QcError::InvalidParameter(format!("eps must lie in (0, 2], got {eps}")));
    }
    let d = sigma.dim();
    let (w, v) = eigh(sigma.mat());
    let order: Vec<usize> = (0..d).rev().collect();
    let eigenvalues: Vec<f64> = order.iter().map(|&i| w[i].max(0.0)).collect();
    let eigenvectors = CMat::from_fn(d, d, |r, c| v[(r, order[c])]);

    let budget = eps * eps / 20.0 + 1e-12;
    let mut tail_mass = 0.0;
    let mut keep = d;
    while keep > 1 && tail_mass + eigenvalues[keep - 1] <= budget {
        tail_mass += eigenvalues[keep - 1];
        keep -= 1;
    }
    let tail_set: Vec<usize> = (keep..d).collect();

    let mut buckets: Vec<Bucket> = Vec::new();
    for i in 0..keep {
        let j = label(eigenvalues[i]);
        match buckets.last_mut() {
            Some(b) if b.j == j => b.indices.push(i),
            _ => buckets.push(Bucket { j, indices: vec![i], projector: CMat::zeros(0, 0), mass: 0.0 }),
        }
    }
    let mut sigma_star = CMat::zeros(d, d);
    for b in &mut buckets {
        let mut p = CMat::zeros(d, d);
        for &i in &b.indices {
            let col = eigenvectors.column(i).clone_owned();
            let proj = outer(&col, &col);
            sigma_star += &proj * C64::new(eigenvalues[i], 0.0);
            p += proj;
        }
        b.projector = p;
        b.mass = b.indices.iter().map(|&i| eigenvalues[i]).sum();
    }

    let scale = |b: &Bucket| b.dim() as f64 * 2f64.powi(-b.j);
    let diag_tests = buckets
        .iter()
        .enumerate()
        .filter(|(_, b)| b.dim() >= 2)
        .map(|(a, b)| (a, radii.diag * eps / ((b.dim() as f64).sqrt() * scale(b))))
        .collect();
    let mut pair_tests = Vec::new();
    for a in 0..buckets.len() {
        for b in a + 1..buckets.len() {
            let (ba, bb) = (&buckets[a], &buckets[b]);
            let r = radii.off * eps / ((bb.dim() as f64).sqrt() * (scale(ba) + scale(bb)));
            pair_tests.push((a, b, r));
        }
    }
    Ok(BucketPlan {
        eps,
        eigenvalues,
        eigenvectors,
        sigma_star: HermitianOp::new(sigma_star)?,
        tail_set,
        tail_mass,
        buckets,
        pair_tests,
        diag_tests,
    })
}

impl BucketPlan {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Checks the structural guarantees of the plan.
    pub fn check_invariants(&self) -> Result<()> {
        let eps = self.eps;
        if self.tail_mass > eps * eps / 20.0 + 1e-12 {
            return Err(QcError::Invariant(format!("tail mass {} exceeds eps^2/20", self.tail_mass)));
        }
        for b in &self.buckets {
            let vals: Vec<f64> = b.indices.iter().map(|&i| self.eigenvalues[i]).collect();
            let hi = vals.iter().cloned().fold(f64::MIN, f64::max);
            let lo = vals.iter().cloned().fold(f64::MAX, f64::min);
            if hi > 2.0 * lo * (1.0 + 1e-8) {
                return Err(QcError::Invariant(format!("bucket {} has eigenvalue ratio {}", b.j, hi / lo)));
            }
            // Normalised block state has operator norm at most 2/d_j.
            if hi / b.mass > 2.0 / b.dim() as f64 + 1e-12 {
                return Err(QcError::Invariant(format!("bucket {} normalised norm {} > 2/d_j", b.j, hi / b.mass)));
            }
        }
        let m = self.buckets.len() as f64;
        let bound = 4.0 * (self.dim() as f64 / eps).log2() + 4.0;
        if m > bound {
            return Err(QcError::Invariant(format!("{m} buckets exceed 4 log2(d/eps) + 4 = {bound}")));
        }
        Ok(())
    }

    /// Eigenvalues of σ restricted to the union of the given buckets, in
    /// plan order, plus the matching eigenvectors.
    pub fn block(&self, bucket_positions: &[usize]) -> (Vec<usize>, CMat) {
        let idx: Vec<usize> = bucket_positions.iter().flat_map(|&a| self.buckets[a].indices.clone()).collect();
        let d = self.dim();
        let vecs = CMat::from_fn(d, idx.len(), |r, c| self.eigenvectors[(r, idx[c])]);
        (idx, vecs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::random_density;

    #[test]
    fn maximally_mixed_is_one_bucket() {
        let p = bucket_plan(&DensityMatrix::maximally_mixed(4), 0.6, RadiusConstants::default()).unwrap();
        assert!(p.tail_set.is_empty());
        assert_eq!(p.buckets.len(), 1);
        assert_eq!(p.buckets[0].dim(), 4);
        assert!(p.pair_tests.is_empty());
        assert_eq!(p.diag_tests.len(), 1);
        p.check_invariants().unwrap();
    }

    #[test]
    fn dyadic_example() {
        let s = DensityMatrix::from_diag(&[0.5, 0.25, 0.125, 0.125]).unwrap();
        let p = bucket_plan(&s, 0.6, RadiusConstants::default()).unwrap();
        assert!(p.tail_set.is_empty());
        let groups: Vec<Vec<usize>> = p.buckets.iter().map(|b| b.indices.clone()).collect();
        assert_eq!(groups, vec![vec![0], vec![1], vec![2, 3]]);
        assert_eq!(p.buckets.iter().map(|b| b.j).collect::<Vec<_>>(), vec![1, 2, 3]);
        assert_eq!(p.pair_tests.len(), 3);
        p.check_invariants().unwrap();
    }

    #[test]
    fn tail_removes_small_eigenvalues() {
        let s = DensityMatrix::from_diag(&[0.6, 0.385, 0.01, 0.005]).unwrap();
        let p = bucket_plan(&s, 0.6, RadiusConstants::default()).unwrap();
        assert_eq!(p.tail_set, vec![2, 3]);
        assert!((p.tail_mass - 0.015).abs() < 1e-12);
        p.check_invariants().unwrap();
    }

    #[test]
    fn random_states_satisfy_invariants() {
        let mut rng = crate::rng::stream(4, "bucket", 0);
        for k in 0..50 {
            let d = 2 + k % 5;
            let s = random_density(d, d, &mut rng).unwrap();
            let p = bucket_plan(&s, 0.6, RadiusConstants::default()).unwrap();
            p.check_invariants().unwrap();
        }
    }
}
