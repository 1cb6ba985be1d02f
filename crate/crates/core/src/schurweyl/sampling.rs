use super::{apply_isotypic, partitions_with_max_len, Partition};
use crate::error::{QcError, Result};
use crate::qcore::{hermitize, tensor_power, Caps, CMat, DensityMatrix, C64};
use rand::Rng;

/// One weak Schur sampling outcome with its probability and the
/// post-measurement state `Π_λ ρ^{⊗t} Π_λ / p(λ)`.
#[derive(Clone, Debug)]
pub struct SchurOutcome {
    pub lambda: Partition,
    pub prob: f64,
    pub conditional: CMat,
}

const MIN_PROB: f64 = 1e-14;

/// All outcomes of weak Schur sampling on `ρ^{⊗t}` with non-negligible
/// probability, computed densely in the computational basis.
pub fn schur_outcomes(rho: &DensityMatrix, t: usize, caps: &Caps) -> Result<Vec<SchurOutcome>> {
    if t == 0 {
        return Err(QcError::InvalidParameter("t must be at least 1".into()));
    }
    let d = rho.dim();
    caps.check_dim("d^t", d, t)?;
    let power = tensor_power(rho.mat(), t);
    let mut out = Vec::new();
    for lambda in partitions_with_max_len(t, d) {
        // Π_λ commutes with ρ^{⊗t}, so Π_λ ρ^{⊗t} Π_λ = Π_λ ρ^{⊗t}.
        let block = apply_isotypic(&lambda, &power, d, caps)?;
        let prob = block.trace().re;
        if prob > MIN_PROB {
            let conditional = hermitize(&block) / C64::new(prob, 0.0);
            out.push(SchurOutcome { lambda, prob, conditional });
        }
    }
    let total: f64 = out.iter().map(|o| o.prob).sum();
    if (total - 1.0).abs() > 1e-8 {
        return Err(QcError::UnreachableBranch(format!("weak Schur probabilities sum to {total}")));
    }
    Ok(out)
}

/// Measures `{Π_λ}` on `ρ^{⊗t}`.
pub fn weak_schur_sample<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    t: usize,
    rng: &mut R,
    caps: &Caps,
) -> Result<SchurOutcome> {
    let mut outcomes = schur_outcomes(rho, t, caps)?;
    let weights: Vec<f64> = outcomes.iter().map(|o| o.prob).collect();
    let i = crate::rng::categorical(&weights, rng)?;
    Ok(outcomes.swap_remove(i))
}

/// `E[ℓ(λ)]` under weak Schur sampling of `ρ^{⊗t}`, from the spectrum.
pub fn expected_partition_length(rho: &DensityMatrix, t: usize, caps: &Caps) -> Result<f64> {
    caps.check_dim("d^t", rho.dim(), t)?;
    let x = rho.spectrum();
    Ok(super::schur_distribution(&x, t).iter().map(|(l, p)| l.len() as f64 * p).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::random_density;
    use crate::schurweyl::schur_distribution;
    use rand::SeedableRng;

    #[test]
    fn projector_route_matches_symmetric_functions() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let caps = Caps::default();
        for (d, t) in [(2, 3), (3, 3), (2, 4), (3, 2)] {
            let rho = random_density(d, d, &mut rng).unwrap();
            let dense = schur_outcomes(&rho, t, &caps).unwrap();
            let sym = schur_distribution(&rho.spectrum(), t);
            for o in &dense {
                let p = sym.iter().find(|(l, _)| *l == o.lambda).unwrap().1;
                assert!((o.prob - p).abs() < 1e-10);
                assert!((o.conditional.trace().re - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn pure_state_always_gives_single_row() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        let rho = random_density(3, 1, &mut rng).unwrap();
        let o = weak_schur_sample(&rho, 3, &mut rng, &Caps::default()).unwrap();
        assert_eq!(o.lambda.parts(), &[3]);
    }

    #[test]
    fn expected_length_of_maximally_mixed_qubit() {
        // t = 2: λ=(2) w.p. 3/4, (1,1) w.p. 1/4.
        let rho = DensityMatrix::maximally_mixed(2);
        let e = expected_partition_length(&rho, 2, &Caps::default()).unwrap();
        assert!((e - 1.25).abs() < 1e-12);
    }
}
