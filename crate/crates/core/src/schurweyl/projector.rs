use super::{character, Partition};
use crate::error::Result;
use crate::qcore::{all_permutations, apply_perm_left, basis_map, factorial, Caps, CMat, C64};
use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

type Coeffs = Arc<Vec<(Vec<usize>, f64)>>;

fn coeff_cache() -> &'static RwLock<HashMap<Partition, Coeffs>> {
    static CACHE: OnceLock<RwLock<HashMap<Partition, Coeffs>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn projector_cache() -> &'static RwLock<HashMap<(Partition, usize), Arc<CMat>>> {
    static CACHE: OnceLock<RwLock<HashMap<(Partition, usize), Arc<CMat>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Group-algebra coefficients of the central idempotent
/// `Π_λ = (dim λ / t!) Σ_π χ^λ(π) V(π)`, skipping vanishing characters.
pub fn projector_coefficients(lambda: &Partition) -> Coeffs {
    if let Some(c) = coeff_cache().read().unwrap().get(lambda) {
        return c.clone();
    }
    let t = lambda.size();
    let scale = lambda.dim_specht() as f64 / factorial(t) as f64;
    let coeffs: Vec<(Vec<usize>, f64)> = all_permutations(t)
        .into_iter()
        .filter_map(|p| {
            let chi = character(lambda, &crate::qcore::cycle_type(&p));
            (chi != 0).then(|| (p, scale * chi as f64))
        })
        .collect();
    let coeffs = Arc::new(coeffs);
    coeff_cache().write().unwrap().insert(lambda.clone(), coeffs.clone());
    coeffs
}

/// Isotypic projector `Π_λ` on `(C^d)^{⊗t}`, cached per `(λ, d)`.
pub fn isotypic_projector(lambda: &Partition, d: usize, caps: &Caps) -> Result<Arc<CMat>> {
    let t = lambda.size();
    let dim = caps.check_dim("isotypic projector dimension", d, t)?;
    let key = (lambda.clone(), d);
    if let Some(p) = projector_cache().read().unwrap().get(&key) {
        return Ok(p.clone());
    }
    let mut p = CMat::zeros(dim, dim);
    for (perm, c) in projector_coefficients(lambda).iter() {
        for (x, y) in basis_map(perm, d).into_iter().enumerate() {
            p[(y, x)] += C64::new(*c, 0.0);
        }
    }
    let p = Arc::new(p);
    projector_cache().write().unwrap().insert(key, p.clone());
    Ok(p)
}

/// `Π_λ · m` computed as a signed sum of row permutations.
pub fn apply_isotypic(lambda: &Partition, m: &CMat, d: usize, caps: &Caps) -> Result<CMat> {
    let t = lambda.size();
    caps.check_dim("isotypic projector dimension", d, t)?;
    let mut out = CMat::zeros(m.nrows(), m.ncols());
    for (perm, c) in projector_coefficients(lambda).iter() {
        apply_perm_left(&basis_map(perm, d), m, C64::new(*c, 0.0), &mut out);
    }
    Ok(out)
}
