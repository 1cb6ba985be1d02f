use super::{HardInstanceEnsemble, RankOnePovm, Superoperator};
use crate::error::{QcError, Result};
use crate::par::{pairwise_sum, Exec};
use crate::qcore::{eye, kron_all, tensor_power, trace_product, Caps, CMat, C64};

/// Largest `2^ℓ · Π_i |outcomes_i|` enumerated exactly.
pub const ENUMERATION_BUDGET: usize = 1 << 26;

/// Execution settings for the exhaustive sums. The partition count fixes
/// the summation order, so results are bit-identical for a given count.
#[derive(Clone, Copy, Debug)]
pub struct Enumeration {
    pub exec: Exec,
    pub parts: usize,
}

impl Default for Enumeration {
    fn default() -> Self {
        Enumeration { exec: Exec::default(), parts: 8 }
    }
}

/// `Δ_z^{(t)} = ρ_z^{⊗t} − (I/d)^{⊗t}`.
pub fn tensor_perturbation(ens: &HardInstanceEnsemble, z: &[f64], t: usize) -> Result<CMat> {
    let rho = ens.state(z)?;
    let mm = eye(ens.d) / C64::new(ens.d as f64, 0.0);
    Ok(tensor_power(rho.mat(), t) - tensor_power(&mm, t))
}

/// Outcome probabilities `p_z^{(i)}` for every sign vector and round, and
/// the reference `q^{(i)}` under `I/d`.
struct Tables {
    p: Vec<Vec<Vec<f64>>>,
    q: Vec<Vec<f64>>,
}

fn tables(ens: &HardInstanceEnsemble, schedule: &[RankOnePovm], t: usize) -> Result<Tables> {
    let d_t = crate::qcore::checked_pow(ens.d, t).unwrap_or(usize::MAX);
    if let Some(p) = schedule.iter().find(|p| p.dim() != d_t) {
        return Err(QcError::Shape(format!("POVM on dimension {} for d^t = {d_t}", p.dim())));
    }
    let mm = tensor_power(&(eye(ens.d) / C64::new(ens.d as f64, 0.0)), t);
    let q = schedule.iter().map(|m| m.probabilities_of(&mm)).collect();
    let p = (0..ens.size())
        .map(|k| {
            let pow = tensor_power(ens.state(&ens.signs(k))?.mat(), t);
            Ok(schedule.iter().map(|m| m.probabilities_of(&pow)).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Tables { p, q })
}

fn check_budget(ens: &HardInstanceEnsemble, schedule: &[RankOnePovm]) -> Result<usize> {
    if schedule.is_empty() {
        return Err(QcError::InvalidParameter("empty measurement schedule".into()));
    }
    let mut total = ens.size();
    for m in schedule {
        total = total.checked_mul(m.outcomes()).unwrap_or(usize::MAX);
    }
    if total > ENUMERATION_BUDGET {
        return Err(QcError::ResourceLimit { what: "2^ell * outcome tuples".into(), size: total, cap: ENUMERATION_BUDGET });
    }
    Ok(total)
}

/// `d_χ²(E_z P_z^{(n)} ‖ P_mm^{(n)})` by enumerating every joint outcome
/// tuple and every sign vector; round `i` uses `schedule[i]` on `t` copies.
pub fn chi2_exact(ens: &HardInstanceEnsemble, schedule: &[RankOnePovm], t: usize, en: Enumeration) -> Result<f64> {
    check_budget(ens, schedule)?;
    let tab = tables(ens, schedule, t)?;
    let sizes: Vec<usize> = schedule.iter().map(|m| m.outcomes()).collect();
    let tuples: usize = sizes.iter().product();
    let nz = ens.size() as f64;
    let sum = en.exec.chunked_sum(tuples, en.parts, |mut idx| {
        let mut xs = Vec::with_capacity(sizes.len());
        for &s in &sizes {
            xs.push(idx % s);
            idx /= s;
        }
        let q: f64 = xs.iter().enumerate().map(|(i, &x)| tab.q[i][x]).product();
        if q <= 0.0 {
            return 0.0;
        }
        let mix: Vec<f64> = tab.p.iter().map(|pz| xs.iter().enumerate().map(|(i, &x)| pz[i][x]).product()).collect();
        let mixture = pairwise_sum(&mix) / nz;
        mixture * mixture / q
    });
    Ok(sum - 1.0)
}

/// `φ_i(z, z′) = E_{x∼q}[δ_z(x) δ_{z′}(x)]` with `δ_z = p_z/q − 1`, from the
/// raw likelihood ratios.
pub fn phi_likelihood(ens: &HardInstanceEnsemble, povm: &RankOnePovm, z: &[f64], zp: &[f64], t: usize) -> Result<f64> {
    let mm = tensor_power(&(eye(ens.d) / C64::new(ens.d as f64, 0.0)), t);
    let q = povm.probabilities_of(&mm);
    let pz = povm.probabilities_of(&tensor_power(ens.state(z)?.mat(), t));
    let pzp = povm.probabilities_of(&tensor_power(ens.state(zp)?.mat(), t));
    Ok(q.iter()
        .zip(pz.iter().zip(&pzp))
        .filter(|(q, _)| **q > 0.0)
        .map(|(q, (a, b))| q * (a / q - 1.0) * (b / q - 1.0))
        .sum())
}

/// `φ(z, z′) = d^t tr(Δ_z^{(t)} H(Δ_{z′}^{(t)}))` through the Lüders channel.
pub fn phi_lueders(ens: &HardInstanceEnsemble, h: &Superoperator, z: &[f64], zp: &[f64], t: usize) -> Result<f64> {
    let a = tensor_perturbation(ens, z, t)?;
    let b = tensor_perturbation(ens, zp, t)?;
    Ok(h.dim() as f64 * trace_product(&a, &h.apply(&b)).re)
}

/// Ingster–Suslina bound `E_{z,z′} exp(Σ_i φ_i(z, z′)) − 1`, enumerating all
/// pairs of sign vectors.
pub fn ingster_suslina_bound(
    ens: &HardInstanceEnsemble,
    schedule: &[RankOnePovm],
    t: usize,
    en: Enumeration,
) -> Result<f64> {
    check_budget(ens, schedule)?;
    let tab = tables(ens, schedule, t)?;
    let nz = ens.size();
    let sum = en.exec.chunked_sum(nz * nz, en.parts, |k| {
        let (a, b) = (k / nz, k % nz);
        let exponent: f64 = (0..schedule.len())
            .map(|i| {
                tab.q[i]
                    .iter()
                    .enumerate()
                    .filter(|(_, q)| **q > 0.0)
                    .map(|(x, q)| q * (tab.p[a][i][x] / q - 1.0) * (tab.p[b][i][x] / q - 1.0))
                    .sum::<f64>()
            })
            .sum();
        exponent.exp()
    });
    Ok(sum / (nz * nz) as f64 - 1.0)
}

/// Mean of `φ_i` over all pairs of sign vectors, per round.
pub fn mean_phi(ens: &HardInstanceEnsemble, schedule: &[RankOnePovm], t: usize) -> Result<Vec<f64>> {
    check_budget(ens, schedule)?;
    let tab = tables(ens, schedule, t)?;
    let nz = ens.size();
    Ok((0..schedule.len())
        .map(|i| {
            let mut acc = 0.0;
            for a in 0..nz {
                for b in 0..nz {
                    acc += tab.q[i]
                        .iter()
                        .enumerate()
                        .filter(|(_, q)| **q > 0.0)
                        .map(|(x, q)| q * (tab.p[a][i][x] / q - 1.0) * (tab.p[b][i][x] / q - 1.0))
                        .sum::<f64>();
                }
            }
            acc / (nz * nz) as f64
        })
        .collect())
}

/// Inner products `tr(A H(B))` for `A, B ∈ {L, H}` in the split
/// `Δ_z^{(t)} = L_z + H_z`, `L_z = Σ_k Δ̄_z at register k ⊗ (I/d)` elsewhere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearizedTerms {
    pub ll: f64,
    pub lh: f64,
    pub hl: f64,
    pub hh: f64,
}

impl LinearizedTerms {
    pub fn total(&self) -> f64 {
        self.ll + self.lh + self.hl + self.hh
    }

    pub fn nonlinear(&self) -> f64 {
        self.lh + self.hl + self.hh
    }
}

/// `L_z` and `H_z` for one sign vector.
pub fn linear_split(ens: &HardInstanceEnsemble, z: &[f64], t: usize, caps: &Caps) -> Result<(CMat, CMat)> {
    caps.check_dim("d^t", ens.d, t)?;
    let (_, bar) = ens.clamped_delta(z);
    let mm = eye(ens.d) / C64::new(ens.d as f64, 0.0);
    let big = crate::qcore::checked_pow(ens.d, t).unwrap_or(usize::MAX);
    let mut l = CMat::zeros(big, big);
    for k in 0..t {
        let factors: Vec<&CMat> = (0..t).map(|r| if r == k { &bar } else { &mm }).collect();
        l += kron_all(&factors);
    }
    let h = tensor_perturbation(ens, z, t)? - &l;
    Ok((l, h))
}

pub fn linearized_terms(
    ens: &HardInstanceEnsemble,
    h: &Superoperator,
    z: &[f64],
    zp: &[f64],
    t: usize,
    caps: &Caps,
) -> Result<LinearizedTerms> {
    let (lz, hz) = linear_split(ens, z, t, caps)?;
    let (lzp, hzp) = linear_split(ens, zp, t, caps)?;
    let (hl_img, hh_img) = (h.apply(&lzp), h.apply(&hzp));
    Ok(LinearizedTerms {
        ll: trace_product(&lz, &hl_img).re,
        lh: trace_product(&lz, &hh_img).re,
        hl: trace_product(&hz, &hl_img).re,
        hh: trace_product(&hz, &hh_img).re,
    })
}

/// Both sides of `E exp(a_z a_{z′} f) ≤ E exp(f) + 4e^{−d}` for the
/// bilinear `f(z, z′) = n d t² tr(Δ_z H̃(Δ_{z′}))`, by exhaustive enumeration.
pub fn normalization_check(ens: &HardInstanceEnsemble, induced: &Superoperator, n: usize, t: usize) -> Result<(f64, f64)> {
    if ens.ell > 12 {
        return Err(QcError::ResourceLimit { what: "ell".into(), size: ens.ell, cap: 12 });
    }
    let nz = ens.size();
    let deltas: Vec<(f64, CMat)> = (0..nz).map(|k| {
        let delta = ens.delta(&ens.signs(k));
        (ens.clamp(&delta), delta)
    }).collect();
    let images: Vec<CMat> = deltas.iter().map(|(_, m)| induced.apply(m)).collect();
    let scale = (n * ens.d * t * t) as f64;
    let (mut lhs, mut rhs) = (Vec::with_capacity(nz * nz), Vec::with_capacity(nz * nz));
    for (a, da) in &deltas {
        for ((b, _), img) in deltas.iter().zip(&images) {
            let f = scale * trace_product(da, img).re;
            lhs.push((a * b * f).exp());
            rhs.push(f.exp());
        }
    }
    let norm = (nz * nz) as f64;
    Ok((pairwise_sum(&lhs) / norm, pairwise_sum(&rhs) / norm + 4.0 * (-(ens.d as f64)).exp()))
}
