use crate::error::{QcError, Result};
use crate::qcore::{
    all_permutations, apply_perm_left, apply_perm_right, basis_map, factorial, haar_unitary,
    kron, max_abs_diff, partial_trace, random_density, sym_dim, symmetric_projector, tensor_power,
    unvec_row_major, vec_row_major, Caps, CMat, C64,
};
use crate::schurweyl::{apply_isotypic, partitions_with_max_len, Partition};

const GATE_TOL: f64 = 1e-9;
const GATE_SEED: u64 = 0x5eed_0f_c4a7;
const LIOUVILLE_MAX_ENTRIES: usize = 1 << 24;

/// Random purification channel `Φ^{d,r}` on `n` copies: the average of
/// `|ρ_U⟩⟨ρ_U|^{⊗n}` over Haar `U` acting on an `r`-dimensional purifying
/// register, extended linearly to all inputs.
///
/// Realised as `Φ(X) = Σ_λ c_λ Π_sym (Π_λ X Π_λ ⊗ I_B) Π_sym` with
/// `c_λ = dim(Specht_λ)/dim(V^r_λ)`, where `Π_sym` acts on
/// `(C^d ⊗ C^r)^{⊗n}` with copies interleaved as `A_1 B_1 A_2 B_2 …`. Blocks
/// with more than `r` rows cannot occur for rank-`r` inputs; they are sent to
/// the maximally mixed symmetric state so the channel stays trace preserving.
#[derive(Clone, Debug)]
pub struct PurificationChannel {
    d: usize,
    r: usize,
    n: usize,
    out_dim: usize,
    blocks: Vec<(Partition, Option<f64>)>,
    embed: Vec<usize>,
    sym_maps: Vec<Vec<usize>>,
    replacement: Option<CMat>,
    caps: Caps,
}

impl PurificationChannel {
    /// Builds the channel and runs the validation gate on a random rank-`r`
    /// input: the output must have the input as its system marginal, lie in
    /// the symmetric subspace, have unit trace, and (when small enough) be
    /// invariant under `U(r)` on the purifying registers.
    pub fn build(d: usize, r: usize, n: usize, caps: &Caps) -> Result<Self> {
        if d == 0 || r == 0 || n == 0 {
            return Err(QcError::InvalidParameter(format!("invalid purification sizes d={d} r={r} n={n}")));
        }
        let out_dim = caps.check_dim("(d·r)^n", d * r, n)?;
        let dn = d.pow(n as u32);
        let rn = r.pow(n as u32);
        let mut embed = vec![0usize; dn * rn];
        for a in 0..dn {
            for b in 0..rn {
                let (mut a_rem, mut b_rem, mut out, mut scale) = (a, b, 0usize, 1usize);
                for _ in 0..n {
                    out += ((a_rem % d) * r + (b_rem % r)) * scale;
                    a_rem /= d;
                    b_rem /= r;
                    scale *= d * r;
                }
                embed[a * rn + b] = out;
            }
        }
        let blocks = partitions_with_max_len(n, d)
            .into_iter()
            .map(|lam| {
                let w = (lam.len() <= r).then(|| lam.dim_specht() as f64 / lam.dim_gl(r) as f64);
                (lam, w)
            })
            .collect::<Vec<_>>();
        let replacement = if blocks.iter().any(|(_, w)| w.is_none()) {
            let p = symmetric_projector(d * r, n, caps)?;
            Some(p / C64::new(sym_dim(d * r, n), 0.0))
        } else {
            None
        };
        let sym_maps = all_permutations(n).iter().map(|p| basis_map(p, d * r)).collect();
        let ch = PurificationChannel { d, r, n, out_dim, blocks, embed, sym_maps, replacement, caps: *caps };
        ch.validate()?;
        Ok(ch)
    }

    pub fn input_dim(&self) -> usize {
        self.d.pow(self.n as u32)
    }

    pub fn output_dim(&self) -> usize {
        self.out_dim
    }

    /// `X ⊗ I_B` in the interleaved copy order.
    pub fn embed(&self, x: &CMat) -> CMat {
        let rn = self.r.pow(self.n as u32);
        let mut out = CMat::zeros(self.out_dim, self.out_dim);
        for a in 0..x.nrows() {
            for a2 in 0..x.ncols() {
                let v = x[(a, a2)];
                if v == C64::new(0.0, 0.0) {
                    continue;
                }
                for b in 0..rn {
                    out[(self.embed[a * rn + b], self.embed[a2 * rn + b])] += v;
                }
            }
        }
        out
    }

    /// `Π_sym M Π_sym` on `(C^{d r})^{⊗n}`.
    pub fn symmetrize(&self, m: &CMat) -> CMat {
        let w = C64::new(1.0 / factorial(self.n) as f64, 0.0);
        let mut left = CMat::zeros(m.nrows(), m.ncols());
        for map in &self.sym_maps {
            apply_perm_left(map, m, w, &mut left);
        }
        let mut out = CMat::zeros(m.nrows(), m.ncols());
        for map in &self.sym_maps {
            apply_perm_right(map, &left, w, &mut out);
        }
        out
    }

    pub fn apply(&self, x: &CMat) -> Result<CMat> {
        let dn = self.input_dim();
        if x.nrows() != dn || x.ncols() != dn {
            return Err(QcError::Shape(format!("channel input {:?}, expected {dn}x{dn}", x.shape())));
        }
        let mut inside = CMat::zeros(dn, dn);
        let mut leftover = C64::new(0.0, 0.0);
        for (lam, w) in &self.blocks {
            let left = apply_isotypic(lam, x, self.d, &self.caps)?;
            let both = apply_isotypic(lam, &left.adjoint(), self.d, &self.caps)?.adjoint();
            match w {
                Some(c) => inside += both * C64::new(*c, 0.0),
                None => leftover += both.trace(),
            }
        }
        let mut out = self.symmetrize(&self.embed(&inside));
        if let Some(omega) = &self.replacement {
            if leftover.norm() > 0.0 {
                out += omega * leftover;
            }
        }
        Ok(out)
    }

    /// Liouville matrix on row-major vectorisations.
    pub fn liouville(&self) -> Result<CMat> {
        let din = self.input_dim();
        let entries = self.out_dim.pow(2).saturating_mul(din.pow(2));
        if entries > LIOUVILLE_MAX_ENTRIES {
            return Err(QcError::ResourceLimit { what: "Liouville entries".into(), size: entries, cap: LIOUVILLE_MAX_ENTRIES });
        }
        let mut s = CMat::zeros(self.out_dim.pow(2), din * din);
        for i in 0..din {
            for j in 0..din {
                let mut e = CMat::zeros(din, din);
                e[(i, j)] = C64::new(1.0, 0.0);
                s.set_column(i * din + j, &vec_row_major(&self.apply(&e)?));
            }
        }
        Ok(s)
    }

    /// Positivity of the Choi matrix `Σ_ij |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)`, returning its
    /// smallest eigenvalue.
    pub fn choi_min_eigenvalue(&self) -> Result<f64> {
        let din = self.input_dim();
        let s = self.liouville()?;
        let dout = self.out_dim;
        let mut choi = CMat::zeros(din * dout, din * dout);
        for i in 0..din {
            for j in 0..din {
                let block = unvec_row_major(&s.column(i * din + j).clone_owned(), dout, dout);
                choi.view_mut((i * dout, j * dout), (dout, dout)).copy_from(&block);
            }
        }
        Ok(crate::qcore::eigh(&choi).0[0])
    }

    fn validate(&self) -> Result<()> {
        let mut rng = crate::rng::stream(GATE_SEED, "purification-gate", (self.d * 1000 + self.r * 10 + self.n) as u64);
        let rank = self.r.min(self.d);
        let rho = random_density(self.d, rank, &mut rng)?;
        let x = tensor_power(rho.mat(), self.n);
        let out = self.apply(&x)?;
        let fail = |what: &str, err: f64| {
            Err(QcError::Construction(format!(
                "purification channel d={} r={} n={}: {what} (error {err:.2e})",
                self.d, self.r, self.n
            )))
        };
        let tr_err = (out.trace() - C64::new(1.0, 0.0)).norm();
        if tr_err > GATE_TOL {
            return fail("output trace is not 1", tr_err);
        }
        let dims: Vec<usize> = (0..2 * self.n).map(|k| if k % 2 == 0 { self.d } else { self.r }).collect();
        let keep: Vec<usize> = (0..self.n).map(|k| 2 * k).collect();
        let marg = partial_trace(&out, &dims, &keep)?;
        let m_err = max_abs_diff(&marg, &x);
        if m_err > GATE_TOL {
            return fail("system marginal differs from the input", m_err);
        }
        let w = C64::new(1.0 / factorial(self.n) as f64, 0.0);
        let mut sym = CMat::zeros(out.nrows(), out.ncols());
        for map in &self.sym_maps {
            apply_perm_left(map, &out, w, &mut sym);
        }
        let s_err = max_abs_diff(&sym, &out);
        if s_err > GATE_TOL {
            return fail("output leaves the symmetric subspace", s_err);
        }
        if self.out_dim <= 256 {
            let u = haar_unitary(self.r, &mut rng);
            let local = kron(&crate::qcore::eye(self.d), &u);
            let big = tensor_power(&local, self.n);
            let rotated = &big * &out * big.adjoint();
            let u_err = max_abs_diff(&rotated, &out);
            if u_err > GATE_TOL {
                return fail("output is not invariant on the purifying registers", u_err);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{eye, outer};

    #[test]
    fn single_copy_is_tensor_with_maximally_mixed() {
        let caps = Caps::default();
        let ch = PurificationChannel::build(2, 3, 1, &caps).unwrap();
        let x = CMat::from_row_slice(2, 2, &[C64::new(0.7, 0.0), C64::new(0.1, 0.3), C64::new(0.1, -0.3), C64::new(0.3, 0.0)]);
        let expect = kron(&x, &(eye(3) / C64::new(3.0, 0.0)));
        assert!(max_abs_diff(&ch.apply(&x).unwrap(), &expect) < 1e-14);
    }

    #[test]
    fn two_copies_match_monte_carlo_purifications() {
        let caps = Caps::default();
        let (d, r, n) = (2, 2, 2);
        let ch = PurificationChannel::build(d, r, n, &caps).unwrap();
        let mut rng = crate::rng::stream(17, "purification-mc", 0);
        let rho = random_density(d, r, &mut rng).unwrap();
        let (w, v) = crate::qcore::eigh(rho.mat());
        let exact = ch.apply(&tensor_power(rho.mat(), n)).unwrap();
        let trials = 20000;
        let mut acc = CMat::zeros(exact.nrows(), exact.ncols());
        for _ in 0..trials {
            let u = haar_unitary(r, &mut rng);
            let mut vec = crate::qcore::CVec::zeros(d * r);
            for k in 0..r {
                let part = kron(
                    &CMat::from_columns(&[v.column(k).clone_owned()]),
                    &CMat::from_columns(&[u.column(k).clone_owned()]),
                );
                vec += part.column(0) * C64::new(w[k].max(0.0).sqrt(), 0.0);
            }
            let p = outer(&vec, &vec);
            acc += kron(&p, &p);
        }
        acc /= C64::new(trials as f64, 0.0);
        assert!(max_abs_diff(&acc, &exact) < 0.01);
    }

    #[test]
    fn channel_is_completely_positive_and_trace_preserving() {
        let caps = Caps::default();
        for (d, r, n) in [(2, 1, 2), (2, 2, 2), (3, 2, 2)] {
            let ch = PurificationChannel::build(d, r, n, &caps).unwrap();
            let m = ch.choi_min_eigenvalue().unwrap();
            assert!(m > -1e-10, "choi min {m} at {d} {r} {n}");
            let s = ch.liouville().unwrap();
            let din = ch.input_dim();
            let dout = ch.output_dim();
            for i in 0..din {
                for j in 0..din {
                    let out = unvec_row_major(&s.column(i * din + j).clone_owned(), dout, dout);
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((out.trace() - C64::new(expect, 0.0)).norm() < 1e-12);
                }
            }
        }
    }
}
