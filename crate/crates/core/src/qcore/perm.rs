use super::{Caps, CMat, C64};
use crate::error::Result;

/// Permutation of `0..n` stored as its images: `j ↦ self.0[j]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Perm(pub Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `(self ∘ other)(j) = self(other(j))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&j| self.0[j]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (j, &p) in self.0.iter().enumerate() {
            inv[p] = j;
        }
        Perm(inv)
    }

    pub fn cycle_type(&self) -> Vec<usize> {
        cycle_type(&self.0)
    }
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// All permutations of `0..n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(factorial(n) as usize);
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else { break };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

/// Cycle lengths in non-increasing order.
pub fn cycle_type(perm: &[usize]) -> Vec<usize> {
    let n = perm.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut j = s;
        while !seen[j] {
            seen[j] = true;
            j = perm[j];
            len += 1;
        }
        out.push(len);
    }
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

/// Basis action of the register permutation `V(π)` on `(C^d)^{⊗n}`:
/// `V(π)|x⟩ = |map[x]⟩`, where the digit of register `j` moves to register
/// `π(j)`. Equivalently `V(π)|i_1..i_n⟩ = |i_{π⁻¹(1)}..i_{π⁻¹(n)}⟩`.
pub fn basis_map(perm: &[usize], d: usize) -> Vec<usize> {
    let n = perm.len();
    let total = d.pow(n as u32);
    let mut pw = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        pw[i] = pw[i + 1] * d;
    }
    (0..total)
        .map(|x| {
            let mut out = 0;
            for j in 0..n {
                let digit = (x / pw[j]) % d;
                out += digit * pw[perm[j]];
            }
            out
        })
        .collect()
}

pub fn permutation_operator(perm: &[usize], d: usize) -> CMat {
    let map = basis_map(perm, d);
    let n = map.len();
    let mut m = CMat::zeros(n, n);
    for (x, &y) in map.iter().enumerate() {
        m[(y, x)] = C64::new(1.0, 0.0);
    }
    m
}

/// `out += coeff · V m`, where `V` has basis action `map`.
pub fn apply_perm_left(map: &[usize], m: &CMat, coeff: C64, out: &mut CMat) {
    for (x, &y) in map.iter().enumerate() {
        for c in 0..m.ncols() {
            out[(y, c)] += coeff * m[(x, c)];
        }
    }
}

/// `out += coeff · m V`, where `V` has basis action `map`.
pub fn apply_perm_right(map: &[usize], m: &CMat, coeff: C64, out: &mut CMat) {
    for c in 0..m.ncols() {
        let src = map[c];
        for r in 0..m.nrows() {
            out[(r, c)] += coeff * m[(r, src)];
        }
    }
}

/// Projector onto the symmetric subspace of `(C^d)^{⊗n}`.
pub fn symmetric_projector(d: usize, n: usize, caps: &Caps) -> Result<CMat> {
    let dim = caps.check_dim("symmetric projector dimension", d, n)?;
    let mut p = CMat::zeros(dim, dim);
    let w = C64::new(1.0 / factorial(n) as f64, 0.0);
    for perm in all_permutations(n) {
        for (x, y) in basis_map(&perm, d).into_iter().enumerate() {
            p[(y, x)] += w;
        }
    }
    Ok(p)
}
