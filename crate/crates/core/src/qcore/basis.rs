use super::{CMat, C64};

/// Orthonormal Hermitian basis of `d x d` matrices under the Hilbert–Schmidt
/// inner product: off-diagonal symmetric and antisymmetric generators, then
/// the traceless diagonal ones, and finally `I/√d`.
pub fn gell_mann_basis(d: usize) -> Vec<CMat> {
    let mut out = Vec::with_capacity(d * d);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..d {
        for j in i + 1..d {
            let mut s = CMat::zeros(d, d);
            s[(i, j)] = C64::new(h, 0.0);
            s[(j, i)] = C64::new(h, 0.0);
            out.push(s);
            let mut a = CMat::zeros(d, d);
            a[(i, j)] = C64::new(0.0, -h);
            a[(j, i)] = C64::new(0.0, h);
            out.push(a);
        }
    }
    for k in 1..d {
        let mut m = CMat::zeros(d, d);
        let norm = ((k * (k + 1)) as f64).sqrt();
        for i in 0..k {
            m[(i, i)] = C64::new(1.0 / norm, 0.0);
        }
        m[(k, k)] = C64::new(-(k as f64) / norm, 0.0);
        out.push(m);
    }
    out.push(super::eye(d) / C64::new((d as f64).sqrt(), 0.0));
    out
}
