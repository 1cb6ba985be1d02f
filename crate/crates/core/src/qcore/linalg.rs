use super::{CMat, CVec, C64};
use crate::error::{QcError, Result};

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Left-to-right Kronecker product of a list; the empty product is `[1]`.
pub fn kron_all(ms: &[&CMat]) -> CMat {
    let mut out = CMat::from_element(1, 1, C64::new(1.0, 0.0));
    for m in ms {
        out = out.kronecker(*m);
    }
    out
}

pub fn tensor_power(a: &CMat, n: usize) -> CMat {
    let mut out = CMat::from_element(1, 1, C64::new(1.0, 0.0));
    for _ in 0..n {
        out = out.kronecker(a);
    }
    out
}

/// `|u><v|`.
pub fn outer(u: &CVec, v: &CVec) -> CMat {
    u * v.adjoint()
}

pub fn trace(m: &CMat) -> C64 {
    m.diagonal().iter().sum()
}

/// `tr(AB)` without forming the product.
pub fn trace_product(a: &CMat, b: &CMat) -> C64 {
    let n = a.nrows();
    let mut s = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..a.ncols() {
            s += a[(i, j)] * b[(j, i)];
        }
    }
    s
}

pub fn frobenius(m: &CMat) -> f64 {
    m.norm()
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_abs_diff");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    m.is_square() && max_abs_diff(m, &m.adjoint()) <= tol
}

/// Eigen-decomposition of the Hermitian part of `m`, eigenvalues ascending.
///
/// Householder tridiagonalisation followed by the implicit QL iteration
/// with Wilkinson shifts (tql2). nalgebra's own QR stage can return NaN on
/// highly degenerate inputs such as channel Choi matrices, so only its
/// tridiagonalisation is reused.
pub fn eigh(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let (q, diag, off) = nalgebra::linalg::SymmetricTridiagonal::new(hermitize(m)).unpack();
    let (vals, z) = tql2(diag.iter().copied().collect(), off.iter().copied().collect());
    let zc = z.map(|x| C64::new(x, 0.0));
    (vals, q * zc)
}

/// Real symmetric counterpart of [`eigh`].
pub fn eigh_real(m: &nalgebra::DMatrix<f64>) -> (Vec<f64>, nalgebra::DMatrix<f64>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), nalgebra::DMatrix::zeros(0, 0));
    }
    let sym = (m + m.transpose()) * 0.5;
    let (q, diag, off) = nalgebra::linalg::SymmetricTridiagonal::new(sym).unpack();
    let (vals, z) = tql2(diag.iter().copied().collect(), off.iter().copied().collect());
    (vals, q * z)
}

/// Eigen-decomposition of the symmetric tridiagonal matrix with diagonal
/// `d` and off-diagonal `off`; eigenvalues ascending, eigenvectors in the
/// columns of the returned orthogonal matrix.
fn tql2(mut d: Vec<f64>, off: Vec<f64>) -> (Vec<f64>, nalgebra::DMatrix<f64>) {
    let n = d.len();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(&off[..n - 1]);
    let mut z = nalgebra::DMatrix::<f64>::identity(n, n);
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            loop {
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;
                p = d[m];
                let (mut c, mut c2, mut c3) = (1.0, 1.0, 1.0);
                let el1 = e[l + 1];
                let (mut s, mut s2) = (0.0, 0.0);
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let h = z[(k, i + 1)];
                        z[(k, i + 1)] = s * z[(k, i)] + c * h;
                        z[(k, i)] = c * z[(k, i)] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let vals = order.iter().map(|&i| d[i]).collect();
    let mut zs = nalgebra::DMatrix::<f64>::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        zs.set_column(k, &z.column(i));
    }
    (vals, zs)
}

fn singular_values(m: &CMat) -> Vec<f64> {
    m.clone().singular_values().iter().copied().collect()
}

pub fn op_norm(m: &CMat) -> f64 {
    singular_values(m).into_iter().fold(0.0, f64::max)
}

pub fn trace_norm(m: &CMat) -> f64 {
    singular_values(m).into_iter().sum()
}

/// Schatten p-norm, also for `0 < p < 1` where it is a quasi-norm. Singular
/// values below `1e-12` count as zero.
pub fn schatten_norm(m: &CMat, p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(QcError::InvalidParameter(format!("schatten exponent {p} must be positive")));
    }
    let sv = singular_values(m);
    if p.is_infinite() {
        return Ok(sv.into_iter().fold(0.0, f64::max));
    }
    let s: f64 = sv.into_iter().filter(|&s| s > 1e-12).map(|s| s.powf(p)).sum();
    Ok(s.powf(1.0 / p))
}

/// Row-major vectorisation: `vec(M)[i*cols + j] = M[i,j]`.
pub fn vec_row_major(m: &CMat) -> CVec {
    let (r, c) = m.shape();
    CVec::from_fn(r * c, |k, _| m[(k / c, k % c)])
}

pub fn unvec_row_major(v: &CVec, rows: usize, cols: usize) -> CMat {
    assert_eq!(v.len(), rows * cols, "length mismatch in unvec");
    CMat::from_fn(rows, cols, |i, j| v[i * cols + j])
}

fn check_dims(m: &CMat, dims: &[usize]) -> Result<usize> {
    let total: usize = dims.iter().product();
    if !m.is_square() || m.nrows() != total {
        return Err(QcError::Shape(format!(
            "matrix {}x{} does not match subsystem dims {:?}",
            m.nrows(),
            m.ncols(),
            dims
        )));
    }
    Ok(total)
}

/// Traces out every subsystem not listed in `keep`. Subsystems are ordered
/// with the first one most significant; `keep` may be in any order and the
/// output keeps the original relative order.
pub fn partial_trace(m: &CMat, dims: &[usize], keep: &[usize]) -> Result<CMat> {
    check_dims(m, dims)?;
    let n = dims.len();
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.iter().any(|&k| k >= n) {
        return Err(QcError::InvalidParameter(format!("keep {:?} out of range for {n} subsystems", keep)));
    }
    let traced: Vec<usize> = (0..n).filter(|i| !kept.contains(i)).collect();
    let kd: usize = kept.iter().map(|&i| dims[i]).product();
    let td: usize = traced.iter().map(|&i| dims[i]).product();
    let mut stride = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        stride[i] = stride[i + 1] * dims[i + 1];
    }
    let offsets = |sel: &[usize], count: usize| -> Vec<usize> {
        (0..count)
            .map(|mut idx| {
                let mut off = 0;
                for &s in sel.iter().rev() {
                    off += (idx % dims[s]) * stride[s];
                    idx /= dims[s];
                }
                off
            })
            .collect()
    };
    let ko = offsets(&kept, kd);
    let to = offsets(&traced, td);
    let mut out = CMat::zeros(kd, kd);
    for a in 0..kd {
        for b in 0..kd {
            let mut s = C64::new(0.0, 0.0);
            for &t in &to {
                s += m[(ko[a] + t, ko[b] + t)];
            }
            out[(a, b)] = s;
        }
    }
    Ok(out)
}

/// Reorders subsystems: subsystem `j` of the input lands at position
/// `perm[j]` of the output.
pub fn permute_subsystems(m: &CMat, dims: &[usize], perm: &[usize]) -> Result<CMat> {
    let total = check_dims(m, dims)?;
    let n = dims.len();
    let mut seen = vec![false; n];
    if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
        return Err(QcError::InvalidParameter(format!("{perm:?} is not a permutation of {n} items")));
    }
    let mut new_dims = vec![0; n];
    for j in 0..n {
        new_dims[perm[j]] = dims[j];
    }
    let map: Vec<usize> = (0..total)
        .map(|mut idx| {
            let mut digits = vec![0; n];
            for j in (0..n).rev() {
                digits[j] = idx % dims[j];
                idx /= dims[j];
            }
            let mut out = 0;
            let mut moved = vec![0; n];
            for j in 0..n {
                moved[perm[j]] = digits[j];
            }
            for j in 0..n {
                out = out * new_dims[j] + moved[j];
            }
            out
        })
        .collect();
    let mut out = CMat::zeros(total, total);
    for a in 0..total {
        for b in 0..total {
            out[(map[a], map[b])] = m[(a, b)];
        }
    }
    Ok(out)
}

/// Low-rank factor `L` with `m ≈ L L†` by diagonally pivoted Cholesky.
/// Stops once every residual diagonal entry is below `rel_tol` times the
/// largest initial diagonal entry.
pub fn psd_factor(m: &CMat, rel_tol: f64) -> CMat {
    let n = m.nrows();
    let mut diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    let scale = diag.iter().cloned().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut cols: Vec<CVec> = Vec::new();
    loop {
        let (p, &dp) = match diag.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)) {
            Some(x) => x,
            None => break,
        };
        if dp <= rel_tol * scale || cols.len() == n {
            break;
        }
        let mut col = m.column(p).clone_owned();
        for l in &cols {
            let c = l[p].conj();
            col.axpy(-c, l, C64::new(1.0, 0.0));
        }
        let s = dp.sqrt();
        col /= C64::new(s, 0.0);
        col[p] = C64::new(s, 0.0);
        for i in 0..n {
            diag[i] -= col[i].norm_sqr();
        }
        diag[p] = 0.0;
        cols.push(col);
    }
    if cols.is_empty() {
        return CMat::zeros(n, 0);
    }
    CMat::from_columns(&cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{diag, eye};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn partial_trace_of_product_keeps_factor() {
        let a = CMat::from_row_slice(2, 2, &[c(0.7, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.3, 0.0)]);
        let b = diag(&[0.2, 0.3, 0.5]);
        let ab = kron(&a, &b);
        let ka = partial_trace(&ab, &[2, 3], &[0]).unwrap();
        let kb = partial_trace(&ab, &[2, 3], &[1]).unwrap();
        assert!(max_abs_diff(&ka, &a) < 1e-14);
        assert!(max_abs_diff(&kb, &b) < 1e-14);
        let full = partial_trace(&ab, &[2, 3], &[0, 1]).unwrap();
        assert!(max_abs_diff(&full, &ab) < 1e-14);
    }

    #[test]
    fn permute_subsystems_swaps_factors() {
        let a = diag(&[1.0, 2.0]);
        let b = diag(&[3.0, 4.0, 5.0]);
        let swapped = permute_subsystems(&kron(&a, &b), &[2, 3], &[1, 0]).unwrap();
        assert!(max_abs_diff(&swapped, &kron(&b, &a)) < 1e-14);
    }

    #[test]
    fn vec_roundtrip_and_trace_identity() {
        let a = CMat::from_fn(2, 3, |i, j| c(i as f64, j as f64));
        assert_eq!(unvec_row_major(&vec_row_major(&a), 2, 3), a);
        let h = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        let r = diag(&[0.25, 0.75]);
        let lhs = (vec_row_major(&h).adjoint() * vec_row_major(&r))[(0, 0)];
        assert!((lhs - trace(&(&h * &r))).norm() < 1e-14);
    }

    #[test]
    fn schatten_half_and_third_of_maximally_mixed() {
        let d = 5;
        let m = eye(d) / C64::new(d as f64, 0.0);
        assert!((schatten_norm(&m, 0.5).unwrap() - d as f64).abs() < 1e-9);
        assert!((schatten_norm(&m, 1.0 / 3.0).unwrap() - (d * d) as f64).abs() < 1e-8);
        assert!(schatten_norm(&m, 0.0).is_err());
    }

    #[test]
    fn psd_factor_reconstructs_low_rank() {
        let u = CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0), c(0.5, 0.5)]);
        let v = CVec::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.2)]);
        let m = outer(&u, &u) + outer(&v, &v) * c(0.3, 0.0);
        let l = psd_factor(&m, 1e-14);
        assert_eq!(l.ncols(), 2);
        assert!(max_abs_diff(&(&l * l.adjoint()), &m) < 1e-12);
    }

    #[test]
    fn eigh_handles_degenerate_block_structure() {
        // Exact zeros on the tridiagonal and repeated eigenvalues.
        let mut m = CMat::zeros(40, 40);
        for i in 0..40 {
            m[(i, i)] = c(((i / 8) % 3) as f64 / 3.0, 0.0);
        }
        m[(3, 17)] = c(0.25, 0.1);
        m[(17, 3)] = c(0.25, -0.1);
        let (w, v) = eigh(&m);
        assert!(w.iter().all(|x| x.is_finite()));
        let rec = &v * diag(&w) * v.adjoint();
        assert!(max_abs_diff(&rec, &m) < 1e-12);
        assert!(max_abs_diff(&(v.adjoint() * &v), &eye(40)) < 1e-12);
    }

    #[test]
    fn eigh_sorted_and_reconstructs() {
        let m = CMat::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        let (w, v) = eigh(&m);
        assert!((w[0] - 1.0).abs() < 1e-12 && (w[1] - 3.0).abs() < 1e-12);
        let rec = &v * diag(&w) * v.adjoint();
        assert!(max_abs_diff(&rec, &m) < 1e-12);
    }
}
