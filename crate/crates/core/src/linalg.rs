//! Dense complex linear algebra helpers shared by every module.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. Vectorization follows the
//! column-stacking convention, which coincides with nalgebra's column-major
//! storage: `vec(X)[r + c * d] = X[(r, c)]`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;
pub type RMat = DMatrix<f64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

/// `|i><j|` in dimension `d`.
pub fn matrix_unit(d: usize, i: usize, j: usize) -> CMat {
    let mut m = CMat::zeros(d, d);
    m[(i, j)] = ONE;
    m
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn vectorize(m: &CMat) -> CVec {
    CVec::from_column_slice(m.as_slice())
}

pub fn unvectorize(v: &CVec, rows: usize, cols: usize) -> CMat {
    CMat::from_column_slice(rows, cols, v.as_slice())
}

pub fn outer(u: &CVec, v: &CVec) -> CMat {
    u * v.adjoint()
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn trace(m: &CMat) -> Complex64 {
    m.diagonal().iter().sum()
}

pub fn all_finite(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn hermiticity_defect(m: &CMat) -> f64 {
    frobenius(&(m - m.adjoint()))
}

pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    m.is_square() && hermiticity_defect(m) <= tol
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// Eigendecomposition of the Hermitian part of `m`, eigenvalues ascending.
pub fn eigh(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub fn eigvalsh(m: &CMat) -> Vec<f64> {
    let mut vals: Vec<f64> = hermitian_part(m)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// Smallest eigenvalue of the Hermitian part and a unit eigenvector for it.
pub fn min_eigenpair(m: &CMat) -> (f64, CVec) {
    let (vals, vecs) = eigh(m);
    (vals[0], vecs.column(0).into_owned())
}

pub fn min_eigenvalue(m: &CMat) -> f64 {
    eigvalsh(m)[0]
}

/// Trace norm `Tr|X|` (sum of singular values).
pub fn trace_norm(m: &CMat) -> f64 {
    m.clone().singular_values().iter().sum()
}

/// Partial trace over the second tensor factor of a `(da*db)x(da*db)` matrix.
pub fn partial_trace_second(m: &CMat, da: usize, db: usize) -> CMat {
    CMat::from_fn(da, da, |i, j| {
        (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()
    })
}

/// Partial trace over the first tensor factor.
pub fn partial_trace_first(m: &CMat, da: usize, db: usize) -> CMat {
    CMat::from_fn(db, db, |a, b| {
        (0..da).map(|k| m[(k * db + a, k * db + b)]).sum()
    })
}

/// Partial transpose of a `(da*db)x(da*db)` matrix on the first or second
/// tensor factor.
pub fn partial_transpose(m: &CMat, da: usize, db: usize, second: bool) -> CMat {
    let n = da * db;
    CMat::from_fn(n, n, |row, col| {
        let (i, a) = (row / db, row % db);
        let (j, b) = (col / db, col % db);
        if second {
            m[(i * db + b, j * db + a)]
        } else {
            m[(j * db + a, i * db + b)]
        }
    })
}

/// Projection onto the positive semidefinite cone (Frobenius metric).
pub fn psd_projection(m: &CMat) -> CMat {
    let (vals, vecs) = eigh(m);
    let n = m.nrows();
    let mut out = CMat::zeros(n, n);
    for (k, &v) in vals.iter().enumerate() {
        if v > 0.0 {
            let col = vecs.column(k);
            out += (col * col.adjoint()).scale(v);
        }
    }
    out
}

/// Moore-Penrose pseudoinverse of a Hermitian matrix; eigenvalues whose
/// magnitude is below `rel_cut * max|eig|` are treated as zero.
pub fn pinv_hermitian(m: &CMat, rel_cut: f64) -> CMat {
    let (vals, vecs) = eigh(m);
    let scale = vals.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let n = m.nrows();
    let mut out = CMat::zeros(n, n);
    if scale == 0.0 {
        return out;
    }
    for (k, &v) in vals.iter().enumerate() {
        if v.abs() > rel_cut * scale {
            let col = vecs.column(k);
            out += (col * col.adjoint()).scale(1.0 / v);
        }
    }
    out
}

/// Orthonormal basis for the column span of `m` (rank decided at `rel_tol`).
pub fn orthonormal_columns(m: &CMat, rel_tol: f64) -> CMat {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return CMat::zeros(rows, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.iter().fold(0.0f64, |a, &b| a.max(b));
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| smax > 0.0 && svd.singular_values[k] > rel_tol * smax)
        .collect();
    let mut out = CMat::zeros(rows, keep.len());
    for (dst, &src) in keep.iter().enumerate() {
        out.set_column(dst, &u.column(src));
    }
    out
}

pub fn check_square(m: &CMat, what: &str) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "{what} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.nrows())
}

pub fn real_to_complex(m: &RMat) -> CMat {
    m.map(|x| c(x, 0.0))
}

// ---------------------------------------------------------------------------
// Random ensembles

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Complex Ginibre matrix with i.i.d. standard complex normal entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = CMat::zeros(rows, cols);
    for z in m.iter_mut() {
        *z = c(gaussian(rng) * s, gaussian(rng) * s);
    }
    m
}

pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVec {
    let g = ginibre(rng, n, 1);
    let v = g.column(0).into_owned();
    let norm = v.norm();
    v / c(norm, 0.0)
}

/// GUE-distributed Hermitian matrix.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    hermitian_part(&ginibre(rng, n, n))
}

/// Haar-random unitary: QR of a Ginibre matrix with the phases of the
/// diagonal of R absorbed into Q.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    let qr = ginibre(rng, n, n).qr();
    let (mut q, r) = qr.unpack();
    for k in 0..n {
        let rkk = r[(k, k)];
        let phase = if rkk.norm() > 0.0 {
            rkk / rkk.norm()
        } else {
            ONE
        };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    q
}

/// Random mixed state from the Hilbert-Schmidt ensemble `G G* / Tr(G G*)`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    let g = ginibre(rng, n, n);
    let rho = &g * g.adjoint();
    let tr = trace(&rho).re;
    rho / c(tr, 0.0)
}

pub fn random_pure_density<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    let v = random_unit_vector(rng, n);
    outer(&v, &v)
}

/// Uniform point on the probability simplex.
pub fn random_simplex<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn vectorization_is_column_stacking() {
        let m = CMat::from_fn(2, 3, |r, c_| c((r + 10 * c_) as f64, 0.0));
        let v = vectorize(&m);
        assert_eq!(v[1], c(1.0, 0.0));
        assert_eq!(v[2], c(10.0, 0.0));
        assert_eq!(unvectorize(&v, 2, 3), m);
    }

    #[test]
    fn vec_of_product_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = ginibre(&mut rng, 3, 3);
        let x = ginibre(&mut rng, 3, 3);
        let b = ginibre(&mut rng, 3, 3);
        let lhs = vectorize(&(&a * &x * &b));
        let rhs = kron(&b.transpose(), &a) * vectorize(&x);
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = haar_unitary(&mut rng, 4);
        assert!(frobenius(&(u.adjoint() * &u - identity(4))) < 1e-12);
    }

    #[test]
    fn eigh_sorted_and_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_hermitian(&mut rng, 5);
        let (vals, vecs) = eigh(&h);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let diag = CMat::from_diagonal(&DVector::from_iterator(5, vals.iter().map(|&v| c(v, 0.0))));
        assert!(frobenius(&(&vecs * diag * vecs.adjoint() - h)) < 1e-12);
    }

    #[test]
    fn partial_traces_of_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_density(&mut rng, 2);
        let b = random_density(&mut rng, 3);
        let ab = kron(&a, &b);
        assert!(frobenius(&(partial_trace_second(&ab, 2, 3) - &a)) < 1e-12);
        assert!(frobenius(&(partial_trace_first(&ab, 2, 3) - &b)) < 1e-12);
    }

    #[test]
    fn trace_norm_of_hermitian_is_abs_eigen_sum() {
        let m = CMat::from_diagonal(&DVector::from_vec(vec![c(1.0, 0.0), c(-2.0, 0.0)]));
        assert!((trace_norm(&m) - 3.0).abs() < 1e-14);
    }
}
