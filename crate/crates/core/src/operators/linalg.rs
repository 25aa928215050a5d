//! Dense complex linear algebra helpers on top of faer.

use faer::{c64, Mat, Scale, Side};
use num_complex::Complex64 as C64;

use crate::error::{CauchyError, Result};

pub fn to_c64(z: C64) -> c64 {
    c64::new(z.re, z.im)
}

pub fn frobenius(a: &Mat<c64>) -> f64 {
    a.norm_l2()
}

pub fn max_abs(a: &Mat<c64>) -> f64 {
    a.norm_max()
}

pub fn adjoint(a: &Mat<c64>) -> Mat<c64> {
    a.adjoint().to_owned()
}

pub fn identity(n: usize) -> Mat<c64> {
    Mat::identity(n, n)
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(a: &Mat<c64>) -> Result<(Vec<f64>, Mat<c64>)> {
    let e = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|err| CauchyError::Convergence(format!("Hermitian eigensolver: {err:?}")))?;
    let s = e.S();
    let vals = (0..a.nrows()).map(|i| s.column_vector()[i].re).collect();
    Ok((vals, e.U().to_owned()))
}

/// Distance from Hermitian, relative to the matrix size.
pub fn hermitian_defect(a: &Mat<c64>) -> f64 {
    max_abs(&(a - a.adjoint()))
}

/// Spectral norm. Hermitian and skew-Hermitian inputs use the eigensolver.
pub fn spectral_norm(a: &Mat<c64>) -> Result<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(0.0);
    }
    let scale = max_abs(a);
    if scale == 0.0 {
        return Ok(0.0);
    }
    if a.nrows() == a.ncols() {
        if hermitian_defect(a) <= 1e-14 * scale {
            let h = (a + a.adjoint()) * Scale(c64::new(0.5, 0.0));
            let (v, _) = hermitian_eigen(&h)?;
            return Ok(v.iter().fold(0.0f64, |m, x| m.max(x.abs())));
        }
        let s = a + a.adjoint();
        if max_abs(&s) <= 1e-14 * scale {
            let h = (a - a.adjoint()) * Scale(c64::new(0.0, 0.5));
            let (v, _) = hermitian_eigen(&h)?;
            return Ok(v.iter().fold(0.0f64, |m, x| m.max(x.abs())));
        }
    }
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}

/// Singular values in nonincreasing order.
pub fn singular_values(a: &Mat<c64>) -> Result<Vec<f64>> {
    let mut s = a.singular_values().map_err(|err| CauchyError::Convergence(format!("SVD: {err:?}")))?;
    s.sort_by(|x, y| y.total_cmp(x));
    Ok(s)
}

/// `exp(S)` for skew-Hermitian `S`, through the eigendecomposition of `iS`.
pub fn exp_skew_hermitian(s: &Mat<c64>) -> Result<Mat<c64>> {
    let h = (s - s.adjoint()) * Scale(c64::new(0.0, 0.5));
    let (vals, u) = hermitian_eigen(&h)?;
    // S = -i H, so exp(S) = U diag(e^{-i lambda}) U^dagger
    let n = s.nrows();
    let scaled = Mat::<c64>::from_fn(n, n, |i, j| u[(i, j)] * c64::new(vals[j].cos(), -vals[j].sin()));
    Ok(&scaled * u.adjoint())
}

/// Orthonormal basis of the column span, dropping directions below `rtol` of the largest.
pub fn orthonormal_basis(a: &Mat<c64>, rtol: f64) -> Mat<c64> {
    if a.ncols() == 0 {
        return Mat::zeros(a.nrows(), 0);
    }
    let qr = a.col_piv_qr();
    let r = qr.thin_R();
    let k = r.nrows().min(r.ncols());
    let top = if k > 0 { r[(0, 0)].norm() } else { 0.0 };
    let rank = (0..k).take_while(|&i| r[(i, i)].norm() > rtol * top).count();
    let q = qr.compute_thin_Q();
    let first = q.subcols(0, rank).to_owned();
    // a second pass restores orthogonality lost to round-off
    let qr2 = first.qr();
    qr2.compute_thin_Q()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random(n: usize, m: usize, seed: u64) -> Mat<c64> {
        let mut s = seed;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        Mat::from_fn(n, m, |_, _| c64::new(next(), next()))
    }

    #[test]
    fn exp_of_skew_is_unitary() {
        let a = random(30, 30, 3);
        let s = &a - a.adjoint();
        let e = exp_skew_hermitian(&s).unwrap();
        let d = &e * e.adjoint() - identity(30);
        assert!(max_abs(&d) < 1e-12);
        let einv = exp_skew_hermitian(&(&s * Scale(c64::new(-1.0, 0.0)))).unwrap();
        assert!(max_abs(&(&e * &einv - identity(30))) < 1e-12);
    }

    #[test]
    fn spectral_norm_agrees_across_paths() {
        let a = random(25, 25, 5);
        let h = &a + a.adjoint();
        let via_eig = spectral_norm(&h).unwrap();
        let via_svd = singular_values(&h).unwrap()[0];
        assert!((via_eig - via_svd).abs() < 1e-12 * via_svd);
        let sk = &a - a.adjoint();
        assert!((spectral_norm(&sk).unwrap() - singular_values(&sk).unwrap()[0]).abs() < 1e-12);
    }

    #[test]
    fn orthonormal_basis_detects_rank() {
        let a = random(40, 3, 7);
        let mut b = Mat::<c64>::zeros(40, 5);
        for i in 0..40 {
            for j in 0..3 {
                b[(i, j)] = a[(i, j)];
            }
            b[(i, 3)] = a[(i, 0)] + a[(i, 1)];
            b[(i, 4)] = a[(i, 2)] * c64::new(0.0, 2.0);
        }
        let q = orthonormal_basis(&b, 1e-10);
        assert_eq!(q.ncols(), 3);
        assert!(max_abs(&(q.adjoint() * &q - identity(3))) < 1e-13);
    }
}
