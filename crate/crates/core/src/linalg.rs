//! Small dense Hermitian helpers shared by the solvers.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;

/// Entry-wise tolerance below which a matrix counts as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-13;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Largest entry-wise deviation `|M - M*|`.
pub fn hermitian_deviation(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Accepts matrices within [`HERMITIAN_TOL`] of Hermitian and returns `(M + M*)/2`.
pub fn symmetrize(m: &CMat) -> Result<CMat> {
    if !m.is_square() {
        return Err(Error::InvalidInput(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let dev = hermitian_deviation(m);
    if !dev.is_finite() || dev > HERMITIAN_TOL {
        return Err(Error::NonHermitian { deviation: dev });
    }
    Ok((m + m.adjoint()).scale(0.5))
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(m.nrows(), m.ncols(), |r, col| {
        eig.eigenvectors[(r, order[col])]
    });
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Applies a real function to the spectrum of a Hermitian matrix.
pub fn hermitian_function(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (values, vectors) = hermitian_eigen(m);
    let n = m.nrows();
    let mut out = CMat::zeros(n, n);
    for (k, &lam) in values.iter().enumerate() {
        let w = f(lam);
        if w == 0.0 {
            continue;
        }
        let v = vectors.column(k);
        out += (v * v.adjoint()).scale(w);
    }
    out
}

/// Negative part `M_- = (|M| - M)/2`: eigenvalues `max(0, -lambda)`, same eigenvectors.
pub fn negative_part(m: &CMat) -> Result<CMat> {
    let m = symmetrize(m)?;
    Ok(hermitian_function(&m, |lam| (-lam).max(0.0)))
}

/// `tr M_-^p` computed from the spectrum.
pub fn trace_negative_part_pow(m: &CMat, p: f64) -> f64 {
    hermitian_eigenvalues(m)
        .into_iter()
        .filter(|&l| l < 0.0)
        .map(|l| (-l).powf(p))
        .sum()
}

/// Spectral norm of a Hermitian matrix.
pub fn hermitian_norm(m: &CMat) -> f64 {
    hermitian_eigenvalues(m)
        .into_iter()
        .fold(0.0_f64, |acc, l| acc.max(l.abs()))
}

pub fn trace(m: &CMat) -> Complex64 {
    m.trace()
}

/// Singular values, descending.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(values: &[f64]) -> CMat {
        CMat::from_fn(values.len(), values.len(), |i, j| {
            if i == j {
                c(values[i], 0.0)
            } else {
                c(0.0, 0.0)
            }
        })
    }

    #[test]
    fn negative_part_of_diagonal() {
        let np = negative_part(&diag(&[1.0, -2.0])).unwrap();
        assert!((np[(0, 0)].re).abs() < 1e-15);
        assert!((np[(1, 1)].re - 2.0).abs() < 1e-14);
        assert!(np[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn negative_part_of_zero() {
        let np = negative_part(&CMat::zeros(3, 3)).unwrap();
        assert_eq!(max_abs(&np), 0.0);
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = diag(&[1.0, 2.0]);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(negative_part(&m), Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn symmetrize_absorbs_roundoff() {
        let mut m = diag(&[1.0, 2.0]);
        m[(0, 1)] = c(0.5, 0.25);
        m[(1, 0)] = c(0.5 + 1e-15, -0.25);
        let s = symmetrize(&m).unwrap();
        assert_eq!(hermitian_deviation(&s), 0.0);
    }
}
