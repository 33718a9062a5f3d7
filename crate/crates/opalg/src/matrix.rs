//! Dense complex matrix helpers shared by every module.
//!
//! Everything operates on `nalgebra` dynamic matrices over `Complex<f64>`.
//! Hermitian eigendecompositions are made deterministic by sorting
//! eigenvalues in descending order and fixing each eigenvector's phase so
//! that its largest-magnitude component is real positive.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn diag_reals(vals: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(
        vals.len(),
        vals.iter().map(|&v| c(v, 0.0)),
    ))
}

pub fn check_finite(a: &CMatrix) -> Result<()> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub fn check_square(a: &CMatrix) -> Result<()> {
    if a.nrows() == a.ncols() {
        Ok(())
    } else {
        Err(Error::NonSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        })
    }
}

/// Max absolute entry of `a - a*`.
pub fn hermiticity_residual(a: &CMatrix) -> f64 {
    (a - a.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Max absolute entry, used for residual reports.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Hilbert-Schmidt inner product tr(a* b).
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn trace(a: &CMatrix) -> Complex64 {
    a.diagonal().iter().sum()
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Hermitian eigendecomposition, eigenvalues descending, phases fixed.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvectors as columns.
/// The input is symmetrized first so callers may pass matrices that are
/// Hermitian only up to rounding.
pub fn eigh(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = (a + a.adjoint()) * c(0.5, 0.0);
    let se = h.symmetric_eigen();
    let n = se.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        se.eigenvalues[j]
            .partial_cmp(&se.eigenvalues[i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut vals = Vec::with_capacity(n);
    let mut vecs = CMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vals.push(se.eigenvalues[i]);
        let mut v: CVector = se.eigenvectors.column(i).into();
        fix_phase(&mut v);
        vecs.set_column(col, &v);
    }
    (vals, vecs)
}

/// Rotate so the largest-magnitude component (lowest index on ties) is
/// real positive.
pub fn fix_phase(v: &mut CVector) {
    let mut best = 0;
    let mut best_mag = 0.0;
    for (i, z) in v.iter().enumerate() {
        let m = z.norm();
        if m > best_mag + 1e-14 {
            best_mag = m;
            best = i;
        }
    }
    if best_mag > 0.0 {
        let phase = v[best] / best_mag;
        let correction = phase.conj();
        for z in v.iter_mut() {
            *z *= correction;
        }
    }
}

pub fn min_eig_hermitian(a: &CMatrix) -> f64 {
    let (vals, _) = eigh(a);
    vals.last().copied().unwrap_or(0.0)
}

/// Hermitian within `tol` and min eigenvalue >= -tol.
pub fn is_positive(a: &CMatrix, tol: f64) -> Result<bool> {
    check_square(a)?;
    check_finite(a)?;
    if hermiticity_residual(a) > tol {
        return Ok(false);
    }
    Ok(min_eig_hermitian(a) >= -tol)
}

/// Square root of a PSD Hermitian matrix; tiny negative eigenvalues are
/// clamped to zero.
pub fn hermitian_sqrt(a: &CMatrix) -> CMatrix {
    let (vals, vecs) = eigh(a);
    let d = diag_reals(&vals.iter().map(|&v| v.max(0.0).sqrt()).collect::<Vec<_>>());
    &vecs * d * vecs.adjoint()
}

pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    a.clone().svd(false, false).singular_values.iter().copied().collect()
}

pub fn spectral_norm(a: &CMatrix) -> f64 {
    singular_values(a).into_iter().fold(0.0, f64::max)
}

/// Nuclear norm (sum of singular values).
pub fn trace_norm(a: &CMatrix) -> f64 {
    singular_values(a).into_iter().sum()
}

/// Count of singular values above `tol * sigma_max`.
pub fn numerical_rank(a: &CMatrix, tol: f64) -> usize {
    let sv = singular_values(a);
    let max = sv.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * max).count()
}

/// Orthonormal basis (columns) of the null space of `a`, relative
/// threshold `tol * sigma_max`, computed from the Gram matrix a* a so
/// that wide and tall inputs are handled alike.
pub fn null_space(a: &CMatrix, tol: f64) -> CMatrix {
    let ncols = a.ncols();
    let gram = a.adjoint() * a;
    let (vals, vecs) = eigh(&gram);
    let max = vals.first().copied().unwrap_or(0.0).max(0.0);
    // tol^2 because the Gram eigenvalues are squared singular values;
    // never drop below the eigensolver's own noise floor
    let thr = max * (tol * tol).max(ncols as f64 * 4.0 * f64::EPSILON);
    let cols: Vec<usize> = (0..ncols).filter(|&i| vals[i] <= thr).collect();
    let mut out = CMatrix::zeros(ncols, cols.len());
    for (j, &i) in cols.iter().enumerate() {
        out.set_column(j, &vecs.column(i));
    }
    out
}

pub fn random_complex_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        c(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0)
    })
}

/// Haar-ish random unitary from the QR of a Gaussian-free complex matrix;
/// good enough for residual exercises, deterministic under a seeded rng.
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    let a = random_complex_matrix(rng, n, n);
    let qr = a.qr();
    let mut q = qr.q();
    let r = qr.r();
    // normalize column phases by the sign of R's diagonal
    for j in 0..n {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            for i in 0..n {
                q[(i, j)] *= phase.conj();
            }
        }
    }
    q
}

/// Random density matrix G G* / tr(G G*).
pub fn random_density<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    let g = random_complex_matrix(rng, n, n);
    let p = &g * g.adjoint();
    let t = trace(&p).re;
    p / c(t, 0.0)
}

pub fn random_unit_vector<R: Rng>(rng: &mut R, n: usize) -> CVector {
    let mut v = CVector::from_fn(n, |_, _| {
        c(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0)
    });
    let norm = v.norm();
    v /= c(norm, 0.0);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_positive() {
        assert!(is_positive(&identity(2), 1e-12).unwrap());
    }

    #[test]
    fn indefinite_diagonal_is_not_positive() {
        assert!(!is_positive(&diag_reals(&[1.0, -1.0]), 1e-12).unwrap());
    }

    #[test]
    fn positive_definite_off_diagonal() {
        // [[2,1],[1,1]] has eigenvalues (3 +- sqrt 5)/2, both positive
        let a = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]);
        assert!(is_positive(&a, 1e-12).unwrap());
        let (vals, _) = eigh(&a);
        let s5 = 5.0_f64.sqrt();
        assert!((vals[0] - (3.0 + s5) / 2.0).abs() < 1e-12);
        assert!((vals[1] - (3.0 - s5) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn non_square_rejected() {
        let a = CMatrix::zeros(2, 3);
        assert!(is_positive(&a, 1e-12).is_err());
    }

    #[test]
    fn eigh_reconstructs() {
        let mut rng = crate::test_rng(7);
        let g = random_complex_matrix(&mut rng, 5, 5);
        let h = &g + g.adjoint();
        let (vals, vecs) = eigh(&h);
        let rebuilt = &vecs * diag_reals(&vals) * vecs.adjoint();
        assert!(max_abs(&(rebuilt - h)) < 1e-10);
        assert!(max_abs(&(vecs.adjoint() * &vecs - identity(5))) < 1e-10);
    }

    #[test]
    fn null_space_of_projection() {
        let p = diag_reals(&[1.0, 0.0, 1.0]);
        let ns = null_space(&p, 1e-9);
        assert_eq!(ns.ncols(), 1);
        assert!((ns[(1, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = crate::test_rng(3);
        let u = random_unitary(&mut rng, 6);
        assert!(max_abs(&(u.adjoint() * &u - identity(6))) < 1e-12);
    }

    #[test]
    fn trace_norm_of_rank_one() {
        let p = diag_reals(&[0.0, 3.0]);
        assert!((trace_norm(&p) - 3.0).abs() < 1e-12);
    }
}
