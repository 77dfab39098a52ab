//! Regularization of symmetric curvature matrices before inversion.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularizer {
    /// A + eps I: shifts the whole spectrum by eps; the result is only
    /// positive definite when min eig(A) > -eps.
    Shift(f64),
    /// Eigenvalue clamp: every eigenvalue below eps is raised to eps,
    /// eigenvectors untouched; always positive definite.
    Clamp(f64),
    /// Replace A by lambda_max I (the largest eigenvalue times identity);
    /// requires a positive leading eigenvalue.
    MaxEig,
}

/// Regularize a symmetric matrix. The input must be symmetric within 1e-8;
/// it is exactly symmetrized before the eigendecomposition.
pub fn regularize(a: &DMatrix<f64>, reg: Regularizer) -> Result<DMatrix<f64>> {
    if !a.is_square() {
        return Err(Error::NotSymmetric);
    }
    let n = a.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            if (a[(i, j)] - a[(j, i)]).abs() > 1e-8 {
                return Err(Error::NotSymmetric);
            }
        }
    }
    let sym = (a + a.transpose()) * 0.5;
    match reg {
        Regularizer::Shift(eps) => {
            if eps <= 0.0 {
                return Err(Error::NonPositiveStep(eps));
            }
            Ok(&sym + DMatrix::identity(n, n) * eps)
        }
        Regularizer::Clamp(eps) => {
            if eps <= 0.0 {
                return Err(Error::NonPositiveStep(eps));
            }
            let eig = SymmetricEigen::new(sym);
            let clamped = eig.eigenvalues.map(|l| l.max(eps));
            let q = &eig.eigenvectors;
            Ok(q * DMatrix::from_diagonal(&clamped) * q.transpose())
        }
        Regularizer::MaxEig => {
            let eig = SymmetricEigen::new(sym);
            let lmax = eig.eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
            if lmax <= 0.0 {
                return Err(Error::NonPositiveSpectrum);
            }
            Ok(DMatrix::identity(n, n) * lmax)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn diag2(a: f64, b: f64) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![a, b]))
    }

    #[test]
    fn shift_moves_spectrum() {
        let out = regularize(&diag2(-1.0, 2.0), Regularizer::Shift(1.0)).unwrap();
        assert_abs_diff_eq!(out[(0, 0)], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(out[(1, 1)], 3.0, epsilon = 1e-14);
    }

    #[test]
    fn clamp_raises_small_eigenvalues() {
        let out = regularize(&diag2(-1.0, 2.0), Regularizer::Clamp(0.1)).unwrap();
        assert_abs_diff_eq!(out[(0, 0)], 0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(out[(1, 1)], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out[(0, 1)], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn clamp_preserves_eigenvectors() {
        // eigenvalues 3 and -1, eigenvectors (1,1)/sqrt2, (1,-1)/sqrt2
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        let out = regularize(&a, Regularizer::Clamp(0.5)).unwrap();
        // expect 3 * vv^T + 0.5 * ww^T
        let expect = DMatrix::from_row_slice(2, 2, &[1.75, 1.25, 1.25, 1.75]);
        assert_abs_diff_eq!((out - expect).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn max_eig_cases() {
        let out = regularize(&diag2(-1.0, 2.0), Regularizer::MaxEig).unwrap();
        assert_abs_diff_eq!(out[(0, 0)], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out[(1, 1)], 2.0, epsilon = 1e-12);
        assert!(matches!(
            regularize(&diag2(-3.0, -2.0), Regularizer::MaxEig),
            Err(Error::NonPositiveSpectrum)
        ));
    }

    #[test]
    fn asymmetric_rejected() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.1, 1.0]);
        assert!(matches!(
            regularize(&a, Regularizer::Clamp(0.1)),
            Err(Error::NotSymmetric)
        ));
    }
}
