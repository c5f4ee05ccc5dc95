//! Inversion, positive-definiteness and the matrix exponential.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{hermitian_defect, ComplexMatrix};
use crate::spectral::eig;

/// Relative pivot threshold for [`inverse`].
pub const PIVOT_THRESHOLD: f64 = 1e-14;

/// Gauss-Jordan inverse with partial pivoting.
///
/// Fails with [`Error::SingularMatrix`] when a pivot falls below
/// `1e-14·‖A‖` (Frobenius).
pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.dim();
    let threshold = PIVOT_THRESHOLD * a.norm();
    let mut work = a.as_dmatrix().clone();
    let mut inv = DMatrix::<Complex64>::identity(n, n);

    for col in 0..n {
        let (pivot_row, pivot_mag) = (col..n)
            .map(|r| (r, work[(r, col)].norm()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_mag <= threshold || pivot_mag == 0.0 {
            return Err(Error::SingularMatrix {
                pivot: pivot_mag,
                threshold,
            });
        }
        if pivot_row != col {
            work.swap_rows(pivot_row, col);
            inv.swap_rows(pivot_row, col);
        }
        let p = work[(col, col)];
        for j in 0..n {
            work[(col, j)] /= p;
            inv[(col, j)] /= p;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = work[(r, col)];
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                let wv = work[(col, j)];
                let iv = inv[(col, j)];
                work[(r, j)] -= f * wv;
                inv[(r, j)] -= f * iv;
            }
        }
    }
    ComplexMatrix::from_dmatrix(inv)
}

/// Smallest eigenvalue of the Hermitian part `(A + A†)/2`.
pub fn min_hermitian_eigenvalue(a: &ComplexMatrix) -> f64 {
    let h = a.hermitian_part().into_dmatrix();
    h.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Tests positive definiteness of a Hermitian matrix.
///
/// Returns whether the smallest eigenvalue of `(A + A†)/2` exceeds `tol`,
/// together with that eigenvalue. Inputs whose Hermitian defect exceeds `tol`
/// are rejected.
pub fn is_positive_definite(a: &ComplexMatrix, tol: f64) -> Result<(bool, f64)> {
    let defect = hermitian_defect(a);
    if defect > tol {
        return Err(Error::NotHermitian { defect, tol });
    }
    let lo = min_hermitian_eigenvalue(a);
    Ok((lo > tol, lo))
}

/// Eigendecompositions worse conditioned than this fall back to the series.
const EIG_EXP_MAX_CONDITION: f64 = 1e6;

/// Matrix exponential.
///
/// Uses the eigendecomposition `Σ e^{λ_n} |R_n⟩⟨L_n|` when it exists and is
/// reasonably conditioned, otherwise [`mat_exp_series`].
pub fn mat_exp(a: &ComplexMatrix) -> ComplexMatrix {
    match eig(a) {
        Ok(s) if s.condition_estimate <= EIG_EXP_MAX_CONDITION => s.apply_function(|z| z.exp()),
        _ => mat_exp_series(a),
    }
}

/// Scaling and squaring with a degree-24 Taylor polynomial.
///
/// The argument is scaled to Frobenius norm at most 1/2, where the truncation
/// error `0.5^25/25!` is far below double precision.
pub fn mat_exp_series(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.dim();
    let norm = a.norm();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.as_dmatrix() * Complex64::new(0.5f64.powi(squarings), 0.0);

    let mut result = DMatrix::<Complex64>::identity(n, n);
    let mut term = DMatrix::<Complex64>::identity(n, n);
    for k in 1..=24 {
        term = &term * &scaled * Complex64::new(1.0 / k as f64, 0.0);
        result += &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    ComplexMatrix::from_dmatrix(result).expect("exponential of a finite matrix is finite")
}
