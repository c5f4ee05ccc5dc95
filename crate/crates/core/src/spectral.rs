//! Eigendecomposition of general complex matrices with biorthonormal
//! left/right eigenvector sets.
//!
//! The matrix is reduced to complex Schur form `A = Q T Q†`. Right and left
//! eigenvectors of the triangular factor are obtained by back- and
//! forward-substitution, which keeps each left vector paired with its right
//! partner by construction. The pairs are then gauge-fixed:
//!
//! * right vectors have unit 2-norm and their largest-modulus entry is real
//!   positive,
//! * left vectors are scaled so that `⟨L_n|R_n⟩ = 1`.
//!
//! A raw overlap `|⟨L_n|R_n⟩|` (both vectors unit norm) below
//! [`DEFECT_THRESHOLD`] means the eigenvalue is (numerically) part of a
//! Jordan block and the decomposition is rejected.

use std::cmp::Ordering;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{CVector, ComplexMatrix};

pub const DEFECT_THRESHOLD: f64 = 1e-12;

/// Eigenvalues with biorthonormal right (`|R_n⟩`) and left (`|L_n⟩`) eigenvectors stored as columns.
#[derive(Debug, Clone)]
pub struct SpectralData {
    pub eigenvalues: Vec<Complex64>,
    pub right_vectors: ComplexMatrix,
    pub left_vectors: ComplexMatrix,
    /// Largest eigenvalue condition number `‖L_n‖·‖R_n‖`.
    pub condition_estimate: f64,
}

impl SpectralData {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn right(&self, n: usize) -> CVector {
        self.right_vectors.column(n)
    }

    pub fn left(&self, n: usize) -> CVector {
        self.left_vectors.column(n)
    }

    /// `Σ_n f(λ_n) |R_n⟩⟨L_n|`.
    pub fn apply_function<F>(&self, f: F) -> ComplexMatrix
    where
        F: Fn(Complex64) -> Complex64,
    {
        let r = self.right_vectors.as_dmatrix();
        let l = self.left_vectors.as_dmatrix();
        let mut scaled = r.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let w = f(lambda);
            for i in 0..scaled.nrows() {
                scaled[(i, j)] *= w;
            }
        }
        ComplexMatrix::from_dmatrix(scaled * l.adjoint())
            .expect("spectral reconstruction stays square")
    }

    /// `Σ_n λ_n |R_n⟩⟨L_n|`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply_function(|z| z)
    }

    /// Max-entry deviation of `L† R` from the identity.
    pub fn biorthogonality_defect(&self) -> f64 {
        let g = self.left_vectors.adjoint() * self.right_vectors.clone();
        (&g - &ComplexMatrix::identity(self.dim())).max_abs()
    }

    pub fn max_imag(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// Smallest pairwise eigenvalue distance (infinite for dim 1).
    pub fn min_gap(&self) -> f64 {
        min_gap(&self.eigenvalues)
    }
}

pub(crate) fn min_gap(values: &[Complex64]) -> f64 {
    let mut gap = f64::INFINITY;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            gap = gap.min((values[i] - values[j]).norm());
        }
    }
    gap
}

/// Ordering by real part, then imaginary part. Real parts closer than
/// `1e-12·scale` are treated as equal so rounding noise does not decide the order.
fn spectral_order(a: Complex64, b: Complex64, scale: f64) -> Ordering {
    let tie = 1e-12 * scale.max(1.0);
    if (a.re - b.re).abs() > tie {
        a.re.partial_cmp(&b.re).unwrap_or(Ordering::Equal)
    } else {
        a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal)
    }
}

fn schur(a: &ComplexMatrix) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    a.as_dmatrix().clone().schur().unpack()
}

/// Eigenvalues only, sorted by (Re, Im). Never fails; defective matrices are fine here.
pub fn eigenvalues(a: &ComplexMatrix) -> Vec<Complex64> {
    let (_, t) = schur(a);
    let scale = a.norm();
    let mut vals: Vec<Complex64> = (0..t.nrows()).map(|i| t[(i, i)]).collect();
    vals.sort_by(|&x, &y| spectral_order(x, y, scale));
    vals
}

/// Full eigendecomposition with biorthonormal eigenvector sets.
pub fn eig(a: &ComplexMatrix) -> Result<SpectralData> {
    let n = a.dim();
    let (q, t) = schur(a);
    let scale = a.norm();
    let small = f64::EPSILON * scale.max(f64::MIN_POSITIVE);

    // Guards a vanishing diagonal difference the way LAPACK's trevc does.
    let safe_div = |num: Complex64, den: Complex64| -> Complex64 {
        if den.norm() < small {
            num / Complex64::new(small, 0.0)
        } else {
            num / den
        }
    };

    let mut pairs: Vec<(Complex64, CVector, CVector, f64)> = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = t[(k, k)];

        // T x = λ x, x_k = 1, x_j = 0 for j > k.
        let mut x = CVector::zeros(n);
        x[k] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in i + 1..=k {
                acc += t[(i, j)] * x[j];
            }
            x[i] = safe_div(-acc, t[(i, i)] - lambda);
        }

        // u T = λ u for the row vector u, u_k = 1, u_j = 0 for j < k.
        let mut u = CVector::zeros(n);
        u[k] = Complex64::new(1.0, 0.0);
        for j in k + 1..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in k..j {
                acc += u[i] * t[(i, j)];
            }
            u[j] = safe_div(acc, lambda - t[(j, j)]);
        }

        let mut right = &q * x;
        let rn = right.norm();
        right.unscale_mut(rn);
        let mut left = &q * u.map(|z| z.conj());
        let ln = left.norm();
        left.unscale_mut(ln);

        let overlap = left.dotc(&right);
        if overlap.norm() < DEFECT_THRESHOLD {
            return Err(Error::DefectiveMatrix {
                index: k,
                overlap: overlap.norm(),
            });
        }

        // Largest-modulus entry of the right vector becomes real positive.
        let mut pivot = 0;
        for i in 1..n {
            if right[i].norm() > right[pivot].norm() * (1.0 + 1e-12) {
                pivot = i;
            }
        }
        let phase = right[pivot] / right[pivot].norm();
        right = right.map(|z| z / phase);
        right[pivot] = Complex64::new(right[pivot].re, 0.0);

        let s = left.dotc(&right);
        let left = left.map(|z| z / s.conj());
        let cond = left.norm() * right.norm();
        pairs.push((lambda, right, left, cond));
    }

    pairs.sort_by(|a, b| spectral_order(a.0, b.0, scale));

    let mut rmat = DMatrix::zeros(n, n);
    let mut lmat = DMatrix::zeros(n, n);
    let mut eigenvalues = Vec::with_capacity(n);
    let mut condition_estimate: f64 = 0.0;
    for (j, (lambda, r, l, cond)) in pairs.into_iter().enumerate() {
        rmat.set_column(j, &r);
        lmat.set_column(j, &l);
        eigenvalues.push(lambda);
        condition_estimate = condition_estimate.max(cond);
    }

    Ok(SpectralData {
        eigenvalues,
        right_vectors: ComplexMatrix::from_dmatrix(rmat)?,
        left_vectors: ComplexMatrix::from_dmatrix(lmat)?,
        condition_estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c;

    #[test]
    fn diagonal_matrix() {
        let a = ComplexMatrix::from_real_diagonal(&[3.0, 1.0, 2.0]);
        let s = eig(&a).unwrap();
        let vals: Vec<f64> = s.eigenvalues.iter().map(|z| z.re).collect();
        assert_eq!(vals, vec![1.0, 2.0, 3.0]);
        // columns follow the sorted eigenvalues: e2, e3, e1
        let expect = ComplexMatrix::from_real_rows(&[&[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]])
            .unwrap();
        assert!((&s.right_vectors - &expect).max_abs() < 1e-15);
        assert!((&s.left_vectors - &expect).max_abs() < 1e-15);
    }

    #[test]
    fn diagonal_in_order_gives_identity_vectors() {
        let s = eig(&ComplexMatrix::from_real_diagonal(&[1.0, 2.0, 3.0])).unwrap();
        assert!((&s.right_vectors - &ComplexMatrix::identity(3)).max_abs() < 1e-15);
    }

    #[test]
    fn toy_model_eigenvalues() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[4.0, 0.0]]).unwrap();
        let s = eig(&a).unwrap();
        assert!((s.eigenvalues[0] - c(-2.0, 0.0)).norm() < 1e-14);
        assert!((s.eigenvalues[1] - c(2.0, 0.0)).norm() < 1e-14);
        assert!(s.biorthogonality_defect() < 1e-14);
        assert!((&s.reconstruct() - &a).norm() < 1e-13);
        // gauge: unit right vectors, largest entry real positive
        for n in 0..2 {
            let r = s.right(n);
            assert!((r.norm() - 1.0).abs() < 1e-15);
            let big = r.iter().max_by(|x, y| x.norm().partial_cmp(&y.norm()).unwrap()).unwrap();
            assert!(big.re > 0.0 && big.im == 0.0);
        }
    }

    #[test]
    fn jordan_block_is_defective() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        assert!(matches!(eig(&a), Err(Error::DefectiveMatrix { .. })));
        // eigenvalues alone are still available
        let vals = eigenvalues(&a);
        assert!(vals.iter().all(|z| (z - c(1.0, 0.0)).norm() < 1e-12));
    }

    #[test]
    fn complex_spectrum_sorted_by_imaginary_part() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]).unwrap();
        let s = eig(&a).unwrap();
        assert!((s.eigenvalues[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((s.eigenvalues[1] - c(0.0, 1.0)).norm() < 1e-14);
        assert!((&s.reconstruct() - &a).norm() < 1e-13);
    }

    #[test]
    fn identity_is_not_defective() {
        let s = eig(&ComplexMatrix::identity(4)).unwrap();
        assert!(s.biorthogonality_defect() < 1e-15);
    }
}
