//! Seeded generators for random operators.
//!
//! The state is a ChaCha8 stream seeded from a single `u64`; standard normals
//! come from the Box-Muller pair transform over its uniforms, so a fixed seed
//! gives the same matrices on every run and platform.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::{CVector, ComplexMatrix};

/// Lower and upper magnitude for random spectra / singular values.
pub const SPECTRUM_LO: f64 = 0.5;
pub const SPECTRUM_HI: f64 = 2.0;

#[derive(Debug, Clone)]
pub struct SeededRng {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform on [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn sign(&mut self) -> f64 {
        if self.uniform() < 0.5 {
            -1.0
        } else {
            1.0
        }
    }

    /// Standard normal via Box-Muller; the second value of each pair is cached.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // 1 - u keeps the logarithm finite.
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        self.spare = Some(r * (TAU * u2).sin());
        r * (TAU * u2).cos()
    }

    /// Complex normal with unit variance split evenly over both parts.
    pub fn complex_normal(&mut self) -> Complex64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Complex64::new(s * self.normal(), s * self.normal())
    }

    /// Matrix of independent complex normals.
    pub fn ginibre(&mut self, d: usize) -> DMatrix<Complex64> {
        DMatrix::from_fn(d, d, |_, _| self.complex_normal())
    }

    /// Haar-distributed unitary from the QR factorization of a Ginibre matrix
    /// with the phases of `R`'s diagonal folded back into `Q`.
    pub fn haar_unitary(&mut self, d: usize) -> ComplexMatrix {
        let qr = self.ginibre(d).qr();
        let (q, r) = (qr.q(), qr.r());
        let mut u = q;
        for j in 0..d {
            let rjj = r[(j, j)];
            let phase = if rjj.norm() > 0.0 {
                rjj / rjj.norm()
            } else {
                Complex64::new(1.0, 0.0)
            };
            for i in 0..d {
                u[(i, j)] *= phase;
            }
        }
        ComplexMatrix::from_dmatrix(u).expect("unitary is finite")
    }

    /// `U diag(values) U†` with Haar `U`.
    pub fn hermitian_with_spectrum(&mut self, values: &[f64]) -> ComplexMatrix {
        let u = self.haar_unitary(values.len());
        let d = ComplexMatrix::from_real_diagonal(values);
        (&(&u * &d) * &u.adjoint()).hermitian_part()
    }

    /// Hermitian matrix whose eigenvalues are drawn from `±[0.5, 2]`.
    /// Invertible, possibly indefinite.
    pub fn hermitian_invertible(&mut self, d: usize) -> ComplexMatrix {
        let values: Vec<f64> = (0..d)
            .map(|_| self.sign() * self.uniform_in(SPECTRUM_LO, SPECTRUM_HI))
            .collect();
        self.hermitian_with_spectrum(&values)
    }

    /// Hermitian matrix `(G + G†)/2` from a Ginibre draw.
    pub fn hermitian(&mut self, d: usize) -> ComplexMatrix {
        let g = ComplexMatrix::from_dmatrix(self.ginibre(d)).expect("finite");
        g.hermitian_part()
    }

    /// Non-Hermitian `U diag(s) V†` with singular values in `[0.5, 2]`.
    pub fn invertible(&mut self, d: usize) -> ComplexMatrix {
        let u = self.haar_unitary(d);
        let v = self.haar_unitary(d);
        let s: Vec<f64> = (0..d).map(|_| self.uniform_in(SPECTRUM_LO, SPECTRUM_HI)).collect();
        &(&u * &ComplexMatrix::from_real_diagonal(&s)) * &v.adjoint()
    }

    /// Arbitrary complex matrix with O(1) entries.
    pub fn matrix(&mut self, d: usize) -> ComplexMatrix {
        ComplexMatrix::from_dmatrix(self.ginibre(d)).expect("finite")
    }

    /// Complex normal vector normalized to unit length.
    pub fn state(&mut self, d: usize) -> CVector {
        let v = CVector::from_fn(d, |_, _| self.complex_normal());
        let n = v.norm();
        v.unscale(n)
    }

    /// Positive weights in `[0.5, 2]`.
    pub fn weights(&mut self, d: usize) -> Vec<f64> {
        (0..d).map(|_| self.uniform_in(SPECTRUM_LO, SPECTRUM_HI)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::hermitian_defect;

    #[test]
    fn same_seed_same_stream() {
        let mut a = SeededRng::new(7);
        let mut b = SeededRng::new(7);
        for _ in 0..10 {
            assert_eq!(a.normal(), b.normal());
        }
    }

    #[test]
    fn normals_have_sane_moments() {
        let mut r = SeededRng::new(1);
        let xs: Vec<f64> = (0..20000).map(|_| r.normal()).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64;
        assert!(mean.abs() < 0.03, "mean {mean}");
        assert!((var - 1.0).abs() < 0.05, "var {var}");
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut r = SeededRng::new(3);
        for d in 1..7 {
            let u = r.haar_unitary(d);
            assert!((&(&u.adjoint() * &u) - &ComplexMatrix::identity(d)).max_abs() < 1e-13);
        }
    }

    #[test]
    fn hermitian_invertible_spectrum_in_band() {
        let mut r = SeededRng::new(11);
        let m = r.hermitian_invertible(5);
        assert_eq!(hermitian_defect(&m), 0.0);
        let vals = m.into_dmatrix().symmetric_eigenvalues();
        assert!(vals.iter().all(|v| v.abs() >= SPECTRUM_LO - 1e-12 && v.abs() <= SPECTRUM_HI + 1e-12));
    }
}
