//! Hermitian solutions of the intertwining equation `H†Θ = ΘH`.
//!
//! Two independent routes produce the solution space:
//!
//! * the *oracle* route vectorizes the real-linear map `Θ ↦ H†Θ − ΘH` on the
//!   `n²`-dimensional real space of Hermitian matrices and reads the null space
//!   off an SVD;
//! * the *spectral* route uses the left eigenvectors of `H`: every
//!   `|L_n⟩⟨L_n|` solves the equation, and for a nondegenerate real spectrum
//!   they span the whole space.
//!
//! Positive weights `κ_n` then give the positive-definite metrics
//! `Θ = Σ κ_n |L_n⟩⟨L_n|`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{relative, CVector, ComplexMatrix};
use crate::spectral::{eig, eigenvalues, min_gap, SpectralData};

/// Default relative singular-value cut for the null space.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Spans from the two routes must agree to this projection residual.
pub const PATH_AGREEMENT_TOL: f64 = 1e-6;

/// Hermitian solution space of `H†Θ = ΘH`.
#[derive(Debug, Clone)]
pub struct MetricFamily {
    pub dim: usize,
    /// Spectral basis `|L_n⟩⟨L_n|` when available, otherwise the oracle basis.
    pub basis: Vec<ComplexMatrix>,
    /// Frobenius-orthonormal null-space basis from the SVD route.
    pub oracle_basis: Vec<ComplexMatrix>,
    pub spectral: Option<SpectralData>,
    pub kappa_default: Vec<f64>,
    /// Set when the spectrum is degenerate or defective and only the oracle basis exists.
    pub degenerate: bool,
    /// Mutual projection residual of the two bases, when both exist.
    pub path_agreement: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct MetricFamilyJson {
    dim: usize,
    basis: Vec<ComplexMatrix>,
    kappa_default: Vec<f64>,
}

impl Serialize for MetricFamily {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MetricFamilyJson {
            dim: self.dim,
            basis: self.basis.clone(),
            kappa_default: self.kappa_default.clone(),
        }
        .serialize(s)
    }
}

/// Real coordinates of a Hermitian matrix in a Frobenius-isometric basis:
/// diagonal entries, then `√2·Re`, `√2·Im` of each upper-triangular entry.
pub fn hermitian_coords(m: &ComplexMatrix) -> Vec<f64> {
    let n = m.dim();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        out.push(m.get(i, i).re);
    }
    let s = std::f64::consts::SQRT_2;
    for i in 0..n {
        for j in i + 1..n {
            let z = m.get(i, j);
            out.push(s * z.re);
            out.push(s * z.im);
        }
    }
    out
}

/// Inverse of [`hermitian_coords`].
pub fn hermitian_from_coords(n: usize, x: &[f64]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n);
    for (i, &d) in x.iter().take(n).enumerate() {
        m.set(i, i, Complex64::new(d, 0.0));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut k = n;
    for i in 0..n {
        for j in i + 1..n {
            let z = Complex64::new(s * x[k], s * x[k + 1]);
            m.set(i, j, z);
            m.set(j, i, z.conj());
            k += 2;
        }
    }
    m
}

/// Real matrix of `Θ ↦ H†Θ − ΘH` from Hermitian coordinates to the
/// stacked real and imaginary parts of the (row-major) result.
pub fn intertwining_operator(h: &ComplexMatrix) -> DMatrix<f64> {
    let n = h.dim();
    let hd = h.adjoint();
    let params = n * n;
    let mut map = DMatrix::<f64>::zeros(2 * n * n, params);
    let mut unit = vec![0.0; params];
    for p in 0..params {
        unit[p] = 1.0;
        let b = hermitian_from_coords(n, &unit);
        unit[p] = 0.0;
        let img = &(&hd * &b) - &(&b * h);
        for (idx, z) in img.to_rows().into_iter().enumerate() {
            map[(2 * idx, p)] = z.re;
            map[(2 * idx + 1, p)] = z.im;
        }
    }
    map
}

/// Null-space basis of the intertwining map; singular values below
/// `tol·σ_max` count as zero. Returned matrices are Frobenius-orthonormal.
pub fn oracle_null_space(h: &ComplexMatrix, tol: f64) -> Vec<ComplexMatrix> {
    let n = h.dim();
    let map = intertwining_operator(h);
    let svd = map.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cut = tol * sigma_max;
    let mut basis = Vec::new();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s <= cut {
            let row: Vec<f64> = v_t.row(k).iter().copied().collect();
            basis.push(hermitian_from_coords(n, &row));
        }
    }
    basis
}

fn orthonormal_coords(basis: &[ComplexMatrix]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for b in basis {
        let mut v = hermitian_coords(b);
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for q in &out {
                let d: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(q).for_each(|(a, b)| *a -= d * b);
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            out.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    out
}

fn projection_residual(from: &[ComplexMatrix], onto: &[Vec<f64>]) -> f64 {
    from.iter()
        .map(|b| {
            let mut v = hermitian_coords(b);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            for q in onto {
                let d: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(q).for_each(|(a, b)| *a -= d * b);
            }
            relative(v.iter().map(|x| x * x).sum::<f64>().sqrt(), norm)
        })
        .fold(0.0, f64::max)
}

/// Largest relative residual of projecting each element of either basis onto
/// the span of the other (Hermitian inputs only). Zero iff the spans coincide.
pub fn span_distance(a: &[ComplexMatrix], b: &[ComplexMatrix]) -> f64 {
    let qa = orthonormal_coords(a);
    let qb = orthonormal_coords(b);
    projection_residual(a, &qb).max(projection_residual(b, &qa))
}

fn spectral_basis(s: &SpectralData) -> Vec<ComplexMatrix> {
    (0..s.dim())
        .map(|n| {
            let l = s.left(n);
            ComplexMatrix::outer(&l, &l).hermitian_part()
        })
        .collect()
}

/// Solves for the full Hermitian solution family of `H†Θ = ΘH`.
///
/// Fails with [`Error::ComplexSpectrum`] when `max |Im λ| > tol·‖H‖`. A
/// degenerate (gap below `tol·‖H‖`) or defective spectrum is not an error:
/// the family then carries only the oracle basis and `degenerate` is set.
pub fn solve_metric_space(h: &ComplexMatrix, tol: f64) -> Result<MetricFamily> {
    let n = h.dim();
    let scale = h.norm();
    let vals = eigenvalues(h);
    let max_imag = vals.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if max_imag > tol * scale {
        return Err(Error::ComplexSpectrum { max_imag });
    }

    let oracle_basis = oracle_null_space(h, tol);
    let spectral = if min_gap(&vals) < tol * scale {
        None
    } else {
        eig(h).ok()
    };

    match spectral {
        Some(s) => {
            let basis = spectral_basis(&s);
            let distance = span_distance(&basis, &oracle_basis);
            if oracle_basis.len() != basis.len() || distance > PATH_AGREEMENT_TOL {
                return Err(Error::PathMismatch {
                    oracle_rank: oracle_basis.len(),
                    spectral_rank: basis.len(),
                    distance,
                });
            }
            Ok(MetricFamily {
                dim: n,
                basis,
                oracle_basis,
                spectral: Some(s),
                kappa_default: vec![1.0; n],
                degenerate: false,
                path_agreement: Some(distance),
            })
        }
        None => Ok(MetricFamily {
            dim: n,
            kappa_default: vec![1.0; oracle_basis.len()],
            basis: oracle_basis.clone(),
            oracle_basis,
            spectral: None,
            degenerate: true,
            path_agreement: None,
        }),
    }
}

/// `Σ_n κ_n |L_n⟩⟨L_n|` for a spectral decomposition.
pub fn spectral_metric(s: &SpectralData, kappa: &[f64]) -> Result<ComplexMatrix> {
    if kappa.len() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: kappa.len(),
        });
    }
    if let Some((index, &value)) = kappa.iter().enumerate().find(|(_, &k)| k.is_nan() || k <= 0.0) {
        return Err(Error::NonPositiveWeight { index, value });
    }
    let l = s.left_vectors.as_dmatrix();
    let mut weighted = l.clone();
    for (j, &k) in kappa.iter().enumerate() {
        for i in 0..weighted.nrows() {
            weighted[(i, j)] *= k;
        }
    }
    Ok(ComplexMatrix::from_dmatrix(weighted * l.adjoint())?.hermitian_part())
}

/// Metric `Θ = Σ κ_n |L_n⟩⟨L_n|` from positive weights.
pub fn metric_from_weights(family: &MetricFamily, kappa: &[f64]) -> Result<ComplexMatrix> {
    let s = family.spectral.as_ref().ok_or(Error::SpectralPathUnavailable)?;
    spectral_metric(s, kappa)
}

/// Relative residual `‖L†Θ − ΘL‖ / (‖L‖·‖Θ‖)`.
pub fn check_quasi_hermitian(l: &ComplexMatrix, theta: &ComplexMatrix) -> Result<f64> {
    l.check_same_dim(theta)?;
    let diff = &(&l.adjoint() * theta) - &(theta * l);
    Ok(relative(diff.norm(), l.norm() * theta.norm()))
}

/// `⟨ψ_a|Θ|ψ_b⟩`, conjugate-linear in the first argument.
pub fn physical_inner_product(psi_a: &CVector, psi_b: &CVector, theta: &ComplexMatrix) -> Result<Complex64> {
    if psi_a.len() != theta.dim() {
        return Err(Error::DimensionMismatch {
            expected: theta.dim(),
            found: psi_a.len(),
        });
    }
    let tb = theta.mul_vec(psi_b)?;
    Ok(psi_a.dotc(&tb))
}
