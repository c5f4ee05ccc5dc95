//! Dense square complex matrices and the shared JSON interchange format.
//!
//! Every operator in the toolkit (Hamiltonians, metrics, factors, observables,
//! parities) is a [`ComplexMatrix`]. On disk a matrix is the object
//! `{"dim": n, "re": [...], "im": [...]}` with both arrays holding `n²`
//! entries in row-major order. State vectors use the same layout with `n`
//! entries.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Column vector of complex amplitudes.
pub type CVector = DVector<Complex64>;

/// Dense square complex matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    /// Wraps an nalgebra matrix. Fails if it is not square, empty, or holds non-finite values.
    pub fn from_dmatrix(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::Format("matrix dimension must be positive".into()));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Format("matrix has non-finite entries".into()));
        }
        Ok(Self(m))
    }

    /// Builds from row-major complex entries.
    pub fn from_rows(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Self::from_dmatrix(DMatrix::from_row_slice(dim, dim, entries))
    }

    /// Builds from row-major real and imaginary parts.
    pub fn from_parts(dim: usize, re: &[f64], im: &[f64]) -> Result<Self> {
        if re.len() != dim * dim || im.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: re.len().max(im.len()),
            });
        }
        let entries: Vec<Complex64> = re
            .iter()
            .zip(im)
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect();
        Self::from_rows(dim, &entries)
    }

    /// Builds a real matrix from nested rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            entries.extend(row.iter().map(|&x| Complex64::new(x, 0.0)));
        }
        Self::from_rows(dim, &entries)
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    /// Outer product `|a⟩⟨b|`.
    pub fn outer(a: &CVector, b: &CVector) -> Self {
        Self(a * b.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.0[(row, col)] = value;
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.0
    }

    /// Row-major entries.
    pub fn to_rows(&self) -> Vec<Complex64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// Entrywise complex conjugation.
    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self(&self.0 * factor)
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn mul_vec(&self, v: &CVector) -> Result<CVector> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(&self.0 * v)
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> CVector {
        self.0.column(j).into_owned()
    }

    /// Hermitian part `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0))
    }

    pub(crate) fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    /// Product of a sequence of matrices, left to right. `None` for an empty slice.
    pub fn product<'a, I>(mats: I) -> Option<Self>
    where
        I: IntoIterator<Item = &'a ComplexMatrix>,
    {
        mats.into_iter().fold(None, |acc, m| match acc {
            None => Some(m.clone()),
            Some(a) => Some(&a * m),
        })
    }
}

/// Max-entry modulus of `A − A†`.
pub fn hermitian_defect(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let m = a.as_dmatrix();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `‖x − y‖ / scale`, returning the raw norm when the scale vanishes.
pub(crate) fn relative(diff: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl<'a> $trait<&'a ComplexMatrix> for &'a ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
                assert_eq!(self.dim(), rhs.dim(), "matrix dimension mismatch");
                ComplexMatrix(&self.0 $op &rhs.0)
            }
        }
        impl $trait<ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

/// Wire form of a matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = Error;
    fn try_from(j: MatrixJson) -> Result<Self> {
        if j.dim == 0 {
            return Err(Error::Format("matrix dimension must be positive".into()));
        }
        if j.re.len() != j.dim * j.dim || j.im.len() != j.dim * j.dim {
            return Err(Error::Format(format!(
                "matrix of dim {} needs {} entries in re and im, got {} and {}",
                j.dim,
                j.dim * j.dim,
                j.re.len(),
                j.im.len()
            )));
        }
        ComplexMatrix::from_parts(j.dim, &j.re, &j.im)
    }
}

impl From<ComplexMatrix> for MatrixJson {
    fn from(m: ComplexMatrix) -> Self {
        let rows = m.to_rows();
        MatrixJson {
            dim: m.dim(),
            re: rows.iter().map(|z| z.re).collect(),
            im: rows.iter().map(|z| z.im).collect(),
        }
    }
}

/// Wire form of a state vector: `{"dim": n, "re": [...], "im": [...]}` with `n` entries.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VectorJson {
    pub dim: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl VectorJson {
    pub fn from_vector(v: &CVector) -> Self {
        VectorJson {
            dim: v.len(),
            re: v.iter().map(|z| z.re).collect(),
            im: v.iter().map(|z| z.im).collect(),
        }
    }

    pub fn into_vector(self) -> Result<CVector> {
        if self.dim == 0 || self.re.len() != self.dim || self.im.len() != self.dim {
            return Err(Error::Format(format!(
                "vector of dim {} needs {} entries in re and im, got {} and {}",
                self.dim,
                self.dim,
                self.re.len(),
                self.im.len()
            )));
        }
        if self.re.iter().chain(&self.im).any(|x| !x.is_finite()) {
            return Err(Error::Format("vector has non-finite entries".into()));
        }
        Ok(CVector::from_iterator(
            self.dim,
            self.re.iter().zip(&self.im).map(|(&r, &i)| Complex64::new(r, i)),
        ))
    }
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Real-valued state vector.
pub fn real_vector(values: &[f64]) -> CVector {
    CVector::from_iterator(values.len(), values.iter().map(|&x| Complex64::new(x, 0.0)))
}
