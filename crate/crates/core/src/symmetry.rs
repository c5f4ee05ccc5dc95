//! Antilinear symmetry checks.
//!
//! Time reversal `T` acts as entrywise complex conjugation in the
//! computational basis, so an antilinear commutation `H (S T) = (S T) H`
//! becomes the linear identity `H S = S conj(H)`.
//!
//! The charge-type relation `H† P C = P C H` is the intertwining equation for
//! `Θ = P C`. The pseudo-Hermiticity `H† P = P H` is reported for comparison
//! only: a two-factor metric `Θ = P C` does not need it.

use crate::error::Result;
use crate::matrix::{relative, ComplexMatrix};

/// `‖H P − P conj(H)‖ / (‖H‖·‖P‖)`, zero iff `[H, PT] = 0`.
pub fn check_pt_symmetry(h: &ComplexMatrix, p: &ComplexMatrix) -> Result<f64> {
    h.check_same_dim(p)?;
    let diff = &(h * p) - &(p * &h.conj());
    Ok(relative(diff.norm(), h.norm() * p.norm()))
}

/// `‖H†(PC) − (PC)H‖ / (‖H‖·‖PC‖)`.
pub fn check_pct_symmetry(h: &ComplexMatrix, p: &ComplexMatrix, c: &ComplexMatrix) -> Result<f64> {
    h.check_same_dim(p)?;
    h.check_same_dim(c)?;
    let pc = p * c;
    let diff = &(&h.adjoint() * &pc) - &(&pc * h);
    Ok(relative(diff.norm(), h.norm() * pc.norm()))
}

/// Literal antilinear form `H (PCT) = (PCT) H`, i.e. `‖H·PC − PC·conj(H)‖ / (‖H‖·‖PC‖)`.
///
/// Coincides with [`check_pct_symmetry`] when `H` is complex symmetric and
/// `PC` is real, but not in general.
pub fn check_pct_antilinear(h: &ComplexMatrix, p: &ComplexMatrix, c: &ComplexMatrix) -> Result<f64> {
    h.check_same_dim(p)?;
    h.check_same_dim(c)?;
    let pc = p * c;
    let diff = &(h * &pc) - &(&pc * &h.conj());
    Ok(relative(diff.norm(), h.norm() * pc.norm()))
}

/// `‖H†P − PH‖ / (‖H‖·‖P‖)`.
pub fn check_pseudo_hermiticity(h: &ComplexMatrix, p: &ComplexMatrix) -> Result<f64> {
    h.check_same_dim(p)?;
    let diff = &(&h.adjoint() * p) - &(p * h);
    Ok(relative(diff.norm(), h.norm() * p.norm()))
}

/// Max-entry deviation of `P²` from the identity.
pub fn involution_defect(p: &ComplexMatrix) -> f64 {
    (&(p * p) - &ComplexMatrix::identity(p.dim())).max_abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c;

    fn swap() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    fn pt_dimer(gamma: f64) -> ComplexMatrix {
        ComplexMatrix::from_rows(2, &[c(0., gamma), c(1., 0.), c(1., 0.), c(0., -gamma)]).unwrap()
    }

    fn toy() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[4.0, 0.0]]).unwrap()
    }

    #[test]
    fn pt_symmetry_examples() {
        assert_eq!(check_pt_symmetry(&toy(), &ComplexMatrix::identity(2)).unwrap(), 0.0);
        assert_eq!(check_pt_symmetry(&pt_dimer(0.5), &swap()).unwrap(), 0.0);
        let broken = ComplexMatrix::from_diagonal(&[c(0., 1.), c(0., -2.)]);
        assert!(check_pt_symmetry(&broken, &ComplexMatrix::identity(2)).unwrap() > 0.5);
    }

    #[test]
    fn pct_symmetry_examples() {
        let charge = toy();
        assert_eq!(check_pct_symmetry(&toy(), &swap(), &charge).unwrap(), 0.0);
        let herm = ComplexMatrix::from_rows(2, &[c(1., 0.), c(0., 2.), c(0., -2.), c(3., 0.)]).unwrap();
        let id = ComplexMatrix::identity(2);
        assert_eq!(check_pct_symmetry(&herm, &id, &id).unwrap(), 0.0);
    }

    #[test]
    fn toy_model_is_parity_pseudo_hermitian() {
        // P H = diag(4, 1) is Hermitian, so H† P = (P H)† = P H.
        assert_eq!(check_pseudo_hermiticity(&toy(), &swap()).unwrap(), 0.0);
        assert_eq!(check_pct_symmetry(&toy(), &swap(), &ComplexMatrix::identity(2)).unwrap(), 0.0);
    }

    #[test]
    fn pseudo_hermiticity_examples() {
        let sym = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, -1.0]]).unwrap();
        assert_eq!(check_pseudo_hermiticity(&sym, &ComplexMatrix::identity(2)).unwrap(), 0.0);
        assert_eq!(check_pseudo_hermiticity(&pt_dimer(0.5), &swap()).unwrap(), 0.0);
        // a non-Hermitian matrix with a parity that does not intertwine it
        let h = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[4.0, 0.0]]).unwrap();
        let r = check_pseudo_hermiticity(&h, &swap()).unwrap();
        assert!(r > 0.1, "{r}");
    }

    #[test]
    fn parity_is_an_involution() {
        assert_eq!(involution_defect(&swap()), 0.0);
        assert!(involution_defect(&ComplexMatrix::from_real_diagonal(&[2.0, 1.0])) > 1.0);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(check_pt_symmetry(&toy(), &ComplexMatrix::identity(3)).is_err());
        assert!(check_pct_symmetry(&toy(), &swap(), &ComplexMatrix::identity(3)).is_err());
    }
}
