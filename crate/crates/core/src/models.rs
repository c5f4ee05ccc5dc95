//! Built-in Hamiltonian families, parities and spectral sweeps.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dieudonne::spectral_metric;
use crate::error::{Error, Result};
use crate::linalg::{inverse, is_positive_definite};
use crate::matrix::ComplexMatrix;
use crate::random::SeededRng;
use crate::spectral::{eig, eigenvalues, min_gap};

/// `[[0, 1], [g², 0]]`, with eigenvalues `±g` and metric `diag(g², 1)`.
pub fn toy_2x2(g: f64) -> Result<ComplexMatrix> {
    if g == 0.0 {
        return Err(Error::ZeroParameter);
    }
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[g * g, 0.0]])
}

/// Reference metric `diag(g², 1)` of [`toy_2x2`].
pub fn toy_metric(g: f64) -> ComplexMatrix {
    ComplexMatrix::from_real_diagonal(&[g * g, 1.0])
}

/// Open tight-binding chain with unit hopping and boundary gain/loss `±iγ`.
pub fn pt_chain(d: usize, gamma: f64) -> Result<ComplexMatrix> {
    if d < 2 {
        return Err(Error::BadDimension(d));
    }
    let mut h = ComplexMatrix::zeros(d);
    for i in 0..d - 1 {
        h.set(i, i + 1, Complex64::new(1.0, 0.0));
        h.set(i + 1, i, Complex64::new(1.0, 0.0));
    }
    h.set(0, 0, Complex64::new(0.0, gamma));
    h.set(d - 1, d - 1, Complex64::new(0.0, -gamma));
    Ok(h)
}

/// Anti-diagonal matrix of ones.
pub fn parity(d: usize) -> Result<ComplexMatrix> {
    if d < 2 {
        return Err(Error::BadDimension(d));
    }
    let mut p = ComplexMatrix::zeros(d);
    for i in 0..d {
        p.set(i, d - 1 - i, Complex64::new(1.0, 0.0));
    }
    Ok(p)
}

/// `H = Ω⁻¹ h Ω` with witness metric `Θ = Ω†Ω`.
pub fn qh_from_similarity(h: &ComplexMatrix, omega: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    h.check_same_dim(omega)?;
    let omega_inv = inverse(omega)?;
    let ham = &(&omega_inv * h) * omega;
    let theta = (&omega.adjoint() * omega).hermitian_part();
    Ok((ham, theta))
}

/// Seeded quasi-Hermitian Hamiltonian with a positive-definite witness metric.
///
/// Draws a Hermitian `h` and an invertible `Ω = U diag(s) V†` with singular
/// values in `[0.5, 2]`, then applies [`qh_from_similarity`].
pub fn random_qh(d: usize, seed: u64) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if d < 2 {
        return Err(Error::BadDimension(d));
    }
    let mut rng = SeededRng::new(seed);
    let h = rng.hermitian(d);
    let omega = rng.invertible(d);
    qh_from_similarity(&h, &omega)
}

fn max_imag(values: &[Complex64]) -> f64 {
    values.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
}

/// Whether `max |Im λ| ≤ tol·‖H‖`, and that maximum.
pub fn spectral_reality(h: &ComplexMatrix, tol: f64) -> Result<(bool, f64)> {
    let s = eig(h)?;
    let mi = s.max_imag();
    Ok((mi <= tol * h.norm(), mi))
}

/// Same test from the Schur eigenvalues alone; defined at exceptional points.
pub fn eigenvalue_reality(h: &ComplexMatrix, tol: f64) -> (bool, f64) {
    let mi = max_imag(&eigenvalues(h));
    (mi <= tol * h.norm(), mi)
}

/// Whether the all-ones spectral metric exists and is positive definite.
pub fn default_metric_positive(h: &ComplexMatrix, tol: f64) -> bool {
    let vals = eigenvalues(h);
    if max_imag(&vals) > tol * h.norm() || min_gap(&vals) < tol * h.norm() {
        return false;
    }
    let Ok(s) = eig(h) else {
        return false;
    };
    spectral_metric(&s, &vec![1.0; s.dim()])
        .and_then(|theta| {
            let scale = theta.max_abs().max(1.0);
            is_positive_definite(&theta, 1e-12 * scale)
        })
        .map(|(pd, _)| pd)
        .unwrap_or(false)
}

/// Bisection stops once the bracket is narrower than this.
pub const BISECTION_WIDTH: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub parameter_values: Vec<f64>,
    pub reality_flags: Vec<bool>,
    pub positivity_flags: Vec<bool>,
    /// Parameter where real spectrum is lost, refined by bisection.
    pub critical_estimate: Option<f64>,
    /// Final bracket width of the bisection.
    pub critical_uncertainty: Option<f64>,
}

impl SweepResult {
    /// CSV with columns `parameter, reality, positivity`.
    pub fn to_csv(&self) -> std::result::Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["parameter", "reality", "positivity"])?;
        for ((p, r), q) in self
            .parameter_values
            .iter()
            .zip(&self.reality_flags)
            .zip(&self.positivity_flags)
        {
            w.write_record([p.to_string(), r.to_string(), q.to_string()])?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Scans `family` on a uniform grid over `[lo, hi]` and, at the first
/// real-to-complex transition of the spectrum, bisects the breakdown point.
pub fn sweep_exceptional<F>(family: F, lo: f64, hi: f64, samples: usize, tol: f64) -> Result<SweepResult>
where
    F: Fn(f64) -> Result<ComplexMatrix>,
{
    if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) || samples < 2 {
        return Err(Error::BadRange { lo, hi, samples });
    }
    let parameter_values: Vec<f64> = (0..samples)
        .map(|i| lo + (hi - lo) * i as f64 / (samples - 1) as f64)
        .collect();
    let mut reality_flags = Vec::with_capacity(samples);
    let mut positivity_flags = Vec::with_capacity(samples);
    for &p in &parameter_values {
        let h = family(p)?;
        reality_flags.push(eigenvalue_reality(&h, tol).0);
        positivity_flags.push(default_metric_positive(&h, tol));
    }

    let transition = reality_flags.windows(2).position(|w| w[0] && !w[1]);
    let (critical_estimate, critical_uncertainty) = match transition {
        Some(i) => {
            let (mut a, mut b) = (parameter_values[i], parameter_values[i + 1]);
            while b - a > BISECTION_WIDTH {
                let mid = 0.5 * (a + b);
                if eigenvalue_reality(&family(mid)?, tol).0 {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            (Some(0.5 * (a + b)), Some(b - a))
        }
        None => (None, None),
    };

    Ok(SweepResult {
        parameter_values,
        reality_flags,
        positivity_flags,
        critical_estimate,
        critical_uncertainty,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dieudonne::check_quasi_hermitian;
    use crate::matrix::hermitian_defect;
    use crate::symmetry::check_pt_symmetry;

    #[test]
    fn toy_examples() {
        let h = toy_2x2(1.0).unwrap();
        assert_eq!(hermitian_defect(&h), 0.0);
        let h2 = toy_2x2(2.0).unwrap();
        let s = eig(&h2).unwrap();
        assert!((s.eigenvalues[0].re + 2.0).abs() < 1e-14);
        assert!((s.eigenvalues[1].re - 2.0).abs() < 1e-14);
        assert_eq!(check_quasi_hermitian(&h2, &toy_metric(2.0)).unwrap(), 0.0);
        assert!(matches!(toy_2x2(0.0), Err(Error::ZeroParameter)));
    }

    #[test]
    fn pt_chain_dimer_spectra() {
        let s = eig(&pt_chain(2, 0.0).unwrap()).unwrap();
        assert!((s.eigenvalues[0].re + 1.0).abs() < 1e-14);
        let s = eig(&pt_chain(2, 0.5).unwrap()).unwrap();
        let w = 0.75f64.sqrt();
        assert!((s.eigenvalues[0].re + w).abs() < 1e-14 && (s.eigenvalues[1].re - w).abs() < 1e-14);
        assert!(s.max_imag() < 1e-14);
        let s = eig(&pt_chain(2, 1.5).unwrap()).unwrap();
        assert!((s.max_imag() - 1.25f64.sqrt()).abs() < 1e-14);
        assert!(matches!(pt_chain(1, 0.3), Err(Error::BadDimension(1))));
    }

    #[test]
    fn pt_chain_is_pt_symmetric() {
        for d in 2..=12 {
            for gamma in [0.0, 0.3, 1.0, 2.7] {
                let h = pt_chain(d, gamma).unwrap();
                assert!(check_pt_symmetry(&h, &parity(d).unwrap()).unwrap() < 1e-15);
            }
        }
    }

    #[test]
    fn parity_examples() {
        let p2 = parity(2).unwrap();
        assert_eq!(p2, ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap());
        for d in 2..8 {
            let p = parity(d).unwrap();
            assert_eq!(hermitian_defect(&p), 0.0);
            assert_eq!(&p * &p, ComplexMatrix::identity(d));
        }
        assert!(parity(1).is_err());
    }

    #[test]
    fn identity_similarity_gives_hermitian() {
        let mut rng = SeededRng::new(5);
        let h = rng.hermitian(3);
        let (ham, theta) = qh_from_similarity(&h, &ComplexMatrix::identity(3)).unwrap();
        assert_eq!(ham, h);
        assert_eq!(theta, ComplexMatrix::identity(3));
    }

    #[test]
    fn random_qh_witness() {
        for seed in 0..10 {
            let (h, theta) = random_qh(4, seed).unwrap();
            assert!(is_positive_definite(&theta, 1e-12).unwrap().0);
            assert!(check_quasi_hermitian(&h, &theta).unwrap() < 1e-10);
            assert!(spectral_reality(&h, 1e-10).unwrap().0);
        }
    }

    #[test]
    fn spectral_reality_examples() {
        let herm = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 3.0]]).unwrap();
        assert!(spectral_reality(&herm, 1e-12).unwrap().0);
        let (ok, mi) = spectral_reality(&pt_chain(2, 0.5).unwrap(), 1e-12).unwrap();
        assert!(ok && mi < 1e-14);
        let (ok, mi) = spectral_reality(&pt_chain(2, 1.5).unwrap(), 1e-12).unwrap();
        assert!(!ok);
        assert!((mi - 1.25f64.sqrt()).abs() < 1e-12);
        let jordan = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        assert!(matches!(spectral_reality(&jordan, 1e-12), Err(Error::DefectiveMatrix { .. })));
    }

    #[test]
    fn sweep_finds_dimer_exceptional_point() {
        let res = sweep_exceptional(|g| pt_chain(2, g), 0.0, 2.0, 21, 1e-9).unwrap();
        let gc = res.critical_estimate.unwrap();
        assert!((gc - 1.0).abs() <= 1e-6, "{gc}");
        assert_eq!(res.reality_flags.len(), 21);
        assert!(res.reality_flags[..10].iter().all(|&f| f));
        assert!(res.reality_flags[11..].iter().all(|&f| !f));
        assert!(res.positivity_flags[..10].iter().all(|&f| f));
        assert!(res.positivity_flags[11..].iter().all(|&f| !f));
    }

    #[test]
    fn sweep_constant_hermitian_has_no_transition() {
        let h = ComplexMatrix::from_real_rows(&[&[1.0, 0.5], &[0.5, -1.0]]).unwrap();
        let res = sweep_exceptional(|_| Ok(h.clone()), 0.0, 1.0, 5, 1e-9).unwrap();
        assert!(res.reality_flags.iter().all(|&f| f));
        assert!(res.positivity_flags.iter().all(|&f| f));
        assert!(res.critical_estimate.is_none());
    }

    #[test]
    fn sweep_rejects_reversed_range() {
        assert!(matches!(
            sweep_exceptional(|g| pt_chain(2, g), 2.0, 0.0, 21, 1e-9),
            Err(Error::BadRange { .. })
        ));
        assert!(sweep_exceptional(|g| pt_chain(2, g), 0.0, 2.0, 1, 1e-9).is_err());
    }
}
