//! Time evolution under a quasi-Hermitian Hamiltonian.
//!
//! Kets evolve with `i d/dt |ψ⟩ = H|ψ⟩`; the metric-multiplied kets
//! `|ψ⟩⟩ = Θ|ψ⟩` evolve with `H†` in place of `H`. Both are propagated with the
//! exact exponential, and the physical norm `⟨ψ(t)|Θ|ψ(t)⟩` is conserved.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dieudonne::check_quasi_hermitian;
use crate::error::{Error, Result};
use crate::linalg::mat_exp;
use crate::matrix::{relative, CVector, ComplexMatrix, VectorJson};

/// Admissible quasi-Hermiticity residual for the dual propagator.
pub const DUAL_QH_TOL: f64 = 1e-10;

fn propagator(h: &ComplexMatrix, t: f64) -> ComplexMatrix {
    mat_exp(&h.scale(Complex64::new(0.0, -t)))
}

/// `exp(−iHt) ψ₀`.
pub fn propagate(h: &ComplexMatrix, psi0: &CVector, t: f64) -> Result<CVector> {
    if t == 0.0 {
        h.mul_vec(psi0)?;
        return Ok(psi0.clone());
    }
    propagator(h, t).mul_vec(psi0)
}

/// `exp(−iH†t) Θψ₀`; requires `H†Θ = ΘH`.
pub fn propagate_dual(h: &ComplexMatrix, theta: &ComplexMatrix, psi0: &CVector, t: f64) -> Result<CVector> {
    let residual = check_quasi_hermitian(h, theta)?;
    if residual > DUAL_QH_TOL {
        return Err(Error::QuasiHermiticityViolation {
            residual,
            tol: DUAL_QH_TOL,
        });
    }
    propagate_dual_unchecked(h, theta, psi0, t)
}

fn propagate_dual_unchecked(h: &ComplexMatrix, theta: &ComplexMatrix, psi0: &CVector, t: f64) -> Result<CVector> {
    let start = theta.mul_vec(psi0)?;
    if t == 0.0 {
        return Ok(start);
    }
    propagator(&h.adjoint(), t).mul_vec(&start)
}

/// Sampled trajectory of `|ψ(t)⟩`, `|ψ(t)⟩⟩` and `⟨ψ(t)|Θ|ψ(t)⟩`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    #[serde(with = "vec_of_vectors")]
    pub states: Vec<CVector>,
    #[serde(with = "vec_of_vectors")]
    pub dual_states: Vec<CVector>,
    pub norms: Vec<f64>,
    /// `max_t |norm(t) − norm(0)| / norm(0)`.
    pub norm_drift: f64,
    /// `max_t ‖|ψ(t)⟩⟩ − Θ|ψ(t)⟩‖ / (‖Θ‖·‖ψ(t)‖)`.
    pub dual_residual: f64,
}

mod vec_of_vectors {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[CVector], s: S) -> std::result::Result<S::Ok, S::Error> {
        let j: Vec<VectorJson> = v.iter().map(VectorJson::from_vector).collect();
        j.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<CVector>, D::Error> {
        let j: Vec<VectorJson> = Vec::deserialize(d)?;
        j.into_iter()
            .map(|v| v.into_vector().map_err(serde::de::Error::custom))
            .collect()
    }
}

impl TrajectoryRecord {
    /// Whether both trajectory invariants hold at the given tolerances.
    pub fn invariants_hold(&self, drift_tol: f64, dual_tol: f64) -> bool {
        self.norm_drift <= drift_tol && self.dual_residual <= dual_tol
    }

    /// CSV with columns `t, norm, re_0, im_0, …` (kets only).
    pub fn to_csv(&self) -> std::result::Result<String, csv::Error> {
        let dim = self.states.first().map_or(0, |s| s.len());
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["t".to_string(), "norm".to_string()];
        for i in 0..dim {
            header.push(format!("re_{i}"));
            header.push(format!("im_{i}"));
        }
        w.write_record(&header)?;
        for ((t, norm), state) in self.times.iter().zip(&self.norms).zip(&self.states) {
            let mut row = vec![t.to_string(), norm.to_string()];
            for z in state.iter() {
                row.push(z.re.to_string());
                row.push(z.im.to_string());
            }
            w.write_record(&row)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Propagates `ψ₀` to every sample time and records the physical norm.
///
/// The invariants are measured, not enforced: with a metric that does not
/// intertwine `H` the record still comes back, showing a large drift.
pub fn norm_trajectory(
    h: &ComplexMatrix,
    theta: &ComplexMatrix,
    psi0: &CVector,
    times: &[f64],
) -> Result<TrajectoryRecord> {
    h.check_same_dim(theta)?;
    if psi0.len() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: psi0.len(),
        });
    }
    let theta_norm = theta.norm();
    let mut states = Vec::with_capacity(times.len());
    let mut dual_states = Vec::with_capacity(times.len());
    let mut norms = Vec::with_capacity(times.len());
    let mut dual_residual: f64 = 0.0;
    for &t in times {
        let psi = propagate(h, psi0, t)?;
        let dual = propagate_dual_unchecked(h, theta, psi0, t)?;
        let theta_psi = theta.mul_vec(&psi)?;
        dual_residual = dual_residual.max(relative((&dual - &theta_psi).norm(), theta_norm * psi.norm()));
        norms.push(psi.dotc(&theta_psi).re);
        states.push(psi);
        dual_states.push(dual);
    }
    let norm_drift = match norms.first() {
        Some(&n0) => norms
            .iter()
            .map(|n| relative((n - n0).abs(), n0.abs()))
            .fold(0.0, f64::max),
        None => 0.0,
    };
    Ok(TrajectoryRecord {
        times: times.to_vec(),
        states,
        dual_states,
        norms,
        norm_drift,
        dual_residual,
    })
}

/// `samples` equally spaced times on `[0, t_max]`.
pub fn uniform_times(t_max: f64, samples: usize) -> Vec<f64> {
    match samples {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..samples)
            .map(|i| t_max * i as f64 / (samples - 1) as f64)
            .collect(),
    }
}

/// `⟨ψ|ΘL|ψ⟩ / ⟨ψ|Θ|ψ⟩`.
pub fn expectation(l: &ComplexMatrix, theta: &ComplexMatrix, psi: &CVector) -> Result<Complex64> {
    l.check_same_dim(theta)?;
    if psi.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return Err(Error::ZeroState);
    }
    let theta_psi = theta.mul_vec(psi)?;
    let denom = psi.dotc(&theta_psi);
    // ⟨ψ|Θ L|ψ⟩ = (Θψ)†(Lψ) for Hermitian Θ
    let num = theta_psi.dotc(&l.mul_vec(psi)?);
    if denom.norm() == 0.0 {
        return Err(Error::ZeroState);
    }
    Ok(num / denom)
}
