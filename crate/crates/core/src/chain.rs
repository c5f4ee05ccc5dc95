//! Observable chains over a factorized metric `Θ = Z_N ⋯ Z_2 Z_1`.
//!
//! Given a Hamiltonian `H`, a metric `Θ` solving `H†Θ = ΘH` and `N − 1`
//! invertible Hermitian parameters, the chain holds the observables
//!
//! ```text
//! Λ_0 = I,   Λ_k = M_k⁻¹ Θ  (k = 1 … N−1),   Λ_N = Θ,   Λ_{N+1} = H
//! ```
//!
//! and the factors `Z_k = Λ_k Λ_{k−1}⁻¹`, so that `Λ_k = Z_k ⋯ Z_1`.
//!
//! Parameters are given in the order `M_1, M_2, …, M_{N−1}`. Each `M_k` is
//! the suffix product `Z_N ⋯ Z_{k+1}`. Suffix products are named backwards
//! from `Z`: `Z_N` itself, `Y_N = Z_N Z_{N−1}`, `X_N = Z_N Z_{N−1} Z_{N−2}`
//! and so on, while the full product is `A_N = Θ`. For `N = 4`:
//!
//! ```text
//! params = [X_4, Y_4, Z_4]      (X_4 = Z_4 Z_3 Z_2, Y_4 = Z_4 Z_3)
//! Λ_1 = X_4⁻¹ Θ,  Λ_2 = Y_4⁻¹ Θ,  Λ_3 = Z_4⁻¹ Θ,  Λ_4 = Θ,  Λ_5 = H
//! ```
//!
//! At `N = 2` the single parameter is the parity `P = Z_2`, and
//! `Λ_1 = P⁻¹ Θ` is the charge `C`.

use serde::{Deserialize, Serialize};

use crate::dieudonne::check_quasi_hermitian;
use crate::error::{Error, Result};
use crate::linalg::{inverse, is_positive_definite};
use crate::matrix::{hermitian_defect, relative, ComplexMatrix};

/// Admissible Hermitian defect of a parameter, relative to its largest entry.
pub const PARAM_HERMITIAN_TOL: f64 = 1e-12;
/// Admissible quasi-Hermiticity residual of the input `(H, Θ)` pair.
pub const INPUT_QH_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChainJson", into = "ChainJson")]
pub struct ObservableChain {
    n: usize,
    dim: usize,
    h: ComplexMatrix,
    theta: ComplexMatrix,
    params: Vec<ComplexMatrix>,
    observables: Vec<ComplexMatrix>,
    factors: Vec<ComplexMatrix>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ChainJson {
    #[serde(rename = "N")]
    n: usize,
    dim: usize,
    #[serde(rename = "H")]
    h: ComplexMatrix,
    #[serde(rename = "Theta")]
    theta: ComplexMatrix,
    params: Vec<ComplexMatrix>,
    observables: Vec<ComplexMatrix>,
    factors: Vec<ComplexMatrix>,
}

impl TryFrom<ChainJson> for ObservableChain {
    type Error = Error;
    fn try_from(j: ChainJson) -> Result<Self> {
        let n = j.n;
        if n == 0 {
            return Err(Error::Format("chain needs N >= 1".into()));
        }
        let counts = [
            ("params", j.params.len(), n - 1),
            ("observables", j.observables.len(), n + 2),
            ("factors", j.factors.len(), n),
        ];
        for (name, got, want) in counts {
            if got != want {
                return Err(Error::Format(format!("chain with N = {n} needs {want} {name}, found {got}")));
            }
        }
        let all = [&j.h, &j.theta]
            .into_iter()
            .chain(&j.params)
            .chain(&j.observables)
            .chain(&j.factors);
        for m in all {
            if m.dim() != j.dim {
                return Err(Error::DimensionMismatch {
                    expected: j.dim,
                    found: m.dim(),
                });
            }
        }
        Ok(ObservableChain {
            n,
            dim: j.dim,
            h: j.h,
            theta: j.theta,
            params: j.params,
            observables: j.observables,
            factors: j.factors,
        })
    }
}

impl From<ObservableChain> for ChainJson {
    fn from(c: ObservableChain) -> Self {
        ChainJson {
            n: c.n,
            dim: c.dim,
            h: c.h,
            theta: c.theta,
            params: c.params,
            observables: c.observables,
            factors: c.factors,
        }
    }
}

impl ObservableChain {
    /// Number of metric factors.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.h
    }

    pub fn theta(&self) -> &ComplexMatrix {
        &self.theta
    }

    /// `M_1 … M_{N−1}`.
    pub fn params(&self) -> &[ComplexMatrix] {
        &self.params
    }

    /// `Λ_0 … Λ_{N+1}`.
    pub fn observables(&self) -> &[ComplexMatrix] {
        &self.observables
    }

    /// `Λ_k`.
    pub fn observable(&self, k: usize) -> &ComplexMatrix {
        &self.observables[k]
    }

    /// `Z_1 … Z_N`.
    pub fn factors(&self) -> &[ComplexMatrix] {
        &self.factors
    }

    /// `Z_k` for `k = 1 … N`.
    pub fn factor(&self, k: usize) -> &ComplexMatrix {
        &self.factors[k - 1]
    }

    /// Replaces `Z_k`; used to inject faults when testing verifiers.
    pub fn replace_factor(&mut self, k: usize, z: ComplexMatrix) {
        self.factors[k - 1] = z;
    }

    /// `Z_N ⋯ Z_j` recomputed from the stored factors.
    pub fn suffix_product(&self, j: usize) -> ComplexMatrix {
        ComplexMatrix::product(self.factors[j - 1..].iter().rev()).expect("1 <= j <= N")
    }

    /// `Z_k ⋯ Z_1` recomputed from the stored factors.
    pub fn prefix_product(&self, k: usize) -> ComplexMatrix {
        ComplexMatrix::product(self.factors[..k].iter().rev()).expect("1 <= k <= N")
    }
}

/// `Λ = M Θ` for Hermitian `M`.
///
/// Any such product is quasi-Hermitian with respect to `Θ`, since
/// `Λ†Θ = Θ M Θ = Θ Λ`.
pub fn lemma1_observable(m: &ComplexMatrix, theta: &ComplexMatrix) -> Result<ComplexMatrix> {
    m.check_same_dim(theta)?;
    let defect = hermitian_defect(m);
    if defect > PARAM_HERMITIAN_TOL * m.max_abs().max(1.0) {
        return Err(Error::NotHermitianParameter { index: 0, defect });
    }
    Ok(m * theta)
}

/// Assembles the observable chain for `N = params.len() + 1` factors.
pub fn build_chain(h: &ComplexMatrix, theta: &ComplexMatrix, params: &[ComplexMatrix]) -> Result<ObservableChain> {
    let dim = h.dim();
    h.check_same_dim(theta)?;
    let residual = check_quasi_hermitian(h, theta)?;
    if residual > INPUT_QH_TOL {
        return Err(Error::QuasiHermiticityViolation {
            residual,
            tol: INPUT_QH_TOL,
        });
    }
    let (pd, min_eigenvalue) = is_positive_definite(theta, PARAM_HERMITIAN_TOL * theta.max_abs().max(1.0))?;
    if !pd {
        return Err(Error::NotPositiveDefinite { min_eigenvalue });
    }

    let n = params.len() + 1;
    let mut observables = Vec::with_capacity(n + 2);
    observables.push(ComplexMatrix::identity(dim));
    for (index, m) in params.iter().enumerate() {
        m.check_same_dim(theta)?;
        let defect = hermitian_defect(m);
        if defect > PARAM_HERMITIAN_TOL * m.max_abs().max(1.0) {
            return Err(Error::NotHermitianParameter { index, defect });
        }
        let m_inv = inverse(m).map_err(|_| Error::SingularParameter { index })?;
        observables.push(&m_inv * theta);
    }
    observables.push(theta.clone());
    observables.push(h.clone());

    let mut factors = Vec::with_capacity(n);
    for k in 1..=n {
        let prev_inv = inverse(&observables[k - 1]).map_err(|_| Error::SingularParameter {
            index: k.saturating_sub(2),
        })?;
        factors.push(&observables[k] * &prev_inv);
    }

    Ok(ObservableChain {
        n,
        dim,
        h: h.clone(),
        theta: theta.clone(),
        params: params.to_vec(),
        observables,
        factors,
    })
}

/// One checked relation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Relation {
    pub relation: String,
    pub residual: f64,
    pub pass: bool,
}

/// Named residuals compared against a common tolerance.
///
/// Serializes as the bare list of relations.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub relations: Vec<Relation>,
    pub tol: f64,
    pub overall_pass: bool,
}

impl VerificationReport {
    pub fn new(tol: f64) -> Self {
        Self {
            relations: Vec::new(),
            tol,
            overall_pass: true,
        }
    }

    pub fn push(&mut self, relation: impl Into<String>, residual: f64) {
        let pass = residual <= self.tol;
        self.overall_pass &= pass;
        self.relations.push(Relation {
            relation: relation.into(),
            residual,
            pass,
        });
    }

    pub fn get(&self, relation: &str) -> Option<&Relation> {
        self.relations.iter().find(|r| r.relation == relation)
    }

    pub fn failing(&self) -> Vec<&str> {
        self.relations
            .iter()
            .filter(|r| !r.pass)
            .map(|r| r.relation.as_str())
            .collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.relations.iter().map(|r| r.residual).fold(0.0, f64::max)
    }
}

impl Serialize for VerificationReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.relations.serialize(s)
    }
}

/// Label of the Hamiltonian relation `H†Θ = ΘH` at a given `N`.
pub fn hamiltonian_label(n: usize) -> &'static str {
    match n {
        2 => "able3",
        3 => "bable4",
        _ => "deblesep",
    }
}

/// Label of `Z_N† = Z_N`.
pub fn top_factor_label(n: usize) -> &'static str {
    match n {
        2 => "able1",
        3 => "bable1",
        _ => "deble1",
    }
}

/// Label of the ladder relation `Z_k†(Z_N ⋯ Z_{k+1}) = (Z_N ⋯ Z_{k+1}) Z_k`.
pub fn ladder_label(n: usize, k: usize) -> String {
    match (n, k) {
        (2, 1) => "able2".into(),
        (3, 1) => "bable3".into(),
        (3, 2) => "bable2".into(),
        _ if k == 1 => "deble4".into(),
        _ if k + 1 == n => "deble3b".into(),
        _ if k + 2 == n => "deble3".into(),
        _ if k == 2 => "deble4b".into(),
        _ => format!("deble4[k={k}]"),
    }
}

/// Name of the suffix product `Z_N ⋯ Z_j`: `A_N` for the whole product,
/// otherwise a letter counted back from `Z`.
pub fn suffix_name(n: usize, j: usize) -> String {
    if j == 1 {
        return format!("A_{n}");
    }
    let back = n - j;
    if back < 24 {
        format!("{}_{n}", (b'Z' - back as u8) as char)
    } else {
        format!("S_{n}[{j}]")
    }
}

fn ladder_residual(zk: &ComplexMatrix, suffix: &ComplexMatrix) -> f64 {
    let diff = &(&zk.adjoint() * suffix) - &(suffix * zk);
    relative(diff.norm(), zk.norm() * suffix.norm())
}

fn hermiticity_residual(a: &ComplexMatrix) -> f64 {
    relative((a - &a.adjoint()).norm(), a.norm())
}

/// Checks the consistency ladder of the factorized metric.
///
/// Reports, in order: `H†Θ = ΘH`; the factorization `Z_N ⋯ Z_1 = Θ`
/// (`kamenK`); each ladder relation for `k = 1 … N−1`; `Z_N† = Z_N`; and the
/// Hermiticity of every suffix product `A_N, …, Y_N`.
pub fn verify_chain(chain: &ObservableChain, tol: f64) -> VerificationReport {
    let n = chain.n;
    let mut report = VerificationReport::new(tol);

    report.push(
        hamiltonian_label(n),
        check_quasi_hermitian(&chain.h, &chain.theta).unwrap_or(f64::INFINITY),
    );

    let full = chain.suffix_product(1);
    report.push(
        "kamenK",
        relative((&full - &chain.theta).norm(), chain.theta.norm()),
    );

    for k in 1..n {
        let suffix = chain.suffix_product(k + 1);
        report.push(ladder_label(n, k), ladder_residual(chain.factor(k), &suffix));
    }

    report.push(top_factor_label(n), hermiticity_residual(chain.factor(n)));

    for j in 1..n {
        report.push(
            format!("hermitian({})", suffix_name(n, j)),
            hermiticity_residual(&chain.suffix_product(j)),
        );
    }
    report
}

/// Label of `Λ_k†Θ = ΘΛ_k`.
pub fn observability_label(n: usize, k: usize) -> String {
    if n == 2 && k == 1 {
        "uhols".into()
    } else {
        format!("treat[k={k}]")
    }
}

/// Checks that every `Λ_k` is quasi-Hermitian and equals `Z_k ⋯ Z_1`.
///
/// Also reports the intermediate identities `Λ_k† (Z_N ⋯ Z_{k+1}) = Θ` for
/// `k = 0 … N−1`.
pub fn verify_theorem1(chain: &ObservableChain, tol: f64) -> VerificationReport {
    let n = chain.n;
    let mut report = VerificationReport::new(tol);
    for k in 0..=n + 1 {
        report.push(
            observability_label(n, k),
            check_quasi_hermitian(&chain.observables[k], &chain.theta).unwrap_or(f64::INFINITY),
        );
    }
    for k in 1..=n {
        let lk = &chain.observables[k];
        let prod = chain.prefix_product(k);
        report.push(
            format!("product[k={k}]"),
            relative((lk - &prod).norm(), lk.norm()),
        );
    }
    for k in 0..n {
        let lk = &chain.observables[k];
        let mk = chain.suffix_product(k + 1);
        let diff = &(&lk.adjoint() * &mk) - &chain.theta;
        report.push(
            format!("intertwiner[k={k}]"),
            relative(diff.norm(), lk.norm() * mk.norm()),
        );
    }
    report
}

/// The named operators of the three-factor metric `Θ = P Q R`.
#[derive(Debug, Clone)]
pub struct N3Operators {
    /// `Q = Z_3⁻¹ Y_3`, the unobservable quasiparity.
    pub quasiparity: ComplexMatrix,
    /// `R = Y_3⁻¹ Θ`, the renormalized charge.
    pub renormalized_charge: ComplexMatrix,
}

pub fn n3_named_operators(chain: &ObservableChain) -> Result<N3Operators> {
    if chain.n != 3 {
        return Err(Error::WrongN {
            expected: 3,
            found: chain.n,
        });
    }
    let z3 = chain.factor(3);
    let y3 = z3 * chain.factor(2);
    let quasiparity = &inverse(z3)? * &y3;
    let renormalized_charge = &inverse(&y3)? * &chain.theta;
    Ok(N3Operators {
        quasiparity,
        renormalized_charge,
    })
}
