//! Metric operators and quasi-Hermitian observables for finite-dimensional
//! non-Hermitian Hamiltonians.
//!
//! A Hamiltonian `H` with real spectrum describes unitary evolution once the
//! inner product is weighted by a positive-definite metric `Θ` solving
//! `H†Θ = ΘH`. This crate finds those metrics ([`dieudonne`]), factorizes them
//! as `Θ = Z_N ⋯ Z_1` and builds the matching chains of quasi-Hermitian
//! observables ([`chain`]), checks antilinear symmetries ([`symmetry`]),
//! propagates the dual pair of Schrödinger equations ([`evolution`]) and
//! supplies model Hamiltonians and sweeps ([`models`]).

pub mod chain;
pub mod cli;
pub mod dieudonne;
pub mod error;
pub mod evolution;
pub mod linalg;
pub mod matrix;
pub mod models;
pub mod random;
pub mod spectral;
pub mod symmetry;

pub use chain::{
    build_chain, lemma1_observable, n3_named_operators, verify_chain, verify_theorem1, ObservableChain,
    VerificationReport,
};
pub use dieudonne::{check_quasi_hermitian, metric_from_weights, physical_inner_product, solve_metric_space, MetricFamily};
pub use error::{Error, Result};
pub use evolution::{expectation, norm_trajectory, propagate, propagate_dual, TrajectoryRecord};
pub use linalg::{inverse, is_positive_definite, mat_exp};
pub use matrix::{hermitian_defect, CVector, ComplexMatrix};
pub use models::{parity, pt_chain, random_qh, spectral_reality, sweep_exceptional, toy_2x2, SweepResult};
pub use spectral::{eig, SpectralData};
pub use symmetry::{check_pct_symmetry, check_pseudo_hermiticity, check_pt_symmetry};

pub use num_complex;
