//! C ABI for `qhmetric`.
//!
//! Matrices and chains are opaque heap handles released with their `_free`
//! function. Every call returns a [`QhStatus`]; on failure the message is
//! available from [`qh_last_error_message`] on the same thread. Strings
//! returned through `char **` out-parameters are owned by the caller and must
//! be released with [`qh_string_free`]. Dense data crosses the boundary as
//! separate row-major real and imaginary `double` arrays.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use qhmetric::chain::{build_chain, verify_chain, verify_theorem1, ObservableChain};
use qhmetric::dieudonne::{check_quasi_hermitian, metric_from_weights, solve_metric_space, DEFAULT_TOL};
use qhmetric::matrix::{hermitian_defect, CVector, ComplexMatrix};
use qhmetric::models::{parity, pt_chain, random_qh, spectral_reality, toy_2x2};
use qhmetric::num_complex::Complex64;
use qhmetric::{evolution, Error};

/// Opaque square complex matrix.
pub struct QhMatrix(ComplexMatrix);

/// Opaque observable chain.
pub struct QhChain(ObservableChain);

/// Result code of every exported function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QhStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    Singular = 4,
    NotHermitian = 5,
    NotPositiveDefinite = 6,
    ComplexSpectrum = 7,
    Defective = 8,
    QuasiHermiticityViolation = 9,
    Numerical = 10,
    Panic = 11,
}

impl From<&Error> for QhStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::DimensionMismatch { .. } | Error::WrongN { .. } => QhStatus::DimensionMismatch,
            Error::SingularMatrix { .. } | Error::SingularParameter { .. } => QhStatus::Singular,
            Error::NotHermitian { .. } | Error::NotHermitianParameter { .. } => QhStatus::NotHermitian,
            Error::NotPositiveDefinite { .. } | Error::NonPositiveWeight { .. } => QhStatus::NotPositiveDefinite,
            Error::ComplexSpectrum { .. } => QhStatus::ComplexSpectrum,
            Error::DefectiveMatrix { .. } => QhStatus::Defective,
            Error::QuasiHermiticityViolation { .. } => QhStatus::QuasiHermiticityViolation,
            Error::ZeroState
            | Error::ZeroParameter
            | Error::BadDimension(_)
            | Error::BadRange { .. }
            | Error::Format(_) => QhStatus::InvalidArgument,
            Error::SpectralPathUnavailable | Error::PathMismatch { .. } => QhStatus::Numerical,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

struct Failure(QhStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(QhStatus::from(&e), e.to_string())
    }
}

fn fail<T>(status: QhStatus, msg: &str) -> Result<T, Failure> {
    Err(Failure(status, msg.to_string()))
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> QhStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QhStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_last_error(format!("internal panic: {msg}"));
            QhStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(QhStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| Failure(QhStatus::NullPointer, format!("{what} is null")))
}

fn boxed_matrix(m: ComplexMatrix) -> *mut QhMatrix {
    Box::into_raw(Box::new(QhMatrix(m)))
}

fn owned_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|e| Failure(QhStatus::Numerical, e.to_string()))
}

unsafe fn read_vector(re: *const f64, im: *const f64, dim: usize) -> Result<CVector, Failure> {
    if re.is_null() {
        return fail(QhStatus::NullPointer, "re is null");
    }
    let re = slice::from_raw_parts(re, dim);
    let im = (!im.is_null()).then(|| slice::from_raw_parts(im, dim));
    Ok(CVector::from_iterator(
        dim,
        (0..dim).map(|i| Complex64::new(re[i], im.map_or(0.0, |v| v[i]))),
    ))
}

/// Message of the last failed call on this thread, or null.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qh_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn qh_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates a `dim × dim` matrix from row-major parts. `im` may be null.
///
/// # Safety
/// `re` (and `im` if non-null) must point to `dim * dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn qh_matrix_new(
    dim: usize,
    re: *const f64,
    im: *const f64,
    out_matrix: *mut *mut QhMatrix,
) -> QhStatus {
    guard(|| {
        let slot = out(out_matrix, "out_matrix")?;
        if dim == 0 {
            return fail(QhStatus::InvalidArgument, "dim must be positive");
        }
        if re.is_null() {
            return fail(QhStatus::NullPointer, "re is null");
        }
        let len = dim.checked_mul(dim).ok_or(Failure(QhStatus::InvalidArgument, "dim too large".into()))?;
        let re = slice::from_raw_parts(re, len);
        let zeros;
        let im = if im.is_null() {
            zeros = vec![0.0; len];
            &zeros[..]
        } else {
            slice::from_raw_parts(im, len)
        };
        *slot = boxed_matrix(ComplexMatrix::from_parts(dim, re, im)?);
        Ok(())
    })
}

/// Parses a matrix from its JSON form `{"dim", "re", "im"}`.
///
/// # Safety
/// `json` must be a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn qh_matrix_from_json(json: *const c_char, out_matrix: *mut *mut QhMatrix) -> QhStatus {
    guard(|| {
        let slot = out(out_matrix, "out_matrix")?;
        let text = CStr::from_ptr(deref(json, "json")?)
            .to_str()
            .map_err(|e| Failure(QhStatus::InvalidArgument, e.to_string()))?;
        let m: ComplexMatrix =
            serde_json::from_str(text).map_err(|e| Failure(QhStatus::InvalidArgument, e.to_string()))?;
        *slot = boxed_matrix(m);
        Ok(())
    })
}

/// Releases a matrix. Null is ignored.
///
/// # Safety
/// `m` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn qh_matrix_free(m: *mut QhMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn qh_matrix_dim(m: *const QhMatrix, out_dim: *mut usize) -> QhStatus {
    guard(|| {
        let slot = out(out_dim, "out_dim")?;
        *slot = deref(m, "m")?.0.dim();
        Ok(())
    })
}

/// Copies the row-major entries into `re` and `im`, each of length `len`.
///
/// # Safety
/// `re` and `im` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qh_matrix_copy_entries(
    m: *const QhMatrix,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> QhStatus {
    guard(|| {
        let m = &deref(m, "m")?.0;
        if re.is_null() || im.is_null() {
            return fail(QhStatus::NullPointer, "output buffer is null");
        }
        let n = m.dim() * m.dim();
        if len != n {
            return Err(Failure(
                QhStatus::DimensionMismatch,
                format!("buffer length {len}, matrix has {n} entries"),
            ));
        }
        let re = slice::from_raw_parts_mut(re, len);
        let im = slice::from_raw_parts_mut(im, len);
        for (i, z) in m.to_rows().into_iter().enumerate() {
            re[i] = z.re;
            im[i] = z.im;
        }
        Ok(())
    })
}

/// Serializes a matrix to JSON; free the result with [`qh_string_free`].
///
/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn qh_matrix_to_json(m: *const QhMatrix, out_json: *mut *mut c_char) -> QhStatus {
    guard(|| {
        let slot = out(out_json, "out_json")?;
        let s = serde_json::to_string(&deref(m, "m")?.0).map_err(|e| Failure(QhStatus::Numerical, e.to_string()))?;
        *slot = owned_string(s)?;
        Ok(())
    })
}

/// Max-entry norm of `A − A†`.
///
/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn qh_hermitian_defect(m: *const QhMatrix, out_defect: *mut f64) -> QhStatus {
    guard(|| {
        let slot = out(out_defect, "out_defect")?;
        *slot = hermitian_defect(&deref(m, "m")?.0);
        Ok(())
    })
}

/// Whether every eigenvalue has `|Im λ| ≤ tol·‖H‖`.
///
/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn qh_spectral_reality(
    h: *const QhMatrix,
    tol: f64,
    out_real: *mut bool,
    out_max_imag: *mut f64,
) -> QhStatus {
    guard(|| {
        let h = &deref(h, "h")?.0;
        let real_slot = out(out_real, "out_real")?;
        let imag_slot = out(out_max_imag, "out_max_imag")?;
        let (real, max_imag) = spectral_reality(h, tol)?;
        *real_slot = real;
        *imag_slot = max_imag;
        Ok(())
    })
}

/// Spectral metric of `h` with unit weights.
///
/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn qh_default_metric(h: *const QhMatrix, out_theta: *mut *mut QhMatrix) -> QhStatus {
    guard(|| {
        let slot = out(out_theta, "out_theta")?;
        let family = solve_metric_space(&deref(h, "h")?.0, DEFAULT_TOL)?;
        *slot = boxed_matrix(metric_from_weights(&family, &family.kappa_default)?);
        Ok(())
    })
}

/// Relative residual `‖L†Θ − ΘL‖ / (‖L‖·‖Θ‖)`.
///
/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn qh_check_quasi_hermitian(
    l: *const QhMatrix,
    theta: *const QhMatrix,
    out_residual: *mut f64,
) -> QhStatus {
    guard(|| {
        let slot = out(out_residual, "out_residual")?;
        *slot = check_quasi_hermitian(&deref(l, "l")?.0, &deref(theta, "theta")?.0)?;
        Ok(())
    })
}

/// Builds a chain with `n_params + 1` factors.
///
/// # Safety
/// `params` must point to `n_params` valid matrix handles (may be null when
/// `n_params` is 0).
#[no_mangle]
pub unsafe extern "C" fn qh_chain_build(
    h: *const QhMatrix,
    theta: *const QhMatrix,
    params: *const *const QhMatrix,
    n_params: usize,
    out_chain: *mut *mut QhChain,
) -> QhStatus {
    guard(|| {
        let slot = out(out_chain, "out_chain")?;
        let h = &deref(h, "h")?.0;
        let theta = &deref(theta, "theta")?.0;
        let handles: &[*const QhMatrix] = if n_params == 0 {
            &[]
        } else {
            slice::from_raw_parts(deref(params, "params")?, n_params)
        };
        let params = handles
            .iter()
            .map(|&p| deref(p, "params[i]").map(|m| m.0.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        let chain = build_chain(h, theta, &params)?;
        *slot = Box::into_raw(Box::new(QhChain(chain)));
        Ok(())
    })
}

/// Parses a chain from JSON.
///
/// # Safety
/// `json` must be a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn qh_chain_from_json(json: *const c_char, out_chain: *mut *mut QhChain) -> QhStatus {
    guard(|| {
        let slot = out(out_chain, "out_chain")?;
        let text = CStr::from_ptr(deref(json, "json")?)
            .to_str()
            .map_err(|e| Failure(QhStatus::InvalidArgument, e.to_string()))?;
        let chain: ObservableChain =
            serde_json::from_str(text).map_err(|e| Failure(QhStatus::InvalidArgument, e.to_string()))?;
        *slot = Box::into_raw(Box::new(QhChain(chain)));
        Ok(())
    })
}

/// Releases a chain. Null is ignored.
///
/// # Safety
/// `c` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn qh_chain_free(c: *mut QhChain) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Number of factors `N`.
///
/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn qh_chain_n(c: *const QhChain, out_n: *mut usize) -> QhStatus {
    guard(|| {
        let slot = out(out_n, "out_n")?;
        *slot = deref(c, "chain")?.0.n();
        Ok(())
    })
}

/// Copy of observable `Λ_k`, `0 ≤ k ≤ N + 1`.
///
/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn qh_chain_observable(
    c: *const QhChain,
    k: usize,
    out_matrix: *mut *mut QhMatrix,
) -> QhStatus {
    guard(|| {
        let slot = out(out_matrix, "out_matrix")?;
        let chain = &deref(c, "chain")?.0;
        if k > chain.n() + 1 {
            return Err(Failure(QhStatus::InvalidArgument, format!("k = {k} exceeds N + 1 = {}", chain.n() + 1)));
        }
        *slot = boxed_matrix(chain.observable(k).clone());
        Ok(())
    })
}

/// Copy of factor `Z_k`, `1 ≤ k ≤ N`.
///
/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn qh_chain_factor(c: *const QhChain, k: usize, out_matrix: *mut *mut QhMatrix) -> QhStatus {
    guard(|| {
        let slot = out(out_matrix, "out_matrix")?;
        let chain = &deref(c, "chain")?.0;
        if k == 0 || k > chain.n() {
            return Err(Failure(QhStatus::InvalidArgument, format!("factor index {k} outside 1..={}", chain.n())));
        }
        *slot = boxed_matrix(chain.factor(k).clone());
        Ok(())
    })
}

/// Serializes a chain to JSON; free the result with [`qh_string_free`].
///
/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn qh_chain_to_json(c: *const QhChain, out_json: *mut *mut c_char) -> QhStatus {
    guard(|| {
        let slot = out(out_json, "out_json")?;
        let s = serde_json::to_string(&deref(c, "chain")?.0).map_err(|e| Failure(QhStatus::Numerical, e.to_string()))?;
        *slot = owned_string(s)?;
        Ok(())
    })
}

/// Checks the factor relations and the observability theorem at `tol`.
///
/// `out_report` is optional; when non-null it receives a JSON object with
/// `relations` and `theorem1` lists.
///
/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn qh_chain_verify(
    c: *const QhChain,
    tol: f64,
    out_pass: *mut bool,
    out_max_residual: *mut f64,
    out_report: *mut *mut c_char,
) -> QhStatus {
    guard(|| {
        let chain = &deref(c, "chain")?.0;
        let pass_slot = out(out_pass, "out_pass")?;
        if tol.is_nan() || tol <= 0.0 {
            return fail(QhStatus::InvalidArgument, "tol must be positive");
        }
        let ladder = verify_chain(chain, tol);
        let theorem = verify_theorem1(chain, tol);
        *pass_slot = ladder.overall_pass && theorem.overall_pass;
        if let Some(r) = out_max_residual.as_mut() {
            *r = ladder.max_residual().max(theorem.max_residual());
        }
        if let Some(slot) = out_report.as_mut() {
            let report = serde_json::json!({"tol": tol, "relations": ladder, "theorem1": theorem});
            *slot = owned_string(report.to_string())?;
        }
        Ok(())
    })
}

/// `exp(−iHt) ψ₀` with `ψ₀` and the result given as real/imaginary arrays of length `dim`.
///
/// # Safety
/// Input arrays must hold `dim` doubles (`psi_im` may be null); output arrays
/// must hold `dim` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qh_propagate(
    h: *const QhMatrix,
    psi_re: *const f64,
    psi_im: *const f64,
    dim: usize,
    t: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> QhStatus {
    guard(|| {
        let h = &deref(h, "h")?.0;
        if dim != h.dim() {
            return Err(Failure(QhStatus::DimensionMismatch, format!("state has {dim} entries, H has dim {}", h.dim())));
        }
        if out_re.is_null() || out_im.is_null() {
            return fail(QhStatus::NullPointer, "output buffer is null");
        }
        let psi0 = read_vector(psi_re, psi_im, dim)?;
        let psi = evolution::propagate(h, &psi0, t)?;
        let re = slice::from_raw_parts_mut(out_re, dim);
        let im = slice::from_raw_parts_mut(out_im, dim);
        for (i, z) in psi.iter().enumerate() {
            re[i] = z.re;
            im[i] = z.im;
        }
        Ok(())
    })
}

/// `[[0, 1], [g², 0]]`.
///
/// # Safety
/// `out_matrix` must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn qh_toy_2x2(g: f64, out_matrix: *mut *mut QhMatrix) -> QhStatus {
    guard(|| {
        let slot = out(out_matrix, "out_matrix")?;
        *slot = boxed_matrix(toy_2x2(g)?);
        Ok(())
    })
}

/// Tight-binding chain of length `d` with gain/loss `gamma` on the end sites.
///
/// # Safety
/// `out_matrix` must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn qh_pt_chain(d: usize, gamma: f64, out_matrix: *mut *mut QhMatrix) -> QhStatus {
    guard(|| {
        let slot = out(out_matrix, "out_matrix")?;
        *slot = boxed_matrix(pt_chain(d, gamma)?);
        Ok(())
    })
}

/// Exchange matrix of size `d`.
///
/// # Safety
/// `out_matrix` must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn qh_parity(d: usize, out_matrix: *mut *mut QhMatrix) -> QhStatus {
    guard(|| {
        let slot = out(out_matrix, "out_matrix")?;
        *slot = boxed_matrix(parity(d)?);
        Ok(())
    })
}

/// Seeded random quasi-Hermitian `H` together with a witness metric.
///
/// # Safety
/// Out-pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn qh_random_qh(
    d: usize,
    seed: u64,
    out_h: *mut *mut QhMatrix,
    out_theta: *mut *mut QhMatrix,
) -> QhStatus {
    guard(|| {
        let h_slot = out(out_h, "out_h")?;
        let theta_slot = out(out_theta, "out_theta")?;
        let (h, theta) = random_qh(d, seed)?;
        *h_slot = boxed_matrix(h);
        *theta_slot = boxed_matrix(theta);
        Ok(())
    })
}
