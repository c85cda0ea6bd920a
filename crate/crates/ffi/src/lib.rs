//! C interface to the nodal-shoot solver.
//!
//! Problems and solutions are opaque handles created and released through
//! this API. Every fallible call returns an [`NsStatus`]; on failure the
//! message is available from [`ns_last_error_message`] on the same thread.
//! The generated header lives in `include/nodal_shoot.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nodal_shoot::ivp::OdeParams;
use nodal_shoot::matcher::{self, MatchProblem, NodalSolution};
use nodal_shoot::profile::{check_exponent, Profile, ProfileSpec};
use nodal_shoot::shooting::{self, Side};
use nodal_shoot::Error;

/// Status codes. Values 1 to 5 match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NsStatus {
    Ok = 0,
    VerificationFailed = 1,
    InvalidInput = 2,
    BudgetExhausted = 3,
    NotFound = 4,
    ExponentPrecondition = 5,
    NullPointer = 6,
    Panic = 7,
}

/// Endpoint a shot starts from.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NsSide {
    Left = 0,
    Right = 1,
}

/// A profile together with ODE parameters.
pub struct NsProblem {
    profile: Profile,
    params: OdeParams,
}

/// A matched and verified solution.
pub struct NsSolution {
    inner: NodalSolution,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> NsStatus {
    match err {
        Error::InvalidSpec(_) | Error::Domain { .. } | Error::ProfileInvalid(_) | Error::Config(_) => {
            NsStatus::InvalidInput
        }
        Error::BudgetExhausted { .. } => NsStatus::BudgetExhausted,
        Error::NotFound(_) => NsStatus::NotFound,
        Error::Exponent { .. } => NsStatus::ExponentPrecondition,
        Error::StepUnderflow { .. }
        | Error::Divergence { .. }
        | Error::AmbiguousAngle(_)
        | Error::Assembly { .. }
        | Error::Resolution(_) => NsStatus::VerificationFailed,
    }
}

fn fail(err: Error) -> NsStatus {
    set_error(err.to_string());
    status_of(&err)
}

fn null(what: &str) -> NsStatus {
    set_error(format!("{what} is null"));
    NsStatus::NullPointer
}

fn guard<F: FnOnce() -> NsStatus>(f: F) -> NsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == NsStatus::Ok {
                LAST_ERROR.with(|e| *e.borrow_mut() = None);
            }
            s
        }
        Err(_) => {
            set_error("internal panic");
            NsStatus::Panic
        }
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ns_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn ns_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

fn new_problem(spec: ProfileSpec, lambda: f64, q: f64, out: *mut *mut NsProblem) -> NsStatus {
    let params = OdeParams::new(lambda, q);
    if let Err(e) = params.validate() {
        return fail(e);
    }
    match Profile::new(spec) {
        Ok(profile) => {
            let handle = Box::new(NsProblem { profile, params });
            // SAFETY: caller checked `out` for null.
            unsafe { *out = Box::into_raw(handle) };
            NsStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Creates a problem with the model profile
/// `h(t) = H0 s cot(s t) - Hd s tan(s t)`, `s = pi / (2d)`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn ns_problem_new_model(
    n: u32,
    m1: u32,
    m2: u32,
    d: f64,
    lambda: f64,
    q: f64,
    out: *mut *mut NsProblem,
) -> NsStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        new_problem(ProfileSpec::model(n, m1, m2, d), lambda, q, out)
    })
}

/// Creates a problem with a closed-form profile in `t` and `d`.
///
/// # Safety
/// `expression` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ns_problem_new_custom(
    n: u32,
    m1: u32,
    m2: u32,
    d: f64,
    expression: *const c_char,
    lambda: f64,
    q: f64,
    out: *mut *mut NsProblem,
) -> NsStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        if expression.is_null() {
            return null("expression");
        }
        let src = match CStr::from_ptr(expression).to_str() {
            Ok(s) => s,
            Err(_) => {
                set_error("expression is not valid UTF-8");
                return NsStatus::InvalidInput;
            }
        };
        new_problem(ProfileSpec::custom(n, m1, m2, d, src), lambda, q, out)
    })
}

/// # Safety
/// `problem` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ns_problem_set_tolerances(problem: *mut NsProblem, tol_abs: f64, tol_rel: f64) -> NsStatus {
    guard(|| {
        let Some(p) = problem.as_mut() else {
            return null("problem");
        };
        let params = p.params.with_tolerances(tol_abs, tol_rel);
        if let Err(e) = params.validate() {
            return fail(e);
        }
        p.params = params;
        NsStatus::Ok
    })
}

/// Releases a problem. NULL is ignored.
///
/// # Safety
/// `problem` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ns_problem_free(problem: *mut NsProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// The zero `t0` of the profile.
///
/// # Safety
/// `problem` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ns_problem_t0(problem: *const NsProblem, out: *mut f64) -> NsStatus {
    guard(|| {
        let Some(p) = problem.as_ref() else {
            return null("problem");
        };
        if out.is_null() {
            return null("out");
        }
        match p.profile.t0() {
            Ok(t0) => {
                *out = t0;
                NsStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Checks `q < p_G` and the endpoint exponent condition. Writes `p_G`
/// (infinity when `n - m <= 2`) to `out_p_g` when it is not NULL.
///
/// # Safety
/// `out_p_g` must be NULL or a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ns_check_exponent(n: u32, m1: u32, m2: u32, q: f64, out_p_g: *mut f64) -> NsStatus {
    guard(|| match check_exponent(n, m1, m2, q) {
        Ok(r) => {
            if !out_p_g.is_null() {
                *out_p_g = r.p_g_value();
            }
            if r.passed {
                NsStatus::Ok
            } else {
                set_error(format!("q = {q} fails the exponent condition (p_G = {})", r.p_g_value()));
                NsStatus::ExponentPrecondition
            }
        }
        Err(e) => fail(e),
    })
}

/// Shoots from one endpoint to `t0`. Any output pointer may be NULL.
///
/// # Safety
/// `problem` must be a live handle; non-NULL outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn ns_shoot(
    problem: *const NsProblem,
    side: NsSide,
    param: f64,
    out_u: *mut f64,
    out_up: *mut f64,
    out_zeros: *mut usize,
) -> NsStatus {
    guard(|| {
        let Some(p) = problem.as_ref() else {
            return null("problem");
        };
        let side = match side {
            NsSide::Left => Side::Left,
            NsSide::Right => Side::Right,
        };
        match shooting::shoot(side, param, &p.profile, &p.params) {
            Ok(shot) => {
                if !out_u.is_null() {
                    *out_u = shot.u_t0;
                }
                if !out_up.is_null() {
                    *out_up = shot.up_t0;
                }
                if !out_zeros.is_null() {
                    *out_zeros = shot.zeros_inside;
                }
                NsStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Searches for a solution with exactly `k` interior zeros using default
/// search settings. A solution that matched but failed verification is
/// still returned, with status `NS_STATUS_VERIFICATION_FAILED`.
///
/// # Safety
/// `problem` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ns_find_nodal(problem: *const NsProblem, k: usize, out: *mut *mut NsSolution) -> NsStatus {
    guard(|| {
        let Some(p) = problem.as_ref() else {
            return null("problem");
        };
        if out.is_null() {
            return null("out");
        }
        *out = ptr::null_mut();
        let mp = MatchProblem::new(k, p.profile.clone(), p.params);
        match matcher::find_nodal(&mp) {
            Ok(sol) => {
                let passed = sol.report.passed;
                if !passed {
                    set_error(sol.report.failures.join("; "));
                }
                *out = Box::into_raw(Box::new(NsSolution { inner: sol }));
                if passed {
                    NsStatus::Ok
                } else {
                    NsStatus::VerificationFailed
                }
            }
            Err(e) => fail(e),
        }
    })
}

/// Releases a solution. NULL is ignored.
///
/// # Safety
/// `solution` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ns_solution_free(solution: *mut NsSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// `u(0)`; NaN for NULL.
///
/// # Safety
/// `solution` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ns_solution_alpha(solution: *const NsSolution) -> f64 {
    solution.as_ref().map_or(f64::NAN, |s| s.inner.alpha)
}

/// `u(d)`, including its sign; NaN for NULL.
///
/// # Safety
/// `solution` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ns_solution_beta(solution: *const NsSolution) -> f64 {
    solution.as_ref().map_or(f64::NAN, |s| s.inner.beta_signed)
}

/// # Safety
/// `solution` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ns_solution_zero_count(solution: *const NsSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.inner.zeros.len())
}

/// Finite-difference residual of the stored grid; NaN for NULL.
///
/// # Safety
/// `solution` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ns_solution_residual(solution: *const NsSolution) -> f64 {
    solution.as_ref().map_or(f64::NAN, |s| s.inner.report.residual_sup)
}

/// # Safety
/// `solution` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ns_solution_passed(solution: *const NsSolution) -> bool {
    solution.as_ref().is_some_and(|s| s.inner.report.passed)
}

/// # Safety
/// `solution` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ns_solution_grid_len(solution: *const NsSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.inner.grid.len())
}

/// Copies the grid into three arrays of at least `capacity` elements.
///
/// # Safety
/// `solution` must be a live handle; `t`, `u`, `up` must each hold
/// `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn ns_solution_grid(
    solution: *const NsSolution,
    t: *mut f64,
    u: *mut f64,
    up: *mut f64,
    capacity: usize,
) -> NsStatus {
    guard(|| {
        let Some(s) = solution.as_ref() else {
            return null("solution");
        };
        if t.is_null() || u.is_null() || up.is_null() {
            return null("output array");
        }
        let grid = &s.inner.grid;
        if capacity < grid.len() {
            set_error(format!("capacity {capacity} is below grid length {}", grid.len()));
            return NsStatus::InvalidInput;
        }
        for (i, st) in grid.iter().enumerate() {
            *t.add(i) = st.t;
            *u.add(i) = st.u;
            *up.add(i) = st.up;
        }
        NsStatus::Ok
    })
}

/// Copies up to `capacity` zero locations and writes the total count to
/// `out_len`.
///
/// # Safety
/// `solution` must be a live handle; `zeros` must hold `capacity` doubles
/// (it may be NULL when `capacity` is 0); `out_len` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ns_solution_zeros(
    solution: *const NsSolution,
    zeros: *mut f64,
    capacity: usize,
    out_len: *mut usize,
) -> NsStatus {
    guard(|| {
        let Some(s) = solution.as_ref() else {
            return null("solution");
        };
        if out_len.is_null() {
            return null("out_len");
        }
        if capacity > 0 && zeros.is_null() {
            return null("zeros");
        }
        let z = &s.inner.zeros;
        for (i, v) in z.iter().take(capacity).enumerate() {
            *zeros.add(i) = *v;
        }
        *out_len = z.len();
        NsStatus::Ok
    })
}
