//! C ABI for the `diqkd-bound` library.
//!
//! Callers own a `DiqkdConfig` handle created by [`diqkd_config_new`],
//! adjust it through the setters, run computations, and release it with
//! [`diqkd_config_free`]. All functions return a [`DiqkdStatus`]; on a
//! non-zero status a human-readable message is available through
//! [`diqkd_last_error_message`] (thread-local). Results are written to
//! caller-provided out parameters, which are untouched on failure.
//!
//! The header `diqkd_bound.h` is generated into `include/` by the build
//! script.

use diqkd_bound::epsnet::{NetConfig, RefineOrder};
use diqkd_bound::keyrate::{self, KeyRateParams};
use diqkd_bound::objective::{ObjectiveKind, ObjectiveSpec};
use diqkd_bound::solver::{SolverConfig, SolverStatus};
use diqkd_bound::{chsh, Error};
use std::cell::RefCell;
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status codes returned by every API call. The numeric values match the
/// CLI process exit codes where both exist.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiqkdStatus {
    Ok = 0,
    /// The requested score is not attainable.
    Infeasible = 2,
    /// Invalid configuration or argument.
    Config = 3,
    /// A numerical routine failed to converge.
    Numerical = 4,
    /// I/O failure.
    Io = 5,
    /// A required pointer argument was null.
    NullPointer = 6,
    /// An internal invariant was violated.
    Internal = 7,
}

/// How the chosen solve terminated; mirrors the library's solver status.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiqkdSolverStatus {
    Converged = 0,
    Stagnated = 1,
    MaxIters = 2,
}

impl From<SolverStatus> for DiqkdSolverStatus {
    fn from(s: SolverStatus) -> Self {
        match s {
            SolverStatus::Converged => DiqkdSolverStatus::Converged,
            SolverStatus::Stagnated => DiqkdSolverStatus::Stagnated,
            SolverStatus::MaxIters => DiqkdSolverStatus::MaxIters,
        }
    }
}

/// Objective selector for [`diqkd_config_set_objective`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiqkdObjective {
    Frobenius = 0,
    TraceNorm = 1,
}

/// Opaque configuration handle.
pub struct DiqkdConfig {
    kind: ObjectiveKind,
    lambda: f64,
    mu: f64,
    net: NetConfig,
    solver: SolverConfig,
}

impl Default for DiqkdConfig {
    fn default() -> Self {
        Self {
            kind: ObjectiveKind::Frobenius,
            lambda: 0.5,
            mu: 1e-6,
            net: NetConfig::default(),
            solver: SolverConfig::default(),
        }
    }
}

/// Certified bound for one CHSH score.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DiqkdBoundResult {
    /// Certified disturbance bound (regularizer already removed).
    pub n_star: f64,
    /// Certified lower bound on Eve's conditional entropy, in bits.
    pub c_bar: f64,
    /// Winning angle pair of the net optimization.
    pub phi_a: f64,
    pub phi_b: f64,
    /// Final per-party pessimistic corrections.
    pub delta_a: f64,
    pub delta_b: f64,
    /// Final net half-width and the relaxed score it implies.
    pub eps_final: f64,
    pub relaxed_s: f64,
    /// Number of solver invocations consumed.
    pub solves: u64,
    /// Termination status of the final solve.
    pub solver_status: DiqkdSolverStatus,
}

/// Key-rate figures for one CHSH score and protocol parameters.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DiqkdKeyRateResult {
    /// Certified entropy bound, in bits.
    pub c_bar: f64,
    /// Secret fraction after error correction.
    pub r_inf: f64,
    /// Asymptotic key rate (secret fraction times sifting probability).
    pub k_inf: f64,
    /// Sifting probability `p^2 + (1-p)^2`.
    pub sifting_probability: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Vec<u8>> = const { RefCell::new(Vec::new()) };
}

fn set_last_error(msg: &str) {
    LAST_ERROR.with(|e| {
        let mut buf = e.borrow_mut();
        buf.clear();
        buf.extend_from_slice(msg.as_bytes());
        buf.push(0);
    });
}

fn status_of(e: &Error) -> DiqkdStatus {
    match e {
        Error::Config(_) | Error::Matrix(_) => DiqkdStatus::Config,
        Error::Infeasible(_) => DiqkdStatus::Infeasible,
        Error::Numerical(_) => DiqkdStatus::Numerical,
        Error::Io(_) => DiqkdStatus::Io,
    }
}

fn run_guarded<F: FnOnce() -> Result<(), Error>>(f: F) -> DiqkdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DiqkdStatus::Ok,
        Ok(Err(e)) => {
            set_last_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic");
            DiqkdStatus::Internal
        }
    }
}

/// Latest error message for this thread as a NUL-terminated C string, or
/// null if no error has occurred. The pointer stays valid until the next
/// failing call on the same thread.
///
/// # Safety
///
/// The returned pointer must not be freed or written through.
#[no_mangle]
pub unsafe extern "C" fn diqkd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| {
        let buf = e.borrow();
        if buf.is_empty() {
            std::ptr::null()
        } else {
            buf.as_ptr() as *const c_char
        }
    })
}

/// Allocates a configuration with library defaults. Never returns null.
/// Release with [`diqkd_config_free`].
#[no_mangle]
pub extern "C" fn diqkd_config_new() -> *mut DiqkdConfig {
    Box::into_raw(Box::new(DiqkdConfig::default()))
}

/// Releases a configuration created by [`diqkd_config_new`]. A null
/// pointer is ignored.
///
/// # Safety
///
/// `cfg` must be null or a pointer previously returned by
/// [`diqkd_config_new`] that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn diqkd_config_free(cfg: *mut DiqkdConfig) {
    if !cfg.is_null() {
        drop(unsafe { Box::from_raw(cfg) });
    }
}

unsafe fn with_config(
    cfg: *mut DiqkdConfig,
    apply: impl FnOnce(&mut DiqkdConfig) -> Result<(), Error>,
) -> DiqkdStatus {
    let Some(cfg) = (unsafe { cfg.as_mut() }) else {
        set_last_error("null config");
        return DiqkdStatus::NullPointer;
    };
    run_guarded(|| apply(cfg))
}

/// Sets the weight of the first key basis; must lie in [0, 1].
///
/// # Safety
///
/// `cfg` must be a live pointer from [`diqkd_config_new`].
#[no_mangle]
pub unsafe extern "C" fn diqkd_config_set_lambda(cfg: *mut DiqkdConfig, value: f64) -> DiqkdStatus {
    unsafe {
        with_config(cfg, |c| {
            if !(0.0..=1.0).contains(&value) || !value.is_finite() {
                return Err(Error::Config(format!("lambda = {value} outside [0, 1]")));
            }
            c.lambda = value;
            Ok(())
        })
    }
}

/// Sets the Tikhonov regularization strength; must be >= 0.
///
/// # Safety
///
/// `cfg` must be a live pointer from [`diqkd_config_new`].
#[no_mangle]
pub unsafe extern "C" fn diqkd_config_set_mu(cfg: *mut DiqkdConfig, value: f64) -> DiqkdStatus {
    unsafe {
        with_config(cfg, |c| {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::Config(format!("mu = {value} must be >= 0")));
            }
            c.mu = value;
            Ok(())
        })
    }
}

/// Sets the coarse net half-width in radians. Shrinks the stopping
/// width to match when it would otherwise exceed the new half-width.
///
/// # Safety
///
/// `cfg` must be a live pointer from [`diqkd_config_new`].
#[no_mangle]
pub unsafe extern "C" fn diqkd_config_set_eps0(cfg: *mut DiqkdConfig, value: f64) -> DiqkdStatus {
    unsafe {
        with_config(cfg, |c| {
            let net =
                NetConfig { eps0: value, width_tol: value.min(c.net.width_tol), ..c.net.clone() };
            net.validate()?;
            c.net = net;
            Ok(())
        })
    }
}

/// Sets the refinement stopping half-width in radians.
///
/// # Safety
///
/// `cfg` must be a live pointer from [`diqkd_config_new`].
#[no_mangle]
pub unsafe extern "C" fn diqkd_config_set_width_tol(
    cfg: *mut DiqkdConfig,
    value: f64,
) -> DiqkdStatus {
    unsafe {
        with_config(cfg, |c| {
            let net = NetConfig { width_tol: value, ..c.net.clone() };
            net.validate()?;
            c.net = net;
            Ok(())
        })
    }
}

/// Sets the number of children per refinement level (>= 2).
///
/// # Safety
///
/// `cfg` must be a live pointer from [`diqkd_config_new`].
#[no_mangle]
pub unsafe extern "C" fn diqkd_config_set_refine_factor(
    cfg: *mut DiqkdConfig,
    value: u64,
) -> DiqkdStatus {
    unsafe {
        with_config(cfg, |c| {
            let net = NetConfig { refine_factor: value as usize, ..c.net.clone() };
            net.validate()?;
            c.net = net;
            Ok(())
        })
    }
}

/// Sets the safety multiplier on the Lipschitz estimate (>= 1).
///
/// # Safety
///
/// `cfg` must be a live pointer from [`diqkd_config_new`].
#[no_mangle]
pub unsafe extern "C" fn diqkd_config_set_lipschitz_safety(
    cfg: *mut DiqkdConfig,
    value: f64,
) -> DiqkdStatus {
    unsafe {
        with_config(cfg, |c| {
            let net = NetConfig { lipschitz_safety: value, ..c.net.clone() };
            net.validate()?;
            c.net = net;
            Ok(())
        })
    }
}

/// Sets the per-solve iteration budget; must be positive.
///
/// # Safety
///
/// `cfg` must be a live pointer from [`diqkd_config_new`].
#[no_mangle]
pub unsafe extern "C" fn diqkd_config_set_max_iters(
    cfg: *mut DiqkdConfig,
    value: u64,
) -> DiqkdStatus {
    unsafe {
        with_config(cfg, |c| {
            if value == 0 {
                return Err(Error::Config("max_iters must be positive".into()));
            }
            c.solver.max_iters = value as usize;
            Ok(())
        })
    }
}

/// Sets the RNG seed used by randomized solver components.
///
/// # Safety
///
/// `cfg` must be a live pointer from [`diqkd_config_new`].
#[no_mangle]
pub unsafe extern "C" fn diqkd_config_set_seed(cfg: *mut DiqkdConfig, value: u64) -> DiqkdStatus {
    unsafe {
        with_config(cfg, |c| {
            c.solver.seed = value;
            Ok(())
        })
    }
}

/// Selects the optimization objective.
///
/// # Safety
///
/// `cfg` must be a live pointer from [`diqkd_config_new`].
#[no_mangle]
pub unsafe extern "C" fn diqkd_config_set_objective(
    cfg: *mut DiqkdConfig,
    objective: DiqkdObjective,
) -> DiqkdStatus {
    let Some(cfg) = (unsafe { cfg.as_mut() }) else {
        set_last_error("null config");
        return DiqkdStatus::NullPointer;
    };
    cfg.kind = match objective {
        DiqkdObjective::Frobenius => ObjectiveKind::Frobenius,
        DiqkdObjective::TraceNorm => ObjectiveKind::TraceNorm,
    };
    DiqkdStatus::Ok
}

fn template_of(cfg: &DiqkdConfig) -> Result<ObjectiveSpec, Error> {
    ObjectiveSpec::new(cfg.kind, cfg.lambda, cfg.mu, 0.0).map_err(Error::Matrix)
}

fn bound_of(cfg: &DiqkdConfig, s: f64) -> Result<DiqkdBoundResult, Error> {
    let net = NetConfig { order: RefineOrder::AliceFirst, ..cfg.net.clone() };
    let cb = keyrate::cstar_bound(&template_of(cfg)?, s, &net, &cfg.solver)?;
    Ok(DiqkdBoundResult {
        n_star: cb.n_star,
        c_bar: cb.c_bar,
        phi_a: cb.bound.phi_a,
        phi_b: cb.bound.phi_b,
        delta_a: cb.bound.delta_a,
        delta_b: cb.bound.delta_b,
        eps_final: cb.bound.eps_final,
        relaxed_s: cb.bound.relaxed_s,
        solves: cb.bound.solves as u64,
        solver_status: cb.bound.status.into(),
    })
}

/// Computes the certified entropy bound at CHSH score `s` and writes it
/// to `out`.
///
/// # Safety
///
/// `cfg` must be a live pointer from [`diqkd_config_new`] and `out` must
/// point to writable memory for one `DiqkdBoundResult`.
#[no_mangle]
pub unsafe extern "C" fn diqkd_cstar_bound(
    cfg: *const DiqkdConfig,
    s: f64,
    out: *mut DiqkdBoundResult,
) -> DiqkdStatus {
    let (Some(cfg), Some(out)) = (unsafe { cfg.as_ref() }, unsafe { out.as_mut() }) else {
        set_last_error("null argument");
        return DiqkdStatus::NullPointer;
    };
    run_guarded(|| {
        *out = bound_of(cfg, s)?;
        Ok(())
    })
}

/// Computes the asymptotic key rate at CHSH score `s` for first-basis
/// probability `p` and the two basis QBERs, writing the result to `out`.
///
/// # Safety
///
/// `cfg` must be a live pointer from [`diqkd_config_new`] and `out` must
/// point to writable memory for one `DiqkdKeyRateResult`.
#[no_mangle]
pub unsafe extern "C" fn diqkd_key_rate(
    cfg: *const DiqkdConfig,
    s: f64,
    p: f64,
    qber0: f64,
    qber1: f64,
    out: *mut DiqkdKeyRateResult,
) -> DiqkdStatus {
    let (Some(cfg), Some(out)) = (unsafe { cfg.as_ref() }, unsafe { out.as_mut() }) else {
        set_last_error("null argument");
        return DiqkdStatus::NullPointer;
    };
    run_guarded(|| {
        let params = KeyRateParams::new(p, qber0, qber1)?;
        let bound = bound_of(cfg, s)?;
        let (p_sift, _) = params.basis_weights();
        *out = DiqkdKeyRateResult {
            c_bar: bound.c_bar,
            r_inf: keyrate::secret_fraction(bound.c_bar, &params),
            k_inf: keyrate::key_rate(bound.c_bar, &params),
            sifting_probability: p_sift,
        };
        Ok(())
    })
}

/// Writes the largest CHSH score attainable at the given measurement
/// angles to `out`.
///
/// # Safety
///
/// `out` must point to writable memory for one `double`.
#[no_mangle]
pub unsafe extern "C" fn diqkd_max_violation(
    phi_a: f64,
    phi_b: f64,
    out: *mut f64,
) -> DiqkdStatus {
    let Some(out) = (unsafe { out.as_mut() }) else {
        set_last_error("null argument");
        return DiqkdStatus::NullPointer;
    };
    run_guarded(|| {
        let angles = chsh::AnglePair::new(phi_a, phi_b).map_err(Error::Matrix)?;
        *out = chsh::max_violation(&angles).map_err(Error::Matrix)?;
        Ok(())
    })
}
