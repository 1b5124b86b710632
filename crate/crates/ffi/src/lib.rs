//! C ABI for the ecd-lab core: opaque handles, status codes, and plain-data
//! result structs, so other languages can drive the landscape maps, the
//! closed-form hitting times, the event-driven Monte Carlo, and the spectral
//! quantum protocol.
//!
//! Conventions:
//! - every fallible call returns [`EcdLabStatus`]; outputs go through `out`
//!   pointers that are written only on `Ok`;
//! - handles are created by `*_new`/`*_build` and released by the matching
//!   `*_free`; a null handle is tolerated by `*_free` and rejected with
//!   `NullPointer` everywhere else;
//! - the last error message is kept per thread and read back with
//!   [`ecdlab_last_error_message`].

use ecd_lab::potential::{build_maps, CoordinateMaps, Landscape};
use ecd_lab::qecd::evolve::initial_gaussian;
use ecd_lab::qecd::model::{build_spectral_model, SpectralModel};
use ecd_lab::qecd::protocol::{hitting_time, DetectionWindow};
use ecd_lab::secd::analytic;
use ecd_lab::secd::sim::{monte_carlo_hitting, SimConfig};
use ecd_lab::secd::Direction;
use ecd_lab::LabError;
use std::cell::RefCell;
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: &str) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.to_string());
}

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EcdLabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    AssumptionViolation = 3,
    DomainError = 4,
    QuadratureError = 5,
    SolverError = 6,
    ResolutionError = 7,
    Timeout = 8,
    NoHits = 9,
    NoDetection = 10,
    ConfigError = 11,
    IoError = 12,
    Panic = 13,
}

fn status_of(err: &LabError) -> EcdLabStatus {
    match err {
        LabError::AssumptionViolation(_) => EcdLabStatus::AssumptionViolation,
        LabError::DomainError(_) => EcdLabStatus::DomainError,
        LabError::QuadratureError(_) => EcdLabStatus::QuadratureError,
        LabError::SolverError(_) => EcdLabStatus::SolverError,
        LabError::ResolutionError(_) => EcdLabStatus::ResolutionError,
        LabError::Timeout(_) => EcdLabStatus::Timeout,
        LabError::NoHits(_) => EcdLabStatus::NoHits,
        LabError::NoDetection => EcdLabStatus::NoDetection,
        LabError::ConfigError(_) => EcdLabStatus::ConfigError,
        LabError::Io(_) => EcdLabStatus::IoError,
    }
}

fn guarded(f: impl FnOnce() -> EcdLabStatus) -> EcdLabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("panic inside ecd-lab");
            EcdLabStatus::Panic
        }
    }
}

fn direction_of(u0: i32) -> Option<Direction> {
    match u0 {
        1 => Some(Direction::Plus),
        -1 => Some(Direction::Minus),
        _ => None,
    }
}

/// Opaque landscape handle.
pub struct EcdLabLandscape {
    inner: Landscape,
}

/// Opaque coordinate-maps handle (one landscape at one energy).
pub struct EcdLabMaps {
    inner: CoordinateMaps,
}

/// Opaque spectral-model handle.
pub struct EcdLabSpectralModel {
    inner: SpectralModel,
}

/// Closed-form hitting-time decomposition.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct EcdLabHittingBreakdown {
    pub t_det: f64,
    pub barrier_term: f64,
    pub tail_term: f64,
    pub total: f64,
    pub q: f64,
    pub l_classical: f64,
    pub tail_left: f64,
    pub tail_right: f64,
}

/// Monte Carlo parameters.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct EcdLabSimParams {
    pub lambda_c: f64,
    /// initial direction: +1 or -1
    pub u0: i32,
    pub seed: u64,
    pub max_s: f64,
    pub n_traj: usize,
    /// hitting window half-width; pass a negative value for exact hitting
    pub window_sigma: f64,
    /// deep-excursion cutoff share; 0 disables, 0.05 is the default
    pub teleport_rel: f64,
}

/// Monte Carlo summary.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct EcdLabMcSummary {
    pub mean_t: f64,
    pub se_t: f64,
    pub n_hits: usize,
    pub n_timeouts: usize,
}

/// Quantum hitting-protocol summary.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct EcdLabQuantumHit {
    /// min over τ of τ/p̄_σ(τ) in the e^{−iHt/ħ} clock
    pub t_hit_numeric: f64,
    /// (I₀²/ħ)√(V₀/V₁)
    pub t_bound: f64,
    pub implied_c: f64,
    /// λ_q²ħ² × t_hit_numeric
    pub t_hit_rescaled: f64,
    pub tau_star: f64,
    pub bracket_interior: bool,
}

/// Copy the last error message of this thread into `buf` (truncated,
/// always NUL-terminated). Returns the untruncated length.
///
/// # Safety
/// `buf` must point to at least `len` writable bytes when `len > 0`.
#[no_mangle]
pub unsafe extern "C" fn ecdlab_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Create a symmetric quartic landscape V = ω²/8a²(θ²−a²)² + V₀.
///
/// # Safety
/// `out` must be a valid pointer; on `Ok` it receives an owned handle that
/// must be released with [`ecdlab_landscape_free`].
#[no_mangle]
pub unsafe extern "C" fn ecdlab_landscape_quartic_new(
    a: f64,
    omega: f64,
    v0: f64,
    out: *mut *mut EcdLabLandscape,
) -> EcdLabStatus {
    if out.is_null() {
        return EcdLabStatus::NullPointer;
    }
    guarded(|| match Landscape::quartic(a, omega, v0) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(EcdLabLandscape { inner }));
            EcdLabStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    })
}

/// Release a landscape handle. Null is a no-op.
///
/// # Safety
/// `lnd` must be null or a handle from [`ecdlab_landscape_quartic_new`] not
/// yet freed.
#[no_mangle]
pub unsafe extern "C" fn ecdlab_landscape_free(lnd: *mut EcdLabLandscape) {
    if !lnd.is_null() {
        drop(Box::from_raw(lnd));
    }
}

/// Evaluate V(θ).
///
/// # Safety
/// `lnd` must be a live landscape handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ecdlab_landscape_eval_v(
    lnd: *const EcdLabLandscape,
    theta: f64,
    out: *mut f64,
) -> EcdLabStatus {
    if lnd.is_null() || out.is_null() {
        return EcdLabStatus::NullPointer;
    }
    guarded(|| match (*lnd).inner.eval_v(theta) {
        Ok(v) => {
            *out = v;
            EcdLabStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    })
}

/// Momentum p(θ) = √(E/V(θ)).
///
/// # Safety
/// `lnd` must be a live landscape handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ecdlab_landscape_momentum(
    lnd: *const EcdLabLandscape,
    energy: f64,
    theta: f64,
    out: *mut f64,
) -> EcdLabStatus {
    if lnd.is_null() || out.is_null() {
        return EcdLabStatus::NullPointer;
    }
    guarded(|| match (*lnd).inner.momentum_p(energy, theta) {
        Ok(v) => {
            *out = v;
            EcdLabStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    })
}

/// Build the quadrature-backed coordinate maps for one (landscape, E) pair.
///
/// # Safety
/// `lnd` must be a live landscape handle; `out` receives an owned handle to
/// release with [`ecdlab_maps_free`].
#[no_mangle]
pub unsafe extern "C" fn ecdlab_maps_build(
    lnd: *const EcdLabLandscape,
    energy: f64,
    quad_tol: f64,
    out: *mut *mut EcdLabMaps,
) -> EcdLabStatus {
    if lnd.is_null() || out.is_null() {
        return EcdLabStatus::NullPointer;
    }
    guarded(|| match build_maps(&(*lnd).inner, energy, quad_tol) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(EcdLabMaps { inner }));
            EcdLabStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    })
}

/// Release a maps handle. Null is a no-op.
///
/// # Safety
/// `maps` must be null or a handle from [`ecdlab_maps_build`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ecdlab_maps_free(maps: *mut EcdLabMaps) {
    if !maps.is_null() {
        drop(Box::from_raw(maps));
    }
}

/// L = φ(a_right) − φ(a_left).
///
/// # Safety
/// `maps` must be a live maps handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ecdlab_maps_l_classical(
    maps: *const EcdLabMaps,
    out: *mut f64,
) -> EcdLabStatus {
    if maps.is_null() || out.is_null() {
        return EcdLabStatus::NullPointer;
    }
    *out = (*maps).inner.l_classical;
    EcdLabStatus::Ok
}

/// Total Liouville length I(−∞, ∞).
///
/// # Safety
/// `maps` must be a live maps handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ecdlab_maps_l_y(maps: *const EcdLabMaps, out: *mut f64) -> EcdLabStatus {
    if maps.is_null() || out.is_null() {
        return EcdLabStatus::NullPointer;
    }
    *out = (*maps).inner.l_y;
    EcdLabStatus::Ok
}

/// Distance integral I(θ₁, θ₂) = y(θ₂) − y(θ₁).
///
/// # Safety
/// `maps` must be a live maps handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ecdlab_maps_distance_i(
    maps: *const EcdLabMaps,
    theta1: f64,
    theta2: f64,
    out: *mut f64,
) -> EcdLabStatus {
    if maps.is_null() || out.is_null() {
        return EcdLabStatus::NullPointer;
    }
    guarded(|| match (*maps).inner.distance_i(theta1, theta2) {
        Ok(v) => {
            *out = v;
            EcdLabStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    })
}

/// Telegraph crossing probability q = 1/(1 + λ_c L).
#[no_mangle]
pub extern "C" fn ecdlab_crossing_prob(lambda_c: f64, l: f64) -> f64 {
    if lambda_c < 0.0 || l <= 0.0 {
        return f64::NAN;
    }
    analytic::crossing_prob(lambda_c, l)
}

/// Expected legs to hit: 2/q − 1 from (0,+) (`start_sign` = +1) or 2/q from
/// (0,−) (`start_sign` = −1). NaN on invalid arguments.
#[no_mangle]
pub extern "C" fn ecdlab_expected_legs(q: f64, start_sign: i32) -> f64 {
    if !(q > 0.0 && q <= 1.0) {
        return f64::NAN;
    }
    match direction_of(start_sign) {
        Some(d) => analytic::expected_legs(q, d),
        None => f64::NAN,
    }
}

/// Exponential integral E₁(x), x ≥ 0.
#[no_mangle]
pub extern "C" fn ecdlab_exp_e1(x: f64) -> f64 {
    if x < 0.0 {
        return f64::NAN;
    }
    ecd_lab::special::exp_e1(x)
}

/// Closed-form expected hitting time decomposition from the local well.
///
/// # Safety
/// `maps` must be a live maps handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ecdlab_hitting_breakdown(
    maps: *const EcdLabMaps,
    lambda_c: f64,
    u0: i32,
    out: *mut EcdLabHittingBreakdown,
) -> EcdLabStatus {
    if maps.is_null() || out.is_null() {
        return EcdLabStatus::NullPointer;
    }
    let Some(dir) = direction_of(u0) else {
        set_error("u0 must be +1 or -1");
        return EcdLabStatus::InvalidArgument;
    };
    guarded(
        || match analytic::hitting_time_general(&(*maps).inner, lambda_c, dir) {
            Ok(hb) => {
                *out = EcdLabHittingBreakdown {
                    t_det: hb.t_det,
                    barrier_term: hb.barrier_term,
                    tail_term: hb.tail_term,
                    total: hb.total,
                    q: hb.q,
                    l_classical: hb.l_classical,
                    tail_left: hb.tail_left,
                    tail_right: hb.tail_right,
                };
                EcdLabStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        },
    )
}

/// Event-driven Monte Carlo hitting-time estimate.
///
/// # Safety
/// `maps`, `params`, `out` must be valid; `maps` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ecdlab_mc_hitting(
    maps: *const EcdLabMaps,
    params: *const EcdLabSimParams,
    out: *mut EcdLabMcSummary,
) -> EcdLabStatus {
    if maps.is_null() || params.is_null() || out.is_null() {
        return EcdLabStatus::NullPointer;
    }
    let p = *params;
    let Some(dir) = direction_of(p.u0) else {
        set_error("u0 must be +1 or -1");
        return EcdLabStatus::InvalidArgument;
    };
    guarded(|| {
        let cfg = SimConfig {
            lambda_c: p.lambda_c,
            energy: (*maps).inner.energy_e,
            u0: dir,
            seed: p.seed,
            max_s: p.max_s,
            n_traj: p.n_traj,
            quad_tol: (*maps).inner.quad_tol,
            window_sigma: if p.window_sigma > 0.0 {
                Some(p.window_sigma)
            } else {
                None
            },
            teleport_rel: p.teleport_rel,
        };
        match monte_carlo_hitting(&(*maps).inner, &cfg) {
            Ok(rep) => {
                *out = EcdLabMcSummary {
                    mean_t: rep.mean_t,
                    se_t: rep.se_t,
                    n_hits: rep.n_hits,
                    n_timeouts: rep.n_timeouts,
                };
                EcdLabStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Build the Liouville spectral model.
///
/// # Safety
/// `maps` must be a live maps handle; `out` receives an owned handle to
/// release with [`ecdlab_spectral_free`].
#[no_mangle]
pub unsafe extern "C" fn ecdlab_spectral_build(
    maps: *const EcdLabMaps,
    hbar: f64,
    lambda_q: f64,
    n_grid: usize,
    out: *mut *mut EcdLabSpectralModel,
) -> EcdLabStatus {
    if maps.is_null() || out.is_null() {
        return EcdLabStatus::NullPointer;
    }
    guarded(
        || match build_spectral_model(&(*maps).inner, hbar, lambda_q, n_grid) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(EcdLabSpectralModel { inner }));
                EcdLabStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        },
    )
}

/// Release a spectral-model handle. Null is a no-op.
///
/// # Safety
/// `model` must be null or a handle from [`ecdlab_spectral_build`] not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn ecdlab_spectral_free(model: *mut EcdLabSpectralModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Energy E_n of mode n (0-based ascending).
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ecdlab_spectral_eigenvalue(
    model: *const EcdLabSpectralModel,
    n: usize,
    out: *mut f64,
) -> EcdLabStatus {
    if model.is_null() || out.is_null() {
        return EcdLabStatus::NullPointer;
    }
    let m = &(*model).inner;
    if n >= m.n_grid {
        set_error("mode index out of range");
        return EcdLabStatus::InvalidArgument;
    }
    *out = m.energy(n);
    EcdLabStatus::Ok
}

/// WKB cut-off energy of the model.
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ecdlab_spectral_e_cut(
    model: *const EcdLabSpectralModel,
    out: *mut f64,
) -> EcdLabStatus {
    if model.is_null() || out.is_null() {
        return EcdLabStatus::NullPointer;
    }
    *out = (*model).inner.e_cut;
    EcdLabStatus::Ok
}

/// Run the randomized-time hitting protocol with the standard packet
/// (zero-momentum Gaussian of width α√ħ at the local well, detection window
/// of the same width at the global well).
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ecdlab_quantum_hit(
    model: *const EcdLabSpectralModel,
    alpha: f64,
    out: *mut EcdLabQuantumHit,
) -> EcdLabStatus {
    if model.is_null() || out.is_null() {
        return EcdLabStatus::NullPointer;
    }
    guarded(|| {
        let m = &(*model).inner;
        let lnd = m.maps().landscape();
        let sigma = alpha * m.hbar.sqrt();
        let psi0 = match initial_gaussian(m, lnd.a_left, alpha) {
            Ok(p) => p,
            Err(e) => {
                set_error(&e.to_string());
                return status_of(&e);
            }
        };
        let window = DetectionWindow {
            center: lnd.a_right,
            sigma,
        };
        match hitting_time(m, &psi0, window) {
            Ok(rep) => {
                *out = EcdLabQuantumHit {
                    t_hit_numeric: rep.t_hit_numeric,
                    t_bound: rep.t_bound,
                    implied_c: rep.implied_c,
                    t_hit_rescaled: rep.t_hit_rescaled,
                    tau_star: rep.tau_star,
                    bracket_interior: rep.bracket_interior,
                };
                EcdLabStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}
