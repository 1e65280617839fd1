//! C ABI for `qbm`.
//!
//! Objects are opaque heap handles created by `*_new` functions and released
//! with the matching `*_free`. Every fallible call returns a [`QbmStatus`];
//! on failure [`qbm_last_error`] describes the problem for the calling thread.
//! Results are written through out-pointers and left untouched on failure.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qbm::bath::{discretize_bath, BathGrid, BathSpec};
use qbm::dynamics::{equilibrium_moments, two_time_correlation, QuadraticHamiltonian};
use qbm::imaginary_time::{crossover_temperature, CubicPotentialSpec};
use qbm::oscillator::{second_moments, sqq_quadrature, OscillatorSpec};
use qbm::thermo::ln_partition_function;
use qbm::{DampingModel, QbmError, ThermalParams};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QbmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Pole = 3,
    NonConvergence = 4,
    Overdamped = 5,
    Divergent = 6,
    InsufficientCoverage = 7,
    RouteDisagreement = 8,
    NumericalFailure = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QbmDampingKind {
    Ohmic = 0,
    Drude = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QbmGridKind {
    /// Uniform grid on (0, omega_max].
    Linear = 0,
    /// Drude tangent grid; omega_max is ignored.
    Tangent = 1,
}

/// Temperature and the constants ħ, k_B.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QbmThermal {
    pub temperature: f64,
    pub hbar: f64,
    pub kb: f64,
}

/// A damped oscillator: mass, frequency and friction model.
pub struct QbmOscillator {
    spec: OscillatorSpec,
    damping: DampingModel,
}

/// A finite bath of oscillators.
pub struct QbmBath {
    bath: BathSpec,
}

/// System plus explicit bath as a quadratic Hamiltonian.
pub struct QbmHamiltonian {
    h: QuadraticHamiltonian,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &QbmError) -> QbmStatus {
    match err {
        QbmError::Pole { .. } => QbmStatus::Pole,
        QbmError::NonConvergence { .. } | QbmError::Extrapolation(_) | QbmError::NoRoot(_) => QbmStatus::NonConvergence,
        QbmError::Overdamped { .. } => QbmStatus::Overdamped,
        QbmError::DivergentMoment(_) | QbmError::DivergentProduct(_) => QbmStatus::Divergent,
        QbmError::Domain(_) => QbmStatus::InvalidArgument,
        QbmError::InsufficientCoverage { .. } => QbmStatus::InsufficientCoverage,
        QbmError::RouteDisagreement { .. } => QbmStatus::RouteDisagreement,
        QbmError::ResonantDenominator { .. }
        | QbmError::NotPositiveDefinite(_)
        | QbmError::MatrixExponential(_)
        | QbmError::ContourFailure(_) => QbmStatus::NumericalFailure,
    }
}

enum Fail {
    Null(&'static str),
    Lib(QbmError),
}

impl From<QbmError> for Fail {
    fn from(e: QbmError) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> QbmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            QbmStatus::Ok
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            QbmStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            QbmStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

fn thermal(t: &QbmThermal) -> Result<ThermalParams, Fail> {
    Ok(ThermalParams::with_constants(t.temperature, t.hbar, t.kb)?)
}

/// Natural units at the given temperature.
#[no_mangle]
pub extern "C" fn qbm_thermal_natural(temperature: f64) -> QbmThermal {
    QbmThermal { temperature, hbar: 1.0, kb: 1.0 }
}

/// Message for the last failed call on this thread, or NULL after a success.
/// The pointer stays valid until the next call into the library.
#[no_mangle]
pub extern "C" fn qbm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qbm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// `cutoff` is read only for Drude friction.
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn qbm_oscillator_new(
    mass: f64,
    omega0: f64,
    kind: QbmDampingKind,
    gamma: f64,
    cutoff: f64,
    out_handle: *mut *mut QbmOscillator,
) -> QbmStatus {
    guard(|| {
        let slot = out(out_handle, "out_handle")?;
        let spec = OscillatorSpec::new(mass, omega0)?;
        let damping = match kind {
            QbmDampingKind::Ohmic => DampingModel::ohmic(gamma)?,
            QbmDampingKind::Drude => DampingModel::drude(gamma, cutoff)?,
        };
        *slot = Box::into_raw(Box::new(QbmOscillator { spec, damping }));
        Ok(())
    })
}

/// # Safety
/// `osc` must come from `qbm_oscillator_new` and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn qbm_oscillator_free(osc: *mut QbmOscillator) {
    if !osc.is_null() {
        drop(Box::from_raw(osc));
    }
}

/// Equilibrium ⟨q²⟩ and ⟨p²⟩.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qbm_second_moments(
    osc: *const QbmOscillator,
    thermal_params: QbmThermal,
    q2: *mut f64,
    p2: *mut f64,
) -> QbmStatus {
    guard(|| {
        let o = deref(osc, "osc")?;
        let (q2, p2) = (out(q2, "q2")?, out(p2, "p2")?);
        let m = second_moments(&o.spec, &o.damping, &thermal(&thermal_params)?, None)?;
        *q2 = m.q2;
        *p2 = m.p2;
        Ok(())
    })
}

/// Symmetrized position autocorrelation S_qq(t).
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qbm_position_correlation(
    osc: *const QbmOscillator,
    thermal_params: QbmThermal,
    t: f64,
    value: *mut f64,
) -> QbmStatus {
    guard(|| {
        let o = deref(osc, "osc")?;
        let v = out(value, "value")?;
        *v = sqq_quadrature(&o.spec, &o.damping, &thermal(&thermal_params)?, t)?;
        Ok(())
    })
}

/// ln of the reduced partition function.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qbm_ln_partition_function(
    osc: *const QbmOscillator,
    thermal_params: QbmThermal,
    value: *mut f64,
) -> QbmStatus {
    guard(|| {
        let o = deref(osc, "osc")?;
        let v = out(value, "value")?;
        *v = ln_partition_function(&o.spec, &o.damping, &thermal(&thermal_params)?, None)?;
        Ok(())
    })
}

/// Crossover temperature for the cubic potential with barrier scale `q0`,
/// using the oscillator's mass, frequency and friction.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qbm_crossover_temperature(
    osc: *const QbmOscillator,
    q0: f64,
    hbar: f64,
    kb: f64,
    value: *mut f64,
) -> QbmStatus {
    guard(|| {
        let o = deref(osc, "osc")?;
        let v = out(value, "value")?;
        let pot = CubicPotentialSpec::new(o.spec.mass, o.spec.omega0, q0)?;
        *v = crossover_temperature(&pot, &o.damping, hbar, kb)?;
        Ok(())
    })
}

/// Discretizes the oscillator's friction into `n` unit-mass bath oscillators.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qbm_bath_discretize(
    osc: *const QbmOscillator,
    n: usize,
    grid: QbmGridKind,
    omega_max: f64,
    out_handle: *mut *mut QbmBath,
) -> QbmStatus {
    guard(|| {
        let o = deref(osc, "osc")?;
        let slot = out(out_handle, "out_handle")?;
        let grid = match grid {
            QbmGridKind::Linear => BathGrid::Linear { omega_max },
            QbmGridKind::Tangent => BathGrid::Tangent,
        };
        let bath = discretize_bath(&o.damping, n, grid, o.spec.mass)?;
        *slot = Box::into_raw(Box::new(QbmBath { bath }));
        Ok(())
    })
}

/// # Safety
/// `bath` must be a valid handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn qbm_bath_len(bath: *const QbmBath) -> usize {
    bath.as_ref().map_or(0, |b| b.bath.len())
}

/// Mass, frequency and coupling of oscillator `index` (sorted by frequency).
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qbm_bath_get(
    bath: *const QbmBath,
    index: usize,
    mass: *mut f64,
    frequency: *mut f64,
    coupling: *mut f64,
) -> QbmStatus {
    guard(|| {
        let b = deref(bath, "bath")?;
        let (m, w, c) = (out(mass, "mass")?, out(frequency, "frequency")?, out(coupling, "coupling")?);
        let o = b
            .bath
            .oscillators()
            .get(index)
            .ok_or_else(|| QbmError::Domain(format!("index {index} out of range for a bath of {}", b.bath.len())))?;
        (*m, *w, *c) = (o.mass, o.frequency, o.coupling);
        Ok(())
    })
}

/// # Safety
/// `bath` must come from `qbm_bath_discretize` and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn qbm_bath_free(bath: *mut QbmBath) {
    if !bath.is_null() {
        drop(Box::from_raw(bath));
    }
}

/// Couples the oscillator's mass and frequency to `bath`; the oscillator's
/// own friction model is not used.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qbm_hamiltonian_new(
    osc: *const QbmOscillator,
    bath: *const QbmBath,
    out_handle: *mut *mut QbmHamiltonian,
) -> QbmStatus {
    guard(|| {
        let o = deref(osc, "osc")?;
        let b = deref(bath, "bath")?;
        let slot = out(out_handle, "out_handle")?;
        *slot = Box::into_raw(Box::new(QbmHamiltonian { h: QuadraticHamiltonian::new(&o.spec, Some(&b.bath)) }));
        Ok(())
    })
}

/// # Safety
/// `h` must come from `qbm_hamiltonian_new` and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn qbm_hamiltonian_free(h: *mut QbmHamiltonian) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Normal-mode ⟨q²⟩ and ⟨p²⟩ of the system coordinate.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qbm_hamiltonian_moments(
    h: *const QbmHamiltonian,
    thermal_params: QbmThermal,
    q2: *mut f64,
    p2: *mut f64,
) -> QbmStatus {
    guard(|| {
        let h = deref(h, "h")?;
        let (q2, p2) = (out(q2, "q2")?, out(p2, "p2")?);
        let m = equilibrium_moments(&h.h, &thermal(&thermal_params)?)?;
        *q2 = m.q2;
        *p2 = m.p2;
        Ok(())
    })
}

/// Symmetrized ⟨q(t)q(0)⟩ at `len` times, written to `values`.
///
/// # Safety
/// `times` and `values` must each point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qbm_hamiltonian_correlation(
    h: *const QbmHamiltonian,
    thermal_params: QbmThermal,
    times: *const f64,
    len: usize,
    values: *mut f64,
) -> QbmStatus {
    guard(|| {
        let h = deref(h, "h")?;
        if len == 0 {
            return Ok(());
        }
        if times.is_null() {
            return Err(Fail::Null("times"));
        }
        if values.is_null() {
            return Err(Fail::Null("values"));
        }
        let ts = std::slice::from_raw_parts(times, len);
        let c = two_time_correlation(&h.h, &thermal(&thermal_params)?, ts)?;
        std::slice::from_raw_parts_mut(values, len).copy_from_slice(&c);
        Ok(())
    })
}
