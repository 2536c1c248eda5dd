//! C ABI over the doublon library.
//!
//! Every call returns a [`DoublonStatus`]; `DoublonOk` is zero. On failure a
//! thread-local message is kept and can be read with
//! [`doublon_last_error_message`]. Handles are opaque and must be released
//! with their `_free` function; passing NULL to a `_free` is a no-op.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use doublon::model::{Boundary, WaveguideParams};
use doublon::reduced::spbs_length;
use doublon::spectrum::{classify_doublons, two_excitation_spectrum, HowMany, SpectrumResult, StateClass};
use doublon::theory::{band_edges_k0, default_k_grid, green_f, solve_bands, BandStructure, Channel};
use doublon::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DoublonStatus {
    DoublonOk = 0,
    DoublonNullPointer = 1,
    DoublonInvalidArgument = 2,
    /// Frequency or energy inside a continuum where the quantity is undefined.
    DoublonResonance = 3,
    DoublonOutOfRange = 4,
    DoublonNumerical = 5,
    DoublonPanic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DoublonBoundary {
    DoublonOpen = 0,
    DoublonPeriodic = 1,
}

/// Opaque lattice parameters.
pub struct DoublonParams(WaveguideParams);

/// Opaque band structure on a momentum grid.
pub struct DoublonBands(BandStructure);

/// Opaque two-photon spectrum.
pub struct DoublonSpectrum(SpectrumResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DoublonStatus {
    match e {
        Error::InvalidParameter { .. } | Error::DimensionMismatch { .. } | Error::Config(_) | Error::SiteOutOfRange { .. } => {
            DoublonStatus::DoublonInvalidArgument
        }
        Error::InsideBand { .. } | Error::Resonance { .. } | Error::PairInBand { .. } | Error::Regime(_) => {
            DoublonStatus::DoublonResonance
        }
        _ => DoublonStatus::DoublonNumerical,
    }
}

/// Runs `f`, converting errors and panics into a status plus message.
fn guard(f: impl FnOnce() -> Result<(), (DoublonStatus, String)>) -> DoublonStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DoublonStatus::DoublonOk,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            DoublonStatus::DoublonPanic
        }
    }
}

fn lib(e: Error) -> (DoublonStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (DoublonStatus, String) {
    (DoublonStatus::DoublonNullPointer, format!("{what} is NULL"))
}

/// # Safety
/// `p` must be NULL or a live handle from this library.
unsafe fn params<'a>(p: *const DoublonParams) -> Result<&'a WaveguideParams, (DoublonStatus, String)> {
    p.as_ref().map(|h| &h.0).ok_or_else(|| null("params"))
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn doublon_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// `boundary` is a [`DoublonBoundary`] value.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn doublon_params_new(
    j: f64,
    u_c: f64,
    u_m: f64,
    n: usize,
    boundary: c_int,
    out: *mut *mut DoublonParams,
) -> DoublonStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let b = match boundary {
            x if x == DoublonBoundary::DoublonOpen as c_int => Boundary::Open,
            x if x == DoublonBoundary::DoublonPeriodic as c_int => Boundary::Periodic,
            x => return Err((DoublonStatus::DoublonInvalidArgument, format!("boundary {x}"))),
        };
        let p = WaveguideParams::new(j, u_c, u_m, n, b).map_err(lib)?;
        *out = Box::into_raw(Box::new(DoublonParams(p)));
        Ok(())
    })
}

/// # Safety
/// `p` must be NULL or a handle from [`doublon_params_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn doublon_params_free(p: *mut DoublonParams) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Closed-form band edges `E_-(pi/2)`, `E_+(pi/2)`.
///
/// # Safety
/// `p` must be a live handle; `e_minus` and `e_plus` writable.
#[no_mangle]
pub unsafe extern "C" fn doublon_band_edges(p: *const DoublonParams, e_minus: *mut f64, e_plus: *mut f64) -> DoublonStatus {
    guard(|| {
        let p = params(p)?;
        if e_minus.is_null() || e_plus.is_null() {
            return Err(null("output"));
        }
        let (lo, hi) = band_edges_k0(p);
        *e_minus = lo;
        *e_plus = hi;
        Ok(())
    })
}

/// Solves both branches on `k_count` momenta spanning `[0, pi]`.
///
/// # Safety
/// `p` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn doublon_bands_solve(p: *const DoublonParams, k_count: usize, out: *mut *mut DoublonBands) -> DoublonStatus {
    guard(|| {
        let p = params(p)?;
        if out.is_null() {
            return Err(null("out"));
        }
        if k_count == 0 {
            return Err((DoublonStatus::DoublonInvalidArgument, "k_count must be at least 1".into()));
        }
        let b = solve_bands(p, &default_k_grid(k_count)).map_err(lib)?;
        *out = Box::into_raw(Box::new(DoublonBands(b)));
        Ok(())
    })
}

/// # Safety
/// `b` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn doublon_bands_len(b: *const DoublonBands) -> usize {
    b.as_ref().map_or(0, |b| b.0.k.len())
}

/// Point `i`; a branch absent at that momentum is reported as NaN.
///
/// # Safety
/// `b` must be a live handle; the outputs writable.
#[no_mangle]
pub unsafe extern "C" fn doublon_bands_get(
    b: *const DoublonBands,
    i: usize,
    k: *mut f64,
    e_minus: *mut f64,
    e_plus: *mut f64,
) -> DoublonStatus {
    guard(|| {
        let b = &b.as_ref().ok_or_else(|| null("bands"))?.0;
        if k.is_null() || e_minus.is_null() || e_plus.is_null() {
            return Err(null("output"));
        }
        if i >= b.k.len() {
            return Err((DoublonStatus::DoublonOutOfRange, format!("index {i} of {}", b.k.len())));
        }
        *k = b.k[i];
        *e_minus = b.e_minus[i].unwrap_or(f64::NAN);
        *e_plus = b.e_plus[i].unwrap_or(f64::NAN);
        Ok(())
    })
}

/// Band curvature `alpha` at the lower edge.
///
/// # Safety
/// `b` must be a live handle; `alpha` writable.
#[no_mangle]
pub unsafe extern "C" fn doublon_bands_alpha(b: *const DoublonBands, alpha: *mut f64) -> DoublonStatus {
    guard(|| {
        let b = &b.as_ref().ok_or_else(|| null("bands"))?.0;
        if alpha.is_null() {
            return Err(null("alpha"));
        }
        *alpha = b.alpha().ok_or((DoublonStatus::DoublonNumerical, "no curvature fit available".to_string()))?;
        Ok(())
    })
}

/// # Safety
/// `b` must be NULL or a handle from [`doublon_bands_solve`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn doublon_bands_free(b: *mut DoublonBands) {
    if !b.is_null() {
        drop(Box::from_raw(b));
    }
}

/// Full two-photon spectrum, states classified with `bunching_threshold`.
///
/// # Safety
/// `p` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn doublon_spectrum_compute(
    p: *const DoublonParams,
    bunching_threshold: f64,
    out: *mut *mut DoublonSpectrum,
) -> DoublonStatus {
    guard(|| {
        let p = params(p)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let s = two_excitation_spectrum(p, HowMany::All, false).map_err(lib)?;
        *out = Box::into_raw(Box::new(DoublonSpectrum(classify_doublons(s, bunching_threshold))));
        Ok(())
    })
}

/// # Safety
/// `s` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn doublon_spectrum_len(s: *const DoublonSpectrum) -> usize {
    s.as_ref().map_or(0, |s| s.0.len())
}

/// Copies up to `cap` ascending eigenvalues into `buf`; `written` receives the count.
///
/// # Safety
/// `s` must be a live handle; `buf` must hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn doublon_spectrum_eigenvalues(
    s: *const DoublonSpectrum,
    buf: *mut f64,
    cap: usize,
    written: *mut usize,
) -> DoublonStatus {
    guard(|| {
        let s = &s.as_ref().ok_or_else(|| null("spectrum"))?.0;
        if (buf.is_null() && cap > 0) || written.is_null() {
            return Err(null("output"));
        }
        let n = cap.min(s.len());
        if n > 0 {
            ptr::copy_nonoverlapping(s.eigenvalues.as_ptr(), buf, n);
        }
        *written = n;
        Ok(())
    })
}

/// Number of states classified as doublons.
///
/// # Safety
/// `s` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn doublon_spectrum_doublon_count(s: *const DoublonSpectrum) -> usize {
    s.as_ref().map_or(0, |s| s.0.class.iter().filter(|c| **c == Some(StateClass::Doublon)).count())
}

/// # Safety
/// `s` must be NULL or a handle from [`doublon_spectrum_compute`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn doublon_spectrum_free(s: *mut DoublonSpectrum) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Relative-motion Green function `f_channel(K, E, r)`; `channel` is 0 or 1.
///
/// # Safety
/// `p` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn doublon_green_f(
    p: *const DoublonParams,
    k: f64,
    e: f64,
    r: i64,
    channel: c_int,
    out: *mut f64,
) -> DoublonStatus {
    guard(|| {
        let p = params(p)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let ch = u8::try_from(channel)
            .map_err(|_| (DoublonStatus::DoublonInvalidArgument, format!("channel {channel}")))
            .and_then(|c| Channel::from_index(c).map_err(lib))?;
        *out = green_f(k, e, r, ch, p).map_err(lib)?;
        Ok(())
    })
}

/// Single-photon bound-state length `L_I` of an emitter at `omega`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn doublon_spbs_length(omega: f64, j: f64, out: *mut f64) -> DoublonStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = spbs_length(omega, j).map_err(lib)?;
        Ok(())
    })
}
