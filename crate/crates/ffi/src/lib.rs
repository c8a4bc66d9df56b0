//! C ABI over `quantum_bertrand`.
//!
//! Every fallible function returns a [`QbStatus`] and writes results through
//! out-pointers. On failure the message is kept per thread and can be read
//! with [`qb_last_error_message`]. Handles are opaque and must be released
//! with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, c_void, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use quantum_bertrand::checks;
use quantum_bertrand::family::{classify_alpha, couplings, AlphaClass, FamilyParams, PhysicalConstants};
use quantum_bertrand::oracle::{fd_spectrum, numerov_eigen, RadialGrid};
use quantum_bertrand::pct::pct_energy;
use quantum_bertrand::spectrum::{
    coulomb_level, energy_coulomb, energy_oscillator, epsilon_n, oscillator_level, Branch, Wavefunction,
};
use quantum_bertrand::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    NegativeDiscriminant = 3,
    NotNormalizable = 4,
    DivergentNorm = 5,
    GridTooCoarse = 6,
    NoSignChange = 7,
    WrongAlpha = 8,
    DegenerateCoefficient = 9,
    ComplexRoots = 10,
    TurningPointOnGrid = 11,
    BufferTooSmall = 12,
    Panic = 13,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QbBranch {
    Plus = 0,
    Minus = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QbAlphaClass {
    Coulomb = 0,
    Oscillator = 1,
    NotConstantIndependent = 2,
}

/// hbar, mass, Coulomb strength and oscillator frequency.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QbConstants {
    pub hbar: f64,
    pub mass: f64,
    pub coulomb_strength: f64,
    pub omega: f64,
}

/// Couplings of `V(r) = E + g1 r^e1 + g2 r^e2 + g3 r^e3`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QbCouplings {
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
}

/// Opaque family member.
pub struct QbFamily(FamilyParams);

/// Opaque radial wavefunction.
pub struct QbWavefunction(Wavefunction);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("error message contained NUL").expect("static"));
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QbStatus {
    match e {
        Error::InvalidParameter(_) => QbStatus::InvalidParameter,
        Error::NegativeDiscriminant(_) => QbStatus::NegativeDiscriminant,
        Error::NotNormalizable => QbStatus::NotNormalizable,
        Error::DivergentNorm { .. } => QbStatus::DivergentNorm,
        Error::GridTooCoarse { .. } => QbStatus::GridTooCoarse,
        Error::NoSignChange { .. } => QbStatus::NoSignChange,
        Error::WrongAlpha(_) => QbStatus::WrongAlpha,
        Error::DegenerateCoefficient(_) => QbStatus::DegenerateCoefficient,
        Error::ComplexRoots(_) => QbStatus::ComplexRoots,
        Error::TurningPointOnGrid(_) => QbStatus::TurningPointOnGrid,
    }
}

enum Failure {
    Lib(Error),
    Status(QbStatus, String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn null(name: &str) -> Failure {
    Failure::Status(QbStatus::NullPointer, format!("{name} is null"))
}

/// Runs `f`, records any error or panic, and maps it to a status.
fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> QbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QbStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("panic inside quantum_bertrand".to_string());
            QbStatus::Panic
        }
    }
}

fn constants(ptr: *const QbConstants) -> PhysicalConstants {
    // SAFETY: callers pass either null or a valid pointer.
    match unsafe { ptr.as_ref() } {
        None => PhysicalConstants::natural(),
        Some(c) => PhysicalConstants {
            hbar: c.hbar,
            mass: c.mass,
            coulomb_strength: c.coulomb_strength,
            omega: c.omega,
        },
    }
}

fn write<T>(out: *mut T, value: T, name: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(name));
    }
    // SAFETY: non-null and, per the API contract, valid for writes.
    unsafe { out.write(value) };
    Ok(())
}

fn boxed<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    write(out, Box::into_raw(Box::new(value)), "out")
}

fn family_ref<'a>(ptr: *const QbFamily) -> Result<&'a FamilyParams, Failure> {
    // SAFETY: handles come from qb_family_* constructors and are not yet freed.
    unsafe { ptr.as_ref() }.map(|f| &f.0).ok_or_else(|| null("family"))
}

fn branch(b: QbBranch) -> Branch {
    match b {
        QbBranch::Plus => Branch::Plus,
        QbBranch::Minus => Branch::Minus,
    }
}

/// Natural units: all constants 1.
#[no_mangle]
pub extern "C" fn qb_constants_natural() -> QbConstants {
    QbConstants {
        hbar: 1.0,
        mass: 1.0,
        coulomb_strength: 1.0,
        omega: 1.0,
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Length in bytes of the last error message on this thread, excluding the
/// terminating NUL; 0 when there is none.
#[no_mangle]
pub extern "C" fn qb_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(0, |s| s.as_bytes().len()))
}

/// Copies the last error message into `buf` (NUL-terminated). Returns
/// `BufferTooSmall` when `len` cannot hold it.
///
/// # Safety
/// `buf` must be valid for `len` bytes of writes.
#[no_mangle]
pub unsafe extern "C" fn qb_last_error_message(buf: *mut c_char, len: usize) -> QbStatus {
    if buf.is_null() {
        return QbStatus::NullPointer;
    }
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.as_ref().map_or(&b""[..], |s| s.as_bytes());
        if bytes.len() + 1 > len {
            return QbStatus::BufferTooSmall;
        }
        // SAFETY: buf holds at least bytes.len() + 1 bytes.
        unsafe {
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, bytes.len());
            *buf.add(bytes.len()) = 0;
        }
        QbStatus::Ok
    })
}

/// Builds a family member. `constants` may be null for natural units.
///
/// # Safety
/// `constants` is null or valid; `out` is valid for a write.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn qb_family_new(
    alpha: f64,
    a: f64,
    b: f64,
    c: f64,
    epsilon: f64,
    lambda: f64,
    l: f64,
    constants_ptr: *const QbConstants,
    out: *mut *mut QbFamily,
) -> QbStatus {
    guard(|| {
        let p = FamilyParams::new(alpha, a, b, c, epsilon, lambda, l, constants(constants_ptr))?;
        boxed(out, QbFamily(p))
    })
}

/// Coulomb member for level (n, l) with epsilon on the decaying branch.
///
/// # Safety
/// As for [`qb_family_new`].
#[no_mangle]
pub unsafe extern "C" fn qb_family_coulomb(
    n: u32,
    l: u32,
    constants_ptr: *const QbConstants,
    lambda: f64,
    out: *mut *mut QbFamily,
) -> QbStatus {
    guard(|| boxed(out, QbFamily(coulomb_level(n, l, constants(constants_ptr), lambda)?)))
}

/// Oscillator member for level (n, l).
///
/// # Safety
/// As for [`qb_family_new`].
#[no_mangle]
pub unsafe extern "C" fn qb_family_oscillator(
    n: u32,
    l: u32,
    constants_ptr: *const QbConstants,
    lambda: f64,
    out: *mut *mut QbFamily,
) -> QbStatus {
    guard(|| boxed(out, QbFamily(oscillator_level(n, l, constants(constants_ptr), lambda)?)))
}

/// Releases a family handle; null is ignored.
///
/// # Safety
/// `family` is null or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qb_family_free(family: *mut QbFamily) {
    if !family.is_null() {
        // SAFETY: created by Box::into_raw in a constructor.
        drop(unsafe { Box::from_raw(family) });
    }
}

/// Replaces epsilon by `eps_n` on the given branch.
///
/// # Safety
/// `family` is a live handle.
#[no_mangle]
pub unsafe extern "C" fn qb_family_set_level(family: *mut QbFamily, n: u32, br: QbBranch) -> QbStatus {
    guard(|| {
        // SAFETY: live handle per contract.
        let f = unsafe { family.as_mut() }.ok_or_else(|| null("family"))?;
        let eps = epsilon_n(&f.0, n, branch(br))?;
        f.0 = f.0.with_epsilon(eps);
        Ok(())
    })
}

/// # Safety
/// `family` is a live handle; `out` is valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qb_family_epsilon(family: *const QbFamily, out: *mut f64) -> QbStatus {
    guard(|| write(out, family_ref(family)?.epsilon, "out"))
}

/// # Safety
/// `family` is a live handle; `out` is valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qb_family_couplings(family: *const QbFamily, out: *mut QbCouplings) -> QbStatus {
    guard(|| {
        let cs = couplings(family_ref(family)?);
        let [e1, e2, e3] = cs.exponents;
        write(
            out,
            QbCouplings {
                g1: cs.g1,
                g2: cs.g2,
                g3: cs.g3,
                e1,
                e2,
                e3,
            },
            "out",
        )
    })
}

/// `V(r)` at the given energy.
///
/// # Safety
/// `family` is a live handle; `out` is valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qb_family_potential(family: *const QbFamily, energy: f64, r: f64, out: *mut f64) -> QbStatus {
    guard(|| write(out, couplings(family_ref(family)?).potential(energy, r), "out"))
}

/// Energy of the exponential-map potential built from this member.
///
/// # Safety
/// `family` is a live handle; `out` is valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qb_family_pct_energy(family: *const QbFamily, out: *mut f64) -> QbStatus {
    guard(|| write(out, pct_energy(family_ref(family)?)?, "out"))
}

/// # Safety
/// `constants` is null or valid; `out` is valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qb_energy_coulomb(
    n: u32,
    l: u32,
    constants_ptr: *const QbConstants,
    lambda: f64,
    out: *mut f64,
) -> QbStatus {
    guard(|| write(out, energy_coulomb(n, l, &constants(constants_ptr), lambda)?.energy, "out"))
}

/// # Safety
/// `constants` is null or valid; `out` is valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qb_energy_oscillator(n: u32, l: u32, constants_ptr: *const QbConstants, out: *mut f64) -> QbStatus {
    guard(|| write(out, energy_oscillator(n, l, &constants(constants_ptr))?.energy, "out"))
}

#[no_mangle]
pub extern "C" fn qb_classify_alpha(alpha: f64) -> QbAlphaClass {
    match classify_alpha(alpha) {
        AlphaClass::Coulomb => QbAlphaClass::Coulomb,
        AlphaClass::Oscillator => QbAlphaClass::Oscillator,
        AlphaClass::NotConstantIndependent => QbAlphaClass::NotConstantIndependent,
    }
}

/// Wavefunction of level `n` for the family's current parameters.
///
/// # Safety
/// `family` is a live handle; `out` is valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qb_wavefunction_new(family: *const QbFamily, n: u32, out: *mut *mut QbWavefunction) -> QbStatus {
    guard(|| boxed(out, QbWavefunction(Wavefunction::new(*family_ref(family)?, n)?)))
}

/// Normalizes in place over `[r_min, r_max]` with `n_points` nodes.
///
/// # Safety
/// `wf` is a live handle.
#[no_mangle]
pub unsafe extern "C" fn qb_wavefunction_normalize(
    wf: *mut QbWavefunction,
    r_min: f64,
    r_max: f64,
    n_points: usize,
) -> QbStatus {
    guard(|| {
        // SAFETY: live handle per contract.
        let w = unsafe { wf.as_mut() }.ok_or_else(|| null("wavefunction"))?;
        let grid = RadialGrid::new(r_min, r_max, n_points)?;
        w.0 = w.0.normalize(&grid)?;
        Ok(())
    })
}

/// `psi(r)`.
///
/// # Safety
/// `wf` is a live handle; `out` is valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qb_wavefunction_eval(wf: *const QbWavefunction, r: f64, out: *mut f64) -> QbStatus {
    guard(|| {
        // SAFETY: live handle per contract.
        let w = unsafe { wf.as_ref() }.ok_or_else(|| null("wavefunction"))?;
        write(out, w.0.eval_r(r), "out")
    })
}

/// # Safety
/// `wf` is null or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qb_wavefunction_free(wf: *mut QbWavefunction) {
    if !wf.is_null() {
        // SAFETY: created by Box::into_raw in qb_wavefunction_new.
        drop(unsafe { Box::from_raw(wf) });
    }
}

/// Lowest `count` finite-difference levels of `V` into `energies[0..count]`.
/// `potential(r, user_data)` returns `V(r)` in natural units.
///
/// # Safety
/// `energies` is valid for `count` writes; `potential` is safe to call with
/// `user_data`.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn qb_fd_spectrum(
    potential: Option<extern "C" fn(f64, *mut c_void) -> f64>,
    user_data: *mut c_void,
    l: u32,
    r_min: f64,
    r_max: f64,
    n_points: usize,
    count: usize,
    energies: *mut f64,
) -> QbStatus {
    guard(|| {
        let v = potential.ok_or_else(|| null("potential"))?;
        if energies.is_null() {
            return Err(null("energies"));
        }
        let grid = RadialGrid::new(r_min, r_max, n_points)?;
        let pairs = fd_spectrum(|r| v(r, user_data), l, &grid, count)?;
        for (i, p) in pairs.iter().enumerate() {
            // SAFETY: energies holds count values.
            unsafe { *energies.add(i) = p.energy };
        }
        Ok(())
    })
}

/// Numerov shooting for the single level inside `[e_lo, e_hi]`.
///
/// # Safety
/// `out` is valid for a write; `potential` is safe to call with `user_data`.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn qb_numerov_eigen(
    potential: Option<extern "C" fn(f64, *mut c_void) -> f64>,
    user_data: *mut c_void,
    l: u32,
    r_min: f64,
    r_max: f64,
    n_points: usize,
    e_lo: f64,
    e_hi: f64,
    out: *mut f64,
) -> QbStatus {
    guard(|| {
        let v = potential.ok_or_else(|| null("potential"))?;
        let grid = RadialGrid::new(r_min, r_max, n_points)?;
        let pair = numerov_eigen(|r| v(r, user_data), l, &grid, (e_lo, e_hi))?;
        write(out, pair.energy, "out")
    })
}

/// Runs the verification checks (`only` may be null for all groups) and
/// reports how many passed.
///
/// # Safety
/// `only` is null or a NUL-terminated string; outputs are valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qb_run_checks(seed: u64, only: *const c_char, passed: *mut usize, total: *mut usize) -> QbStatus {
    guard(|| {
        let only = if only.is_null() {
            None
        } else {
            // SAFETY: NUL-terminated per contract.
            let s = unsafe { CStr::from_ptr(only) };
            Some(s.to_str().map_err(|_| Failure::Status(QbStatus::InvalidParameter, "only is not UTF-8".into()))?)
        };
        let results = checks::run_checks(seed, only)?;
        write(passed, results.iter().filter(|r| r.pass).count(), "passed")?;
        write(total, results.len(), "total")
    })
}
