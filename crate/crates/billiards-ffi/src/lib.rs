//! C ABI for the billiards library.
//!
//! Conventions:
//! - Domains are opaque handles created with [`bl_domain_new`] and released
//!   with [`bl_domain_free`].
//! - Every fallible call returns a [`bl_error_t`] code; `BL_OK` (0) means
//!   success.  On failure, [`bl_last_error_message`] returns a thread-local,
//!   NUL-terminated description valid until the next failing call on the
//!   same thread.
//! - Labels are passed as `(const int64_t*, size_t)` pairs whose length must
//!   match the domain dimension.
//! - Boundary conditions: `BL_BC_DIRICHLET` (0) or `BL_BC_NEUMANN` (1).
//!
//! The C header `include/billiards.h` is generated from this file by
//! cbindgen at build time.

// The public surface follows C naming conventions on purpose.
#![allow(non_camel_case_types)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use billiards::domains::{genus, DomainId, RationalAngle};
use billiards::error::Error;
use billiards::orbits;
use billiards::raytrace;
use billiards::spectra::{self, BoundaryCondition};

/// Error codes returned by every fallible call.
pub type bl_error_t = i32;

pub const BL_OK: bl_error_t = 0;
/// A required pointer argument was NULL.
pub const BL_ERR_NULL_ARGUMENT: bl_error_t = 1;
/// The domain name is not in the catalog.
pub const BL_ERR_UNKNOWN_DOMAIN: bl_error_t = 2;
/// Label length does not match the domain dimension.
pub const BL_ERR_ARITY: bl_error_t = 3;
/// Label violates the boundary-condition index rule.
pub const BL_ERR_INDEX_RULE: bl_error_t = 4;
/// The trajectory hit a corner/edge and was annihilated.
pub const BL_ERR_TERMINAL_ORBIT: bl_error_t = 5;
/// The ray-tracing oracle disagrees with the lattice construction.
pub const BL_ERR_ORACLE_DISAGREEMENT: bl_error_t = 6;
/// The tracer ran out of its collision budget before closing.
pub const BL_ERR_BUDGET_EXHAUSTED: bl_error_t = 7;
/// An output buffer is too small for the requested data.
pub const BL_ERR_BUFFER_TOO_SMALL: bl_error_t = 8;
/// Any other invalid input or internal failure (see the error message).
pub const BL_ERR_INVALID_INPUT: bl_error_t = 9;

/// Dirichlet boundary condition selector.
pub const BL_BC_DIRICHLET: i32 = 0;
/// Neumann boundary condition selector.
pub const BL_BC_NEUMANN: i32 = 1;

/// Opaque domain handle.
pub struct bl_domain_t {
    id: DomainId,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_else(|_| CString::new("error").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn code_for(err: &Error) -> bl_error_t {
    match err {
        Error::ArityMismatch { .. } => BL_ERR_ARITY,
        Error::IndexRule { .. } => BL_ERR_INDEX_RULE,
        Error::TerminalOrbit { .. } => BL_ERR_TERMINAL_ORBIT,
        Error::OracleDisagreement { .. } => BL_ERR_ORACLE_DISAGREEMENT,
        Error::BudgetExhausted { .. } => BL_ERR_BUDGET_EXHAUSTED,
        _ => BL_ERR_INVALID_INPUT,
    }
}

fn fail(err: Error) -> bl_error_t {
    let code = code_for(&err);
    set_error(err.to_string());
    code
}

fn fail_null(what: &str) -> bl_error_t {
    set_error(format!("{what} must not be NULL"));
    BL_ERR_NULL_ARGUMENT
}

unsafe fn label_slice<'a>(label: *const i64, len: usize) -> Option<&'a [i64]> {
    if label.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(label, len))
    }
}

fn bc_from(raw: i32) -> Result<BoundaryCondition, bl_error_t> {
    match raw {
        BL_BC_DIRICHLET => Ok(BoundaryCondition::Dirichlet),
        BL_BC_NEUMANN => Ok(BoundaryCondition::Neumann),
        other => {
            set_error(format!("unknown boundary condition selector {other}"));
            Err(BL_ERR_INVALID_INPUT)
        }
    }
}

/// Returns the thread-local message describing the most recent failure on
/// this thread.  The pointer stays valid until the next failing call.
#[no_mangle]
pub extern "C" fn bl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Looks up a catalog domain by name (e.g. "square", "k-tetra") and returns
/// an owned handle through `out`.  Free it with `bl_domain_free`.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bl_domain_new(
    name: *const c_char,
    out: *mut *mut bl_domain_t,
) -> bl_error_t {
    if name.is_null() {
        return fail_null("name");
    }
    if out.is_null() {
        return fail_null("out");
    }
    let s = match CStr::from_ptr(name).to_str() {
        Ok(s) => s,
        Err(_) => {
            set_error("domain name is not valid UTF-8".into());
            return BL_ERR_UNKNOWN_DOMAIN;
        }
    };
    match DomainId::parse(s) {
        Ok(id) => {
            *out = Box::into_raw(Box::new(bl_domain_t { id }));
            BL_OK
        }
        Err(e) => {
            set_error(e.to_string());
            BL_ERR_UNKNOWN_DOMAIN
        }
    }
}

/// Releases a handle from `bl_domain_new`.  NULL is a no-op.
///
/// # Safety
/// `domain` must be NULL or a pointer previously returned by
/// `bl_domain_new` that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn bl_domain_free(domain: *mut bl_domain_t) {
    if !domain.is_null() {
        drop(Box::from_raw(domain));
    }
}

/// Spatial dimension of the domain (2 or 3).
///
/// # Safety
/// `domain` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn bl_domain_dimension(
    domain: *const bl_domain_t,
    out: *mut u32,
) -> bl_error_t {
    let Some(d) = domain.as_ref() else { return fail_null("domain") };
    if out.is_null() {
        return fail_null("out");
    }
    *out = d.id.dimension() as u32;
    BL_OK
}

/// Amplitude squared of the orbit family `label`: the integer bilinear form
/// of the label, equal to |V|^2/4 for the unfolded lattice vector V.
///
/// # Safety
/// `domain`, `label` (length `label_len`), and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bl_amplitude_squared(
    domain: *const bl_domain_t,
    label: *const i64,
    label_len: usize,
    out: *mut i64,
) -> bl_error_t {
    let Some(d) = domain.as_ref() else { return fail_null("domain") };
    let Some(label) = label_slice(label, label_len) else { return fail_null("label") };
    if out.is_null() {
        return fail_null("out");
    }
    match orbits::amplitude_squared(d.id, label) {
        Ok(v) => {
            *out = v;
            BL_OK
        }
        Err(e) => fail(e),
    }
}

/// Number of boundary collisions of the orbit family `label` (2-D domains).
///
/// # Safety
/// `domain`, `label` (length `label_len`), and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bl_collision_count(
    domain: *const bl_domain_t,
    label: *const i64,
    label_len: usize,
    out: *mut i64,
) -> bl_error_t {
    let Some(d) = domain.as_ref() else { return fail_null("domain") };
    let Some(label) = label_slice(label, label_len) else { return fail_null("label") };
    if out.is_null() {
        return fail_null("out");
    }
    match orbits::collision_count(d.id, label) {
        Ok(v) => {
            *out = v;
            BL_OK
        }
        Err(e) => fail(e),
    }
}

/// Quantum energy of `label` under the given boundary condition, in the
/// domain's dimensionless integer convention.
///
/// # Safety
/// `domain`, `label` (length `label_len`), and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bl_energy(
    domain: *const bl_domain_t,
    label: *const i64,
    label_len: usize,
    bc: i32,
    out: *mut i64,
) -> bl_error_t {
    let Some(d) = domain.as_ref() else { return fail_null("domain") };
    let Some(label) = label_slice(label, label_len) else { return fail_null("label") };
    if out.is_null() {
        return fail_null("out");
    }
    let bc = match bc_from(bc) {
        Ok(b) => b,
        Err(code) => return code,
    };
    match spectra::energy(d.id, label, bc) {
        Ok(v) => {
            *out = v;
            BL_OK
        }
        Err(e) => fail(e),
    }
}

/// Writes the first `count` energy levels (with multiplicity) into
/// `out_values`, which must hold at least `count` entries.
///
/// # Safety
/// `domain` must be valid; `out_values` must point to `capacity` writable
/// `int64_t` slots.
#[no_mangle]
pub unsafe extern "C" fn bl_spectrum(
    domain: *const bl_domain_t,
    bc: i32,
    count: usize,
    out_values: *mut i64,
    capacity: usize,
) -> bl_error_t {
    let Some(d) = domain.as_ref() else { return fail_null("domain") };
    if out_values.is_null() {
        return fail_null("out_values");
    }
    if capacity < count {
        set_error(format!("buffer holds {capacity} values, need {count}"));
        return BL_ERR_BUFFER_TOO_SMALL;
    }
    let bc = match bc_from(bc) {
        Ok(b) => b,
        Err(code) => return code,
    };
    match spectra::spectrum(d.id, bc, count) {
        Ok(entries) => {
            let flat = spectra::flat_values(&entries, count);
            if flat.len() < count {
                set_error(format!("could only gather {} of {count} levels", flat.len()));
                return BL_ERR_INVALID_INPUT;
            }
            for (i, v) in flat.iter().enumerate() {
                *out_values.add(i) = *v;
            }
            BL_OK
        }
        Err(e) => fail(e),
    }
}

/// Replays `label` through the ray-tracing oracle.  On success the traced
/// collision count and path length are written to the out parameters and the
/// trace agreed with the lattice construction; disagreements map to
/// `BL_ERR_ORACLE_DISAGREEMENT`.
///
/// # Safety
/// `domain` and `label` must be valid; `out_collisions` and
/// `out_path_length` may be NULL when the caller only wants the verdict.
#[no_mangle]
pub unsafe extern "C" fn bl_verify_label(
    domain: *const bl_domain_t,
    label: *const i64,
    label_len: usize,
    out_collisions: *mut u64,
    out_path_length: *mut f64,
) -> bl_error_t {
    let Some(d) = domain.as_ref() else { return fail_null("domain") };
    let Some(label) = label_slice(label, label_len) else { return fail_null("label") };
    match raytrace::verify_label(d.id, label, None) {
        Ok(report) => {
            if !out_collisions.is_null() {
                *out_collisions = report.collisions as u64;
            }
            if !out_path_length.is_null() {
                *out_path_length = report.path_length;
            }
            BL_OK
        }
        Err(e) => fail(e),
    }
}

/// Genus of the invariant surface of a rational polygon whose interior
/// angles are `numerators[i]/denominators[i] * pi`.  A genus of 1 marks the
/// integrable domains.
///
/// # Safety
/// `numerators` and `denominators` must point to `count` entries; `out`
/// must be valid.
#[no_mangle]
pub unsafe extern "C" fn bl_genus(
    numerators: *const u64,
    denominators: *const u64,
    count: usize,
    out: *mut u64,
) -> bl_error_t {
    if numerators.is_null() {
        return fail_null("numerators");
    }
    if denominators.is_null() {
        return fail_null("denominators");
    }
    if out.is_null() {
        return fail_null("out");
    }
    let nums = std::slice::from_raw_parts(numerators, count);
    let dens = std::slice::from_raw_parts(denominators, count);
    let mut angles = Vec::with_capacity(count);
    for i in 0..count {
        match RationalAngle::new(nums[i], dens[i]) {
            Ok(a) => angles.push(a),
            Err(e) => return fail(e),
        }
    }
    match genus(&angles) {
        Ok(g) => {
            *out = g;
            BL_OK
        }
        Err(e) => fail(e),
    }
}
