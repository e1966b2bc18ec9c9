//! C ABI over `cmcurve`.
//!
//! Points and shadows are opaque heap handles created from JSON and released
//! with their `_free` function. Every fallible call returns a [`CmStatus`];
//! the message of the last failure on the calling thread is available from
//! [`cm_last_error`]. Strings returned through `char **` out-parameters are
//! owned by the caller and released with [`cm_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cmcurve::adele::LevelMatrix;
use cmcurve::approx::{approx_eq, relation_r};
use cmcurve::cli::{json as codec, run_command};
use cmcurve::error::Error;
use cmcurve::galois::{branch_map, shadow_act, shadow_eq, GaloisShadow};
use cmcurve::shimura::{act_unit, canonical_point, component, is_fixed, point_eq, project, LevelPoint};

/// Version of this C interface; bumped on incompatible changes.
pub const CM_ABI_VERSION: u32 = 1;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Malformed JSON, schema violation or invalid value.
    InvalidInput = 2,
    /// A rational part is not invertible at a prime of the level.
    PrecisionObstruction = 3,
    /// The level is not coprime to 2 times the product of the support.
    LevelObstruction = 4,
    /// A rational is not a norm.
    NormObstruction = 5,
    /// A point's orbit is not in the shadow's support.
    UnsupportedOrbit = 6,
    /// A lift table violates the relation R.
    RelationViolation = 7,
    /// A subgroup is not subdirect.
    NotSubdirect = 8,
    /// The library panicked; this is a bug.
    Panic = 9,
}

impl From<&Error> for CmStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::PrecisionObstruction(_) => CmStatus::PrecisionObstruction,
            Error::LevelObstruction { .. } => CmStatus::LevelObstruction,
            Error::NormObstruction(_) => CmStatus::NormObstruction,
            Error::UnsupportedOrbit(_) => CmStatus::UnsupportedOrbit,
            Error::RViolation(_) => CmStatus::RelationViolation,
            Error::NotSubdirect(_) => CmStatus::NotSubdirect,
            Error::InvalidInput(_) => CmStatus::InvalidInput,
        }
    }
}

/// Opaque point `[τ, a]` at level N.
pub struct CmPoint(LevelPoint);

/// Opaque Galois shadow.
pub struct CmShadow(GaloisShadow);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nuls removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(CmStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(CmStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(CmStatus::NullPointer, format!("{what} is null"))
}

/// Run `f`, translating errors and panics into a status and the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            CmStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("panic: {msg}"));
            CmStatus::Panic
        }
    }
}

unsafe fn arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(CmStatus::InvalidInput, format!("{what} is not UTF-8")))
}

fn parse_json(s: &str) -> Result<serde_json::Value, Fail> {
    serde_json::from_str(s).map_err(|e| Fail(CmStatus::InvalidInput, format!("malformed JSON: {e}")))
}

fn give_string(s: String, dst: &mut *mut c_char) {
    *dst = CString::new(s).expect("JSON has no interior nuls").into_raw();
}

fn give<T>(v: T, dst: &mut *mut T) {
    *dst = Box::into_raw(Box::new(v));
}

unsafe fn matrix(g: *const i64, n: u64) -> Result<LevelMatrix, Fail> {
    if g.is_null() {
        return Err(null("g"));
    }
    let e = [*g, *g.add(1), *g.add(2), *g.add(3)];
    Ok(LevelMatrix::new(e, n)?)
}

/// Version of the C interface.
#[no_mangle]
pub extern "C" fn cm_abi_version() -> u32 {
    CM_ABI_VERSION
}

/// Message of the last failed call on this thread ("" after a success).
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn cm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse a point from its JSON encoding.
///
/// # Safety
/// `json` is a nul-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn cm_point_from_json(json: *const c_char, out_point: *mut *mut CmPoint) -> CmStatus {
    guard(|| {
        let dst = out(out_point, "out")?;
        let v = parse_json(text(json, "json")?)?;
        give(CmPoint(codec::parse_point(&v)?), dst);
        Ok(())
    })
}

/// JSON encoding of the canonical representative of a point.
///
/// # Safety
/// `p` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn cm_point_to_json(p: *const CmPoint, out_json: *mut *mut c_char) -> CmStatus {
    guard(|| {
        let dst = out(out_json, "out")?;
        let mut v = codec::point(&canonical_point(&arg(p, "p")?.0));
        v["canonical"] = serde_json::Value::Bool(true);
        give_string(v.to_string(), dst);
        Ok(())
    })
}

/// Release a point. Null is ignored.
///
/// # Safety
/// `p` comes from this library and has not been freed.
#[no_mangle]
pub unsafe extern "C" fn cm_point_free(p: *mut CmPoint) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Exact equality of points.
///
/// # Safety
/// Handles are live; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn cm_point_eq(a: *const CmPoint, b: *const CmPoint, out_eq: *mut bool) -> CmStatus {
    guard(|| {
        let dst = out(out_eq, "out")?;
        let (a, b) = (&arg(a, "a")?.0, &arg(b, "b")?.0);
        if a.level() != b.level() {
            return Err(Error::invalid("points at different levels").into());
        }
        *dst = point_eq(a, b)?.is_some();
        Ok(())
    })
}

/// Equality in the approximate quotient.
///
/// # Safety
/// Handles are live; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn cm_point_approx_eq(a: *const CmPoint, b: *const CmPoint, out_eq: *mut bool) -> CmStatus {
    guard(|| {
        let dst = out(out_eq, "out")?;
        *dst = approx_eq(&arg(a, "a")?.0, &arg(b, "b")?.0);
        Ok(())
    })
}

/// Component of a point, a unit mod N.
///
/// # Safety
/// `p` is live; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn cm_point_component(p: *const CmPoint, out_mu: *mut u64) -> CmStatus {
    guard(|| {
        let dst = out(out_mu, "out")?;
        *dst = component(&arg(p, "p")?.0).value();
        Ok(())
    })
}

/// Level of a point.
///
/// # Safety
/// `p` is live; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn cm_point_level(p: *const CmPoint, out_level: *mut u64) -> CmStatus {
    guard(|| {
        *out(out_level, "out")? = arg(p, "p")?.0.level();
        Ok(())
    })
}

/// `g * P` for a unit matrix `g = (g[0] g[1]; g[2] g[3])` mod N.
///
/// # Safety
/// `p` is live; `g` points to 4 integers; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn cm_point_act_unit(p: *const CmPoint, g: *const i64, out_point: *mut *mut CmPoint) -> CmStatus {
    guard(|| {
        let dst = out(out_point, "out")?;
        let p = &arg(p, "p")?.0;
        let g = matrix(g, p.level())?;
        give(CmPoint(act_unit(&g, p)?), dst);
        Ok(())
    })
}

/// Whether the unit matrix `g` fixes the point.
///
/// # Safety
/// `p` is live; `g` points to 4 integers; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn cm_point_is_fixed(p: *const CmPoint, g: *const i64, out_fixed: *mut bool) -> CmStatus {
    guard(|| {
        let dst = out(out_fixed, "out")?;
        let p = &arg(p, "p")?.0;
        *dst = is_fixed(&matrix(g, p.level())?, p)?;
        Ok(())
    })
}

/// Image of a point at a level dividing its own.
///
/// # Safety
/// `p` is live; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn cm_point_project(p: *const CmPoint, level: u64, out_point: *mut *mut CmPoint) -> CmStatus {
    guard(|| {
        let dst = out(out_point, "out")?;
        give(CmPoint(project(&arg(p, "p")?.0, level)?), dst);
        Ok(())
    })
}

/// Parse a shadow from its JSON encoding.
///
/// # Safety
/// `json` is a nul-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn cm_shadow_from_json(json: *const c_char, out_shadow: *mut *mut CmShadow) -> CmStatus {
    guard(|| {
        let dst = out(out_shadow, "out")?;
        let v = parse_json(text(json, "json")?)?;
        give(CmShadow(codec::parse_shadow(&v)?), dst);
        Ok(())
    })
}

/// JSON encoding of a shadow.
///
/// # Safety
/// `s` is live; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn cm_shadow_to_json(s: *const CmShadow, out_json: *mut *mut c_char) -> CmStatus {
    guard(|| {
        let dst = out(out_json, "out")?;
        give_string(codec::shadow(&arg(s, "s")?.0).to_string(), dst);
        Ok(())
    })
}

/// Release a shadow. Null is ignored.
///
/// # Safety
/// `s` comes from this library and has not been freed.
#[no_mangle]
pub unsafe extern "C" fn cm_shadow_free(s: *mut CmShadow) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Equality of shadows modulo the torus.
///
/// # Safety
/// Handles are live; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn cm_shadow_eq(a: *const CmShadow, b: *const CmShadow, out_eq: *mut bool) -> CmStatus {
    guard(|| {
        let dst = out(out_eq, "out")?;
        *dst = shadow_eq(&arg(a, "a")?.0, &arg(b, "b")?.0)?;
        Ok(())
    })
}

/// Branch of a shadow, +1 or -1.
///
/// # Safety
/// `s` is live; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn cm_shadow_branch(s: *const CmShadow, out_branch: *mut i8) -> CmStatus {
    guard(|| {
        *out(out_branch, "out")? = branch_map(&arg(s, "s")?.0);
        Ok(())
    })
}

/// Action of a shadow on a point.
///
/// # Safety
/// Handles are live; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn cm_shadow_act(
    s: *const CmShadow,
    p: *const CmPoint,
    out_point: *mut *mut CmPoint,
) -> CmStatus {
    guard(|| {
        let dst = out(out_point, "out")?;
        give(CmPoint(shadow_act(&arg(s, "s")?.0, &arg(p, "p")?.0)?), dst);
        Ok(())
    })
}

/// The relation R on `(s1, s2, t1, t2)`; on success `*out_lambda` is the
/// witness determinant, or 0 when R fails.
///
/// # Safety
/// Handles are live; out-pointers are writable.
#[no_mangle]
pub unsafe extern "C" fn cm_relation(
    s1: *const CmPoint,
    s2: *const CmPoint,
    t1: *const CmPoint,
    t2: *const CmPoint,
    out_holds: *mut bool,
    out_lambda: *mut u64,
) -> CmStatus {
    guard(|| {
        let holds = out(out_holds, "out_holds")?;
        let lambda = out(out_lambda, "out_lambda")?;
        let w = relation_r(&arg(s1, "s1")?.0, &arg(s2, "s2")?.0, &arg(t1, "t1")?.0, &arg(t2, "t2")?.0)?;
        *holds = w.is_some();
        *lambda = w.map_or(0, |w| w.lambda);
        Ok(())
    })
}

/// Run a JSON command (`point-eq`, `orbit`, `fixed`, `act`, `relation`,
/// `lift`) exactly as the command-line tool does.
///
/// # Safety
/// Strings are nul-terminated; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn cm_command(
    command: *const c_char,
    input_json: *const c_char,
    out_json: *mut *mut c_char,
) -> CmStatus {
    guard(|| {
        let dst = out(out_json, "out")?;
        *dst = ptr::null_mut();
        let name = text(command, "command")?;
        let v = parse_json(text(input_json, "input")?)?;
        give_string(run_command(name, &v)?.to_string(), dst);
        Ok(())
    })
}
