//! C ABI over the radial wave laboratory.
//!
//! Objects are opaque handles created by `rwl_*_new`-style constructors and released with the matching
//! `*_free`. Fallible functions return an [`RwlStatus`]; the message of the last failure on the calling
//! thread is available from [`rwl_last_error`].
//!
//! Array outputs follow one convention: pass a buffer and its capacity, and the number of values is written
//! to `written` when it is not null. A null buffer only queries that number.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString, OsString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rwl_core::calculus::fractional_derivative;
use rwl_core::experiments::{parse_nonlinearity, DataSpec};
use rwl_core::multiplier::{sign_condition_report, MultiplierFamily, MultiplierSpec};
use rwl_core::norms::{besov_norm, sobolev_norm, SpaceTimeField};
use rwl_core::radial::lp_norm;
use rwl_core::solver::{solve_linear, solve_nonlinear, SolverConfig};
use rwl_core::{Error, RadialGrid, RadialProfile};

/// Status of a library call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RwlStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// Invalid parameters, data or text.
    Validation = 2,
    /// Non-finite values or a failed numerical check.
    Numerical = 3,
    /// The output buffer is smaller than the result.
    BufferTooSmall = 5,
    /// An internal panic was caught at the boundary.
    Panic = 6,
}

/// Uniform radial grid.
pub struct RwlGrid(RadialGrid);

/// Radial function sampled on a grid.
pub struct RwlProfile(RadialProfile);

/// Stored time slices of a solve.
pub struct RwlField {
    field: SpaceTimeField,
    energy_drift: f64,
    blowup_time: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure {
    status: RwlStatus,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Numerical(_) | Error::BoundaryReached { .. } => RwlStatus::Numerical,
            _ => RwlStatus::Validation,
        };
        Self { status, message: e.to_string() }
    }
}

type Outcome = Result<(), Failure>;

fn null(name: &str) -> Failure {
    Failure { status: RwlStatus::NullArgument, message: format!("argument '{name}' is null") }
}

fn set_last_error(message: Option<String>) {
    let text = message.map(|m| CString::new(m.replace('\0', " ")).unwrap_or_default());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = text);
}

fn guard(f: impl FnOnce() -> Outcome) -> RwlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error(None);
            RwlStatus::Ok
        }
        Ok(Err(failure)) => {
            set_last_error(Some(failure.message));
            failure.status
        }
        Err(_) => {
            set_last_error(Some("internal panic".into()));
            RwlStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn store<T>(out: *mut T, value: T, name: &str) -> Outcome {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure { status: RwlStatus::Validation, message: format!("argument '{name}' is not UTF-8") })
}

unsafe fn values<'a>(p: *const f64, len: usize, name: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn copy_out(src: &[f64], buf: *mut f64, capacity: usize, written: *mut usize) -> Outcome {
    if !written.is_null() {
        written.write(src.len());
    }
    if buf.is_null() {
        return Ok(());
    }
    if capacity < src.len() {
        return Err(Failure {
            status: RwlStatus::BufferTooSmall,
            message: format!("buffer holds {capacity} values, {} needed", src.len()),
        });
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    Ok(())
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

unsafe fn release<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message of the last failed call on this thread, or null after a success.
///
/// The pointer stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn rwl_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rwl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a grid of `points` intervals on `[0, r_max]` in dimension `n`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rwl_grid_new(n: usize, r_max: f64, points: usize, out: *mut *mut RwlGrid) -> RwlStatus {
    guard(|| {
        let grid = RadialGrid::new(n, r_max, points)?;
        store(out, boxed(RwlGrid(grid)), "out")
    })
}

/// # Safety
/// `grid` must be null or a handle from [`rwl_grid_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rwl_grid_free(grid: *mut RwlGrid) {
    release(grid);
}

/// Number of nodes, or 0 for a null handle.
///
/// # Safety
/// `grid` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rwl_grid_len(grid: *const RwlGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.0.len())
}

/// Node radii.
///
/// # Safety
/// `grid` must be a live handle, `buf` null or valid for `capacity` writes, `written` null or valid.
#[no_mangle]
pub unsafe extern "C" fn rwl_grid_nodes(
    grid: *const RwlGrid,
    buf: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> RwlStatus {
    guard(|| copy_out(&borrow(grid, "grid")?.0.nodes(), buf, capacity, written))
}

/// Profile from one value per grid node; the values must decay inside the grid.
///
/// # Safety
/// `grid` must be a live handle, `data` valid for `len` reads, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rwl_profile_new(
    grid: *const RwlGrid,
    data: *const f64,
    len: usize,
    out: *mut *mut RwlProfile,
) -> RwlStatus {
    guard(|| {
        let grid = borrow(grid, "grid")?.0;
        let profile = RadialProfile::new(grid, values(data, len, "data")?.to_vec())?;
        store(out, boxed(RwlProfile(profile)), "out")
    })
}

/// Position and velocity profiles of a data specification such as `gaussian:amp=1,width=1`.
///
/// # Safety
/// `grid` must be a live handle, `spec` a NUL-terminated string, `u0` and `u1` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rwl_profile_from_spec(
    grid: *const RwlGrid,
    spec: *const c_char,
    u0: *mut *mut RwlProfile,
    u1: *mut *mut RwlProfile,
) -> RwlStatus {
    guard(|| {
        let grid = borrow(grid, "grid")?.0;
        let data: DataSpec = text(spec, "spec")?.parse()?;
        if u0.is_null() || u1.is_null() {
            return Err(null(if u0.is_null() { "u0" } else { "u1" }));
        }
        let (p0, p1) = data.profiles(grid)?;
        store(u0, boxed(RwlProfile(p0)), "u0")?;
        store(u1, boxed(RwlProfile(p1)), "u1")
    })
}

/// # Safety
/// `profile` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rwl_profile_free(profile: *mut RwlProfile) {
    release(profile);
}

/// Node values.
///
/// # Safety
/// `profile` must be a live handle, `buf` null or valid for `capacity` writes, `written` null or valid.
#[no_mangle]
pub unsafe extern "C" fn rwl_profile_values(
    profile: *const RwlProfile,
    buf: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> RwlStatus {
    guard(|| copy_out(borrow(profile, "profile")?.0.values(), buf, capacity, written))
}

/// Fractional derivative `D^theta` of a profile.
///
/// # Safety
/// `profile` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rwl_fractional_derivative(
    profile: *const RwlProfile,
    theta: f64,
    out: *mut *mut RwlProfile,
) -> RwlStatus {
    guard(|| {
        let lifted = fractional_derivative(&borrow(profile, "profile")?.0, theta)?;
        store(out, boxed(RwlProfile(lifted)), "out")
    })
}

/// Homogeneous Sobolev norm of order `s`.
///
/// # Safety
/// `profile` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rwl_sobolev_norm(profile: *const RwlProfile, s: f64, out: *mut f64) -> RwlStatus {
    guard(|| store(out, sobolev_norm(&borrow(profile, "profile")?.0, s)?, "out"))
}

/// Homogeneous Besov norm of order `s` with summability `q`.
///
/// # Safety
/// `profile` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rwl_besov_norm(profile: *const RwlProfile, s: f64, q: f64, out: *mut f64) -> RwlStatus {
    guard(|| store(out, besov_norm(&borrow(profile, "profile")?.0, s, q)?, "out"))
}

/// Radial Lebesgue norm; `p` may be infinite.
///
/// # Safety
/// `profile` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rwl_lp_norm(profile: *const RwlProfile, p: f64, out: *mut f64) -> RwlStatus {
    guard(|| store(out, lp_norm(&borrow(profile, "profile")?.0, p)?, "out"))
}

fn solver_config(cfl: f64, stride: usize) -> SolverConfig {
    SolverConfig { cfl, stride, ..SolverConfig::default() }
}

/// Free wave evolution up to `t_final`, storing every `stride`-th step.
///
/// # Safety
/// `u0` and `u1` must be live handles on the same grid and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rwl_solve_linear(
    u0: *const RwlProfile,
    u1: *const RwlProfile,
    t_final: f64,
    cfl: f64,
    stride: usize,
    out: *mut *mut RwlField,
) -> RwlStatus {
    guard(|| {
        let zero = |_: f64, _: f64| 0.0;
        let sol = solve_linear(
            &borrow(u0, "u0")?.0,
            &borrow(u1, "u1")?.0,
            &zero,
            &zero,
            t_final,
            &solver_config(cfl, stride),
        )?;
        let energy_drift = sol.energy_drift();
        store(out, boxed(RwlField { field: sol.field, energy_drift, blowup_time: f64::NAN }), "out")
    })
}

/// Quasilinear evolution up to `t_cap` or the first blow-up signal; `nonlinearity` reads like
/// `g=linear:0.2;a=const:-1`.
///
/// # Safety
/// `u0` and `u1` must be live handles on the same grid, `nonlinearity` a NUL-terminated string and `out`
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rwl_solve_nonlinear(
    u0: *const RwlProfile,
    u1: *const RwlProfile,
    nonlinearity: *const c_char,
    t_cap: f64,
    clip: f64,
    cfl: f64,
    stride: usize,
    out: *mut *mut RwlField,
) -> RwlStatus {
    guard(|| {
        let nl = parse_nonlinearity(text(nonlinearity, "nonlinearity")?)?;
        let run = solve_nonlinear(
            &borrow(u0, "u0")?.0,
            &borrow(u1, "u1")?.0,
            &nl,
            t_cap,
            clip,
            &solver_config(cfl, stride),
        )?;
        let blowup_time = run.blowup.map_or(f64::NAN, |(t, _)| t);
        store(out, boxed(RwlField { field: run.field, energy_drift: f64::NAN, blowup_time }), "out")
    })
}

/// # Safety
/// `field` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rwl_field_free(field: *mut RwlField) {
    release(field);
}

/// Number of stored slices, or 0 for a null handle.
///
/// # Safety
/// `field` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rwl_field_slices(field: *const RwlField) -> usize {
    field.as_ref().map_or(0, |f| f.field.len())
}

/// Times of the stored slices.
///
/// # Safety
/// `field` must be a live handle, `buf` null or valid for `capacity` writes, `written` null or valid.
#[no_mangle]
pub unsafe extern "C" fn rwl_field_times(
    field: *const RwlField,
    buf: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> RwlStatus {
    guard(|| copy_out(borrow(field, "field")?.field.times(), buf, capacity, written))
}

/// Values of `u` at stored slice `index`.
///
/// # Safety
/// `field` must be a live handle, `buf` null or valid for `capacity` writes, `written` null or valid.
#[no_mangle]
pub unsafe extern "C" fn rwl_field_slice(
    field: *const RwlField,
    index: usize,
    buf: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> RwlStatus {
    guard(|| {
        let f = &borrow(field, "field")?.field;
        if index >= f.len() {
            return Err(Failure {
                status: RwlStatus::Validation,
                message: format!("slice {index} out of range, {} stored", f.len()),
            });
        }
        copy_out(f.u(index), buf, capacity, written)
    })
}

/// Relative energy drift of a linear solve; NaN for nonlinear runs.
///
/// # Safety
/// `field` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rwl_field_energy_drift(field: *const RwlField, out: *mut f64) -> RwlStatus {
    guard(|| store(out, borrow(field, "field")?.energy_drift, "out"))
}

/// Time of the first blow-up signal; NaN when none occurred.
///
/// # Safety
/// `field` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rwl_field_blowup_time(field: *const RwlField, out: *mut f64) -> RwlStatus {
    guard(|| store(out, borrow(field, "field")?.blowup_time, "out"))
}

/// Checks the sign conditions of the power multiplier with exponent `mu` and scale `radius` at `len` radii.
///
/// # Safety
/// `radii` must be valid for `len` reads; `violations` and `worst_margin` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rwl_sign_conditions(
    n: usize,
    mu: f64,
    radius: f64,
    radii: *const f64,
    len: usize,
    violations: *mut usize,
    worst_margin: *mut f64,
) -> RwlStatus {
    guard(|| {
        let spec = MultiplierSpec::new(MultiplierFamily::Power { mu }, radius, n)?;
        let report = sign_condition_report(&spec, values(radii, len, "radii")?);
        store(violations, report.violations, "violations")?;
        store(worst_margin, report.worst_margin, "worst_margin")
    })
}

/// Runs the command-line interface with `argc` arguments, the first being the program name, and returns its
/// exit status.
///
/// # Safety
/// `argv` must hold `argc` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn rwl_run(argc: c_int, argv: *const *const c_char) -> c_int {
    let count = usize::try_from(argc).unwrap_or(0);
    if count > 0 && argv.is_null() {
        set_last_error(Some(null("argv").message));
        return RwlStatus::NullArgument as c_int;
    }
    let mut args = Vec::with_capacity(count.max(1));
    for i in 0..count {
        let p = *argv.add(i);
        if p.is_null() {
            set_last_error(Some(null("argv").message));
            return RwlStatus::NullArgument as c_int;
        }
        args.push(OsString::from(CStr::from_ptr(p).to_string_lossy().into_owned()));
    }
    if args.is_empty() {
        args.push(OsString::from("rwl"));
    }
    catch_unwind(|| rwl_core::cli::run(args)).unwrap_or(RwlStatus::Panic as c_int)
}
