//! C interface. Profiles and trajectories are opaque heap handles; every
//! entry point returns a [`LoStatus`] and writes results through caller
//! buffers. On failure [`lo_last_error`] describes what went wrong.
//!
//! Phase points are passed as six doubles `x1 x2 x3 y1 y2 y3`. Matrices are
//! row-major (`m[3*i + j]`), rank-3 tensors `t[9*i + 3*j + k]` and rank-4
//! tensors `t[27*i + 9*j + 3*k + l]`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lagrange_optics::closedform::{
    circle_radii, generator_radii, helix_omegas, sphere_circle_families, Family,
};
use lagrange_optics::connection::{cartan_closed_form, nonlinear_connection, semispray};
use lagrange_optics::curvature::{curvatures, metricity_residuals, torsions};
use lagrange_optics::dynamics::{integrate, motion_rhs, IntegratorConfig, Method, Trajectory};
use lagrange_optics::metric::{energy, fundamental_tensor, inverse_fundamental_tensor};
use lagrange_optics::tensor::Components;
use lagrange_optics::{Error, PhasePoint, ProfileSpec, RefractiveProfile, Symmetry};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    Unsupported = 4,
    Numerical = 5,
    /// The request was valid but has no solutions.
    Empty = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoSymmetry {
    Cylindrical = 0,
    Spherical = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoMethod {
    Dopri5 = 0,
    Rk4 = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoIntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub sample_every: f64,
    pub method: LoMethod,
}

/// Opaque refractive profile.
pub struct LoProfile(RefractiveProfile);

/// Opaque sampled trajectory.
pub struct LoTrajectory(Trajectory);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(LoStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Domain { .. } => LoStatus::Domain,
            Error::UnsupportedProfile(_) => LoStatus::Unsupported,
            Error::InvalidParameter(_) => LoStatus::InvalidArgument,
            Error::StepUnderflow { .. } | Error::Numerical(_) => LoStatus::Numerical,
        };
        Fail(status, e.to_string())
    }
}

fn null() -> Fail {
    Fail(LoStatus::NullPointer, "null pointer argument".into())
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(LoStatus::InvalidArgument, msg.into())
}

/// Runs `f`, records any error and converts panics into `LoStatus::Panic`.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> LoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            LoStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            LoStatus::Panic
        }
    }
}

unsafe fn read<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(null)
}

unsafe fn read_array<const N: usize>(p: *const f64) -> Result<[f64; N], Fail> {
    if p.is_null() {
        return Err(null());
    }
    let mut out = [0.0; N];
    ptr::copy_nonoverlapping(p, out.as_mut_ptr(), N);
    Ok(out)
}

unsafe fn write_flat<T: Flatten>(dst: *mut f64, value: &T) -> Result<(), Fail> {
    if dst.is_null() {
        return Err(null());
    }
    let mut flat = Vec::with_capacity(81);
    value.flatten_into(&mut flat);
    ptr::copy_nonoverlapping(flat.as_ptr(), dst, flat.len());
    Ok(())
}

trait Flatten {
    fn flatten_into(&self, out: &mut Vec<f64>);
}

impl Flatten for f64 {
    fn flatten_into(&self, out: &mut Vec<f64>) {
        out.push(*self);
    }
}

impl<T: Flatten, const N: usize> Flatten for [T; N] {
    fn flatten_into(&self, out: &mut Vec<f64>) {
        for t in self {
            t.flatten_into(out);
        }
    }
}

unsafe fn point(p: *const f64) -> Result<PhasePoint, Fail> {
    Ok(PhasePoint::from_slice(&read_array::<6>(p)?))
}

unsafe fn put_profile(
    out: *mut *mut LoProfile,
    profile: lagrange_optics::Result<RefractiveProfile>,
) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null());
    }
    *out = Box::into_raw(Box::new(LoProfile(profile?)));
    Ok(())
}

fn symmetry(s: LoSymmetry) -> Symmetry {
    match s {
        LoSymmetry::Cylindrical => Symmetry::Cylindrical,
        LoSymmetry::Spherical => Symmetry::Spherical,
    }
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn lo_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn lo_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lo_profile_uniform(n0: f64, out: *mut *mut LoProfile) -> LoStatus {
    guard(|| put_profile(out, RefractiveProfile::uniform(n0)))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lo_profile_gaussian_mirage(
    epsilon: f64,
    width: f64,
    sym: LoSymmetry,
    out: *mut *mut LoProfile,
) -> LoStatus {
    guard(|| {
        put_profile(
            out,
            RefractiveProfile::gaussian_mirage(epsilon, width, symmetry(sym)),
        )
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lo_profile_gaussian_ring(
    base: f64,
    amplitude: f64,
    center: f64,
    width: f64,
    sym: LoSymmetry,
    out: *mut *mut LoProfile,
) -> LoStatus {
    guard(|| {
        put_profile(
            out,
            RefractiveProfile::gaussian_ring(base, amplitude, center, width, symmetry(sym)),
        )
    })
}

/// Builds a profile from its JSON description, e.g.
/// `{"kind": "uniform", "n0": 1.5}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lo_profile_from_json(
    json: *const c_char,
    out: *mut *mut LoProfile,
) -> LoStatus {
    guard(|| {
        if json.is_null() {
            return Err(null());
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| invalid(e.to_string()))?;
        let spec: ProfileSpec = serde_json::from_str(text).map_err(|e| invalid(e.to_string()))?;
        put_profile(out, RefractiveProfile::from_spec(&spec))
    })
}

/// # Safety
/// `p` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn lo_profile_free(p: *mut LoProfile) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// `γ(x)`.
///
/// # Safety
/// `x` points to 3 doubles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn lo_gamma(p: *const LoProfile, x: *const f64, out: *mut f64) -> LoStatus {
    guard(|| {
        let g = read(p)?.0.gamma(&read_array::<3>(x)?)?;
        write_flat(out, &g)
    })
}

/// Fundamental tensor, 9 doubles.
///
/// # Safety
/// `pt` points to 6 doubles; `out` to 9 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn lo_metric(p: *const LoProfile, pt: *const f64, out: *mut f64) -> LoStatus {
    guard(|| write_flat(out, &fundamental_tensor(&read(p)?.0, &point(pt)?)?.0))
}

/// Inverse fundamental tensor, 9 doubles.
///
/// # Safety
/// `pt` points to 6 doubles; `out` to 9 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn lo_inverse_metric(
    p: *const LoProfile,
    pt: *const f64,
    out: *mut f64,
) -> LoStatus {
    guard(|| {
        write_flat(
            out,
            &inverse_fundamental_tensor(&read(p)?.0, &point(pt)?)?.0,
        )
    })
}

/// Semispray `G^i`, 3 doubles.
///
/// # Safety
/// `pt` points to 6 doubles; `out` to 3 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn lo_semispray(
    p: *const LoProfile,
    pt: *const f64,
    out: *mut f64,
) -> LoStatus {
    guard(|| write_flat(out, &semispray(&read(p)?.0, &point(pt)?)?))
}

/// Nonlinear connection `N^i_j`, 9 doubles.
///
/// # Safety
/// `pt` points to 6 doubles; `out` to 9 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn lo_nonlinear_connection(
    p: *const LoProfile,
    pt: *const f64,
    out: *mut f64,
) -> LoStatus {
    guard(|| write_flat(out, &nonlinear_connection(&read(p)?.0, &point(pt)?)?.n))
}

/// Horizontal and vertical connection coefficients, 27 doubles each.
///
/// # Safety
/// `pt` points to 6 doubles; `l` and `c` to 27 writable doubles each.
#[no_mangle]
pub unsafe extern "C" fn lo_cartan(
    p: *const LoProfile,
    pt: *const f64,
    l: *mut f64,
    c: *mut f64,
) -> LoStatus {
    guard(|| {
        let k = cartan_closed_form(&read(p)?.0, &point(pt)?)?;
        write_flat(l, &k.l)?;
        write_flat(c, &k.c)
    })
}

/// Torsions `R`, `P`, `C`, 27 doubles each.
///
/// # Safety
/// `pt` points to 6 doubles; each output to 27 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn lo_torsions(
    p: *const LoProfile,
    pt: *const f64,
    r: *mut f64,
    pp: *mut f64,
    c: *mut f64,
) -> LoStatus {
    guard(|| {
        let t = torsions(&read(p)?.0, &point(pt)?)?;
        write_flat(r, &t.r)?;
        write_flat(pp, &t.p)?;
        write_flat(c, &t.c)
    })
}

/// Curvatures `R`, `P`, `S`, 81 doubles each.
///
/// # Safety
/// `pt` points to 6 doubles; each output to 81 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn lo_curvatures(
    p: *const LoProfile,
    pt: *const f64,
    r: *mut f64,
    pp: *mut f64,
    s: *mut f64,
) -> LoStatus {
    guard(|| {
        let k = curvatures(&read(p)?.0, &point(pt)?)?;
        write_flat(r, &k.r)?;
        write_flat(pp, &k.p)?;
        write_flat(s, &k.s)
    })
}

/// Largest horizontal and vertical covariant-derivative residuals of `g`.
///
/// # Safety
/// `pt` points to 6 doubles; `h` and `v` are writable.
#[no_mangle]
pub unsafe extern "C" fn lo_metricity(
    p: *const LoProfile,
    pt: *const f64,
    h: *mut f64,
    v: *mut f64,
) -> LoStatus {
    guard(|| {
        let m = metricity_residuals(&read(p)?.0, &point(pt)?)?;
        write_flat(h, &m.horizontal.max_abs())?;
        write_flat(v, &m.vertical.max_abs())
    })
}

/// Acceleration of the equations of motion, 3 doubles.
///
/// # Safety
/// `x`, `v` point to 3 doubles; `out` to 3 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn lo_motion_rhs(
    p: *const LoProfile,
    x: *const f64,
    v: *const f64,
    out: *mut f64,
) -> LoStatus {
    guard(|| {
        write_flat(
            out,
            &motion_rhs(&read(p)?.0, &read_array(x)?, &read_array(v)?)?,
        )
    })
}

/// Conserved energy at a phase point.
///
/// # Safety
/// `pt` points to 6 doubles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn lo_energy(p: *const LoProfile, pt: *const f64, out: *mut f64) -> LoStatus {
    guard(|| write_flat(out, &energy(&read(p)?.0, &point(pt)?)?))
}

#[no_mangle]
pub extern "C" fn lo_integrator_config_default() -> LoIntegratorConfig {
    let d = IntegratorConfig::default();
    LoIntegratorConfig {
        rel_tol: d.rel_tol,
        abs_tol: d.abs_tol,
        max_step: d.max_step,
        t_start: d.t_span.0,
        t_end: d.t_span.1,
        sample_every: d.sample_every,
        method: LoMethod::Dopri5,
    }
}

/// Integrates from `(x0, v0)`. When the run stops early the samples up to
/// the failure are still returned in `*out` alongside the error status.
///
/// # Safety
/// `x0`, `v0` point to 3 doubles; `cfg` may be null for defaults; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn lo_integrate(
    p: *const LoProfile,
    x0: *const f64,
    v0: *const f64,
    cfg: *const LoIntegratorConfig,
    out: *mut *mut LoTrajectory,
) -> LoStatus {
    guard(|| {
        let profile = &read(p)?.0;
        let (x0, v0) = (read_array(x0)?, read_array(v0)?);
        if out.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let c = cfg
            .as_ref()
            .copied()
            .unwrap_or_else(|| lo_integrator_config_default());
        let cfg = IntegratorConfig {
            rel_tol: c.rel_tol,
            abs_tol: c.abs_tol,
            max_step: c.max_step,
            t_span: (c.t_start, c.t_end),
            sample_every: c.sample_every,
            method: match c.method {
                LoMethod::Dopri5 => Method::Dopri5,
                LoMethod::Rk4 => Method::Rk4,
            },
        };
        match integrate(profile, x0, v0, &cfg) {
            Ok(t) => {
                *out = Box::into_raw(Box::new(LoTrajectory(t)));
                Ok(())
            }
            Err(f) => {
                if !f.partial.samples.is_empty() {
                    *out = Box::into_raw(Box::new(LoTrajectory(*f.partial)));
                }
                Err(f.error.into())
            }
        }
    })
}

/// Number of samples, 0 for null.
///
/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lo_trajectory_len(t: *const LoTrajectory) -> usize {
    t.as_ref().map_or(0, |t| t.0.samples.len())
}

/// Sample `index` as `t x1 x2 x3 v1 v2 v3 energy`.
///
/// # Safety
/// `t` must be a live handle; `out` points to 8 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn lo_trajectory_sample(
    t: *const LoTrajectory,
    index: usize,
    out: *mut f64,
) -> LoStatus {
    guard(|| {
        let traj = &read(t)?.0;
        let s = traj.samples.get(index).ok_or_else(|| {
            invalid(format!(
                "sample {index} out of range ({})",
                traj.samples.len()
            ))
        })?;
        let row = [
            s.t, s.x[0], s.x[1], s.x[2], s.v[0], s.v[1], s.v[2], s.energy,
        ];
        write_flat(out, &row)
    })
}

/// # Safety
/// `t` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn lo_trajectory_free(t: *mut LoTrajectory) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Closed-form families as a JSON array. `kind` is one of `helix`, `circle`,
/// `generator`, `sphere-circles`; `rho` is used by `helix` only and
/// `[lo, hi]` is the search bracket of the others. An empty array comes back
/// with `LoStatus::Empty`. Free the string with [`lo_string_free`].
///
/// # Safety
/// `kind` is NUL-terminated; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn lo_solve_json(
    p: *const LoProfile,
    kind: *const c_char,
    rho: f64,
    lo: f64,
    hi: f64,
    out: *mut *mut c_char,
) -> LoStatus {
    guard(|| {
        let profile = &read(p)?.0;
        if kind.is_null() || out.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let kind = CStr::from_ptr(kind)
            .to_str()
            .map_err(|e| invalid(e.to_string()))?;
        let families: Vec<Family> = match kind {
            "helix" => helix_omegas(profile, rho)?
                .into_iter()
                .map(Family::from)
                .collect(),
            "circle" => circle_radii(profile, (lo, hi))?
                .into_iter()
                .map(Family::from)
                .collect(),
            "generator" => generator_radii(profile, (lo, hi))?
                .into_iter()
                .map(Family::from)
                .collect(),
            "sphere-circles" => sphere_circle_families(profile, (lo, hi))?
                .into_iter()
                .map(Family::from)
                .collect(),
            other => return Err(invalid(format!("unknown family kind {other:?}"))),
        };
        let json = serde_json::to_string(&families)
            .map_err(|e| Fail(LoStatus::Numerical, e.to_string()))?;
        *out = CString::new(json)
            .map_err(|e| invalid(e.to_string()))?
            .into_raw();
        if families.is_empty() {
            Err(Fail(LoStatus::Empty, "no solutions".into()))
        } else {
            Ok(())
        }
    })
}
