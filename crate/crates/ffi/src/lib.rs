//! C ABI over the `memddg` simulator.
//!
//! Systems are opaque heap handles created from a preset name or a
//! configuration file and released with `memddg_system_free`. Every fallible
//! call returns a [`MemddgStatus`]; on failure the thread-local message from
//! `memddg_last_error` describes it. Arrays are copied through caller-owned
//! buffers whose lengths are passed explicitly.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use memddg::io::config::read_config;
use memddg::scenario::{make_preset, run_config, RunConfig};
use memddg::solver::{Reason, Silent};
use memddg::{Error, Vec3};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MemddgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Io = 4,
    InvalidMesh = 5,
    Numerical = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Why a run stopped.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MemddgReason {
    Converged = 0,
    MaxSteps = 1,
    Failed = 2,
}

/// Energy terms in nN·µm.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MemddgEnergy {
    pub bending: f64,
    pub surface: f64,
    pub pressure: f64,
    pub dirichlet: f64,
    pub adsorption: f64,
    pub regularization: f64,
    pub external: f64,
    pub total: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MemddgRunReport {
    pub reason: MemddgReason,
    pub steps: usize,
    pub time: f64,
    pub residual: f64,
    pub chem_residual: f64,
}

/// Opaque simulation handle.
pub struct MemddgSystem {
    config: RunConfig,
    system: memddg::physics::System,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> MemddgStatus {
    use Error::*;
    match e {
        Parse { .. } | UnknownKey { .. } | Type { .. } | MissingRequired(_) => MemddgStatus::Parse,
        Io(_) => MemddgStatus::Io,
        InvalidParams(_) | LengthMismatch(..) | UnknownPreset(_) | InvalidVertexIndex(..) | OutOfRangePhi { .. } => {
            MemddgStatus::InvalidArgument
        }
        NonPositiveVolume(_) | MissingPreferredArea | MissingReference | PhiOutOfBounds { .. } | LineSearchFailed(_)
        | Solve(_) => MemddgStatus::Numerical,
        _ => MemddgStatus::InvalidMesh,
    }
}

struct Failure(MemddgStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), format!("{}: {e}", e.kind()))
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MemddgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MemddgStatus::Ok,
        Ok(Err(Failure(s, m))) => {
            set_error(m);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            MemddgStatus::Panic
        }
    }
}

fn null() -> Failure {
    Failure(MemddgStatus::NullPointer, "null pointer argument".into())
}

unsafe fn handle<'a>(sys: *const MemddgSystem) -> Result<&'a MemddgSystem, Failure> {
    sys.as_ref().ok_or_else(null)
}

unsafe fn handle_mut<'a>(sys: *mut MemddgSystem) -> Result<&'a mut MemddgSystem, Failure> {
    sys.as_mut().ok_or_else(null)
}

unsafe fn string<'a>(s: *const c_char) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s).to_str().map_err(|_| Failure(MemddgStatus::InvalidArgument, "string is not UTF-8".into()))
}

unsafe fn out_slice<'a, T>(ptr: *mut T, len: usize, need: usize) -> Result<&'a mut [T], Failure> {
    if ptr.is_null() {
        return Err(null());
    }
    if len < need {
        return Err(Failure(MemddgStatus::BufferTooSmall, format!("buffer holds {len}, need {need}")));
    }
    Ok(std::slice::from_raw_parts_mut(ptr, need))
}

unsafe fn in_slice<'a, T>(ptr: *const T, len: usize, need: usize) -> Result<&'a [T], Failure> {
    if ptr.is_null() {
        return Err(null());
    }
    if len != need {
        return Err(Failure(MemddgStatus::InvalidArgument, format!("expected {need} values, got {len}")));
    }
    Ok(std::slice::from_raw_parts(ptr, need))
}

fn build(config: RunConfig, out: *mut *mut MemddgSystem) -> Result<(), Failure> {
    let system = config.build_system()?;
    let boxed = Box::new(MemddgSystem { config, system });
    // SAFETY: checked non-null by the callers
    unsafe { *out = Box::into_raw(boxed) };
    Ok(())
}

/// Message describing the last failure on this thread; empty if none.
/// Valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn memddg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn memddg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a system from a named preset.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn memddg_system_from_preset(name: *const c_char, out: *mut *mut MemddgSystem) -> MemddgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        build(make_preset(string(name)?)?, out)
    })
}

/// Creates a system from a configuration file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn memddg_system_from_config(path: *const c_char, out: *mut *mut MemddgSystem) -> MemddgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        build(read_config(Path::new(string(path)?))?, out)
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `sys` must come from a constructor above and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn memddg_system_free(sys: *mut MemddgSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// # Safety
/// `sys` must be a live handle or null; `out` valid or null.
#[no_mangle]
pub unsafe extern "C" fn memddg_system_vertex_count(sys: *const MemddgSystem, out: *mut usize) -> MemddgStatus {
    guard(|| {
        let s = handle(sys)?;
        *out.as_mut().ok_or_else(null)? = s.system.mesh.n_vertices();
        Ok(())
    })
}

/// # Safety
/// `sys` must be a live handle or null; `out` valid or null.
#[no_mangle]
pub unsafe extern "C" fn memddg_system_face_count(sys: *const MemddgSystem, out: *mut usize) -> MemddgStatus {
    guard(|| {
        let s = handle(sys)?;
        *out.as_mut().ok_or_else(null)? = s.system.mesh.n_faces();
        Ok(())
    })
}

/// Copies vertex indices of all faces, three per face, into `out`.
///
/// # Safety
/// `out` must hold `len` writable elements.
#[no_mangle]
pub unsafe extern "C" fn memddg_system_faces(sys: *const MemddgSystem, out: *mut usize, len: usize) -> MemddgStatus {
    guard(|| {
        let s = handle(sys)?;
        let tris = s.system.mesh.triangles();
        let buf = out_slice(out, len, 3 * tris.len())?;
        for (dst, t) in buf.chunks_exact_mut(3).zip(&tris) {
            dst.copy_from_slice(t);
        }
        Ok(())
    })
}

fn write_vec3(buf: &mut [f64], v: &[Vec3]) {
    for (dst, p) in buf.chunks_exact_mut(3).zip(v) {
        dst.copy_from_slice(p.as_slice());
    }
}

/// Copies positions as `x0 y0 z0 x1 ...` into `out`.
///
/// # Safety
/// `out` must hold `len` writable elements.
#[no_mangle]
pub unsafe extern "C" fn memddg_system_positions(sys: *const MemddgSystem, out: *mut f64, len: usize) -> MemddgStatus {
    guard(|| {
        let s = handle(sys)?;
        write_vec3(out_slice(out, len, 3 * s.system.pos.len())?, &s.system.pos);
        Ok(())
    })
}

/// Replaces positions; `len` must be three times the vertex count.
///
/// # Safety
/// `data` must hold `len` readable elements.
#[no_mangle]
pub unsafe extern "C" fn memddg_system_set_positions(sys: *mut MemddgSystem, data: *const f64, len: usize) -> MemddgStatus {
    guard(|| {
        let s = handle_mut(sys)?;
        let src = in_slice(data, len, 3 * s.system.pos.len())?;
        if src.iter().any(|x| !x.is_finite()) {
            return Err(Failure(MemddgStatus::InvalidArgument, "non-finite position".into()));
        }
        for (p, c) in s.system.pos.iter_mut().zip(src.chunks_exact(3)) {
            *p = Vec3::new(c[0], c[1], c[2]);
        }
        Ok(())
    })
}

/// Copies the protein density into `out`.
///
/// # Safety
/// `out` must hold `len` writable elements.
#[no_mangle]
pub unsafe extern "C" fn memddg_system_phi(sys: *const MemddgSystem, out: *mut f64, len: usize) -> MemddgStatus {
    guard(|| {
        let s = handle(sys)?;
        out_slice(out, len, s.system.phi.len())?.copy_from_slice(&s.system.phi);
        Ok(())
    })
}

/// Replaces the protein density; every value must lie in `[0, 1]`.
///
/// # Safety
/// `data` must hold `len` readable elements.
#[no_mangle]
pub unsafe extern "C" fn memddg_system_set_phi(sys: *mut MemddgSystem, data: *const f64, len: usize) -> MemddgStatus {
    guard(|| {
        let s = handle_mut(sys)?;
        let src = in_slice(data, len, s.system.phi.len())?;
        if let Some(i) = src.iter().position(|p| !(0.0..=1.0).contains(p)) {
            return Err(Failure(MemddgStatus::InvalidArgument, format!("phi[{i}] = {} outside [0, 1]", src[i])));
        }
        s.system.phi.copy_from_slice(src);
        Ok(())
    })
}

/// # Safety
/// `sys` must be a live handle or null; `out` valid or null.
#[no_mangle]
pub unsafe extern "C" fn memddg_system_energy(sys: *const MemddgSystem, out: *mut MemddgEnergy) -> MemddgStatus {
    guard(|| {
        let s = handle(sys)?;
        let out = out.as_mut().ok_or_else(null)?;
        let e = s.system.energy()?;
        *out = MemddgEnergy {
            bending: e.bending,
            surface: e.surface,
            pressure: e.pressure,
            dirichlet: e.dirichlet,
            adsorption: e.adsorption,
            regularization: e.regularization,
            external: e.external,
            total: e.total,
        };
        Ok(())
    })
}

/// Copies the boundary-masked net force, three values per vertex.
///
/// # Safety
/// `out` must hold `len` writable elements.
#[no_mangle]
pub unsafe extern "C" fn memddg_system_forces(sys: *const MemddgSystem, out: *mut f64, len: usize) -> MemddgStatus {
    guard(|| {
        let s = handle(sys)?;
        let buf = out_slice(out, len, 3 * s.system.pos.len())?;
        write_vec3(buf, &s.system.forces()?.net);
        Ok(())
    })
}

/// Runs the configured solver for at most `max_steps` steps from the
/// current state; zero keeps the configured limit.
///
/// # Safety
/// `sys` must be a live handle or null; `out` valid or null.
#[no_mangle]
pub unsafe extern "C" fn memddg_system_run(sys: *mut MemddgSystem, max_steps: usize, out: *mut MemddgRunReport) -> MemddgStatus {
    guard(|| {
        let s = handle_mut(sys)?;
        let out = out.as_mut().ok_or_else(null)?;
        let mut cfg = s.config.clone();
        if max_steps > 0 {
            cfg.solver.max_steps = max_steps;
        }
        let r = run_config(&cfg, &mut s.system, &mut Silent)?.report;
        *out = MemddgRunReport {
            reason: match r.reason {
                Reason::Converged => MemddgReason::Converged,
                Reason::MaxSteps => MemddgReason::MaxSteps,
                Reason::Error(_) => MemddgReason::Failed,
            },
            steps: r.steps,
            time: r.time,
            residual: r.residual,
            chem_residual: r.chem_residual,
        };
        if let Reason::Error(m) = r.reason {
            set_error(m);
        }
        Ok(())
    })
}
