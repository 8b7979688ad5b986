//! C ABI over the `radnav` simulator.
//!
//! Scenarios and missions are opaque handles created and destroyed through
//! this interface. Every fallible call returns a [`RadnavStatus`]; on failure
//! [`radnav_last_error`] describes the problem until the next failing call
//! on the same thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use radnav::detector::{pd_k, pfa_k, threshold_k};
use radnav::harness::{cmd_map_fixed, cmd_mission, cmd_roc, Mission, RocOptions, ScenarioSource};
use radnav::numerics::{inv_reg_gamma_upper, marcum_q, reg_gamma_upper};
use radnav::radar::ScanNoise;
use radnav::{Error, Scenario};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadnavStatus {
    Ok = 0,
    /// A required pointer was null or a string was not UTF-8.
    InvalidArgument = 1,
    /// Input rejected: bad scenario, out-of-domain argument, illegal action.
    Validation = 2,
    /// I/O or other runtime failure.
    Runtime = 3,
    /// A Rust panic was caught at the boundary.
    Panic = 4,
}

/// Opaque scenario handle.
pub struct RadnavScenario {
    inner: Scenario,
    source: ScenarioSource,
}

/// Opaque mission handle.
pub struct RadnavMission {
    inner: Mission,
}

/// One mission step as seen from C.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RadnavStep {
    pub k: usize,
    pub cell: usize,
    pub x: usize,
    pub y: usize,
    /// 0 = north, 1 = east, 2 = south, 3 = west.
    pub action: u8,
    /// 1 if the target was declared present.
    pub decision: u8,
    pub explored: u8,
    pub epsilon: f64,
    pub chosen_q: f64,
    pub r_detection: f64,
    pub r_map: f64,
    pub entropy: f64,
    pub statistic: f64,
    pub distance_to_target: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    let c = CString::new(text).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Failure {
    Arg(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Run `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RadnavStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RadnavStatus::Ok,
        Ok(Err(Failure::Arg(msg))) => {
            set_error(msg);
            RadnavStatus::InvalidArgument
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            if e.is_validation() {
                RadnavStatus::Validation
            } else {
                RadnavStatus::Runtime
            }
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            set_error(format!("panic: {msg}"));
            RadnavStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Arg(format!("`{name}` is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Arg(format!("`{name}` is not valid UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| Failure::Arg(format!("`{name}` is null")))
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure::Arg(format!("`{name}` is null")))
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn radnav_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn radnav_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

fn new_scenario(source: ScenarioSource, out: &mut *mut RadnavScenario) -> Result<(), Failure> {
    let inner = source.parse()?;
    *out = Box::into_raw(Box::new(RadnavScenario { inner, source }));
    Ok(())
}

/// Parse a scenario from JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn radnav_scenario_from_json(
    json: *const c_char,
    out: *mut *mut RadnavScenario,
) -> RadnavStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let text = str_arg(json, "json")?;
        new_scenario(
            ScenarioSource {
                label: "ffi:json".to_string(),
                text: text.to_string(),
            },
            out,
        )
    })
}

/// Load a scenario file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn radnav_scenario_load(
    path: *const c_char,
    out: *mut *mut RadnavScenario,
) -> RadnavStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let path = str_arg(path, "path")?;
        new_scenario(ScenarioSource::from_path(path)?, out)
    })
}

/// The built-in reference room with a 16- or 100-element array.
///
/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn radnav_scenario_reference(
    n_elements: u32,
    out: *mut *mut RadnavScenario,
) -> RadnavStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        new_scenario(ScenarioSource::builtin(n_elements as usize)?, out)
    })
}

/// Release a scenario. Null is ignored.
///
/// # Safety
/// `s` must come from a `radnav_scenario_*` constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn radnav_scenario_free(s: *mut RadnavScenario) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Grid dimensions and cell count.
///
/// # Safety
/// `s` must be a live scenario; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn radnav_scenario_dims(
    s: *const RadnavScenario,
    width: *mut usize,
    height: *mut usize,
) -> RadnavStatus {
    guard(|| {
        let s = ref_arg(s, "scenario")?;
        *out_arg(width, "width")? = s.inner.grid.width;
        *out_arg(height, "height")? = s.inner.grid.height;
        Ok(())
    })
}

/// Start a mission on a copy of the scenario.
///
/// # Safety
/// `s` must be a live scenario and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn radnav_mission_new(
    s: *const RadnavScenario,
    seed: u64,
    out: *mut *mut RadnavMission,
) -> RadnavStatus {
    guard(|| {
        let s = ref_arg(s, "scenario")?;
        let out = out_arg(out, "out")?;
        *out = Box::into_raw(Box::new(RadnavMission {
            inner: Mission::new(s.inner.clone(), seed),
        }));
        Ok(())
    })
}

/// Release a mission. Null is ignored.
///
/// # Safety
/// `m` must come from [`radnav_mission_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn radnav_mission_free(m: *mut RadnavMission) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Advance one step. `*done` is set to 1 (and `*step` left untouched) once
/// the mission is over.
///
/// # Safety
/// `m` must be a live mission; `step` and `done` must be writable.
#[no_mangle]
pub unsafe extern "C" fn radnav_mission_step(
    m: *mut RadnavMission,
    step: *mut RadnavStep,
    done: *mut u8,
) -> RadnavStatus {
    guard(|| {
        let m = out_arg(m, "mission")?;
        let step = out_arg(step, "step")?;
        let done = out_arg(done, "done")?;
        match m.inner.advance()? {
            None => *done = 1,
            Some(r) => {
                *done = 0;
                *step = RadnavStep {
                    k: r.k,
                    cell: r.cell,
                    x: r.x,
                    y: r.y,
                    action: r.action.code(),
                    decision: u8::from(r.decision == "D1"),
                    explored: u8::from(r.explored),
                    epsilon: r.epsilon,
                    chosen_q: r.chosen_q,
                    r_detection: r.r_detection,
                    r_map: r.r_map,
                    entropy: r.entropy,
                    statistic: r.statistic,
                    distance_to_target: r.distance_to_target,
                };
            }
        }
        Ok(())
    })
}

/// Current UAV cell and time index.
///
/// # Safety
/// `m` must be a live mission; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn radnav_mission_pose(
    m: *const RadnavMission,
    cell: *mut usize,
    k: *mut usize,
) -> RadnavStatus {
    guard(|| {
        let m = ref_arg(m, "mission")?;
        *out_arg(cell, "cell")? = m.inner.state().pose.cell;
        *out_arg(k, "k")? = m.inner.state().k;
        Ok(())
    })
}

unsafe fn copy_out(values: &[f64], buf: *mut f64, len: usize) -> Result<(), Failure> {
    if buf.is_null() {
        return Err(Failure::Arg("`buf` is null".into()));
    }
    if len != values.len() {
        return Err(Failure::Arg(format!(
            "buffer holds {len} values, {} required",
            values.len()
        )));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), buf, len);
    Ok(())
}

/// Copy per-cell occupancy probabilities into `buf` (exactly one value per cell).
///
/// # Safety
/// `m` must be a live mission and `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn radnav_mission_occupancy(
    m: *const RadnavMission,
    buf: *mut f64,
    len: usize,
) -> RadnavStatus {
    guard(|| {
        let m = ref_arg(m, "mission")?;
        copy_out(&m.inner.state().belief.probabilities(), buf, len)
    })
}

/// Copy the target-location belief into `buf` (exactly one value per cell).
///
/// # Safety
/// `m` must be a live mission and `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn radnav_mission_target_belief(
    m: *const RadnavMission,
    buf: *mut f64,
    len: usize,
) -> RadnavStatus {
    guard(|| {
        let m = ref_arg(m, "mission")?;
        copy_out(&m.inner.state().target.mass, buf, len)
    })
}

/// Run the `mission` command, writing artifacts under `out_dir`.
///
/// # Safety
/// `s` must be a live scenario and `out_dir` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn radnav_run_mission(
    s: *const RadnavScenario,
    seed: u64,
    out_dir: *const c_char,
) -> RadnavStatus {
    guard(|| {
        let s = ref_arg(s, "scenario")?;
        let out = str_arg(out_dir, "out_dir")?;
        cmd_mission(&s.source, seed, Path::new(out))?;
        Ok(())
    })
}

/// Run the `roc` command with the scenario's trial count.
///
/// # Safety
/// `s` must be a live scenario and `out_dir` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn radnav_run_roc(
    s: *const RadnavScenario,
    seed: u64,
    workers: usize,
    out_dir: *const c_char,
) -> RadnavStatus {
    guard(|| {
        let s = ref_arg(s, "scenario")?;
        let out = str_arg(out_dir, "out_dir")?;
        let opts = RocOptions {
            trials: None,
            workers,
        };
        cmd_roc(&s.source, seed, Path::new(out), opts)?;
        Ok(())
    })
}

/// Run the `map-fixed` command along a named trajectory.
///
/// # Safety
/// `s` must be a live scenario; `trajectory` and `out_dir` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn radnav_run_map_fixed(
    s: *const RadnavScenario,
    trajectory: *const c_char,
    seed: u64,
    noise: u8,
    out_dir: *const c_char,
) -> RadnavStatus {
    guard(|| {
        let s = ref_arg(s, "scenario")?;
        let name = str_arg(trajectory, "trajectory")?;
        let out = str_arg(out_dir, "out_dir")?;
        let noise = if noise == 0 {
            ScanNoise::Off
        } else {
            ScanNoise::Gaussian
        };
        cmd_map_fixed(&s.source, name, seed, Path::new(out), noise)?;
        Ok(())
    })
}

fn scalar(out: *mut f64, f: impl FnOnce() -> radnav::Result<f64>) -> RadnavStatus {
    guard(|| {
        // SAFETY: null is rejected; callers pass a writable double otherwise.
        let out = unsafe { out_arg(out, "out")? };
        *out = f()?;
        Ok(())
    })
}

/// Regularized upper incomplete gamma `Q(a, x)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn radnav_reg_gamma_upper(a: f64, x: f64, out: *mut f64) -> RadnavStatus {
    scalar(out, || reg_gamma_upper(a, x))
}

/// `x` such that `Q(a, x) = p`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn radnav_inv_reg_gamma_upper(a: f64, p: f64, out: *mut f64) -> RadnavStatus {
    scalar(out, || inv_reg_gamma_upper(a, p))
}

/// Generalized Marcum Q function `Q_h(a, b)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn radnav_marcum_q(h: f64, a: f64, b: f64, out: *mut f64) -> RadnavStatus {
    scalar(out, || marcum_q(h, a, b))
}

/// Energy-detector threshold for `k` real samples and false-alarm probability `pfa`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn radnav_detector_threshold(
    k: usize,
    pfa: f64,
    out: *mut f64,
) -> RadnavStatus {
    scalar(out, || threshold_k(k, pfa))
}

/// False-alarm probability of threshold `xi` with `k` samples.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn radnav_detector_pfa(k: usize, xi: f64, out: *mut f64) -> RadnavStatus {
    scalar(out, || pfa_k(k, xi))
}

/// Detection probability for threshold `xi`, `k` samples and noncentrality `lambda`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn radnav_detector_pd(
    k: usize,
    xi: f64,
    lambda: f64,
    out: *mut f64,
) -> RadnavStatus {
    scalar(out, || pd_k(k, xi, lambda))
}
