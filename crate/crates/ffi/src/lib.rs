//! C ABI over `cgsme`.
//!
//! Every fallible function returns a [`CgsmeStatus`]; on failure the message is
//! available from [`cgsme_last_error`] on the same thread. Trajectories and exact
//! references are opaque handles released with their `_free` function.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cgsme::analysis::{integrated_distance, optimize_dt, Problem, Reference, SearchSpec};
use cgsme::bath::BathSpec;
use cgsme::config::RunConfig;
use cgsme::dephasing::{decay_function, DephasingMethod, TwoLevelSpec};
use cgsme::driver::run;
use cgsme::exact3::{amplitudes_to_density, solve_exact, AmplitudeState, ExactOptions, Trajectory, VSystemSpec};
use cgsme::lindblad::{build_cg_generator, build_rwa_generator, propagate, to_schroedinger, with_system_hamiltonian};
use cgsme::output::trajectory_table;
use cgsme::rates::rate_tensor;
use cgsme::specfun::expint_ei;
use cgsme::{Error, C64};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CgsmeStatus {
    Ok = 0,
    Domain = 1,
    Overflow = 2,
    DegenerateFrequencies = 3,
    Convergence = 4,
    StepSize = 5,
    NonUnitary = 6,
    Numerical = 7,
    Picture = 8,
    GridMismatch = 9,
    Boundary = 10,
    Config = 11,
    Io = 12,
    NullPointer = 13,
    OutOfRange = 14,
    Panic = 15,
}

impl From<&Error> for CgsmeStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) => CgsmeStatus::Domain,
            Error::Overflow(_) => CgsmeStatus::Overflow,
            Error::DegenerateFrequencies { .. } => CgsmeStatus::DegenerateFrequencies,
            Error::Convergence(_) => CgsmeStatus::Convergence,
            Error::StepSize { .. } => CgsmeStatus::StepSize,
            Error::NonUnitary { .. } => CgsmeStatus::NonUnitary,
            Error::Numerical(_) => CgsmeStatus::Numerical,
            Error::Picture(_) => CgsmeStatus::Picture,
            Error::GridMismatch(_) => CgsmeStatus::GridMismatch,
            Error::Boundary { .. } => CgsmeStatus::Boundary,
            Error::Config { .. } => CgsmeStatus::Config,
            Error::Io(_) => CgsmeStatus::Io,
        }
    }
}

/// Ohmic bath; `beta` may be `INFINITY`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CgsmeBath {
    pub eta: f64,
    pub omega_c: f64,
    pub g: f64,
    pub beta: f64,
}

impl From<CgsmeBath> for BathSpec {
    fn from(b: CgsmeBath) -> Self {
        BathSpec { eta: b.eta, omega_c: b.omega_c, g: b.g, beta: b.beta }
    }
}

/// Transition frequencies of the V system.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CgsmeSystem {
    pub omega1: f64,
    pub omega2: f64,
}

impl From<CgsmeSystem> for VSystemSpec {
    fn from(s: CgsmeSystem) -> Self {
        VSystemSpec::new(s.omega1, s.omega2)
    }
}

/// Exact-solver settings.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CgsmeSolver {
    pub t_max: f64,
    pub step: f64,
    pub subsample: usize,
    /// Initially occupied level, 0, 1 or 2.
    pub initial_level: usize,
}

/// 2×2 rate and Lamb-shift matrices, row-major.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CgsmeRates {
    pub dt: f64,
    pub gamma_re: [f64; 4],
    pub gamma_im: [f64; 4],
    pub lamb_re: [f64; 4],
    pub lamb_im: [f64; 4],
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CgsmeOptimum {
    pub dt_opt: f64,
    pub objective: f64,
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    pub evaluations: usize,
}

/// Decay function selector for [`cgsme_dephasing_decay`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CgsmeDephasing {
    Exact = 0,
    CoarseGrained = 1,
    RotatingWave = 2,
}

/// Schrödinger-picture density matrices on a time grid.
pub struct CgsmeTrajectory {
    inner: Trajectory,
}

/// Exact reference run reused across objective evaluations.
pub struct CgsmeReference {
    inner: Reference,
}

/// Number of doubles per trajectory row: `t`, three populations, then real and
/// imaginary parts of `ρ₀₁`, `ρ₀₂`, `ρ₁₂`.
pub const CGSME_TRAJECTORY_COLUMNS: usize = 10;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard<F: FnOnce() -> Result<(), (CgsmeStatus, String)>>(f: F) -> CgsmeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            CgsmeStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CgsmeStatus::Panic
        }
    }
}

type Outcome = Result<(), (CgsmeStatus, String)>;

fn lift<T>(r: cgsme::Result<T>) -> Result<T, (CgsmeStatus, String)> {
    r.map_err(|e| (CgsmeStatus::from(&e), e.to_string()))
}

fn null(name: &str) -> (CgsmeStatus, String) {
    (CgsmeStatus::NullPointer, format!("`{name}` is null"))
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, (CgsmeStatus, String)> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn write<T>(p: *mut T, name: &str, v: T) -> Outcome {
    if p.is_null() {
        return Err(null(name));
    }
    p.write(v);
    Ok(())
}

fn initial(level: usize) -> Result<AmplitudeState, (CgsmeStatus, String)> {
    if level > 2 {
        return Err((CgsmeStatus::OutOfRange, format!("initial_level must be 0, 1 or 2, got {level}")));
    }
    Ok(AmplitudeState::basis(level))
}

fn options(s: &CgsmeSolver) -> ExactOptions {
    ExactOptions::new(s.t_max, s.step).with_subsample(s.subsample)
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn cgsme_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cgsme_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Principal-branch exponential integral `Ei(re + i·im)`.
#[no_mangle]
pub unsafe extern "C" fn cgsme_expint_ei(re: f64, im: f64, out_re: *mut f64, out_im: *mut f64) -> CgsmeStatus {
    guard(|| {
        if out_re.is_null() || out_im.is_null() {
            return Err(null("out"));
        }
        let v = lift(expint_ei(C64::new(re, im)))?;
        write(out_re, "out_re", v.re)?;
        write(out_im, "out_im", v.im)
    })
}

/// Coarse-grained rate and Lamb-shift matrices at coarse-graining time `dt`.
#[no_mangle]
pub unsafe extern "C" fn cgsme_rate_tensor(
    bath: *const CgsmeBath,
    system: *const CgsmeSystem,
    dt: f64,
    out: *mut CgsmeRates,
) -> CgsmeStatus {
    guard(|| {
        let bath: BathSpec = (*deref(bath, "bath")?).into();
        let sys: VSystemSpec = (*deref(system, "system")?).into();
        let r = lift(rate_tensor(&bath, &sys, dt))?;
        let mut o = CgsmeRates { dt: r.dt, ..Default::default() };
        for j in 0..2 {
            for k in 0..2 {
                o.gamma_re[2 * j + k] = r.gamma[j][k].re;
                o.gamma_im[2 * j + k] = r.gamma[j][k].im;
                o.lamb_re[2 * j + k] = r.lamb[j][k].re;
                o.lamb_im[2 * j + k] = r.lamb[j][k].im;
            }
        }
        write(out, "out", o)
    })
}

/// Exact V-system dynamics in the Schrödinger picture.
#[no_mangle]
pub unsafe extern "C" fn cgsme_solve_exact(
    bath: *const CgsmeBath,
    system: *const CgsmeSystem,
    solver: *const CgsmeSolver,
    out: *mut *mut CgsmeTrajectory,
) -> CgsmeStatus {
    guard(|| {
        let bath: BathSpec = (*deref(bath, "bath")?).into();
        let sys: VSystemSpec = (*deref(system, "system")?).into();
        let s = deref(solver, "solver")?;
        let psi = initial(s.initial_level)?;
        let traj = lift(solve_exact(&sys, &bath, &psi, &options(s)).and_then(|t| to_schroedinger(&t, &sys)))?;
        write(out, "out", Box::into_raw(Box::new(CgsmeTrajectory { inner: traj })))
    })
}

/// Markovian dynamics on the exact solver's output grid: coarse-grained when
/// `dt > 0`, rotating-wave when `dt` is zero.
#[no_mangle]
pub unsafe extern "C" fn cgsme_solve_markov(
    bath: *const CgsmeBath,
    system: *const CgsmeSystem,
    solver: *const CgsmeSolver,
    dt: f64,
    out: *mut *mut CgsmeTrajectory,
) -> CgsmeStatus {
    guard(|| {
        let bath: BathSpec = (*deref(bath, "bath")?).into();
        let sys: VSystemSpec = (*deref(system, "system")?).into();
        let s = deref(solver, "solver")?;
        let psi = initial(s.initial_level)?;
        let l = lift(if dt == 0.0 { build_rwa_generator(&sys, &bath) } else { build_cg_generator(&sys, &bath, dt) })?;
        let l = lift(with_system_hamiltonian(&l, &sys))?;
        let traj = lift(propagate(&l, &amplitudes_to_density(&psi), &options(s).sample_times()))?;
        write(out, "out", Box::into_raw(Box::new(CgsmeTrajectory { inner: traj })))
    })
}

/// Number of rows; zero for a null handle.
#[no_mangle]
pub unsafe extern "C" fn cgsme_trajectory_len(traj: *const CgsmeTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.inner.len())
}

/// Copy row `index` into `out`, which must hold [`CGSME_TRAJECTORY_COLUMNS`] doubles.
#[no_mangle]
pub unsafe extern "C" fn cgsme_trajectory_row(
    traj: *const CgsmeTrajectory,
    index: usize,
    out: *mut f64,
) -> CgsmeStatus {
    guard(|| {
        let t = deref(traj, "traj")?;
        if out.is_null() {
            return Err(null("out"));
        }
        if index >= t.inner.len() {
            return Err((CgsmeStatus::OutOfRange, format!("row {index} of {}", t.inner.len())));
        }
        let single = Trajectory::new(vec![t.inner.times[index]], vec![t.inner.states[index]], t.inner.picture);
        let row = &trajectory_table(&lift(single)?).rows[0];
        ptr::copy_nonoverlapping(row.as_ptr(), out, CGSME_TRAJECTORY_COLUMNS);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn cgsme_trajectory_free(traj: *mut CgsmeTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Time-averaged trace distance between two trajectories on the same grid.
#[no_mangle]
pub unsafe extern "C" fn cgsme_integrated_distance(
    a: *const CgsmeTrajectory,
    b: *const CgsmeTrajectory,
    out: *mut f64,
) -> CgsmeStatus {
    guard(|| {
        let d = lift(integrated_distance(&deref(a, "a")?.inner, &deref(b, "b")?.inner))?;
        write(out, "out", d)
    })
}

/// Solve the exact dynamics once for repeated objective evaluations.
#[no_mangle]
pub unsafe extern "C" fn cgsme_reference_new(
    bath: *const CgsmeBath,
    system: *const CgsmeSystem,
    solver: *const CgsmeSolver,
    out: *mut *mut CgsmeReference,
) -> CgsmeStatus {
    guard(|| {
        let problem = Problem {
            sys: (*deref(system, "system")?).into(),
            bath: (*deref(bath, "bath")?).into(),
            psi0: initial(deref(solver, "solver")?.initial_level)?,
            exact: options(deref(solver, "solver")?),
        };
        let r = lift(Reference::compute(&problem))?;
        write(out, "out", Box::into_raw(Box::new(CgsmeReference { inner: r })))
    })
}

/// Integrated distance of the coarse-grained dynamics at `dt` from the reference.
#[no_mangle]
pub unsafe extern "C" fn cgsme_reference_objective(
    reference: *const CgsmeReference,
    dt: f64,
    out: *mut f64,
) -> CgsmeStatus {
    guard(|| {
        let v = lift(deref(reference, "reference")?.inner.objective(dt))?;
        write(out, "out", v)
    })
}

/// Integrated distance of the rotating-wave dynamics from the reference.
#[no_mangle]
pub unsafe extern "C" fn cgsme_reference_rwa_objective(reference: *const CgsmeReference, out: *mut f64) -> CgsmeStatus {
    guard(|| {
        let v = lift(deref(reference, "reference")?.inner.rwa_objective())?;
        write(out, "out", v)
    })
}

/// Log-grid scan of `n_grid` points in `[lo, hi]` refined by golden section to `xatol`.
#[no_mangle]
pub unsafe extern "C" fn cgsme_optimize_dt(
    reference: *const CgsmeReference,
    lo: f64,
    hi: f64,
    n_grid: usize,
    xatol: f64,
    out: *mut CgsmeOptimum,
) -> CgsmeStatus {
    guard(|| {
        let r = deref(reference, "reference")?;
        let res = lift(optimize_dt(&r.inner, &SearchSpec { lo, hi, n_grid, xatol }))?;
        let o = CgsmeOptimum {
            dt_opt: res.dt_opt,
            objective: res.objective,
            bracket_lo: res.bracket.0,
            bracket_hi: res.bracket.1,
            evaluations: res.evaluations,
        };
        write(out, "out", o)
    })
}

#[no_mangle]
pub unsafe extern "C" fn cgsme_reference_free(reference: *mut CgsmeReference) {
    if !reference.is_null() {
        drop(Box::from_raw(reference));
    }
}

/// Two-level dephasing decay function `Γ(t)`; `dt` is used by the coarse-grained method only.
#[no_mangle]
pub unsafe extern "C" fn cgsme_dephasing_decay(
    bath: *const CgsmeBath,
    omega0: f64,
    method: CgsmeDephasing,
    t: f64,
    dt: f64,
    out: *mut f64,
) -> CgsmeStatus {
    guard(|| {
        let spec = TwoLevelSpec { omega0, bath: (*deref(bath, "bath")?).into() };
        let m = match method {
            CgsmeDephasing::Exact => DephasingMethod::Exact,
            CgsmeDephasing::CoarseGrained => DephasingMethod::Cg { dt },
            CgsmeDephasing::RotatingWave => DephasingMethod::Rwa,
        };
        let v = lift(decay_function(&spec, t, m))?;
        write(out, "out", v)
    })
}

/// Run a JSON run configuration as the command-line tool would, writing its artifacts.
#[no_mangle]
pub unsafe extern "C" fn cgsme_run_json(config: *const c_char) -> CgsmeStatus {
    guard(|| {
        if config.is_null() {
            return Err(null("config"));
        }
        let text =
            CStr::from_ptr(config).to_str().map_err(|e| (CgsmeStatus::Config, format!("config is not UTF-8: {e}")))?;
        let cfg = lift(RunConfig::from_json(text))?;
        lift(run(&cfg)).map(|_| ())
    })
}
