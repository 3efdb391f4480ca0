//! Trace-norm distances between trajectories and the search for the
//! coarse-graining time that brings the coarse-grained dynamics closest to the
//! exact reference.
//!
//! All comparisons happen in the Schrödinger picture: the exact interaction-picture
//! trajectory is rotated by `H_S`, and the Markovian generators are propagated
//! with `H_S` added.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bath::{gamma_rwa, BathSpec};
use crate::error::{Error, Result};
use crate::exact3::{
    amplitudes_to_density, solve_amplitudes, AmplitudeHistory, AmplitudeState, ExactOptions, Trajectory, VSystemSpec,
};
use crate::lindblad::{
    build_cg_generator, build_rwa_generator, hermitian_eigenvalues, propagate, to_schroedinger,
    with_system_hamiltonian, DensityMatrix3,
};

/// `½‖a - b‖₁`.
pub fn trace_distance(a: &DensityMatrix3, b: &DensityMatrix3) -> f64 {
    0.5 * hermitian_eigenvalues(&(a.0 - b.0)).iter().map(|v| v.abs()).sum::<f64>()
}

/// Pointwise trace distances along two trajectories on the same grid.
pub fn distance_series(a: &Trajectory, b: &Trajectory) -> Result<Vec<f64>> {
    if a.picture != b.picture {
        return Err(Error::Picture(format!("cannot compare {:?} with {:?} trajectories", a.picture, b.picture)));
    }
    if a.times.len() != b.times.len()
        || a.times.iter().zip(&b.times).any(|(x, y)| (x - y).abs() > 1e-12 * x.abs().max(1.0))
    {
        return Err(Error::GridMismatch(format!("grids of length {} and {} differ", a.len(), b.len())));
    }
    Ok(a.states.iter().zip(&b.states).map(|(x, y)| trace_distance(x, y)).collect())
}

/// Time average of the trace distance by the trapezoid rule.
pub fn integrated_distance(a: &Trajectory, b: &Trajectory) -> Result<f64> {
    let d = distance_series(a, b)?;
    let t = &a.times;
    if t.len() < 2 {
        return Err(Error::GridMismatch("need at least two time points".into()));
    }
    let area: f64 = t.windows(2).zip(d.windows(2)).map(|(tw, dw)| 0.5 * (tw[1] - tw[0]) * (dw[0] + dw[1])).sum();
    Ok(area / (t[t.len() - 1] - t[0]))
}

/// Default horizon: three relaxation times of the mean transition.
pub fn default_t_max(sys: &VSystemSpec, bath: &BathSpec) -> f64 {
    3.0 / gamma_rwa(bath, sys.mean())
}

/// A comparison problem: system, bath, initial amplitudes and exact-solver settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    pub sys: VSystemSpec,
    pub bath: BathSpec,
    pub psi0: AmplitudeState,
    pub exact: ExactOptions,
}

impl Problem {
    /// Key identifying the exact reference, hex SHA-256 of the canonical JSON.
    pub fn cache_key(&self) -> String {
        let text = serde_json::to_string(self).expect("problem serializes");
        hex(&Sha256::digest(text.as_bytes()))
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Exact reference trajectory for a [`Problem`], in the Schrödinger picture.
#[derive(Debug, Clone)]
pub struct Reference {
    pub problem: Problem,
    pub exact: Trajectory,
    pub rho0: DensityMatrix3,
}

#[derive(Serialize, Deserialize)]
struct CachedHistory {
    key: String,
    times: Vec<f64>,
    amplitudes: Vec<AmplitudeState>,
}

impl Reference {
    pub fn compute(problem: &Problem) -> Result<Self> {
        let history = solve_amplitudes(&problem.sys, &problem.bath, &problem.psi0, &problem.exact)?;
        Self::from_history(problem, &history)
    }

    fn from_history(problem: &Problem, history: &AmplitudeHistory) -> Result<Self> {
        let exact = to_schroedinger(&history.to_trajectory()?, &problem.sys)?;
        Ok(Reference { problem: *problem, exact, rho0: amplitudes_to_density(&problem.psi0) })
    }

    /// Load the exact run from `dir` when present, otherwise compute and store it.
    pub fn cached(problem: &Problem, dir: &Path) -> Result<Self> {
        let key = problem.cache_key();
        let path: PathBuf = dir.join(format!("exact-{key}.json"));
        if let Ok(text) = fs::read_to_string(&path) {
            if let Ok(c) = serde_json::from_str::<CachedHistory>(&text) {
                if c.key == key {
                    return Self::from_history(problem, &AmplitudeHistory { times: c.times, amplitudes: c.amplitudes });
                }
            }
        }
        let history = solve_amplitudes(&problem.sys, &problem.bath, &problem.psi0, &problem.exact)?;
        fs::create_dir_all(dir)?;
        let c = CachedHistory { key, times: history.times.clone(), amplitudes: history.amplitudes.clone() };
        fs::write(&path, serde_json::to_vec(&c)?)?;
        Self::from_history(problem, &history)
    }

    pub fn times(&self) -> &[f64] {
        &self.exact.times
    }

    /// Coarse-grained trajectory for `dt` on the reference grid.
    pub fn cg_trajectory(&self, dt: f64) -> Result<Trajectory> {
        let p = &self.problem;
        let l = with_system_hamiltonian(&build_cg_generator(&p.sys, &p.bath, dt)?, &p.sys)?;
        propagate(&l, &self.rho0, self.times())
    }

    /// Rotating-wave trajectory on the reference grid.
    pub fn rwa_trajectory(&self) -> Result<Trajectory> {
        let p = &self.problem;
        let l = with_system_hamiltonian(&build_rwa_generator(&p.sys, &p.bath)?, &p.sys)?;
        propagate(&l, &self.rho0, self.times())
    }

    /// Integrated distance between the coarse-grained and exact dynamics.
    pub fn objective(&self, dt: f64) -> Result<f64> {
        integrated_distance(&self.cg_trajectory(dt)?, &self.exact)
    }

    pub fn rwa_objective(&self) -> Result<f64> {
        integrated_distance(&self.rwa_trajectory()?, &self.exact)
    }
}

/// Log-spaced scan range for the coarse-graining time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchSpec {
    pub lo: f64,
    pub hi: f64,
    pub n_grid: usize,
    /// Absolute tolerance of the golden-section refinement.
    pub xatol: f64,
}

impl SearchSpec {
    /// `[1/ω_c, 0.5/g]` with 40 points.
    pub fn default_for(bath: &BathSpec) -> Self {
        SearchSpec { lo: 1.0 / bath.omega_c, hi: 0.5 / bath.g, n_grid: 40, xatol: 1e-2 }
    }

    pub fn grid(&self) -> Vec<f64> {
        log_grid(self.lo, self.hi, self.n_grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo > 0.0 && self.hi > self.lo && self.hi.is_finite()) {
            return Err(Error::config("search", format!("need 0 < lo < hi, got [{}, {}]", self.lo, self.hi)));
        }
        if self.n_grid < 3 {
            return Err(Error::config("search.n_grid", "need at least 3 points"));
        }
        if !(self.xatol > 0.0) {
            return Err(Error::config("search.xatol", "must be positive"));
        }
        Ok(())
    }
}

/// `n` points spaced evenly in `log` between `lo` and `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| match k {
            0 => lo,
            k if k == n - 1 => hi,
            k => (a + (b - a) * k as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

/// Outcome of [`optimize_dt`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerResult {
    pub dt_opt: f64,
    pub objective: f64,
    pub bracket: (f64, f64),
    pub evaluations: usize,
    /// The coarse scan as `(dt, objective)` pairs.
    pub scan: Vec<(f64, f64)>,
}

/// Golden-section minimization of `f` on `[a, b]` until the bracket is
/// narrower than `xatol`. Returns `(x, f(x), evaluations)`.
pub fn golden_section<F: FnMut(f64) -> Result<f64>>(mut f: F, a: f64, b: f64, xatol: f64) -> Result<(f64, f64, usize)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (a, b);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut evals = 2;
    while (b - a).abs() > xatol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
        evals += 1;
    }
    Ok(if fc <= fd { (c, fc, evals) } else { (d, fd, evals) })
}

/// Minimize the integrated distance over the coarse-graining time: a log-grid
/// scan followed by golden-section refinement between the neighbours of the
/// best grid point.
pub fn optimize_dt(reference: &Reference, search: &SearchSpec) -> Result<OptimizerResult> {
    search.validate()?;
    let grid = search.grid();
    let values: Vec<f64> = grid.par_iter().map(|&dt| reference.objective(dt)).collect::<Result<_>>()?;
    // Ties go to the smaller Δt.
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    if best == 0 || best == grid.len() - 1 {
        return Err(Error::Boundary { dt_opt: grid[best], lo: search.lo, hi: search.hi });
    }
    let (lo, hi) = (grid[best - 1], grid[best + 1]);
    let (x, fx, evals) = golden_section(|dt| reference.objective(dt), lo, hi, search.xatol)?;
    let (dt_opt, objective) = if fx <= values[best] { (x, fx) } else { (grid[best], values[best]) };
    Ok(OptimizerResult {
        dt_opt,
        objective,
        bracket: (lo, hi),
        evaluations: grid.len() + evals,
        scan: grid.into_iter().zip(values).collect(),
    })
}

/// One row of a robustness table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub dt: f64,
    pub objective: f64,
    pub rwa_objective: f64,
}

/// Objective at each `dt` next to the rotating-wave objective on the same horizon.
pub fn robustness_scan(reference: &Reference, dt_values: &[f64]) -> Result<Vec<ScanRow>> {
    let rwa = reference.rwa_objective()?;
    dt_values
        .par_iter()
        .map(|&dt| Ok(ScanRow { dt, objective: reference.objective(dt)?, rwa_objective: rwa }))
        .collect()
}

/// Distance of each trajectory in `others` from `reference`, sample by sample.
pub fn distance_table(reference: &Trajectory, others: &[&Trajectory]) -> Result<Vec<Vec<f64>>> {
    others.iter().map(|o| distance_series(o, reference)).collect()
}

/// Largest population of level `j` along a trajectory.
pub fn max_excursion(traj: &Trajectory, j: usize) -> f64 {
    traj.states.iter().map(|r| r.populations()[j].abs()).fold(0.0, f64::max)
}
