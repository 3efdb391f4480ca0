//! Task dispatch: turn a validated [`RunConfig`] into artifact files.

use std::path::PathBuf;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{distance_series, optimize_dt, robustness_scan, Reference, ScanRow};
use crate::config::{Format, RunConfig, Task};
use crate::dephasing::{decay_function, evolve_dephasing, DephasingMethod};
use crate::error::Result;
use crate::exact3::{amplitudes_to_density, solve_exact, Trajectory};
use crate::lindblad::{build_cg_generator, build_rwa_generator, propagate, to_schroedinger, with_system_hamiltonian};
use crate::output::{artifact_path, rates_table, trajectory_table, write_record, write_table, Provenance, Table};
use crate::rates::rate_scan;

/// Run `cfg` and return the paths written, in a fixed order.
pub fn run(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    cfg.check()?;
    match cfg.task {
        Task::Exact => run_exact(cfg),
        Task::Cg | Task::Rwa => run_markov(cfg),
        Task::Compare => run_compare(cfg),
        Task::Optimize => run_optimize(cfg),
        Task::RatesScan => run_rates(cfg),
        Task::Dephasing => run_dephasing(cfg),
        Task::Sweep => run_sweep(cfg),
    }
}

fn emit_trajectory(cfg: &RunConfig, suffix: &str, traj: &Trajectory) -> Result<PathBuf> {
    let path = artifact_path(&cfg.out, suffix, cfg.format);
    write_table(&path, cfg.format, &Provenance::new(cfg, &traj.times), &trajectory_table(traj))?;
    Ok(path)
}

fn load_reference(cfg: &RunConfig) -> Result<Reference> {
    match cfg.cache_path() {
        Some(dir) => Reference::cached(&cfg.problem(), &dir),
        None => Reference::compute(&cfg.problem()),
    }
}

fn run_exact(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let traj = match cfg.cache_path() {
        Some(_) => load_reference(cfg)?.exact,
        None => to_schroedinger(
            &solve_exact(&cfg.system(), &cfg.bath(), &cfg.initial_state(), &cfg.exact_options())?,
            &cfg.system(),
        )?,
    };
    Ok(vec![emit_trajectory(cfg, "", &traj)?])
}

fn run_markov(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let (sys, bath) = (cfg.system(), cfg.bath());
    let l = match cfg.dt {
        Some(dt) if cfg.task == Task::Cg => build_cg_generator(&sys, &bath, dt)?,
        _ => build_rwa_generator(&sys, &bath)?,
    };
    let l = with_system_hamiltonian(&l, &sys)?;
    let times = cfg.exact_options().sample_times();
    let traj = propagate(&l, &amplitudes_to_density(&cfg.initial_state()), &times)?;
    Ok(vec![emit_trajectory(cfg, "", &traj)?])
}

/// Summary record of an optimization.
#[derive(Debug, Clone, Serialize)]
pub struct OptimizeRecord {
    pub params: RunConfig,
    pub dt_opt: f64,
    pub objective: f64,
    pub rwa_objective: f64,
    pub bracket: (f64, f64),
    pub evaluations: usize,
    /// Coarse scan as `(dt, objective)` pairs.
    pub grid: Vec<(f64, f64)>,
    /// Objective at `dt_opt/2`, `2·dt_opt` and any requested `dt_values`.
    pub robustness: Vec<ScanRow>,
}

fn optimize_record(cfg: &RunConfig, reference: &Reference) -> Result<OptimizeRecord> {
    let res = optimize_dt(reference, &cfg.search())?;
    let mut probes = vec![0.5 * res.dt_opt, 2.0 * res.dt_opt];
    probes.extend(cfg.dt_values.iter().flatten().copied());
    let robustness = robustness_scan(reference, &probes)?;
    Ok(OptimizeRecord {
        params: cfg.clone(),
        dt_opt: res.dt_opt,
        objective: res.objective,
        rwa_objective: reference.rwa_objective()?,
        bracket: res.bracket,
        evaluations: res.evaluations,
        grid: res.scan,
        robustness,
    })
}

fn run_optimize(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let reference = load_reference(cfg)?;
    let record = optimize_record(cfg, &reference)?;
    let grid: Vec<f64> = record.grid.iter().map(|p| p.0).collect();
    let prov = Provenance::new(cfg, &grid);
    let json = artifact_path(&cfg.out, "", Format::Json);
    write_record(&json, &prov, &record)?;
    let mut out = vec![json];
    if cfg.format == Format::Csv {
        let mut table = Table::new(&["dt", "objective", "rwa_objective"]);
        for (dt, v) in &record.grid {
            table.push(vec![*dt, *v, record.rwa_objective]);
        }
        let path = artifact_path(&cfg.out, "_scan", Format::Csv);
        write_table(&path, Format::Csv, &prov, &table)?;
        out.push(path);
    }
    Ok(out)
}

fn run_compare(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let reference = load_reference(cfg)?;
    let (dt, record) = match cfg.dt {
        Some(dt) => (dt, None),
        None => {
            let r = optimize_record(cfg, &reference)?;
            (r.dt_opt, Some(r))
        }
    };
    let cg = reference.cg_trajectory(dt)?;
    let rwa = reference.rwa_trajectory()?;
    let d_cg = distance_series(&cg, &reference.exact)?;
    let d_rwa = distance_series(&rwa, &reference.exact)?;
    let mut out = vec![
        emit_trajectory(cfg, "_exact", &reference.exact)?,
        emit_trajectory(cfg, "_cg", &cg)?,
        emit_trajectory(cfg, "_rwa", &rwa)?,
    ];
    let mut table = Table::new(&["t", "distance_cg", "distance_rwa"]);
    for (k, t) in reference.times().iter().enumerate() {
        table.push(vec![*t, d_cg[k], d_rwa[k]]);
    }
    let prov = Provenance::new(cfg, reference.times());
    let path = artifact_path(&cfg.out, "_distance", cfg.format);
    write_table(&path, cfg.format, &prov, &table)?;
    out.push(path);
    if let Some(record) = record {
        let path = artifact_path(&cfg.out, "_optimize", Format::Json);
        write_record(&path, &prov, &record)?;
        out.push(path);
    }
    Ok(out)
}

fn run_rates(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let dts = cfg.scan_dts();
    let scan = rate_scan(&cfg.bath(), &cfg.system(), &dts)?;
    let path = artifact_path(&cfg.out, "", cfg.format);
    write_table(&path, cfg.format, &Provenance::new(cfg, &dts), &rates_table(&scan))?;
    Ok(vec![path])
}

fn run_dephasing(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let spec = cfg.two_level();
    let dt = cfg.dt.expect("validated");
    let times = cfg.exact_options().sample_times();
    let half = C64::new(0.5, 0.0);
    let plus = [[half, half], [half, half]];
    let rows: Vec<Vec<f64>> = times
        .par_iter()
        .map(|&t| {
            let rho = evolve_dephasing(&spec, &plus, t, DephasingMethod::Exact)?;
            Ok(vec![
                t,
                decay_function(&spec, t, DephasingMethod::Exact)?,
                decay_function(&spec, t, DephasingMethod::Cg { dt })?,
                decay_function(&spec, t, DephasingMethod::Rwa)?,
                rho[0][1].norm(),
            ])
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(&["t", "gamma_exact", "gamma_cg", "gamma_rwa", "|rho12|"]);
    table.rows = rows;
    let path = artifact_path(&cfg.out, "", cfg.format);
    write_table(&path, cfg.format, &Provenance::new(cfg, &times), &table)?;
    Ok(vec![path])
}

fn run_sweep(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let runs: Vec<RunConfig> = cfg
        .sweep
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let mut c = cfg.merged(o)?;
            c.sweep.clear();
            if o.get("out").is_none() {
                c.out = format!("{}_{i}", cfg.out);
            }
            Ok(c)
        })
        .collect::<Result<_>>()?;
    let results: Vec<Result<Vec<PathBuf>>> = runs.par_iter().map(run).collect();
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}
