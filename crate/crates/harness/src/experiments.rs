//! Experiment drivers. Each driver returns its data; the `write_*` companions
//! turn it into CSV files under the configured output directory.

use std::path::PathBuf;
use std::time::Duration;

use apwb_core::model::hydrostatic_equilibrium;
use apwb_core::reference::{run_limit, LimitSolver};
use apwb_core::scheme::{cfl_dt, run, run_with, DEFAULT_RHO_FLOOR};
use apwb_core::{
    Error as CoreError, Grid, ModelParams, Potential, PotentialKind, Reconstruction, RunOutput,
    SchemeOptions, State, Variant,
};
use rayon::prelude::*;

use crate::config::Config;
use crate::error::HarnessError;
use crate::metrics::{l1_error, restrict, total_variation};
use crate::output::{num, write_csv, write_profile, Metadata, SERIES_COLUMNS, TABLE_COLUMNS};

pub const TABLE_EPSILONS: [f64; 4] = [1.0, 0.1, 0.01, 0.001];
pub const TABLE_POTENTIALS: [PotentialKind; 3] = [
    PotentialKind::Linear,
    PotentialKind::Quadratic,
    PotentialKind::Sinusoidal,
];

fn options(cfg: &Config) -> SchemeOptions {
    SchemeOptions::new(
        cfg.boundary(),
        cfg.recon.reconstruction(),
        cfg.variant.variant(),
    )
}

fn grid(a: f64, b: f64, cells: usize) -> Result<Grid, HarnessError> {
    Grid::new(a, b, cells).map_err(|e| HarnessError::Config(e.to_string()))
}

fn steps_for(t_final: f64, dt: f64) -> usize {
    (t_final / dt - 1e-9).ceil().max(1.0) as usize
}

/// Number of steps a run of `t_final` takes on `cells` cells of `[a, b]`.
pub fn projected_steps(
    params: &ModelParams,
    kind: PotentialKind,
    a: f64,
    b: f64,
    cells: usize,
    t_final: f64,
) -> Result<usize, HarnessError> {
    let g = grid(a, b, cells)?;
    let phi = Potential::sample(kind, &g);
    Ok(steps_for(t_final, cfl_dt(&g, &phi, params)))
}

fn run_metadata(cfg: &Config, output: &RunOutput) -> Metadata {
    Metadata::new(cfg.echo())
        .with("steps", output.steps)
        .with("dt", num(output.dt))
        .with(crate::output::WALL_TIME_KEY, wall(output.wall_time))
}

fn wall(d: Duration) -> String {
    format!("{:.3}", d.as_secs_f64())
}

fn file(cfg: &Config, name: String) -> PathBuf {
    cfg.out.join(name)
}

/// A solver run together with its mesh.
#[derive(Debug, Clone)]
pub struct ProfileRun {
    pub label: String,
    pub grid: Grid,
    pub output: RunOutput,
}

fn sampled_equilibrium(phi: &Potential, params: &ModelParams) -> Result<Vec<f64>, HarnessError> {
    phi.interior()
        .iter()
        .map(|&f| hydrostatic_equilibrium(f, 1.0, params))
        .collect::<Result<_, _>>()
        .map_err(|e| HarnessError::Config(format!("equilibrium: {e}")))
}

fn bump(x: f64, zeta: f64) -> f64 {
    zeta * (-100.0 * (x - 0.5) * (x - 0.5)).exp()
}

// ---------------------------------------------------------------- run

/// Hydrostatic density (C = 1) plus the ζ-bump on [0, 1], advanced with the
/// configured scheme.
pub fn single_run(cfg: &Config) -> Result<ProfileRun, HarnessError> {
    let params = cfg.params()?;
    let g = grid(0.0, 1.0, cfg.cells)?;
    let phi = Potential::sample(cfg.potential.kind(), &g);
    let eq = sampled_equilibrium(&phi, &params)?;
    let rho = eq
        .iter()
        .zip(&g.centers)
        .map(|(r, &x)| r + bump(x, cfg.zeta))
        .collect();
    let output = run(
        &State::at_rest(rho),
        &phi,
        &g,
        cfg.t_final,
        &params,
        &options(cfg),
    )
    .map_err(|e| HarnessError::solver("run", e))?;
    Ok(ProfileRun {
        label: "run".into(),
        grid: g,
        output,
    })
}

pub fn write_single_run(cfg: &Config, r: &ProfileRun) -> Result<Vec<PathBuf>, HarnessError> {
    let path = file(cfg, format!("run_n{}.csv", r.grid.n_cells));
    write_profile(
        &path,
        &run_metadata(cfg, &r.output),
        &r.grid.centers,
        &r.output.state,
        DEFAULT_RHO_FLOOR,
    )?;
    Ok(vec![path])
}

// ---------------------------------------------------------------- sod

pub fn sod_initial(g: &Grid) -> State {
    State::at_rest(
        g.centers
            .iter()
            .map(|&x| if x < 0.5 { 1.0 } else { 0.125 })
            .collect(),
    )
}

/// Limit-equation solution on the coarse mesh, run with the scheme's time step.
#[derive(Debug, Clone)]
pub struct LimitReference {
    pub solver: LimitSolver,
    pub grid: Grid,
    pub rho: Vec<f64>,
    pub l1_distance: f64,
}

#[derive(Debug, Clone)]
pub struct SodResult {
    pub runs: Vec<ProfileRun>,
    pub reference: Option<LimitReference>,
}

/// Sod data on [0, 1]. For ε = 1 a tenfold refined run is added (unless
/// `fast`); for ε ≤ 0.01 the matching limit solver provides a reference.
pub fn sod(cfg: &Config) -> Result<SodResult, HarnessError> {
    let params = cfg.params()?;
    let opts = options(cfg);
    let mut meshes = vec![cfg.cells];
    if cfg.eps == 1.0 && !cfg.fast {
        meshes.push(cfg.cells * 10);
    }
    let runs = meshes
        .into_iter()
        .map(|n| {
            let g = grid(0.0, 1.0, n)?;
            let phi = Potential::sample(cfg.potential.kind(), &g);
            let output = run(&sod_initial(&g), &phi, &g, cfg.t_final, &params, &opts)
                .map_err(|e| HarnessError::solver(format!("sod N={n}"), e))?;
            Ok(ProfileRun {
                label: format!("n{n}"),
                grid: g,
                output,
            })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;

    let reference = if cfg.eps <= 1e-2 {
        let coarse = &runs[0];
        let g = coarse.grid.clone();
        let phi = Potential::sample(cfg.potential.kind(), &g);
        let solver = if params.is_parabolic() {
            LimitSolver::PorousMedium { gamma: cfg.gamma }
        } else {
            LimitSolver::TransportUpwind
        };
        let rho0 = sod_initial(&g).rho;
        let rho = run_limit(
            solver,
            &rho0,
            &phi,
            &g,
            coarse.output.dt,
            cfg.t_final,
            &opts.bc,
            &params,
        )
        .map_err(|e| HarnessError::solver("sod limit reference", e))?;
        let l1_distance = l1_error(&coarse.output.state.rho, &rho, g.dx)?;
        Some(LimitReference {
            solver,
            grid: g,
            rho,
            l1_distance,
        })
    } else {
        None
    };
    Ok(SodResult { runs, reference })
}

fn solver_name(s: &LimitSolver) -> &'static str {
    match s {
        LimitSolver::PorousMedium { .. } => "porous-medium",
        LimitSolver::TransportCentral => "transport-central",
        LimitSolver::TransportUpwind => "transport-upwind",
    }
}

pub fn write_sod(cfg: &Config, r: &SodResult) -> Result<Vec<PathBuf>, HarnessError> {
    let mut paths = Vec::new();
    for run in &r.runs {
        let path = file(cfg, format!("sod_{}.csv", run.label));
        let mut meta = run_metadata(cfg, &run.output);
        meta.push("cells_run", run.grid.n_cells);
        if let Some(reference) = &r.reference {
            meta.push("l1_to_reference", num(reference.l1_distance));
        }
        write_profile(
            &path,
            &meta,
            &run.grid.centers,
            &run.output.state,
            DEFAULT_RHO_FLOOR,
        )?;
        paths.push(path);
    }
    if let Some(reference) = &r.reference {
        let path = file(
            cfg,
            format!("sod_reference_n{}.csv", reference.grid.n_cells),
        );
        let meta = Metadata::new(cfg.echo())
            .with("reference", solver_name(&reference.solver))
            .with("l1_to_reference", num(reference.l1_distance));
        write_profile(
            &path,
            &meta,
            &reference.grid.centers,
            &State::at_rest(reference.rho.clone()),
            DEFAULT_RHO_FLOOR,
        )?;
        paths.push(path);
    }
    Ok(paths)
}

// ---------------------------------------------------------------- hydro table

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HydroJob {
    pub eps: f64,
    pub potential: PotentialKind,
    pub cells: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRecord {
    pub epsilon: f64,
    pub potential: PotentialKind,
    pub n_cells: usize,
    pub l1_rho: f64,
    pub l1_q: f64,
    pub steps: usize,
}

pub fn hydro_jobs(cfg: &Config) -> Vec<HydroJob> {
    let eps: Vec<f64> = if cfg.pinned.eps {
        vec![cfg.eps]
    } else {
        TABLE_EPSILONS.to_vec()
    };
    let potentials: Vec<PotentialKind> = if cfg.pinned.potential {
        vec![cfg.potential.kind()]
    } else {
        TABLE_POTENTIALS.to_vec()
    };
    let cells: Vec<usize> = if cfg.pinned.cells {
        vec![cfg.cells]
    } else if cfg.fast {
        vec![100]
    } else {
        vec![100, 1000]
    };
    let mut jobs = Vec::new();
    for &e in &eps {
        for &p in &potentials {
            for &n in &cells {
                jobs.push(HydroJob {
                    eps: e,
                    potential: p,
                    cells: n,
                });
            }
        }
    }
    jobs
}

/// Sampled analytic equilibrium (C = 1) run to `t_final`; L1 errors against
/// the same samples and against zero momentum.
pub fn hydro_cell(cfg: &Config, job: HydroJob) -> Result<ErrorRecord, HarnessError> {
    let params = cfg.params_with(job.eps, cfg.beta)?;
    let g = grid(0.0, 1.0, job.cells)?;
    let phi = Potential::sample(job.potential, &g);
    let exact = sampled_equilibrium(&phi, &params)?;
    let output = run(
        &State::at_rest(exact.clone()),
        &phi,
        &g,
        cfg.t_final,
        &params,
        &options(cfg),
    )
    .map_err(|e| {
        HarnessError::solver(
            format!(
                "hydro-table eps={} {} N={}",
                job.eps,
                job.potential.name(),
                job.cells
            ),
            e,
        )
    })?;
    let zeros = vec![0.0; job.cells];
    Ok(ErrorRecord {
        epsilon: job.eps,
        potential: job.potential,
        n_cells: job.cells,
        l1_rho: l1_error(&output.state.rho, &exact, g.dx)?,
        l1_q: l1_error(&output.state.q, &zeros, g.dx)?,
        steps: output.steps,
    })
}

pub fn hydro_table(cfg: &Config) -> Result<Vec<ErrorRecord>, HarnessError> {
    hydro_jobs(cfg)
        .into_par_iter()
        .map(|job| hydro_cell(cfg, job))
        .collect()
}

pub fn write_hydro_table(
    cfg: &Config,
    records: &[ErrorRecord],
    wall_time: Duration,
) -> Result<Vec<PathBuf>, HarnessError> {
    let family = if cfg.gamma == 1.0 {
        "isothermal"
    } else {
        "isentropic"
    };
    let path = file(cfg, format!("hydro_table_{family}.csv"));
    let meta = Metadata::new(cfg.echo())
        .with("equilibrium", family)
        .with("steps", records.iter().map(|r| r.steps).sum::<usize>())
        .with(crate::output::WALL_TIME_KEY, wall(wall_time));
    let rows = records.iter().map(|r| {
        vec![
            num(r.epsilon),
            r.potential.name().to_owned(),
            r.n_cells.to_string(),
            num(r.l1_rho),
            num(r.l1_q),
        ]
    });
    write_csv(&path, &meta, &TABLE_COLUMNS, rows)?;
    Ok(vec![path])
}

// ---------------------------------------------------------------- perturbation

#[derive(Debug, Clone)]
pub struct PerturbRun {
    pub grid: Grid,
    pub equilibrium: Vec<f64>,
    pub initial: State,
    pub output: RunOutput,
}

impl PerturbRun {
    /// ρ(T) - ρ_e
    pub fn perturbation(&self) -> Vec<f64> {
        self.output
            .state
            .rho
            .iter()
            .zip(&self.equilibrium)
            .map(|(r, e)| r - e)
            .collect()
    }
}

/// Equilibrium plus `zeta exp(-100 (x - 1/2)²)` on [0, 1].
pub fn perturb_run(
    cfg: &Config,
    eps: f64,
    cells: usize,
    zeta: f64,
    reconstruction: Reconstruction,
) -> Result<PerturbRun, HarnessError> {
    let params = cfg.params_with(eps, cfg.beta)?;
    let g = grid(0.0, 1.0, cells)?;
    let phi = Potential::sample(cfg.potential.kind(), &g);
    let equilibrium = sampled_equilibrium(&phi, &params)?;
    let initial = State::at_rest(
        equilibrium
            .iter()
            .zip(&g.centers)
            .map(|(r, &x)| r + bump(x, zeta))
            .collect(),
    );
    let opts = SchemeOptions {
        reconstruction,
        ..options(cfg)
    };
    let output = run(&initial, &phi, &g, cfg.t_final, &params, &opts).map_err(|e| {
        HarnessError::solver(format!("perturb eps={eps} N={cells} {reconstruction:?}"), e)
    })?;
    Ok(PerturbRun {
        grid: g,
        equilibrium,
        initial,
        output,
    })
}

fn well_balanced_recon(cfg: &Config) -> Reconstruction {
    match cfg.recon.reconstruction() {
        Reconstruction::None => Reconstruction::P,
        r => r,
    }
}

#[derive(Debug, Clone)]
pub struct PerturbResult {
    pub wb: PerturbRun,
    pub nonwb: PerturbRun,
}

pub fn perturb(cfg: &Config) -> Result<PerturbResult, HarnessError> {
    let recon = well_balanced_recon(cfg);
    let (wb, nonwb) = rayon::join(
        || perturb_run(cfg, cfg.eps, cfg.cells, cfg.zeta, recon),
        || perturb_run(cfg, cfg.eps, cfg.cells, cfg.zeta, Reconstruction::None),
    );
    Ok(PerturbResult {
        wb: wb?,
        nonwb: nonwb?,
    })
}

pub fn write_perturb(cfg: &Config, r: &PerturbResult) -> Result<Vec<PathBuf>, HarnessError> {
    let mut paths = Vec::new();
    let initial = State {
        rho: r
            .wb
            .initial
            .rho
            .iter()
            .zip(&r.wb.equilibrium)
            .map(|(a, b)| a - b)
            .collect(),
        q: r.wb.initial.q.clone(),
    };
    let path = file(cfg, "perturb_initial.csv".into());
    let meta = Metadata::new(cfg.echo()).with("rho_column", "rho-rho_e");
    write_profile(
        &path,
        &meta,
        &r.wb.grid.centers,
        &initial,
        DEFAULT_RHO_FLOOR,
    )?;
    paths.push(path);
    for (name, run) in [("wb", &r.wb), ("nonwb", &r.nonwb)] {
        let path = file(cfg, format!("perturb_{name}.csv"));
        let meta = run_metadata(cfg, &run.output)
            .with("scheme", name)
            .with("rho_column", "rho-rho_e");
        // velocities from the full density, the rho column holds the perturbation
        let u = run.output.state.velocity(DEFAULT_RHO_FLOOR);
        let pert = run.perturbation();
        let rows = (0..pert.len()).map(|i| {
            vec![
                num(run.grid.centers[i]),
                num(pert[i]),
                num(run.output.state.q[i]),
                num(u[i]),
            ]
        });
        write_csv(&path, &meta, &crate::output::PROFILE_COLUMNS, rows)?;
        paths.push(path);
    }
    Ok(paths)
}

// ---------------------------------------------------------------- long time

#[derive(Debug, Clone)]
pub struct Series {
    pub eps: f64,
    pub well_balanced: bool,
    /// (t, max|q|, L1(ρ - ρ_e))
    pub rows: Vec<(f64, f64, f64)>,
    pub steps: usize,
    pub wall_time: Duration,
}

impl Series {
    pub fn last(&self) -> (f64, f64, f64) {
        *self
            .rows
            .last()
            .expect("series has at least the initial sample")
    }
}

pub const SERIES_SAMPLES: usize = 1000;

pub fn longtime_series(
    cfg: &Config,
    eps: f64,
    reconstruction: Reconstruction,
) -> Result<Series, HarnessError> {
    let params = cfg.params_with(eps, cfg.beta)?;
    let g = grid(0.0, 1.0, cfg.cells)?;
    let phi = Potential::sample(cfg.potential.kind(), &g);
    let equilibrium = sampled_equilibrium(&phi, &params)?;
    let initial = State::at_rest(
        equilibrium
            .iter()
            .zip(&g.centers)
            .map(|(r, &x)| r + bump(x, cfg.zeta))
            .collect(),
    );
    let opts = SchemeOptions {
        reconstruction,
        ..options(cfg)
    };
    let n_steps = steps_for(cfg.t_final, cfl_dt(&g, &phi, &params));
    let stride = (n_steps / SERIES_SAMPLES).max(1);
    let mut rows = Vec::with_capacity(SERIES_SAMPLES + 2);
    let dx = g.dx;
    let output = run_with(
        &initial,
        &phi,
        &g,
        cfg.t_final,
        &params,
        &opts,
        stride,
        |_, t, s| {
            let l1 = dx
                * s.rho
                    .iter()
                    .zip(&equilibrium)
                    .map(|(a, b)| (a - b).abs())
                    .sum::<f64>();
            rows.push((t, s.max_abs_q(), l1));
        },
    )
    .map_err(|e| HarnessError::solver(format!("longtime eps={eps} {reconstruction:?}"), e))?;
    Ok(Series {
        eps,
        well_balanced: reconstruction != Reconstruction::None,
        rows,
        steps: output.steps,
        wall_time: output.wall_time,
    })
}

pub fn longtime(cfg: &Config) -> Result<Vec<Series>, HarnessError> {
    let eps: Vec<f64> = if cfg.pinned.eps {
        vec![cfg.eps]
    } else if cfg.fast {
        vec![1.0]
    } else {
        TABLE_EPSILONS.to_vec()
    };
    let recon = well_balanced_recon(cfg);
    let jobs: Vec<(f64, Reconstruction)> = eps
        .iter()
        .flat_map(|&e| [(e, recon), (e, Reconstruction::None)])
        .collect();
    jobs.into_par_iter()
        .map(|(e, r)| longtime_series(cfg, e, r))
        .collect()
}

pub fn write_longtime(cfg: &Config, series: &[Series]) -> Result<Vec<PathBuf>, HarnessError> {
    series
        .iter()
        .map(|s| {
            let name = if s.well_balanced { "wb" } else { "nonwb" };
            let path = file(cfg, format!("longtime_eps{}_{name}.csv", num(s.eps)));
            let meta = Metadata::new(cfg.echo())
                .with("eps_run", num(s.eps))
                .with("scheme", name)
                .with("steps", s.steps)
                .with(crate::output::WALL_TIME_KEY, wall(s.wall_time));
            let rows = s.rows.iter().map(|&(t, q, e)| vec![num(t), num(q), num(e)]);
            write_csv(&path, &meta, &SERIES_COLUMNS, rows)?;
            Ok(path)
        })
        .collect()
}

// ---------------------------------------------------------------- mesh sweep

pub const MESH_DOMAIN: (f64, f64) = (-0.5, 0.5);

/// Density 1 on (-0.2, 0.2) and 2 elsewhere, at rest.
pub fn arch_initial(g: &Grid) -> State {
    State::at_rest(
        g.centers
            .iter()
            .map(|&x| if x > -0.2 && x < 0.2 { 1.0 } else { 2.0 })
            .collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Stable,
    Oscillatory,
    BlowUp,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::Stable => "stable",
            Outcome::Oscillatory => "oscillatory",
            Outcome::BlowUp => "blow-up",
        }
    }
}

/// Total variation ratio to the AP run above which a run counts as oscillatory.
pub const OSCILLATION_TV_RATIO: f64 = 1.5;

#[derive(Debug, Clone)]
pub struct MeshRecord {
    pub beta: f64,
    pub variant: Variant,
    pub grid: Grid,
    pub outcome: Outcome,
    pub steps: usize,
    pub time: f64,
    pub total_variation: f64,
    pub state: Option<State>,
    pub wall_time: Duration,
}

pub fn mesh_cells(cfg: &Config) -> Vec<usize> {
    if cfg.pinned.cells {
        vec![cfg.cells]
    } else if cfg.fast {
        vec![100, 1000]
    } else {
        vec![100, 1000, 10000]
    }
}

pub fn mesh_betas(cfg: &Config) -> Vec<f64> {
    if cfg.pinned.beta {
        vec![cfg.beta]
    } else {
        vec![1.0, 0.1]
    }
}

pub fn mesh_run(
    cfg: &Config,
    beta: f64,
    variant: Variant,
    cells: usize,
) -> Result<MeshRecord, HarnessError> {
    let params = cfg.params_with(cfg.eps, beta)?;
    let g = grid(MESH_DOMAIN.0, MESH_DOMAIN.1, cells)?;
    let phi = Potential::sample(cfg.potential.kind(), &g);
    let opts = SchemeOptions {
        variant,
        ..options(cfg)
    };
    match run(&arch_initial(&g), &phi, &g, cfg.t_final, &params, &opts) {
        Ok(out) => Ok(MeshRecord {
            beta,
            variant,
            outcome: Outcome::Stable,
            steps: out.steps,
            time: out.time,
            total_variation: total_variation(&out.state.rho),
            state: Some(out.state),
            wall_time: out.wall_time,
            grid: g,
        }),
        Err(CoreError::BlowUp { step, time }) => Ok(MeshRecord {
            beta,
            variant,
            outcome: Outcome::BlowUp,
            steps: step,
            time,
            total_variation: f64::NAN,
            state: None,
            wall_time: Duration::ZERO,
            grid: g,
        }),
        Err(e) => Err(HarnessError::solver(
            format!("mesh-sweep beta={beta} N={cells} {variant:?}"),
            e,
        )),
    }
}

/// Runs both variants on every mesh; non-AP runs whose total variation exceeds
/// the AP run on the same mesh by [`OSCILLATION_TV_RATIO`] are marked oscillatory.
pub fn mesh_sweep(cfg: &Config) -> Result<Vec<MeshRecord>, HarnessError> {
    let mut jobs = Vec::new();
    for beta in mesh_betas(cfg) {
        for cells in mesh_cells(cfg) {
            for variant in [Variant::UnifiedAp, Variant::ExplicitNonAp] {
                jobs.push((beta, cells, variant));
            }
        }
    }
    let mut records: Vec<MeshRecord> = jobs
        .into_par_iter()
        .map(|(beta, cells, variant)| mesh_run(cfg, beta, variant, cells))
        .collect::<Result<_, _>>()?;
    let ap_tv: Vec<(f64, usize, f64)> = records
        .iter()
        .filter(|r| r.variant == Variant::UnifiedAp)
        .map(|r| (r.beta, r.grid.n_cells, r.total_variation))
        .collect();
    for r in records.iter_mut() {
        if r.variant != Variant::ExplicitNonAp || r.outcome == Outcome::BlowUp {
            continue;
        }
        let reference = ap_tv
            .iter()
            .find(|(b, n, _)| *b == r.beta && *n == r.grid.n_cells)
            .map(|t| t.2);
        if let Some(tv) = reference {
            if r.total_variation >= OSCILLATION_TV_RATIO * tv {
                r.outcome = Outcome::Oscillatory;
            }
        }
    }
    Ok(records)
}

/// L1 distance between AP profiles of successive meshes at fixed β, with the
/// finer profile cell-averaged onto the coarser mesh.
pub fn mesh_pairwise_l1(
    records: &[MeshRecord],
    beta: f64,
) -> Result<Vec<(usize, usize, f64)>, HarnessError> {
    let mut ap: Vec<&MeshRecord> = records
        .iter()
        .filter(|r| r.beta == beta && r.variant == Variant::UnifiedAp && r.state.is_some())
        .collect();
    ap.sort_by_key(|r| r.grid.n_cells);
    let mut out = Vec::new();
    for (i, coarse) in ap.iter().enumerate() {
        for fine in &ap[i + 1..] {
            let n = coarse.grid.n_cells;
            let coarse_rho = &coarse.state.as_ref().expect("filtered").rho;
            let fine_rho = restrict(&fine.state.as_ref().expect("filtered").rho, n)?;
            out.push((
                n,
                fine.grid.n_cells,
                l1_error(coarse_rho, &fine_rho, coarse.grid.dx)?,
            ));
        }
    }
    Ok(out)
}

pub const MESH_COLUMNS: [&str; 8] = [
    "beta", "variant", "cells", "dx", "outcome", "steps", "time", "tv_rho",
];

fn variant_name(v: Variant) -> &'static str {
    match v {
        Variant::UnifiedAp => "ap",
        Variant::ExplicitNonAp => "nonap",
    }
}

pub fn write_mesh_sweep(
    cfg: &Config,
    records: &[MeshRecord],
) -> Result<Vec<PathBuf>, HarnessError> {
    let mut paths = Vec::new();
    let path = file(cfg, "mesh_sweep.csv".into());
    let total: Duration = records.iter().map(|r| r.wall_time).sum();
    let meta = Metadata::new(cfg.echo())
        .with("steps", records.iter().map(|r| r.steps).sum::<usize>())
        .with("oscillation_tv_ratio", OSCILLATION_TV_RATIO)
        .with(crate::output::WALL_TIME_KEY, wall(total));
    let rows = records.iter().map(|r| {
        vec![
            num(r.beta),
            variant_name(r.variant).to_owned(),
            r.grid.n_cells.to_string(),
            num(r.grid.dx),
            r.outcome.name().to_owned(),
            r.steps.to_string(),
            num(r.time),
            num(r.total_variation),
        ]
    });
    write_csv(&path, &meta, &MESH_COLUMNS, rows)?;
    paths.push(path);
    for r in records {
        let Some(state) = &r.state else { continue };
        let path = file(
            cfg,
            format!(
                "mesh_beta{}_{}_n{}.csv",
                num(r.beta),
                variant_name(r.variant),
                r.grid.n_cells
            ),
        );
        let meta = Metadata::new(cfg.echo())
            .with("beta_run", num(r.beta))
            .with("steps", r.steps)
            .with("outcome", r.outcome.name())
            .with(crate::output::WALL_TIME_KEY, wall(r.wall_time));
        write_profile(&path, &meta, &r.grid.centers, state, DEFAULT_RHO_FLOOR)?;
        paths.push(path);
    }
    Ok(paths)
}
