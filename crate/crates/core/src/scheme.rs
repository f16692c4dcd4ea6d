//! The unified asymptotic-preserving, well-balanced update and its time loop.
//!
//! One step of the scheme, per cell `i` with interface quantities at `i±1/2`:
//!
//! ```text
//! ρ_i ← ρ_i - a_hyp/Δx [F^ρ] + a_kin/Δx² Δ²(q²/ρ)_i + a_prs/Δx² Δ²P_i - a_grav/Δx² [ρ̄ Δφ]
//! q_i ← q_i - 1/Δx [a_hyp F^conv + a_src F^prs] - a_fric q_i + a_src/Δx (P⁻_{i+1/2} - P⁺_{i-1/2})
//! ```
//!
//! with Rusanov fluxes evaluated on hydrostatically reconstructed states. The
//! weights come from [`step_coefficients`] and stay bounded for any ε.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::model::{
    hydrostatic_equilibrium, pow_law, step_coefficients, Grid, ModelParams, Potential, State,
    StepCoefficients,
};
use crate::reference;
use crate::wellbalance::{reconstruct_e_raw, reconstruct_p_raw, CellValue};

pub const DEFAULT_RHO_FLOOR: f64 = 1e-12;

/// Ghost cell state for [`BoundaryCondition::Fixed`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhostState {
    pub rho: f64,
    pub q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCondition {
    /// Copy the adjacent interior cell (potential keeps its sampled ghost values).
    Extrapolation,
    /// Wrap state and potential.
    Periodic,
    /// Analytic hydrostatic density with the given constant at the ghost
    /// potential samples, zero momentum.
    EquilibriumGhost { constant: f64 },
    /// Prescribed ghost states, e.g. the outer cells of a discrete equilibrium.
    Fixed { left: GhostState, right: GhostState },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reconstruction {
    /// Hydrostatic reconstruction on the pressure.
    P,
    /// Hydrostatic reconstruction on the enthalpy, γ > 1 only.
    E,
    /// Raw cell values and a centred pointwise gravity source (not well-balanced).
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    UnifiedAp,
    ExplicitNonAp,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeOptions {
    pub bc: BoundaryCondition,
    pub reconstruction: Reconstruction,
    pub variant: Variant,
    pub rho_floor: f64,
}

impl Default for SchemeOptions {
    fn default() -> Self {
        Self {
            bc: BoundaryCondition::Extrapolation,
            reconstruction: Reconstruction::P,
            variant: Variant::UnifiedAp,
            rho_floor: DEFAULT_RHO_FLOOR,
        }
    }
}

impl SchemeOptions {
    pub fn new(bc: BoundaryCondition, reconstruction: Reconstruction, variant: Variant) -> Self {
        Self {
            bc,
            reconstruction,
            variant,
            ..Self::default()
        }
    }
}

/// One side of a two-state flux evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conserved {
    pub rho: f64,
    pub q: f64,
}

/// Rusanov flux with the pressure split out: the momentum flux is
/// `f_conv + f_prs / ε^{2β}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxPair {
    pub f_rho: f64,
    pub f_conv: f64,
    pub f_prs: f64,
}

/// State, momentum and potential with one ghost cell on each side.
#[derive(Debug, Clone, PartialEq)]
pub struct Extended {
    pub rho: Vec<f64>,
    pub q: Vec<f64>,
    pub phi: Vec<f64>,
}

impl Extended {
    fn with_len(len: usize) -> Self {
        Self {
            rho: vec![0.0; len],
            q: vec![0.0; len],
            phi: vec![0.0; len],
        }
    }

    /// Number of interior cells.
    pub fn n_cells(&self) -> usize {
        self.rho.len() - 2
    }
}

/// Per-side data needed by the flux: density, velocity, pressure.
#[derive(Debug, Clone, Copy)]
struct Side {
    rho: f64,
    u: f64,
    p: f64,
}

#[inline]
fn wave_speed(side: Side, gamma: f64, inv_eps_beta: f64, floor: f64) -> f64 {
    if side.rho <= floor {
        return 0.0;
    }
    let c = if gamma == 1.0 {
        inv_eps_beta
    } else {
        (gamma * side.p / side.rho).sqrt() * inv_eps_beta
    };
    side.u.abs() + c
}

#[inline]
fn flux_raw(left: Side, right: Side, gamma: f64, inv_eps_beta: f64, floor: f64) -> FluxPair {
    let a = wave_speed(left, gamma, inv_eps_beta, floor).max(wave_speed(
        right,
        gamma,
        inv_eps_beta,
        floor,
    ));
    let (q_l, q_r) = (left.rho * left.u, right.rho * right.u);
    FluxPair {
        f_rho: 0.5 * (q_l + q_r) - 0.5 * a * (right.rho - left.rho),
        f_conv: 0.5 * (q_l * left.u + q_r * right.u) - 0.5 * a * (q_r - q_l),
        f_prs: 0.5 * (left.p + right.p),
    }
}

/// Rusanov flux between two states; densities at or below the default floor
/// carry no velocity and no sound speed.
pub fn rusanov_flux(left: Conserved, right: Conserved, params: &ModelParams) -> Result<FluxPair> {
    let side = |c: Conserved| -> Result<Side> {
        if !(c.rho >= 0.0) || !c.q.is_finite() {
            return Err(Error::Domain {
                what: "flux state",
                value: if c.rho.is_nan() || c.rho < 0.0 {
                    c.rho
                } else {
                    c.q
                },
            });
        }
        let u = if c.rho > DEFAULT_RHO_FLOOR {
            c.q / c.rho
        } else {
            0.0
        };
        Ok(Side {
            rho: c.rho,
            u,
            p: pow_law(c.rho, params.gamma),
        })
    };
    Ok(flux_raw(
        side(left)?,
        side(right)?,
        params.gamma,
        params.inv_eps_beta(),
        DEFAULT_RHO_FLOOR,
    ))
}

/// Δt = λ min(Δx²/ε^{1-β}, Δx / max|Δφ/Δx|).
pub fn cfl_dt(grid: &Grid, phi: &Potential, params: &ModelParams) -> f64 {
    let dx = grid.dx;
    let parabolic = dx * dx / params.eps_one_minus_beta();
    let grad = phi.max_gradient(dx);
    let gravity = if grad > 0.0 { dx / grad } else { f64::INFINITY };
    params.lambda_cfl * parabolic.min(gravity)
}

fn check_lengths(state: &State, phi: &Potential) -> Result<()> {
    if state.q.len() != state.rho.len() {
        return Err(Error::LengthMismatch {
            expected: state.rho.len(),
            got: state.q.len(),
        });
    }
    if phi.n_cells() != state.len() {
        return Err(Error::LengthMismatch {
            expected: state.len() + 2,
            got: phi.extended().len(),
        });
    }
    Ok(())
}

fn fill_extended(
    out: &mut Extended,
    state: &State,
    phi: &Potential,
    bc: &BoundaryCondition,
    params: &ModelParams,
) -> Result<()> {
    let n = state.len();
    out.rho[1..=n].copy_from_slice(&state.rho);
    out.q[1..=n].copy_from_slice(&state.q);
    out.phi.copy_from_slice(phi.extended());
    let last = n + 1;
    match *bc {
        BoundaryCondition::Extrapolation => {
            out.rho[0] = state.rho[0];
            out.q[0] = state.q[0];
            out.rho[last] = state.rho[n - 1];
            out.q[last] = state.q[n - 1];
        }
        BoundaryCondition::Periodic => {
            out.rho[0] = state.rho[n - 1];
            out.q[0] = state.q[n - 1];
            out.rho[last] = state.rho[0];
            out.q[last] = state.q[0];
            out.phi[0] = out.phi[n];
            out.phi[last] = out.phi[1];
        }
        BoundaryCondition::EquilibriumGhost { constant } => {
            out.rho[0] = hydrostatic_equilibrium(out.phi[0], constant, params)?;
            out.rho[last] = hydrostatic_equilibrium(out.phi[last], constant, params)?;
            out.q[0] = 0.0;
            out.q[last] = 0.0;
        }
        BoundaryCondition::Fixed { left, right } => {
            out.rho[0] = left.rho;
            out.q[0] = left.q;
            out.rho[last] = right.rho;
            out.q[last] = right.q;
        }
    }
    Ok(())
}

/// Ghost-extended copies of the state and the potential.
pub fn apply_bc(
    state: &State,
    phi: &Potential,
    bc: &BoundaryCondition,
    params: &ModelParams,
) -> Result<Extended> {
    check_lengths(state, phi)?;
    let mut out = Extended::with_len(state.len() + 2);
    fill_extended(&mut out, state, phi, bc, params)?;
    Ok(out)
}

/// Reusable buffers for repeated steps on one mesh.
#[derive(Debug, Clone)]
pub struct Workspace {
    ext: Extended,
    p: Vec<f64>,
    u: Vec<f64>,
    kin: Vec<f64>,
    flux_rho: Vec<f64>,
    flux_q: Vec<f64>,
    parab: Vec<f64>,
    p_minus: Vec<f64>,
    p_plus: Vec<f64>,
}

impl Workspace {
    pub fn new(n_cells: usize) -> Self {
        let cells = n_cells + 2;
        let faces = n_cells + 1;
        Self {
            ext: Extended::with_len(cells),
            p: vec![0.0; cells],
            u: vec![0.0; cells],
            kin: vec![0.0; cells],
            flux_rho: vec![0.0; faces],
            flux_q: vec![0.0; faces],
            parab: vec![0.0; faces],
            p_minus: vec![0.0; faces],
            p_plus: vec![0.0; faces],
        }
    }

    fn n_cells(&self) -> usize {
        self.ext.n_cells()
    }
}

/// Advance one step of size `dt`, returning the new state.
pub fn step(
    state: &State,
    phi: &Potential,
    dx: f64,
    dt: f64,
    params: &ModelParams,
    options: &SchemeOptions,
) -> Result<State> {
    let mut ws = Workspace::new(state.len());
    let mut out = State::at_rest(vec![0.0; state.len()]);
    step_into(state, &mut out, phi, dx, dt, params, options, &mut ws)?;
    Ok(out)
}

/// [`step`] writing into `out` and reusing `ws`.
#[allow(clippy::too_many_arguments)]
pub fn step_into(
    state: &State,
    out: &mut State,
    phi: &Potential,
    dx: f64,
    dt: f64,
    params: &ModelParams,
    options: &SchemeOptions,
    ws: &mut Workspace,
) -> Result<()> {
    check_lengths(state, phi)?;
    if ws.n_cells() != state.len() {
        *ws = Workspace::new(state.len());
    }
    if out.len() != state.len() {
        *out = State::at_rest(vec![0.0; state.len()]);
    }
    if options.reconstruction == Reconstruction::E && !(params.gamma > 1.0) {
        return Err(Error::UnsupportedGamma(params.gamma));
    }
    fill_extended(&mut ws.ext, state, phi, &options.bc, params)?;
    match options.variant {
        Variant::UnifiedAp => unified_update(ws, out, dx, dt, params, options),
        Variant::ExplicitNonAp => {
            reference::explicit_nonap_into(&ws.ext, out, dx, dt, params, options.rho_floor)
        }
    }?;
    match out.first_non_finite() {
        Some(cell) => Err(Error::NonFinite { cell }),
        None => Ok(()),
    }
}

fn unified_update(
    ws: &mut Workspace,
    out: &mut State,
    dx: f64,
    dt: f64,
    params: &ModelParams,
    options: &SchemeOptions,
) -> Result<()> {
    let StepCoefficients {
        a_hyp,
        a_kin,
        a_prs,
        a_grav,
        a_fric,
        a_src,
        ..
    } = step_coefficients(params, dt);
    let gamma = params.gamma;
    let inv_eps_beta = params.inv_eps_beta();
    let e1mb = params.eps_one_minus_beta();
    let floor = options.rho_floor;
    let n = ws.n_cells();
    let Workspace {
        ext,
        p,
        u,
        kin,
        flux_rho,
        flux_q,
        parab,
        p_minus,
        p_plus,
    } = ws;
    let (rho, q, phi) = (&ext.rho, &ext.q, &ext.phi);

    for k in 0..n + 2 {
        p[k] = pow_law(rho[k], gamma);
        u[k] = if rho[k] > floor { q[k] / rho[k] } else { 0.0 };
        kin[k] = q[k] * u[k];
    }

    for k in 0..=n {
        let left = CellValue {
            rho: rho[k],
            p: p[k],
            phi: phi[k],
        };
        let right = CellValue {
            rho: rho[k + 1],
            p: p[k + 1],
            phi: phi[k + 1],
        };
        let (rm, rp, pm, pp) = match options.reconstruction {
            Reconstruction::P => {
                let s = reconstruct_p_raw(left, right, e1mb, gamma);
                (s.rho_minus, s.rho_plus, s.p_minus, s.p_plus)
            }
            Reconstruction::E => {
                let s = reconstruct_e_raw(left, right, e1mb, gamma);
                (s.rho_minus, s.rho_plus, s.p_minus, s.p_plus)
            }
            Reconstruction::None => (rho[k], rho[k + 1], p[k], p[k + 1]),
        };
        let minus = Side {
            rho: rm,
            u: if rm > floor { u[k] } else { 0.0 },
            p: pm,
        };
        let plus = Side {
            rho: rp,
            u: if rp > floor { u[k + 1] } else { 0.0 },
            p: pp,
        };
        let f = flux_raw(minus, plus, gamma, inv_eps_beta, floor);
        flux_rho[k] = a_hyp * f.f_rho;
        flux_q[k] = a_hyp * f.f_conv + a_src * f.f_prs;
        parab[k] = a_kin * (kin[k + 1] - kin[k]) + a_prs * (p[k + 1] - p[k])
            - a_grav * 0.5 * (rho[k] + rho[k + 1]) * (phi[k + 1] - phi[k]);
        p_minus[k] = pm;
        p_plus[k] = pp;
    }

    let inv_dx = dx.recip();
    let inv_dx2 = inv_dx * inv_dx;
    for j in 0..n {
        let c = j + 1;
        out.rho[j] =
            rho[c] - (flux_rho[j + 1] - flux_rho[j]) * inv_dx + (parab[j + 1] - parab[j]) * inv_dx2;
        let source = match options.reconstruction {
            Reconstruction::None => a_fric * rho[c] * (phi[c + 1] - phi[c - 1]) * 0.5 * inv_dx,
            _ => a_src * (p_minus[j + 1] - p_plus[j]) * inv_dx,
        };
        out.q[j] = q[c] - (flux_q[j + 1] - flux_q[j]) * inv_dx - a_fric * q[c] + source;
    }
    Ok(())
}

/// Summary of the state at one diagnostic instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostic {
    pub step: usize,
    pub time: f64,
    pub min_rho: f64,
    pub max_rho: f64,
    pub mass: f64,
    pub max_abs_q: f64,
}

impl Diagnostic {
    fn of(state: &State, step: usize, time: f64, dx: f64) -> Self {
        let (min_rho, max_rho) = state
            .rho
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| {
                (lo.min(r), hi.max(r))
            });
        Self {
            step,
            time,
            min_rho,
            max_rho,
            mass: state.mass(dx),
            max_abs_q: state.max_abs_q(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub state: State,
    pub steps: usize,
    pub time: f64,
    pub dt: f64,
    pub wall_time: Duration,
    pub diagnostics: Vec<Diagnostic>,
}

/// Advance to `t_final` with the CFL time step, clipping the last step.
pub fn run(
    initial: &State,
    phi: &Potential,
    grid: &Grid,
    t_final: f64,
    params: &ModelParams,
    options: &SchemeOptions,
) -> Result<RunOutput> {
    run_with(
        initial,
        phi,
        grid,
        t_final,
        params,
        options,
        0,
        |_, _, _| {},
    )
}

/// [`run`] recording diagnostics every `stride` steps (0 disables them apart
/// from the first and last) and calling `observer(step, time, state)` at the
/// same instants.
#[allow(clippy::too_many_arguments)]
pub fn run_with<F>(
    initial: &State,
    phi: &Potential,
    grid: &Grid,
    t_final: f64,
    params: &ModelParams,
    options: &SchemeOptions,
    stride: usize,
    mut observer: F,
) -> Result<RunOutput>
where
    F: FnMut(usize, f64, &State),
{
    if !(t_final >= 0.0) || !t_final.is_finite() {
        return Err(Error::InvalidParameter {
            name: "t_final",
            value: t_final,
            reason: "must be finite and non-negative",
        });
    }
    check_lengths(initial, phi)?;
    let started = Instant::now();
    let dx = grid.dx;
    let dt = cfl_dt(grid, phi, params);
    let n_steps = if t_final == 0.0 {
        0
    } else {
        (t_final / dt - 1e-9).ceil().max(1.0) as usize
    };

    let mut diagnostics = vec![Diagnostic::of(initial, 0, 0.0, dx)];
    observer(0, 0.0, initial);
    let mut current = initial.clone();
    let mut next = initial.clone();
    let mut ws = Workspace::new(initial.len());
    let mut time = 0.0;
    for k in 0..n_steps {
        let h = if k + 1 == n_steps {
            t_final - k as f64 * dt
        } else {
            dt
        };
        if let Err(err) = step_into(&current, &mut next, phi, dx, h, params, options, &mut ws) {
            return Err(match err {
                Error::NonFinite { .. } => Error::BlowUp {
                    step: k + 1,
                    time: time + h,
                },
                other => other,
            });
        }
        std::mem::swap(&mut current, &mut next);
        let done = k + 1;
        time = if done == n_steps {
            t_final
        } else {
            done as f64 * dt
        };
        if done == n_steps || (stride > 0 && done % stride == 0) {
            diagnostics.push(Diagnostic::of(&current, done, time, dx));
            observer(done, time, &current);
        }
    }
    Ok(RunOutput {
        state: current,
        steps: n_steps,
        time,
        dt,
        wall_time: started.elapsed(),
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PotentialKind;
    use crate::wellbalance::build_discrete_equilibrium;
    use proptest::prelude::*;

    fn params(epsilon: f64, beta: f64, gamma: f64) -> ModelParams {
        ModelParams::new(epsilon, beta, gamma, 0.45).unwrap()
    }

    #[test]
    fn flux_examples() {
        let p = params(1.0, 1.0, 1.4);
        let rest = Conserved { rho: 1.0, q: 0.0 };
        let f = rusanov_flux(rest, rest, &p).unwrap();
        assert_eq!((f.f_rho, f.f_conv, f.f_prs), (0.0, 0.0, 1.0));

        let f = rusanov_flux(rest, Conserved { rho: 0.125, q: 0.0 }, &p).unwrap();
        assert!((f.f_rho - 0.517_656_981_021).abs() < 1e-10);
        assert!((f.f_prs - 0.527_204_705_103).abs() < 1e-10);
        assert_eq!(f.f_conv, 0.0);

        let moving = Conserved { rho: 1.0, q: 0.5 };
        let f = rusanov_flux(moving, moving, &p).unwrap();
        assert_eq!((f.f_rho, f.f_conv, f.f_prs), (0.5, 0.25, 1.0));

        assert!(rusanov_flux(
            Conserved {
                rho: f64::NAN,
                q: 0.0
            },
            rest,
            &p
        )
        .is_err());
    }

    #[test]
    fn cfl_examples() {
        let grid = Grid::new(0.0, 1.0, 100).unwrap();
        let linear = Potential::sample(PotentialKind::Linear, &grid);
        let dt = cfl_dt(&grid, &linear, &params(1e-3, 1.0, 1.0));
        assert!((dt - 4.5e-5).abs() < 1e-18);
        let dt = cfl_dt(&grid, &linear, &params(1e-2, 0.0, 1.0));
        assert!((dt - 4.5e-3).abs() < 1e-15);

        let coarse = Grid::new(0.0, 1.0, 10).unwrap();
        let flat = Potential::sample(PotentialKind::Flat, &coarse);
        let dt = cfl_dt(&coarse, &flat, &params(1.0, 1.0, 1.0));
        assert!((dt - 4.5e-3).abs() < 1e-15);
    }

    #[test]
    fn boundary_examples() {
        let grid = Grid::new(0.0, 0.03, 3).unwrap();
        let phi = Potential::sample(PotentialKind::Linear, &grid);
        let state = State::at_rest(vec![1.0, 2.0, 3.0]);
        let p = params(1.0, 1.0, 1.4);

        let ext = apply_bc(&state, &phi, &BoundaryCondition::Periodic, &p).unwrap();
        assert_eq!(ext.rho, vec![3.0, 1.0, 2.0, 3.0, 1.0]);
        assert_eq!(ext.phi[0], phi.extended()[3]);
        assert_eq!(ext.phi[4], phi.extended()[1]);

        let ext = apply_bc(&state, &phi, &BoundaryCondition::Extrapolation, &p).unwrap();
        assert_eq!(ext.rho, vec![1.0, 1.0, 2.0, 3.0, 3.0]);

        let grid = Grid::new(0.0, 1.0, 100).unwrap();
        let phi = Potential::sample(PotentialKind::Linear, &grid);
        let state = State::at_rest(vec![1.0; 100]);
        let bc = BoundaryCondition::EquilibriumGhost { constant: 1.0 };
        let ext = apply_bc(&state, &phi, &bc, &p).unwrap();
        assert!((ext.rho[0] - 0.996_432_397_048).abs() < 1e-11);
        assert_eq!(ext.q[0], 0.0);

        let short = State::at_rest(vec![1.0; 99]);
        assert!(apply_bc(&short, &phi, &bc, &p).is_err());
    }

    #[test]
    fn constant_state_is_bitwise_stationary() {
        let grid = Grid::new(0.0, 1.0, 50).unwrap();
        let phi = Potential::sample(PotentialKind::Flat, &grid);
        let state = State::at_rest(vec![0.7; 50]);
        for recon in [Reconstruction::P, Reconstruction::E, Reconstruction::None] {
            for variant in [Variant::UnifiedAp, Variant::ExplicitNonAp] {
                let opts = SchemeOptions::new(BoundaryCondition::Periodic, recon, variant);
                let p = params(1e-3, 1.0, 1.4);
                let dt = cfl_dt(&grid, &phi, &p);
                let next = step(&state, &phi, grid.dx, dt, &p, &opts).unwrap();
                assert_eq!(next, state);
            }
        }
    }

    #[test]
    fn discrete_equilibrium_stays_put() {
        let grid = Grid::new(0.0, 1.0, 100).unwrap();
        let phi = Potential::sample(PotentialKind::Linear, &grid);
        let p = params(1.0, 1.0, 1.4);
        let rho = build_discrete_equilibrium(phi.extended(), 1.0, &p).unwrap();
        let bc = BoundaryCondition::Fixed {
            left: GhostState {
                rho: rho[0],
                q: 0.0,
            },
            right: GhostState {
                rho: rho[101],
                q: 0.0,
            },
        };
        let state = State::at_rest(rho[1..101].to_vec());
        let opts = SchemeOptions::new(bc, Reconstruction::P, Variant::UnifiedAp);
        let dt = cfl_dt(&grid, &phi, &p);
        let next = step(&state, &phi, grid.dx, dt, &p, &opts).unwrap();
        for (a, b) in next.rho.iter().zip(&state.rho) {
            assert!((a - b).abs() <= 1e-13);
        }
        assert!(next.max_abs_q() <= 1e-13);
    }

    #[test]
    fn e_reconstruction_needs_gamma_above_one() {
        let grid = Grid::new(0.0, 1.0, 10).unwrap();
        let phi = Potential::sample(PotentialKind::Linear, &grid);
        let state = State::at_rest(vec![1.0; 10]);
        let opts = SchemeOptions {
            reconstruction: Reconstruction::E,
            ..SchemeOptions::default()
        };
        let err = step(&state, &phi, grid.dx, 1e-4, &params(1.0, 1.0, 1.0), &opts);
        assert_eq!(err, Err(Error::UnsupportedGamma(1.0)));
    }

    #[test]
    fn run_handles_zero_time_and_clips_last_step() {
        let grid = Grid::new(0.0, 1.0, 20).unwrap();
        let phi = Potential::sample(PotentialKind::Linear, &grid);
        let state = State::at_rest(vec![1.0; 20]);
        let p = params(1.0, 1.0, 1.0);
        let opts = SchemeOptions::default();
        let out = run(&state, &phi, &grid, 0.0, &p, &opts).unwrap();
        assert_eq!(out.steps, 0);
        assert_eq!(out.state, state);

        let dt = cfl_dt(&grid, &phi, &p);
        let t_final = 10.5 * dt;
        let mut seen = Vec::new();
        let out = run_with(&state, &phi, &grid, t_final, &p, &opts, 4, |k, t, _| {
            seen.push((k, t))
        })
        .unwrap();
        assert_eq!(out.steps, 11);
        assert_eq!(out.time, t_final);
        let steps: Vec<usize> = seen.iter().map(|s| s.0).collect();
        assert_eq!(steps, vec![0, 4, 8, 11]);
        assert_eq!(out.diagnostics.len(), 4);
    }

    #[test]
    fn sod_develops_shock_and_expansion() {
        let grid = Grid::new(0.0, 1.0, 100).unwrap();
        let phi = Potential::sample(PotentialKind::Linear, &grid);
        let rho = grid
            .centers
            .iter()
            .map(|&x| if x < 0.5 { 1.0 } else { 0.125 })
            .collect();
        let p = params(1.0, 1.0, 1.4);
        let out = run(
            &State::at_rest(rho),
            &phi,
            &grid,
            0.2,
            &p,
            &SchemeOptions::default(),
        )
        .unwrap();
        let rho = &out.state.rho;
        // the density stays between the initial states and has moved right
        assert!(rho.iter().all(|&r| r > 0.1 && r < 1.1));
        assert!(rho[60] > 0.2);
        assert!(rho[30] < 0.99);
        let u = out.state.velocity(DEFAULT_RHO_FLOOR);
        assert!(u[50] > 0.0);
    }

    proptest! {
        #[test]
        fn flux_is_consistent(rho in 1e-3f64..10.0, u in -5.0f64..5.0, gamma in 1.0f64..2.0,
                              eps in 1e-3f64..1.0, beta in 0.0f64..1.0) {
            let p = params(eps, beta, gamma);
            let s = Conserved { rho, q: rho * u };
            let f = rusanov_flux(s, s, &p).unwrap();
            prop_assert!((f.f_rho - rho * u).abs() <= 1e-13 * (1.0 + (rho * u).abs()));
            prop_assert!((f.f_conv - rho * u * u).abs() <= 1e-13 * (1.0 + rho * u * u));
            prop_assert!((f.f_prs - rho.powf(gamma)).abs() <= 1e-13 * (1.0 + rho.powf(gamma)));
        }

        #[test]
        fn cfl_is_monotone(g1 in 0.0f64..10.0, g2 in 0.0f64..10.0, eps in 1e-4f64..1.0) {
            let grid = Grid::new(0.0, 1.0, 50).unwrap();
            let slope = |g: f64| {
                let samples = grid.extended_centers().into_iter().map(|x| g * x).collect();
                Potential::from_samples(samples).unwrap()
            };
            let p = params(eps, 0.5, 1.0);
            let (lo, hi) = if g1 <= g2 { (g1, g2) } else { (g2, g1) };
            prop_assert!(cfl_dt(&grid, &slope(hi), &p) <= cfl_dt(&grid, &slope(lo), &p));
        }
    }
}
