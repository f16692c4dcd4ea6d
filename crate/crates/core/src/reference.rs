//! Explicit solvers for the two relaxation limits and a fully explicit Euler
//! scheme without asymptotic-preserving treatment.
//!
//! The density-only steps take ghost-extended arrays (`n + 2` entries, e.g. from
//! [`apply_bc`]) and return the `n` interior values:
//!
//! - [`porous_medium_step`]: `∂t ρ + ∂x(ρ ∂x φ) = ∂xx P(ρ)`, centred differences;
//! - [`transport_limit_step`]: `∂t ρ + ∂x(ρ ∂x φ) = 0`, same centred gravity flux;
//! - [`transport_upwind_step`]: donor cell for the transport equation.

use crate::error::{Error, Result};
use crate::model::{pow_law, Grid, ModelParams, Potential, State};
use crate::scheme::{apply_bc, BoundaryCondition, Extended};

fn gravity_flux(rho: &[f64], phi: &[f64], k: usize) -> f64 {
    0.5 * (rho[k] + rho[k + 1]) * (phi[k + 1] - phi[k])
}

/// One explicit Euler step of the centred porous medium discretisation.
pub fn porous_medium_step(rho: &[f64], phi: &[f64], dt: f64, dx: f64, gamma: f64) -> Vec<f64> {
    let r = dt / (dx * dx);
    let p: Vec<f64> = rho.iter().map(|&v| pow_law(v, gamma)).collect();
    (1..rho.len() - 1)
        .map(|c| {
            let laplace = p[c + 1] - 2.0 * p[c] + p[c - 1];
            let gravity = gravity_flux(rho, phi, c) - gravity_flux(rho, phi, c - 1);
            rho[c] + r * laplace - r * gravity
        })
        .collect()
}

/// One explicit Euler step of the centred transport discretisation.
pub fn transport_limit_step(rho: &[f64], phi: &[f64], dt: f64, dx: f64) -> Vec<f64> {
    let r = dt / (dx * dx);
    (1..rho.len() - 1)
        .map(|c| rho[c] - r * (gravity_flux(rho, phi, c) - gravity_flux(rho, phi, c - 1)))
        .collect()
}

/// One donor-cell upwind step for `∂t ρ + ∂x(ρ v) = 0`, `v_{i+1/2} = Δφ/Δx`.
pub fn transport_upwind_step(rho: &[f64], phi: &[f64], dt: f64, dx: f64) -> Vec<f64> {
    let flux = |k: usize| {
        let v = (phi[k + 1] - phi[k]) / dx;
        if v >= 0.0 {
            v * rho[k]
        } else {
            v * rho[k + 1]
        }
    };
    (1..rho.len() - 1)
        .map(|c| rho[c] - dt / dx * (flux(c) - flux(c - 1)))
        .collect()
}

/// One forward Euler step of the Euler system with Rusanov fluxes at raw cell
/// values, the stiff pressure included, and the pointwise relaxation source.
pub fn explicit_nonap_step(
    ext: &Extended,
    dx: f64,
    dt: f64,
    params: &ModelParams,
    rho_floor: f64,
) -> Result<State> {
    let n = ext.n_cells();
    let mut out = State::at_rest(vec![0.0; n]);
    explicit_nonap_into(ext, &mut out, dx, dt, params, rho_floor)?;
    match out.first_non_finite() {
        Some(cell) => Err(Error::NonFinite { cell }),
        None => Ok(out),
    }
}

pub(crate) fn explicit_nonap_into(
    ext: &Extended,
    out: &mut State,
    dx: f64,
    dt: f64,
    params: &ModelParams,
    rho_floor: f64,
) -> Result<()> {
    let n = ext.n_cells();
    let gamma = params.gamma;
    let inv_eps_beta = params.inv_eps_beta();
    let stiff = inv_eps_beta * inv_eps_beta;
    let relax = params.eps_one_plus_beta();
    let (rho, q, phi) = (&ext.rho, &ext.q, &ext.phi);

    let flux = |k: usize| -> (f64, f64) {
        let side = |i: usize| {
            let u = if rho[i] > rho_floor {
                q[i] / rho[i]
            } else {
                0.0
            };
            let p = pow_law(rho[i], gamma);
            let speed = if rho[i] > rho_floor {
                let c2 = if gamma == 1.0 {
                    1.0
                } else {
                    gamma * p / rho[i]
                };
                u.abs() + c2.sqrt() * inv_eps_beta
            } else {
                0.0
            };
            (rho[i], rho[i] * u, q[i] * u + stiff * p, speed)
        };
        let (rl, ql, ml, sl) = side(k);
        let (rr, qr, mr, sr) = side(k + 1);
        let a = sl.max(sr);
        (
            0.5 * (ql + qr) - 0.5 * a * (rr - rl),
            0.5 * (ml + mr) - 0.5 * a * (qr - ql),
        )
    };

    let mut left = flux(0);
    for j in 0..n {
        let c = j + 1;
        let right = flux(c);
        out.rho[j] = rho[c] - dt / dx * (right.0 - left.0);
        let gravity = rho[c] * (phi[c + 1] - phi[c - 1]) / (2.0 * dx);
        out.q[j] = q[c] - dt / dx * (right.1 - left.1) - dt / relax * (q[c] - gravity);
        left = right;
    }
    Ok(())
}

/// Density-only solvers of the limit equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitSolver {
    PorousMedium { gamma: f64 },
    TransportCentral,
    TransportUpwind,
}

impl LimitSolver {
    pub fn step(&self, rho: &[f64], phi: &[f64], dt: f64, dx: f64) -> Vec<f64> {
        match *self {
            LimitSolver::PorousMedium { gamma } => porous_medium_step(rho, phi, dt, dx, gamma),
            LimitSolver::TransportCentral => transport_limit_step(rho, phi, dt, dx),
            LimitSolver::TransportUpwind => transport_upwind_step(rho, phi, dt, dx),
        }
    }
}

/// Advance a limit solver to `t_final` with a fixed step `dt`, clipping the last
/// step. Ghost densities come from `bc` (momentum is ignored).
#[allow(clippy::too_many_arguments)]
pub fn run_limit(
    solver: LimitSolver,
    rho0: &[f64],
    phi: &Potential,
    grid: &Grid,
    dt: f64,
    t_final: f64,
    bc: &BoundaryCondition,
    params: &ModelParams,
) -> Result<Vec<f64>> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter {
            name: "dt",
            value: dt,
            reason: "must be positive",
        });
    }
    let n_steps = if t_final > 0.0 {
        (t_final / dt - 1e-9).ceil().max(1.0) as usize
    } else {
        0
    };
    let mut state = State::at_rest(rho0.to_vec());
    for k in 0..n_steps {
        let h = if k + 1 == n_steps {
            t_final - k as f64 * dt
        } else {
            dt
        };
        let ext = apply_bc(&state, phi, bc, params)?;
        state.rho = solver.step(&ext.rho, &ext.phi, h, grid.dx);
        if !state.is_finite() {
            return Err(Error::BlowUp {
                step: k + 1,
                time: k as f64 * dt + h,
            });
        }
    }
    Ok(state.rho)
}
