//! Hydrostatic reconstruction of interface states, upwinded momentum sources
//! and discrete hydrostatic steady states.
//!
//! A discrete hydrostatic state is a sequence with `q_i = 0` and
//!
//! ```text
//! ε^{1-β} (P(ρ_{i+1}) - P(ρ_i)) = ρ̄_{i+1/2} (φ_{i+1} - φ_i),   ρ̄_{i+1/2} = (ρ_i + ρ_{i+1}) / 2
//! ```
//!
//! The P-reconstruction is built from the same balance, so on such a state both
//! reconstructed densities at an interface coincide and the pressure flux
//! difference cancels the upwinded source exactly.

use crate::error::{Error, Result};
use crate::model::{pow_law, pow_law_inverse, psi, psi_inverse, ModelParams, State};

/// Reconstructed states on both sides of the interface `i+1/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceStates {
    pub rho_minus: f64,
    pub rho_plus: f64,
    /// P(ρ⁻), kept alongside the density to avoid a round trip through P⁻¹.
    pub p_minus: f64,
    pub p_plus: f64,
    pub u_minus: f64,
    pub u_plus: f64,
    /// min(φ_i, φ_{i+1})
    pub phi_star: f64,
}

impl InterfaceStates {
    /// Attach the cell velocities `u⁻ = q_i/ρ_i`, `u⁺ = q_{i+1}/ρ_{i+1}`.
    /// A side whose reconstructed density is at or below `rho_floor` gets `u = 0`.
    pub fn with_velocities(mut self, u_i: f64, u_ip1: f64, rho_floor: f64) -> Self {
        self.u_minus = if self.rho_minus > rho_floor { u_i } else { 0.0 };
        self.u_plus = if self.rho_plus > rho_floor {
            u_ip1
        } else {
            0.0
        };
        self
    }

    pub fn q_minus(&self) -> f64 {
        self.rho_minus * self.u_minus
    }

    pub fn q_plus(&self) -> f64 {
        self.rho_plus * self.u_plus
    }
}

/// Cell data entering a reconstruction: density, its pressure and the potential.
#[derive(Debug, Clone, Copy)]
pub(crate) struct CellValue {
    pub rho: f64,
    pub p: f64,
    pub phi: f64,
}

/// P-reconstruction on precomputed pressures; `e1mb` is ε^{1-β}.
#[inline]
pub(crate) fn reconstruct_p_raw(
    left: CellValue,
    right: CellValue,
    e1mb: f64,
    gamma: f64,
) -> InterfaceStates {
    let phi_star = left.phi.min(right.phi);
    let rho_bar = 0.5 * (left.rho + right.rho);
    let side = |c: CellValue| -> (f64, f64) {
        if c.phi == phi_star {
            (c.rho, c.p)
        } else {
            let p = (e1mb * c.p + rho_bar * (phi_star - c.phi)).max(0.0) / e1mb;
            (pow_law_inverse(p, gamma), p)
        }
    };
    let (rho_minus, p_minus) = side(left);
    let (rho_plus, p_plus) = side(right);
    InterfaceStates {
        rho_minus,
        rho_plus,
        p_minus,
        p_plus,
        u_minus: 0.0,
        u_plus: 0.0,
        phi_star,
    }
}

/// E-reconstruction (enthalpy balance); caller guarantees γ > 1.
#[inline]
pub(crate) fn reconstruct_e_raw(
    left: CellValue,
    right: CellValue,
    e1mb: f64,
    gamma: f64,
) -> InterfaceStates {
    let phi_star = left.phi.min(right.phi);
    let scale = gamma / (gamma - 1.0);
    let side = |c: CellValue| -> (f64, f64) {
        if c.phi == phi_star {
            (c.rho, c.p)
        } else {
            let psi_c = scale * c.rho.powf(gamma - 1.0);
            let psi_s = (e1mb * psi_c + (phi_star - c.phi)).max(0.0) / e1mb;
            let rho = (psi_s / scale).powf((gamma - 1.0).recip());
            (rho, pow_law(rho, gamma))
        }
    };
    let (rho_minus, p_minus) = side(left);
    let (rho_plus, p_plus) = side(right);
    InterfaceStates {
        rho_minus,
        rho_plus,
        p_minus,
        p_plus,
        u_minus: 0.0,
        u_plus: 0.0,
        phi_star,
    }
}

fn check_density(rho: f64) -> Result<()> {
    if rho >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "density",
            value: rho,
        })
    }
}

/// Hydrostatic P-reconstruction at the interface between cells `i` and `i+1`.
///
/// Velocities are zero; use [`InterfaceStates::with_velocities`] to carry the
/// cell velocities.
pub fn reconstruct_p(
    rho_i: f64,
    rho_ip1: f64,
    phi_i: f64,
    phi_ip1: f64,
    params: &ModelParams,
) -> Result<InterfaceStates> {
    check_density(rho_i)?;
    check_density(rho_ip1)?;
    let gamma = params.gamma;
    Ok(reconstruct_p_raw(
        CellValue {
            rho: rho_i,
            p: pow_law(rho_i, gamma),
            phi: phi_i,
        },
        CellValue {
            rho: rho_ip1,
            p: pow_law(rho_ip1, gamma),
            phi: phi_ip1,
        },
        params.eps_one_minus_beta(),
        gamma,
    ))
}

/// Hydrostatic E-reconstruction, built on ψ(ρ) = γ/(γ-1) ρ^{γ-1}.
pub fn reconstruct_e(
    rho_i: f64,
    rho_ip1: f64,
    phi_i: f64,
    phi_ip1: f64,
    params: &ModelParams,
) -> Result<InterfaceStates> {
    let gamma = params.gamma;
    if !(gamma > 1.0) {
        return Err(Error::UnsupportedGamma(gamma));
    }
    check_density(rho_i)?;
    check_density(rho_ip1)?;
    // validates the inversion domain as well
    psi_inverse(psi(rho_i, gamma)?, gamma)?;
    Ok(reconstruct_e_raw(
        CellValue {
            rho: rho_i,
            p: pow_law(rho_i, gamma),
            phi: phi_i,
        },
        CellValue {
            rho: rho_ip1,
            p: pow_law(rho_ip1, gamma),
            phi: phi_ip1,
        },
        params.eps_one_minus_beta(),
        gamma,
    ))
}

/// Upwinded momentum source of cell `i`,
/// `[(P(ρ⁻_{i+1/2}) - P(ρ_i)) + (P(ρ_i) - P(ρ⁺_{i-1/2}))] / Δx`.
///
/// The 1/ε^{2β} stiffness is not applied here; the scheme multiplies by the
/// grouped weight `a_src`.
pub fn momentum_source(
    rho_i: f64,
    rho_minus_right: f64,
    rho_plus_left: f64,
    params: &ModelParams,
    dx: f64,
) -> Result<f64> {
    check_density(rho_i)?;
    check_density(rho_minus_right)?;
    check_density(rho_plus_left)?;
    let gamma = params.gamma;
    let p_i = pow_law(rho_i, gamma);
    let right_half = pow_law(rho_minus_right, gamma) - p_i;
    let left_half = p_i - pow_law(rho_plus_left, gamma);
    Ok((right_half + left_half) / dx)
}

/// Residual of the discrete balance between two neighbouring cells.
#[inline]
fn balance(e1mb: f64, gamma: f64, rho_i: f64, rho_ip1: f64, dphi: f64) -> f64 {
    e1mb * (pow_law(rho_ip1, gamma) - pow_law(rho_i, gamma)) - 0.5 * (rho_i + rho_ip1) * dphi
}

/// Discrete hydrostatic densities on the samples `phi`, starting from
/// `rho_anchor` in the first entry.
///
/// γ = 1 has the closed form `ρ_{i+1} = ρ_i (ε' + Δφ/2) / (ε' - Δφ/2)`; for γ > 1
/// each cell is a scalar root of the balance, found by bisection.
pub fn build_discrete_equilibrium(
    phi: &[f64],
    rho_anchor: f64,
    params: &ModelParams,
) -> Result<Vec<f64>> {
    if !(rho_anchor > 0.0) {
        return Err(Error::Domain {
            what: "anchor density",
            value: rho_anchor,
        });
    }
    let e1mb = params.eps_one_minus_beta();
    let gamma = params.gamma;
    let mut rho = Vec::with_capacity(phi.len());
    rho.push(rho_anchor);
    for (cell, w) in phi.windows(2).enumerate() {
        let current = rho[cell];
        let dphi = w[1] - w[0];
        let next = if dphi == 0.0 {
            current
        } else if gamma == 1.0 {
            let denom = e1mb - 0.5 * dphi;
            if denom <= 0.0 {
                return Err(Error::NoEquilibrium { cell });
            }
            current * (e1mb + 0.5 * dphi) / denom
        } else {
            solve_balance(e1mb, gamma, current, dphi).ok_or(Error::NoEquilibrium { cell })?
        };
        if !(next > 0.0) || !next.is_finite() {
            return Err(Error::NoEquilibrium { cell });
        }
        rho.push(next);
    }
    Ok(rho)
}

/// Root of the balance in `[ρ_i, 1e3 ρ_i]` (Δφ > 0) or `[1e-3 ρ_i, ρ_i]` (Δφ < 0).
fn solve_balance(e1mb: f64, gamma: f64, current: f64, dphi: f64) -> Option<f64> {
    let f = |x: f64| balance(e1mb, gamma, current, x, dphi);
    let (mut lo, mut hi) = if dphi > 0.0 {
        (current, current * 1e3)
    } else {
        (current * 1e-3, current)
    };
    let (mut f_lo, f_hi) = (f(lo), f(hi));
    if f_lo == 0.0 {
        return Some(lo);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return None;
    }
    while hi - lo > 1e-14 * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Some(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Some(if f(lo).abs() <= f(hi).abs() { lo } else { hi })
}

/// max_i |ε^{1-β}(P(ρ_{i+1}) - P(ρ_i)) - ρ̄_{i+1/2}(φ_{i+1} - φ_i)| + max_i |q_i|,
/// with `phi` sampled on the same cells as `state`.
pub fn equilibrium_residual(state: &State, phi: &[f64], params: &ModelParams) -> Result<f64> {
    if phi.len() != state.len() {
        return Err(Error::LengthMismatch {
            expected: state.len(),
            got: phi.len(),
        });
    }
    let e1mb = params.eps_one_minus_beta();
    let density = state
        .rho
        .windows(2)
        .zip(phi.windows(2))
        .map(|(r, p)| balance(e1mb, params.gamma, r[0], r[1], p[1] - p[0]).abs())
        .fold(0.0, f64::max);
    Ok(density + state.max_abs_q())
}
