//! Parameters, mesh, potential and state types plus the pressure law and the
//! analytic hydrostatic equilibria.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Scaling parameters of the relaxation system.
///
/// The Mach number, Froude number and scaled friction are tied to ε through
/// `Ma² = ε^{2β}` and `Fr² = μ̄ = ε^{1+β}`; they have no independent fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub epsilon: f64,
    pub beta: f64,
    pub gamma: f64,
    pub lambda_cfl: f64,
}

impl ModelParams {
    pub fn new(epsilon: f64, beta: f64, gamma: f64, lambda_cfl: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                value: epsilon,
                reason: "must lie in (0, 1]",
            });
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::InvalidParameter {
                name: "beta",
                value: beta,
                reason: "must lie in [0, 1]",
            });
        }
        if !(gamma >= 1.0) || !gamma.is_finite() {
            return Err(Error::InvalidParameter {
                name: "gamma",
                value: gamma,
                reason: "must be >= 1",
            });
        }
        if !(lambda_cfl > 0.0 && lambda_cfl < 1.0) {
            return Err(Error::InvalidParameter {
                name: "lambda_cfl",
                value: lambda_cfl,
                reason: "must lie in (0, 1)",
            });
        }
        Ok(Self {
            epsilon,
            beta,
            gamma,
            lambda_cfl,
        })
    }

    /// `ε^{1-β}`, exactly 1 when β = 1.
    pub fn eps_one_minus_beta(&self) -> f64 {
        if self.beta == 1.0 {
            1.0
        } else {
            self.epsilon.powf(1.0 - self.beta)
        }
    }

    /// `ε^{β-1}`, exactly 1 when β = 1.
    pub fn eps_beta_minus_one(&self) -> f64 {
        if self.beta == 1.0 {
            1.0
        } else {
            self.epsilon.powf(self.beta - 1.0)
        }
    }

    /// `ε^{1+β}`, the friction and gravity time scale.
    pub fn eps_one_plus_beta(&self) -> f64 {
        self.epsilon.powf(1.0 + self.beta)
    }

    /// `ε^{-β}`, the factor scaling the sound speed.
    pub fn inv_eps_beta(&self) -> f64 {
        if self.beta == 0.0 {
            1.0
        } else {
            self.epsilon.powf(-self.beta)
        }
    }

    pub fn is_parabolic(&self) -> bool {
        self.beta == 1.0
    }
}

/// Uniform mesh of `n_cells` cells on `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub a: f64,
    pub b: f64,
    pub n_cells: usize,
    pub dx: f64,
    pub centers: Vec<f64>,
}

impl Grid {
    pub fn new(a: f64, b: f64, n_cells: usize) -> Result<Self> {
        if n_cells == 0 {
            return Err(Error::InvalidParameter {
                name: "n_cells",
                value: 0.0,
                reason: "must be positive",
            });
        }
        if !(b > a) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidParameter {
                name: "b",
                value: b,
                reason: "domain must satisfy a < b",
            });
        }
        let dx = (b - a) / n_cells as f64;
        let centers = (0..n_cells).map(|i| a + (i as f64 + 0.5) * dx).collect();
        Ok(Self {
            a,
            b,
            n_cells,
            dx,
            centers,
        })
    }

    /// Cell centre for a ghost-extended index: `-1` and `n_cells` are the ghosts.
    pub fn center(&self, index: isize) -> f64 {
        self.a + (index as f64 + 0.5) * self.dx
    }

    /// Centres including one ghost cell on each side (`n_cells + 2` entries).
    pub fn extended_centers(&self) -> Vec<f64> {
        (-1..=self.n_cells as isize)
            .map(|i| self.center(i))
            .collect()
    }
}

/// Analytic gravitational potentials used by the test problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PotentialKind {
    /// φ(x) = x
    Linear,
    /// φ(x) = x²/2
    Quadratic,
    /// φ(x) = sin(2πx)
    Sinusoidal,
    /// φ(x) = 0 (friction only)
    Flat,
}

impl PotentialKind {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            PotentialKind::Linear => x,
            PotentialKind::Quadratic => 0.5 * x * x,
            PotentialKind::Sinusoidal => (2.0 * PI * x).sin(),
            PotentialKind::Flat => 0.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PotentialKind::Linear => "linear",
            PotentialKind::Quadratic => "quadratic",
            PotentialKind::Sinusoidal => "sine",
            PotentialKind::Flat => "flat",
        }
    }
}

/// Potential sampled at cell centres, one ghost sample on each side.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    pub kind: Option<PotentialKind>,
    samples: Vec<f64>,
}

impl Potential {
    pub fn sample(kind: PotentialKind, grid: &Grid) -> Self {
        let samples = grid
            .extended_centers()
            .into_iter()
            .map(|x| kind.eval(x))
            .collect();
        Self {
            kind: Some(kind),
            samples,
        }
    }

    /// User-supplied samples, ghost-extended (`n_cells + 2` values).
    pub fn from_samples(samples: Vec<f64>) -> Result<Self> {
        if samples.len() < 3 {
            return Err(Error::LengthMismatch {
                expected: 3,
                got: samples.len(),
            });
        }
        Ok(Self {
            kind: None,
            samples,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.samples.len() - 2
    }

    pub fn extended(&self) -> &[f64] {
        &self.samples
    }

    pub fn interior(&self) -> &[f64] {
        &self.samples[1..self.samples.len() - 1]
    }

    /// max |φ_{i+1} - φ_i| / Δx over interfaces between interior cells.
    pub fn max_gradient(&self, dx: f64) -> f64 {
        self.interior()
            .windows(2)
            .map(|w| (w[1] - w[0]).abs() / dx)
            .fold(0.0, f64::max)
    }
}

/// Cell densities and momenta.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub rho: Vec<f64>,
    pub q: Vec<f64>,
}

impl State {
    pub fn new(rho: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        if rho.len() != q.len() {
            return Err(Error::LengthMismatch {
                expected: rho.len(),
                got: q.len(),
            });
        }
        Ok(Self { rho, q })
    }

    pub fn at_rest(rho: Vec<f64>) -> Self {
        let q = vec![0.0; rho.len()];
        Self { rho, q }
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.first_non_finite().is_none()
    }

    pub fn first_non_finite(&self) -> Option<usize> {
        self.rho
            .iter()
            .zip(&self.q)
            .position(|(r, q)| !r.is_finite() || !q.is_finite())
    }

    /// Σ ρ_i Δx
    pub fn mass(&self, dx: f64) -> f64 {
        self.rho.iter().sum::<f64>() * dx
    }

    pub fn max_abs_q(&self) -> f64 {
        self.q.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Velocities `q/ρ`, zero where `ρ <= rho_floor`.
    pub fn velocity(&self, rho_floor: f64) -> Vec<f64> {
        self.rho
            .iter()
            .zip(&self.q)
            .map(|(&r, &q)| if r > rho_floor { q / r } else { 0.0 })
            .collect()
    }
}

/// Weights of the reformulated update, each formed as one grouped expression
/// so that none of them is a product of an overflowing and a vanishing factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepCoefficients {
    /// ε^{1+β} / (ε^{1+β} + Δt)
    pub c1: f64,
    /// c1 Δt, weight of the hyperbolic fluxes
    pub a_hyp: f64,
    /// c1 Δt², weight of ∂xx(q²/ρ) in the mass update
    pub a_kin: f64,
    /// ε^{1-β} Δt² / (ε^{1+β} + Δt), weight of ∂xx P in the mass update
    pub a_prs: f64,
    /// Δt² / (ε^{1+β} + Δt), weight of ∂x(ρ ∂x φ) in the mass update
    pub a_grav: f64,
    /// Δt / (ε^{1+β} + Δt), friction relaxation weight
    pub a_fric: f64,
    /// ε^{1-β} Δt / (ε^{1+β} + Δt) = c1 Δt / ε^{2β}, weight of the pressure terms
    /// in the momentum update
    pub a_src: f64,
}

pub fn step_coefficients(params: &ModelParams, dt: f64) -> StepCoefficients {
    let relax = params.eps_one_plus_beta();
    let e1mb = params.eps_one_minus_beta();
    let denom = relax + dt;
    StepCoefficients {
        c1: relax / denom,
        a_hyp: relax * dt / denom,
        a_kin: relax * dt * dt / denom,
        a_prs: e1mb * dt * dt / denom,
        a_grav: dt * dt / denom,
        a_fric: dt / denom,
        a_src: e1mb * dt / denom,
    }
}

#[inline]
pub(crate) fn pow_law(rho: f64, gamma: f64) -> f64 {
    if gamma == 1.0 {
        rho
    } else {
        rho.powf(gamma)
    }
}

#[inline]
pub(crate) fn pow_law_inverse(p: f64, gamma: f64) -> f64 {
    if gamma == 1.0 {
        p
    } else {
        p.powf(gamma.recip())
    }
}

/// P(ρ) = ρ^γ
pub fn pressure(rho: f64, gamma: f64) -> Result<f64> {
    if !(rho >= 0.0) {
        return Err(Error::Domain {
            what: "density",
            value: rho,
        });
    }
    Ok(pow_law(rho, gamma))
}

/// Inverse of [`pressure`]: y^{1/γ}.
pub fn pressure_inverse(y: f64, gamma: f64) -> Result<f64> {
    if !(y >= 0.0) {
        return Err(Error::Domain {
            what: "pressure",
            value: y,
        });
    }
    Ok(pow_law_inverse(y, gamma))
}

/// Enthalpy ψ(ρ) = γ/(γ-1) ρ^{γ-1}, defined for γ > 1 only.
pub fn psi(rho: f64, gamma: f64) -> Result<f64> {
    if !(gamma > 1.0) {
        return Err(Error::UnsupportedGamma(gamma));
    }
    if !(rho >= 0.0) {
        return Err(Error::Domain {
            what: "density",
            value: rho,
        });
    }
    Ok(gamma / (gamma - 1.0) * rho.powf(gamma - 1.0))
}

pub fn psi_inverse(y: f64, gamma: f64) -> Result<f64> {
    if !(gamma > 1.0) {
        return Err(Error::UnsupportedGamma(gamma));
    }
    if !(y >= 0.0) {
        return Err(Error::Domain {
            what: "enthalpy",
            value: y,
        });
    }
    Ok(((gamma - 1.0) * y / gamma).powf((gamma - 1.0).recip()))
}

/// Scaled sound speed √(γ ρ^{γ-1}) / ε^β.
pub fn sound_speed(rho: f64, params: &ModelParams) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::Domain {
            what: "density",
            value: rho,
        });
    }
    let gamma = params.gamma;
    let c2 = if gamma == 1.0 {
        1.0
    } else {
        gamma * rho.powf(gamma - 1.0)
    };
    Ok(c2.sqrt() * params.inv_eps_beta())
}

/// Isothermal hydrostatic density C exp(ε^{β-1} φ).
pub fn isothermal_equilibrium(phi: f64, constant: f64, params: &ModelParams) -> f64 {
    constant * (params.eps_beta_minus_one() * phi).exp()
}

/// Isentropic hydrostatic density ((γ-1)/γ ε^{β-1} φ + C)^{1/(γ-1)}.
pub fn isentropic_equilibrium(phi: f64, constant: f64, params: &ModelParams) -> Result<f64> {
    let gamma = params.gamma;
    if !(gamma > 1.0) {
        return Err(Error::UnsupportedGamma(gamma));
    }
    let base = (gamma - 1.0) / gamma * params.eps_beta_minus_one() * phi + constant;
    if base < 0.0 {
        return Err(Error::Domain {
            what: "equilibrium base",
            value: base,
        });
    }
    Ok(base.powf((gamma - 1.0).recip()))
}

/// Isothermal equilibrium for γ = 1, isentropic otherwise.
pub fn hydrostatic_equilibrium(phi: f64, constant: f64, params: &ModelParams) -> Result<f64> {
    if params.gamma == 1.0 {
        Ok(isothermal_equilibrium(phi, constant, params))
    } else {
        isentropic_equilibrium(phi, constant, params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(epsilon: f64, beta: f64, gamma: f64) -> ModelParams {
        ModelParams::new(epsilon, beta, gamma, 0.45).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn rejects_bad_params() {
        assert!(ModelParams::new(0.0, 1.0, 1.4, 0.45).is_err());
        assert!(ModelParams::new(1.5, 1.0, 1.4, 0.45).is_err());
        assert!(ModelParams::new(0.5, 1.1, 1.4, 0.45).is_err());
        assert!(ModelParams::new(0.5, 1.0, 0.9, 0.45).is_err());
        assert!(ModelParams::new(0.5, 1.0, 1.4, 1.0).is_err());
        assert!(ModelParams::new(0.5, 1.0, 1.4, f64::NAN).is_err());
    }

    #[test]
    fn grid_layout() {
        let g = Grid::new(0.0, 1.0, 4).unwrap();
        assert_eq!(g.dx, 0.25);
        assert_eq!(g.centers, vec![0.125, 0.375, 0.625, 0.875]);
        assert_eq!(g.center(-1), -0.125);
        assert_eq!(g.extended_centers().len(), 6);
        assert!(Grid::new(1.0, 0.0, 4).is_err());
        assert!(Grid::new(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn potential_samples_are_exact() {
        let g = Grid::new(0.0, 1.0, 10).unwrap();
        for kind in [
            PotentialKind::Linear,
            PotentialKind::Quadratic,
            PotentialKind::Sinusoidal,
        ] {
            let phi = Potential::sample(kind, &g);
            assert_eq!(phi.extended().len(), 12);
            for (x, p) in g.centers.iter().zip(phi.interior()) {
                assert_eq!(*p, kind.eval(*x));
            }
        }
    }

    #[test]
    fn pressure_examples() {
        assert_eq!(pressure(1.0, 1.4).unwrap(), 1.0);
        assert_eq!(pressure(2.0, 1.0).unwrap(), 2.0);
        assert!(close(
            pressure(0.125, 1.4).unwrap(),
            0.054_409_410_206,
            1e-10
        ));
        assert!(pressure(-1.0, 1.4).is_err());
    }

    #[test]
    fn pressure_inverse_examples() {
        assert_eq!(pressure_inverse(1.0, 1.4).unwrap(), 1.0);
        assert!(close(
            pressure_inverse(0.5, 1.4).unwrap(),
            0.609_506_827_102,
            1e-10
        ));
        assert_eq!(pressure_inverse(0.0, 2.0).unwrap(), 0.0);
        assert!(pressure_inverse(-0.1, 2.0).is_err());
    }

    #[test]
    fn psi_examples() {
        assert!(close(psi(1.0, 1.4).unwrap(), 3.5, 1e-14));
        assert_eq!(psi(0.0, 1.4).unwrap(), 0.0);
        assert!(close(psi(2.0, 2.0).unwrap(), 4.0, 1e-14));
        assert_eq!(psi(1.0, 1.0), Err(Error::UnsupportedGamma(1.0)));

        assert!(close(psi_inverse(3.5, 1.4).unwrap(), 1.0, 1e-14));
        assert_eq!(psi_inverse(0.0, 1.4).unwrap(), 0.0);
        assert!(close(psi_inverse(4.0, 2.0).unwrap(), 2.0, 1e-14));
        assert!(psi_inverse(-1.0, 1.4).is_err());
    }

    #[test]
    fn sound_speed_examples() {
        let c = sound_speed(1.0, &params(1.0, 1.0, 1.4)).unwrap();
        assert!(close(c, 1.183_215_956_620, 1e-10));
        let c = sound_speed(1.0, &params(0.01, 1.0, 1.0)).unwrap();
        assert!(close(c, 100.0, 1e-12));
        let c = sound_speed(0.125, &params(1.0, 0.0, 1.4)).unwrap();
        assert!(close(c, 0.780_631_407_456, 1e-10));
        assert!(sound_speed(0.0, &params(1.0, 1.0, 1.4)).is_err());
    }

    #[test]
    fn equilibrium_examples() {
        assert_eq!(
            isothermal_equilibrium(0.0, 1.0, &params(0.3, 0.2, 1.0)),
            1.0
        );
        let e = std::f64::consts::E;
        assert!(close(
            isothermal_equilibrium(1.0, 1.0, &params(0.01, 1.0, 1.0)),
            e,
            1e-15
        ));
        assert!(close(
            isothermal_equilibrium(0.1, 1.0, &params(0.01, 0.5, 1.0)),
            e,
            1e-13
        ));

        let p = params(1.0, 1.0, 1.4);
        assert_eq!(isentropic_equilibrium(0.0, 1.0, &p).unwrap(), 1.0);
        assert!(close(
            isentropic_equilibrium(1.0, 1.0, &p).unwrap(),
            1.874_395_243_699,
            1e-10
        ));
        assert!(isentropic_equilibrium(-3.5, 1.0, &p).unwrap().abs() < 1e-12);
        assert!(isentropic_equilibrium(-4.0, 1.0, &p).is_err());
        assert!(isentropic_equilibrium(0.0, 1.0, &params(1.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn isothermal_parabolic_is_eps_independent() {
        let values: Vec<f64> = [1.0, 0.1, 0.001]
            .iter()
            .map(|&eps| isothermal_equilibrium(0.37, 1.3, &params(eps, 1.0, 1.0)))
            .collect();
        assert_eq!(values[0].to_bits(), values[1].to_bits());
        assert_eq!(values[0].to_bits(), values[2].to_bits());
    }

    #[test]
    fn step_coefficient_examples() {
        let k = step_coefficients(&params(1.0, 1.0, 1.4), 0.1);
        assert!(close(k.c1, 1.0 / 1.1, 1e-15));
        assert!(close(k.a_fric, 0.1 / 1.1, 1e-15));

        let k = step_coefficients(&params(1e-12, 1.0, 1.4), 0.1);
        assert!((k.a_prs - 0.1).abs() < 1e-15);
        assert!((k.a_grav - 0.1).abs() < 1e-15);
        assert!(close(k.c1, 1e-23, 1e-10));

        let k = step_coefficients(&params(1.0, 0.0, 1.4), 0.5);
        assert!(close(k.a_src, 1.0 / 3.0, 1e-15));
    }

    #[test]
    fn step_coefficient_identities() {
        let p = params(0.5, 0.5, 1.4);
        let dt = 0.03;
        let k = step_coefficients(&p, dt);
        let e1mb = 0.5f64.powf(0.5);
        assert!(close(k.a_prs, k.a_grav * e1mb, 1e-14));
        assert!(close(k.a_src, k.a_hyp / 0.5f64.powf(1.0), 1e-14));
        let relax = 0.5f64.powf(1.5);
        assert!(close(k.c1 * (relax + dt), relax, 1e-14));
        assert!(close(k.a_fric * (relax + dt), dt, 1e-14));
        assert!(close(k.c1 + k.a_fric, 1.0, 1e-14));
    }

    #[test]
    fn step_coefficient_limits() {
        let dt = 0.1;
        for beta in [0.0, 0.1, 0.5, 1.0] {
            let k = step_coefficients(&params(1e-12, beta, 1.4), dt);
            assert!(k.c1.abs() < 1e-10);
            assert!(k.a_hyp.abs() < 1e-10);
            assert!(k.a_kin.abs() < 1e-10);
            assert!((k.a_fric - 1.0).abs() < 1e-10);
            assert!((k.a_grav - dt).abs() < 1e-10);
            // a_prs → ε^{1-β} Δt, which vanishes for β < 1
            let prs_limit = 1e-12f64.powf(1.0 - beta) * dt;
            assert!(
                (k.a_prs - prs_limit).abs() <= 1e-10 * prs_limit,
                "beta {beta}: {}",
                k.a_prs
            );
            for w in [k.c1, k.a_hyp, k.a_kin, k.a_prs, k.a_grav, k.a_fric, k.a_src] {
                assert!(w.is_finite() && w >= 0.0);
            }
        }
    }

    #[test]
    fn step_coefficients_stay_finite_for_tiny_eps() {
        for eps in [1e-8, 1e-12, 1e-100] {
            for beta in [0.0, 0.3, 1.0] {
                let k = step_coefficients(&params(eps, beta, 1.4), 1e-4);
                for w in [k.c1, k.a_hyp, k.a_kin, k.a_prs, k.a_grav, k.a_fric, k.a_src] {
                    assert!(w.is_finite() && w < 1.0 + 1e-12);
                }
            }
        }
    }

    #[test]
    fn pressure_and_psi_roundtrip_logspaced() {
        for gamma in [1.0, 1.4, 2.0, 3.0] {
            for k in 0..=90 {
                let rho = 10f64.powf(-6.0 + k as f64 / 10.0);
                let back = pressure_inverse(pressure(rho, gamma).unwrap(), gamma).unwrap();
                assert!((back - rho).abs() <= 1e-12 * rho);
                if gamma > 1.0 {
                    let back = psi_inverse(psi(rho, gamma).unwrap(), gamma).unwrap();
                    assert!((back - rho).abs() <= 1e-12 * rho);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn pressure_strictly_increasing(a in 1e-6f64..1e3, b in 1e-6f64..1e3, gamma in 1.0f64..3.0) {
            prop_assume!(a < b * (1.0 - 1e-9));
            prop_assert!(pressure(a, gamma).unwrap() < pressure(b, gamma).unwrap());
            if gamma > 1.0 + 1e-9 {
                prop_assert!(psi(a, gamma).unwrap() < psi(b, gamma).unwrap());
            }
        }
    }
}
