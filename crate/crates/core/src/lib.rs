//! Finite-volume solver for the one-dimensional, ε-scaled isentropic Euler
//! system with gravity and friction:
//!
//! ```text
//! ∂t ρ + ∂x q = 0
//! ∂t q + ∂x (q²/ρ) + ε^{-2β} ∂x P(ρ) = -ε^{-(1+β)} (q - ρ ∂x φ),   P(ρ) = ρ^γ
//! ```
//!
//! The main scheme ([`scheme::step`]) treats the momentum implicitly in time and
//! eliminates it from the mass update, which leaves a fully explicit update whose
//! mass equation carries both hyperbolic and parabolic fluxes. As ε → 0 it turns
//! into an explicit discretisation of the porous medium equation (β = 1) or of the
//! transport equation ∂t ρ + ∂x(ρ ∂x φ) = 0 (β < 1), and it keeps discrete
//! hydrostatic states ([`wellbalance::build_discrete_equilibrium`]) exactly
//! stationary.
//!
//! [`reference`] holds the explicit limit solvers and the fully explicit
//! (non asymptotic-preserving) Euler scheme used for comparisons.

pub mod error;
pub mod model;
pub mod reference;
pub mod scheme;
pub mod wellbalance;

pub use error::{Error, Result};
pub use model::{Grid, ModelParams, Potential, PotentialKind, State, StepCoefficients};
pub use scheme::{BoundaryCondition, Reconstruction, RunOutput, SchemeOptions, Variant};
