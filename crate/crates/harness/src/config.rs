//! Experiment configuration: defaults per experiment, a flat `key=value` file
//! format and command-line overrides.

use std::fmt;
use std::path::{Path, PathBuf};

use apwb_core::{BoundaryCondition, ModelParams, PotentialKind, Reconstruction, Variant};
use clap::ValueEnum;

use crate::error::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    Run,
    Sod,
    HydroTable,
    Perturb,
    Longtime,
    MeshSweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PotentialArg {
    Linear,
    Quadratic,
    Sine,
    Flat,
}

impl PotentialArg {
    pub fn kind(self) -> PotentialKind {
        match self {
            PotentialArg::Linear => PotentialKind::Linear,
            PotentialArg::Quadratic => PotentialKind::Quadratic,
            PotentialArg::Sine => PotentialKind::Sinusoidal,
            PotentialArg::Flat => PotentialKind::Flat,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BcArg {
    Extrap,
    Periodic,
    Equilibrium,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReconArg {
    P,
    E,
    None,
}

impl ReconArg {
    pub fn reconstruction(self) -> Reconstruction {
        match self {
            ReconArg::P => Reconstruction::P,
            ReconArg::E => Reconstruction::E,
            ReconArg::None => Reconstruction::None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Ap,
    Nonap,
}

impl VariantArg {
    pub fn variant(self) -> Variant {
        match self {
            VariantArg::Ap => Variant::UnifiedAp,
            VariantArg::Nonap => Variant::ExplicitNonAp,
        }
    }
}

fn value_name<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value()
        .map(|p| p.get_name().to_owned())
        .unwrap_or_default()
}

/// Optional settings from a config file or the command line.
#[derive(Debug, Clone, Default, PartialEq, clap::Args)]
pub struct Settings {
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub cells: Option<usize>,
    #[arg(long = "t-final")]
    pub t_final: Option<f64>,
    #[arg(long, value_enum)]
    pub potential: Option<PotentialArg>,
    #[arg(long, value_enum)]
    pub bc: Option<BcArg>,
    #[arg(long, value_enum)]
    pub recon: Option<ReconArg>,
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    #[arg(long)]
    pub zeta: Option<f64>,
    #[arg(long)]
    pub cfl: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Restrict sweeps to the coarse meshes.
    #[arg(long)]
    pub fast: bool,
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, HarnessError> {
    value
        .parse()
        .map_err(|_| HarnessError::Config(format!("invalid value for {key}: {value:?}")))
}

fn parse_enum<T: ValueEnum>(key: &str, value: &str) -> Result<T, HarnessError> {
    T::from_str(value, true)
        .map_err(|_| HarnessError::Config(format!("invalid value for {key}: {value:?}")))
}

impl Settings {
    /// Parse `key=value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut s = Settings::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                HarnessError::Config(format!("line {}: expected key=value", lineno + 1))
            })?;
            let key = key.trim().replace('_', "-");
            let value = value.trim();
            match key.as_str() {
                "eps" => s.eps = Some(parse_value(&key, value)?),
                "beta" => s.beta = Some(parse_value(&key, value)?),
                "gamma" => s.gamma = Some(parse_value(&key, value)?),
                "cells" => s.cells = Some(parse_value(&key, value)?),
                "t-final" => s.t_final = Some(parse_value(&key, value)?),
                "potential" => s.potential = Some(parse_enum(&key, value)?),
                "bc" => s.bc = Some(parse_enum(&key, value)?),
                "recon" => s.recon = Some(parse_enum(&key, value)?),
                "variant" => s.variant = Some(parse_enum(&key, value)?),
                "zeta" => s.zeta = Some(parse_value(&key, value)?),
                "cfl" => s.cfl = Some(parse_value(&key, value)?),
                "out" => s.out = Some(PathBuf::from(value)),
                "fast" => s.fast = parse_value(&key, value)?,
                other => {
                    return Err(HarnessError::Config(format!(
                        "line {}: unknown key {other:?}",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(s)
    }

    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Values set in `other` win.
    pub fn overlay(self, other: Settings) -> Settings {
        Settings {
            eps: other.eps.or(self.eps),
            beta: other.beta.or(self.beta),
            gamma: other.gamma.or(self.gamma),
            cells: other.cells.or(self.cells),
            t_final: other.t_final.or(self.t_final),
            potential: other.potential.or(self.potential),
            bc: other.bc.or(self.bc),
            recon: other.recon.or(self.recon),
            variant: other.variant.or(self.variant),
            zeta: other.zeta.or(self.zeta),
            cfl: other.cfl.or(self.cfl),
            out: other.out.or(self.out),
            fast: other.fast || self.fast,
        }
    }
}

/// Which sweep dimensions were pinned by the user.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Pinned {
    pub eps: bool,
    pub beta: bool,
    pub potential: bool,
    pub cells: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub experiment: Experiment,
    pub eps: f64,
    pub beta: f64,
    pub gamma: f64,
    pub cells: usize,
    pub t_final: f64,
    pub potential: PotentialArg,
    pub bc: BcArg,
    pub recon: ReconArg,
    pub variant: VariantArg,
    pub zeta: f64,
    pub cfl: f64,
    pub out: PathBuf,
    pub fast: bool,
    pub pinned: Pinned,
}

/// λ used when none is given. The equilibrium experiments with γ > 1 include
/// the stiff parabolic regime, where the explicit pressure diffusion needs
/// λ P'(ρ) < 1/2.
pub fn default_cfl(experiment: Experiment, gamma: f64) -> f64 {
    match experiment {
        Experiment::HydroTable | Experiment::Perturb | Experiment::Longtime if gamma > 1.0 => 0.2,
        _ => 0.45,
    }
}

impl Config {
    pub fn resolve(experiment: Experiment, s: Settings) -> Result<Self, HarnessError> {
        use Experiment::*;
        let (eps, gamma, t_final, potential, bc, zeta) = match experiment {
            Run | Sod => (1.0, 1.4, 0.2, PotentialArg::Linear, BcArg::Extrap, 0.0),
            HydroTable => (1.0, 1.0, 2.0, PotentialArg::Linear, BcArg::Equilibrium, 0.0),
            Perturb => (
                1.0,
                1.0,
                0.25,
                PotentialArg::Linear,
                BcArg::Equilibrium,
                1e-3,
            ),
            Longtime => (
                1.0,
                1.0,
                100.0,
                PotentialArg::Linear,
                BcArg::Equilibrium,
                1e-3,
            ),
            MeshSweep => (1e-3, 1.0, 0.05, PotentialArg::Flat, BcArg::Periodic, 0.0),
        };
        let gamma = s.gamma.unwrap_or(gamma);
        let cfg = Config {
            experiment,
            eps: s.eps.unwrap_or(eps),
            beta: s.beta.unwrap_or(1.0),
            gamma,
            cells: s.cells.unwrap_or(100),
            t_final: s.t_final.unwrap_or(t_final),
            potential: s.potential.unwrap_or(potential),
            bc: s.bc.unwrap_or(bc),
            recon: s.recon.unwrap_or(ReconArg::P),
            variant: s.variant.unwrap_or(VariantArg::Ap),
            zeta: s.zeta.unwrap_or(zeta),
            cfl: s.cfl.unwrap_or_else(|| default_cfl(experiment, gamma)),
            out: s.out.unwrap_or_else(|| PathBuf::from("out")),
            fast: s.fast,
            pinned: Pinned {
                eps: s.eps.is_some(),
                beta: s.beta.is_some(),
                potential: s.potential.is_some(),
                cells: s.cells.is_some(),
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), HarnessError> {
        self.params()?;
        if self.cells == 0 {
            return Err(HarnessError::Config("cells must be positive".into()));
        }
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            return Err(HarnessError::Config(format!(
                "t-final must be positive, got {}",
                self.t_final
            )));
        }
        if !(self.zeta >= 0.0) || !self.zeta.is_finite() {
            return Err(HarnessError::Config(format!(
                "zeta must be non-negative, got {}",
                self.zeta
            )));
        }
        if self.recon == ReconArg::E && !(self.gamma > 1.0) {
            return Err(HarnessError::Config(
                "the E-reconstruction needs gamma > 1".into(),
            ));
        }
        Ok(())
    }

    pub fn params(&self) -> Result<ModelParams, HarnessError> {
        self.params_with(self.eps, self.beta)
    }

    pub fn params_with(&self, eps: f64, beta: f64) -> Result<ModelParams, HarnessError> {
        ModelParams::new(eps, beta, self.gamma, self.cfl)
            .map_err(|e| HarnessError::Config(e.to_string()))
    }

    /// Boundary condition for the core solver; the equilibrium ghost uses C = 1.
    pub fn boundary(&self) -> BoundaryCondition {
        match self.bc {
            BcArg::Extrap => BoundaryCondition::Extrapolation,
            BcArg::Periodic => BoundaryCondition::Periodic,
            BcArg::Equilibrium => BoundaryCondition::EquilibriumGhost { constant: 1.0 },
        }
    }

    /// Key/value echo of every setting, in a fixed order.
    pub fn echo(&self) -> Vec<(String, String)> {
        vec![
            ("experiment".into(), value_name(&self.experiment)),
            ("eps".into(), self.eps.to_string()),
            ("beta".into(), self.beta.to_string()),
            ("gamma".into(), self.gamma.to_string()),
            ("cells".into(), self.cells.to_string()),
            ("t-final".into(), self.t_final.to_string()),
            ("potential".into(), value_name(&self.potential)),
            ("bc".into(), value_name(&self.bc)),
            ("recon".into(), value_name(&self.recon)),
            ("variant".into(), value_name(&self.variant)),
            ("zeta".into(), self.zeta.to_string()),
            ("cfl".into(), self.cfl.to_string()),
            ("fast".into(), self.fast.to_string()),
        ]
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .echo()
            .into_iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_file_format() {
        let s = Settings::parse(
            "# comment\n eps = 0.01\ncells=200 # trailing\nt_final=1.5\npotential=sine\nbc=periodic\nfast=true\n",
        )
        .unwrap();
        assert_eq!(s.eps, Some(0.01));
        assert_eq!(s.cells, Some(200));
        assert_eq!(s.t_final, Some(1.5));
        assert_eq!(s.potential, Some(PotentialArg::Sine));
        assert_eq!(s.bc, Some(BcArg::Periodic));
        assert!(s.fast);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(Settings::parse("eps").is_err());
        assert!(Settings::parse("colour=blue").is_err());
        assert!(Settings::parse("eps=abc").is_err());
        assert!(Settings::parse("recon=q").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = Settings::parse("eps=0.1\ncells=50").unwrap();
        let flags = Settings {
            eps: Some(0.5),
            ..Settings::default()
        };
        let merged = file.overlay(flags);
        assert_eq!(merged.eps, Some(0.5));
        assert_eq!(merged.cells, Some(50));
    }

    #[test]
    fn defaults_follow_experiment() {
        let c = Config::resolve(Experiment::HydroTable, Settings::default()).unwrap();
        assert_eq!((c.gamma, c.t_final, c.bc), (1.0, 2.0, BcArg::Equilibrium));
        assert_eq!(c.cfl, 0.45);
        assert!(!c.pinned.eps);
        let c = Config::resolve(
            Experiment::HydroTable,
            Settings {
                gamma: Some(1.4),
                ..Settings::default()
            },
        )
        .unwrap();
        assert_eq!(c.cfl, 0.2);
        let c = Config::resolve(Experiment::MeshSweep, Settings::default()).unwrap();
        assert_eq!(
            (c.eps, c.potential, c.bc),
            (1e-3, PotentialArg::Flat, BcArg::Periodic)
        );
    }

    #[test]
    fn invalid_values_are_config_errors() {
        for s in [
            Settings {
                eps: Some(0.0),
                ..Settings::default()
            },
            Settings {
                cells: Some(0),
                ..Settings::default()
            },
            Settings {
                t_final: Some(-1.0),
                ..Settings::default()
            },
            Settings {
                cfl: Some(1.5),
                ..Settings::default()
            },
            Settings {
                recon: Some(ReconArg::E),
                gamma: Some(1.0),
                ..Settings::default()
            },
        ] {
            let err = Config::resolve(Experiment::Run, s).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{err}");
        }
    }
}
