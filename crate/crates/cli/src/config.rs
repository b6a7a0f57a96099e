//! Run configuration: a TOML document whose every field has a default, with
//! command-line flags layered on top.

use std::path::PathBuf;

use clap::ValueEnum;
use ltsharp::{Box2d, PotentialSpec, Potential2dSpec};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Eig,
    Scatter,
    Sumrules,
    Ltcheck,
    Weyl,
    Lift,
    Constants,
    PauliRhs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Text,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Numerics {
    /// Nodes per axis of the coarse 2D grid.
    pub grid_points: usize,
    /// Coarse spacing of the 1D finite-difference grid.
    pub spacing: f64,
    /// Dirichlet padding of the 1D box; automatic when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pad: Option<f64>,
    pub k_min: f64,
    pub k_max: f64,
    pub k_points: usize,
    /// Relative tolerance of the `ln|det A|` moment integrals.
    pub quadrature_tol: f64,
    /// Largest accepted residual of the scattering relations.
    pub residual_tol: f64,
    /// Largest accepted relative residual of the sum rules.
    pub sumrule_tol: f64,
    pub gamma: f64,
    pub d: u32,
    pub alphas: Vec<f64>,
    /// Overrides the seed of random Hermitian potentials.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            grid_points: 51,
            spacing: 0.005,
            pad: None,
            k_min: 0.25,
            k_max: 32.0,
            k_points: 128,
            quadrature_tol: 1e-6,
            residual_tol: 1e-6,
            sumrule_tol: 1e-3,
            gamma: 1.5,
            d: 1,
            alphas: vec![1.0, 25.0, 100.0, 400.0],
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("ltsharp-out"),
            formats: vec![Format::Csv, Format::Text],
        }
    }
}

/// Uniform fields `V = v`, `B = b` on the cube `[0, side]^3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PauliConfig {
    pub v: f64,
    pub b: f64,
    pub side: f64,
    pub nodes: usize,
}

impl Default for PauliConfig {
    fn default() -> Self {
        Self {
            v: -1.0,
            b: 1.0,
            side: 1.0,
            nodes: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<CommandKind>,
    pub corpus: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential: Option<PotentialSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential_2d: Option<Potential2dSpec>,
    /// Dirichlet box for 2D commands; the padded support box when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub box_2d: Option<Box2d>,
    pub numerics: Numerics,
    pub output: OutputConfig,
    pub pauli: PauliConfig,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| format!("malformed config: {e}"))
    }

    pub fn to_toml(&self) -> Result<String, String> {
        toml::to_string(self).map_err(|e| format!("cannot serialize config: {e}"))
    }

    /// Potential with the seed override applied.
    pub fn potential_1d(&self) -> Option<PotentialSpec> {
        let spec = self.potential.clone()?;
        Some(match self.numerics.seed {
            Some(seed) => with_seed(spec, seed),
            None => spec,
        })
    }

    pub fn box_for(&self, v: &Potential2dSpec) -> Box2d {
        self.box_2d.unwrap_or_else(|| v.support_box().padded(1.5))
    }
}

fn with_seed(spec: PotentialSpec, new_seed: u64) -> PotentialSpec {
    match spec {
        PotentialSpec::RandomHermitian {
            n,
            amplitude,
            envelope,
            ..
        } => PotentialSpec::RandomHermitian {
            n,
            seed: new_seed,
            amplitude,
            envelope,
        },
        PotentialSpec::Scaled { factor, inner } => PotentialSpec::Scaled {
            factor,
            inner: Box::new(with_seed(*inner, new_seed)),
        },
        PotentialSpec::NegativePart { inner } => PotentialSpec::NegativePart {
            inner: Box::new(with_seed(*inner, new_seed)),
        },
        PotentialSpec::ScalarTimesIdentity { scalar, n } => PotentialSpec::ScalarTimesIdentity {
            scalar: Box::new(with_seed(*scalar, new_seed)),
            n,
        },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ltsharp::Envelope;

    #[test]
    fn defaults_round_trip() {
        let cfg = RunConfig::default();
        let text = cfg.to_toml().unwrap();
        assert_eq!(RunConfig::from_toml(&text).unwrap(), cfg);
    }

    #[test]
    fn full_config_round_trips() {
        let cfg = RunConfig {
            command: Some(CommandKind::PauliRhs),
            potential: Some(PotentialSpec::random_hermitian(2, 3, 1.5, Envelope::default()).scaled(0.5)),
            potential_2d: Some(Potential2dSpec::gaussian(2.0, 0.3, 1.0)),
            box_2d: Some(Box2d::square(2.0)),
            numerics: Numerics {
                pad: Some(3.25),
                seed: Some(9),
                quadrature_tol: 1.234e-7,
                ..Numerics::default()
            },
            ..RunConfig::default()
        };
        let text = cfg.to_toml().unwrap();
        assert_eq!(RunConfig::from_toml(&text).unwrap(), cfg);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_toml("comand = \"eig\"").is_err());
        assert!(RunConfig::from_toml("[numerics]\ngama = 2.0").is_err());
    }

    #[test]
    fn seed_override_reaches_nested_specs() {
        let cfg = RunConfig {
            potential: Some(PotentialSpec::random_hermitian(2, 3, 1.0, Envelope::default()).scaled(2.0)),
            numerics: Numerics {
                seed: Some(42),
                ..Numerics::default()
            },
            ..RunConfig::default()
        };
        let PotentialSpec::Scaled { inner, .. } = cfg.potential_1d().unwrap() else {
            panic!("shape changed");
        };
        assert!(matches!(*inner, PotentialSpec::RandomHermitian { seed: 42, .. }));
    }
}
