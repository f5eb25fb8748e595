//! Declarative run configuration (TOML). The schema is documented in
//! docs/formats.md; builders turn a parsed config into domain, grid,
//! weight, and problem objects.

use serde::Deserialize;

use crate::forge::{build_distance_weight, DistanceWeightSpec};
use crate::grid::{derive_params, Domain, FaceMask, Grid, GridFunction, ParamChain, Shape, WeightField};
use crate::pde::{ParabolicProblem, StructureFields};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("unknown shape `{0}` (expected unit-square, unit-ball, l-shape)")]
    UnknownShape(String),
    #[error("unknown face `{0}` (expected left, right, bottom, top, all)")]
    UnknownFace(String),
    #[error("unknown weight kind `{0}` (expected identity, distance)")]
    UnknownWeight(String),
    #[error("unknown source `{0}` (expected constant, sine)")]
    UnknownSource(String),
    #[error("invalid value: {0}")]
    Invalid(String),
}

fn default_seed() -> u64 {
    0x5eed
}

fn default_bbar() -> f64 {
    1.0
}

fn default_fraction() -> f64 {
    0.5
}

#[derive(Debug, Clone, Deserialize)]
pub struct RunConfig {
    pub domain: DomainSection,
    pub grid: GridSection,
    pub chain: ChainSection,
    #[serde(default)]
    pub weight: WeightSection,
    #[serde(default)]
    pub problem: ProblemSection,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct DomainSection {
    pub shape: String,
    /// face names, or the single entry "all"
    pub a_faces: Vec<String>,
    pub t_final: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct GridSection {
    pub n: usize,
    pub nt: usize,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ChainSection {
    pub dimension: u32,
    pub tbar: f64,
    #[serde(default = "default_fraction")]
    pub rbar_fraction: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct WeightSection {
    pub kind: String,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default = "default_bbar")]
    pub bbar: f64,
}

impl Default for WeightSection {
    fn default() -> Self {
        WeightSection {
            kind: "identity".to_string(),
            gamma: 0.0,
            bbar: 1.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct ProblemSection {
    pub source: String,
    #[serde(default = "default_bbar")]
    pub amplitude: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

fn default_alpha() -> f64 {
    9.0
}

impl Default for ProblemSection {
    fn default() -> Self {
        ProblemSection {
            source: "constant".to_string(),
            amplitude: 1.0,
            alpha: 9.0,
        }
    }
}

impl RunConfig {
    pub fn from_str(src: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(src)?)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self, ConfigError> {
        Self::from_str(&std::fs::read_to_string(path)?)
    }

    pub fn build_domain(&self) -> Result<Domain, ConfigError> {
        let shape = match self.domain.shape.as_str() {
            "unit-square" => Shape::UnitSquare,
            "unit-ball" => Shape::UnitBall,
            "l-shape" => Shape::LShape,
            other => return Err(ConfigError::UnknownShape(other.to_string())),
        };
        let mut mask = FaceMask {
            left: false,
            right: false,
            bottom: false,
            top: false,
        };
        for face in &self.domain.a_faces {
            match face.as_str() {
                "all" => mask = FaceMask::all(),
                "left" => mask.left = true,
                "right" => mask.right = true,
                "bottom" => mask.bottom = true,
                "top" => mask.top = true,
                other => return Err(ConfigError::UnknownFace(other.to_string())),
            }
        }
        Domain::new(shape, mask, self.domain.t_final)
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn build_grid(&self) -> Result<Grid, ConfigError> {
        Ok(Grid::new(self.build_domain()?, self.grid.n, self.grid.nt))
    }

    pub fn build_chain(&self) -> Result<ParamChain, ConfigError> {
        derive_params(self.chain.dimension, self.chain.tbar, self.chain.rbar_fraction)
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn build_weights(&self, grid: &Grid) -> Result<WeightField, ConfigError> {
        match self.weight.kind.as_str() {
            "identity" => Ok(WeightField::identity(grid)),
            "distance" => {
                let spec = DistanceWeightSpec::new(self.weight.gamma, self.weight.bbar)
                    .map_err(|e| ConfigError::Invalid(e.to_string()))?;
                Ok(build_distance_weight(&spec, grid))
            }
            other => Err(ConfigError::UnknownWeight(other.to_string())),
        }
    }

    pub fn build_problem(&self) -> Result<ParabolicProblem, ConfigError> {
        let grid = self.build_grid()?;
        let weights = self.build_weights(&grid)?;
        let amp = self.problem.amplitude;
        let f = match self.problem.source.as_str() {
            "constant" => GridFunction::from_fn(&grid, |_, _, _| amp),
            "sine" => {
                let pi = std::f64::consts::PI;
                GridFunction::from_fn(&grid, move |x, y, _| {
                    amp * (pi * x).sin() * (pi * y).sin()
                })
            }
            other => return Err(ConfigError::UnknownSource(other.to_string())),
        };
        ParabolicProblem::new(grid, weights, f, StructureFields::for_bounded_source(amp.abs()))
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
seed = 42

[domain]
shape = "unit-square"
a_faces = ["all"]
t_final = 1.0

[grid]
n = 16
nt = 8

[chain]
dimension = 2
tbar = 1.6
rbar_fraction = 0.5

[weight]
kind = "distance"
gamma = 0.2
bbar = 1.0

[problem]
source = "constant"
amplitude = 1.0
alpha = 9.0
"#;

    #[test]
    fn parses_and_builds() {
        let cfg = RunConfig::from_str(SAMPLE).unwrap();
        assert_eq!(cfg.seed, 42);
        let chain = cfg.build_chain().unwrap();
        assert!((chain.r - 7.0).abs() < 1e-12);
        let p = cfg.build_problem().unwrap();
        assert_eq!(p.grid.n, 16);
        assert!(p.weights.b.iter().any(|&b| b < 1.0));
    }

    #[test]
    fn defaults_fill_in() {
        let minimal = r#"
[domain]
shape = "unit-ball"
a_faces = ["all"]
t_final = 0.5

[grid]
n = 8
nt = 4

[chain]
dimension = 2
tbar = 1.6
"#;
        let cfg = RunConfig::from_str(minimal).unwrap();
        assert_eq!(cfg.seed, default_seed());
        assert_eq!(cfg.weight.kind, "identity");
        assert_eq!(cfg.problem.alpha, 9.0);
        cfg.build_problem().unwrap();
    }

    #[test]
    fn bad_values_error() {
        assert!(RunConfig::from_str("not toml [").is_err());
        let bad_shape = SAMPLE.replace("unit-square", "hexagon");
        assert!(matches!(
            RunConfig::from_str(&bad_shape).unwrap().build_domain(),
            Err(ConfigError::UnknownShape(_))
        ));
        let bad_face = SAMPLE.replace("\"all\"", "\"north\"");
        assert!(matches!(
            RunConfig::from_str(&bad_face).unwrap().build_domain(),
            Err(ConfigError::UnknownFace(_))
        ));
    }
}
