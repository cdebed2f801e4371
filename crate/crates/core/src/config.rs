//! Scenario and run-plan configuration files (TOML or JSON).
//!
//! ```toml
//! [plan]
//! bounds = ["direct", "bld", "bnh"]
//! lambdas = [-1.0, 0.0, 1.0]
//!
//! [[scenario]]
//! catalog = "qubit_xy"            # start from a built-in scenario
//!
//! [[scenario]]
//! name = "custom"
//! model = "coin"                  # a built-in model, or a table:
//! # model = { table = [{ theta = [0.0], state = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]] }] }
//! prior = { nodes = [{ theta = [-1.0], weight = 0.5 }, { theta = [1.0], weight = 0.5 }] }
//! # prior = { density = { kind = "uniform" }, box = [[-1.0, 1.0]], rule = "gauss_legendre", points = 9 }
//! weight = { constant = [[1.0]] }
//! # weight = { varying = [{ theta = [-1.0], matrix = [[1.0]] }, ...] }
//! ```

use std::path::Path;

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::catalog::{self, Scenario};
use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix, DensityMatrix, RealMatrix};
use crate::model::{ModelSpec, PriorDensity, PriorNode, PriorNodeSet, QuadraturePrior, WeightSpec};
use crate::quadrature::QuadratureRule;
use crate::report::SweepAxis;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub plan: PlanConfig,
    #[serde(default, rename = "scenario")]
    pub scenarios: Vec<ScenarioConfig>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanConfig {
    pub bounds: Option<Vec<String>>,
    pub lambdas: Option<Vec<f64>>,
    pub lambda_grid: Option<usize>,
    pub tol: Option<f64>,
    pub depolarize: Option<f64>,
    pub sweep: Option<SweepAxis>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: Option<String>,
    pub description: Option<String>,
    /// Built-in scenario used as the starting point.
    pub catalog: Option<String>,
    pub model: Option<ModelConfig>,
    pub prior: Option<PriorConfig>,
    pub weight: Option<WeightConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ModelConfig {
    Named(String),
    Table { table: Vec<StateEntry> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateEntry {
    pub theta: Vec<f64>,
    /// Rows of `[re, im]` pairs.
    pub state: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PriorConfig {
    Nodes {
        nodes: Vec<PriorNode>,
    },
    Quadrature {
        density: PriorDensity,
        #[serde(rename = "box")]
        bounds: Vec<[f64; 2]>,
        rule: QuadratureRule,
        points: usize,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum WeightConfig {
    Constant { constant: Vec<Vec<f64>> },
    Varying { varying: Vec<WeightEntry> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightEntry {
    pub theta: Vec<f64>,
    pub matrix: Vec<Vec<f64>>,
}

/// A parsed config together with the SHA-256 of its bytes.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub file: ConfigFile,
    pub hash: String,
}

pub fn config_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Parses TOML, or JSON when the text starts with `{`.
pub fn parse_config(text: &str) -> Result<LoadedConfig> {
    let file: ConfigFile = if text.trim_start().starts_with('{') {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?
    } else {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?
    };
    Ok(LoadedConfig { file, hash: config_hash(text.as_bytes()) })
}

pub fn load_config(path: &Path) -> Result<LoadedConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

fn real_matrix(rows: &[Vec<f64>]) -> Result<RealMatrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Config("matrix must be square and non-empty".into()));
    }
    Ok(RealMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn complex_matrix(rows: &[Vec<[f64; 2]>]) -> Result<ComplexMatrix> {
    let d = rows.len();
    if d == 0 || rows.iter().any(|r| r.len() != d) {
        return Err(Error::Config("state must be a square, non-empty array of [re, im] pairs".into()));
    }
    Ok(ComplexMatrix::from_fn(d, d, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

impl ModelConfig {
    pub fn build(&self, name: &str) -> Result<ModelSpec> {
        match self {
            ModelConfig::Named(m) => {
                catalog::model_by_name(m).ok_or_else(|| Error::Config(format!("unknown model '{m}'")))
            }
            ModelConfig::Table { table } => {
                let entries = table
                    .iter()
                    .map(|e| Ok((e.theta.clone(), DensityMatrix::new(complex_matrix(&e.state)?)?)))
                    .collect::<Result<Vec<_>>>()?;
                ModelSpec::from_table(name, entries)
            }
        }
    }
}

impl PriorConfig {
    pub fn build(&self) -> Result<(PriorNodeSet, Option<QuadraturePrior>)> {
        match self {
            PriorConfig::Nodes { nodes } => Ok((PriorNodeSet::new(nodes.clone())?, None)),
            PriorConfig::Quadrature { density, bounds, rule, points } => {
                let q = QuadraturePrior { density: density.clone(), bounds: bounds.clone(), rule: *rule, points: *points };
                Ok((q.discretize()?, Some(q)))
            }
        }
    }
}

impl WeightConfig {
    pub fn build(&self) -> Result<WeightSpec> {
        match self {
            WeightConfig::Constant { constant } => WeightSpec::constant(real_matrix(constant)?),
            WeightConfig::Varying { varying } => WeightSpec::from_table(
                varying
                    .iter()
                    .map(|e| Ok((e.theta.clone(), real_matrix(&e.matrix)?)))
                    .collect::<Result<Vec<_>>>()?,
            ),
        }
    }
}

impl ScenarioConfig {
    pub fn build(&self) -> Result<Scenario> {
        let base = match &self.catalog {
            Some(name) => {
                Some(catalog::scenario(name).ok_or_else(|| Error::Config(format!("unknown scenario '{name}'")))?)
            }
            None => None,
        };
        let name = self
            .name
            .clone()
            .or_else(|| base.as_ref().map(|b| b.name.clone()))
            .ok_or_else(|| Error::Config("scenario needs a name or a catalog entry".into()))?;
        let model = match (&self.model, &base) {
            (Some(m), _) => m.build(&name)?,
            (None, Some(b)) => b.model.clone(),
            (None, None) => return Err(Error::Config(format!("scenario '{name}' has no model"))),
        };
        let (prior, quadrature) = match (&self.prior, &base) {
            (Some(p), _) => p.build()?,
            (None, Some(b)) => (b.prior.clone(), b.quadrature.clone()),
            (None, None) => return Err(Error::Config(format!("scenario '{name}' has no prior"))),
        };
        let weight = match (&self.weight, &base) {
            (Some(w), _) => w.build()?,
            (None, Some(b)) => b.weight.clone(),
            (None, None) => WeightSpec::identity(model.n_params()),
        };
        if prior.n_params() != model.n_params() {
            return Err(Error::Config(format!(
                "scenario '{name}': prior has {} parameters, model has {}",
                prior.n_params(),
                model.n_params()
            )));
        }
        let description = self
            .description
            .clone()
            .or_else(|| base.as_ref().map(|b| b.description.clone()))
            .unwrap_or_default();
        Ok(Scenario { name, description, model, prior, weight, quadrature })
    }
}

impl ConfigFile {
    pub fn build_scenarios(&self) -> Result<Vec<Scenario>> {
        self.scenarios.iter().map(ScenarioConfig::build).collect()
    }
}
