//! JSON model specification files.
//!
//! ```json
//! {
//!   "model": {"finite": {"P": [[0.5, 0.5], [0.2, 0.8]], "C": [0, 1],
//!                        "epsilon": "auto", "nu": "auto", "V": [1, 1]}},
//!   "seed": 42,
//!   "output": {"samples": "out.csv", "report": "report.json"}
//! }
//! ```
//!
//! Other model kinds are `{"map": {"k": 2, "builtin": "figure1"}}` (or
//! explicit `"tables"`) and
//! `{"ar1": {"rho": 0.5, "sigma": 1, "C": [-2, 2], "V": "quadratic"}}`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ar1::{Ar1Chain, Ar1Constants, Ar1Minorization};
use crate::bounds::{fit_drift_finite, DriftSpec};
use crate::fixtures;
use crate::perfect::{RandomMapModel, ThresholdMap};
use crate::split::{auto_minorization_finite, FiniteChain, FiniteMinorization};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Keyword {
    #[serde(rename = "auto")]
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VKind {
    #[serde(rename = "quadratic")]
    Quadratic,
}

/// A value or the keyword `"auto"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AutoOr<T> {
    Auto(Keyword),
    Value(T),
}

impl<T> AutoOr<T> {
    fn value(&self) -> Option<&T> {
        match self {
            AutoOr::Auto(_) => None,
            AutoOr::Value(v) => Some(v),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteSpec {
    #[serde(rename = "P")]
    pub p: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    pub c: Vec<usize>,
    pub epsilon: AutoOr<f64>,
    pub nu: AutoOr<Vec<f64>>,
    #[serde(rename = "V", default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tables: Option<Vec<Vec<(f64, usize)>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(rename = "V", default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ar1Spec {
    pub rho: f64,
    pub sigma: f64,
    #[serde(rename = "C")]
    pub c: (f64, f64),
    #[serde(rename = "V")]
    pub v: VKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelSpec {
    Finite(FiniteSpec),
    Map(MapSpec),
    Ar1(Ar1Spec),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpecFile {
    pub model: ModelSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ModelSpecFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn build(&self) -> Result<Model> {
        self.model.build()
    }
}

/// A finite chain together with its minorization and optional drift `V`.
#[derive(Clone, Debug)]
pub struct FiniteModel {
    pub chain: FiniteChain,
    pub minor: FiniteMinorization,
    pub v: Option<Vec<f64>>,
}

impl FiniteModel {
    pub fn drift(&self) -> Result<DriftSpec> {
        let v = self
            .v
            .as_ref()
            .ok_or_else(|| Error::Precondition("finite model needs a drift vector \"V\"".into()))?;
        fit_drift_finite(
            self.chain.rows(),
            &self.minor.small_set_indices(),
            v,
            Some(self.minor.nu()),
        )
    }
}

#[derive(Clone, Debug)]
pub struct Ar1Model {
    pub chain: Ar1Chain,
    pub minor: Ar1Minorization,
    pub constants: Ar1Constants,
}

/// A built model ready for sampling.
#[derive(Clone, Debug)]
pub enum Model {
    Finite(FiniteModel),
    /// A random-map model; `finite` is its transition chain with `C = X`.
    Map { map: RandomMapModel, finite: FiniteModel },
    Ar1(Ar1Model),
}

/// `ε = min_{x ∈ C, ν(y) > 0} P(x, y) / ν(y)`, the largest `ε` for a given `ν`.
fn epsilon_for_nu(rows: &[Vec<f64>], c: &[usize], nu: &[f64]) -> f64 {
    c.iter()
        .flat_map(|&x| {
            nu.iter()
                .enumerate()
                .filter(|(_, &w)| w > 0.0)
                .map(move |(y, &w)| rows[x][y] / w)
        })
        .fold(f64::INFINITY, f64::min)
        .min(1.0)
}

impl ModelSpec {
    pub fn build(&self) -> Result<Model> {
        match self {
            ModelSpec::Finite(f) => {
                let chain = FiniteChain::new(f.p.clone())?;
                let n = chain.n_states();
                if let Some(&bad) = f.c.iter().find(|&&x| x >= n) {
                    return Err(Error::UnknownLabel(bad));
                }
                let minor = match (f.epsilon.value(), f.nu.value()) {
                    (None, None) => auto_minorization_finite(chain.rows(), &f.c)?,
                    (Some(&eps), None) => auto_minorization_finite(chain.rows(), &f.c)?.with_epsilon(eps)?,
                    (eps, Some(nu)) => {
                        if nu.len() != n {
                            return Err(Error::DimensionMismatch(nu.len(), n));
                        }
                        let eps = eps.copied().unwrap_or_else(|| epsilon_for_nu(chain.rows(), &f.c, nu));
                        let mut mask = vec![false; n];
                        for &x in &f.c {
                            mask[x] = true;
                        }
                        FiniteMinorization::new(mask, eps, nu.clone())?
                    }
                };
                Ok(Model::Finite(FiniteModel {
                    chain,
                    minor,
                    v: f.v.clone(),
                }))
            }
            ModelSpec::Map(m) => {
                let map = match (&m.builtin, &m.tables) {
                    (Some(name), None) if name == "figure1" => fixtures::figure1_map(),
                    (Some(name), None) => {
                        return Err(Error::Spec(format!("unknown builtin map {name:?}")));
                    }
                    (None, Some(tables)) => ThresholdMap::new(tables.clone())?,
                    (Some(_), Some(_)) => return Err(Error::Spec("give either \"builtin\" or \"tables\"".into())),
                    (None, None) => return Err(Error::Spec("map model needs \"builtin\" or \"tables\"".into())),
                };
                let chain = map.transition_chain();
                let all: Vec<usize> = (0..chain.n_states()).collect();
                let minor = auto_minorization_finite(chain.rows(), &all)?;
                Ok(Model::Map {
                    map: RandomMapModel::new(map, m.k)?,
                    finite: FiniteModel {
                        chain,
                        minor,
                        v: m.v.clone(),
                    },
                })
            }
            ModelSpec::Ar1(a) => {
                let chain = Ar1Chain::new(a.rho, a.sigma)?;
                let minor = Ar1Minorization::new(&chain, a.c.0, a.c.1)?;
                let constants = Ar1Constants::compute(&chain, &minor)?;
                Ok(Model::Ar1(Ar1Model { chain, minor, constants }))
            }
        }
    }
}
