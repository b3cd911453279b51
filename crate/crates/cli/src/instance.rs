//! Instance file schema and its resolution into validated core objects.

use std::collections::BTreeMap;

use jensen_refine::apps::{FiniteMeasureSpace, FunctionVector};
use jensen_refine::measures::{embed_doubly_stochastic, rank_one_weight, validate_weight};
use jensen_refine::refine::{HadamardWeights, DEFAULT_GRID};
use jensen_refine::{
    Direction, DoublyStochasticMatrix, FunctionSpec, Grid, JensenInstance, Objective, PointSet,
    ProbabilityVector, WeightFunction,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Application {
    #[default]
    Jensen,
    Agm,
    Kyfan,
    Lp,
    Powersum,
    Matrixpower,
    Harmonic,
}

impl Application {
    pub fn name(self) -> &'static str {
        match self {
            Application::Jensen => "jensen",
            Application::Agm => "agm",
            Application::Kyfan => "kyfan",
            Application::Lp => "lp",
            Application::Powersum => "powersum",
            Application::Matrixpower => "matrixpower",
            Application::Harmonic => "harmonic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Points {
    Scalars(Vec<f64>),
    Tuples(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionField {
    pub name: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
    /// Overrides the catalog direction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Direction>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSpec {
    Ones,
    RankOne { u: Vec<f64>, v: Vec<f64> },
    Matrix { values: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsField {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega1: Option<WeightSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega2: Option<WeightSpec>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<Vec<f64>>>,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceField {
    pub masses: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HadamardField {
    pub p: Vec<f64>,
    pub t: Vec<f64>,
}

/// On-disk description of one verification request.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub application: Option<Application>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Points>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<FunctionField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightsField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hadamard: Option<HadamardField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::input(format!("parse error: {e}")))
    }

    pub fn application(&self) -> Application {
        self.application.unwrap_or_default()
    }

    pub fn t_grid(&self) -> Vec<f64> {
        self.t_grid.clone().unwrap_or_else(|| DEFAULT_GRID.to_vec())
    }

    fn missing(&self, name: &str) -> CliError {
        CliError::input(format!(
            "{name}: missing (required for application {})",
            self.application().name()
        ))
    }

    pub fn scalar_points(&self) -> Result<Vec<f64>, CliError> {
        match self.points.as_ref().ok_or_else(|| self.missing("points"))? {
            Points::Scalars(x) => Ok(x.clone()),
            Points::Tuples(_) => Err(CliError::input(format!(
                "points: application {} takes a list of numbers",
                self.application().name()
            ))),
        }
    }

    /// Rows of sampled functions; a list of numbers reads as constants on a
    /// one-point space.
    pub fn function_vector(&self) -> Result<FunctionVector, CliError> {
        let rows = match self.points.as_ref().ok_or_else(|| self.missing("points"))? {
            Points::Scalars(x) => x.iter().map(|v| vec![*v]).collect(),
            Points::Tuples(rows) => rows.clone(),
        };
        if rows.is_empty() {
            return Err(CliError::input("points: need at least one function"));
        }
        FunctionVector::from_rows(&rows).map_err(CliError::context("points"))
    }

    pub fn space(&self, len: usize) -> Result<FiniteMeasureSpace, CliError> {
        match &self.space {
            Some(s) => FiniteMeasureSpace::new(s.masses.clone()).map_err(CliError::from),
            None => Ok(FiniteMeasureSpace::counting(len)),
        }
    }

    pub fn exponent(&self) -> Result<f64, CliError> {
        self.p.ok_or_else(|| self.missing("p"))
    }

    pub fn function(&self) -> Result<FunctionSpec, CliError> {
        let f = self
            .function
            .as_ref()
            .ok_or_else(|| self.missing("function"))?;
        let spec =
            FunctionSpec::from_name(&f.name, &f.params).map_err(CliError::context("function"))?;
        Ok(match f.direction {
            Some(d) => spec.with_direction(d),
            None => spec,
        })
    }

    pub fn hadamard(&self) -> Result<Option<HadamardWeights>, CliError> {
        self.hadamard
            .as_ref()
            .map(|h| {
                HadamardWeights::new(h.p.clone(), h.t.clone())
                    .map_err(CliError::context("hadamard"))
            })
            .transpose()
    }

    fn weights_field(&self) -> Result<&WeightsField, CliError> {
        self.weights.as_ref().ok_or_else(|| self.missing("weights"))
    }

    /// The doubly stochastic pair of a `{B, C}` weights block.
    pub fn matrices(&self) -> Result<(DoublyStochasticMatrix, DoublyStochasticMatrix), CliError> {
        let w = self.weights_field()?;
        let (Some(b), Some(c)) = (&w.b, &w.c) else {
            return Err(CliError::input("weights: expected matrices B and C"));
        };
        let b = ds_matrix(b).map_err(CliError::context("weights.B"))?;
        let c = ds_matrix(c).map_err(CliError::context("weights.C"))?;
        Ok((b, c))
    }

    /// `(w1, w2)` from either `{omega1, omega2}` over `(mu, lambda)` or the
    /// uniform-measure embedding of `{B, C}`.
    pub fn weight_pair(&self) -> Result<(WeightFunction, WeightFunction), CliError> {
        let w = self.weights_field()?;
        let matrices = w.b.is_some() || w.c.is_some();
        let omegas = w.omega1.is_some() || w.omega2.is_some();
        if matrices && omegas {
            return Err(CliError::input(
                "weights: give either omega1/omega2 or B/C, not both",
            ));
        }
        if matrices {
            let (b, c) = self.matrices()?;
            if b.order() != c.order() {
                return Err(CliError::input(format!(
                    "weights: B has order {} but C has order {}",
                    b.order(),
                    c.order()
                )));
            }
            let uniform = ProbabilityVector::uniform(b.order());
            for (name, given) in [("lambda", &self.lambda), ("mu", &self.mu)] {
                if let Some(v) = given {
                    let pv = ProbabilityVector::named(name, v.clone())?;
                    if pv.len() != uniform.len()
                        || pv.weights().iter().any(|x| (x - uniform[0]).abs() > 1e-12)
                    {
                        return Err(CliError::input(format!(
                            "{name}: B/C weights require the uniform vector of length {}",
                            uniform.len()
                        )));
                    }
                }
            }
            return Ok((embed_doubly_stochastic(&b), embed_doubly_stochastic(&c)));
        }
        let (Some(s1), Some(s2)) = (&w.omega1, &w.omega2) else {
            return Err(CliError::input("weights: expected omega1 and omega2"));
        };
        let lambda = ProbabilityVector::named(
            "lambda",
            self.lambda.clone().ok_or_else(|| self.missing("lambda"))?,
        )?;
        let mu =
            ProbabilityVector::named("mu", self.mu.clone().ok_or_else(|| self.missing("mu"))?)?;
        let w1 = build_weight(s1, &mu, &lambda).map_err(CliError::context("weights.omega1"))?;
        let w2 = build_weight(s2, &mu, &lambda).map_err(CliError::context("weights.omega2"))?;
        Ok((w1, w2))
    }

    /// Validated instance for the generic chains.
    pub fn jensen_instance(&self) -> Result<JensenInstance, CliError> {
        let f = self.function()?;
        let (w1, w2) = self.weight_pair()?;
        let (points, objective) =
            match self.points.as_ref().ok_or_else(|| self.missing("points"))? {
                Points::Scalars(x) => (PointSet::scalars(x.clone())?, Objective::Scalar(f)),
                Points::Tuples(rows) => {
                    let masses = match &self.space {
                    Some(s) => s.masses.clone(),
                    None => return Err(CliError::input(
                        "space: tuple points need space.masses to define the separable objective",
                    )),
                };
                    (PointSet::tuples(rows)?, Objective::separable(f, masses)?)
                }
            };
        Ok(JensenInstance::new(points, objective, w1, w2)?)
    }
}

fn ds_matrix(rows: &[Vec<f64>]) -> jensen_refine::Result<DoublyStochasticMatrix> {
    DoublyStochasticMatrix::new(Grid::from_rows(rows)?)
}

pub fn build_weight(
    spec: &WeightSpec,
    mu: &ProbabilityVector,
    lambda: &ProbabilityVector,
) -> jensen_refine::Result<WeightFunction> {
    match spec {
        WeightSpec::Ones => Ok(WeightFunction::ones(mu, lambda)),
        WeightSpec::RankOne { u, v } => rank_one_weight(u, v, mu, lambda),
        WeightSpec::Matrix { values } => validate_weight(Grid::from_rows(values)?, mu, lambda),
    }
}
