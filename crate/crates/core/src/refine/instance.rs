use serde::Serialize;

use crate::error::{Error, Result};
use crate::means::{Direction, FunctionSpec};
use crate::measures::{ProbabilityVector, WeightFunction};

/// `n` points of common dimension `d >= 1`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointSet {
    dim: usize,
    data: Vec<f64>,
}

impl PointSet {
    pub fn scalars(x: Vec<f64>) -> Result<Self> {
        Self::check(&x)?;
        if x.is_empty() {
            return Err(Error::input("points", "need at least one point"));
        }
        Ok(Self { dim: 1, data: x })
    }

    pub fn tuples(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if dim == 0 {
            return Err(Error::input(
                "points",
                "need at least one point of dimension >= 1",
            ));
        }
        if let Some((j, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != dim) {
            return Err(Error::Dimension(format!(
                "point {j} has dimension {}, expected {dim}",
                r.len()
            )));
        }
        let data = rows.concat();
        Self::check(&data)?;
        Ok(Self { dim, data })
    }

    fn check(values: &[f64]) -> Result<()> {
        if let Some(x) = values.iter().find(|x| !x.is_finite()) {
            return Err(Error::input("points", format!("non-finite coordinate {x}")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, j: usize) -> &[f64] {
        &self.data[j * self.dim..(j + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.dim)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> PointSet {
        PointSet {
            dim: self.dim,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }
}

/// The function whose Jensen gap is refined.
#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    /// A catalog function of one real variable.
    Scalar(FunctionSpec),
    /// `x -> sum_k masses[k] * base(x_k)` on tuples of dimension `masses.len()`.
    /// Convex (concave) whenever `base` is and the masses are nonnegative.
    Separable {
        base: FunctionSpec,
        masses: Vec<f64>,
    },
}

impl Objective {
    pub fn separable(base: FunctionSpec, masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::input("space.masses", "need at least one point mass"));
        }
        if let Some(&m) = masses.iter().find(|m| !(m.is_finite() && **m >= 0.0)) {
            return Err(Error::input(
                "space.masses",
                format!("masses must be nonnegative, got {m}"),
            ));
        }
        Ok(Objective::Separable { base, masses })
    }

    pub fn direction(&self) -> Direction {
        match self {
            Objective::Scalar(f) | Objective::Separable { base: f, .. } => f.direction(),
        }
    }

    pub fn base(&self) -> &FunctionSpec {
        match self {
            Objective::Scalar(f) | Objective::Separable { base: f, .. } => f,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Objective::Scalar(_) => 1,
            Objective::Separable { masses, .. } => masses.len(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "objective takes dimension {}, got {}",
                self.dim(),
                x.len()
            )));
        }
        match self {
            Objective::Scalar(f) => f.eval(x[0]),
            Objective::Separable { base, masses } => {
                let mut acc = 0.0;
                for (m, &xk) in masses.iter().zip(x) {
                    acc += m * base.eval(xk)?;
                }
                Ok(acc)
            }
        }
    }
}

/// Points, objective and two weight functions over shared `(mu, lambda)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JensenInstance {
    points: PointSet,
    objective: Objective,
    w1: WeightFunction,
    w2: WeightFunction,
}

impl JensenInstance {
    pub fn new(
        points: PointSet,
        objective: Objective,
        w1: WeightFunction,
        w2: WeightFunction,
    ) -> Result<Self> {
        if !w1.shares_measures(&w2) {
            return Err(Error::Dimension(
                "w1 and w2 are defined over different measures".into(),
            ));
        }
        if points.len() != w1.n() {
            return Err(Error::Dimension(format!(
                "{} points but lambda has {} entries",
                points.len(),
                w1.n()
            )));
        }
        if points.dim() != objective.dim() {
            return Err(Error::Dimension(format!(
                "points have dimension {}, objective expects {}",
                points.dim(),
                objective.dim()
            )));
        }
        for (j, x) in points.iter().enumerate() {
            objective.eval(x).map_err(|e| match e {
                Error::Domain {
                    function,
                    value,
                    domain,
                    ..
                } => Error::input(
                    format!("points[{j}]"),
                    format!("{value} outside domain {domain} of {function}"),
                ),
                other => other,
            })?;
        }
        Ok(Self {
            points,
            objective,
            w1,
            w2,
        })
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn objective(&self) -> &Objective {
        &self.objective
    }

    pub fn direction(&self) -> Direction {
        self.objective.direction()
    }

    pub fn w1(&self) -> &WeightFunction {
        &self.w1
    }

    pub fn w2(&self) -> &WeightFunction {
        &self.w2
    }

    pub fn mu(&self) -> &ProbabilityVector {
        self.w1.mu()
    }

    pub fn lambda(&self) -> &ProbabilityVector {
        self.w1.lambda()
    }

    pub fn m(&self) -> usize {
        self.w1.m()
    }

    pub fn n(&self) -> usize {
        self.w1.n()
    }

    /// The same instance with `w1` and `w2` exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            points: self.points.clone(),
            objective: self.objective.clone(),
            w1: self.w2.clone(),
            w2: self.w1.clone(),
        }
    }

    fn combine(&self, coeff: impl Fn(usize) -> f64) -> Vec<f64> {
        let lambda = self.lambda();
        let mut y = vec![0.0; self.points.dim()];
        for (j, x) in self.points.iter().enumerate() {
            let c = coeff(j) * lambda[j];
            for (yk, xk) in y.iter_mut().zip(x) {
                *yk += c * xk;
            }
        }
        y
    }

    /// `sum_i mu_i f(sum_j coeff(i, j) lambda_j x_j)`.
    pub(crate) fn weighted_value(&self, coeff: impl Fn(usize, usize) -> f64) -> Result<f64> {
        let mu = self.mu();
        let mut total = 0.0;
        for i in 0..self.m() {
            let y = self.combine(|j| coeff(i, j));
            total += mu[i] * self.objective.eval(&y).map_err(|e| e.at_row(i))?;
        }
        Ok(total)
    }

    /// Inner points of row `i` at `t = 0` and `t = 1`.
    pub fn inner_endpoints(&self, i: usize) -> (Vec<f64>, Vec<f64>) {
        (
            self.combine(|j| self.w1.get(i, j)),
            self.combine(|j| self.w2.get(i, j)),
        )
    }

    /// `sum_j lambda_j x_j`.
    pub fn barycenter(&self) -> Vec<f64> {
        self.combine(|_| 1.0)
    }

    /// `(f(sum lambda_j x_j), sum lambda_j f(x_j))` in Jensen order.
    pub fn jensen_sides(&self) -> Result<(f64, f64)> {
        let at_mean = self.objective.eval(&self.barycenter())?;
        let mut mean_of = 0.0;
        for (j, x) in self.points.iter().enumerate() {
            mean_of += self.lambda()[j] * self.objective.eval(x)?;
        }
        Ok((at_mean, mean_of))
    }

    /// `(lower, upper)` ordered by the declared direction.
    pub fn jensen_bounds(&self) -> Result<(f64, f64)> {
        let (at_mean, mean_of) = self.jensen_sides()?;
        Ok(match self.direction() {
            Direction::Convex => (at_mean, mean_of),
            Direction::Concave => (mean_of, at_mean),
        })
    }
}
