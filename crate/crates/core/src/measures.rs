//! Probability vectors, weight functions and doubly stochastic matrices.
//!
//! A weight function with respect to probability vectors `mu` (length `m`) and
//! `lambda` (length `n`) is an `m x n` nonnegative grid `w` with
//!
//! ```text
//! sum_i w(i, j) mu_i     = 1   for every column j
//! sum_j w(i, j) lambda_j = 1   for every row i
//! ```
//!
//! Every constructor in this module returns objects that have been run
//! through [`validate_weight`] (or the doubly stochastic validator), so
//! downstream code may rely on those identities to rounding.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Axis, Error, Result};

/// Absolute tolerance on the total mass of a probability vector.
pub const PROBABILITY_SUM_TOL: f64 = 1e-12;
/// Tolerance on weight-function and doubly stochastic marginals.
pub const MARGINAL_TOL: f64 = 1e-10;
/// Sinkhorn stopping residual.
pub const SINKHORN_TOL: f64 = 1e-12;
pub const SINKHORN_MAX_ITER: usize = 10_000;

/// Dense row-major matrix of reals.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(into = "Vec<Vec<f64>>")]
pub struct Grid {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl From<Grid> for Vec<Vec<f64>> {
    fn from(g: Grid) -> Self {
        g.to_rows()
    }
}

impl Grid {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(
                "grid must have at least one row and column".into(),
            ));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "grid {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        assert!(rows > 0 && cols > 0);
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(rows > 0 && cols > 0);
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Build from an array of rows; all rows must have the same length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(Error::Dimension(format!(
                "row {i} has {} entries, expected {cols}",
                r.len()
            )));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Grid {
        Grid {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    fn check_entries(&self) -> Result<()> {
        for i in 0..self.rows {
            for j in 0..self.cols {
                let v = self.get(i, j);
                if !v.is_finite() {
                    return Err(Error::input(
                        format!("entry ({i}, {j})"),
                        format!("not finite: {v}"),
                    ));
                }
                if v < 0.0 {
                    return Err(Error::NegativeEntry {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        Self::named("probability vector", weights)
    }

    /// Validate, naming `field` in any error.
    pub fn named(field: &str, weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::input(field, "must have at least one entry"));
        }
        if let Some((i, &w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w >= 0.0))
        {
            return Err(Error::input(
                field,
                format!("entry {i} is {w}, expected a finite nonnegative number"),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > PROBABILITY_SUM_TOL {
            return Err(Error::input(
                field,
                format!("entries sum to {total}, expected 1"),
            ));
        }
        Ok(Self(weights))
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform probability vector needs n >= 1");
        Self(vec![1.0 / n as f64; n])
    }

    /// Normalized strictly positive uniform draws.
    pub fn random(n: usize, seed: u64) -> Self {
        assert!(n > 0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<f64> = (0..n).map(|_| 1.0 - rng.random::<f64>()).collect();
        let total: f64 = raw.iter().sum();
        Self(raw.into_iter().map(|x| x / total).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn is_uniform(&self) -> bool {
        let u = 1.0 / self.len() as f64;
        self.0.iter().all(|&w| (w - u).abs() <= PROBABILITY_SUM_TOL)
    }

    fn approx_eq(&self, other: &Self) -> bool {
        self.len() == other.len()
            && self
                .0
                .iter()
                .zip(&other.0)
                .all(|(a, b)| (a - b).abs() <= PROBABILITY_SUM_TOL)
    }
}

impl std::ops::Index<usize> for ProbabilityVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Weight function on `{1..m} x {1..n}` with respect to `(mu, lambda)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightFunction {
    values: Grid,
    mu: ProbabilityVector,
    lambda: ProbabilityVector,
}

impl WeightFunction {
    /// The constant weight `w = 1`, valid for every pair of measures.
    pub fn ones(mu: &ProbabilityVector, lambda: &ProbabilityVector) -> Self {
        Self {
            values: Grid::filled(mu.len(), lambda.len(), 1.0),
            mu: mu.clone(),
            lambda: lambda.clone(),
        }
    }

    pub fn values(&self) -> &Grid {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values.get(i, j)
    }

    pub fn mu(&self) -> &ProbabilityVector {
        &self.mu
    }

    pub fn lambda(&self) -> &ProbabilityVector {
        &self.lambda
    }

    pub fn m(&self) -> usize {
        self.mu.len()
    }

    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    pub fn shares_measures(&self, other: &WeightFunction) -> bool {
        self.mu.approx_eq(&other.mu) && self.lambda.approx_eq(&other.lambda)
    }

    /// Largest `|sum - 1|` over all row and column constraints.
    pub fn max_residual(&self) -> f64 {
        marginal_residuals(&self.values, &self.mu, &self.lambda)
            .map(|(_, _, r)| r.abs())
            .fold(0.0, f64::max)
    }
}

fn marginal_residuals<'a>(
    values: &'a Grid,
    mu: &'a ProbabilityVector,
    lambda: &'a ProbabilityVector,
) -> impl Iterator<Item = (Axis, usize, f64)> + 'a {
    let cols = (0..values.cols()).map(move |j| {
        let s: f64 = (0..values.rows()).map(|i| values.get(i, j) * mu[i]).sum();
        (Axis::Column, j, s - 1.0)
    });
    let rows = (0..values.rows()).map(move |i| {
        let s: f64 = values
            .row(i)
            .iter()
            .zip(lambda.weights())
            .map(|(w, l)| w * l)
            .sum();
        (Axis::Row, i, s - 1.0)
    });
    rows.chain(cols)
}

/// Check that `values` is a weight function with respect to `(mu, lambda)`.
///
/// On failure the error names the offending entry, row or column and its
/// residual.
pub fn validate_weight(
    values: Grid,
    mu: &ProbabilityVector,
    lambda: &ProbabilityVector,
) -> Result<WeightFunction> {
    if values.rows() != mu.len() || values.cols() != lambda.len() {
        return Err(Error::Dimension(format!(
            "weight grid is {}x{}, measures need {}x{}",
            values.rows(),
            values.cols(),
            mu.len(),
            lambda.len()
        )));
    }
    values.check_entries()?;
    if let Some((axis, index, residual)) =
        marginal_residuals(&values, mu, lambda).find(|(_, _, r)| r.abs() > MARGINAL_TOL)
    {
        return Err(Error::Normalization {
            axis,
            index,
            residual,
        });
    }
    Ok(WeightFunction {
        values,
        mu: mu.clone(),
        lambda: lambda.clone(),
    })
}

fn project_and_clamp(x: &[f64], measure: &ProbabilityVector) -> Vec<f64> {
    let m = measure.weights();
    let dot: f64 = x.iter().zip(m).map(|(a, b)| a * b).sum();
    let mm: f64 = m.iter().map(|b| b * b).sum();
    let mut y: Vec<f64> = x.iter().zip(m).map(|(a, b)| a - dot / mm * b).collect();
    let norm = y.iter().map(|a| a * a).sum::<f64>().sqrt();
    if norm > 1.0 {
        y.iter_mut().for_each(|a| *a /= norm);
    }
    y
}

/// `w(i, j) = 1 + u_i v_j` with `u ⟂ mu`, `v ⟂ lambda` and both of norm at most 1.
///
/// `u` and `v` are orthogonally projected onto the complements and rescaled
/// to unit norm when longer, so any input yields a valid weight.
pub fn rank_one_weight(
    u: &[f64],
    v: &[f64],
    mu: &ProbabilityVector,
    lambda: &ProbabilityVector,
) -> Result<WeightFunction> {
    if u.len() != mu.len() || v.len() != lambda.len() {
        return Err(Error::Dimension(format!(
            "u has {} entries and v has {}, measures need {} and {}",
            u.len(),
            v.len(),
            mu.len(),
            lambda.len()
        )));
    }
    if let Some(x) = u.iter().chain(v).find(|x| !x.is_finite()) {
        return Err(Error::input(
            "rank_one",
            format!("non-finite component {x}"),
        ));
    }
    let u = project_and_clamp(u, mu);
    let v = project_and_clamp(v, lambda);
    // |u_i v_j| <= 1; the max only absorbs rounding at the boundary.
    let values = Grid::from_fn(u.len(), v.len(), |i, j| (1.0 + u[i] * v[j]).max(0.0));
    validate_weight(values, mu, lambda)
}

/// Lift a doubly stochastic matrix to the weight `n * a_ij` over uniform measures.
pub fn embed_doubly_stochastic(a: &DoublyStochasticMatrix) -> WeightFunction {
    let n = a.order();
    let uniform = ProbabilityVector::uniform(n);
    let values = a.values().map(|x| n as f64 * x);
    validate_weight(values, &uniform, &uniform)
        .expect("scaled doubly stochastic matrix is a weight")
}

/// Entrywise `(1 - t) w1 + t w2`.
pub fn interpolate_weight(
    w1: &WeightFunction,
    w2: &WeightFunction,
    t: f64,
) -> Result<WeightFunction> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::input("t", format!("must lie in [0, 1], got {t}")));
    }
    if !w1.shares_measures(w2) {
        return Err(Error::Dimension(
            "weights are defined over different measures".into(),
        ));
    }
    let data = w1
        .values
        .as_slice()
        .iter()
        .zip(w2.values.as_slice())
        .map(|(a, b)| (1.0 - t) * a + t * b)
        .collect();
    let values = Grid::new(w1.m(), w1.n(), data)?;
    validate_weight(values, &w1.mu, &w1.lambda)
}

/// Draw a seeded weight: a random convex mixture of rank-one weights, pulled
/// toward the all-ones weight by an amplitude drawn from `{0, 1/4, 1/2, 3/4, 1}`.
pub fn random_weight(
    mu: &ProbabilityVector,
    lambda: &ProbabilityVector,
    seed: u64,
) -> WeightFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amplitude = rng.random_range(0..=4u32) as f64 / 4.0;
    mixture(mu, lambda, &mut rng, amplitude)
}

/// [`random_weight`] with a caller-chosen amplitude in `[0, 1]`; amplitude 0
/// gives the all-ones weight.
pub fn random_weight_with_amplitude(
    mu: &ProbabilityVector,
    lambda: &ProbabilityVector,
    seed: u64,
    amplitude: f64,
) -> Result<WeightFunction> {
    if !(0.0..=1.0).contains(&amplitude) {
        return Err(Error::input(
            "amplitude",
            format!("must lie in [0, 1], got {amplitude}"),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Keep the stream aligned with random_weight.
    let _ = rng.random_range(0..=4u32);
    Ok(mixture(mu, lambda, &mut rng, amplitude))
}

fn mixture(
    mu: &ProbabilityVector,
    lambda: &ProbabilityVector,
    rng: &mut ChaCha8Rng,
    amplitude: f64,
) -> WeightFunction {
    let components = rng.random_range(1..=3usize);
    let mut mix: Option<WeightFunction> = None;
    for k in 0..components {
        // Oversized draws get clamped to unit norm, which favors extreme weights.
        let u: Vec<f64> = (0..mu.len()).map(|_| rng.random_range(-1.5..1.5)).collect();
        let v: Vec<f64> = (0..lambda.len())
            .map(|_| rng.random_range(-1.5..1.5))
            .collect();
        let w = rank_one_weight(&u, &v, mu, lambda).expect("dimensions match by construction");
        mix = Some(match mix {
            None => w,
            // Equal-share running mixture.
            Some(prev) => {
                interpolate_weight(&prev, &w, 1.0 / (k + 1) as f64).expect("same measures")
            }
        });
    }
    let ones = WeightFunction::ones(mu, lambda);
    interpolate_weight(&ones, &mix.expect("at least one component"), amplitude)
        .expect("same measures")
}

/// Square nonnegative matrix with unit row and column sums.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DoublyStochasticMatrix(Grid);

impl DoublyStochasticMatrix {
    pub fn new(values: Grid) -> Result<Self> {
        if values.rows() != values.cols() {
            return Err(Error::Dimension(format!(
                "doubly stochastic matrix must be square, got {}x{}",
                values.rows(),
                values.cols()
            )));
        }
        values.check_entries()?;
        if let Some((axis, index, residual)) =
            stochastic_residuals(&values).find(|(_, _, r)| r.abs() > MARGINAL_TOL)
        {
            return Err(Error::Normalization {
                axis,
                index,
                residual,
            });
        }
        Ok(Self(values))
    }

    pub fn identity(n: usize) -> Self {
        Self(Grid::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 }))
    }

    /// The permutation `i -> n - 1 - i` (zero-based).
    pub fn antidiagonal(n: usize) -> Self {
        Self(Grid::from_fn(
            n,
            n,
            |i, j| if i + j + 1 == n { 1.0 } else { 0.0 },
        ))
    }

    pub fn uniform(n: usize) -> Self {
        Self(Grid::filled(n, n, 1.0 / n as f64))
    }

    pub fn order(&self) -> usize {
        self.0.rows()
    }

    pub fn values(&self) -> &Grid {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }

    pub fn is_identity(&self) -> bool {
        let n = self.order();
        (0..n).all(|i| (0..n).all(|j| self.get(i, j) == if i == j { 1.0 } else { 0.0 }))
    }

    pub fn max_residual(&self) -> f64 {
        stochastic_residuals(&self.0)
            .map(|(_, _, r)| r.abs())
            .fold(0.0, f64::max)
    }
}

fn stochastic_residuals(g: &Grid) -> impl Iterator<Item = (Axis, usize, f64)> + '_ {
    let rows = (0..g.rows()).map(move |i| (Axis::Row, i, g.row(i).iter().sum::<f64>() - 1.0));
    let cols = (0..g.cols()).map(move |j| {
        (
            Axis::Column,
            j,
            (0..g.rows()).map(|i| g.get(i, j)).sum::<f64>() - 1.0,
        )
    });
    rows.chain(cols)
}

/// Alternate row and column normalization of a strictly positive square matrix.
pub fn sinkhorn(start: &Grid) -> Result<DoublyStochasticMatrix> {
    if start.rows() != start.cols() {
        return Err(Error::Dimension("sinkhorn needs a square matrix".into()));
    }
    if let Some(&x) = start
        .as_slice()
        .iter()
        .find(|x| !(x.is_finite() && **x > 0.0))
    {
        return Err(Error::input(
            "sinkhorn",
            format!("entries must be finite and positive, got {x}"),
        ));
    }
    let n = start.rows();
    let mut m = start.data.clone();
    let mut residual = f64::INFINITY;
    for _ in 0..SINKHORN_MAX_ITER {
        for row in m.chunks_mut(n) {
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|x| *x /= s);
        }
        for j in 0..n {
            let s: f64 = (0..n).map(|i| m[i * n + j]).sum();
            (0..n).for_each(|i| m[i * n + j] /= s);
        }
        let g = Grid::new(n, n, m.clone())?;
        residual = stochastic_residuals(&g)
            .map(|(_, _, r)| r.abs())
            .fold(0.0, f64::max);
        if residual < SINKHORN_TOL {
            return Ok(DoublyStochasticMatrix(g));
        }
    }
    Err(Error::NoConvergence {
        what: "sinkhorn",
        iterations: SINKHORN_MAX_ITER,
        residual,
    })
}

/// Seeded doubly stochastic matrix: Sinkhorn applied to uniform draws in `(0, 1]`.
pub fn random_doubly_stochastic(n: usize, seed: u64) -> Result<DoublyStochasticMatrix> {
    if n == 0 {
        return Err(Error::input("n", "order must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = Grid::from_fn(n, n, |_, _| 1.0 - rng.random::<f64>());
    sinkhorn(&start)
}
