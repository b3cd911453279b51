//! Weight-function refinements of the discrete Jensen inequality.
//!
//! For weights `w1`, `w2` over `(mu, lambda)` and points `x_1..x_n` the
//! interpolating functional is
//!
//! ```text
//! phi(t) = sum_i mu_i f( sum_j [(1-t) w1(i,j) + t w2(i,j)] lambda_j x_j ),   t in [0, 1]
//! ```
//!
//! For convex `f` every `phi(t)`, its integral over `[0, 1]` and its discrete
//! Hermite-Hadamard averages lie between `f(sum lambda_j x_j)` and
//! `sum lambda_j f(x_j)`; `phi` itself is convex in `t`. For concave `f` the
//! two outer members trade places. The checkers here evaluate both sides and
//! report slacks under a relative tolerance.

mod chain;
mod instance;

pub use chain::{GridValue, IdentityCheck, Middle, RefinementChain, Witness, DEFAULT_REL_TOL};
pub use instance::{JensenInstance, Objective, PointSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::means::{integral_mean, Direction, FunctionSpec};
use crate::measures::{embed_doubly_stochastic, DoublyStochasticMatrix};
use crate::quadrature::Simpson;
use crate::search::golden_section;

/// Default grid for [`chain_at_t`].
pub const DEFAULT_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// Tolerance for agreement between the closed-form and quadrature integrals.
pub const INTEGRAL_AGREEMENT_TOL: f64 = 1e-8;

/// `|a - b| / max(1, |a|, |b|)`.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}

fn check_t(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::input("t", format!("must lie in [0, 1], got {t}")));
    }
    Ok(())
}

/// `phi(t)` for the instance's two weights.
pub fn phi(inst: &JensenInstance, t: f64) -> Result<f64> {
    check_t(t)?;
    let (w1, w2) = (inst.w1(), inst.w2());
    inst.weighted_value(|i, j| (1.0 - t) * w1.get(i, j) + t * w2.get(i, j))
}

/// Middle member of the single-weight chain,
/// `sum_i mu_i f(sum_j w(i,j) lambda_j x_j)`, for the instance's points and
/// objective with `w` in place of both weights.
pub fn single_weight_value(
    inst: &JensenInstance,
    w: &crate::measures::WeightFunction,
) -> Result<f64> {
    if w.m() != inst.m() || w.n() != inst.n() {
        return Err(Error::Dimension("weight does not match instance".into()));
    }
    inst.weighted_value(|i, j| w.get(i, j))
}

/// Sandwich `phi(t)` between the Jensen bounds at every grid point.
pub fn chain_at_t(inst: &JensenInstance, t_grid: &[f64]) -> Result<RefinementChain> {
    if t_grid.is_empty() {
        return Err(Error::input("t_grid", "must contain at least one point"));
    }
    let (lower, upper) = inst.jensen_bounds()?;
    let values = t_grid
        .iter()
        .map(|&t| {
            Ok(GridValue {
                t,
                value: phi(inst, t)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RefinementChain::assemble(
        inst.direction(),
        lower,
        Middle::Grid(values),
        upper,
        Vec::new(),
    ))
}

/// `∫_0^1 phi(t) dt` by adaptive Simpson over `t`.
pub fn integral_by_quadrature(inst: &JensenInstance) -> Result<f64> {
    Simpson::default().integrate(|t| phi(inst, t.clamp(0.0, 1.0)), 0.0, 1.0)
}

/// `sum_i mu_i A(f; a_i, b_i)` with `a_i`, `b_i` the inner points at `t = 0`
/// and `t = 1`. Only defined for scalar objectives.
pub fn integral_closed_form(inst: &JensenInstance) -> Result<Option<f64>> {
    let Objective::Scalar(f) = inst.objective() else {
        return Ok(None);
    };
    let mut total = 0.0;
    for i in 0..inst.m() {
        let (a, b) = inst.inner_endpoints(i);
        total += inst.mu()[i] * integral_mean(f, a[0], b[0]).map_err(|e| e.at_row(i))?;
    }
    Ok(Some(total))
}

/// Sandwich `∫_0^1 phi` between the Jensen bounds.
///
/// Scalar objectives use the closed form as the middle and record its
/// agreement with quadrature as an identity check; other objectives use
/// quadrature directly.
pub fn chain_integral(inst: &JensenInstance) -> Result<RefinementChain> {
    let (lower, upper) = inst.jensen_bounds()?;
    let quad = integral_by_quadrature(inst)?;
    let (middle, checks) = match integral_closed_form(inst)? {
        Some(closed) => (
            closed,
            vec![IdentityCheck::new(
                "closed_form_vs_quadrature",
                closed,
                quad,
                INTEGRAL_AGREEMENT_TOL,
            )],
        ),
        None => (quad, Vec::new()),
    };
    Ok(RefinementChain::assemble(
        inst.direction(),
        lower,
        Middle::Value(middle),
        upper,
        checks,
    ))
}

/// Nonnegative weights `p_1..p_k` with positive total and nodes `t_i` in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HadamardWeights {
    p: Vec<f64>,
    t: Vec<f64>,
}

impl HadamardWeights {
    pub fn new(p: Vec<f64>, t: Vec<f64>) -> Result<Self> {
        if p.is_empty() || p.len() != t.len() {
            return Err(Error::Dimension(format!(
                "hadamard weights need equal nonzero lengths, got p={} t={}",
                p.len(),
                t.len()
            )));
        }
        if let Some(&x) = p.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::input(
                "hadamard.p",
                format!("entries must be nonnegative, got {x}"),
            ));
        }
        if p.iter().sum::<f64>() <= 0.0 {
            return Err(Error::input("hadamard.p", "total weight must be positive"));
        }
        if let Some(&x) = t.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::input(
                "hadamard.t",
                format!("nodes must lie in [0, 1], got {x}"),
            ));
        }
        Ok(Self { p, t })
    }

    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn mean_node(&self) -> f64 {
        let m = self.p.iter().zip(&self.t).map(|(p, t)| p * t).sum::<f64>() / self.total();
        m.clamp(0.0, 1.0)
    }
}

/// Four-member discrete Hermite-Hadamard chain:
/// `lower <= phi(sum p_i t_i / P) <= (1/P) sum p_i phi(t_i) <= upper`.
pub fn chain_hadamard(inst: &JensenInstance, hw: &HadamardWeights) -> Result<RefinementChain> {
    let (lower, upper) = inst.jensen_bounds()?;
    let at_mean = phi(inst, hw.mean_node())?;
    let mut acc = 0.0;
    for (p, t) in hw.p.iter().zip(&hw.t) {
        acc += p * phi(inst, *t)?;
    }
    let mean_of_values = acc / hw.total();
    Ok(RefinementChain::assemble(
        inst.direction(),
        lower,
        Middle::Hadamard {
            phi_at_mean: at_mean,
            mean_of_phi: mean_of_values,
        },
        upper,
        Vec::new(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvexityWitness {
    pub t1: f64,
    pub t2: f64,
    pub alpha: f64,
    /// `phi(alpha t1 + (1 - alpha) t2)`
    pub lhs: f64,
    /// `alpha phi(t1) + (1 - alpha) phi(t2)`
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub pass: bool,
    pub trials: usize,
    pub tol: f64,
    pub witnesses: Vec<ConvexityWitness>,
}

/// Test convexity (concavity, for concave objectives) of `phi` on seeded
/// random triples `(t1, t2, alpha)`.
pub fn phi_convexity_check(
    inst: &JensenInstance,
    trials: usize,
    seed: u64,
) -> Result<ConvexityReport> {
    phi_convexity_check_with_tol(inst, trials, seed, DEFAULT_REL_TOL)
}

/// [`phi_convexity_check`] with slack `rel_tol * max(1, |lower|, |upper|)`.
pub fn phi_convexity_check_with_tol(
    inst: &JensenInstance,
    trials: usize,
    seed: u64,
    rel_tol: f64,
) -> Result<ConvexityReport> {
    let (lower, upper) = inst.jensen_bounds()?;
    let tol = rel_tol * 1f64.max(lower.abs()).max(upper.abs());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut witnesses = Vec::new();
    for _ in 0..trials {
        let t1: f64 = rng.random();
        let t2: f64 = rng.random();
        let alpha: f64 = rng.random();
        let mid = (alpha * t1 + (1.0 - alpha) * t2).clamp(0.0, 1.0);
        let lhs = phi(inst, mid)?;
        let rhs = alpha * phi(inst, t1)? + (1.0 - alpha) * phi(inst, t2)?;
        let ok = match inst.direction() {
            Direction::Convex => lhs <= rhs + tol,
            Direction::Concave => lhs >= rhs - tol,
        };
        if !ok {
            witnesses.push(ConvexityWitness {
                t1,
                t2,
                alpha,
                lhs,
                rhs,
            });
        }
    }
    Ok(ConvexityReport {
        pass: witnesses.is_empty(),
        trials,
        tol,
        witnesses,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tightened {
    pub t_star: f64,
    pub value: f64,
    /// Final golden-section bracket.
    pub bracket: (f64, f64),
    pub phi_0: f64,
    pub phi_1: f64,
}

/// Tightest member of the `phi` family: the minimizer of `phi` over `[0, 1]`
/// for convex objectives, the maximizer for concave ones.
pub fn tighten(inst: &JensenInstance, tol_t: f64) -> Result<Tightened> {
    if !(tol_t.is_finite() && tol_t > 0.0) {
        return Err(Error::input(
            "tol_t",
            format!("must be positive, got {tol_t}"),
        ));
    }
    let sign = match inst.direction() {
        Direction::Convex => 1.0,
        Direction::Concave => -1.0,
    };
    let best = golden_section(
        |t| phi(inst, t.clamp(0.0, 1.0)).map(|v| sign * v),
        0.0,
        1.0,
        tol_t,
    )?;
    Ok(Tightened {
        t_star: best.x,
        value: sign * best.value,
        bracket: best.bracket,
        phi_0: phi(inst, 0.0)?,
        phi_1: phi(inst, 1.0)?,
    })
}

/// `(1/n) sum_i f( sum_j [(1-t) b_ij + t c_ij] x_j )`, evaluated directly from
/// the matrices.
pub fn phi_matrix(
    points: &PointSet,
    objective: &Objective,
    b: &DoublyStochasticMatrix,
    c: &DoublyStochasticMatrix,
    t: f64,
) -> Result<f64> {
    check_t(t)?;
    let n = b.order();
    if c.order() != n || points.len() != n {
        return Err(Error::Dimension(format!(
            "matrices of order {} and {} with {} points",
            n,
            c.order(),
            points.len()
        )));
    }
    let mut total = 0.0;
    let mut y = vec![0.0; points.dim()];
    for i in 0..n {
        y.iter_mut().for_each(|v| *v = 0.0);
        for j in 0..n {
            let coeff = (1.0 - t) * b.get(i, j) + t * c.get(i, j);
            for (yk, xk) in y.iter_mut().zip(points.get(j)) {
                *yk += coeff * xk;
            }
        }
        total += objective.eval(&y).map_err(|e| e.at_row(i))?;
    }
    Ok(total / n as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixChains {
    pub at_t: RefinementChain,
    pub integral: RefinementChain,
}

/// Chains for two doubly stochastic matrices, via their weight embeddings
/// over uniform measures.
pub fn chain_matrix(
    points: &PointSet,
    objective: &Objective,
    b: &DoublyStochasticMatrix,
    c: &DoublyStochasticMatrix,
    t_grid: &[f64],
) -> Result<MatrixChains> {
    if b.order() != c.order() || points.len() != b.order() {
        return Err(Error::Dimension(format!(
            "matrices of order {} and {} with {} points",
            b.order(),
            c.order(),
            points.len()
        )));
    }
    let inst = JensenInstance::new(
        points.clone(),
        objective.clone(),
        embed_doubly_stochastic(b),
        embed_doubly_stochastic(c),
    )?;
    Ok(MatrixChains {
        at_t: chain_at_t(&inst, t_grid)?,
        integral: chain_integral(&inst)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchOutcome {
    pub at_t: RefinementChain,
    pub integral: RefinementChain,
}

/// Evaluate the grid and integral chains for many instances in parallel.
/// Results come back in input order.
pub fn verify_batch(instances: &[JensenInstance], t_grid: &[f64]) -> Vec<Result<BatchOutcome>> {
    instances
        .par_iter()
        .map(|inst| {
            Ok(BatchOutcome {
                at_t: chain_at_t(inst, t_grid)?,
                integral: chain_integral(inst)?,
            })
        })
        .collect()
}

/// Convenience: scalar instance from plain numbers.
pub fn scalar_instance(
    x: Vec<f64>,
    f: FunctionSpec,
    w1: crate::measures::WeightFunction,
    w2: crate::measures::WeightFunction,
) -> Result<JensenInstance> {
    JensenInstance::new(PointSet::scalars(x)?, Objective::Scalar(f), w1, w2)
}
