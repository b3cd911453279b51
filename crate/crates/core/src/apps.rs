//! Turnkey refinement chains for classical inequalities.
//!
//! Each chain evaluates its middle member in closed form through the special
//! means and cross-checks it against a direct `t`-quadrature of the generic
//! interpolating functional (see [`crate::refine`]). The agreement is recorded
//! as an [`IdentityCheck`] on the returned chain.
//!
//! | chain | function | middle uses |
//! |-------|----------|-------------|
//! | [`agm_chain`] | `-ln x` | identric mean |
//! | [`kyfan_chain`] | `ln((1-x)/x)` | identric mean |
//! | [`lp_chain`] | `‖f‖_p^p` | p-logarithmic mean |
//! | [`power_sum_chain`] | `‖f‖_p^p` on indicator functions | p-logarithmic mean |
//! | [`matrix_power_bounds`] | same, with unit points | expanded p-logarithmic mean |
//! | [`harmonic_chain`] | `∫ f/(1+f)` (concave) | logarithmic mean |

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::means::{
    ln_identric_unchecked, logarithmic_unchecked, p_logarithmic_pow_unchecked, Direction,
    FunctionSpec,
};
use crate::measures::{DoublyStochasticMatrix, Grid, WeightFunction};
use crate::refine::{
    integral_by_quadrature, IdentityCheck, JensenInstance, Middle, Objective, PointSet,
    RefinementChain,
};

/// Tolerance for the closed-form middle against `t`-quadrature.
pub const IDENTITY_TOL: f64 = 1e-9;
/// Looser tolerance used for the norm chains, whose integrands are summed
/// over the space before quadrature.
pub const NORM_IDENTITY_TOL: f64 = 1e-8;
/// Tolerance for the identity-matrix specialization of the matrix power bounds.
pub const MATRIX_IDENTITY_TOL: f64 = 1e-12;

/// Finite set of points with positive masses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteMeasureSpace {
    masses: Vec<f64>,
}

impl FiniteMeasureSpace {
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::input("space.masses", "need at least one point"));
        }
        if let Some(&m) = masses.iter().find(|m| !(m.is_finite() && **m > 0.0)) {
            return Err(Error::input(
                "space.masses",
                format!("masses must be positive, got {m}"),
            ));
        }
        Ok(Self { masses })
    }

    /// Counting measure on `k` points.
    pub fn counting(k: usize) -> Self {
        assert!(k > 0);
        Self {
            masses: vec![1.0; k],
        }
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// `∫ |g|^p` for `g` sampled at the points.
    pub fn norm_pow(&self, g: &[f64], p: f64) -> f64 {
        self.masses
            .iter()
            .zip(g)
            .map(|(m, x)| m * x.abs().powf(p))
            .sum()
    }
}

/// Functions `f_1..f_n` sampled on the points of a finite space; row `j` is `f_j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionVector {
    samples: Grid,
}

impl FunctionVector {
    pub fn new(samples: Grid) -> Result<Self> {
        if let Some(x) = samples.as_slice().iter().find(|x| !x.is_finite()) {
            return Err(Error::input("points", format!("non-finite sample {x}")));
        }
        Ok(Self { samples })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(Grid::from_rows(rows)?)
    }

    /// `f_j = x_j · χ_{j}` on the counting space `{1..n}`.
    pub fn indicators(x: &[f64]) -> Result<Self> {
        let n = x.len();
        if n == 0 {
            return Err(Error::input("points", "need at least one value"));
        }
        Self::new(Grid::from_fn(n, n, |j, k| if j == k { x[j] } else { 0.0 }))
    }

    pub fn count(&self) -> usize {
        self.samples.rows()
    }

    pub fn space_len(&self) -> usize {
        self.samples.cols()
    }

    pub fn get(&self, j: usize) -> &[f64] {
        self.samples.row(j)
    }

    pub fn samples(&self) -> &Grid {
        &self.samples
    }

    fn abs_points(&self) -> Result<PointSet> {
        PointSet::tuples(&self.samples.map(f64::abs).to_rows())
    }
}

/// A chain together with named auxiliary quantities (means, ratios).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AppChain {
    pub chain: RefinementChain,
    pub labels: BTreeMap<String, f64>,
}

impl AppChain {
    fn new(chain: RefinementChain, labels: &[(&str, f64)]) -> Self {
        Self {
            chain,
            labels: labels.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }
}

fn check_weights(w1: &WeightFunction, w2: &WeightFunction, n: usize) -> Result<()> {
    if !w1.shares_measures(w2) {
        return Err(Error::Dimension(
            "w1 and w2 are defined over different measures".into(),
        ));
    }
    if w1.n() != n {
        return Err(Error::Dimension(format!(
            "{n} inputs but lambda has {} entries",
            w1.n()
        )));
    }
    Ok(())
}

/// `sum_j w(i, j) lambda_j v_j` for every row `i`.
fn row_combinations(w: &WeightFunction, v: &[f64]) -> Vec<f64> {
    let lambda = w.lambda();
    (0..w.m())
        .map(|i| (0..w.n()).map(|j| w.get(i, j) * lambda[j] * v[j]).sum())
        .collect()
}

/// Same as [`row_combinations`] for vector-valued inputs (rows of `fv`),
/// returning one sample vector per weight row.
fn row_function_combinations(w: &WeightFunction, fv: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let lambda = w.lambda();
    let k = fv.first().map_or(0, Vec::len);
    (0..w.m())
        .map(|i| {
            let mut acc = vec![0.0; k];
            for (j, f) in fv.iter().enumerate() {
                let c = w.get(i, j) * lambda[j];
                acc.iter_mut().zip(f).for_each(|(a, x)| *a += c * x);
            }
            acc
        })
        .collect()
}

fn quadrature_check(
    name: &str,
    lhs: f64,
    inst: &JensenInstance,
    map: impl Fn(f64) -> f64,
    tol: f64,
) -> Result<IdentityCheck> {
    let q = integral_by_quadrature(inst)?;
    Ok(IdentityCheck::new(name, lhs, map(q), tol))
}

/// Refined AM-GM:
/// `prod x_j^λ_j <= prod_i I(sum_j w1 λ_j x_j, sum_j w2 λ_j x_j)^μ_i <= sum λ_j x_j`.
pub fn agm_chain(x: &[f64], w1: &WeightFunction, w2: &WeightFunction) -> Result<AppChain> {
    check_weights(w1, w2, x.len())?;
    if let Some((j, v)) = x
        .iter()
        .enumerate()
        .find(|(_, v)| !(v.is_finite() && **v > 0.0))
    {
        return Err(Error::input(
            format!("points[{j}]"),
            format!("must be positive, got {v}"),
        ));
    }
    let lambda = w1.lambda().weights();
    let mu = w1.mu();
    let geometric = lambda
        .iter()
        .zip(x)
        .map(|(l, v)| l * v.ln())
        .sum::<f64>()
        .exp();
    let arithmetic: f64 = lambda.iter().zip(x).map(|(l, v)| l * v).sum();
    let (a, b) = (row_combinations(w1, x), row_combinations(w2, x));
    let ln_middle: f64 = (0..mu.len())
        .map(|i| mu[i] * ln_identric_unchecked(a[i], b[i]))
        .sum();
    let middle = ln_middle.exp();

    let inst = JensenInstance::new(
        PointSet::scalars(x.to_vec())?,
        Objective::Scalar(FunctionSpec::neglog()),
        w1.clone(),
        w2.clone(),
    )?;
    let check = quadrature_check(
        "middle_vs_exp_neg_t_integral",
        middle,
        &inst,
        |q| (-q).exp(),
        IDENTITY_TOL,
    )?;
    let chain = RefinementChain::assemble(
        Direction::Convex,
        geometric,
        Middle::Value(middle),
        arithmetic,
        vec![check],
    );
    Ok(AppChain::new(chain, &[("G", geometric), ("A", arithmetic)]))
}

/// Refined Ky Fan inequality for `x_j` in `(0, 1/2]`:
/// `A'/A <= prod_i [I(1-side) / I(side)]^μ_i <= G'/G`.
pub fn kyfan_chain(x: &[f64], w1: &WeightFunction, w2: &WeightFunction) -> Result<AppChain> {
    check_weights(w1, w2, x.len())?;
    if let Some((j, v)) = x
        .iter()
        .enumerate()
        .find(|(_, v)| !(**v > 0.0 && **v <= 0.5))
    {
        return Err(Error::input(
            format!("points[{j}]"),
            format!("must lie in (0, 1/2], got {v}"),
        ));
    }
    let lambda = w1.lambda().weights();
    let mu = w1.mu();
    let comp: Vec<f64> = x.iter().map(|v| 1.0 - v).collect();
    let a_n: f64 = lambda.iter().zip(x).map(|(l, v)| l * v).sum();
    let a_c: f64 = lambda.iter().zip(&comp).map(|(l, v)| l * v).sum();
    let g_n = lambda
        .iter()
        .zip(x)
        .map(|(l, v)| l * v.ln())
        .sum::<f64>()
        .exp();
    let g_c = lambda
        .iter()
        .zip(&comp)
        .map(|(l, v)| l * v.ln())
        .sum::<f64>()
        .exp();

    let (a, b) = (row_combinations(w1, x), row_combinations(w2, x));
    let (ac, bc) = (row_combinations(w1, &comp), row_combinations(w2, &comp));
    let ln_middle: f64 = (0..mu.len())
        .map(|i| mu[i] * (ln_identric_unchecked(ac[i], bc[i]) - ln_identric_unchecked(a[i], b[i])))
        .sum();
    let middle = ln_middle.exp();

    let inst = JensenInstance::new(
        PointSet::scalars(x.to_vec())?,
        Objective::Scalar(FunctionSpec::kyfan()),
        w1.clone(),
        w2.clone(),
    )?;
    let check = quadrature_check(
        "middle_vs_exp_t_integral",
        middle,
        &inst,
        f64::exp,
        IDENTITY_TOL,
    )?;
    let chain = RefinementChain::assemble(
        Direction::Convex,
        a_c / a_n,
        Middle::Value(middle),
        g_c / g_n,
        vec![check],
    );
    Ok(AppChain::new(
        chain,
        &[
            ("A", a_n),
            ("A'", a_c),
            ("G", g_n),
            ("G'", g_c),
            ("A'/A", a_c / a_n),
            ("G'/G", g_c / g_n),
        ],
    ))
}

fn check_exponent(p: f64) -> Result<()> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::input("p", format!("exponent must be >= 1, got {p}")));
    }
    Ok(())
}

/// Refined convexity of `‖·‖_p^p` on a finite space:
/// `‖sum λ_j f_j‖_p^p <= sum_i μ_i ‖L_p^p(sum w1 λ |f|, sum w2 λ |f|)‖_1 <= sum λ_j ‖f_j‖_p^p`.
pub fn lp_chain(
    fv: &FunctionVector,
    space: &FiniteMeasureSpace,
    p: f64,
    w1: &WeightFunction,
    w2: &WeightFunction,
) -> Result<AppChain> {
    check_exponent(p)?;
    check_weights(w1, w2, fv.count())?;
    if fv.space_len() != space.len() {
        return Err(Error::Dimension(format!(
            "functions sampled at {} points, space has {}",
            fv.space_len(),
            space.len()
        )));
    }
    let lambda = w1.lambda().weights();
    let mu = w1.mu();
    let rows = fv.samples().to_rows();
    let abs_rows = fv.samples().map(f64::abs).to_rows();

    let mut combo = vec![0.0; space.len()];
    for (l, f) in lambda.iter().zip(&rows) {
        combo.iter_mut().zip(f).for_each(|(c, x)| *c += l * x);
    }
    let lower = space.norm_pow(&combo, p);
    let upper: f64 = lambda
        .iter()
        .zip(&rows)
        .map(|(l, f)| l * space.norm_pow(f, p))
        .sum();

    let (a, b) = (
        row_function_combinations(w1, &abs_rows),
        row_function_combinations(w2, &abs_rows),
    );
    let middle: f64 = (0..mu.len())
        .map(|i| {
            let inner: f64 = space
                .masses()
                .iter()
                .enumerate()
                .map(|(k, m)| m * p_logarithmic_pow_unchecked(a[i][k], b[i][k], p))
                .sum();
            mu[i] * inner
        })
        .sum();

    let inst = JensenInstance::new(
        fv.abs_points()?,
        Objective::separable(FunctionSpec::powp(p)?, space.masses().to_vec())?,
        w1.clone(),
        w2.clone(),
    )?;
    let check = quadrature_check(
        "middle_vs_t_integral",
        middle,
        &inst,
        |q| q,
        NORM_IDENTITY_TOL,
    )?;
    let chain = RefinementChain::assemble(
        Direction::Convex,
        lower,
        Middle::Value(middle),
        upper,
        vec![check],
    );
    Ok(AppChain::new(chain, &[("p", p)]))
}

/// Power sums: `sum λ_j^p x_j^p <= sum_i sum_j μ_i L_p^p(w1 λ_j x_j, w2 λ_j x_j) <= sum λ_j x_j^p`.
pub fn power_sum_chain(
    x: &[f64],
    p: f64,
    w1: &WeightFunction,
    w2: &WeightFunction,
) -> Result<AppChain> {
    check_exponent(p)?;
    check_weights(w1, w2, x.len())?;
    if let Some((j, v)) = x
        .iter()
        .enumerate()
        .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
    {
        return Err(Error::input(
            format!("points[{j}]"),
            format!("must be nonnegative, got {v}"),
        ));
    }
    let lambda = w1.lambda().weights();
    let mu = w1.mu();
    let lower: f64 = lambda.iter().zip(x).map(|(l, v)| (l * v).powf(p)).sum();
    let upper: f64 = lambda.iter().zip(x).map(|(l, v)| l * v.powf(p)).sum();
    let mut middle = 0.0;
    for i in 0..mu.len() {
        let mut row = 0.0;
        for (j, v) in x.iter().enumerate() {
            let a = w1.get(i, j) * lambda[j] * v;
            let b = w2.get(i, j) * lambda[j] * v;
            row += p_logarithmic_pow_unchecked(a, b, p);
        }
        middle += mu[i] * row;
    }

    let fv = FunctionVector::indicators(x)?;
    let inst = JensenInstance::new(
        fv.abs_points()?,
        Objective::separable(FunctionSpec::powp(p)?, vec![1.0; x.len()])?,
        w1.clone(),
        w2.clone(),
    )?;
    let check = quadrature_check(
        "middle_vs_t_integral",
        middle,
        &inst,
        |q| q,
        NORM_IDENTITY_TOL,
    )?;
    let chain = RefinementChain::assemble(
        Direction::Convex,
        lower,
        Middle::Value(middle),
        upper,
        vec![check],
    );
    Ok(AppChain::new(chain, &[("p", p)]))
}

/// `n^(2-p) <= (1/(p+1)) sum_{i,j} sum_{k=0}^p b_ij^k c_ij^(p-k) <= n` for an
/// integer `p >= 1`.
///
/// When `C` is the identity the middle is also evaluated in its reduced form
/// `(1/(p+1)) (sum b_ij^p + sum_i sum_{k<p} b_ii^k)` and recorded as an
/// identity check.
pub fn matrix_power_bounds(
    b: &DoublyStochasticMatrix,
    c: &DoublyStochasticMatrix,
    p: u32,
) -> Result<AppChain> {
    if p == 0 {
        return Err(Error::input("p", "exponent must be a positive integer"));
    }
    let n = b.order();
    if c.order() != n {
        return Err(Error::Dimension(format!(
            "B has order {n}, C has order {}",
            c.order()
        )));
    }
    let pi = p as i32;
    let scale = 1.0 / (p as f64 + 1.0);
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            let (bij, cij) = (b.get(i, j), c.get(i, j));
            // powi(0) is 1, including for a zero base.
            sum += (0..=pi)
                .map(|k| bij.powi(k) * cij.powi(pi - k))
                .sum::<f64>();
        }
    }
    let middle = scale * sum;
    let lower = (n as f64).powi(2 - pi);
    let upper = n as f64;

    let mut checks = Vec::new();
    if c.is_identity() {
        let powers: f64 = b.values().as_slice().iter().map(|x| x.powi(pi)).sum();
        let diag: f64 = (0..n)
            .map(|i| (0..pi).map(|k| b.get(i, i).powi(k)).sum::<f64>())
            .sum();
        checks.push(IdentityCheck::new(
            "identity_c_reduced_form",
            middle,
            scale * (powers + diag),
            MATRIX_IDENTITY_TOL,
        ));
    }
    let chain = RefinementChain::assemble(
        Direction::Convex,
        lower,
        Middle::Value(middle),
        upper,
        checks,
    );
    Ok(AppChain::new(chain, &[("n", n as f64), ("p", p as f64)]))
}

/// `∫_X f / (1 + f)` for nonnegative samples.
pub fn harmonic_functional(f: &[f64], space: &FiniteMeasureSpace) -> f64 {
    space
        .masses()
        .iter()
        .zip(f)
        .map(|(m, x)| m * x / (1.0 + x))
        .sum()
}

/// Reversed chain for the concave `φ(f) = ∫ f/(1+f)`:
/// `sum λ_j φ(f_j) <= μ(X) - sum_i μ_i ‖1 / L(1 + sum w1 λ f, 1 + sum w2 λ f)‖_1 <= φ(sum λ_j f_j)`.
pub fn harmonic_chain(
    fv: &FunctionVector,
    space: &FiniteMeasureSpace,
    w1: &WeightFunction,
    w2: &WeightFunction,
) -> Result<AppChain> {
    check_weights(w1, w2, fv.count())?;
    if fv.space_len() != space.len() {
        return Err(Error::Dimension(format!(
            "functions sampled at {} points, space has {}",
            fv.space_len(),
            space.len()
        )));
    }
    if let Some(&v) = fv.samples().as_slice().iter().find(|v| **v < 0.0) {
        return Err(Error::input(
            "points",
            format!("samples must be nonnegative, got {v}"),
        ));
    }
    let lambda = w1.lambda().weights();
    let mu = w1.mu();
    let rows = fv.samples().to_rows();

    let lower: f64 = lambda
        .iter()
        .zip(&rows)
        .map(|(l, f)| l * harmonic_functional(f, space))
        .sum();
    let mut combo = vec![0.0; space.len()];
    for (l, f) in lambda.iter().zip(&rows) {
        combo.iter_mut().zip(f).for_each(|(c, x)| *c += l * x);
    }
    let upper = harmonic_functional(&combo, space);

    let (a, b) = (
        row_function_combinations(w1, &rows),
        row_function_combinations(w2, &rows),
    );
    let reciprocal: f64 = (0..mu.len())
        .map(|i| {
            let inner: f64 = space
                .masses()
                .iter()
                .enumerate()
                .map(|(k, m)| m / logarithmic_unchecked(1.0 + a[i][k], 1.0 + b[i][k]))
                .sum();
            mu[i] * inner
        })
        .sum();
    let middle = space.total() - reciprocal;

    let inst = JensenInstance::new(
        fv.abs_points()?,
        Objective::separable(FunctionSpec::harmonic_frac(), space.masses().to_vec())?,
        w1.clone(),
        w2.clone(),
    )?;
    let check = quadrature_check("middle_vs_t_integral", middle, &inst, |q| q, IDENTITY_TOL)?;
    let chain = RefinementChain::assemble(
        Direction::Concave,
        lower,
        Middle::Value(middle),
        upper,
        vec![check],
    );
    Ok(AppChain::new(chain, &[("mu(X)", space.total())]))
}
