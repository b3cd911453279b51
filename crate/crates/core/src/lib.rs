//! Weight-function refinements of the discrete Jensen inequality.
//!
//! Given probability vectors `mu` (length `m`) and `lambda` (length `n`), a
//! weight function `w >= 0` with `sum_i w(i, j) mu_i = 1` and
//! `sum_j w(i, j) lambda_j = 1` yields, for convex `f`,
//!
//! ```text
//! f(sum lambda_j x_j) <= sum_i mu_i f(sum_j w(i, j) lambda_j x_j) <= sum lambda_j f(x_j)
//! ```
//!
//! Interpolating two weights gives a convex functional `phi` on `[0, 1]`
//! whose integral reduces to the special means in [`means`]. [`refine`]
//! builds and verifies the resulting chains; [`apps`] specializes them to
//! classical inequalities.

pub mod apps;
pub mod corpus;
pub mod error;
pub mod means;
pub mod measures;
pub mod quadrature;
pub mod refine;
pub mod search;

pub use error::{Axis, Error, Result};
pub use means::{Direction, Domain, FunctionKind, FunctionSpec};
pub use measures::{DoublyStochasticMatrix, Grid, ProbabilityVector, WeightFunction};
pub use refine::{
    GridValue, IdentityCheck, JensenInstance, Middle, Objective, PointSet, RefinementChain, Witness,
};
