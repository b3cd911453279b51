use serde::Serialize;

use super::rel_err;
use crate::means::Direction;

/// Relative verification tolerance: slacks down to
/// `-DEFAULT_REL_TOL * max(1, |lower|, |upper|)` still pass.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridValue {
    pub t: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Middle {
    Value(f64),
    Grid(Vec<GridValue>),
    /// The two inner members of the discrete Hermite-Hadamard chain.
    Hadamard {
        phi_at_mean: f64,
        mean_of_phi: f64,
    },
}

/// A named equality that must hold between two independently computed values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
    pub tol: f64,
    pub ok: bool,
}

impl IdentityCheck {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        let e = rel_err(lhs, rhs);
        Self {
            name: name.into(),
            lhs,
            rhs,
            rel_err: e,
            tol,
            ok: e <= tol,
        }
    }
}

/// A chain member that broke the ordering by more than the tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    /// Which inequality failed, e.g. `"lower <= middle"`.
    pub relation: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    pub left: f64,
    pub right: f64,
    /// `right - left`; negative beyond `-tol` for a violation.
    pub slack: f64,
}

/// Lower bound, middle member(s) and upper bound of a refinement chain.
///
/// `lower` and `upper` are the two Jensen sides ordered by the declared
/// direction: for a convex function `lower = f(sum lambda_j x_j)`, for a
/// concave one `lower = sum lambda_j f(x_j)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementChain {
    pub direction: Direction,
    pub lower: f64,
    pub middle: Middle,
    pub upper: f64,
    pub slack_lower: f64,
    pub slack_upper: f64,
    /// Slack of the inner Hadamard inequality, when present.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack_inner: Option<f64>,
    pub rel_tol: f64,
    /// Absolute tolerance `rel_tol * max(1, |lower|, |upper|)`.
    pub tol: f64,
    pub pass: bool,
    pub identity_checks: Vec<IdentityCheck>,
    pub witnesses: Vec<Witness>,
}

impl RefinementChain {
    pub fn assemble(
        direction: Direction,
        lower: f64,
        middle: Middle,
        upper: f64,
        identity_checks: Vec<IdentityCheck>,
    ) -> Self {
        let mut chain = Self {
            direction,
            lower,
            middle,
            upper,
            slack_lower: 0.0,
            slack_upper: 0.0,
            slack_inner: None,
            rel_tol: DEFAULT_REL_TOL,
            tol: 0.0,
            pass: false,
            identity_checks,
            witnesses: Vec::new(),
        };
        chain.evaluate();
        chain
    }

    /// Re-judge the chain under a different relative tolerance.
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.evaluate();
        self
    }

    /// Ordered members `lower, ..., upper` as `(label, t, value)`.
    pub fn members(&self) -> Vec<(String, Option<f64>, f64)> {
        let mut out = vec![("lower".to_string(), None, self.lower)];
        match &self.middle {
            Middle::Value(v) => out.push(("middle".into(), None, *v)),
            Middle::Grid(values) => out.extend(
                values
                    .iter()
                    .map(|g| ("phi(t)".to_string(), Some(g.t), g.value)),
            ),
            Middle::Hadamard {
                phi_at_mean,
                mean_of_phi,
            } => {
                let (a, b) = self.hadamard_order(*phi_at_mean, *mean_of_phi);
                out.push((a.0.into(), None, a.1));
                out.push((b.0.into(), None, b.1));
            }
        }
        out.push(("upper".into(), None, self.upper));
        out
    }

    fn hadamard_order(
        &self,
        at_mean: f64,
        mean_of: f64,
    ) -> ((&'static str, f64), (&'static str, f64)) {
        let a = ("phi(mean t)", at_mean);
        let b = ("mean phi(t)", mean_of);
        match self.direction {
            Direction::Convex => (a, b),
            Direction::Concave => (b, a),
        }
    }

    fn evaluate(&mut self) {
        self.tol = self.rel_tol * 1f64.max(self.lower.abs()).max(self.upper.abs());
        self.witnesses.clear();
        let tol = self.tol;
        let mut witnesses = Vec::new();
        let mut check = |relation: &str, t: Option<f64>, left: f64, right: f64| {
            let slack = right - left;
            if slack.is_nan() || slack < -tol {
                witnesses.push(Witness {
                    relation: relation.to_string(),
                    t,
                    left,
                    right,
                    slack,
                });
            }
            slack
        };
        let middle = self.middle.clone();
        match &middle {
            Middle::Value(v) => {
                self.slack_lower = check("lower <= middle", None, self.lower, *v);
                self.slack_upper = check("middle <= upper", None, *v, self.upper);
                self.slack_inner = None;
            }
            Middle::Grid(values) => {
                let mut lo = f64::INFINITY;
                let mut hi = f64::INFINITY;
                for g in values {
                    lo = lo.min(check("lower <= phi(t)", Some(g.t), self.lower, g.value));
                    hi = hi.min(check("phi(t) <= upper", Some(g.t), g.value, self.upper));
                }
                self.slack_lower = lo;
                self.slack_upper = hi;
                self.slack_inner = None;
            }
            Middle::Hadamard {
                phi_at_mean,
                mean_of_phi,
            } => {
                let ((na, a), (nb, b)) = self.hadamard_order(*phi_at_mean, *mean_of_phi);
                self.slack_lower = check(&format!("lower <= {na}"), None, self.lower, a);
                self.slack_inner = Some(check(&format!("{na} <= {nb}"), None, a, b));
                self.slack_upper = check(&format!("{nb} <= upper"), None, b, self.upper);
            }
        }
        self.witnesses = witnesses;
        self.pass = self.witnesses.is_empty() && self.identity_checks.iter().all(|c| c.ok);
    }
}
