//! Catalog of scalar convex/concave functions addressable by name.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ln_identric_unchecked, logarithmic_unchecked, p_logarithmic_pow_unchecked, sorted};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Convex,
    Concave,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::Convex => Direction::Concave,
            Direction::Concave => Direction::Convex,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Convex => f.write_str("convex"),
            Direction::Concave => f.write_str("concave"),
        }
    }
}

/// A real interval, possibly unbounded, with open or closed ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub lo: f64,
    pub lo_closed: bool,
    pub hi: f64,
    pub hi_closed: bool,
}

impl Domain {
    pub const REALS: Domain = Domain {
        lo: f64::NEG_INFINITY,
        lo_closed: false,
        hi: f64::INFINITY,
        hi_closed: false,
    };

    const fn positive() -> Self {
        Domain {
            lo: 0.0,
            lo_closed: false,
            hi: f64::INFINITY,
            hi_closed: false,
        }
    }

    const fn nonnegative() -> Self {
        Domain {
            lo: 0.0,
            lo_closed: true,
            hi: f64::INFINITY,
            hi_closed: false,
        }
    }

    // Closed ends admit a few ulps of rounding from convex combinations.
    fn slack(bound: f64) -> f64 {
        4.0 * f64::EPSILON * bound.abs().max(1.0)
    }

    pub fn contains(&self, x: f64) -> bool {
        if x.is_nan() {
            return false;
        }
        let above = if self.lo_closed {
            x >= self.lo - Self::slack(self.lo)
        } else {
            x > self.lo
        };
        let below = if self.hi_closed {
            x <= self.hi + Self::slack(self.hi)
        } else {
            x < self.hi
        };
        above && below && x.is_finite()
    }

    /// Snap a point that lies within rounding slack of a closed end onto it.
    fn snap(&self, x: f64) -> f64 {
        if self.lo_closed && x < self.lo {
            self.lo
        } else if self.hi_closed && x > self.hi {
            self.hi
        } else {
            x
        }
    }

    /// A bounded sub-interval used for random sampling.
    pub fn sampling_window(&self) -> (f64, f64) {
        let lo = if self.lo.is_finite() { self.lo } else { -10.0 };
        let hi = if self.hi.is_finite() {
            self.hi
        } else {
            lo.max(0.0) + 10.0
        };
        (lo, hi)
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lo_closed { '[' } else { '(' };
        let close = if self.hi_closed { ']' } else { ')' };
        let fmt_bound = |v: f64| {
            if v == f64::INFINITY {
                "inf".to_string()
            } else if v == f64::NEG_INFINITY {
                "-inf".to_string()
            } else {
                v.to_string()
            }
        };
        write!(
            f,
            "{open}{}, {}{close}",
            fmt_bound(self.lo),
            fmt_bound(self.hi)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FunctionKind {
    /// `x^2` on the reals.
    Square,
    /// `-x^2` on the reals.
    NegSquare,
    /// `e^x` on the reals.
    Exp,
    /// `-ln x` on `(0, inf)`.
    NegLog,
    /// `ln((1 - x) / x)` on `(0, 1/2]`.
    KyFan,
    /// `x^p` on `[0, inf)`, `p >= 1`.
    PowP { p: f64 },
    /// `x ln x` on `(0, inf)`.
    XLogX,
    /// `t / (1 + t)` on `[0, inf)`, concave.
    HarmonicFrac,
}

/// A catalog function with its declared convexity direction.
///
/// The direction defaults to the true one but may be overridden, in which case
/// chain checks are expected to fail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionSpec {
    kind: FunctionKind,
    direction: Direction,
    closed_form: bool,
}

impl FunctionSpec {
    pub const NAMES: [&'static str; 8] = [
        "square",
        "negsquare",
        "exp",
        "neglog",
        "kyfan",
        "powp",
        "xlogx",
        "harmonic_frac",
    ];

    fn new(kind: FunctionKind, direction: Direction) -> Self {
        Self {
            kind,
            direction,
            closed_form: true,
        }
    }

    pub fn square() -> Self {
        Self::new(FunctionKind::Square, Direction::Convex)
    }
    pub fn neg_square() -> Self {
        Self::new(FunctionKind::NegSquare, Direction::Concave)
    }
    pub fn exp() -> Self {
        Self::new(FunctionKind::Exp, Direction::Convex)
    }
    pub fn neglog() -> Self {
        Self::new(FunctionKind::NegLog, Direction::Convex)
    }
    pub fn kyfan() -> Self {
        Self::new(FunctionKind::KyFan, Direction::Convex)
    }
    pub fn powp(p: f64) -> Result<Self> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(Error::input(
                "powp.p",
                format!("exponent must be >= 1, got {p}"),
            ));
        }
        Ok(Self::new(FunctionKind::PowP { p }, Direction::Convex))
    }
    pub fn xlogx() -> Self {
        Self::new(FunctionKind::XLogX, Direction::Convex)
    }
    pub fn harmonic_frac() -> Self {
        Self::new(FunctionKind::HarmonicFrac, Direction::Concave)
    }

    /// Look up a catalog entry by name with its parameter mapping.
    pub fn from_name(name: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let allowed: &[&str] = if name == "powp" { &["p"] } else { &[] };
        if let Some(extra) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::input(
                "function.params",
                format!("unknown parameter '{extra}' for '{name}'"),
            ));
        }
        match name {
            "square" => Ok(Self::square()),
            "negsquare" => Ok(Self::neg_square()),
            "exp" => Ok(Self::exp()),
            "neglog" => Ok(Self::neglog()),
            "kyfan" => Ok(Self::kyfan()),
            "powp" => {
                let p = params.get("p").copied().ok_or_else(|| {
                    Error::input("function.params", "powp requires parameter 'p'")
                })?;
                Self::powp(p)
            }
            "xlogx" => Ok(Self::xlogx()),
            "harmonic_frac" => Ok(Self::harmonic_frac()),
            other => Err(Error::input(
                "function.name",
                format!(
                    "unknown function '{other}' (known: {})",
                    Self::NAMES.join(", ")
                ),
            )),
        }
    }

    /// Override the declared direction.
    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    /// Disable the closed-form integral mean so quadrature is always used.
    pub fn quadrature_only(mut self) -> Self {
        self.closed_form = false;
        self
    }

    pub fn kind(&self) -> FunctionKind {
        self.kind
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            FunctionKind::Square => "square",
            FunctionKind::NegSquare => "negsquare",
            FunctionKind::Exp => "exp",
            FunctionKind::NegLog => "neglog",
            FunctionKind::KyFan => "kyfan",
            FunctionKind::PowP { .. } => "powp",
            FunctionKind::XLogX => "xlogx",
            FunctionKind::HarmonicFrac => "harmonic_frac",
        }
    }

    pub fn params(&self) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        if let FunctionKind::PowP { p } = self.kind {
            out.insert("p".to_string(), p);
        }
        out
    }

    pub fn domain(&self) -> Domain {
        match self.kind {
            FunctionKind::Square | FunctionKind::NegSquare | FunctionKind::Exp => Domain::REALS,
            FunctionKind::NegLog | FunctionKind::XLogX => Domain::positive(),
            FunctionKind::KyFan => Domain {
                lo: 0.0,
                lo_closed: false,
                hi: 0.5,
                hi_closed: true,
            },
            FunctionKind::PowP { .. } | FunctionKind::HarmonicFrac => Domain::nonnegative(),
        }
    }

    fn domain_error(&self, x: f64) -> Error {
        Error::Domain {
            function: self.name().to_string(),
            value: x,
            domain: self.domain().to_string(),
            row: None,
        }
    }

    /// Evaluate, rejecting points outside the domain.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let domain = self.domain();
        if !domain.contains(x) {
            return Err(self.domain_error(x));
        }
        Ok(self.eval_raw(domain.snap(x)))
    }

    fn eval_raw(&self, x: f64) -> f64 {
        match self.kind {
            FunctionKind::Square => x * x,
            FunctionKind::NegSquare => -x * x,
            FunctionKind::Exp => x.exp(),
            FunctionKind::NegLog => -x.ln(),
            FunctionKind::KyFan => ((1.0 - x) / x).ln(),
            FunctionKind::PowP { p } => x.powf(p),
            FunctionKind::XLogX => x * x.ln(),
            FunctionKind::HarmonicFrac => x / (1.0 + x),
        }
    }

    pub(crate) fn check_segment(&self, a: f64, b: f64) -> Result<()> {
        for x in [a, b] {
            if !self.domain().contains(x) {
                return Err(self.domain_error(x));
            }
        }
        Ok(())
    }

    pub fn has_closed_form(&self) -> bool {
        self.closed_form
    }

    /// Closed-form `A(f; a, b)` for distinct in-domain endpoints, when known.
    pub fn closed_integral_mean(&self, a: f64, b: f64) -> Option<f64> {
        if !self.closed_form {
            return None;
        }
        let domain = self.domain();
        let (lo, hi) = sorted(domain.snap(a), domain.snap(b));
        if lo == hi {
            return Some(self.eval_raw(lo));
        }
        let v = match self.kind {
            FunctionKind::Square => (lo * lo + lo * hi + hi * hi) / 3.0,
            FunctionKind::NegSquare => -(lo * lo + lo * hi + hi * hi) / 3.0,
            FunctionKind::Exp => {
                let d = hi - lo;
                lo.exp() * d.exp_m1() / d
            }
            FunctionKind::NegLog => -ln_identric_unchecked(lo, hi),
            FunctionKind::KyFan => {
                ln_identric_unchecked(1.0 - hi, 1.0 - lo) - ln_identric_unchecked(lo, hi)
            }
            FunctionKind::PowP { p } => p_logarithmic_pow_unchecked(lo, hi, p),
            FunctionKind::XLogX => {
                let q = (hi - lo) / lo;
                if q <= 1.0 {
                    // (hi^2 ln hi - lo^2 ln lo) / (2(hi - lo)), rewritten with ln_1p
                    0.5 * (hi + lo) * lo.ln() + hi * hi * q.ln_1p() / (2.0 * lo * q)
                        - 0.25 * (lo + hi)
                } else {
                    (hi * hi * hi.ln() - lo * lo * lo.ln()) / (2.0 * (hi - lo)) - 0.25 * (lo + hi)
                }
            }
            FunctionKind::HarmonicFrac => 1.0 - 1.0 / logarithmic_unchecked(1.0 + lo, 1.0 + hi),
        };
        Some(v)
    }
}

/// Midpoint test of the declared direction on seeded random pairs.
///
/// Returns the first witness `(x, y)` where
/// `f((x+y)/2) <= (f(x)+f(y))/2` (or its reverse for concave) fails by more
/// than a relative `1e-12`.
pub fn spot_check_direction(f: &FunctionSpec, trials: usize, seed: u64) -> Option<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = f.domain().sampling_window();
    let draw = |rng: &mut ChaCha8Rng| loop {
        let x = lo + (hi - lo) * rng.random::<f64>();
        if f.domain().contains(x) {
            return x;
        }
    };
    for _ in 0..trials {
        let x = draw(&mut rng);
        let y = draw(&mut rng);
        let (fx, fy) = (f.eval_raw(x), f.eval_raw(y));
        let fm = f.eval_raw(0.5 * (x + y));
        let avg = 0.5 * (fx + fy);
        let tol = 1e-12 * fx.abs().max(fy.abs()).max(1.0);
        let ok = match f.direction() {
            Direction::Convex => fm <= avg + tol,
            Direction::Concave => fm >= avg - tol,
        };
        if !ok {
            return Some((x, y));
        }
    }
    None
}
