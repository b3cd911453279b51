//! Integral mean, identric, logarithmic and p-logarithmic means.
//!
//! Every two-argument mean here is an integral mean in disguise:
//!
//! | mean | identity |
//! |------|----------|
//! | `A(f; a, b)` | `(1/(b-a)) ∫_a^b f` |
//! | `I(a, b)` | `exp(A(ln; a, b))` |
//! | `L(a, b)` | `1 / A(1/t; a, b)` |
//! | `L_p(a, b)` | `A(t^p; a, b)^(1/p)` |
//!
//! Inside the near-equal band `|b - a| <= EPS_DEG * max(|a|, |b|)` each mean
//! switches to a midpoint expansion, because the closed forms divide by
//! `b - a`. Outside the band the closed forms are evaluated through `ln_1p`
//! and `exp_m1` so no digits are lost to cancellation.

mod catalog;

pub use catalog::{spot_check_direction, Direction, Domain, FunctionKind, FunctionSpec};

use crate::error::{Error, Result};
use crate::quadrature::Simpson;

/// Relative half-width of the near-equal band.
pub const EPS_DEG: f64 = 1e-8;

/// True when `a` and `b` are close enough that the midpoint expansion is used.
pub fn near_equal(a: f64, b: f64) -> bool {
    (b - a).abs() <= EPS_DEG * a.abs().max(b.abs())
}

fn sorted(a: f64, b: f64) -> (f64, f64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn check_positive(name: &str, a: f64, b: f64) -> Result<()> {
    for (label, v) in [("a", a), ("b", b)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::input(
                format!("{name}.{label}"),
                format!("expected a finite positive number, got {v}"),
            ));
        }
    }
    Ok(())
}

fn check_nonnegative(name: &str, a: f64, b: f64) -> Result<()> {
    for (label, v) in [("a", a), ("b", b)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::input(
                format!("{name}.{label}"),
                format!("expected a finite nonnegative number, got {v}"),
            ));
        }
    }
    Ok(())
}

fn check_exponent(p: f64) -> Result<()> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::input("p", format!("exponent must be >= 1, got {p}")));
    }
    Ok(())
}

/// Closed-form and near-equal evaluations, without argument validation.
///
/// Exposed so the two sides of each branch switch can be compared on the band
/// where both are accurate.
pub mod branches {
    use super::sorted;

    /// `ln I(a, b)` for positive, distinct arguments.
    pub fn ln_identric_separated(a: f64, b: f64) -> f64 {
        let (lo, hi) = sorted(a, b);
        let q = (hi - lo) / lo;
        if q <= 1.0 {
            // (hi ln hi - lo ln lo)/(hi - lo) = ln lo + (1 + q) ln(1 + q) / q
            lo.ln() + ((1.0 + q) * q.ln_1p() / q - 1.0)
        } else {
            (hi * hi.ln() - lo * lo.ln()) / (hi - lo) - 1.0
        }
    }

    /// `ln I(a, b)` from the midpoint expansion `ln m - s^2/6`, `s = (b-a)/(2m)`.
    pub fn ln_identric_near(a: f64, b: f64) -> f64 {
        let m = 0.5 * (a + b);
        let s = (b - a) / (2.0 * m);
        m.ln() - s * s / 6.0
    }

    pub fn logarithmic_separated(a: f64, b: f64) -> f64 {
        let (lo, hi) = sorted(a, b);
        let q = (hi - lo) / lo;
        if q <= 1.0 {
            lo * q / q.ln_1p()
        } else {
            (hi - lo) / (hi.ln() - lo.ln())
        }
    }

    /// `L(a, b) ≈ m (1 - s^2/3)`, `s = (b-a)/(2m)`.
    pub fn logarithmic_near(a: f64, b: f64) -> f64 {
        let m = 0.5 * (a + b);
        let s = (b - a) / (2.0 * m);
        m * (1.0 - s * s / 3.0)
    }

    /// `L_p(a, b)^p = A(t^p; a, b)` for nonnegative, distinct arguments.
    pub fn p_logarithmic_pow_separated(a: f64, b: f64, p: f64) -> f64 {
        let (lo, hi) = sorted(a, b);
        if lo == 0.0 {
            return hi.powf(p) / (p + 1.0);
        }
        let q = (hi - lo) / lo;
        if q <= 1.0 {
            lo.powf(p) * ((p + 1.0) * q.ln_1p()).exp_m1() / ((p + 1.0) * q)
        } else {
            let r = lo / hi;
            hi.powf(p) * (1.0 - r.powf(p + 1.0)) / ((p + 1.0) * (1.0 - r))
        }
    }

    /// `A(t^p; a, b) ≈ m^p (1 + p(p-1) s^2 / 6)`.
    pub fn p_logarithmic_pow_near(a: f64, b: f64, p: f64) -> f64 {
        let m = 0.5 * (a + b);
        if m == 0.0 {
            return 0.0;
        }
        let s = (b - a) / (2.0 * m);
        m.powf(p) * (1.0 + p * (p - 1.0) * s * s / 6.0)
    }

    /// `L_p(a, b) ≈ m (1 + (p-1) s^2 / 6)`.
    pub fn p_logarithmic_near(a: f64, b: f64, p: f64) -> f64 {
        let m = 0.5 * (a + b);
        if m == 0.0 {
            return 0.0;
        }
        let s = (b - a) / (2.0 * m);
        m * (1.0 + (p - 1.0) * s * s / 6.0)
    }
}

pub(crate) fn ln_identric_unchecked(a: f64, b: f64) -> f64 {
    if a == b {
        a.ln()
    } else if near_equal(a, b) {
        branches::ln_identric_near(a, b)
    } else {
        branches::ln_identric_separated(a, b)
    }
}

pub(crate) fn logarithmic_unchecked(a: f64, b: f64) -> f64 {
    if a == b {
        return a;
    }
    let (lo, hi) = sorted(a, b);
    let v = if near_equal(a, b) {
        branches::logarithmic_near(a, b)
    } else {
        branches::logarithmic_separated(a, b)
    };
    v.clamp(lo, hi)
}

pub(crate) fn p_logarithmic_pow_unchecked(a: f64, b: f64, p: f64) -> f64 {
    if a == b {
        return a.powf(p);
    }
    let (lo, hi) = sorted(a, b);
    let v = if near_equal(a, b) {
        branches::p_logarithmic_pow_near(a, b, p)
    } else {
        branches::p_logarithmic_pow_separated(a, b, p)
    };
    v.clamp(lo.powf(p), hi.powf(p))
}

/// Natural log of the identric mean, accurate even where `I` itself would
/// overflow.
pub fn ln_identric(a: f64, b: f64) -> Result<f64> {
    check_positive("identric", a, b)?;
    Ok(ln_identric_unchecked(a, b))
}

/// Identric mean `I(a, b) = (1/e) (b^b / a^a)^(1/(b-a))`, with `I(a, a) = a`.
pub fn identric(a: f64, b: f64) -> Result<f64> {
    check_positive("identric", a, b)?;
    if a == b {
        return Ok(a);
    }
    let (lo, hi) = sorted(a, b);
    Ok(ln_identric_unchecked(a, b).exp().clamp(lo, hi))
}

/// Logarithmic mean `L(a, b) = (b - a) / (ln b - ln a)`, with `L(a, a) = a`.
pub fn logarithmic(a: f64, b: f64) -> Result<f64> {
    check_positive("logarithmic", a, b)?;
    Ok(logarithmic_unchecked(a, b))
}

/// `L_p(a, b)^p`, the integral mean of `t^p` over the segment.
pub fn p_logarithmic_pow(a: f64, b: f64, p: f64) -> Result<f64> {
    check_nonnegative("p_logarithmic", a, b)?;
    check_exponent(p)?;
    Ok(p_logarithmic_pow_unchecked(a, b, p))
}

/// p-logarithmic mean `[(b^(p+1) - a^(p+1)) / ((p+1)(b-a))]^(1/p)`, with
/// `L_p(a, a) = a`.
pub fn p_logarithmic(a: f64, b: f64, p: f64) -> Result<f64> {
    check_nonnegative("p_logarithmic", a, b)?;
    check_exponent(p)?;
    if a == b {
        return Ok(a);
    }
    let (lo, hi) = sorted(a, b);
    let v = if near_equal(a, b) {
        branches::p_logarithmic_near(a, b, p)
    } else {
        branches::p_logarithmic_pow_separated(a, b, p).powf(1.0 / p)
    };
    Ok(v.clamp(lo, hi))
}

/// Integral mean `A(f; a, b)`, with `A(f; a, a) = f(a)`.
///
/// Uses the closed form when the catalog entry has one and adaptive
/// quadrature otherwise. Inside the near-equal band returns `f((a+b)/2)`.
pub fn integral_mean(f: &FunctionSpec, a: f64, b: f64) -> Result<f64> {
    f.check_segment(a, b)?;
    if a == b {
        return f.eval(a);
    }
    if near_equal(a, b) {
        return f.eval(0.5 * (a + b));
    }
    match f.closed_integral_mean(a, b) {
        Some(v) => Ok(v),
        None => integral_mean_by_quadrature(f, a, b),
    }
}

/// Integral mean computed by adaptive Simpson regardless of closed forms.
pub fn integral_mean_by_quadrature(f: &FunctionSpec, a: f64, b: f64) -> Result<f64> {
    f.check_segment(a, b)?;
    if a == b {
        return f.eval(a);
    }
    let (lo, hi) = sorted(a, b);
    let integral = Simpson::default().integrate(|x| f.eval(x), lo, hi)?;
    Ok(integral / (hi - lo))
}
