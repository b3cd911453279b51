//! Golden-section search for a minimizer of a unimodal function on a closed
//! interval.

const INV_PHI: f64 = 0.618_033_988_749_894_9; // (sqrt(5) - 1) / 2

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    /// Best abscissa seen, including both interval endpoints.
    pub x: f64,
    pub value: f64,
    /// Final bracket; its width is at most the requested tolerance.
    pub bracket: (f64, f64),
    pub evaluations: usize,
}

/// Minimize `f` over `[lo, hi]` until the bracket is no wider than `tol`.
///
/// Ties keep the left sub-interval, so on a plateau the leftmost minimizer
/// bracket is returned. The endpoints are always evaluated and win ties
/// against interior points (up to a few ulps of rounding), which lets monotone
/// functions report an exact endpoint.
pub fn golden_section<F, E>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<Minimum, E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    assert!(lo <= hi, "empty interval");
    assert!(tol > 0.0, "tolerance must be positive");

    let f_lo = f(lo)?;
    let f_hi = f(hi)?;
    let mut evaluations = 2;

    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    evaluations += 2;

    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
        evaluations += 1;
    }

    let (mut x, mut value) = if fc <= fd { (c, fc) } else { (d, fd) };
    // Endpoints first in the tie order: lo, then interior, then hi. Values
    // within a few ulps count as ties.
    let ulps = 4.0 * f64::EPSILON * value.abs();
    if f_lo <= value + ulps {
        x = lo;
        value = f_lo;
    } else if f_hi < value - ulps {
        x = hi;
        value = f_hi;
    }
    Ok(Minimum {
        x,
        value,
        bracket: (a, b),
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Minimum {
        golden_section(|x| Ok::<_, ()>(f(x)), lo, hi, tol).unwrap()
    }

    #[test]
    fn interior_quadratic() {
        let m = run(|x| (x - 0.3).powi(2) + 1.0, 0.0, 1.0, 1e-10);
        // f is flat to machine precision within ~1e-8 of the minimizer.
        assert!((m.x - 0.3).abs() < 1e-7);
        assert!((m.value - 1.0).abs() < 1e-15);
        assert!(m.bracket.1 - m.bracket.0 <= 1e-10);
    }

    #[test]
    fn increasing_function_reports_left_endpoint() {
        let m = run(|t| 0.25 + 0.0625 * t * t, 0.0, 1.0, 1e-8);
        assert_eq!(m.x, 0.0);
        assert_eq!(m.value, 0.25);
    }

    #[test]
    fn decreasing_function_reports_right_endpoint() {
        let m = run(|t| -t, 0.0, 1.0, 1e-8);
        assert_eq!(m.x, 1.0);
        assert_eq!(m.value, -1.0);
    }

    #[test]
    fn plateau_prefers_left() {
        let m = run(
            |t| if t < 0.6 { 2.0 } else { 2.0 + (t - 0.6) },
            0.0,
            1.0,
            1e-6,
        );
        assert_eq!(m.x, 0.0);
        assert!(m.bracket.0 < 0.1);
    }

    #[test]
    fn degenerate_interval() {
        let m = run(|t| t * t, 0.5, 0.5, 1e-6);
        assert_eq!(m.x, 0.5);
    }
}
