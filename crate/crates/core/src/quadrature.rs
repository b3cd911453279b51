//! Adaptive Simpson quadrature over a finite interval.
//!
//! Each accepted leaf is reported as two Simpson panels. For a convex
//! integrand the Simpson value of a panel, `(2M + T) / 3`, sits between the
//! midpoint estimate `M` and the trapezoid estimate `T`, so the accumulated
//! result is bracketed panel by panel. No Richardson correction is applied to
//! keep that property.

use crate::error::Error;

/// One accepted panel of the adaptive rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
    pub simpson: f64,
    pub midpoint: f64,
    pub trapezoid: f64,
}

/// Adaptive Simpson rule with a combined absolute/relative stopping test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Simpson {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
    /// Levels that are always subdivided before the error test may accept.
    pub min_depth: u32,
}

impl Default for Simpson {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_depth: 40,
            min_depth: 3,
        }
    }
}

struct Segment {
    a: f64,
    m: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

fn simpson(h: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

impl Simpson {
    /// Integrate `f` over `[a, b]`. Reversed limits flip the sign.
    pub fn integrate<F, E>(&self, f: F, a: f64, b: f64) -> Result<f64, E>
    where
        F: FnMut(f64) -> Result<f64, E>,
        E: From<Error>,
    {
        self.run(f, a, b, &mut |_| {})
    }

    /// Like [`Simpson::integrate`], also returning every accepted panel in order.
    pub fn integrate_with_panels<F, E>(&self, f: F, a: f64, b: f64) -> Result<(f64, Vec<Panel>), E>
    where
        F: FnMut(f64) -> Result<f64, E>,
        E: From<Error>,
    {
        let mut panels = Vec::new();
        let value = self.run(f, a, b, &mut |p| panels.push(p))?;
        Ok((value, panels))
    }

    fn run<F, E>(&self, mut f: F, a: f64, b: f64, sink: &mut dyn FnMut(Panel)) -> Result<f64, E>
    where
        F: FnMut(f64) -> Result<f64, E>,
        E: From<Error>,
    {
        if a == b {
            return Ok(0.0);
        }
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::input("quadrature", "limits must be finite").into());
        }
        let m = 0.5 * (a + b);
        let (fa, fm, fb) = (f(a)?, f(m)?, f(b)?);
        let whole = simpson(b - a, fa, fm, fb);
        // Two-panel estimate fixes the relative part of the target.
        let (l, r) = (0.5 * (a + m), 0.5 * (m + b));
        let (fl, fr) = (f(l)?, f(r)?);
        let refined = simpson(m - a, fa, fl, fm) + simpson(b - m, fm, fr, fb);
        let target = self
            .abs_tol
            .max(self.rel_tol * refined.abs().max(whole.abs()));
        let seg = Segment {
            a,
            m,
            b,
            fa,
            fm,
            fb,
            whole,
        };
        self.recurse(&mut f, seg, target, 0, sink)
    }

    fn recurse<F, E>(
        &self,
        f: &mut F,
        seg: Segment,
        tol: f64,
        depth: u32,
        sink: &mut dyn FnMut(Panel),
    ) -> Result<f64, E>
    where
        F: FnMut(f64) -> Result<f64, E>,
        E: From<Error>,
    {
        let Segment {
            a,
            m,
            b,
            fa,
            fm,
            fb,
            whole,
        } = seg;
        let (l, r) = (0.5 * (a + m), 0.5 * (m + b));
        let (fl, fr) = (f(l)?, f(r)?);
        let left = simpson(m - a, fa, fl, fm);
        let right = simpson(b - m, fm, fr, fb);
        let both = left + right;
        let err = (both - whole).abs();

        if depth >= self.min_depth && (err <= 15.0 * tol || !err.is_finite()) {
            if !both.is_finite() {
                return Err(Error::Quadrature { a, b }.into());
            }
            sink(Panel {
                a,
                b: m,
                simpson: left,
                midpoint: (m - a) * fl,
                trapezoid: 0.5 * (m - a) * (fa + fm),
            });
            sink(Panel {
                a: m,
                b,
                simpson: right,
                midpoint: (b - m) * fr,
                trapezoid: 0.5 * (b - m) * (fm + fb),
            });
            return Ok(both);
        }
        if depth >= self.max_depth {
            return Err(Error::Quadrature { a, b }.into());
        }
        let lo = Segment {
            a,
            m: l,
            b: m,
            fa,
            fm: fl,
            fb: fm,
            whole: left,
        };
        let hi = Segment {
            a: m,
            m: r,
            b,
            fa: fm,
            fm: fr,
            fb,
            whole: right,
        };
        let lv = self.recurse(f, lo, 0.5 * tol, depth + 1, sink)?;
        let rv = self.recurse(f, hi, 0.5 * tol, depth + 1, sink)?;
        Ok(lv + rv)
    }
}

/// Integrate an infallible integrand with the default rule.
pub fn integrate<F>(f: F, a: f64, b: f64) -> Result<f64, Error>
where
    F: Fn(f64) -> f64,
{
    Simpson::default().integrate(|x| Ok::<_, Error>(f(x)), a, b)
}
