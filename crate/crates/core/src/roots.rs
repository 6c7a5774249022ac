//! Bracketed scalar root finders.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stop {
    /// Accept `x` once `|f(x)| <= residual`.
    pub residual: f64,
    /// Accept once the bracket is narrower than this.
    pub width: f64,
    pub max_iter: usize,
}

/// Brent's method on a sign-changing bracket `[a, b]` with `f(a) = fa`, `f(b) = fb`.
///
/// Falls back to bisection whenever the interpolation step is not contracting,
/// so the bracket shrinks by at least half every two iterations.
pub fn brent<F>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    stop: Stop,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Domain(format!(
            "root not bracketed: f({a:e}) = {fa:e}, f({b:e}) = {fb:e}"
        )));
    }
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut bisected = true;
    for _ in 0..stop.max_iter {
        if fb.abs() <= stop.residual || (b - a).abs() <= stop.width {
            return Ok(b);
        }
        let mut s = if fa != fc && fb != fc {
            // inverse quadratic interpolation
            a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let lo = (3.0 * a + b) / 4.0;
        let between = (s > lo.min(b)) && (s < lo.max(b));
        let tiny = 2.0 * f64::EPSILON * b.abs();
        let slow = if bisected {
            (s - b).abs() >= 0.5 * (b - c).abs() || (b - c).abs() < tiny
        } else {
            (s - b).abs() >= 0.5 * (c - d).abs() || (c - d).abs() < tiny
        };
        if !between || slow || !s.is_finite() {
            s = 0.5 * (a + b);
            bisected = true;
        } else {
            bisected = false;
        }
        if s == a || s == b {
            // adjacent floats
            return Ok(if fa.abs() < fb.abs() { a } else { b });
        }
        let fs = f(s)?;
        d = c;
        c = b;
        fc = fb;
        if fa.signum() != fs.signum() {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    if fb.abs() <= stop.residual || (b - a).abs() <= stop.width {
        return Ok(b);
    }
    Err(Error::NoConvergence {
        what: "bracketed root search",
        iterations: stop.max_iter,
        detail: format!("bracket [{a:e}, {b:e}], residual {fb:e}"),
    })
}

/// Newton iteration for an increasing `f` with derivative, safeguarded by a bracket
/// `[lo, hi]` with `f(lo) < 0 < f(hi)`. `f` returns `(value, derivative)`.
pub fn safeguarded_newton<F>(mut f: F, mut lo: f64, mut hi: f64, x0: f64, stop: Stop) -> Result<f64>
where
    F: FnMut(f64) -> (f64, f64),
{
    let mut x = x0.clamp(lo, hi);
    for _ in 0..stop.max_iter {
        let (fx, dfx) = f(x);
        if !fx.is_finite() {
            return Err(Error::Domain(format!("non-finite residual at {x:e}")));
        }
        if fx.abs() <= stop.residual {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= stop.width {
            return Ok(x);
        }
        let newton = x - fx / dfx;
        let next = if dfx > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if next == x {
            return Ok(x);
        }
        x = next;
    }
    Err(Error::NoConvergence {
        what: "safeguarded Newton",
        iterations: stop.max_iter,
        detail: format!("bracket [{lo:e}, {hi:e}]"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const STOP: Stop = Stop {
        residual: 1e-14,
        width: 0.0,
        max_iter: 200,
    };

    #[test]
    fn brent_finds_cubic_root() {
        let f = |x: f64| Ok(x * x * x - 2.0);
        let r = brent(f, 0.0, 3.0, -2.0, 25.0, STOP).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn brent_rejects_unbracketed() {
        assert!(brent(|x| Ok(x * x + 1.0), -1.0, 1.0, 2.0, 2.0, STOP).is_err());
    }

    #[test]
    fn brent_handles_step_function_by_bisection() {
        let f = |x: f64| Ok(if x < 0.3 { -1.0 } else { 1.0 });
        let r = brent(f, 0.0, 1.0, -1.0, 1.0, STOP).unwrap();
        assert!((r - 0.3).abs() < 1e-15);
    }

    #[test]
    fn newton_on_exponential() {
        let f = |x: f64| (x.exp() - 5.0, x.exp());
        let r = safeguarded_newton(f, 0.0, 10.0, 9.0, STOP).unwrap();
        assert!((r - 5f64.ln()).abs() < 1e-14);
    }
}
