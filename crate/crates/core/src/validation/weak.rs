//! Distributional residual of a self-similar Riemann solution.
//!
//! For a test function `phi` with compact support in `t > 0`,
//!
//! ```text
//! R[phi] = int int V phi_t + F(V) phi_x dx dt
//!        = int dxi  int t (V(xi) phi_t(t, xi t) + F(V(xi)) phi_x(t, xi t)) dt
//! ```
//!
//! The inner integral is a polynomial in `t` on the support and is integrated
//! exactly. The outer integral is split at every wave ray so that no
//! quadrature panel contains a discontinuity in its interior.

use crate::error::{Error, Result};
use crate::model::{self, ConservedState};
use crate::quadrature::{self, Tolerance};
use crate::riemann::RiemannSolution;

const BUMP_POWER: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceTimeBox {
    pub t_min: f64,
    pub t_max: f64,
    pub x_min: f64,
    pub x_max: f64,
}

impl SpaceTimeBox {
    pub fn new(t_min: f64, t_max: f64, x_min: f64, x_max: f64) -> Result<Self> {
        if !(t_min > 0.0
            && t_max > t_min
            && x_max > x_min
            && x_max.is_finite()
            && x_min.is_finite())
        {
            return Err(Error::Domain(format!(
                "space-time box [{t_min}, {t_max}] x [{x_min}, {x_max}] must lie in t > 0"
            )));
        }
        Ok(Self {
            t_min,
            t_max,
            x_min,
            x_max,
        })
    }

    /// Box over `[t_min, t_max]` wide enough to hold every wave of `sol`.
    pub fn containing(sol: &RiemannSolution, t_min: f64, t_max: f64) -> Result<Self> {
        let rays = sol.rays();
        let lo = rays.iter().copied().fold(0.0, f64::min);
        let hi = rays.iter().copied().fold(0.0, f64::max);
        let x_lo = (lo * t_min).min(lo * t_max);
        let x_hi = (hi * t_min).max(hi * t_max);
        let margin = 0.25 * (x_hi - x_lo) + 0.1 * t_max * (1.0 + sol.u_star.abs());
        Self::new(t_min, t_max, x_lo - margin, x_hi + margin)
    }
}

/// `phi(t, x) = b((t - tc)/rt) b((x - xc)/rx)` with `b(s) = (1 - s^2)^4` on `|s| < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub tc: f64,
    pub rt: f64,
    pub xc: f64,
    pub rx: f64,
}

fn b(s: f64) -> f64 {
    (1.0 - s * s).max(0.0).powi(BUMP_POWER)
}

fn db(s: f64) -> f64 {
    let w = (1.0 - s * s).max(0.0);
    -2.0 * BUMP_POWER as f64 * s * w.powi(BUMP_POWER - 1)
}

impl Bump {
    pub fn dt(&self, t: f64, x: f64) -> f64 {
        db((t - self.tc) / self.rt) / self.rt * b((x - self.xc) / self.rx)
    }

    pub fn dx(&self, t: f64, x: f64) -> f64 {
        b((t - self.tc) / self.rt) * db((x - self.xc) / self.rx) / self.rx
    }

    /// Support in `t` along the ray `x = xi t`.
    fn t_support(&self, xi: f64) -> Option<(f64, f64)> {
        let (mut a, mut c) = (self.tc - self.rt, self.tc + self.rt);
        let (x0, x1) = (self.xc - self.rx, self.xc + self.rx);
        if xi > 0.0 {
            a = a.max(x0 / xi);
            c = c.min(x1 / xi);
        } else if xi < 0.0 {
            a = a.max(x1 / xi);
            c = c.min(x0 / xi);
        } else if !(x0 < 0.0 && x1 > 0.0) {
            return None;
        }
        (c > a).then_some((a, c))
    }

    /// Range of `x/t` over the support.
    fn xi_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for t in [self.tc - self.rt, self.tc + self.rt] {
            for x in [self.xc - self.rx, self.xc + self.rx] {
                lo = lo.min(x / t);
                hi = hi.max(x / t);
            }
        }
        (lo, hi)
    }
}

/// `n` bumps inside `bx`, placed by an additive recurrence (deterministic).
pub fn test_functions(bx: &SpaceTimeBox, n: usize) -> Vec<Bump> {
    // powers of the inverse plastic-like root of x^5 = x + 1
    let r: f64 = 1.167_303_978_261_418_7;
    let alpha = [1.0 / r, 1.0 / (r * r), 1.0 / r.powi(3), 1.0 / r.powi(4)];
    let half_t = 0.5 * (bx.t_max - bx.t_min);
    let half_x = 0.5 * (bx.x_max - bx.x_min);
    (0..n)
        .map(|j| {
            let q: Vec<f64> = alpha
                .iter()
                .map(|a| (0.5 + a * (j + 1) as f64).fract())
                .collect();
            let rt = (0.3 + 0.6 * q[2]) * half_t;
            let rx = (0.3 + 0.6 * q[3]) * half_x;
            Bump {
                tc: bx.t_min + rt + q[0] * (2.0 * (half_t - rt)),
                rt,
                xc: bx.x_min + rx + q[1] * (2.0 * (half_x - rx)),
                rx,
            }
        })
        .collect()
}

/// Largest normalized weak-form residual over `n_test` bumps in `bx`.
///
/// Each component residual is divided by `int int |V_k||phi_t| + |F_k||phi_x|`.
pub fn weak_form_residual(sol: &RiemannSolution, bx: &SpaceTimeBox, n_test: usize) -> Result<f64> {
    let bumps = test_functions(bx, n_test);
    weak_form_residual_with(sol, &bumps)
}

pub fn weak_form_residual_with(sol: &RiemannSolution, bumps: &[Bump]) -> Result<f64> {
    if bumps.is_empty() {
        return Ok(0.0);
    }
    let p = sol.params;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut breaks = Vec::new();
    for bump in bumps {
        let (a, c) = bump.xi_range();
        lo = lo.min(a);
        hi = hi.max(c);
        for t in [bump.tc - bump.rt, bump.tc + bump.rt] {
            for x in [bump.xc - bump.rx, bump.xc + bump.rx] {
                breaks.push(x / t);
            }
        }
    }
    breaks.extend(sol.rays());
    breaks.push(lo);
    breaks.push(hi);
    breaks.retain(|x| *x >= lo && *x <= hi);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let mut failure: Option<Error> = None;
    let integrand = |xi: f64, out: &mut [f64]| {
        let s = match sol.sample(xi) {
            Ok(s) => s,
            Err(e) => {
                failure.get_or_insert(e);
                out.fill(f64::NAN);
                return;
            }
        };
        let v = ConservedState::from_primitive(&s, &p).0;
        let f = model::flux(&s, &p);
        for (j, bump) in bumps.iter().enumerate() {
            let o = &mut out[8 * j..8 * j + 8];
            let Some((ta, tb)) = bump.t_support(xi) else {
                o.fill(0.0);
                continue;
            };
            let a = quadrature::kronrod15(|t| t * bump.dt(t, xi * t), ta, tb);
            let c = quadrature::kronrod15(|t| t * bump.dx(t, xi * t), ta, tb);
            let a_abs = quadrature::kronrod15(|t| t * bump.dt(t, xi * t).abs(), ta, tb);
            let c_abs = quadrature::kronrod15(|t| t * bump.dx(t, xi * t).abs(), ta, tb);
            for k in 0..4 {
                o[k] = v[k] * a + f[k] * c;
                o[4 + k] = v[k].abs() * a_abs + f[k].abs() * c_abs;
            }
        }
    };
    let tol = Tolerance {
        relative: 1e-11,
        absolute: 1e-300,
        max_intervals: 4000,
    };
    let totals = quadrature::integrate_vec(integrand, 8 * bumps.len(), &breaks, tol);
    if let Some(e) = failure {
        return Err(e);
    }
    let totals = totals?;
    let mut worst: f64 = 0.0;
    for j in 0..bumps.len() {
        for k in 0..4 {
            let norm = totals[8 * j + 4 + k];
            if norm > 0.0 {
                worst = worst.max(totals[8 * j + k].abs() / norm);
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Params, PrimitiveState};
    use crate::riemann::solve;

    fn st(h: f64, u: f64, sxx: f64, szz: f64) -> PrimitiveState {
        PrimitiveState::new(h, u, sxx, szz).unwrap()
    }

    #[test]
    fn constant_solution_has_no_residual() {
        let p = Params::new(9.81, 1.0, 0.25).unwrap();
        let s = st(1.0, 0.5, 1.0, 1.0);
        let sol = solve(s, s, &p).unwrap();
        let bx = SpaceTimeBox::new(0.5, 1.5, -3.0, 3.0).unwrap();
        assert!(weak_form_residual(&sol, &bx, 8).unwrap() < 1e-12);
    }

    #[test]
    fn dam_break_satisfies_the_weak_form() {
        let p = Params::new(9.81, 1.0, 0.25).unwrap();
        let sol = solve(st(2.0, 0.0, 1.0, 1.0), st(1.0, 0.0, 1.0, 1.0), &p).unwrap();
        let bx = SpaceTimeBox::containing(&sol, 0.5, 1.5).unwrap();
        let r = weak_form_residual(&sol, &bx, 10).unwrap();
        assert!(r < 1e-8, "{r}");
    }

    #[test]
    fn misplaced_shock_is_detected() {
        let p = Params::new(9.81, 1.0, 0.25).unwrap();
        let mut sol = solve(st(1.0, 2.0, 1.0, 1.0), st(1.0, -2.0, 1.0, 1.0), &p).unwrap();
        if let crate::riemann::WaveKind::Shock { speed } = &mut sol.waves[2].kind {
            *speed += 0.1;
        } else {
            panic!("expected a plus shock");
        }
        let bx = SpaceTimeBox::containing(&sol, 0.5, 1.5).unwrap();
        assert!(weak_form_residual(&sol, &bx, 10).unwrap() > 1e-3);
    }

    #[test]
    fn bumps_fit_in_the_box() {
        let bx = SpaceTimeBox::new(0.5, 1.5, -2.0, 4.0).unwrap();
        for bump in test_functions(&bx, 50) {
            assert!(bump.tc - bump.rt >= bx.t_min - 1e-12);
            assert!(bump.tc + bump.rt <= bx.t_max + 1e-12);
            assert!(bump.xc - bump.rx >= bx.x_min - 1e-12);
            assert!(bump.xc + bump.rx <= bx.x_max + 1e-12);
        }
    }
}
