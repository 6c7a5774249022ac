//! Exact solution of the Riemann problem.
//!
//! The solution has at most three waves: a minus wave (shock or fan) from
//! the left data, a contact travelling with the flow, and a plus wave into the
//! right data. The two star states between them share velocity and total
//! pressure while keeping the stretch invariants of their outer data. The
//! star pressure is the unique root of the increasing function
//! `u3(P) - u2(P)`, where `u2` runs along the minus curve of the left state and
//! `u3` along the plus curve of the right state.

use crate::error::{Error, Result};
use crate::model::{self, ConservedState, Params, PrimitiveState, Vector4};
use crate::roots::{self, Stop};
use crate::waves::{self, CurveBranch, CurvePoint, CurveSide, WaveFamily, TIE_BAND, VACUUM_FLOOR};

const MAX_ROOT_ITER: usize = 500;
/// Convergence: `|u3 - u2| <= ROOT_TOL * (1 + |u_l| + |u_r|)`.
pub const ROOT_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WaveField {
    Minus,
    Zero,
    Plus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WaveKind {
    Shock { speed: f64 },
    Contact { speed: f64 },
    Fan { head: f64, tail: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wave {
    pub kind: WaveKind,
    pub field: WaveField,
    pub left: PrimitiveState,
    pub right: PrimitiveState,
    /// Zero-amplitude wave; its speed is the characteristic speed of its state.
    pub trivial: bool,
}

impl Wave {
    /// Slowest and fastest rays of the wave.
    pub fn speeds(&self) -> (f64, f64) {
        match self.kind {
            WaveKind::Shock { speed } | WaveKind::Contact { speed } => (speed, speed),
            WaveKind::Fan { head, tail } => (head, tail),
        }
    }

    pub fn is_discontinuity(&self) -> bool {
        !matches!(self.kind, WaveKind::Fan { .. })
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            WaveKind::Shock { .. } => "shock",
            WaveKind::Contact { .. } => "contact",
            WaveKind::Fan { .. } => "rarefaction",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannSolution {
    pub params: Params,
    pub left: PrimitiveState,
    pub right: PrimitiveState,
    pub star_left: PrimitiveState,
    pub star_right: PrimitiveState,
    pub p_star: f64,
    pub u_star: f64,
    /// Minus wave, contact, plus wave.
    pub waves: [Wave; 3],
    /// `|u3(P*) - u2(P*)|` left at the accepted root.
    pub velocity_mismatch: f64,
    /// Gap evaluations spent (bracketing plus refinement).
    pub iterations: usize,
    left_curve: CurveSide,
    right_curve: CurveSide,
}

/// `u3(P) - u2(P)`; increasing in `P`.
pub fn velocity_gap(pressure: f64, left: &CurveSide, right: &CurveSide, p: &Params) -> Result<f64> {
    let u2 = waves::wave_curve_u(pressure, left, p)?.u;
    let u3 = waves::wave_curve_u(pressure, right, p)?.u;
    Ok(u3 - u2)
}

fn vacuum(pressure_floor: f64, detail: String) -> Error {
    Error::Vacuum {
        pressure_floor,
        detail,
    }
}

/// Evaluate the gap, mapping a depth below the vacuum floor to a vacuum error.
fn gap_or_vacuum(pressure: f64, l: &CurveSide, r: &CurveSide, p: &Params) -> Result<f64> {
    match velocity_gap(pressure, l, r, p) {
        Err(Error::VacuumProximity { h, floor }) => Err(vacuum(
            pressure,
            format!("star depth {h:e} falls below the vacuum floor {floor:e}"),
        )),
        other => other,
    }
}

struct Bracket {
    lo: f64,
    hi: f64,
    f_lo: f64,
    f_hi: f64,
    evaluations: usize,
}

fn bracket_root(l: &CurveSide, r: &CurveSide, p: &Params) -> Result<Bracket> {
    let (p_min, p_max) = if l.pressure <= r.pressure {
        (l.pressure, r.pressure)
    } else {
        (r.pressure, l.pressure)
    };
    let floor = match (
        waves::pressure_floor(l.inv, p),
        waves::pressure_floor(r.inv, p),
    ) {
        (Some(a), Some(b)) => a.max(b),
        _ => f64::NEG_INFINITY,
    };
    // Pressures probed at geometrically scaled outer depths; the max over both
    // sides stays inside the attainable pressure range of each side.
    let probe = |scale: f64| {
        waves::p_of_h(l.anchor.h * scale, l.inv, p).max(waves::p_of_h(r.anchor.h * scale, r.inv, p))
    };
    let mut evaluations = 1;
    let f_max = gap_or_vacuum(p_max, l, r, p)?;
    if f_max <= 0.0 {
        let (mut lo, mut f_lo) = (p_max, f_max);
        if f_lo == 0.0 {
            return Ok(Bracket {
                lo,
                hi: lo,
                f_lo,
                f_hi: f_lo,
                evaluations,
            });
        }
        let mut k = 1;
        while k <= 1024 {
            let hi = probe(2f64.powi(k));
            k *= 2;
            if !hi.is_finite() {
                break;
            }
            if !(hi > lo) {
                continue;
            }
            evaluations += 1;
            let f_hi = gap_or_vacuum(hi, l, r, p)?;
            if f_hi >= 0.0 {
                return Ok(Bracket {
                    lo,
                    hi,
                    f_lo,
                    f_hi,
                    evaluations,
                });
            }
            lo = hi;
            f_lo = f_hi;
        }
        return Err(Error::NoConvergence {
            what: "star-pressure bracket (upwards)",
            iterations: evaluations,
            detail: format!("gap {f_lo:e} still negative at P = {lo:e}"),
        });
    }
    let (mut hi, mut f_hi) = (p_max, f_max);
    if p_min < p_max && p_min > floor {
        evaluations += 1;
        let f_min = gap_or_vacuum(p_min, l, r, p)?;
        if f_min <= 0.0 {
            return Ok(Bracket {
                lo: p_min,
                hi,
                f_lo: f_min,
                f_hi,
                evaluations,
            });
        }
        hi = p_min;
        f_hi = f_min;
    }
    let mut k = 1;
    loop {
        let mut scale = 2f64.powi(-k);
        let last = scale <= VACUUM_FLOOR;
        if last {
            scale = VACUUM_FLOOR;
        }
        k *= 2;
        let lo = probe(scale);
        if lo <= floor {
            return Err(vacuum(
                floor,
                format!("velocity gap {f_hi:e} stays positive down to the pressure floor"),
            ));
        }
        if lo < hi {
            evaluations += 1;
            let f_lo = gap_or_vacuum(lo, l, r, p)?;
            if f_lo <= 0.0 {
                return Ok(Bracket {
                    lo,
                    hi,
                    f_lo,
                    f_hi,
                    evaluations,
                });
            }
            hi = lo;
            f_hi = f_lo;
        }
        if last {
            return Err(vacuum(
                hi,
                format!("velocity gap {f_hi:e} stays positive down to the vacuum floor"),
            ));
        }
    }
}

/// Star points on both curves, refined in the log-depth of the steeper side
/// when the pressure resolution alone cannot meet `tol`.
fn refine_in_depth(
    p_star: f64,
    lc: &CurveSide,
    rc: &CurveSide,
    p: &Params,
    tol: f64,
    evaluations: &mut usize,
) -> Result<(f64, CurvePoint, CurvePoint)> {
    let pt2 = waves::wave_curve_u(p_star, lc, p)?;
    let pt3 = waves::wave_curve_u(p_star, rc, p)?;
    if (pt3.u - pt2.u).abs() <= tol {
        return Ok((p_star, pt2, pt3));
    }
    // du/dP = 1/(h c) along either curve
    let steep = |side: &CurveSide, pt: &CurvePoint| -> f64 {
        let c = model::celerity(&side.state_at(pt.h, pt.u, p), p).unwrap_or(f64::INFINITY);
        pt.h * c
    };
    let left_steeper = steep(lc, &pt2) <= steep(rc, &pt3);
    let (s, o) = if left_steeper { (lc, rc) } else { (rc, lc) };
    let eval = |t: f64| -> Result<(f64, f64, CurvePoint, CurvePoint)> {
        let h = t.exp();
        let pt_s = waves::curve_point_at_depth(h, s, p)?;
        let pressure = waves::p_of_h(pt_s.h, s.inv, p);
        let pt_o = waves::wave_curve_u(pressure, o, p)?;
        let gap = if left_steeper {
            pt_o.u - pt_s.u
        } else {
            pt_s.u - pt_o.u
        };
        Ok((gap, pressure, pt_s, pt_o))
    };
    let t0 = (if left_steeper { pt2.h } else { pt3.h }).ln();
    let g0 = eval(t0)?.0;
    *evaluations += 1;
    let dir = if g0 > 0.0 { -1.0 } else { 1.0 };
    let mut step = 1e-12 * (1.0 + t0.abs());
    let mut far = t0;
    let mut g_far = g0;
    for _ in 0..200 {
        far = t0 + dir * step;
        g_far = eval(far)?.0;
        *evaluations += 1;
        if g_far.signum() != g0.signum() || g_far == 0.0 {
            break;
        }
        step *= 4.0;
    }
    let (a, b, fa, fb) = if dir > 0.0 {
        (t0, far, g0, g_far)
    } else {
        (far, t0, g_far, g0)
    };
    let t = roots::brent(
        |t| {
            *evaluations += 1;
            Ok(eval(t)?.0)
        },
        a,
        b,
        fa,
        fb,
        Stop {
            residual: tol,
            width: 4.0 * f64::EPSILON * (1.0 + t0.abs()),
            max_iter: MAX_ROOT_ITER,
        },
    )?;
    let (_, pressure, pt_s, pt_o) = eval(t)?;
    Ok(if left_steeper {
        (pressure, pt_s, pt_o)
    } else {
        (pressure, pt_o, pt_s)
    })
}

fn star_state(side: &CurveSide, pt: &CurvePoint, u_star: f64, p: &Params) -> PrimitiveState {
    match pt.branch {
        CurveBranch::Trivial => PrimitiveState {
            u: u_star,
            ..side.anchor
        },
        _ => side.state_at(pt.h, u_star, p),
    }
}

fn outer_wave(side: &CurveSide, pt: &CurvePoint, star: PrimitiveState, p: &Params) -> Result<Wave> {
    let (left, right, field) = match side.family {
        WaveFamily::Minus => (side.anchor, star, WaveField::Minus),
        WaveFamily::Plus => (star, side.anchor, WaveField::Plus),
    };
    let lambda = |s: &PrimitiveState| -> Result<f64> {
        Ok(s.u + side.family.sign() * model::celerity(s, p)?)
    };
    let (kind, trivial) = match pt.branch {
        CurveBranch::Trivial => (
            WaveKind::Shock {
                speed: lambda(&side.anchor)?,
            },
            true,
        ),
        CurveBranch::Shock => (
            WaveKind::Shock {
                speed: waves::shock_speed(&left, &right, p)?,
            },
            false,
        ),
        CurveBranch::Rarefaction => (
            WaveKind::Fan {
                head: lambda(&left)?,
                tail: lambda(&right)?,
            },
            false,
        ),
    };
    Ok(Wave {
        kind,
        field,
        left,
        right,
        trivial,
    })
}

fn same_contact_side(a: &PrimitiveState, b: &PrimitiveState) -> bool {
    let close = |x: f64, y: f64| (x - y).abs() <= TIE_BAND * x.abs().max(y.abs());
    close(a.h, b.h) && close(a.sxx, b.sxx) && close(a.szz, b.szz)
}

/// Solve the Riemann problem with data `left | right`.
pub fn solve(left: PrimitiveState, right: PrimitiveState, p: &Params) -> Result<RiemannSolution> {
    p.validate()?;
    let lc = CurveSide::left(left, p)?;
    let rc = CurveSide::right(right, p)?;

    if p.elastic_modulus == 0.0 {
        let gap = right.u - left.u;
        let threshold = 2.0 * (p.g * left.h).sqrt() + 2.0 * (p.g * right.h).sqrt();
        if gap >= threshold {
            return Err(Error::SaintVenantVacuum { gap, threshold });
        }
    }

    let br = bracket_root(&lc, &rc, p)?;
    let tol = ROOT_TOL * (1.0 + left.u.abs() + right.u.abs());
    let mut evaluations = br.evaluations;
    let p_star = if br.lo == br.hi {
        br.lo
    } else {
        let width = 4.0 * f64::EPSILON * br.lo.abs().max(br.hi.abs());
        roots::brent(
            |pr| {
                evaluations += 1;
                gap_or_vacuum(pr, &lc, &rc, p)
            },
            br.lo,
            br.hi,
            br.f_lo,
            br.f_hi,
            Stop {
                residual: tol,
                width,
                max_iter: MAX_ROOT_ITER,
            },
        )
        .map_err(|e| match e {
            Error::NoConvergence {
                iterations, detail, ..
            } => Error::NoConvergence {
                what: "star-pressure root",
                iterations,
                detail: format!("{detail}; data {left} | {right}"),
            },
            other => other,
        })?
    };

    let (p_star, pt2, pt3) = match refine_in_depth(p_star, &lc, &rc, p, tol, &mut evaluations) {
        Err(Error::VacuumProximity { h, floor }) => Err(vacuum(
            p_star,
            format!("star depth {h:e} falls below the vacuum floor {floor:e}"),
        )),
        other => other,
    }?;
    let u_star = 0.5 * (pt2.u + pt3.u);
    let star_left = star_state(&lc, &pt2, u_star, p);
    let star_right = star_state(&rc, &pt3, u_star, p);

    let minus = outer_wave(&lc, &pt2, star_left, p)?;
    let plus = outer_wave(&rc, &pt3, star_right, p)?;
    let contact = Wave {
        kind: WaveKind::Contact { speed: u_star },
        field: WaveField::Zero,
        left: star_left,
        right: star_right,
        trivial: same_contact_side(&star_left, &star_right),
    };

    Ok(RiemannSolution {
        params: *p,
        left,
        right,
        star_left,
        star_right,
        p_star,
        u_star,
        waves: [minus, contact, plus],
        velocity_mismatch: (pt3.u - pt2.u).abs(),
        iterations: evaluations,
        left_curve: lc,
        right_curve: rc,
    })
}

/// Godunov flux between two cell states; equal states skip the solve.
pub fn godunov_flux(left: &PrimitiveState, right: &PrimitiveState, p: &Params) -> Result<Vector4> {
    if left == right {
        return Ok(model::flux(left, p));
    }
    solve(*left, *right, p)?.interface_flux()
}

impl RiemannSolution {
    pub fn minus_wave(&self) -> &Wave {
        &self.waves[0]
    }

    pub fn contact(&self) -> &Wave {
        &self.waves[1]
    }

    pub fn plus_wave(&self) -> &Wave {
        &self.waves[2]
    }

    /// Rays of all nontrivial discontinuities and fan edges, sorted.
    pub fn rays(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(5);
        for w in &self.waves {
            if w.trivial {
                continue;
            }
            let (a, b) = w.speeds();
            out.push(a);
            if b != a {
                out.push(b);
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// Fan state at `xi` inside the outer wave of `side`.
    fn fan_state(
        &self,
        xi: f64,
        side: &CurveSide,
        star: &PrimitiveState,
    ) -> Result<PrimitiveState> {
        let p = &self.params;
        let h = waves::rarefaction_h_at_xi_above(xi, side, p, Some(star.h))?;
        let u = waves::rarefaction_velocity(h, side, p)?;
        Ok(side.state_at(h, u, p))
    }

    /// Solution state at `xi = x / t`; on a discontinuity ray the right limit.
    pub fn sample(&self, xi: f64) -> Result<PrimitiveState> {
        let [minus, _, plus] = &self.waves;
        match minus.kind {
            WaveKind::Shock { speed } if xi < speed => return Ok(self.left),
            WaveKind::Fan { head, .. } if xi < head => return Ok(self.left),
            WaveKind::Fan { tail, .. } if xi < tail => {
                return self.fan_state(xi, &self.left_curve, &self.star_left)
            }
            _ => {}
        }
        if xi < self.u_star {
            return Ok(self.star_left);
        }
        match plus.kind {
            WaveKind::Shock { speed } if xi < speed => Ok(self.star_right),
            WaveKind::Shock { .. } => Ok(self.right),
            WaveKind::Fan { head, .. } if xi < head => Ok(self.star_right),
            WaveKind::Fan { tail, .. } if xi < tail => {
                self.fan_state(xi, &self.right_curve, &self.star_right)
            }
            WaveKind::Fan { .. } => Ok(self.right),
            WaveKind::Contact { .. } => unreachable!("plus wave is never a contact"),
        }
    }

    /// Godunov flux: the conservative flux at `xi = 0`.
    pub fn interface_flux(&self) -> Result<Vector4> {
        Ok(model::flux(&self.sample(0.0)?, &self.params))
    }

    pub fn diagnostics(&self) -> Diagnostics {
        let p = &self.params;
        let mut discontinuities = Vec::with_capacity(3);
        for w in &self.waves {
            let speed = match w.kind {
                WaveKind::Shock { speed } | WaveKind::Contact { speed } => speed,
                WaveKind::Fan { .. } => continue,
            };
            discontinuities.push(jump_report(w.field, speed, &w.left, &w.right, w.trivial, p));
        }
        Diagnostics { discontinuities }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JumpReport {
    pub field: WaveField,
    pub speed: f64,
    pub trivial: bool,
    /// `xi (V_r - V_l) - (F_r - F_l)`, per conserved component.
    pub rh_residual: Vector4,
    /// Largest component of the residual relative to its magnitude scale.
    pub rh_relative: f64,
    /// Entropy dissipation `-xi (F_r - F_l) + q_r - q_l`; admissible when `<= 0`.
    pub entropy: f64,
    pub entropy_scale: f64,
    /// `|h_r - h_l| / min(h_l, h_r)`.
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub discontinuities: Vec<JumpReport>,
}

/// Jump conditions and entropy production across a discontinuity at `speed`.
pub fn jump_report(
    field: WaveField,
    speed: f64,
    left: &PrimitiveState,
    right: &PrimitiveState,
    trivial: bool,
    p: &Params,
) -> JumpReport {
    let vl = ConservedState::from_primitive(left, p).0;
    let vr = ConservedState::from_primitive(right, p).0;
    let fl = model::flux(left, p);
    let fr = model::flux(right, p);
    let mut rh_residual = [0.0; 4];
    let mut rh_relative: f64 = 0.0;
    for k in 0..4 {
        rh_residual[k] = speed * (vr[k] - vl[k]) - (fr[k] - fl[k]);
        let scale = speed.abs() * (vr[k].abs() + vl[k].abs()) + fr[k].abs() + fl[k].abs();
        if scale > 0.0 {
            rh_relative = rh_relative.max(rh_residual[k].abs() / scale);
        }
    }
    let el = model::free_energy(left, p);
    let er = model::free_energy(right, p);
    let ql = model::entropy_flux(left, p);
    let qr = model::entropy_flux(right, p);
    JumpReport {
        field,
        speed,
        trivial,
        rh_residual,
        rh_relative,
        entropy: -speed * (er - el) + qr - ql,
        entropy_scale: speed.abs() * (er.abs() + el.abs()) + qr.abs() + ql.abs(),
        amplitude: (right.h - left.h).abs() / left.h.min(right.h),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const G: f64 = 9.81;

    fn st(h: f64, u: f64, sxx: f64, szz: f64) -> PrimitiveState {
        PrimitiveState::new(h, u, sxx, szz).unwrap()
    }

    #[test]
    fn equal_states_give_trivial_waves() {
        let p = Params::new(G, 1.0, 0.25).unwrap();
        let s = st(1.3, 0.7, 2.0, 0.4);
        let sol = solve(s, s, &p).unwrap();
        assert!(sol.waves.iter().all(|w| w.trivial));
        assert_eq!(sol.star_left, s);
        assert_eq!(sol.star_right, s);
        for xi in [-10.0, 0.0, 0.7, 10.0] {
            assert_eq!(sol.sample(xi).unwrap(), s);
        }
    }

    #[test]
    fn mirror_data_has_zero_star_velocity() {
        let p = Params::new(G, 2.0, 0.1).unwrap();
        for a in [-3.0, -0.5, 0.5, 3.0] {
            let sol = solve(st(1.5, -a, 1.2, 0.8), st(1.5, a, 1.2, 0.8), &p).unwrap();
            assert!(sol.u_star.abs() < 1e-10, "{a}: {}", sol.u_star);
        }
    }

    #[test]
    fn saint_venant_vacuum_is_reported() {
        let p = Params::new(G, 0.0, 0.0).unwrap();
        let err = solve(st(1.0, -10.0, 1.0, 1.0), st(1.0, 10.0, 1.0, 1.0), &p).unwrap_err();
        assert!(matches!(err, Error::SaintVenantVacuum { .. }), "{err}");
    }

    #[test]
    fn half_slip_can_open_a_vacuum() {
        // at zeta = 1/2 the rarefaction integrals stay bounded as h -> 0
        let p = Params::new(G, 1.0, 0.5).unwrap();
        let err = solve(st(1.0, -20.0, 1.0, 1.0), st(1.0, 20.0, 1.0, 1.0), &p).unwrap_err();
        assert!(matches!(err, Error::Vacuum { .. }), "{err}");
        // strictly below 1/2 the same data has a solution
        let p = Params::new(G, 1.0, 0.4).unwrap();
        assert!(solve(st(1.0, -20.0, 1.0, 1.0), st(1.0, 20.0, 1.0, 1.0), &p).is_ok());
    }

    #[test]
    fn supersonic_data_upwinds() {
        let p = Params::new(G, 1.0, 0.2).unwrap();
        let l = st(1.0, 20.0, 1.0, 1.0);
        let r = st(0.9, 20.5, 1.1, 0.9);
        let sol = solve(l, r, &p).unwrap();
        assert_eq!(sol.interface_flux().unwrap(), model::flux(&l, &p));
    }

    #[test]
    fn rest_flux() {
        let p = Params::new(G, 3.0, 0.2).unwrap();
        let s = st(2.0, 0.0, 1.5, 1.5);
        let f = solve(s, s, &p).unwrap().interface_flux().unwrap();
        assert_eq!(f, [0.0, 0.5 * G * 4.0, 0.0, 0.0]);
    }

    #[test]
    fn contact_separates_star_states() {
        let p = Params::new(G, 1.0, 0.25).unwrap();
        let sol = solve(st(2.0, 0.0, 1.0, 1.0), st(1.0, 0.0, 1.0, 1.0), &p).unwrap();
        let eps = 1e-9;
        assert_eq!(sol.sample(sol.u_star + eps).unwrap(), sol.star_right);
        assert_eq!(sol.sample(sol.u_star - eps).unwrap(), sol.star_left);
        assert_eq!(sol.sample(sol.u_star).unwrap(), sol.star_right);
        let d = sol.diagnostics();
        let c = d
            .discontinuities
            .iter()
            .find(|j| j.field == WaveField::Zero)
            .unwrap();
        assert!(c.entropy.abs() <= 1e-12 * c.entropy_scale.max(1.0));
    }
}
