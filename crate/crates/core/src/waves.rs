//! Forward wave curves of the two genuinely nonlinear families.
//!
//! Both curves are anchored on the outer state of the Riemann fan: the minus
//! curve on the left data, the plus curve on the right data. A curve point at
//! depth `h` is a shock when `h` exceeds the anchor depth and a rarefaction
//! when it is shallower. Along either branch the invariants `X`, `Z^{-1}` of
//! the anchor are frozen, so the depth alone parametrizes the curve and
//!
//! ```text
//! u(h) = u_ref + s * sqrt((1/h_ref - 1/h) (P(h) - P_ref))   (shock,       h >= h_ref)
//! u(h) = u_ref + s * int_{h_ref}^{h} c(h')/h' dh'             (rarefaction, h <= h_ref)
//! ```
//!
//! with `s = -1` for the minus family, `s = +1` for the plus family and
//! `c^2 = dP/dh`.

use crate::error::{Error, Result};
use crate::model::{self, Invariants, Params, PrimitiveState};
use crate::quadrature::{self, Tolerance};
use crate::roots::{self, Stop};

/// Rarefaction branches stop at this fraction of the anchor depth.
pub const VACUUM_FLOOR: f64 = 1e-200;

/// Relative depth band inside which a wave is reported as zero-amplitude.
pub const TIE_BAND: f64 = 1e-13;

const H_OF_P_MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WaveFamily {
    Minus,
    Plus,
}

impl WaveFamily {
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            WaveFamily::Minus => -1.0,
            WaveFamily::Plus => 1.0,
        }
    }
}

/// A wave curve anchored at one of the Riemann data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSide {
    pub anchor: PrimitiveState,
    pub inv: Invariants,
    pub family: WaveFamily,
    /// Total pressure of the anchor.
    pub pressure: f64,
}

impl CurveSide {
    pub fn new(anchor: PrimitiveState, family: WaveFamily, p: &Params) -> Result<Self> {
        anchor.validate()?;
        let inv = model::invariants(&anchor, p);
        inv.validate()?;
        Ok(Self {
            anchor,
            inv,
            family,
            pressure: model::total_pressure(&anchor, p),
        })
    }

    /// Minus curve through the left state.
    pub fn left(anchor: PrimitiveState, p: &Params) -> Result<Self> {
        Self::new(anchor, WaveFamily::Minus, p)
    }

    /// Plus curve through the right state.
    pub fn right(anchor: PrimitiveState, p: &Params) -> Result<Self> {
        Self::new(anchor, WaveFamily::Plus, p)
    }

    /// State on the curve at depth `h` with velocity `u`.
    pub fn state_at(&self, h: f64, u: f64, p: &Params) -> PrimitiveState {
        let (sxx, szz) = self.inv.stretches(h, p);
        PrimitiveState { h, u, sxx, szz }
    }

    fn is_trivial(&self, h: f64) -> bool {
        (h - self.anchor.h).abs() <= TIE_BAND * self.anchor.h
    }

    fn check_floor(&self, h: f64) -> Result<()> {
        let floor = VACUUM_FLOOR * self.anchor.h;
        if h < floor || !h.is_finite() {
            Err(Error::VacuumProximity { h, floor })
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveBranch {
    Shock,
    Rarefaction,
    Trivial,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub u: f64,
    pub h: f64,
    pub branch: CurveBranch,
}

/// `P(h) = g h^2/2 + G Z^{-1} h^{1+2(1-zeta)} - G X h^{1+2(zeta-1)}`.
pub fn p_of_h(h: f64, inv: Invariants, p: &Params) -> f64 {
    let a = p.stretch_exponent();
    let gm = p.elastic_modulus;
    0.5 * p.g * h * h + gm * inv.z_inv * h.powf(1.0 + a) - gm * inv.x * h.powf(1.0 - a)
}

/// Infimum of `P(h)` over `h > 0`, or `None` when unbounded below.
pub fn pressure_floor(inv: Invariants, p: &Params) -> Option<f64> {
    if p.elastic_modulus == 0.0 {
        Some(0.0)
    } else if p.zeta >= 0.5 {
        Some(-p.elastic_modulus * inv.x)
    } else {
        None
    }
}

/// Depth at which the total pressure equals `pressure`.
pub fn h_of_p(pressure: f64, inv: Invariants, p: &Params) -> Result<f64> {
    h_of_p_near(pressure, inv, p, 1.0)
}

/// As [`h_of_p`], starting the bracket search at `hint`.
pub fn h_of_p_near(pressure: f64, inv: Invariants, p: &Params, hint: f64) -> Result<f64> {
    if !pressure.is_finite() {
        return Err(Error::Domain(format!(
            "pressure {pressure:e} is not finite"
        )));
    }
    if let Some(floor) = pressure_floor(inv, p) {
        if pressure <= floor {
            return Err(Error::Domain(format!(
                "pressure {pressure:e} is not above the attainable lower bound {floor:e}"
            )));
        }
    }
    let residual = |t: f64| {
        let h = t.exp();
        let f = p_of_h(h, inv, p) - pressure;
        let (sxx, szz) = inv.stretches(h, p);
        (f, h * model::dp_dh_stretches(h, sxx, szz, p))
    };
    // bracket in t = ln h with geometrically growing steps
    let t0 = if hint > 0.0 && hint.is_finite() {
        hint.ln()
    } else {
        0.0
    };
    let f0 = residual(t0).0;
    if f0 == 0.0 {
        return Ok(hint);
    }
    let dir = if f0 < 0.0 { 1.0 } else { -1.0 };
    let (t_min, t_max) = (model::TINY.ln(), model::HUGE.ln());
    let mut step = 1.0;
    let mut near = t0;
    let mut far = (t0 + dir * step).clamp(t_min, t_max);
    let mut found = false;
    loop {
        let ff = residual(far).0;
        if !ff.is_finite() {
            break;
        }
        if ff.signum() == -f0.signum() || ff == 0.0 {
            found = true;
            break;
        }
        if far == t_min || far == t_max {
            break;
        }
        near = far;
        step *= 2.0;
        far = (t0 + dir * step).clamp(t_min, t_max);
    }
    if !found {
        return Err(Error::Domain(format!(
            "pressure {pressure:e} has no depth in [1e-300, 1e300] for X = {:e}, Z^-1 = {:e}",
            inv.x, inv.z_inv
        )));
    }
    let (lo, hi) = if dir > 0.0 { (near, far) } else { (far, near) };
    let width = 2.0 * f64::EPSILON * (1.0 + lo.abs().max(hi.abs()));
    let t = roots::safeguarded_newton(
        residual,
        lo,
        hi,
        0.5 * (lo + hi),
        Stop {
            residual: 0.0,
            width,
            max_iter: H_OF_P_MAX_ITER,
        },
    )?;
    Ok(t.exp())
}

/// Velocity on the shock branch of `side` at depth `h >= h_ref`.
pub fn hugoniot_velocity(h: f64, side: &CurveSide, p: &Params) -> Result<f64> {
    let href = side.anchor.h;
    if !(h >= href * (1.0 - TIE_BAND)) {
        return Err(Error::Domain(format!(
            "shock branch requires h >= h_ref, got h = {h:e} < {href:e}"
        )));
    }
    if side.is_trivial(h) {
        return Ok(side.anchor.u);
    }
    let pressure = p_of_h(h, side.inv, p);
    Ok(shock_velocity(h, pressure, side))
}

fn shock_velocity(h: f64, pressure: f64, side: &CurveSide) -> f64 {
    let jump = ((1.0 / side.anchor.h - 1.0 / h) * (pressure - side.pressure)).max(0.0);
    side.anchor.u + side.family.sign() * jump.sqrt()
}

/// Speed of a discontinuity from the mass jump condition.
pub fn shock_speed(left: &PrimitiveState, right: &PrimitiveState, _p: &Params) -> Result<f64> {
    let dh = right.h - left.h;
    if dh.abs() <= TIE_BAND * left.h.max(right.h) {
        return Err(Error::Domain(format!(
            "equal depths {:e}, {:e}: no shock",
            left.h, right.h
        )));
    }
    Ok((right.h * right.u - left.h * left.u) / dh)
}

fn quad_tol() -> Tolerance {
    Tolerance::default()
}

/// `c(h)` on the curve.
fn curve_celerity(h: f64, inv: Invariants, p: &Params) -> f64 {
    let (sxx, szz) = inv.stretches(h, p);
    model::dp_dh_stretches(h, sxx, szz, p).max(0.0).sqrt()
}

/// `int_{h_ref}^{h} c(h')/h' dh'`, integrated in `ln h'`.
fn velocity_integral(h: f64, side: &CurveSide, p: &Params) -> Result<f64> {
    let inv = side.inv;
    quadrature::integrate(
        |t| curve_celerity(t.exp(), inv, p),
        side.anchor.h.ln(),
        h.ln(),
        quad_tol(),
    )
}

/// `int_{h_ref}^{h} |r . grad(lambda)| / h' dh'`, integrated in `ln h'`.
fn speed_integral(h: f64, side: &CurveSide, p: &Params) -> Result<f64> {
    let inv = side.inv;
    let z = p.zeta;
    let gm = p.elastic_modulus;
    let c_zz = 2.0 * gm * (3.0 - 2.0 * z) * (2.0 - z);
    let c_xx = 2.0 * gm * z * (1.0 - 2.0 * z);
    quadrature::integrate(
        |t| {
            let h = t.exp();
            let (sxx, szz) = inv.stretches(h, p);
            let c = model::dp_dh_stretches(h, sxx, szz, p).max(0.0).sqrt();
            (3.0 * p.g * h + c_zz * szz + c_xx * sxx) / (2.0 * c)
        },
        side.anchor.h.ln(),
        h.ln(),
        quad_tol(),
    )
}

fn check_rarefaction_branch(h: f64, side: &CurveSide) -> Result<()> {
    let href = side.anchor.h;
    if !(h <= href * (1.0 + TIE_BAND)) {
        return Err(Error::Domain(format!(
            "rarefaction branch requires h <= h_ref, got h = {h:e} > {href:e}"
        )));
    }
    side.check_floor(h)
}

/// Velocity on the rarefaction branch of `side` at depth `h <= h_ref`.
pub fn rarefaction_velocity(h: f64, side: &CurveSide, p: &Params) -> Result<f64> {
    check_rarefaction_branch(h, side)?;
    if side.is_trivial(h) {
        return Ok(side.anchor.u);
    }
    Ok(side.anchor.u + side.family.sign() * velocity_integral(h, side, p)?)
}

/// Self-similar coordinate of the fan state at depth `h`.
pub fn rarefaction_xi(h: f64, side: &CurveSide, p: &Params) -> Result<f64> {
    check_rarefaction_branch(h, side)?;
    let c_ref = model::celerity(&side.anchor, p)?;
    let s = side.family.sign();
    let head = side.anchor.u + s * c_ref;
    if side.is_trivial(h) {
        return Ok(head);
    }
    Ok(head + s * speed_integral(h, side, p)?)
}

/// Depth of the fan state travelling at `xi`.
pub fn rarefaction_h_at_xi(xi: f64, side: &CurveSide, p: &Params) -> Result<f64> {
    rarefaction_h_at_xi_above(xi, side, p, None)
}

/// As [`rarefaction_h_at_xi`], with an optional known lower end of the fan.
pub(crate) fn rarefaction_h_at_xi_above(
    xi: f64,
    side: &CurveSide,
    p: &Params,
    h_end: Option<f64>,
) -> Result<f64> {
    let href = side.anchor.h;
    let s = side.family.sign();
    // orient so that g(t) = dir * (xi(e^t) - xi) increases with t
    let dir = s;
    let eval = |t: f64| -> Result<f64> {
        let h = t.exp().min(href);
        Ok(dir * (rarefaction_xi(h, side, p)? - xi))
    };
    let t_ref = href.ln();
    let f_ref = eval(t_ref)?;
    if f_ref == 0.0 {
        return Ok(href);
    }
    if f_ref < 0.0 {
        return Err(Error::Domain(format!(
            "xi = {xi:e} lies outside the fan on the anchor side"
        )));
    }
    let floor_t = (VACUUM_FLOOR * href).ln();
    let (mut t_lo, mut f_lo) = match h_end {
        Some(h) => {
            let t = h.ln().max(floor_t);
            (t, eval(t)?)
        }
        None => (t_ref, f_ref),
    };
    let mut step = std::f64::consts::LN_2;
    while f_lo > 0.0 {
        if t_lo <= floor_t {
            return Err(Error::Domain(format!(
                "xi = {xi:e} lies beyond the fan down to the vacuum floor"
            )));
        }
        t_lo = (t_lo - step).max(floor_t);
        step *= 2.0;
        f_lo = eval(t_lo)?;
    }
    let scale = 1.0 + xi.abs() + model::celerity(&side.anchor, p)?;
    let t = roots::brent(
        eval,
        t_lo,
        t_ref,
        f_lo,
        f_ref,
        Stop {
            residual: 1e-13 * scale,
            width: 4.0 * f64::EPSILON * (1.0 + t_lo.abs()),
            max_iter: 200,
        },
    )?;
    Ok(t.exp().min(href))
}

/// Point of the wave curve at depth `h`.
pub fn curve_point_at_depth(h: f64, side: &CurveSide, p: &Params) -> Result<CurvePoint> {
    if side.is_trivial(h) {
        return Ok(CurvePoint {
            u: side.anchor.u,
            h: side.anchor.h,
            branch: CurveBranch::Trivial,
        });
    }
    if h > side.anchor.h {
        Ok(CurvePoint {
            u: shock_velocity(h, p_of_h(h, side.inv, p), side),
            h,
            branch: CurveBranch::Shock,
        })
    } else {
        side.check_floor(h)?;
        Ok(CurvePoint {
            u: side.anchor.u + side.family.sign() * velocity_integral(h, side, p)?,
            h,
            branch: CurveBranch::Rarefaction,
        })
    }
}

/// Point of the wave curve at total pressure `pressure`.
pub fn wave_curve_u(pressure: f64, side: &CurveSide, p: &Params) -> Result<CurvePoint> {
    let h = h_of_p_near(pressure, side.inv, p, side.anchor.h)?;
    if h > side.anchor.h && !side.is_trivial(h) {
        return Ok(CurvePoint {
            u: shock_velocity(h, pressure, side),
            h,
            branch: CurveBranch::Shock,
        });
    }
    curve_point_at_depth(h, side, p)
}
