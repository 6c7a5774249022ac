//! Pointwise algebra of the viscoelastic shallow-water system.
//!
//! The quasilinear variable is `U = (h, u, sxx, szz)`:
//!
//! ```text
//! h_t   + (h u)_x                                   = 0
//! (hu)_t + (h u^2 + g h^2/2 + h N)_x                = 0,   N = G (szz - sxx)
//! sxx_t + u sxx_x + 2(zeta - 1) sxx u_x             = (1 - sxx) / lambda
//! szz_t + u szz_x + 2(1 - zeta) szz u_x             = (1 - szz) / lambda
//! ```
//!
//! The stretches combine with the depth into two quantities advected by the
//! flow, `X = sxx h^{2(1-zeta)}` and `Z^{-1} = szz h^{2(zeta-1)}`, which turn
//! the homogeneous system into conservation laws for
//! `V = (h, h u, h X, h Z^{-1})`.

use std::fmt;

use crate::error::{Error, Result};

/// Magnitudes outside `[TINY, HUGE]` are rejected as input.
pub const TINY: f64 = 1e-300;
pub const HUGE: f64 = 1e300;

pub type Vector4 = [f64; 4];
pub type Matrix4 = [[f64; 4]; 4];

/// Physical constants of the model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    /// Gravity, m/s^2.
    pub g: f64,
    /// Elastic modulus `G` per unit density, m^2/s^2.
    pub elastic_modulus: f64,
    /// Johnson-Segalman slip parameter.
    pub zeta: f64,
    /// Relaxation time, s. `None` is the elastic limit (no source terms).
    pub relaxation_time: Option<f64>,
}

impl Params {
    pub fn new(g: f64, elastic_modulus: f64, zeta: f64) -> Result<Self> {
        let p = Self {
            g,
            elastic_modulus,
            zeta,
            relaxation_time: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_relaxation_time(mut self, lambda: f64) -> Result<Self> {
        self.relaxation_time = Some(lambda);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g.is_finite() && self.g > 0.0) {
            return Err(Error::InvalidParams(format!(
                "g = {} must be positive",
                self.g
            )));
        }
        if !(self.elastic_modulus.is_finite() && self.elastic_modulus >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "G = {} must be non-negative",
                self.elastic_modulus
            )));
        }
        if !(self.zeta.is_finite() && (0.0..=0.5).contains(&self.zeta)) {
            return Err(Error::InvalidParams(format!(
                "zeta = {} violates the hyperbolicity condition 0 <= zeta <= 1/2",
                self.zeta
            )));
        }
        if let Some(lambda) = self.relaxation_time {
            if !(lambda > 0.0) || lambda.is_nan() {
                return Err(Error::InvalidParams(format!(
                    "relaxation time lambda = {lambda} must be positive (omit it for the elastic limit)"
                )));
            }
        }
        Ok(())
    }

    /// `true` when source terms vanish.
    pub fn is_elastic_limit(&self) -> bool {
        match self.relaxation_time {
            None => true,
            Some(l) => l.is_infinite(),
        }
    }

    /// Exponent `2(1 - zeta)` tying the stretches to the depth.
    #[inline]
    pub fn stretch_exponent(&self) -> f64 {
        2.0 * (1.0 - self.zeta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimitiveState {
    pub h: f64,
    pub u: f64,
    pub sxx: f64,
    pub szz: f64,
}

fn in_range(v: f64) -> bool {
    (TINY..=HUGE).contains(&v)
}

impl PrimitiveState {
    pub fn new(h: f64, u: f64, sxx: f64, szz: f64) -> Result<Self> {
        let s = Self { h, u, sxx, szz };
        s.validate()?;
        Ok(s)
    }

    /// Membership in the strict hyperbolicity region.
    pub fn validate(&self) -> Result<()> {
        if in_range(self.h) && in_range(self.sxx) && in_range(self.szz) && self.u.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidState(self.to_string()))
        }
    }

    pub fn is_admissible(&self) -> bool {
        self.validate().is_ok()
    }

    pub fn as_array(&self) -> Vector4 {
        [self.h, self.u, self.sxx, self.szz]
    }

    pub fn from_array(v: Vector4) -> Self {
        Self {
            h: v[0],
            u: v[1],
            sxx: v[2],
            szz: v[3],
        }
    }
}

impl fmt::Display for PrimitiveState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(h={:e}, u={:e}, sxx={:e}, szz={:e})",
            self.h, self.u, self.sxx, self.szz
        )
    }
}

/// Conserved variables `(h, h u, h X, h Z^{-1})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservedState(pub Vector4);

impl ConservedState {
    pub fn from_primitive(s: &PrimitiveState, p: &Params) -> Self {
        let inv = invariants(s, p);
        Self([s.h, s.h * s.u, s.h * inv.x, s.h * inv.z_inv])
    }

    pub fn to_primitive(&self, p: &Params) -> Result<PrimitiveState> {
        let [m0, m1, m2, m3] = self.0;
        if !(in_range(m0) && in_range(m2) && in_range(m3)) || !m1.is_finite() {
            return Err(Error::InvalidState(format!(
                "conserved ({m0:e}, {m1:e}, {m2:e}, {m3:e})"
            )));
        }
        let h = m0;
        let inv = Invariants {
            x: m2 / h,
            z_inv: m3 / h,
        };
        let s = reconstruct(h, m1 / h, inv, p);
        s.validate()?;
        Ok(s)
    }
}

/// The two stretch invariants, frozen along the genuinely nonlinear waves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Invariants {
    /// `sxx h^{2(1-zeta)}`
    pub x: f64,
    /// `szz h^{2(zeta-1)}`
    pub z_inv: f64,
}

impl Invariants {
    pub fn validate(&self) -> Result<()> {
        if in_range(self.x) && in_range(self.z_inv) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "invariants X = {:e}, Z^-1 = {:e} must be positive",
                self.x, self.z_inv
            )))
        }
    }

    /// Stretches at depth `h`.
    #[inline]
    pub fn stretches(&self, h: f64, p: &Params) -> (f64, f64) {
        let w = h.powf(p.stretch_exponent());
        (self.x / w, self.z_inv * w)
    }
}

pub fn normal_stress(s: &PrimitiveState, p: &Params) -> f64 {
    p.elastic_modulus * (s.szz - s.sxx)
}

/// `P = g h^2 / 2 + h N`.
pub fn total_pressure(s: &PrimitiveState, p: &Params) -> f64 {
    0.5 * p.g * s.h * s.h + s.h * normal_stress(s, p)
}

pub fn invariants(s: &PrimitiveState, p: &Params) -> Invariants {
    let w = s.h.powf(p.stretch_exponent());
    Invariants {
        x: s.sxx * w,
        z_inv: s.szz / w,
    }
}

fn reconstruct(h: f64, u: f64, inv: Invariants, p: &Params) -> PrimitiveState {
    let (sxx, szz) = inv.stretches(h, p);
    PrimitiveState { h, u, sxx, szz }
}

pub fn state_from_invariants(
    h: f64,
    u: f64,
    inv: Invariants,
    p: &Params,
) -> Result<PrimitiveState> {
    if !in_range(h) {
        return Err(Error::Domain(format!("depth h = {h:e} must be positive")));
    }
    inv.validate()?;
    let s = reconstruct(h, u, inv, p);
    s.validate()?;
    Ok(s)
}

/// `gh + G(szz - sxx) + 2G(1-zeta)(szz + sxx)` for explicit stretches.
#[inline]
pub(crate) fn dp_dh_stretches(h: f64, sxx: f64, szz: f64, p: &Params) -> f64 {
    let gm = p.elastic_modulus;
    let z = p.zeta;
    p.g * h + gm * (3.0 - 2.0 * z) * szz + gm * (1.0 - 2.0 * z) * sxx
}

/// Derivative of the total pressure with respect to depth at fixed invariants.
pub fn dp_dh(h: f64, inv: Invariants, p: &Params) -> Result<f64> {
    let (sxx, szz) = inv.stretches(h, p);
    checked_dp_dh(dp_dh_stretches(h, sxx, szz, p))
}

fn checked_dp_dh(value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonHyperbolic { value })
    }
}

/// Characteristic celerity `sqrt(dP/dh)` of the genuinely nonlinear fields.
pub fn celerity(s: &PrimitiveState, p: &Params) -> Result<f64> {
    checked_dp_dh(dp_dh_stretches(s.h, s.sxx, s.szz, p)).map(f64::sqrt)
}

/// `(lambda-, lambda0, lambda0, lambda+)`, sorted.
pub fn eigenvalues(s: &PrimitiveState, p: &Params) -> Result<Vector4> {
    let c = celerity(s, p)?;
    Ok([s.u - c, s.u, s.u, s.u + c])
}

/// Right eigenvectors, unnormalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharFields {
    pub zero_1: Vector4,
    pub zero_2: Vector4,
    pub minus: Vector4,
    pub plus: Vector4,
}

pub fn char_fields(s: &PrimitiveState, p: &Params) -> Result<CharFields> {
    let c = celerity(s, p)?;
    let gm = p.elastic_modulus;
    let gh_n = p.g * s.h + normal_stress(s, p);
    let sx = 2.0 * (p.zeta - 1.0) * s.sxx;
    let sz = 2.0 * (1.0 - p.zeta) * s.szz;
    Ok(CharFields {
        zero_1: [gm * s.h, 0.0, gh_n, 0.0],
        zero_2: [gm * s.h, 0.0, 0.0, -gh_n],
        minus: [s.h, -c, sx, sz],
        plus: [s.h, c, sx, sz],
    })
}

/// `r± . grad(lambda±)`; negative for the minus field, positive for the plus field.
pub fn genuine_nonlinearity(s: &PrimitiveState, p: &Params) -> Result<(f64, f64)> {
    let c = celerity(s, p)?;
    let z = p.zeta;
    let gm = p.elastic_modulus;
    let num = 3.0 * p.g * s.h
        + 2.0 * gm * (3.0 - 2.0 * z) * (2.0 - z) * s.szz
        + 2.0 * gm * z * (1.0 - 2.0 * z) * s.sxx;
    let v = num / (2.0 * c);
    Ok((-v, v))
}

/// Free energy (mathematical entropy) density.
pub fn free_energy(s: &PrimitiveState, p: &Params) -> f64 {
    let elastic = s.sxx + s.szz - s.sxx.ln() - s.szz.ln() - 2.0;
    0.5 * s.h * (s.u * s.u + p.g * s.h + p.elastic_modulus * elastic)
}

/// `u (F + P)`.
pub fn entropy_flux(s: &PrimitiveState, p: &Params) -> f64 {
    s.u * (free_energy(s, p) + total_pressure(s, p))
}

/// Flux of the conservative system.
pub fn flux(s: &PrimitiveState, p: &Params) -> Vector4 {
    let inv = invariants(s, p);
    let q = s.h * s.u;
    [q, q * s.u + total_pressure(s, p), q * inv.x, q * inv.z_inv]
}

/// Matrix `A(U)` of `U_t + A(U) U_x = S(U)`.
pub fn quasilinear_matrix(s: &PrimitiveState, p: &Params) -> Matrix4 {
    let gm = p.elastic_modulus;
    let u = s.u;
    [
        [u, s.h, 0.0, 0.0],
        [(p.g * s.h + normal_stress(s, p)) / s.h, u, -gm, gm],
        [0.0, 2.0 * (p.zeta - 1.0) * s.sxx, u, 0.0],
        [0.0, 2.0 * (1.0 - p.zeta) * s.szz, 0.0, u],
    ]
}

/// Right-hand sides of the stretch equations, `((1 - sxx)/lambda, (1 - szz)/lambda)`.
pub fn relaxation_rate(s: &PrimitiveState, p: &Params) -> Result<(f64, f64)> {
    match p.relaxation_time {
        Some(l) if l.is_finite() => Ok(((1.0 - s.sxx) / l, (1.0 - s.szz) / l)),
        _ => Err(Error::ElasticLimit),
    }
}

/// Logarithmic stretch densities `(h ln X, h ln Z^{-1})`, an alternative set of
/// conserved stretch variables for the homogeneous system.
pub fn log_invariant_densities(s: &PrimitiveState, p: &Params) -> (f64, f64) {
    let inv = invariants(s, p);
    (s.h * inv.x.ln(), s.h * inv.z_inv.ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(h: f64, u: f64, sxx: f64, szz: f64) -> PrimitiveState {
        PrimitiveState::new(h, u, sxx, szz).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn params_reject_non_hyperbolic_zeta() {
        let err = Params::new(9.81, 1.0, 0.7).unwrap_err();
        assert!(err.to_string().contains("zeta <= 1/2"), "{err}");
        assert!(Params::new(0.0, 1.0, 0.0).is_err());
        assert!(Params::new(9.81, -1.0, 0.0).is_err());
        assert!(Params::new(9.81, 1.0, 0.0)
            .unwrap()
            .with_relaxation_time(0.0)
            .is_err());
        assert!(Params::new(9.81, 1.0, 0.5).is_ok());
    }

    #[test]
    fn state_guards() {
        assert!(PrimitiveState::new(0.0, 0.0, 1.0, 1.0).is_err());
        assert!(PrimitiveState::new(1.0, 0.0, -1.0, 1.0).is_err());
        assert!(PrimitiveState::new(1e-301, 0.0, 1.0, 1.0).is_err());
        assert!(PrimitiveState::new(1.0, 0.0, 1.0, 2e300).is_err());
        assert!(PrimitiveState::new(1.0, f64::NAN, 1.0, 1.0).is_err());
    }

    #[test]
    fn normal_stress_and_pressure() {
        let p = Params::new(10.0, 5.0, 0.0).unwrap();
        assert_eq!(normal_stress(&st(1.0, 0.0, 1.0, 1.0), &p), 0.0);
        let p = Params::new(10.0, 2.0, 0.0).unwrap();
        assert_eq!(normal_stress(&st(2.0, 3.0, 1.0, 3.0), &p), 4.0);
        assert_eq!(total_pressure(&st(1.0, 0.0, 1.0, 3.0), &p), 9.0);
        assert_eq!(total_pressure(&st(1.0, 0.0, 2.5, 2.5), &p), 5.0);
    }

    #[test]
    fn invariants_examples() {
        let p = Params::new(9.81, 1.0, 0.0).unwrap();
        let inv = invariants(&st(2.0, 0.0, 1.5, 0.5), &p);
        assert!(rel(inv.x, 6.0) < 1e-15 && rel(inv.z_inv, 0.125) < 1e-15);
        let p = Params::new(9.81, 1.0, 0.5).unwrap();
        assert!(rel(invariants(&st(2.0, 0.0, 3.0, 1.0), &p).x, 6.0) < 1e-15);
        let p = Params::new(9.81, 1.0, 0.3).unwrap();
        let inv = invariants(&st(1.0, 0.0, 0.7, 1.9), &p);
        assert_eq!((inv.x, inv.z_inv), (0.7, 1.9));

        let p = Params::new(9.81, 1.0, 0.0).unwrap();
        let s = state_from_invariants(
            2.0,
            0.0,
            Invariants {
                x: 6.0,
                z_inv: 0.125,
            },
            &p,
        )
        .unwrap();
        assert!(rel(s.sxx, 1.5) < 1e-15 && rel(s.szz, 0.5) < 1e-15);
        assert!(state_from_invariants(0.0, 0.0, Invariants { x: 1.0, z_inv: 1.0 }, &p).is_err());
    }

    #[test]
    fn dp_dh_examples() {
        let p = Params::new(9.81, 1.0, 0.0).unwrap();
        let v = dp_dh(1.0, Invariants { x: 1.0, z_inv: 1.0 }, &p).unwrap();
        assert!((v - 13.81).abs() < 1e-13);
        let p0 = Params::new(9.81, 0.0, 0.2).unwrap();
        let v = dp_dh(3.0, Invariants { x: 7.0, z_inv: 0.1 }, &p0).unwrap();
        assert!((v - 9.81 * 3.0).abs() < 1e-13);
    }

    #[test]
    fn eigenvalue_examples() {
        let p = Params::new(9.81, 1.0, 0.0).unwrap();
        let ev = eigenvalues(&st(1.0, 0.0, 1.0, 1.0), &p).unwrap();
        assert!((ev[3] - 3.716_180_835_212_409).abs() < 1e-12);
        assert_eq!(ev[0], -ev[3]);
        assert_eq!((ev[1], ev[2]), (0.0, 0.0));
        let p0 = Params::new(9.81, 0.0, 0.0).unwrap();
        let ev = eigenvalues(&st(2.0, 1.0, 3.0, 0.1), &p0).unwrap();
        assert!((ev[3] - (1.0 + (9.81f64 * 2.0).sqrt())).abs() < 1e-14);
    }

    #[test]
    fn genuine_nonlinearity_limits() {
        let p0 = Params::new(9.81, 0.0, 0.25).unwrap();
        let s = st(2.0, 0.0, 1.3, 0.4);
        let (m, pl) = genuine_nonlinearity(&s, &p0).unwrap();
        let gh: f64 = 9.81 * 2.0;
        assert!(rel(pl, 1.5 * gh.sqrt()) < 1e-15 && m == -pl);

        let p = Params::new(9.81, 2.0, 0.5).unwrap();
        let (_, pl) = genuine_nonlinearity(&s, &p).unwrap();
        let c = celerity(&s, &p).unwrap();
        assert!(rel(pl, (3.0 * gh + 6.0 * 2.0 * 0.4) / (2.0 * c)) < 1e-15);
    }

    #[test]
    fn free_energy_examples() {
        let p = Params::new(9.81, 3.0, 0.0).unwrap();
        assert!((free_energy(&st(1.0, 0.0, 1.0, 1.0), &p) - 4.905).abs() < 1e-15);
        let weightless = |gm| Params {
            g: 0.0,
            elastic_modulus: gm,
            zeta: 0.0,
            relaxation_time: None,
        };
        let p = weightless(0.0);
        assert!((free_energy(&st(1.0, 2.0, 1.0, 1.0), &p) - 2.0).abs() < 1e-15);
        let p = weightless(2.0);
        let e = std::f64::consts::E;
        assert!((free_energy(&st(1.0, 0.0, e, 1.0), &p) - (e - 2.0)).abs() < 1e-15);
    }

    #[test]
    fn entropy_flux_examples() {
        let p = Params::new(2.0, 7.0, 0.1).unwrap();
        assert_eq!(entropy_flux(&st(1.3, 0.0, 2.0, 0.5), &p), 0.0);
        assert!((entropy_flux(&st(1.0, 1.0, 1.0, 1.0), &p) - 2.5).abs() < 1e-15);
    }

    #[test]
    fn quasilinear_matrix_rows() {
        let p = Params::new(9.81, 1.5, 0.2).unwrap();
        let s = st(1.7, -0.4, 2.0, 0.3);
        let a = quasilinear_matrix(&s, &p);
        assert_eq!(a[0], [s.u, s.h, 0.0, 0.0]);
        assert_eq!(a[2][2], s.u);
        assert_eq!(a[3][3], s.u);
        assert_eq!(a[2][1], 2.0 * (0.2 - 1.0) * 2.0);
        assert_eq!(a[3][1], 2.0 * (1.0 - 0.2) * 0.3);
    }

    #[test]
    fn relaxation_rate_examples() {
        let p = Params::new(9.81, 1.0, 0.0).unwrap();
        assert_eq!(
            relaxation_rate(&st(1.0, 0.0, 1.0, 1.0), &p),
            Err(Error::ElasticLimit)
        );
        let p1 = p.with_relaxation_time(1.0).unwrap();
        assert_eq!(
            relaxation_rate(&st(1.0, 0.0, 1.0, 1.0), &p1).unwrap(),
            (0.0, 0.0)
        );
        assert_eq!(
            relaxation_rate(&st(1.0, 0.0, 2.0, 1.0), &p1).unwrap().0,
            -1.0
        );
        let p2 = p.with_relaxation_time(2.0).unwrap();
        assert_eq!(
            relaxation_rate(&st(1.0, 0.0, 0.5, 1.0), &p2).unwrap().0,
            0.25
        );
    }

    #[test]
    fn conserved_decode_rejects_negative_depth() {
        let p = Params::new(9.81, 1.0, 0.0).unwrap();
        assert!(ConservedState([-1.0, 0.0, 1.0, 1.0])
            .to_primitive(&p)
            .is_err());
        assert!(ConservedState([1.0, 0.0, 0.0, 1.0])
            .to_primitive(&p)
            .is_err());
    }
}
