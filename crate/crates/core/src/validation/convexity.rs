//! Convexity of the free energy per unit depth in `(1/h, u)` at frozen invariants.
//!
//! With `v = 1/h` and `a = 2(1 - zeta)`,
//!
//! ```text
//! F/h = u^2/2 + g/(2v) + (G/2) (X v^a + Z^{-1} v^{-a} - ln X - ln Z^{-1} - 2)
//! ```
//!
//! so the Hessian is `diag(w_vv, 1)` with
//! `w_vv = g/v^3 + (G/2) (X a(a-1) v^{a-2} + Z^{-1} a(a+1) v^{-a-2})`.
//! The term `a(a-1)` changes sign at `zeta = 1/2`.

use crate::error::{Error, Result};
use crate::model::{self, Invariants, Params};

/// Normal runs reject non-hyperbolic parameters; the diagnostic mode admits
/// `1/2 < zeta <= 1` as a negative control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ConvexityMode {
    #[default]
    Standard,
    Diagnostic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexityReport {
    pub min_eigenvalue: f64,
    /// `(h, u)` at the minimum.
    pub argmin: (f64, f64),
    /// Largest relative gap between the analytic `w_vv` and a finite-difference
    /// second derivative of the implemented free energy.
    pub fd_mismatch: f64,
    pub samples: usize,
}

impl ConvexityReport {
    pub fn is_convex(&self, tol: f64) -> bool {
        self.min_eigenvalue >= -tol
    }
}

/// `w(v) = F/h` at `h = 1/v`, evaluated through the model.
fn w_model(v: f64, u: f64, inv: Invariants, p: &Params) -> f64 {
    let h = 1.0 / v;
    let (sxx, szz) = inv.stretches(h, p);
    let s = crate::model::PrimitiveState { h, u, sxx, szz };
    model::free_energy(&s, p) / h
}

pub fn w_vv(v: f64, inv: Invariants, p: &Params) -> f64 {
    let a = p.stretch_exponent();
    p.g / (v * v * v)
        + 0.5
            * p.elastic_modulus
            * (inv.x * a * (a - 1.0) * v.powf(a - 2.0)
                + inv.z_inv * a * (a + 1.0) * v.powf(-a - 2.0))
}

fn check_params(p: &Params, mode: ConvexityMode) -> Result<()> {
    match mode {
        ConvexityMode::Standard => p.validate(),
        ConvexityMode::Diagnostic => {
            if !(p.g > 0.0 && p.elastic_modulus >= 0.0 && (0.0..=1.0).contains(&p.zeta)) {
                return Err(Error::InvalidParams(format!(
                    "diagnostic convexity needs g > 0, G >= 0, 0 <= zeta <= 1; got {p:?}"
                )));
            }
            Ok(())
        }
    }
}

/// Sample the Hessian on a log grid of `n_h` depths and a uniform grid of `n_u` velocities.
pub fn convexity_check(
    inv: Invariants,
    p: &Params,
    h_range: (f64, f64),
    u_range: (f64, f64),
    n_h: usize,
    n_u: usize,
    mode: ConvexityMode,
) -> Result<ConvexityReport> {
    check_params(p, mode)?;
    inv.validate()?;
    if !(h_range.0 > 0.0 && h_range.1 >= h_range.0 && n_h >= 1 && n_u >= 1) {
        return Err(Error::Domain(format!(
            "bad sampling ranges h {h_range:?}, u {u_range:?}"
        )));
    }
    let (l0, l1) = (h_range.0.ln(), h_range.1.ln());
    let mut report = ConvexityReport {
        min_eigenvalue: f64::INFINITY,
        argmin: (h_range.0, u_range.0),
        fd_mismatch: 0.0,
        samples: 0,
    };
    for i in 0..n_h {
        let frac = if n_h == 1 {
            0.0
        } else {
            i as f64 / (n_h - 1) as f64
        };
        let h = (l0 + frac * (l1 - l0)).exp();
        let v = 1.0 / h;
        let wvv = w_vv(v, inv, p);
        // five-point second difference of the implemented energy
        let d = 1e-2 * v;
        let fd = (-w_model(v + 2.0 * d, 0.0, inv, p) + 16.0 * w_model(v + d, 0.0, inv, p)
            - 30.0 * w_model(v, 0.0, inv, p)
            + 16.0 * w_model(v - d, 0.0, inv, p)
            - w_model(v - 2.0 * d, 0.0, inv, p))
            / (12.0 * d * d);
        // rounding bound of the stencil
        let noise = 10.0 * 64.0 / 12.0 * f64::EPSILON * w_model(v, 0.0, inv, p).abs() / (d * d);
        report.fd_mismatch = report
            .fd_mismatch
            .max((fd - wvv).abs() / (wvv.abs() + noise).max(f64::MIN_POSITIVE));
        for j in 0..n_u {
            let frac = if n_u == 1 {
                0.0
            } else {
                j as f64 / (n_u - 1) as f64
            };
            let u = u_range.0 + frac * (u_range.1 - u_range.0);
            // Hessian diag(w_vv, w_uu) with w_uu = 1, w_uv = 0
            let eig = wvv.min(1.0);
            report.samples += 1;
            if eig < report.min_eigenvalue {
                report.min_eigenvalue = eig;
                report.argmin = (h, u);
            }
        }
    }
    Ok(report)
}
