//! Classical shallow-water exact Riemann solver, used as an independent oracle.

use crate::error::{Error, Result};
use crate::roots::{self, Stop};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SvWave {
    Shock,
    Rarefaction,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvStar {
    pub h_l: f64,
    pub u_l: f64,
    pub h_r: f64,
    pub u_r: f64,
    pub g: f64,
    /// Zero when `vacuum` is set.
    pub h_star: f64,
    /// With a vacuum, the midpoint of the two vacuum fronts.
    pub u_star: f64,
    pub left_wave: SvWave,
    pub right_wave: SvWave,
    pub vacuum: bool,
}

/// Toro's depth function for one side and its derivative.
fn side_function(h: f64, hk: f64, g: f64) -> (f64, f64) {
    if h > hk {
        let gk = (0.5 * g * (h + hk) / (h * hk)).sqrt();
        let dgk = -0.25 * g / (gk * h * h);
        ((h - hk) * gk, gk + (h - hk) * dgk)
    } else {
        let c = (g * h).sqrt();
        (2.0 * (c - (g * hk).sqrt()), g / c)
    }
}

/// The classical depth function `f_l(h) + f_r(h) + u_r - u_l`.
pub fn depth_function(h: f64, h_l: f64, u_l: f64, h_r: f64, u_r: f64, g: f64) -> f64 {
    side_function(h, h_l, g).0 + side_function(h, h_r, g).0 + u_r - u_l
}

fn classify(h_star: f64, hk: f64) -> SvWave {
    if (h_star - hk).abs() <= 1e-14 * hk {
        SvWave::None
    } else if h_star > hk {
        SvWave::Shock
    } else {
        SvWave::Rarefaction
    }
}

pub fn sv_exact(h_l: f64, u_l: f64, h_r: f64, u_r: f64, g: f64) -> Result<SvStar> {
    if !(h_l > 0.0 && h_r > 0.0 && g > 0.0) || !(u_l.is_finite() && u_r.is_finite()) {
        return Err(Error::InvalidState(format!(
            "classical data needs positive depths and gravity: h_l = {h_l}, h_r = {h_r}, g = {g}"
        )));
    }
    let (c_l, c_r) = ((g * h_l).sqrt(), (g * h_r).sqrt());
    let base = SvStar {
        h_l,
        u_l,
        h_r,
        u_r,
        g,
        h_star: 0.0,
        u_star: 0.0,
        left_wave: SvWave::Rarefaction,
        right_wave: SvWave::Rarefaction,
        vacuum: true,
    };
    if u_r - u_l >= 2.0 * (c_l + c_r) {
        return Ok(SvStar {
            u_star: 0.5 * ((u_l + 2.0 * c_l) + (u_r - 2.0 * c_r)),
            ..base
        });
    }
    let f = |h: f64| {
        let (fl, dl) = side_function(h, h_l, g);
        let (fr, dr) = side_function(h, h_r, g);
        (fl + fr + u_r - u_l, dl + dr)
    };
    // two-rarefaction guess, then a bracket for the safeguard
    let guess = (0.5 * (c_l + c_r) - 0.25 * (u_r - u_l)).powi(2) / g;
    let mut lo = h_l.min(h_r);
    let mut hi = h_l.max(h_r);
    while f(lo).0 > 0.0 {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(Error::NoConvergence {
                what: "classical depth bracket",
                iterations: 0,
                detail: format!("data ({h_l}, {u_l}) | ({h_r}, {u_r})"),
            });
        }
    }
    while f(hi).0 < 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::NoConvergence {
                what: "classical depth bracket",
                iterations: 0,
                detail: format!("data ({h_l}, {u_l}) | ({h_r}, {u_r})"),
            });
        }
    }
    let h_star = roots::safeguarded_newton(
        f,
        lo,
        hi,
        guess,
        Stop {
            residual: 1e-15 * (1.0 + u_l.abs() + u_r.abs()),
            width: 4.0 * f64::EPSILON * hi,
            max_iter: 200,
        },
    )?;
    let u_star = 0.5 * (u_l + u_r)
        + 0.5 * (side_function(h_star, h_r, g).0 - side_function(h_star, h_l, g).0);
    Ok(SvStar {
        h_star,
        u_star,
        left_wave: classify(h_star, h_l),
        right_wave: classify(h_star, h_r),
        vacuum: false,
        ..base
    })
}

impl SvStar {
    /// `(h, u)` at `xi = x/t`, right limit on shock rays.
    pub fn sample(&self, xi: f64) -> (f64, f64) {
        let g = self.g;
        let (c_l, c_r) = ((g * self.h_l).sqrt(), (g * self.h_r).sqrt());
        if self.vacuum {
            let head_l = self.u_l - c_l;
            let tail_l = self.u_l + 2.0 * c_l;
            let head_r = self.u_r + c_r;
            let tail_r = self.u_r - 2.0 * c_r;
            return if xi < head_l {
                (self.h_l, self.u_l)
            } else if xi < tail_l {
                left_fan(xi, self.u_l, c_l, g)
            } else if xi < tail_r {
                (0.0, xi)
            } else if xi < head_r {
                right_fan(xi, self.u_r, c_r, g)
            } else {
                (self.h_r, self.u_r)
            };
        }
        let c_s = (g * self.h_star).sqrt();
        if xi < self.u_star {
            match self.left_wave {
                SvWave::Shock => {
                    let q = ((self.h_star + self.h_l) * self.h_star / (2.0 * self.h_l * self.h_l))
                        .sqrt();
                    if xi < self.u_l - c_l * q {
                        (self.h_l, self.u_l)
                    } else {
                        (self.h_star, self.u_star)
                    }
                }
                _ => {
                    if xi < self.u_l - c_l {
                        (self.h_l, self.u_l)
                    } else if xi < self.u_star - c_s {
                        left_fan(xi, self.u_l, c_l, g)
                    } else {
                        (self.h_star, self.u_star)
                    }
                }
            }
        } else {
            match self.right_wave {
                SvWave::Shock => {
                    let q = ((self.h_star + self.h_r) * self.h_star / (2.0 * self.h_r * self.h_r))
                        .sqrt();
                    if xi < self.u_r + c_r * q {
                        (self.h_star, self.u_star)
                    } else {
                        (self.h_r, self.u_r)
                    }
                }
                _ => {
                    if xi < self.u_star + c_s {
                        (self.h_star, self.u_star)
                    } else if xi < self.u_r + c_r {
                        right_fan(xi, self.u_r, c_r, g)
                    } else {
                        (self.h_r, self.u_r)
                    }
                }
            }
        }
    }
}

fn left_fan(xi: f64, u: f64, c: f64, g: f64) -> (f64, f64) {
    let cf = (u + 2.0 * c - xi) / 3.0;
    (cf * cf / g, (u + 2.0 * c + 2.0 * xi) / 3.0)
}

fn right_fan(xi: f64, u: f64, c: f64, g: f64) -> (f64, f64) {
    let cf = (-u + 2.0 * c + xi) / 3.0;
    (cf * cf / g, (u - 2.0 * c + 2.0 * xi) / 3.0)
}
