//! Studies of the vacuum and vanishing-elasticity limits.

use crate::error::{Error, Result};
use crate::model::{Params, PrimitiveState};
use crate::riemann;
use crate::validation::sv::sv_exact;
use crate::waves::{self, CurveSide};

#[derive(Debug, Clone, PartialEq)]
pub struct VacuumReport {
    pub depths: Vec<f64>,
    /// `|u(h_k) - u_ref|` along the rarefaction branch.
    pub magnitudes: Vec<f64>,
    pub strictly_increasing: bool,
}

/// Rarefaction velocity magnitudes along decreasing depths.
pub fn vacuum_divergence(side: &CurveSide, depths: &[f64], p: &Params) -> Result<VacuumReport> {
    let magnitudes = depths
        .iter()
        .map(|&h| Ok((waves::rarefaction_velocity(h, side, p)? - side.anchor.u).abs()))
        .collect::<Result<Vec<_>>>()?;
    let strictly_increasing = magnitudes.windows(2).all(|w| w[1] > w[0]);
    Ok(VacuumReport {
        depths: depths.to_vec(),
        magnitudes,
        strictly_increasing,
    })
}

/// `h_ref 2^{-k}` for `k = 1..=n`.
pub fn geometric_depths(h_ref: f64, n: u32) -> Vec<f64> {
    (1..=n).map(|k| h_ref * 0.5f64.powi(k as i32)).collect()
}

/// Aitken extrapolation of the last three terms of a sequence.
pub fn aitken_limit(seq: &[f64]) -> Option<f64> {
    let n = seq.len();
    if n < 3 {
        return None;
    }
    let (a, b, c) = (seq[n - 3], seq[n - 2], seq[n - 1]);
    let den = (c - b) - (b - a);
    if den == 0.0 {
        return Some(c);
    }
    Some(c - (c - b) * (c - b) / den)
}

/// Closed-form vacuum test for `zeta = 1/2`, where `P = k h^2 - G X` on each side.
///
/// Returns `None` for any other slip parameter or when `G = 0`.
pub fn half_slip_vacuum(l: &PrimitiveState, r: &PrimitiveState, p: &Params) -> Option<bool> {
    if p.zeta != 0.5 || p.elastic_modulus == 0.0 {
        return None;
    }
    let gm = p.elastic_modulus;
    let side = |s: &PrimitiveState| {
        let inv = crate::model::invariants(s, p);
        let k = 0.5 * p.g + gm * inv.z_inv;
        (k, -gm * inv.x, k * s.h * s.h - gm * inv.x)
    };
    let (kl, fl, pl) = side(l);
    let (kr, fr, pr) = side(r);
    let pf = fl.max(fr);
    let u_at_floor = |s: &PrimitiveState, k: f64, f: f64, p_ref: f64, sign: f64| {
        let h = ((pf - f) / k).max(0.0).sqrt();
        if h <= s.h {
            s.u + sign * 2.0 * (2.0 * k).sqrt() * (h.sqrt() - s.h.sqrt())
        } else {
            s.u + sign * ((1.0 / s.h - 1.0 / h) * (pf - p_ref)).sqrt()
        }
    };
    let u2 = u_at_floor(l, kl, fl, pl, -1.0);
    let u3 = u_at_floor(r, kr, fr, pr, 1.0);
    Some(u3 - u2 >= 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GLimitRow {
    pub elastic_modulus: f64,
    /// Largest gap between the two star depths and the classical star depth.
    pub h_error: f64,
    pub u_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GLimitTable {
    pub h_star_classical: f64,
    pub u_star_classical: f64,
    pub rows: Vec<GLimitRow>,
    /// Both errors non-increasing down the table.
    pub monotone: bool,
    /// `log(e_k/e_{k+1}) / log(G_k/G_{k+1})` for consecutive rows.
    pub observed_rates: Vec<f64>,
}

/// Star-state deviation from the classical solution as `G` decreases.
pub fn g_limit_study(
    left: PrimitiveState,
    right: PrimitiveState,
    p: &Params,
    g_sequence: &[f64],
) -> Result<GLimitTable> {
    let sv = sv_exact(left.h, left.u, right.h, right.u, p.g)?;
    if sv.vacuum {
        return Err(Error::Domain(format!(
            "the classical solution of ({}, {}) | ({}, {}) opens a vacuum; \
             the vanishing-elasticity limit is only claimed for data close enough to avoid it",
            left.h, left.u, right.h, right.u
        )));
    }
    let mut rows = Vec::with_capacity(g_sequence.len());
    for &gm in g_sequence {
        let q = Params {
            elastic_modulus: gm,
            ..*p
        };
        q.validate()?;
        let sol = riemann::solve(left, right, &q)?;
        rows.push(GLimitRow {
            elastic_modulus: gm,
            h_error: (sol.star_left.h - sv.h_star)
                .abs()
                .max((sol.star_right.h - sv.h_star).abs()),
            u_error: (sol.u_star - sv.u_star).abs(),
        });
    }
    let monotone = rows
        .windows(2)
        .all(|w| w[1].h_error <= w[0].h_error && w[1].u_error <= w[0].u_error);
    let observed_rates = rows
        .windows(2)
        .map(|w| {
            (w[0].h_error / w[1].h_error).ln() / (w[0].elastic_modulus / w[1].elastic_modulus).ln()
        })
        .collect();
    Ok(GLimitTable {
        h_star_classical: sv.h_star,
        u_star_classical: sv.u_star,
        rows,
        monotone,
        observed_rates,
    })
}
