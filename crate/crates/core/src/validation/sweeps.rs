//! Randomized property sweeps with pass/fail reports.
//!
//! Every sweep is deterministic given its seed: samples are drawn sequentially
//! from a ChaCha stream and then evaluated in parallel with results collected
//! in sample order.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fv::{self, Boundary, Grid, SimConfig};
use crate::model::{self, Invariants, Params, PrimitiveState, Vector4};
use crate::riemann::{self, RiemannSolution, WaveField, WaveKind};
use crate::validation::convexity::{convexity_check, ConvexityMode};
use crate::validation::limits::{
    aitken_limit, g_limit_study, geometric_depths, half_slip_vacuum, vacuum_divergence,
};
use crate::validation::sv::sv_exact;
use crate::validation::weak::{weak_form_residual, SpaceTimeBox};
use crate::waves::CurveSide;

pub const GRAVITY: f64 = 9.81;
pub const ZETAS: [f64; 5] = [0.0, 0.1, 0.25, 0.4, 0.5];
pub const MODULI: [f64; 4] = [0.0, 0.1, 1.0, 10.0];

/// Pinned tolerances of the property checks.
pub mod tol {
    pub const EIGEN_RESIDUAL: f64 = 1e-9;
    pub const GN_FD: f64 = 1e-5;
    pub const RH_RELATIVE: f64 = 1e-9;
    pub const CONTACT_DU: f64 = 1e-10;
    pub const CONTACT_DP: f64 = 1e-10;
    pub const ORDERING: f64 = 1e-12;
    pub const LAX: f64 = 1e-10;
    pub const CONTACT_ENTROPY: f64 = 1e-12;
    pub const WEAK_SHOCK_ENTROPY: f64 = 1e-12;
    pub const WEAK_SHOCK_AMPLITUDE: f64 = 0.1;
    pub const SV_STAR: f64 = 1e-8;
    pub const SV_PROFILE: f64 = 1e-8;
    pub const G_LIMIT_FINAL: f64 = 1e-4;
    pub const VACUUM_FACTOR: f64 = 1e3;
    pub const SV_VACUUM_LIMIT: f64 = 1e-6;
    pub const WEAK_FORM: f64 = 1e-6;
    pub const ORDER_MIN: f64 = 0.6;
    pub const ORDER_MAX: f64 = 1.1;
    pub const CONSERVATION: f64 = 1e-12;
    pub const RELAXATION: f64 = 1e-12;
    pub const RELAX_ENERGY: f64 = 1e-14;
    pub const CONVEXITY: f64 = 1e-10;
    pub const CONVEXITY_FD: f64 = 1e-2;
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub seed: u64,
    pub eigen_samples: usize,
    pub riemann_samples: usize,
    pub sv_samples: usize,
    pub profile_points: usize,
    pub weak_problems: usize,
    pub weak_tests: usize,
    pub convexity_pairs: usize,
    pub convergence_cells: Vec<usize>,
    /// Slip parameter of the convexity negative control; `None` skips it.
    pub diagnostic_zeta: Option<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            seed: 20_240_901,
            eigen_samples: 10_000,
            riemann_samples: 1_000,
            sv_samples: 1_000,
            profile_points: 1_000,
            weak_problems: 100,
            weak_tests: 10,
            convexity_pairs: 100,
            convergence_cells: vec![100, 200, 400, 800, 1600],
            diagnostic_zeta: Some(0.6),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub limit: f64,
    pub passed: bool,
    /// Logged for context; does not decide the property.
    pub informational: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, observed: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            observed,
            limit,
            passed: observed <= limit,
            informational: false,
        }
    }

    pub fn at_least(name: impl Into<String>, observed: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            observed,
            limit,
            passed: observed >= limit,
            informational: false,
        }
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            observed: if ok { 1.0 } else { 0.0 },
            limit: 1.0,
            passed: ok,
            informational: false,
        }
    }

    pub fn info(mut self) -> Self {
        self.informational = true;
        self
    }
}

/// A reproducible failing input.
#[derive(Debug, Clone, PartialEq)]
pub struct FailureCase {
    pub property: String,
    pub detail: String,
    pub params: Params,
    pub left: Option<PrimitiveState>,
    pub right: Option<PrimitiveState>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub id: u32,
    pub name: &'static str,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub failures: Vec<FailureCase>,
}

const MAX_RECORDED_FAILURES: usize = 8;

impl PropertyReport {
    fn new(id: u32, name: &'static str) -> Self {
        Self {
            id,
            name,
            checks: Vec::new(),
            notes: Vec::new(),
            failures: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks
            .iter()
            .filter(|c| !c.informational)
            .all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// One line: id, name, status and the deciding checks.
    pub fn summary(&self) -> String {
        let parts: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.informational)
            .map(|c| {
                format!(
                    "{}={:.3e}{}{:.1e}",
                    c.name,
                    c.observed,
                    if c.passed { " ok " } else { " !! " },
                    c.limit
                )
            })
            .collect();
        format!(
            "[{}] {:>2} {}: {}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            parts.join(", ")
        )
    }

    fn push_failure(&mut self, f: FailureCase) {
        if self.failures.len() < MAX_RECORDED_FAILURES {
            self.failures.push(f);
        }
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo.ln()..=hi.ln()).exp()
}

/// `h`, stretches log-uniform in `[1e-3, 1e3]`, `u` uniform in `[-10, 10]`.
pub fn random_state(rng: &mut ChaCha8Rng) -> PrimitiveState {
    PrimitiveState {
        h: log_uniform(rng, 1e-3, 1e3),
        u: rng.gen_range(-10.0..=10.0),
        sxx: log_uniform(rng, 1e-3, 1e3),
        szz: log_uniform(rng, 1e-3, 1e3),
    }
}

fn pick<T: Copy>(rng: &mut ChaCha8Rng, xs: &[T]) -> T {
    xs[rng.gen_range(0..xs.len())]
}

fn stream(seed: u64, property: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(property);
    rng
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

// ---------------------------------------------------------------------------
// 1. eigenstructure

struct EigenSample {
    residual: f64,
    min_dp_dh: f64,
    gn_minus: f64,
    gn_plus: f64,
    gn_fd: f64,
    ordered: bool,
}

fn eigen_sample(s: &PrimitiveState, p: &Params) -> Result<EigenSample> {
    let a = model::quasilinear_matrix(s, p);
    let a_norm = norm(&a.iter().flatten().copied().collect::<Vec<_>>());
    let cf = model::char_fields(s, p)?;
    let ev = model::eigenvalues(s, p)?;
    let pairs = [
        (ev[0], cf.minus),
        (ev[1], cf.zero_1),
        (ev[2], cf.zero_2),
        (ev[3], cf.plus),
    ];
    let mut residual: f64 = 0.0;
    for (lambda, r) in pairs {
        let mut d = [0.0; 4];
        for i in 0..4 {
            d[i] = (0..4).map(|j| a[i][j] * r[j]).sum::<f64>() - lambda * r[i];
        }
        residual = residual.max(norm(&d) / (1.0 + a_norm));
    }
    let dp = model::dp_dh(s.h, model::invariants(s, p), p)?;
    let (gn_minus, gn_plus) = model::genuine_nonlinearity(s, p)?;
    // central difference of lambda+- along r+-
    let mut gn_fd: f64 = 0.0;
    for (idx, r, gn) in [(0, cf.minus, gn_minus), (3, cf.plus, gn_plus)] {
        let eps = 1e-6;
        let shift = |sign: f64| -> Result<f64> {
            let mut v = s.as_array();
            for k in 0..4 {
                v[k] += sign * eps * r[k];
            }
            Ok(model::eigenvalues(&PrimitiveState::from_array(v), p)?[idx])
        };
        let fd = (shift(1.0)? - shift(-1.0)?) / (2.0 * eps);
        gn_fd = gn_fd.max((fd - gn).abs() / gn.abs().max(1e-300));
    }
    Ok(EigenSample {
        residual,
        min_dp_dh: dp,
        gn_minus,
        gn_plus,
        gn_fd,
        ordered: ev[0] < ev[1] && ev[1] == ev[2] && ev[2] < ev[3],
    })
}

pub fn eigenstructure(cfg: &SweepConfig) -> PropertyReport {
    let mut rng = stream(cfg.seed, 1);
    let samples: Vec<(Params, PrimitiveState)> = (0..cfg.eigen_samples)
        .map(|_| {
            let p = Params::new(GRAVITY, pick(&mut rng, &MODULI), pick(&mut rng, &ZETAS)).unwrap();
            (p, random_state(&mut rng))
        })
        .collect();
    let results: Vec<Result<EigenSample>> = samples
        .par_iter()
        .map(|(p, s)| eigen_sample(s, p))
        .collect();
    let mut rep = PropertyReport::new(1, "eigenstructure");
    let (
        mut res,
        mut dp_min,
        mut gn_minus_max,
        mut gn_plus_min,
        mut gn_fd,
        mut errors,
        mut unordered,
    ) = (
        0.0f64,
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        0.0f64,
        0usize,
        0usize,
    );
    for ((p, s), r) in samples.iter().zip(results) {
        match r {
            Ok(e) => {
                res = res.max(e.residual);
                dp_min = dp_min.min(e.min_dp_dh);
                gn_minus_max = gn_minus_max.max(e.gn_minus);
                gn_plus_min = gn_plus_min.min(e.gn_plus);
                gn_fd = gn_fd.max(e.gn_fd);
                if !e.ordered {
                    unordered += 1;
                }
            }
            Err(e) => {
                errors += 1;
                rep.push_failure(FailureCase {
                    property: "eigenstructure".into(),
                    detail: e.to_string(),
                    params: *p,
                    left: Some(*s),
                    right: None,
                });
            }
        }
    }
    rep.checks
        .push(Check::at_most("errors", errors as f64, 0.0));
    rep.checks
        .push(Check::at_most("eigen_residual", res, tol::EIGEN_RESIDUAL));
    rep.checks
        .push(Check::at_least("min_dp_dh", dp_min, f64::MIN_POSITIVE));
    rep.checks.push(Check::at_most(
        "max_gn_minus",
        gn_minus_max,
        -f64::MIN_POSITIVE,
    ));
    rep.checks.push(Check::at_least(
        "min_gn_plus",
        gn_plus_min,
        f64::MIN_POSITIVE,
    ));
    rep.checks
        .push(Check::at_most("gn_fd_mismatch", gn_fd, tol::GN_FD));
    rep.checks
        .push(Check::at_most("unordered", unordered as f64, 0.0));
    rep.notes
        .push(format!("{} random states", cfg.eigen_samples));
    rep
}

// ---------------------------------------------------------------------------
// 2-3. Riemann solver and entropy

/// Random Riemann data with `G > 0`.
pub fn riemann_cases(seed: u64, n: usize) -> Vec<(Params, PrimitiveState, PrimitiveState)> {
    let mut rng = stream(seed, 2);
    (0..n)
        .map(|_| {
            let p = Params::new(
                GRAVITY,
                pick(&mut rng, &MODULI[1..]),
                pick(&mut rng, &ZETAS),
            )
            .unwrap();
            let l = random_state(&mut rng);
            let r = random_state(&mut rng);
            (p, l, r)
        })
        .collect()
}

fn speed_scale(s: &PrimitiveState, p: &Params) -> f64 {
    s.u.abs() + model::celerity(s, p).unwrap_or(0.0)
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Vacuum { .. } => "vacuum",
        Error::SaintVenantVacuum { .. } => "classical vacuum",
        Error::NoConvergence { .. } => "no convergence",
        Error::VacuumProximity { .. } => "vacuum floor",
        _ => "other",
    }
}

#[derive(Debug, Clone, Copy)]
struct EntropyStats {
    weak: usize,
    weak_max: f64,
    strong: usize,
    strong_min: f64,
    strong_max: f64,
}

impl EntropyStats {
    fn new() -> Self {
        Self {
            weak: 0,
            weak_max: f64::NEG_INFINITY,
            strong: 0,
            strong_min: f64::INFINITY,
            strong_max: f64::NEG_INFINITY,
        }
    }
}

fn zeta_key(z: f64) -> u64 {
    (z * 1e6).round() as u64
}

/// Properties 2 and 3 over one set of solved problems, plus the solutions.
pub fn riemann_and_entropy(
    cfg: &SweepConfig,
) -> (PropertyReport, PropertyReport, Vec<RiemannSolution>) {
    let cases = riemann_cases(cfg.seed, cfg.riemann_samples);
    let solved: Vec<Result<RiemannSolution>> = cases
        .par_iter()
        .map(|(p, l, r)| riemann::solve(*l, *r, p))
        .collect();

    let mut r2 = PropertyReport::new(2, "riemann solver");
    let mut r3 = PropertyReport::new(3, "entropy");
    let mut failures_by: BTreeMap<String, usize> = BTreeMap::new();
    let (mut rh, mut du, mut dp, mut order, mut lax) =
        (0.0f64, 0.0f64, 0.0f64, f64::INFINITY, f64::INFINITY);
    let (mut contact_e, mut n_shocks) = (0.0f64, 0usize);
    let mut by_zeta: BTreeMap<u64, EntropyStats> = BTreeMap::new();
    let mut solutions = Vec::new();
    let (mut unexplained, mut predicted_but_solved) = (0usize, 0usize);

    for ((p, l, r), res) in cases.iter().zip(solved) {
        let predicted = half_slip_vacuum(l, r, p) == Some(true);
        let sol = match res {
            Ok(s) => {
                predicted_but_solved += predicted as usize;
                s
            }
            Err(e) => {
                if !(predicted && matches!(e, Error::Vacuum { .. })) {
                    unexplained += 1;
                }
                *failures_by
                    .entry(format!("zeta={} {}", p.zeta, error_kind(&e)))
                    .or_default() += 1;
                r2.push_failure(FailureCase {
                    property: "riemann solver".into(),
                    detail: e.to_string(),
                    params: *p,
                    left: Some(*l),
                    right: Some(*r),
                });
                continue;
            }
        };
        let vscale = 1.0 + l.u.abs() + r.u.abs();
        du = du.max(sol.velocity_mismatch / vscale);
        let p2 = model::total_pressure(&sol.star_left, p);
        let p3 = model::total_pressure(&sol.star_right, p);
        let pscale = p2
            .abs()
            .max(p3.abs())
            .max(model::total_pressure(l, p).abs())
            .max(model::total_pressure(r, p).abs());
        dp = dp.max((p2 - p3).abs() / pscale);

        // ordering of rays
        let sscale = speed_scale(l, p).max(speed_scale(r, p)).max(1.0);
        let [wm, _, wp] = &sol.waves;
        let (m_lo, m_hi) = wm.speeds();
        let (p_lo, p_hi) = wp.speeds();
        let margins = [
            m_hi - m_lo,
            sol.u_star - m_hi,
            p_lo - sol.u_star,
            p_hi - p_lo,
        ];
        for m in margins {
            order = order.min(m / sscale);
        }

        let diag = sol.diagnostics();
        for j in &diag.discontinuities {
            if j.trivial {
                continue;
            }
            rh = rh.max(j.rh_relative);
            let e_rel = j.entropy / j.entropy_scale.max(f64::MIN_POSITIVE);
            if j.field == WaveField::Zero {
                contact_e = contact_e.max(e_rel.abs());
                continue;
            }
            n_shocks += 1;
            let stats = by_zeta
                .entry(zeta_key(p.zeta))
                .or_insert_with(EntropyStats::new);
            if j.amplitude <= tol::WEAK_SHOCK_AMPLITUDE {
                stats.weak += 1;
                stats.weak_max = stats.weak_max.max(e_rel);
                if e_rel > tol::WEAK_SHOCK_ENTROPY {
                    r3.push_failure(FailureCase {
                        property: "entropy".into(),
                        detail: format!(
                            "weak shock (amplitude {:.3e}) produces E/scale = {e_rel:e}",
                            j.amplitude
                        ),
                        params: *p,
                        left: Some(*l),
                        right: Some(*r),
                    });
                }
            } else {
                stats.strong += 1;
                stats.strong_min = stats.strong_min.min(e_rel);
                stats.strong_max = stats.strong_max.max(e_rel);
            }
        }
        // Lax inequalities
        for w in [wm, wp] {
            if w.trivial {
                continue;
            }
            if let WaveKind::Shock { speed } = w.kind {
                let lam = |s: &PrimitiveState| -> f64 {
                    let c = model::celerity(s, p).unwrap_or(f64::NAN);
                    match w.field {
                        WaveField::Minus => s.u - c,
                        _ => s.u + c,
                    }
                };
                let (ahead, behind) = (lam(&w.left), lam(&w.right));
                let m = (ahead - speed).min(speed - behind) / sscale;
                if !(m >= -tol::LAX) {
                    r2.push_failure(FailureCase {
                        property: "lax".into(),
                        detail: format!("margin {m:e}"),
                        params: *p,
                        left: Some(*l),
                        right: Some(*r),
                    });
                }
                lax = lax.min(m);
            }
        }
        solutions.push(sol);
    }

    let n_fail: usize = failures_by.values().sum();
    r2.checks
        .push(Check::at_most("unsolved", n_fail as f64, 0.0));
    r2.checks
        .push(Check::at_most("unsolved_not_half_slip_vacuum", unexplained as f64, 0.0).info());
    r2.checks.push(
        Check::at_most(
            "half_slip_vacuum_but_solved",
            predicted_but_solved as f64,
            0.0,
        )
        .info(),
    );
    r2.checks
        .push(Check::at_most("rh_relative", rh, tol::RH_RELATIVE));
    r2.checks
        .push(Check::at_most("contact_du", du, tol::CONTACT_DU));
    r2.checks
        .push(Check::at_most("contact_dp", dp, tol::CONTACT_DP));
    r2.checks
        .push(Check::at_least("ordering", order, -tol::ORDERING));
    r2.checks
        .push(Check::at_least("lax_margin", lax, -tol::LAX));
    r2.notes.push(format!(
        "{} problems, {} solved, {} nontrivial shocks",
        cases.len(),
        solutions.len(),
        n_shocks
    ));
    for (k, v) in &failures_by {
        r2.notes.push(format!("unsolved {k}: {v}"));
    }

    r3.checks.push(Check::at_most(
        "contact_entropy",
        contact_e,
        tol::CONTACT_ENTROPY,
    ));
    let weak_all = by_zeta
        .values()
        .filter(|s| s.weak > 0)
        .map(|s| s.weak_max)
        .fold(f64::NEG_INFINITY, f64::max);
    r3.checks.push(Check::at_most(
        "weak_shock_entropy",
        weak_all,
        tol::WEAK_SHOCK_ENTROPY,
    ));
    for (z, s) in &by_zeta {
        let zeta = *z as f64 / 1e6;
        if s.weak > 0 {
            r3.checks.push(
                Check::at_most(
                    format!("weak_shock_entropy[zeta={zeta}]"),
                    s.weak_max,
                    tol::WEAK_SHOCK_ENTROPY,
                )
                .info(),
            );
        }
        r3.notes.push(format!(
            "zeta={zeta}: {} weak shocks (max E/scale {:.3e}), {} strong shocks (E/scale in [{:.3e}, {:.3e}])",
            s.weak, s.weak_max, s.strong, s.strong_min, s.strong_max
        ));
    }
    (r2, r3, solutions)
}

// ---------------------------------------------------------------------------
// 4. classical oracle

pub fn saint_venant_equivalence(cfg: &SweepConfig) -> PropertyReport {
    let mut rng = stream(cfg.seed, 4);
    let p = Params::new(GRAVITY, 0.0, 0.0).unwrap();
    let mut cases = Vec::with_capacity(cfg.sv_samples);
    while cases.len() < cfg.sv_samples {
        let h_l = log_uniform(&mut rng, 1e-3, 1e3);
        let h_r = log_uniform(&mut rng, 1e-3, 1e3);
        let u_l = rng.gen_range(-10.0..=10.0);
        let u_r = rng.gen_range(-10.0..=10.0);
        if u_r - u_l >= 2.0 * ((GRAVITY * h_l).sqrt() + (GRAVITY * h_r).sqrt()) {
            continue;
        }
        cases.push((
            PrimitiveState::new(h_l, u_l, 1.0, 1.0).unwrap(),
            PrimitiveState::new(h_r, u_r, 1.0, 1.0).unwrap(),
        ));
    }
    let results: Vec<Result<(f64, f64)>> = cases
        .par_iter()
        .map(|(l, r)| {
            let sol = riemann::solve(*l, *r, &p)?;
            let sv = sv_exact(l.h, l.u, r.h, r.u, GRAVITY)?;
            let dh = (sol.star_left.h - sv.h_star)
                .abs()
                .max((sol.star_right.h - sv.h_star).abs())
                / sv.h_star.max(1.0);
            let du = (sol.u_star - sv.u_star).abs() / sv.u_star.abs().max(1.0);
            Ok((dh, du))
        })
        .collect();
    let mut rep = PropertyReport::new(4, "classical oracle");
    let (mut dh, mut du, mut errors) = (0.0f64, 0.0f64, 0usize);
    for ((l, r), res) in cases.iter().zip(results) {
        match res {
            Ok((a, b)) => {
                dh = dh.max(a);
                du = du.max(b);
                if a > tol::SV_STAR || b > tol::SV_STAR {
                    rep.push_failure(FailureCase {
                        property: "classical oracle".into(),
                        detail: format!("dh {a:e}, du {b:e}"),
                        params: p,
                        left: Some(*l),
                        right: Some(*r),
                    });
                }
            }
            Err(e) => {
                errors += 1;
                rep.push_failure(FailureCase {
                    property: "classical oracle".into(),
                    detail: e.to_string(),
                    params: p,
                    left: Some(*l),
                    right: Some(*r),
                });
            }
        }
    }
    rep.checks
        .push(Check::at_most("errors", errors as f64, 0.0));
    rep.checks.push(Check::at_most("star_h", dh, tol::SV_STAR));
    rep.checks.push(Check::at_most("star_u", du, tol::SV_STAR));

    // dam-break profile
    let l = PrimitiveState::new(2.0, 0.0, 1.0, 1.0).unwrap();
    let r = PrimitiveState::new(1.0, 0.0, 1.0, 1.0).unwrap();
    let profile = (|| -> Result<f64> {
        let sol = riemann::solve(l, r, &p)?;
        let sv = sv_exact(2.0, 0.0, 1.0, 0.0, GRAVITY)?;
        let n = cfg.profile_points.max(2);
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let xi = -8.0 + 16.0 * i as f64 / (n - 1) as f64;
            let s = sol.sample(xi)?;
            let (h, u) = sv.sample(xi);
            worst = worst.max((s.h - h).abs()).max((s.u - u).abs());
        }
        Ok(worst)
    })();
    match profile {
        Ok(w) => rep
            .checks
            .push(Check::at_most("dam_break_profile", w, tol::SV_PROFILE)),
        Err(e) => {
            rep.checks.push(Check::holds("dam_break_profile", false));
            rep.notes.push(format!("profile failed: {e}"));
        }
    }
    rep.notes
        .push(format!("{} non-vacuum classical problems", cases.len()));
    rep
}

// ---------------------------------------------------------------------------
// 5. vanishing elasticity

pub const G_SEQUENCE: [f64; 5] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5];

pub fn elastic_limit(_cfg: &SweepConfig) -> PropertyReport {
    let mut rep = PropertyReport::new(5, "vanishing elasticity");
    let l = PrimitiveState::new(1.1, 0.0, 1.0, 1.0).unwrap();
    let r = PrimitiveState::new(1.0, 0.0, 1.0, 1.0).unwrap();
    for zeta in ZETAS {
        let p = Params::new(GRAVITY, 1.0, zeta).unwrap();
        match g_limit_study(l, r, &p, &G_SEQUENCE) {
            Ok(t) => {
                let last = t.rows.last().map(|r| r.h_error).unwrap_or(f64::NAN);
                let main = zeta == 0.25;
                let mono = Check::holds(format!("monotone[zeta={zeta}]"), t.monotone);
                let fin = Check::at_most(
                    format!("final_h_error[zeta={zeta}]"),
                    last,
                    tol::G_LIMIT_FINAL,
                );
                rep.checks.push(if main { mono } else { mono.info() });
                rep.checks.push(if main { fin } else { fin.info() });
                let errs: Vec<String> = t
                    .rows
                    .iter()
                    .map(|r| format!("{:.3e}", r.h_error))
                    .collect();
                let rates: Vec<String> =
                    t.observed_rates.iter().map(|r| format!("{r:.3}")).collect();
                rep.notes.push(format!(
                    "zeta={zeta}: h errors [{}], observed rates [{}]",
                    errs.join(", "),
                    rates.join(", ")
                ));
            }
            Err(e) => {
                rep.checks
                    .push(Check::holds(format!("study[zeta={zeta}]"), false));
                rep.push_failure(FailureCase {
                    property: "vanishing elasticity".into(),
                    detail: e.to_string(),
                    params: p,
                    left: Some(l),
                    right: Some(r),
                });
            }
        }
    }
    rep
}

// ---------------------------------------------------------------------------
// 6. vacuum divergence

pub fn vacuum(_cfg: &SweepConfig) -> PropertyReport {
    let mut rep = PropertyReport::new(6, "vacuum divergence");
    let anchor = PrimitiveState::new(1.0, 0.0, 1.0, 1.0).unwrap();
    let depths = geometric_depths(1.0, 40);
    let elastic = (|| -> Result<_> {
        let p = Params::new(GRAVITY, 1.0, 0.25)?;
        let side = CurveSide::left(anchor, &p)?;
        vacuum_divergence(&side, &depths, &p)
    })();
    match elastic {
        Ok(v) => {
            let last = *v.magnitudes.last().unwrap();
            rep.checks
                .push(Check::holds("strictly_increasing", v.strictly_increasing));
            rep.checks.push(Check::at_least(
                "final_magnitude",
                last,
                tol::VACUUM_FACTOR * GRAVITY.sqrt(),
            ));
        }
        Err(e) => {
            rep.checks.push(Check::holds("elastic_sweep", false));
            rep.notes.push(format!("elastic sweep failed: {e}"));
        }
    }
    let classical = (|| -> Result<_> {
        let p = Params::new(GRAVITY, 0.0, 0.25)?;
        let side = CurveSide::left(anchor, &p)?;
        vacuum_divergence(&side, &depths, &p)
    })();
    match classical {
        Ok(v) => {
            let limit = 2.0 * GRAVITY.sqrt();
            let last = *v.magnitudes.last().unwrap();
            let extrapolated = aitken_limit(&v.magnitudes).unwrap_or(last);
            rep.checks.push(Check::holds(
                "classical_monotone_bounded",
                v.strictly_increasing && v.magnitudes.iter().all(|&m| m < limit),
            ));
            rep.checks.push(Check::at_most(
                "classical_limit_gap",
                (extrapolated - limit).abs(),
                tol::SV_VACUUM_LIMIT,
            ));
            rep.checks.push(
                Check::at_most(
                    "classical_last_term_gap",
                    (last - limit).abs(),
                    tol::SV_VACUUM_LIMIT,
                )
                .info(),
            );
        }
        Err(e) => {
            rep.checks.push(Check::holds("classical_sweep", false));
            rep.notes.push(format!("classical sweep failed: {e}"));
        }
    }
    rep
}

// ---------------------------------------------------------------------------
// 7. weak form

pub fn weak_form(cfg: &SweepConfig, solutions: &[RiemannSolution]) -> PropertyReport {
    let mut rep = PropertyReport::new(7, "weak form");
    let picked: Vec<&RiemannSolution> = solutions.iter().take(cfg.weak_problems).collect();
    let results: Vec<Result<f64>> = picked
        .par_iter()
        .map(|sol| {
            let bx = SpaceTimeBox::containing(sol, 0.5, 1.5)?;
            weak_form_residual(sol, &bx, cfg.weak_tests)
        })
        .collect();
    let (mut worst, mut errors) = (0.0f64, 0usize);
    for (sol, r) in picked.iter().zip(results) {
        match r {
            Ok(v) => {
                worst = worst.max(v);
                if v > tol::WEAK_FORM {
                    rep.push_failure(FailureCase {
                        property: "weak form".into(),
                        detail: format!("residual {v:e}"),
                        params: sol.params,
                        left: Some(sol.left),
                        right: Some(sol.right),
                    });
                }
            }
            Err(e) => {
                errors += 1;
                rep.push_failure(FailureCase {
                    property: "weak form".into(),
                    detail: e.to_string(),
                    params: sol.params,
                    left: Some(sol.left),
                    right: Some(sol.right),
                });
            }
        }
    }
    rep.checks.push(Check::at_least(
        "problems",
        picked.len() as f64,
        cfg.weak_problems as f64,
    ));
    rep.checks
        .push(Check::at_most("errors", errors as f64, 0.0));
    rep.checks
        .push(Check::at_most("max_residual", worst, tol::WEAK_FORM));
    rep.notes.push(format!(
        "{} problems x {} test functions",
        picked.len(),
        cfg.weak_tests
    ));
    rep
}

// ---------------------------------------------------------------------------
// 8. Godunov convergence and conservation

pub fn dam_break_params() -> Params {
    Params::new(GRAVITY, 1.0, 0.25).unwrap()
}

pub fn dam_break_states() -> (PrimitiveState, PrimitiveState) {
    (
        PrimitiveState::new(2.0, 0.0, 1.0, 1.0).unwrap(),
        PrimitiveState::new(1.0, 0.0, 1.0, 1.0).unwrap(),
    )
}

/// L1 errors of `(h, u, sxx, szz)` on `n` cells of `[-1, 1]` at `t = 0.1`.
pub fn dam_break_errors(n: usize) -> Result<Vector4> {
    let p = dam_break_params();
    let (l, r) = dam_break_states();
    let t_end = 0.1;
    let config = SimConfig {
        params: p,
        grid: Grid::new(-1.0, 1.0, n)?,
        cfl: 0.9,
        t_end,
        boundary: Boundary::Transmissive,
        snapshot_times: vec![],
    };
    let snaps = fv::run(&config, |x| if x < 0.0 { l } else { r }).map_err(|e| e.error)?;
    let field = &snaps.last().expect("final snapshot").field;
    let sol = riemann::solve(l, r, &p)?;
    let dx = config.grid.dx();
    let mut err = [0.0; 4];
    for (i, s) in field.primitives(&p)?.iter().enumerate() {
        let ex = sol.sample(config.grid.center(i) / t_end)?;
        let (a, b) = (s.as_array(), ex.as_array());
        for k in 0..4 {
            err[k] += (a[k] - b[k]).abs() * dx;
        }
    }
    Ok(err)
}

/// Least-squares slope of `ln e` against `ln dx`.
pub fn observed_order(cells: &[usize], errors: &[f64]) -> f64 {
    let xs: Vec<f64> = cells.iter().map(|&n| (2.0 / n as f64).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Largest per-step change of the conserved totals on a periodic dam break,
/// relative to the total magnitude.
pub fn periodic_drift(n: usize, steps: usize) -> Result<f64> {
    let p = dam_break_params();
    let (l, r) = dam_break_states();
    let config = SimConfig {
        params: p,
        grid: Grid::new(-1.0, 1.0, n)?,
        cfl: 0.9,
        t_end: f64::MAX,
        boundary: Boundary::Periodic,
        snapshot_times: vec![],
    };
    let mut field = fv::init(&config, |x| if x.abs() < 0.5 { l } else { r })?;
    let mut worst: f64 = 0.0;
    for _ in 0..steps {
        let before = field.totals();
        let mags_before = field.magnitudes();
        let dt = fv::stable_dt(&field, &config)?;
        field = fv::step(&field, &config, dt)?;
        let after = field.totals();
        let mags = field.magnitudes();
        for k in 0..4 {
            worst = worst.max((after[k] - before[k]).abs() / mags[k].max(mags_before[k]));
        }
    }
    Ok(worst)
}

pub fn godunov(cfg: &SweepConfig) -> PropertyReport {
    let mut rep = PropertyReport::new(8, "godunov convergence");
    let errors: Result<Vec<Vector4>> = cfg
        .convergence_cells
        .iter()
        .map(|&n| dam_break_errors(n))
        .collect();
    match errors {
        Ok(errs) => {
            let h: Vec<f64> = errs.iter().map(|e| e[0]).collect();
            let decreasing = h.windows(2).all(|w| w[1] < w[0]);
            let order = observed_order(&cfg.convergence_cells, &h);
            rep.checks.push(Check::holds("l1_decreasing", decreasing));
            rep.checks
                .push(Check::at_least("order_min", order, tol::ORDER_MIN));
            rep.checks
                .push(Check::at_most("order_max", order, tol::ORDER_MAX));
            for (k, name) in ["u", "sxx", "szz"].iter().enumerate() {
                let e: Vec<f64> = errs.iter().map(|v| v[k + 1]).collect();
                rep.checks.push(
                    Check::at_least(
                        format!("order_{name}"),
                        observed_order(&cfg.convergence_cells, &e),
                        0.0,
                    )
                    .info(),
                );
            }
            for (n, e) in cfg.convergence_cells.iter().zip(&errs) {
                rep.notes.push(format!(
                    "N={n}: L1 h {:.6e}, u {:.6e}, sxx {:.6e}, szz {:.6e}",
                    e[0], e[1], e[2], e[3]
                ));
            }
        }
        Err(e) => {
            rep.checks.push(Check::holds("convergence_runs", false));
            rep.notes.push(format!("convergence run failed: {e}"));
        }
    }
    match periodic_drift(200, 60) {
        Ok(d) => rep
            .checks
            .push(Check::at_most("periodic_drift", d, tol::CONSERVATION)),
        Err(e) => {
            rep.checks.push(Check::holds("periodic_run", false));
            rep.notes.push(format!("periodic run failed: {e}"));
        }
    }
    rep
}

// ---------------------------------------------------------------------------
// 9. relaxation

pub fn relaxation(_cfg: &SweepConfig) -> PropertyReport {
    let mut rep = PropertyReport::new(9, "relaxation");
    let uniform = (|| -> Result<f64> {
        let p = Params::new(GRAVITY, 1.0, 0.25)?.with_relaxation_time(1.0)?;
        let config = SimConfig {
            params: p,
            grid: Grid::new(0.0, 1.0, 50)?,
            cfl: 0.9,
            t_end: 1.0,
            boundary: Boundary::Periodic,
            snapshot_times: vec![],
        };
        let s = PrimitiveState::new(1.0, 0.0, 2.0, 1.0)?;
        let snaps = fv::run(&config, |_| s).map_err(|e| e.error)?;
        let exact = 1.0 + (-1.0f64).exp();
        let mut worst: f64 = 0.0;
        for c in snaps.last().unwrap().field.primitives(&p)? {
            worst = worst.max((c.sxx - exact).abs());
        }
        Ok(worst)
    })();
    match uniform {
        Ok(w) => rep
            .checks
            .push(Check::at_most("sxx_at_t1", w, tol::RELAXATION)),
        Err(e) => {
            rep.checks.push(Check::holds("uniform_run", false));
            rep.notes.push(format!("uniform run failed: {e}"));
        }
    }
    let energy = (|| -> Result<f64> {
        let p = Params::new(GRAVITY, 1.0, 0.25)?.with_relaxation_time(0.05)?;
        let config = SimConfig {
            params: p,
            grid: Grid::new(-1.0, 1.0, 200)?,
            cfl: 0.9,
            t_end: f64::MAX,
            boundary: Boundary::Transmissive,
            snapshot_times: vec![],
        };
        let l = PrimitiveState::new(2.0, 0.0, 2.0, 0.5)?;
        let r = PrimitiveState::new(1.0, 0.0, 0.5, 3.0)?;
        let dx = config.grid.dx();
        let mut field = fv::init(&config, |x| if x < 0.0 { l } else { r })?;
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..100 {
            let dt = fv::stable_dt(&field, &config)?;
            let moved = fv::step(&field, &config, dt)?;
            let before = moved.free_energy(&p, dx)?;
            field = fv::relax(&moved, &p, dt)?;
            let after = field.free_energy(&p, dx)?;
            worst = worst.max((after - before) / before.abs());
        }
        Ok(worst)
    })();
    match energy {
        Ok(w) => rep.checks.push(Check::at_most(
            "relax_energy_increase",
            w,
            tol::RELAX_ENERGY,
        )),
        Err(e) => {
            rep.checks.push(Check::holds("energy_run", false));
            rep.notes.push(format!("energy run failed: {e}"));
        }
    }
    rep
}

// ---------------------------------------------------------------------------
// 10. convexity

pub fn convexity(cfg: &SweepConfig) -> PropertyReport {
    let mut rep = PropertyReport::new(10, "convexity");
    let mut rng = stream(cfg.seed, 10);
    let pairs: Vec<(Invariants, f64)> = (0..cfg.convexity_pairs)
        .map(|_| {
            let inv = Invariants {
                x: log_uniform(&mut rng, 1e-3, 1e3),
                z_inv: log_uniform(&mut rng, 1e-3, 1e3),
            };
            (inv, pick(&mut rng, &MODULI[1..]))
        })
        .collect();
    let sweep = |zeta: f64, mode: ConvexityMode| -> Result<(f64, f64)> {
        let mut min_eig = f64::INFINITY;
        let mut fd: f64 = 0.0;
        for (inv, gm) in &pairs {
            let p = Params {
                g: GRAVITY,
                elastic_modulus: *gm,
                zeta,
                relaxation_time: None,
            };
            let r = convexity_check(*inv, &p, (1e-3, 1e3), (-10.0, 10.0), 61, 5, mode)?;
            min_eig = min_eig.min(r.min_eigenvalue);
            fd = fd.max(r.fd_mismatch);
        }
        Ok((min_eig, fd))
    };
    for zeta in [0.0, 0.25, 0.5] {
        match sweep(zeta, ConvexityMode::Standard) {
            Ok((m, fd)) => {
                rep.checks.push(Check::at_least(
                    format!("min_eigenvalue[zeta={zeta}]"),
                    m,
                    -tol::CONVEXITY,
                ));
                rep.checks.push(Check::at_most(
                    format!("fd_mismatch[zeta={zeta}]"),
                    fd,
                    tol::CONVEXITY_FD,
                ));
            }
            Err(e) => {
                rep.checks
                    .push(Check::holds(format!("sweep[zeta={zeta}]"), false));
                rep.notes.push(format!("zeta={zeta}: {e}"));
            }
        }
    }
    if let Some(zeta) = cfg.diagnostic_zeta {
        match sweep(zeta, ConvexityMode::Diagnostic) {
            Ok((m, _)) => {
                rep.checks.push(Check::holds(
                    format!("negative_control_violation[zeta={zeta}]"),
                    m < -tol::CONVEXITY,
                ));
                rep.notes.push(format!(
                    "negative control zeta={zeta}: min eigenvalue {m:.3e}"
                ));
            }
            Err(e) => {
                rep.checks.push(Check::holds("negative_control", false));
                rep.notes.push(format!("negative control failed: {e}"));
            }
        }
    }
    rep
}

/// All ten properties in order.
pub fn run_all(cfg: &SweepConfig) -> Vec<PropertyReport> {
    let r1 = eigenstructure(cfg);
    let (r2, r3, solutions) = riemann_and_entropy(cfg);
    let r7 = weak_form(cfg, &solutions);
    vec![
        r1,
        r2,
        r3,
        saint_venant_equivalence(cfg),
        elastic_limit(cfg),
        vacuum(cfg),
        r7,
        godunov(cfg),
        relaxation(cfg),
        convexity(cfg),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_deterministic() {
        assert_eq!(riemann_cases(7, 20), riemann_cases(7, 20));
        assert_ne!(riemann_cases(7, 20), riemann_cases(8, 20));
    }

    #[test]
    fn least_squares_order_of_exact_power() {
        let cells = [100, 200, 400];
        let errs: Vec<f64> = cells
            .iter()
            .map(|&n| 3.0 * (2.0 / n as f64).powf(0.75))
            .collect();
        assert!((observed_order(&cells, &errs) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn small_eigen_sweep_passes() {
        let cfg = SweepConfig {
            eigen_samples: 200,
            ..Default::default()
        };
        let r = eigenstructure(&cfg);
        assert!(r.passed(), "{}", r.summary());
    }
}
