//! Frozen values from independent high-precision computations, plus
//! finite-difference and dense-eigensolver cross-checks.

use gsv_core::model::{self, Params, PrimitiveState};
use gsv_core::riemann::{self, jump_report, WaveField};
use gsv_core::waves::{self, CurveBranch};
use nalgebra::Matrix4;

fn st(h: f64, u: f64, sxx: f64, szz: f64) -> PrimitiveState {
    PrimitiveState::new(h, u, sxx, szz).unwrap()
}

#[test]
fn gsv_dam_break_star_state() {
    // 40-digit quadrature and root finding on the curve integrals
    let (h2, h3, u) = (
        1.533_113_304_851_465,
        1.354_410_947_701_174_5,
        1.185_236_731_851_299_7,
    );
    let p = Params::new(9.81, 1.0, 0.25).unwrap();
    let sol = riemann::solve(st(2.0, 0.0, 1.0, 1.0), st(1.0, 0.0, 1.0, 1.0), &p).unwrap();
    assert!((sol.star_left.h - h2).abs() < 1e-10, "{}", sol.star_left.h);
    assert!(
        (sol.star_right.h - h3).abs() < 1e-10,
        "{}",
        sol.star_right.h
    );
    assert!((sol.u_star - u).abs() < 1e-10, "{}", sol.u_star);
    assert_eq!(sol.minus_wave().kind_name(), "rarefaction");
    assert_eq!(sol.plus_wave().kind_name(), "shock");
}

#[test]
fn eigenvalues_match_a_dense_solver() {
    let p = Params::new(9.81, 10.0, 0.4).unwrap();
    for s in [
        st(1.0, 0.3, 1.0, 1.0),
        st(0.01, -4.0, 300.0, 0.02),
        st(50.0, 2.0, 0.001, 7.0),
    ] {
        let a = model::quasilinear_matrix(&s, &p);
        let m = Matrix4::from_fn(|i, j| a[i][j]);
        let mut dense: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.re).collect();
        dense.sort_by(f64::total_cmp);
        let analytic = model::eigenvalues(&s, &p).unwrap();
        let scale = 1.0 + m.norm();
        for (d, e) in dense.iter().zip(analytic) {
            assert!((d - e).abs() <= 1e-7 * scale, "{d} vs {e} at {s:?}");
        }
    }
}

#[test]
fn eigenvectors_satisfy_the_eigen_equation() {
    let p = Params::new(9.81, 1.0, 0.1).unwrap();
    let s = st(0.7, -1.2, 3.0, 0.4);
    let a = Matrix4::from_fn(|i, j| model::quasilinear_matrix(&s, &p)[i][j]);
    let r = model::char_fields(&s, &p).unwrap();
    let [lm, l0, _, lp] = model::eigenvalues(&s, &p).unwrap();
    for (v, l) in [(r.minus, lm), (r.zero_1, l0), (r.zero_2, l0), (r.plus, lp)] {
        let v = nalgebra::Vector4::from_column_slice(&v);
        assert!((a * v - v * l).norm() <= 1e-12 * (1.0 + a.norm()) * v.norm());
    }
}

#[test]
fn pressure_slope_matches_finite_differences() {
    for zeta in [0.0, 0.25, 0.5] {
        let p = Params::new(9.81, 2.0, zeta).unwrap();
        let inv = model::invariants(&st(1.0, 0.0, 5.0, 0.2), &p);
        for h in [0.05, 0.5, 3.0] {
            let d = 1e-5 * h;
            let fd = (waves::p_of_h(h + d, inv, &p) - waves::p_of_h(h - d, inv, &p)) / (2.0 * d);
            let exact = model::dp_dh(h, inv, &p).unwrap();
            assert!(
                (fd - exact).abs() <= 1e-7 * exact.abs(),
                "zeta={zeta} h={h}"
            );
        }
    }
}

#[test]
fn genuine_nonlinearity_matches_finite_differences() {
    let p = Params::new(9.81, 1.0, 0.25).unwrap();
    let s = st(0.8, 0.5, 2.0, 0.6);
    let r = model::char_fields(&s, &p).unwrap().plus;
    let lam = |e: f64| {
        let t = st(
            s.h + e * r[0],
            s.u + e * r[1],
            s.sxx + e * r[2],
            s.szz + e * r[3],
        );
        model::eigenvalues(&t, &p).unwrap()[3]
    };
    let e = 1e-5;
    let fd = (lam(e) - lam(-e)) / (2.0 * e);
    let (_, gn) = model::genuine_nonlinearity(&s, &p).unwrap();
    assert!((fd - gn).abs() <= 1e-6 * gn.abs(), "{fd} vs {gn}");
}

#[test]
fn rarefaction_curve_reaches_a_known_integral() {
    // G = 0: u = u_ref + 2 (sqrt(g h_ref) - sqrt(g h))
    let p = Params::new(9.81, 0.0, 0.25).unwrap();
    let side = waves::CurveSide::left(st(1.0, 0.0, 1.0, 1.0), &p).unwrap();
    let u = waves::rarefaction_velocity(0.25, &side, &p).unwrap();
    let exact = 2.0 * (9.81f64.sqrt() - (9.81f64 * 0.25).sqrt());
    assert!((u - exact).abs() < 1e-12);
    let pt = waves::curve_point_at_depth(0.25, &side, &p).unwrap();
    assert_eq!(pt.branch, CurveBranch::Rarefaction);
}

/// Weak symmetric compression: two weak shocks.
fn weak_shock_entropy(zeta: f64) -> f64 {
    let p = Params::new(9.81, 1.0, zeta).unwrap();
    let sol = riemann::solve(st(1.0, 0.05, 10.0, 0.1), st(1.0, -0.05, 10.0, 0.1), &p).unwrap();
    let w = sol.plus_wave();
    assert_eq!(w.kind_name(), "shock");
    let (speed, _) = w.speeds();
    let j = jump_report(WaveField::Plus, speed, &w.left, &w.right, false, &p);
    assert!(j.amplitude < 0.1);
    j.entropy / j.entropy_scale
}

#[test]
fn weak_shocks_dissipate_without_slip() {
    assert!(weak_shock_entropy(0.0) <= 0.0);
}

#[test]
fn weak_shocks_produce_free_energy_with_slip() {
    // known defect of the free energy for zeta > 0, kept as a regression
    assert!(weak_shock_entropy(0.5) > 1e-8);
}
