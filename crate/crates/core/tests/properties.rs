use gsv_core::model::{self, ConservedState, Params, PrimitiveState};
use gsv_core::riemann::{self, velocity_gap};
use gsv_core::waves::{self, CurveSide};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = Params> {
    (
        prop::sample::select(vec![0.0, 0.1, 0.25, 0.4, 0.5]),
        prop::sample::select(vec![0.1, 1.0, 10.0]),
    )
        .prop_map(|(zeta, gm)| Params::new(9.81, gm, zeta).unwrap())
}

fn state() -> impl Strategy<Value = PrimitiveState> {
    (-2.0f64..2.0, -3.0f64..3.0, -1.5f64..1.5, -1.5f64..1.5).prop_map(|(lh, u, lx, lz)| {
        PrimitiveState::new(10f64.powf(lh), u, 10f64.powf(lx), 10f64.powf(lz)).unwrap()
    })
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn conserved_round_trip(p in params(), s in state()) {
        let back = ConservedState::from_primitive(&s, &p).to_primitive(&p).unwrap();
        for (a, b) in s.as_array().iter().zip(back.as_array()) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn galilean_shift(p in params(), l in state(), r in state(), a in -5.0f64..5.0) {
        let Ok(base) = riemann::solve(l, r, &p) else { return Ok(()); };
        let shift = |s: PrimitiveState| PrimitiveState { u: s.u + a, ..s };
        let moved = riemann::solve(shift(l), shift(r), &p).unwrap();
        prop_assert!(close(moved.u_star, base.u_star + a, 1e-10));
        prop_assert!(close(moved.star_left.h, base.star_left.h, 1e-10));
        prop_assert!(close(moved.star_right.h, base.star_right.h, 1e-10));
    }

    #[test]
    fn mirror_symmetry(p in params(), l in state(), r in state()) {
        let Ok(base) = riemann::solve(l, r, &p) else { return Ok(()); };
        let flip = |s: PrimitiveState| PrimitiveState { u: -s.u, ..s };
        let m = riemann::solve(flip(r), flip(l), &p).unwrap();
        prop_assert!(close(m.u_star, -base.u_star, 1e-10));
        prop_assert!(close(m.star_left.h, base.star_right.h, 1e-10));
        prop_assert!(close(m.star_right.h, base.star_left.h, 1e-10));
    }

    #[test]
    fn velocity_gap_increases(p in params(), l in state(), r in state(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let lc = CurveSide::left(l, &p).unwrap();
        let rc = CurveSide::right(r, &p).unwrap();
        let (p_lo, p_hi) = (lc.pressure.min(rc.pressure), lc.pressure.max(rc.pressure));
        let (lo, hi) = (p_lo - 1.0 - p_lo.abs(), p_hi + 1.0 + p_hi.abs());
        let (p1, p2) = (lo + a.min(b) * (hi - lo), lo + a.max(b) * (hi - lo));
        let (Ok(f1), Ok(f2)) = (velocity_gap(p1, &lc, &rc, &p), velocity_gap(p2, &lc, &rc, &p)) else {
            return Ok(());
        };
        prop_assert!(f1 <= f2 + 1e-12 * (1.0 + f1.abs()));
    }

    #[test]
    fn solutions_satisfy_jump_conditions(p in params(), l in state(), r in state()) {
        let Ok(sol) = riemann::solve(l, r, &p) else { return Ok(()); };
        for j in sol.diagnostics().discontinuities {
            prop_assert!(j.rh_relative <= 1e-9, "{j:?}");
        }
        prop_assert!(sol.velocity_mismatch <= riemann::ROOT_TOL * (1.0 + l.u.abs() + r.u.abs()));
    }

    #[test]
    fn shock_and_rarefaction_branches_are_tangent(p in params(), s in state()) {
        // one-sided curvature estimates of u(h) at the anchor agree, on the
        // scale c/h^2 of a curvature mismatch
        let side = CurveSide::left(s, &p).unwrap();
        let slope = -model::celerity(&s, &p).unwrap() / s.h;
        let d = 1e-3 * s.h;
        let shock = waves::hugoniot_velocity(s.h + d, &side, &p).unwrap();
        let fan = waves::rarefaction_velocity(s.h - d, &side, &p).unwrap();
        let a = 2.0 * (shock - s.u - slope * d) / (d * d);
        let b = 2.0 * (fan - s.u + slope * d) / (d * d);
        prop_assert!((a - b).abs() <= 1e-2 * slope.abs() / s.h, "{a:e} {b:e}");
    }
}
