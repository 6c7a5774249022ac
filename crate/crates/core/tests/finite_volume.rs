use gsv_core::fv::{self, Boundary, Grid, SimConfig};
use gsv_core::model::{Params, PrimitiveState};
use gsv_core::riemann;

fn config(boundary: Boundary, n: usize, t_end: f64) -> SimConfig {
    SimConfig {
        params: Params::new(9.81, 1.0, 0.25).unwrap(),
        grid: Grid::new(-1.0, 1.0, n).unwrap(),
        cfl: 0.9,
        t_end,
        boundary,
        snapshot_times: vec![0.0, 0.5 * t_end],
    }
}

fn dam(x: f64) -> PrimitiveState {
    let h = if x < 0.0 { 2.0 } else { 1.0 };
    PrimitiveState::new(h, 0.0, 1.0, 1.0).unwrap()
}

#[test]
fn snapshots_arrive_at_requested_times() {
    let cfg = config(Boundary::Transmissive, 100, 0.1);
    let snaps = fv::run(&cfg, dam).unwrap();
    let times: Vec<f64> = snaps.iter().map(|s| s.time).collect();
    assert_eq!(times, vec![0.0, 0.05, 0.1]);
}

#[test]
fn reflective_walls_conserve_mass() {
    let cfg = config(Boundary::Reflective, 200, 0.3);
    let mut totals = Vec::new();
    let snaps = fv::run_observed(&cfg, dam, |info| totals.push(info.totals[0])).unwrap();
    let m0 = snaps[0].field.totals()[0];
    for m in totals {
        assert!((m - m0).abs() <= 1e-12 * m0);
    }
}

#[test]
fn mirrored_dam_break_stays_mirrored() {
    let cfg = config(Boundary::Reflective, 200, 0.2);
    let sym = |x: f64| dam(x.abs() - 0.5);
    let last = fv::run(&cfg, sym).unwrap().pop().unwrap();
    let prims = last.field.primitives(&cfg.params).unwrap();
    let n = prims.len();
    for i in 0..n / 2 {
        let (a, b) = (prims[i], prims[n - 1 - i]);
        assert!((a.h - b.h).abs() <= 1e-12 * a.h);
        assert!((a.u + b.u).abs() <= 1e-11 * (1.0 + a.u.abs()));
    }
}

#[test]
fn fine_grid_approaches_the_exact_solution() {
    let cfg = config(Boundary::Transmissive, 800, 0.1);
    let last = fv::run(&cfg, dam).unwrap().pop().unwrap();
    let prims = last.field.primitives(&cfg.params).unwrap();
    let sol = riemann::solve(dam(-1.0), dam(1.0), &cfg.params).unwrap();
    let dx = cfg.grid.dx();
    let err: f64 = cfg
        .grid
        .centers()
        .iter()
        .zip(&prims)
        .map(|(x, s)| (s.h - sol.sample(x / 0.1).unwrap().h).abs() * dx)
        .sum();
    assert!(err < 1e-2, "{err}");
}
