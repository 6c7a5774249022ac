use std::path::Path;

use gsv_core::fv::{self, Field, Grid, SimConfig, Snapshot, StepInfo};
use gsv_core::model;
use gsv_core::riemann::{self, WaveField};
use gsv_core::validation::sweeps::{self, FailureCase, PropertyReport};
use gsv_core::{Params, PrimitiveState};

use crate::config::{
    to_toml, ConfigError, Initial, Mode, ParamsSpec, RunConfig, SampleSpec, StateSpec,
};
use crate::output::{ensure_dir, write_text, Cell, OutputError, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] gsv_core::Error),
    #[error(transparent)]
    Output(#[from] OutputError),
    #[error("{failed} of {total} validation properties failed")]
    Validation { failed: usize, total: usize },
}

impl From<fv::RunError> for CliError {
    fn from(e: fv::RunError) -> Self {
        CliError::Model(e.error)
    }
}

pub fn run(cfg: &RunConfig, out: &Path, seed: Option<u64>) -> Result<(), CliError> {
    ensure_dir(out)?;
    match cfg.mode {
        Some(Mode::Eigen) => cmd_eigen(cfg, out),
        Some(Mode::Riemann) => cmd_riemann(cfg, out),
        Some(Mode::Simulate) => cmd_simulate(cfg, out),
        Some(Mode::Validate) | None => cmd_validate(cfg, out, seed),
    }
}

fn state(spec: &Option<StateSpec>) -> Result<PrimitiveState, CliError> {
    Ok(spec.as_ref().expect("checked by resolve").build()?)
}

/// `eigen.csv` (one row per characteristic field) and `state.csv`.
pub fn cmd_eigen(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let p = cfg.params()?;
    let s = state(&cfg.state)?;
    let lam = model::eigenvalues(&s, &p)?;
    let r = model::char_fields(&s, &p)?;
    let (gn_minus, gn_plus) = model::genuine_nonlinearity(&s, &p)?;
    let mut t = Table::new(&["field", "lambda", "r_h", "r_u", "r_sxx", "r_szz", "gn"]);
    for (name, l, v, gn) in [
        ("minus", lam[0], r.minus, gn_minus),
        ("zero_1", lam[1], r.zero_1, 0.0),
        ("zero_2", lam[2], r.zero_2, 0.0),
        ("plus", lam[3], r.plus, gn_plus),
    ] {
        t.row(vec![
            name.into(),
            l.into(),
            v[0].into(),
            v[1].into(),
            v[2].into(),
            v[3].into(),
            gn.into(),
        ]);
    }
    t.write(&out.join("eigen.csv"))?;

    let inv = model::invariants(&s, &p);
    let mut t = Table::new(&[
        "h",
        "u",
        "sxx",
        "szz",
        "pressure",
        "dp_dh",
        "celerity",
        "x_inv",
        "z_inv",
        "free_energy",
    ]);
    t.row(vec![
        s.h.into(),
        s.u.into(),
        s.sxx.into(),
        s.szz.into(),
        model::total_pressure(&s, &p).into(),
        model::dp_dh(s.h, inv, &p)?.into(),
        model::celerity(&s, &p)?.into(),
        inv.x.into(),
        inv.z_inv.into(),
        model::free_energy(&s, &p).into(),
    ]);
    t.write(&out.join("state.csv"))?;
    Ok(())
}

fn field_name(f: WaveField) -> &'static str {
    match f {
        WaveField::Minus => "minus",
        WaveField::Zero => "contact",
        WaveField::Plus => "plus",
    }
}

fn state_cells(s: &PrimitiveState) -> Vec<Cell> {
    vec![s.h.into(), s.u.into(), s.sxx.into(), s.szz.into()]
}

/// `waves.csv`, `star.csv` and `profile.csv`.
pub fn cmd_riemann(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let p = cfg.params()?;
    let sol = riemann::solve(state(&cfg.left)?, state(&cfg.right)?, &p)?;
    let diag = sol.diagnostics();

    let mut t = Table::new(&[
        "wave",
        "kind",
        "trivial",
        "speed_lo",
        "speed_hi",
        "h_l",
        "u_l",
        "sxx_l",
        "szz_l",
        "h_r",
        "u_r",
        "sxx_r",
        "szz_r",
        "rh_relative",
        "entropy",
        "entropy_scale",
    ]);
    for w in &sol.waves {
        let (lo, hi) = w.speeds();
        let jump = diag.discontinuities.iter().find(|j| j.field == w.field);
        let (rh, e, es) = match jump {
            Some(j) => (j.rh_relative, j.entropy, j.entropy_scale),
            None => (f64::NAN, f64::NAN, f64::NAN),
        };
        let mut row: Vec<Cell> = vec![
            field_name(w.field).into(),
            w.kind_name().into(),
            w.trivial.into(),
            lo.into(),
            hi.into(),
        ];
        row.extend(state_cells(&w.left));
        row.extend(state_cells(&w.right));
        row.extend([rh.into(), e.into(), es.into()]);
        t.row(row);
    }
    t.write(&out.join("waves.csv"))?;

    let mut t = Table::new(&[
        "p_star",
        "u_star",
        "h_star_l",
        "sxx_star_l",
        "szz_star_l",
        "h_star_r",
        "sxx_star_r",
        "szz_star_r",
        "velocity_mismatch",
        "iterations",
    ]);
    t.row(vec![
        sol.p_star.into(),
        sol.u_star.into(),
        sol.star_left.h.into(),
        sol.star_left.sxx.into(),
        sol.star_left.szz.into(),
        sol.star_right.h.into(),
        sol.star_right.sxx.into(),
        sol.star_right.szz.into(),
        sol.velocity_mismatch.into(),
        sol.iterations.into(),
    ]);
    t.write(&out.join("star.csv"))?;

    let sample = cfg.sample.as_ref().expect("checked by resolve");
    let mut t = Table::new(&["xi", "h", "u", "sxx", "szz", "P", "F"]);
    for xi in sample.xis() {
        let s = sol.sample(xi)?;
        let mut row: Vec<Cell> = vec![xi.into()];
        row.extend(state_cells(&s));
        row.push(model::total_pressure(&s, &p).into());
        row.push(model::free_energy(&s, &p).into());
        t.row(row);
    }
    t.write(&out.join("profile.csv"))?;
    Ok(())
}

fn initial_condition(cfg: &RunConfig) -> Result<Box<dyn Fn(f64) -> PrimitiveState>, CliError> {
    Ok(match cfg.initial.expect("checked by resolve") {
        Initial::Riemann { x0 } => {
            let (l, r) = (state(&cfg.left)?, state(&cfg.right)?);
            Box::new(move |x| if x < x0 { l } else { r })
        }
        Initial::DamBreak {
            h_left,
            h_right,
            x0,
        } => {
            let l = PrimitiveState::new(h_left, 0.0, 1.0, 1.0)?;
            let r = PrimitiveState::new(h_right, 0.0, 1.0, 1.0)?;
            Box::new(move |x| if x < x0 { l } else { r })
        }
        Initial::SmoothBump {
            amplitude,
            center,
            width,
        } => {
            let base = state(&cfg.state)?;
            Box::new(move |x| {
                let z = (x - center) / width;
                PrimitiveState {
                    h: base.h + amplitude * (-z * z).exp(),
                    ..base
                }
            })
        }
    })
}

fn write_snapshot(
    out: &Path,
    k: usize,
    snap: &Snapshot,
    grid: &Grid,
    p: &Params,
) -> Result<(), CliError> {
    let mut t = Table::new(&["x", "h", "u", "sxx", "szz"]);
    for (x, s) in grid.centers().into_iter().zip(snap.field.primitives(p)?) {
        let mut row: Vec<Cell> = vec![x.into()];
        row.extend(state_cells(&s));
        t.row(row);
    }
    t.write(&out.join(format!("snapshot_{k:04}.csv")))?;
    Ok(())
}

/// `snapshot_NNNN.csv` per output time, `snapshots.csv` index and
/// `conservation.csv` with the integrals `sum V_i dx` after every step.
pub fn cmd_simulate(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let grid_spec = cfg.grid.expect("checked by resolve");
    let time = cfg.time.as_ref().expect("checked by resolve");
    let sim = SimConfig {
        params: cfg.params()?,
        grid: Grid::new(grid_spec.x_min, grid_spec.x_max, grid_spec.cells)?,
        cfl: time.cfl,
        t_end: time.t_end,
        boundary: cfg.boundary()?,
        snapshot_times: time.snapshots.clone(),
    };
    sim.validate()?;
    let ic = initial_condition(cfg)?;
    let field: Field = fv::init(&sim, ic)?;

    let mut log = Table::new(&["step", "t", "dt", "mass", "momentum", "h_x", "h_zinv"]);
    let dx = sim.grid.dx();
    let log_row = |log: &mut Table, step: usize, t: f64, dt: f64, sums: [f64; 4]| {
        let totals = sums.map(|v| v * dx);
        log.row(vec![
            step.into(),
            t.into(),
            dt.into(),
            totals[0].into(),
            totals[1].into(),
            totals[2].into(),
            totals[3].into(),
        ]);
    };
    log_row(&mut log, 0, field.t, 0.0, field.totals());
    let result = fv::evolve(&sim, field, &mut |info: &StepInfo| {
        log_row(&mut log, info.step, info.time, info.dt, info.totals)
    });
    log.write(&out.join("conservation.csv"))?;

    let (snapshots, error) = match result {
        Ok(s) => (s, None),
        Err(e) => (e.snapshots, Some(e.error)),
    };
    let mut index = Table::new(&["index", "time", "file"]);
    for (k, snap) in snapshots.iter().enumerate() {
        write_snapshot(out, k, snap, &sim.grid, &sim.params)?;
        index.row(vec![
            k.into(),
            snap.time.into(),
            format!("snapshot_{k:04}.csv").into(),
        ]);
    }
    index.write(&out.join("snapshots.csv"))?;
    match error {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

fn replay_config(f: &FailureCase) -> Option<RunConfig> {
    let (l, r) = (f.left?, f.right?);
    Some(RunConfig {
        mode: Some(Mode::Riemann),
        seed: None,
        params: Some(ParamsSpec {
            g: f.params.g,
            elastic_modulus: f.params.elastic_modulus,
            zeta: f.params.zeta,
            lambda: f.params.relaxation_time,
        }),
        state: None,
        left: Some(l.into()),
        right: Some(r.into()),
        sample: Some(SampleSpec {
            xi_min: -20.0,
            xi_max: 20.0,
            points: 401,
        }),
        initial: None,
        grid: None,
        time: None,
        validate: None,
        output: None,
    })
}

fn write_failures(out: &Path, r: &PropertyReport) -> Result<(), CliError> {
    for (k, f) in r.failures.iter().enumerate() {
        let mut text = format!("# {}: {}\n", f.property, f.detail.replace('\n', " "));
        match replay_config(f) {
            Some(cfg) => text.push_str(&to_toml(&cfg)),
            None => text.push_str(&format!("# params: {:?}\n", f.params)),
        }
        write_text(&out.join(format!("failure_{}_{k}.toml", r.id)), &text)?;
    }
    Ok(())
}

/// `validation.csv` with every check of every property, and one
/// replayable `failure_<id>_<k>.toml` per recorded failing input.
pub fn cmd_validate(cfg: &RunConfig, out: &Path, seed: Option<u64>) -> Result<(), CliError> {
    let sweep = cfg.sweep_config(seed);
    let reports = sweeps::run_all(&sweep);
    let mut t = Table::new(&[
        "id", "property", "status", "check", "role", "observed", "limit",
    ]);
    let mut failed = 0;
    for r in &reports {
        println!("{}", r.summary());
        for c in &r.checks {
            t.row(vec![
                (r.id as usize).into(),
                r.name.into(),
                (if r.passed() { "pass" } else { "fail" }).into(),
                c.name.clone().into(),
                (if c.informational { "info" } else { "decides" }).into(),
                c.observed.into(),
                c.limit.into(),
            ]);
        }
        if !r.passed() {
            failed += 1;
            write_failures(out, r)?;
        }
    }
    t.write(&out.join("validation.csv"))?;
    if failed > 0 {
        return Err(CliError::Validation {
            failed,
            total: reports.len(),
        });
    }
    Ok(())
}
