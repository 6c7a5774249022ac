//! First-order Godunov finite volumes on a uniform 1-D grid.
//!
//! Interface fluxes come from exact Riemann solutions. For a finite relaxation
//! time the transport step is followed by exact integration of the stretch
//! relaxation at fixed depth and velocity.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{self, ConservedState, Params, PrimitiveState, Vector4};
use crate::riemann;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_cells: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_cells: usize) -> Result<Self> {
        let g = Self {
            x_min,
            x_max,
            n_cells,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_cells < 2 {
            return Err(Error::InvalidParams(format!(
                "grid needs at least 2 cells, got {}",
                self.n_cells
            )));
        }
        if !(self.x_min.is_finite() && self.x_max.is_finite() && self.x_max > self.x_min) {
            return Err(Error::InvalidParams(format!(
                "grid bounds [{}, {}] are not an interval",
                self.x_min, self.x_max
            )));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_cells as f64
    }

    /// Midpoint of cell `i`.
    pub fn center(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells).map(|i| self.center(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Transmissive,
    Periodic,
    Reflective,
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "transmissive" => Ok(Boundary::Transmissive),
            "periodic" => Ok(Boundary::Periodic),
            "reflective" => Ok(Boundary::Reflective),
            other => Err(Error::InvalidParams(format!("unknown boundary '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub params: Params,
    pub grid: Grid,
    pub cfl: f64,
    pub t_end: f64,
    pub boundary: Boundary,
    pub snapshot_times: Vec<f64>,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.grid.validate()?;
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "cfl = {} must lie in (0, 1]",
                self.cfl
            )));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "t_end = {} must be finite and nonnegative",
                self.t_end
            )));
        }
        if let Some(t) = self.snapshot_times.iter().find(|t| !t.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "snapshot time {t} is not finite"
            )));
        }
        Ok(())
    }

    /// Requested snapshot times inside `[0, t_end]`, plus `t_end`, sorted.
    pub fn output_times(&self) -> Vec<f64> {
        let mut ts: Vec<f64> = self
            .snapshot_times
            .iter()
            .copied()
            .filter(|&t| (0.0..=self.t_end).contains(&t))
            .chain(std::iter::once(self.t_end))
            .collect();
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        ts
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub cells: Vec<ConservedState>,
    pub t: f64,
}

impl Field {
    pub fn primitives(&self, p: &Params) -> Result<Vec<PrimitiveState>> {
        self.cells.iter().map(|c| c.to_primitive(p)).collect()
    }

    /// Cell sums of the conserved components.
    pub fn totals(&self) -> Vector4 {
        let mut s = [0.0; 4];
        for c in &self.cells {
            for k in 0..4 {
                s[k] += c.0[k];
            }
        }
        s
    }

    /// Cell sums of the component magnitudes.
    pub fn magnitudes(&self) -> Vector4 {
        let mut s = [0.0; 4];
        for c in &self.cells {
            for k in 0..4 {
                s[k] += c.0[k].abs();
            }
        }
        s
    }

    /// `sum_i F(U_i) dx`.
    pub fn free_energy(&self, p: &Params, dx: f64) -> Result<f64> {
        let mut e = 0.0;
        for c in &self.cells {
            e += model::free_energy(&c.to_primitive(p)?, p);
        }
        Ok(e * dx)
    }
}

pub fn init<F>(config: &SimConfig, ic: F) -> Result<Field>
where
    F: Fn(f64) -> PrimitiveState,
{
    config.validate()?;
    let p = &config.params;
    let cells = config
        .grid
        .centers()
        .into_iter()
        .map(|x| {
            let s = ic(x);
            s.validate()
                .map_err(|e| Error::InvalidState(format!("initial condition at x = {x}: {e}")))?;
            Ok(ConservedState::from_primitive(&s, p))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Field { cells, t: 0.0 })
}

fn decode(field: &Field, p: &Params) -> Result<Vec<PrimitiveState>> {
    field
        .cells
        .iter()
        .enumerate()
        .map(|(i, c)| {
            c.to_primitive(p).map_err(|e| Error::Stability {
                index: i,
                time: field.t,
                detail: e.to_string(),
            })
        })
        .collect()
}

/// `cfl dx / max_i max(|u - c|, |u + c|)`.
pub fn stable_dt(field: &Field, config: &SimConfig) -> Result<f64> {
    let p = &config.params;
    let mut smax: f64 = 0.0;
    for s in decode(field, p)? {
        let c = model::celerity(&s, p)?;
        smax = smax.max((s.u - c).abs()).max((s.u + c).abs());
    }
    if smax == 0.0 {
        return Err(Error::Domain("all wave speeds vanish".into()));
    }
    Ok(config.cfl * config.grid.dx() / smax)
}

fn mirror(s: &PrimitiveState) -> PrimitiveState {
    PrimitiveState { u: -s.u, ..*s }
}

fn ghosts(cells: &[PrimitiveState], boundary: Boundary) -> (PrimitiveState, PrimitiveState) {
    let first = cells[0];
    let last = cells[cells.len() - 1];
    match boundary {
        Boundary::Transmissive => (first, last),
        Boundary::Periodic => (last, first),
        Boundary::Reflective => (mirror(&first), mirror(&last)),
    }
}

/// Interface fluxes `F_{i-1/2}` for `i = 0..=n`.
pub fn interface_fluxes(states: &[PrimitiveState], config: &SimConfig) -> Result<Vec<Vector4>> {
    let n = states.len();
    let (gl, gr) = ghosts(states, config.boundary);
    let at = |i: usize| -> &PrimitiveState {
        if i == 0 {
            &gl
        } else if i == n + 1 {
            &gr
        } else {
            &states[i - 1]
        }
    };
    (0..=n)
        .into_par_iter()
        .map(|j| riemann::godunov_flux(at(j), at(j + 1), &config.params))
        .collect()
}

/// One Godunov transport step of length `dt`.
pub fn step(field: &Field, config: &SimConfig, dt: f64) -> Result<Field> {
    let p = &config.params;
    let states = decode(field, p)?;
    let fluxes = interface_fluxes(&states, config)?;
    let r = dt / config.grid.dx();
    let t = field.t + dt;
    let cells: Vec<ConservedState> = field
        .cells
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut v = c.0;
            for k in 0..4 {
                v[k] -= r * (fluxes[i + 1][k] - fluxes[i][k]);
            }
            ConservedState(v)
        })
        .collect();
    for (i, c) in cells.iter().enumerate() {
        if let Err(e) = c.to_primitive(p) {
            return Err(Error::Stability {
                index: i,
                time: t,
                detail: e.to_string(),
            });
        }
    }
    Ok(Field { cells, t })
}

/// Exact relaxation of the stretches over `dt` at fixed depth and velocity.
/// Identity in the elastic limit.
pub fn relax(field: &Field, params: &Params, dt: f64) -> Result<Field> {
    let lambda = match params.relaxation_time {
        Some(l) if l.is_finite() => l,
        _ => return Ok(field.clone()),
    };
    let decay = (-dt / lambda).exp();
    let cells = decode(field, params)?
        .into_iter()
        .map(|s| {
            let r = PrimitiveState {
                sxx: 1.0 + (s.sxx - 1.0) * decay,
                szz: 1.0 + (s.szz - 1.0) * decay,
                ..s
            };
            ConservedState::from_primitive(&r, params)
        })
        .collect();
    Ok(Field { cells, t: field.t })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub field: Field,
}

/// Per-step record handed to run observers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub step: usize,
    pub time: f64,
    pub dt: f64,
    pub totals: Vector4,
}

/// A failed run with the snapshots emitted before the failure.
#[derive(Debug, Clone, PartialEq)]
pub struct RunError {
    pub error: Error,
    pub snapshots: Vec<Snapshot>,
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({} snapshot(s) emitted before the failure)",
            self.error,
            self.snapshots.len()
        )
    }
}

impl std::error::Error for RunError {}

impl From<Error> for RunError {
    fn from(error: Error) -> Self {
        Self {
            error,
            snapshots: Vec::new(),
        }
    }
}

pub fn run<F>(config: &SimConfig, ic: F) -> std::result::Result<Vec<Snapshot>, RunError>
where
    F: Fn(f64) -> PrimitiveState,
{
    run_observed(config, ic, |_| {})
}

/// As [`run`], calling `observer` after every completed step.
pub fn run_observed<F, O>(
    config: &SimConfig,
    ic: F,
    mut observer: O,
) -> std::result::Result<Vec<Snapshot>, RunError>
where
    F: Fn(f64) -> PrimitiveState,
    O: FnMut(&StepInfo),
{
    let field = init(config, ic)?;
    evolve(config, field, &mut observer)
}

/// Advance an existing field from its time to `t_end`.
pub fn evolve<O>(
    config: &SimConfig,
    mut field: Field,
    observer: &mut O,
) -> std::result::Result<Vec<Snapshot>, RunError>
where
    O: FnMut(&StepInfo),
{
    config.validate()?;
    let targets = config.output_times();
    let mut snapshots = Vec::with_capacity(targets.len());
    let mut next = 0;
    while next < targets.len() && targets[next] <= field.t {
        snapshots.push(Snapshot {
            time: targets[next],
            field: field.clone(),
        });
        next += 1;
    }
    let mut n_step = 0;
    while next < targets.len() {
        let target = targets[next];
        let advanced = (|| -> Result<(Field, f64)> {
            let mut dt = stable_dt(&field, config)?;
            let hit = field.t + dt >= target;
            if hit {
                dt = target - field.t;
            }
            let mut f = step(&field, config, dt)?;
            f = relax(&f, &config.params, dt)?;
            if hit {
                f.t = target;
            } else if f.t == field.t {
                return Err(Error::Stability {
                    index: 0,
                    time: field.t,
                    detail: format!("time step {dt:e} does not advance the clock"),
                });
            }
            Ok((f, dt))
        })();
        let (f, dt) = match advanced {
            Ok(v) => v,
            Err(error) => return Err(RunError { error, snapshots }),
        };
        field = f;
        n_step += 1;
        observer(&StepInfo {
            step: n_step,
            time: field.t,
            dt,
            totals: field.totals(),
        });
        while next < targets.len() && targets[next] <= field.t {
            snapshots.push(Snapshot {
                time: targets[next],
                field: field.clone(),
            });
            next += 1;
        }
    }
    Ok(snapshots)
}
