//! One-dimensional solvers: classical Godunov and the two-step
//! Godunov–Glimm transport-equilibrium scheme.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ConservedState, Model, ModelKind, ModelParams, PrimitiveState};
use crate::riemann::RiemannFan;
use crate::sweep::{self, Boundary, Scheme};
use crate::vdc::VdcSampler;

pub const DEFAULT_CFL: f64 = 0.45;

/// Uniform grid of cell averages `(ρ, ρw)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
    pub cells: Vec<ConservedState>,
    pub boundary: Boundary,
    pub time: f64,
}

/// Piecewise-constant data: `states[k]` holds on `[breaks[k-1], breaks[k])`.
#[derive(Debug, Clone, PartialEq)]
pub struct Piecewise1D {
    pub states: Vec<PrimitiveState>,
    pub breaks: Vec<f64>,
}

impl Piecewise1D {
    pub fn riemann(left: PrimitiveState, right: PrimitiveState, split: f64) -> Self {
        Piecewise1D {
            states: vec![left, right],
            breaks: vec![split],
        }
    }

    pub fn at(&self, x: f64) -> PrimitiveState {
        let k = self.breaks.iter().take_while(|&&b| x >= b).count();
        self.states[k.min(self.states.len() - 1)]
    }
}

impl Grid1D {
    /// Samples `initial` at cell centres.
    pub fn from_piecewise(
        model: &Model,
        x_min: f64,
        x_max: f64,
        n_cells: usize,
        initial: &Piecewise1D,
        boundary: Boundary,
    ) -> Result<Self> {
        if n_cells == 0 || !(x_max > x_min) {
            return Err(Error::Unsupported(format!(
                "grid needs n_cells > 0 and x_max > x_min (got {n_cells}, [{x_min}, {x_max}])"
            )));
        }
        if initial.states.len() != initial.breaks.len() + 1 {
            return Err(Error::Unsupported(
                "piecewise data needs one more state than break points".into(),
            ));
        }
        let dx = (x_max - x_min) / n_cells as f64;
        let cells = (0..n_cells)
            .map(|i| {
                let x = x_min + (i as f64 + 0.5) * dx;
                model.to_conserved(initial.at(x)).map_err(|e| e.at_cell(i))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Grid1D {
            x_min,
            x_max,
            dx,
            cells,
            boundary,
            time: 0.0,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.cells.len())
            .map(|i| self.x_min + (i as f64 + 0.5) * self.dx)
            .collect()
    }

    pub fn primitives(&self, model: &Model) -> Result<Vec<PrimitiveState>> {
        self.cells
            .iter()
            .enumerate()
            .map(|(i, q)| model.to_primitive(*q).map_err(|e| e.at_cell(i)))
            .collect()
    }

    pub fn mass(&self) -> f64 {
        self.cells.iter().map(|q| q.rho).sum::<f64>() * self.dx
    }

    fn line(&self) -> Vec<[f64; 2]> {
        self.cells.iter().map(|q| q.to_array()).collect()
    }

    fn set_line(&mut self, line: &[[f64; 2]]) {
        for (cell, q) in self.cells.iter_mut().zip(line) {
            *cell = ConservedState::from_array(*q);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    pub cfl: f64,
    pub t_end: f64,
    pub model_kind: ModelKind,
    pub params: ModelParams,
}

impl SchemeConfig {
    pub fn new(scheme: Scheme, t_end: f64, params: ModelParams) -> Self {
        SchemeConfig {
            scheme,
            cfl: DEFAULT_CFL,
            t_end,
            model_kind: ModelKind::Rarz,
            params,
        }
    }

    pub fn model(&self) -> Model {
        Model::new(self.model_kind, self.params)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::Unsupported(format!("cfl must lie in (0, 1], got {}", self.cfl)));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(Error::Unsupported(format!("t_end must be >= 0, got {}", self.t_end)));
        }
        Ok(())
    }
}

/// Time step `cfl · Δx / max|λ|`, clipped so the run lands on `t_end`.
pub fn cfl_dt(grid: &Grid1D, cfl: f64, t_end: f64, model: &Model) -> Result<f64> {
    if grid.cells.is_empty() {
        return Err(Error::Unsupported("empty grid".into()));
    }
    let speed = sweep::line_max_speed(model, &grid.line())?;
    let remaining = (t_end - grid.time).max(0.0);
    if speed <= 0.0 {
        return Ok(remaining);
    }
    // keep Δt·u/Δx strictly below one for the sampling interval
    let cfl = if cfl >= 1.0 { 1.0 - 1e-12 } else { cfl };
    Ok((cfl * grid.dx / speed).min(remaining))
}

pub fn godunov_step(grid: &mut Grid1D, dt: f64, model: &Model) -> Result<()> {
    step_with(grid, dt, model, Scheme::Godunov, 0.0)
}

/// Contact transport by Glimm sampling; returns the cell values at the
/// half step without modifying `grid`.
pub fn glimm_transport_substep(
    grid: &Grid1D,
    dt: f64,
    sample: f64,
    model: &Model,
) -> Result<Vec<ConservedState>> {
    let half = sweep::glimm_half_step(model, &grid.line(), grid.boundary, dt / grid.dx, sample)?;
    Ok(half.into_iter().map(ConservedState::from_array).collect())
}

/// Full two-step update with the sample `a_{n+1}`.
pub fn hybrid_step(grid: &mut Grid1D, dt: f64, sample: f64, model: &Model) -> Result<()> {
    step_with(grid, dt, model, Scheme::Hybrid, sample)
}

pub fn step_with(grid: &mut Grid1D, dt: f64, model: &Model, scheme: Scheme, sample: f64) -> Result<()> {
    let mut line = grid.line();
    sweep::sweep_line(model, &mut line, grid.boundary, dt / grid.dx, scheme, sample)?;
    for (i, q) in line.iter().enumerate() {
        if !(q[0].is_finite() && q[1].is_finite()) {
            return Err(Error::NonFinite(format!("({}, {})", q[0], q[1])).at_cell(i));
        }
    }
    grid.set_line(&line);
    grid.time += dt;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot1D {
    pub time: f64,
    pub x: Vec<f64>,
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
}

impl Snapshot1D {
    pub fn of(grid: &Grid1D, model: &Model) -> Result<Self> {
        let prims = grid.primitives(model)?;
        Ok(Snapshot1D {
            time: grid.time,
            x: grid.centers(),
            rho: prims.iter().map(|w| w.rho).collect(),
            u: prims.iter().map(|w| w.u).collect(),
        })
    }
}

/// A running 1D simulation.
#[derive(Debug, Clone)]
pub struct Simulation1D {
    pub grid: Grid1D,
    pub config: SchemeConfig,
    pub sampler: VdcSampler,
    pub steps: usize,
    model: Model,
}

impl Simulation1D {
    pub fn new(grid: Grid1D, config: SchemeConfig) -> Result<Self> {
        config.validate()?;
        Ok(Simulation1D {
            model: config.model(),
            grid,
            config,
            sampler: VdcSampler::new(),
            steps: 0,
        })
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    /// One CFL-limited step that never passes `t_stop`.
    pub fn step(&mut self, t_stop: f64) -> Result<f64> {
        let dt = cfl_dt(&self.grid, self.config.cfl, t_stop, &self.model)?;
        if dt <= 0.0 {
            return Ok(0.0);
        }
        self.step_by(dt)?;
        Ok(dt)
    }

    /// One step with a prescribed `dt`.
    pub fn step_by(&mut self, dt: f64) -> Result<()> {
        let sample = if self.config.scheme.uses_sampler() {
            self.sampler.next_sample()
        } else {
            0.0
        };
        step_with(&mut self.grid, dt, &self.model, self.config.scheme, sample)?;
        self.steps += 1;
        Ok(())
    }

    /// Steps until `t`, calling `observe` after every step.
    pub fn advance_to<F>(&mut self, t: f64, mut observe: F) -> Result<()>
    where
        F: FnMut(&Grid1D) -> Result<()>,
    {
        while self.grid.time < t {
            let dt = self.step(t)?;
            if dt <= 0.0 {
                break;
            }
            // absorb round-off so the snapshot lands exactly on t
            if (t - self.grid.time).abs() <= 1e-14 * t.abs().max(1.0) {
                self.grid.time = t;
            }
            observe(&self.grid)?;
        }
        Ok(())
    }

    pub fn snapshot(&self) -> Result<Snapshot1D> {
        Snapshot1D::of(&self.grid, &self.model)
    }
}

/// Runs `initial` to `config.t_end`, returning snapshots at each of
/// `snapshot_times` (those beyond `t_end` are ignored) and at `t_end`.
pub fn run_1d(
    initial: &Piecewise1D,
    config: &SchemeConfig,
    domain: (f64, f64),
    n_cells: usize,
    snapshot_times: &[f64],
) -> Result<Vec<Snapshot1D>> {
    let model = config.model();
    let grid = Grid1D::from_piecewise(&model, domain.0, domain.1, n_cells, initial, Boundary::Outflow)?;
    let mut sim = Simulation1D::new(grid, *config)?;
    let mut times: Vec<f64> = snapshot_times
        .iter()
        .copied()
        .filter(|&t| t >= 0.0 && t < config.t_end)
        .collect();
    times.push(config.t_end);
    times.sort_by(f64::total_cmp);
    times.dedup();

    let mut snapshots = Vec::with_capacity(times.len());
    for t in times {
        sim.advance_to(t, |_| Ok(()))?;
        snapshots.push(sim.snapshot()?);
    }
    Ok(snapshots)
}

/// Exact solution of the Riemann problem `(left, right)` centred at
/// `split`, sampled at `xs` and time `t`.
pub fn exact_profile(
    model: &Model,
    left: PrimitiveState,
    right: PrimitiveState,
    split: f64,
    t: f64,
    xs: &[f64],
) -> Result<Vec<PrimitiveState>> {
    let fan = RiemannFan::solve(model, left, right)?;
    Ok(xs
        .iter()
        .map(|&x| {
            if t <= 0.0 {
                if x < split {
                    left
                } else {
                    right
                }
            } else {
                fan.sample((x - split) / t)
            }
        })
        .collect())
}

/// Checks `0 ≤ ρ < ρ*` and `0 ≤ u ≤ u*` for every cell.
pub fn check_bounds(grid: &Grid1D, model: &Model) -> Result<()> {
    let p = &model.params;
    for (i, q) in grid.cells.iter().enumerate() {
        let w = model.to_primitive(*q).map_err(|e| e.at_cell(i))?;
        if !(w.rho >= 0.0 && w.rho < p.rho_star) {
            return Err(Error::domain("rho", w.rho, "density bound violated").at_cell(i));
        }
        if !(w.u >= 0.0 && w.u <= p.u_star) {
            return Err(Error::domain("u", w.u, "velocity bound violated").at_cell(i));
        }
    }
    Ok(())
}
