use std::path::Path;

use rarz::diagnostics::{l1_distance, transition_width};
use rarz::micro::{integrate_1d, integrate_2d, w_drift, w_sigma_drift};
use rarz::model::{fd_curve, fd_density_samples};
use rarz::scheme1d::{check_bounds, exact_profile, Grid1D, Piecewise1D, SchemeConfig, Simulation1D, Snapshot1D};
use rarz::solver2d::{check_bounds_2d, Grid2D, Simulation2D, Snapshot2D, Solver2DConfig};
use rarz::{Boundary, Model, ModelKind, ModelParams, PrimitiveState, RiemannFan, Scheme, WavePattern};

use crate::config::{Command, ExperimentConfig, Platoon, RiemannSpec};
use crate::error::CliError;
use crate::output::{csv_string, field_string, Metrics, OutputDir};

/// Plateau margin used when counting smeared contact cells.
pub const CONTACT_DELTA: f64 = 0.01;

/// Runs the experiment, writes its files and `metrics.txt` under `out`.
pub fn run(config: &ExperimentConfig, out: &Path) -> Result<Metrics, CliError> {
    let mut dir = OutputDir::create(out)?;
    let mut metrics = Metrics::new();
    metrics.push("name", &config.name);
    metrics.push("command", config.command.name());
    let body = match config.command {
        Command::Fd => cmd_fd(config, &mut dir)?,
        Command::Riemann => cmd_riemann(config, &mut dir)?,
        Command::Sim1d => cmd_sim1d(config, &mut dir)?,
        Command::Sim2d => cmd_sim2d(config, &mut dir)?,
        Command::Micro => cmd_micro(config, &mut dir)?,
        Command::Compare => cmd_compare(config, &mut dir)?,
    };
    metrics.extend(body);
    dir.write("metrics.txt", &metrics.render())?;
    Ok(metrics)
}

fn base_metadata(config: &ExperimentConfig, params: &ModelParams) -> Vec<(String, String)> {
    vec![
        ("name".into(), config.name.clone()),
        ("command".into(), config.command.name().into()),
        ("rho_star".into(), params.rho_star.to_string()),
        ("u_star".into(), params.u_star.to_string()),
        ("v_star".into(), params.v_star.to_string()),
        ("gamma".into(), params.gamma.to_string()),
    ]
}

pub fn cmd_fd(config: &ExperimentConfig, dir: &mut OutputDir) -> Result<Metrics, CliError> {
    let fd = config.fd.as_ref().expect("validated fd section");
    let mut metrics = Metrics::new();
    for &gamma in &fd.gammas {
        let params = ModelParams { gamma, ..config.params };
        let rho = fd_density_samples(fd.samples, &params);
        for &w in &fd.w {
            for &kind in &fd.models {
                let series = fd_curve(kind, w, &rho, &params)
                    .map_err(CliError::numerical(format!("fd {kind} gamma={gamma} w={w}")))?;
                let stem = format!("fd_{kind}_gamma{gamma}_w{w}");
                let mut meta = base_metadata(config, &params);
                meta.push(("model".into(), kind.to_string()));
                meta.push(("w".into(), w.to_string()));
                meta.push(("samples".into(), series.points.len().to_string()));
                let r: Vec<f64> = series.points.iter().map(|p| p.rho).collect();
                let u: Vec<f64> = series.points.iter().map(|p| p.u).collect();
                let q: Vec<f64> = series.points.iter().map(|p| p.q).collect();
                dir.write(&format!("{stem}.csv"), &csv_string(&meta, &["rho", "u", "q"], &[&r, &u, &q]))?;
                metrics.push(format!("{stem}.u_last"), u[u.len() - 1]);
                metrics.push(format!("{stem}.u_min"), u.iter().copied().fold(f64::INFINITY, f64::min));
                metrics.push(format!("{stem}.q_max"), q.iter().copied().fold(f64::NEG_INFINITY, f64::max));
            }
        }
    }
    Ok(metrics)
}

fn states(r: &RiemannSpec) -> (PrimitiveState, PrimitiveState) {
    (PrimitiveState::new(r.rho_left, r.u_left), PrimitiveState::new(r.rho_right, r.u_right))
}

fn centers(r: &RiemannSpec, n: usize) -> Vec<f64> {
    let dx = (r.x_max - r.x_min) / n as f64;
    (0..n).map(|i| r.x_min + (i as f64 + 0.5) * dx).collect()
}

fn fan_metrics(prefix: &str, fan: &RiemannFan, metrics: &mut Metrics) {
    metrics.push(format!("{prefix}pattern"), fan.pattern.label());
    metrics.push(format!("{prefix}middle_rho"), fan.middle.rho);
    metrics.push(format!("{prefix}middle_u"), fan.middle.u);
    metrics.push(format!("{prefix}contact_speed"), fan.contact_speed);
    if let Some(s) = fan.shock_speed {
        metrics.push(format!("{prefix}shock_speed"), s);
    }
    if let Some((a, b)) = fan.fan_edges {
        metrics.push(format!("{prefix}fan_left"), a);
        metrics.push(format!("{prefix}fan_right"), b);
    }
}

pub fn cmd_riemann(config: &ExperimentConfig, dir: &mut OutputDir) -> Result<Metrics, CliError> {
    let r = config.riemann.expect("validated riemann section");
    let (left, right) = states(&r);
    let xs = centers(&r, config.resolution);
    let mut metrics = Metrics::new();
    metrics.push("t_end", config.t_end);
    for &kind in &config.models {
        let model = Model::new(kind, config.params);
        let fan = RiemannFan::solve(&model, left, right).map_err(CliError::numerical(format!("riemann {kind}")))?;
        let profile = exact_profile(&model, left, right, r.split, config.t_end, &xs)
            .map_err(CliError::numerical(format!("riemann {kind}")))?;
        let rho: Vec<f64> = profile.iter().map(|w| w.rho).collect();
        let u: Vec<f64> = profile.iter().map(|w| w.u).collect();
        let mut meta = base_metadata(config, &config.params);
        meta.push(("model".into(), kind.to_string()));
        meta.push(("resolution".into(), config.resolution.to_string()));
        meta.push(("t".into(), config.t_end.to_string()));
        meta.push(("pattern".into(), fan.pattern.label().into()));
        dir.write(&format!("riemann_{kind}.csv"), &csv_string(&meta, &["x", "rho", "u"], &[&xs, &rho, &u]))?;
        fan_metrics(&format!("{kind}."), &fan, &mut metrics);
    }
    Ok(metrics)
}

/// A finished 1D run.
#[derive(Debug, Clone)]
pub struct Run1D {
    pub scheme: Scheme,
    pub model: ModelKind,
    pub snapshots: Vec<Snapshot1D>,
    pub steps: usize,
    pub mass: (f64, f64),
}

/// Runs one scheme and closure, checking the constrained bounds after
/// every step when the constrained model is in use.
pub fn simulate_1d(config: &ExperimentConfig, scheme: Scheme, kind: ModelKind) -> Result<Run1D, CliError> {
    let r = config.riemann.expect("validated riemann section");
    let (left, right) = states(&r);
    let context = format!("sim1d {scheme} {kind}");
    let cfg = SchemeConfig {
        scheme,
        cfl: config.cfl,
        t_end: config.t_end,
        model_kind: kind,
        params: config.params,
    };
    let model = cfg.model();
    let grid = Grid1D::from_piecewise(
        &model,
        r.x_min,
        r.x_max,
        config.resolution,
        &Piecewise1D::riemann(left, right, r.split),
        Boundary::Outflow,
    )
    .map_err(CliError::numerical(&context))?;
    let m0 = grid.mass();
    let mut sim = Simulation1D::new(grid, cfg).map_err(CliError::numerical(&context))?;
    let mut snapshots = Vec::new();
    for t in snapshot_schedule(&config.snapshot_times, config.t_end) {
        sim.advance_to(t, |g| if kind == ModelKind::Rarz { check_bounds(g, &model) } else { Ok(()) })
            .map_err(CliError::numerical(&context))?;
        snapshots.push(sim.snapshot().map_err(CliError::numerical(&context))?);
    }
    Ok(Run1D {
        scheme,
        model: kind,
        snapshots,
        steps: sim.steps,
        mass: (m0, sim.grid.mass()),
    })
}

fn snapshot_schedule(requested: &[f64], t_end: f64) -> Vec<f64> {
    let mut times: Vec<f64> = requested.iter().copied().filter(|&t| t < t_end).collect();
    times.push(t_end);
    times.dedup();
    times
}

fn report_1d(config: &ExperimentConfig, run: &Run1D, dir: &mut OutputDir, metrics: &mut Metrics) -> Result<(), CliError> {
    let r = config.riemann.expect("validated riemann section");
    let (left, right) = states(&r);
    let model = Model::new(run.model, config.params);
    let tag = format!("{}_{}", run.scheme, run.model);
    for (k, snap) in run.snapshots.iter().enumerate() {
        let mut meta = base_metadata(config, &config.params);
        meta.push(("scheme".into(), run.scheme.to_string()));
        meta.push(("model".into(), run.model.to_string()));
        meta.push(("resolution".into(), config.resolution.to_string()));
        meta.push(("cfl".into(), config.cfl.to_string()));
        meta.push(("t_end".into(), config.t_end.to_string()));
        meta.push(("t".into(), snap.time.to_string()));
        dir.write(
            &format!("sim1d_{tag}_{k}.csv"),
            &csv_string(&meta, &["x", "rho", "u"], &[&snap.x, &snap.rho, &snap.u]),
        )?;
    }
    let last = run.snapshots.last().expect("at least one snapshot");
    let exact = exact_profile(&model, left, right, r.split, last.time, &last.x)
        .map_err(CliError::numerical(format!("exact {}", run.model)))?;
    let exact_rho: Vec<f64> = exact.iter().map(|w| w.rho).collect();
    let dx = (r.x_max - r.x_min) / config.resolution as f64;
    metrics.push(format!("{tag}.steps"), run.steps);
    metrics.push(format!("{tag}.l1_rho"), l1_distance(&last.rho, &exact_rho, dx));
    metrics.push(format!("{tag}.mass_initial"), run.mass.0);
    metrics.push(format!("{tag}.mass_final"), run.mass.1);
    let fan = RiemannFan::solve(&model, left, right).map_err(CliError::numerical("riemann"))?;
    if fan.pattern == WavePattern::ContactOnly {
        let delta = CONTACT_DELTA;
        metrics.push(format!("{tag}.contact_width"), transition_width(&last.rho, left.rho, right.rho, delta));
    }
    Ok(())
}

fn write_exact(config: &ExperimentConfig, kind: ModelKind, dir: &mut OutputDir) -> Result<(), CliError> {
    let r = config.riemann.expect("validated riemann section");
    let (left, right) = states(&r);
    let xs = centers(&r, config.resolution);
    let model = Model::new(kind, config.params);
    let exact = exact_profile(&model, left, right, r.split, config.t_end, &xs)
        .map_err(CliError::numerical(format!("exact {kind}")))?;
    let rho: Vec<f64> = exact.iter().map(|w| w.rho).collect();
    let u: Vec<f64> = exact.iter().map(|w| w.u).collect();
    let mut meta = base_metadata(config, &config.params);
    meta.push(("model".into(), kind.to_string()));
    meta.push(("resolution".into(), config.resolution.to_string()));
    meta.push(("t".into(), config.t_end.to_string()));
    dir.write(&format!("exact_{kind}.csv"), &csv_string(&meta, &["x", "rho", "u"], &[&xs, &rho, &u]))?;
    Ok(())
}

pub fn cmd_sim1d(config: &ExperimentConfig, dir: &mut OutputDir) -> Result<Metrics, CliError> {
    let mut metrics = Metrics::new();
    metrics.push("resolution", config.resolution);
    metrics.push("t_end", config.t_end);
    for &kind in &config.models {
        write_exact(config, kind, dir)?;
        for &scheme in &config.schemes {
            let run = simulate_1d(config, scheme, kind)?;
            report_1d(config, &run, dir, &mut metrics)?;
        }
    }
    Ok(metrics)
}

/// A finished 2D run.
#[derive(Debug, Clone)]
pub struct Run2D {
    pub scheme: Scheme,
    pub snapshots: Vec<Snapshot2D>,
    pub steps: usize,
    pub mass: (f64, f64),
}

/// Runs the quadrant problem with bounds checked after every step.
pub fn simulate_2d(config: &ExperimentConfig, scheme: Scheme) -> Result<Run2D, CliError> {
    let quads = config.quadrants.expect("validated quadrants");
    let g = config.grid;
    let n = config.resolution;
    let context = format!("sim2d {scheme}");
    let params = config.params;
    let grid = Grid2D::from_quadrants(&params, (g.x_min, g.x_max), (g.y_min, g.y_max), n, n, &quads)
        .map_err(CliError::numerical(&context))?;
    let m0 = grid.mass();
    let solver = Solver2DConfig {
        cfl: config.cfl,
        ..Solver2DConfig::new(scheme, config.t_end, params)
    };
    let mut sim = Simulation2D::new(grid, solver).map_err(CliError::numerical(&context))?;
    let mut snapshots = Vec::new();
    for t in snapshot_schedule(&config.snapshot_times, config.t_end) {
        sim.advance_to(t, |g| check_bounds_2d(g, &params))
            .map_err(CliError::numerical(&context))?;
        snapshots.push(sim.snapshot().map_err(CliError::numerical(&context))?);
    }
    Ok(Run2D {
        scheme,
        snapshots,
        steps: sim.steps,
        mass: (m0, sim.grid.mass()),
    })
}

fn report_2d(run: &Run2D, dir: &mut OutputDir, metrics: &mut Metrics) -> Result<(), CliError> {
    let s = run.scheme;
    for (k, snap) in run.snapshots.iter().enumerate() {
        dir.write(&format!("sim2d_{s}_rho_{k}.dat"), &field_string(snap, &snap.rho))?;
        dir.write(&format!("sim2d_{s}_u_{k}.dat"), &field_string(snap, &snap.u))?;
        dir.write(&format!("sim2d_{s}_v_{k}.dat"), &field_string(snap, &snap.v))?;
    }
    let last = run.snapshots.last().expect("at least one snapshot");
    metrics.push(format!("{s}.steps"), run.steps);
    metrics.push(format!("{s}.time"), last.time);
    metrics.push(format!("{s}.mass_initial"), run.mass.0);
    metrics.push(format!("{s}.mass_final"), run.mass.1);
    metrics.push(format!("{s}.rho_min"), last.rho.iter().copied().fold(f64::INFINITY, f64::min));
    metrics.push(format!("{s}.rho_max"), last.rho.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    Ok(())
}

pub fn cmd_sim2d(config: &ExperimentConfig, dir: &mut OutputDir) -> Result<Metrics, CliError> {
    let mut metrics = Metrics::new();
    metrics.push("resolution", config.resolution);
    metrics.push("t_end", config.t_end);
    for &scheme in &config.schemes {
        let run = simulate_2d(config, scheme)?;
        report_2d(&run, dir, &mut metrics)?;
    }
    Ok(metrics)
}

pub fn cmd_micro(config: &ExperimentConfig, dir: &mut OutputDir) -> Result<Metrics, CliError> {
    let m = config.micro.as_ref().expect("validated micro section");
    let mut metrics = Metrics::new();
    metrics.push("dt", m.dt);
    metrics.push("n_steps", m.n_steps);
    let mut meta = vec![
        ("name".to_string(), config.name.clone()),
        ("gamma".to_string(), m.params.gamma.to_string()),
        ("u_star".to_string(), m.params.u_star.to_string()),
        ("v_star".to_string(), m.params.v_star.to_string()),
        ("d".to_string(), m.params.d.to_string()),
        ("dt".to_string(), m.dt.to_string()),
        ("n_steps".to_string(), m.n_steps.to_string()),
        ("store_every".to_string(), m.store_every.to_string()),
    ];
    match &m.platoon {
        Platoon::Line(vs) => {
            let traj = integrate_1d(vs, &m.params, m.dt, m.n_steps, m.store_every)
                .map_err(CliError::numerical("micro"))?;
            let (mut t, mut id, mut x, mut u) = (vec![], vec![], vec![], vec![]);
            for (time, frame) in traj.times.iter().zip(&traj.frames) {
                for (i, v) in frame.iter().enumerate() {
                    t.push(*time);
                    id.push(i as f64);
                    x.push(v.x);
                    u.push(v.u);
                }
            }
            dir.write("micro.csv", &csv_string(&meta, &["t", "vehicle", "x", "u"], &[&t, &id, &x, &u]))?;
            let drift = w_drift(&traj, &m.params);
            metrics.push("w_drift_max_relative", drift.max_relative());
            metrics.push("w_drift_max_absolute", drift.max_absolute());
        }
        Platoon::Plane(vs) => {
            meta.push(("dl".to_string(), m.params.dl.to_string()));
            let traj = integrate_2d(vs, &m.params, m.dt, m.n_steps, m.store_every)
                .map_err(CliError::numerical("micro"))?;
            let (mut t, mut id, mut x, mut y, mut u, mut v) = (vec![], vec![], vec![], vec![], vec![], vec![]);
            for (time, frame) in traj.times.iter().zip(&traj.frames) {
                for (i, c) in frame.iter().enumerate() {
                    t.push(*time);
                    id.push(i as f64);
                    x.push(c.x);
                    y.push(c.y);
                    u.push(c.u);
                    v.push(c.v);
                }
            }
            dir.write(
                "micro.csv",
                &csv_string(&meta, &["t", "vehicle", "x", "y", "u", "v"], &[&t, &id, &x, &y, &u, &v]),
            )?;
            let (w, sigma) = w_sigma_drift(&traj, &m.params);
            metrics.push("w_drift_max_relative", w.max_relative());
            metrics.push("w_drift_max_absolute", w.max_absolute());
            metrics.push("sigma_drift_max_relative", sigma.max_relative());
            metrics.push("sigma_drift_max_absolute", sigma.max_absolute());
        }
    }
    Ok(metrics)
}

/// Runs the schemes side by side on one data set. They share nothing, so
/// each gets its own thread.
pub fn cmd_compare(config: &ExperimentConfig, dir: &mut OutputDir) -> Result<Metrics, CliError> {
    let mut metrics = Metrics::new();
    metrics.push("resolution", config.resolution);
    metrics.push("t_end", config.t_end);
    if config.is_two_dimensional() {
        let runs: Vec<Result<Run2D, CliError>> = std::thread::scope(|s| {
            let handles: Vec<_> = config
                .schemes
                .iter()
                .map(|&scheme| s.spawn(move || simulate_2d(config, scheme)))
                .collect();
            handles.into_iter().map(|h| h.join().expect("solver thread panicked")).collect()
        });
        for run in runs {
            report_2d(&run?, dir, &mut metrics)?;
        }
    } else {
        let kind = config.models[0];
        write_exact(config, kind, dir)?;
        let runs: Vec<Result<Run1D, CliError>> = std::thread::scope(|s| {
            let handles: Vec<_> = config
                .schemes
                .iter()
                .map(|&scheme| s.spawn(move || simulate_1d(config, scheme, kind)))
                .collect();
            handles.into_iter().map(|h| h.join().expect("solver thread panicked")).collect()
        });
        for run in runs {
            report_1d(config, &run?, dir, &mut metrics)?;
        }
    }
    Ok(metrics)
}
