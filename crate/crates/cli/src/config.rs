//! Experiment configuration files.
//!
//! A config is a TOML document. Every section is optional; missing values
//! take the defaults of the command being run. Unknown keys are rejected.
//!
//! ```toml
//! name = "test4_1d"
//!
//! [params]
//! rho_star = 1.0
//! u_star = 25.0
//! gamma = 2.0
//!
//! [run]
//! scheme = "hybrid"
//! t_end = 0.02
//! resolution = 400
//!
//! [riemann]
//! rho_left = 0.8
//! u_left = 15.0
//! rho_right = 0.7
//! u_right = 15.0
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use rarz::micro::{MicroParams, Vehicle1D, Vehicle2D};
use rarz::scheme1d::DEFAULT_CFL;
use rarz::solver2d::{Quadrants, State2D};
use rarz::{ModelKind, ModelParams, Scheme};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Fd,
    Riemann,
    Sim1d,
    Sim2d,
    Micro,
    Compare,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Fd => "fd",
            Command::Riemann => "riemann",
            Command::Sim1d => "sim1d",
            Command::Sim2d => "sim2d",
            Command::Micro => "micro",
            Command::Compare => "compare",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<RawParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub run: Option<RawRun>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub riemann: Option<RawRiemann>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<RawGrid>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub quadrant: Vec<State2D>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fd: Option<RawFd>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub micro: Option<RawMicro>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawParams {
    pub rho_star: Option<f64>,
    pub u_star: Option<f64>,
    pub v_star: Option<f64>,
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRun {
    pub scheme: Option<Scheme>,
    pub schemes: Option<Vec<Scheme>>,
    pub model: Option<ModelKind>,
    pub models: Option<Vec<ModelKind>>,
    pub cfl: Option<f64>,
    pub t_end: Option<f64>,
    pub resolution: Option<usize>,
    pub snapshot_times: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRiemann {
    pub rho_left: Option<f64>,
    pub u_left: Option<f64>,
    pub rho_right: Option<f64>,
    pub u_right: Option<f64>,
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub split: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGrid {
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub y_min: Option<f64>,
    pub y_max: Option<f64>,
    pub split_x: Option<f64>,
    pub split_y: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawFd {
    pub gammas: Option<Vec<f64>>,
    pub w: Option<Vec<f64>>,
    pub models: Option<Vec<ModelKind>>,
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMicro {
    pub dt: Option<f64>,
    pub n_steps: Option<usize>,
    pub store_every: Option<usize>,
    pub d: Option<f64>,
    pub dx_len: Option<f64>,
    pub dy_len: Option<f64>,
    pub d_x: Option<f64>,
    pub d_y: Option<f64>,
    pub dl: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vehicle: Vec<RawVehicle>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawVehicle {
    pub x: f64,
    pub u: f64,
    pub y: Option<f64>,
    pub v: Option<f64>,
    pub leader: Option<usize>,
}

/// Left and right states of a one-dimensional Riemann problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannSpec {
    pub rho_left: f64,
    pub u_left: f64,
    pub rho_right: f64,
    pub u_right: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub split: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdSpec {
    pub gammas: Vec<f64>,
    pub w: Vec<f64>,
    pub models: Vec<ModelKind>,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Platoon {
    Line(Vec<Vehicle1D>),
    Plane(Vec<Vehicle2D>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MicroSpec {
    pub dt: f64,
    pub n_steps: usize,
    pub store_every: usize,
    pub params: MicroParams,
    pub platoon: Platoon,
}

/// A fully resolved and validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub command: Command,
    pub params: ModelParams,
    pub schemes: Vec<Scheme>,
    pub models: Vec<ModelKind>,
    pub cfl: f64,
    pub t_end: f64,
    pub resolution: usize,
    pub snapshot_times: Vec<f64>,
    pub riemann: Option<RiemannSpec>,
    pub grid: GridSpec,
    pub quadrants: Option<Quadrants>,
    pub fd: Option<FdSpec>,
    pub micro: Option<MicroSpec>,
}

/// Model parameters assumed when a config leaves them out.
pub fn default_params(two_dimensional: bool) -> ModelParams {
    if two_dimensional {
        ModelParams::default()
    } else {
        ModelParams {
            rho_star: 1.0,
            u_star: 25.0,
            v_star: 25.0,
            gamma: 2.0,
        }
    }
}

fn invalid(field: &str, message: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {message}"))
}

fn positive(field: &str, value: f64) -> Result<f64, CliError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(invalid(field, format!("must be positive and finite, got {value}")))
    }
}

fn check_state(prefix: &str, rho: f64, u: f64, v: Option<f64>, params: &ModelParams) -> Result<(), CliError> {
    let name = |field: &str| format!("{prefix}{field}");
    if !(rho.is_finite() && rho >= 0.0 && rho < params.rho_star) {
        return Err(invalid(&name("rho"), format!("{rho} is outside [0, rho_star = {})", params.rho_star)));
    }
    if !(u.is_finite() && (0.0..=params.u_star).contains(&u)) {
        return Err(invalid(&name("u"), format!("{u} is outside [0, u_star = {}]", params.u_star)));
    }
    if let Some(v) = v {
        if !(v.is_finite() && (0.0..=params.v_star).contains(&v)) {
            return Err(invalid(&name("v"), format!("{v} is outside [0, v_star = {}]", params.v_star)));
        }
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn parse(text: &str, command: Command) -> Result<Self, CliError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        ExperimentConfig::resolve(raw, command)
    }

    pub fn load(path: &Path, command: Command) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        ExperimentConfig::parse(&text, command)
    }

    /// Applies defaults for `command` and validates the result.
    pub fn resolve(raw: RawConfig, command: Command) -> Result<Self, CliError> {
        if let Some(c) = raw.command {
            if c != command {
                return Err(invalid(
                    "command",
                    format!("config is for '{}' but '{}' was requested", c.name(), command.name()),
                ));
            }
        }
        let two_d = command == Command::Sim2d || (command == Command::Compare && !raw.quadrant.is_empty());
        let defaults = default_params(two_d);
        let rp = raw.params.unwrap_or_default();
        let params = ModelParams {
            rho_star: positive("params.rho_star", rp.rho_star.unwrap_or(defaults.rho_star))?,
            u_star: positive("params.u_star", rp.u_star.unwrap_or(defaults.u_star))?,
            v_star: positive("params.v_star", rp.v_star.or(rp.u_star).unwrap_or(defaults.v_star))?,
            gamma: positive("params.gamma", rp.gamma.unwrap_or(defaults.gamma))?,
        };

        let run = raw.run.unwrap_or_default();
        let default_scheme = if two_d { Scheme::Hybrid } else { Scheme::Godunov };
        let schemes = match (run.schemes, run.scheme) {
            (Some(_), Some(_)) => return Err(invalid("run.schemes", "give either scheme or schemes")),
            (Some(list), None) if list.is_empty() => return Err(invalid("run.schemes", "must not be empty")),
            (Some(list), None) => list,
            (None, Some(s)) => vec![s],
            (None, None) => match command {
                Command::Compare if two_d => vec![Scheme::Hll, Scheme::Hybrid],
                Command::Compare => vec![Scheme::Godunov, Scheme::Hybrid],
                _ => vec![default_scheme],
            },
        };
        let models = match (run.models, run.model) {
            (Some(_), Some(_)) => return Err(invalid("run.models", "give either model or models")),
            (Some(list), None) if list.is_empty() => return Err(invalid("run.models", "must not be empty")),
            (Some(list), None) => list,
            (None, Some(m)) => vec![m],
            (None, None) => vec![ModelKind::Rarz],
        };
        if two_d && models != [ModelKind::Rarz] {
            return Err(invalid("run.models", "two-dimensional runs use the constrained model only"));
        }
        let cfl = run.cfl.unwrap_or(DEFAULT_CFL);
        if !(cfl > 0.0 && cfl <= 1.0) {
            return Err(invalid("run.cfl", format!("must lie in (0, 1], got {cfl}")));
        }
        let t_end = run.t_end.unwrap_or(0.0);
        if !(t_end.is_finite() && t_end >= 0.0) {
            return Err(invalid("run.t_end", format!("must be >= 0, got {t_end}")));
        }
        let resolution = run.resolution.unwrap_or(if two_d { 200 } else { 400 });
        if resolution == 0 {
            return Err(invalid("run.resolution", "must be at least 1"));
        }
        let mut snapshot_times = run.snapshot_times.unwrap_or_default();
        if let Some(t) = snapshot_times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return Err(invalid("run.snapshot_times", format!("invalid time {t}")));
        }
        snapshot_times.sort_by(f64::total_cmp);

        let riemann = match raw.riemann {
            None => None,
            Some(r) => {
                let need = |v: Option<f64>, f: &str| v.ok_or_else(|| invalid(&format!("riemann.{f}"), "missing"));
                let spec = RiemannSpec {
                    rho_left: need(r.rho_left, "rho_left")?,
                    u_left: need(r.u_left, "u_left")?,
                    rho_right: need(r.rho_right, "rho_right")?,
                    u_right: need(r.u_right, "u_right")?,
                    x_min: r.x_min.unwrap_or(0.0),
                    x_max: r.x_max.unwrap_or(2.0),
                    split: r.split.unwrap_or(1.0),
                };
                if !(spec.x_max > spec.x_min) || !spec.x_min.is_finite() || !spec.x_max.is_finite() {
                    return Err(invalid("riemann.x_max", "must exceed x_min"));
                }
                if !(spec.split > spec.x_min && spec.split < spec.x_max) {
                    return Err(invalid("riemann.split", "must lie inside the domain"));
                }
                Some(spec)
            }
        };
        if let Some(r) = &riemann {
            // the comparison closures may leave the constrained ranges
            let constrained = models.contains(&ModelKind::Rarz);
            let cap = if constrained { params } else { ModelParams { rho_star: f64::MAX, u_star: f64::MAX, ..params } };
            check_state("riemann.", r.rho_left, r.u_left, None, &cap).map_err(|e| rename(e, "_left"))?;
            check_state("riemann.", r.rho_right, r.u_right, None, &cap).map_err(|e| rename(e, "_right"))?;
        }

        let g = raw.grid.unwrap_or_default();
        let grid = GridSpec {
            x_min: g.x_min.unwrap_or(0.0),
            x_max: g.x_max.unwrap_or(2.0),
            y_min: g.y_min.unwrap_or(0.0),
            y_max: g.y_max.unwrap_or(2.0),
        };
        if !(grid.x_max > grid.x_min) {
            return Err(invalid("grid.x_max", "must exceed x_min"));
        }
        if !(grid.y_max > grid.y_min) {
            return Err(invalid("grid.y_max", "must exceed y_min"));
        }
        let split = (
            g.split_x.unwrap_or(0.5 * (grid.x_min + grid.x_max)),
            g.split_y.unwrap_or(0.5 * (grid.y_min + grid.y_max)),
        );
        let quadrants = match raw.quadrant.len() {
            0 => None,
            4 => {
                for (k, q) in raw.quadrant.iter().enumerate() {
                    check_state(&format!("quadrant[{}].", k + 1), q.rho, q.u, Some(q.v), &params)?;
                }
                let states = [raw.quadrant[0], raw.quadrant[1], raw.quadrant[2], raw.quadrant[3]];
                Some(Quadrants { states, split })
            }
            n => return Err(invalid("quadrant", format!("expected four quadrants, found {n}"))),
        };

        let fd = match raw.fd {
            None => None,
            Some(f) => {
                let spec = FdSpec {
                    gammas: f.gammas.unwrap_or_else(|| vec![params.gamma]),
                    w: f.w.ok_or_else(|| invalid("fd.w", "missing"))?,
                    models: f.models.unwrap_or_else(|| ModelKind::ALL.to_vec()),
                    samples: f.samples.unwrap_or(200),
                };
                for &g in &spec.gammas {
                    positive("fd.gammas", g)?;
                }
                for &w in &spec.w {
                    positive("fd.w", w)?;
                }
                if spec.samples < 2 {
                    return Err(invalid("fd.samples", "need at least 2"));
                }
                Some(spec)
            }
        };

        let micro = raw.micro.map(|m| resolve_micro(m, &params)).transpose()?;

        let config = ExperimentConfig {
            name: raw.name.unwrap_or_else(|| command.name().to_string()),
            command,
            params,
            schemes,
            models,
            cfl,
            t_end,
            resolution,
            snapshot_times,
            riemann,
            grid,
            quadrants,
            fd,
            micro,
        };
        config.check_command()?;
        Ok(config)
    }

    fn check_command(&self) -> Result<(), CliError> {
        match self.command {
            Command::Fd if self.fd.is_none() => Err(invalid("fd", "section required for fd")),
            Command::Riemann | Command::Sim1d if self.riemann.is_none() => {
                Err(invalid("riemann", format!("section required for {}", self.command.name())))
            }
            Command::Sim2d if self.quadrants.is_none() => Err(invalid("quadrant", "four quadrants required for sim2d")),
            Command::Micro if self.micro.is_none() => Err(invalid("micro", "section required for micro")),
            Command::Compare if self.riemann.is_none() && self.quadrants.is_none() => {
                Err(invalid("riemann", "compare needs a riemann section or four quadrants"))
            }
            _ => Ok(()),
        }
    }

    pub fn is_two_dimensional(&self) -> bool {
        self.quadrants.is_some() && matches!(self.command, Command::Sim2d | Command::Compare)
    }

    /// Replaces the schemes with `scheme` as requested on the command line.
    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.schemes = vec![scheme];
        self
    }

    pub fn with_resolution(mut self, resolution: usize) -> Result<Self, CliError> {
        if resolution == 0 {
            return Err(invalid("resolution", "must be at least 1"));
        }
        self.resolution = resolution;
        Ok(self)
    }

    /// The config as a document that parses back to `self`.
    pub fn to_raw(&self) -> RawConfig {
        RawConfig {
            name: Some(self.name.clone()),
            command: Some(self.command),
            params: Some(RawParams {
                rho_star: Some(self.params.rho_star),
                u_star: Some(self.params.u_star),
                v_star: Some(self.params.v_star),
                gamma: Some(self.params.gamma),
            }),
            run: Some(RawRun {
                scheme: None,
                schemes: Some(self.schemes.clone()),
                model: None,
                models: Some(self.models.clone()),
                cfl: Some(self.cfl),
                t_end: Some(self.t_end),
                resolution: Some(self.resolution),
                snapshot_times: Some(self.snapshot_times.clone()),
            }),
            riemann: self.riemann.map(|r| RawRiemann {
                rho_left: Some(r.rho_left),
                u_left: Some(r.u_left),
                rho_right: Some(r.rho_right),
                u_right: Some(r.u_right),
                x_min: Some(r.x_min),
                x_max: Some(r.x_max),
                split: Some(r.split),
            }),
            grid: Some(RawGrid {
                x_min: Some(self.grid.x_min),
                x_max: Some(self.grid.x_max),
                y_min: Some(self.grid.y_min),
                y_max: Some(self.grid.y_max),
                split_x: self.quadrants.map(|q| q.split.0),
                split_y: self.quadrants.map(|q| q.split.1),
            }),
            quadrant: self.quadrants.map(|q| q.states.to_vec()).unwrap_or_default(),
            fd: self.fd.as_ref().map(|f| RawFd {
                gammas: Some(f.gammas.clone()),
                w: Some(f.w.clone()),
                models: Some(f.models.clone()),
                samples: Some(f.samples),
            }),
            micro: self.micro.as_ref().map(|m| RawMicro {
                dt: Some(m.dt),
                n_steps: Some(m.n_steps),
                store_every: Some(m.store_every),
                d: Some(m.params.d),
                dx_len: Some(m.params.dx_len),
                dy_len: Some(m.params.dy_len),
                d_x: Some(m.params.d_x),
                d_y: Some(m.params.d_y),
                dl: Some(m.params.dl),
                vehicle: match &m.platoon {
                    Platoon::Line(vs) => vs
                        .iter()
                        .map(|v| RawVehicle {
                            x: v.x,
                            u: v.u,
                            ..Default::default()
                        })
                        .collect(),
                    Platoon::Plane(vs) => vs
                        .iter()
                        .map(|v| RawVehicle {
                            x: v.x,
                            u: v.u,
                            y: Some(v.y),
                            v: Some(v.v),
                            leader: v.leader,
                        })
                        .collect(),
                },
            }),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_raw()).expect("config serializes to TOML")
    }
}

/// Turns "riemann.rho" into "riemann.rho_left" and so on.
fn rename(e: CliError, suffix: &str) -> CliError {
    match e {
        CliError::Config(msg) => match msg.split_once(':') {
            Some((field, rest)) => CliError::Config(format!("{field}{suffix}:{rest}")),
            None => CliError::Config(msg),
        },
        other => other,
    }
}

fn resolve_micro(m: RawMicro, params: &ModelParams) -> Result<MicroSpec, CliError> {
    let dt = positive("micro.dt", m.dt.unwrap_or(1e-3))?;
    let n_steps = m.n_steps.unwrap_or(1000);
    let store_every = m.store_every.unwrap_or(1);
    if store_every == 0 {
        return Err(invalid("micro.store_every", "must be at least 1"));
    }
    let d = positive("micro.d", m.d.unwrap_or(5.0))?;
    // ρ* = ΔX / d fixes the vehicle length unless given
    let dx_len = positive("micro.dx_len", m.dx_len.unwrap_or(d * params.rho_star))?;
    let dy_len = positive("micro.dy_len", m.dy_len.unwrap_or(1.0))?;
    let d_x = positive("micro.d_x", m.d_x.unwrap_or(d))?;
    let d_y = positive("micro.d_y", m.d_y.unwrap_or(d * dy_len / d_x))?;
    let mut micro_params =
        MicroParams::new(params.gamma, params.u_star, params.v_star, d, dx_len, dy_len, d_x, d_y)
            .map_err(|e| invalid("micro", e))?;
    if let Some(dl) = m.dl {
        micro_params.dl = positive("micro.dl", dl)?;
    }
    if m.vehicle.is_empty() {
        return Err(invalid("micro.vehicle", "at least one vehicle required"));
    }
    let planar = m.vehicle.iter().any(|v| v.y.is_some() || v.v.is_some() || v.leader.is_some());
    let platoon = if planar {
        let n = m.vehicle.len();
        let vs = m
            .vehicle
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let field = |f: &str| format!("micro.vehicle[{i}].{f}");
                if let Some(j) = v.leader {
                    if j >= n || j == i {
                        return Err(invalid(&field("leader"), format!("invalid index {j}")));
                    }
                }
                let y = v.y.ok_or_else(|| invalid(&field("y"), "missing"))?;
                let vv = v.v.unwrap_or(0.0);
                if !(0.0..=params.u_star).contains(&v.u) {
                    return Err(invalid(&field("u"), format!("{} is outside [0, u_star]", v.u)));
                }
                if !(0.0..=params.v_star).contains(&vv) {
                    return Err(invalid(&field("v"), format!("{vv} is outside [0, v_star]")));
                }
                Ok(Vehicle2D {
                    x: v.x,
                    y,
                    u: v.u,
                    v: vv,
                    leader: v.leader,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Platoon::Plane(vs)
    } else {
        let vs: Vec<Vehicle1D> = m.vehicle.iter().map(|v| Vehicle1D { x: v.x, u: v.u }).collect();
        for (i, v) in vs.iter().enumerate() {
            if !(0.0..=params.u_star).contains(&v.u) {
                return Err(invalid(&format!("micro.vehicle[{i}].u"), format!("{} is outside [0, u_star]", v.u)));
            }
        }
        Platoon::Line(vs)
    };
    Ok(MicroSpec {
        dt,
        n_steps,
        store_every,
        params: micro_params,
        platoon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEST4: &str = r#"
name = "test4_1d"
[run]
t_end = 0.02
[riemann]
rho_left = 0.8
u_left = 15.0
rho_right = 0.7
u_right = 15.0
"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = ExperimentConfig::parse(TEST4, Command::Sim1d).unwrap();
        assert_eq!(c.params, default_params(false));
        assert_eq!(c.schemes, vec![Scheme::Godunov]);
        assert_eq!(c.resolution, 400);
        assert_eq!(c.cfl, DEFAULT_CFL);
        let r = c.riemann.unwrap();
        assert_eq!((r.x_min, r.x_max, r.split), (0.0, 2.0, 1.0));
    }

    #[test]
    fn velocity_above_cap_names_the_field() {
        let doc = TEST4.replace("u_left = 15.0", "u_left = 30.0");
        let err = ExperimentConfig::parse(&doc, Command::Sim1d).unwrap_err();
        assert!(err.to_string().contains("u_left"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let doc = format!("{TEST4}\nspeed = 3\n");
        let err = ExperimentConfig::parse(&doc, Command::Sim1d).unwrap_err();
        assert!(err.to_string().contains("speed"), "{err}");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = ExperimentConfig::parse("name = \n", Command::Sim1d).unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn round_trip() {
        let c = ExperimentConfig::parse(TEST4, Command::Compare).unwrap();
        let again = ExperimentConfig::parse(&c.to_toml(), Command::Compare).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn command_mismatch_is_a_config_error() {
        let doc = format!("command = \"fd\"\n{TEST4}");
        assert!(ExperimentConfig::parse(&doc, Command::Sim1d).is_err());
    }
}
