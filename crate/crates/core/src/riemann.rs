//! Exact Riemann solver for the two-equation system.
//!
//! A Riemann problem `(L, R)` is solved by a nonlinear wave of the second
//! field (shock or rarefaction along `w = w_L`) followed by a contact moving
//! at `u_R`. The middle state has `u_M = u_R` and lies on the level set of
//! `w_L`, so for the constrained closure it has the closed form
//! `ρ_M = p⁻¹(w_L / ũ(u_R))`.

use crate::error::{Error, Result};
use crate::model::{Model, ModelParams, PrimitiveState};

/// Relative velocity gap below which a problem is a pure contact.
pub const CONTACT_TIE_TOLERANCE: f64 = 1e-12;

const SHOCK_MIN_JUMP: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WavePattern {
    ShockContact,
    RarefactionContact,
    ContactOnly,
    /// Rarefaction that empties into vacuum before the contact.
    VacuumFan,
}

impl WavePattern {
    pub fn label(self) -> &'static str {
        match self {
            WavePattern::ShockContact => "S+J",
            WavePattern::RarefactionContact => "R+J",
            WavePattern::ContactOnly => "J",
            WavePattern::VacuumFan => "R+vacuum+J",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveBranch {
    Shock,
    Rarefaction,
}

/// Self-similar solution of one Riemann problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannFan {
    pub model: Model,
    pub left: PrimitiveState,
    pub right: PrimitiveState,
    pub middle: PrimitiveState,
    pub pattern: WavePattern,
    pub shock_speed: Option<f64>,
    pub fan_edges: Option<(f64, f64)>,
    pub contact_speed: f64,
    /// Advected quantity of the left state, constant up to the contact.
    pub w_left: f64,
}

/// Classification by velocity ordering alone.
pub fn classify(left: PrimitiveState, right: PrimitiveState, params: &ModelParams) -> WavePattern {
    classify_velocities(left.u, right.u, params.u_star)
}

fn classify_velocities(u_left: f64, u_right: f64, u_scale: f64) -> WavePattern {
    if (u_left - u_right).abs() < CONTACT_TIE_TOLERANCE * u_scale {
        WavePattern::ContactOnly
    } else if u_right < u_left {
        WavePattern::ShockContact
    } else {
        WavePattern::RarefactionContact
    }
}

/// Middle state of the constrained model's Riemann problem.
///
/// A vacuum middle state is returned as `(0, u_end)` with `u_end` the
/// velocity at the vacuum end of the left level set.
pub fn intermediate_state(
    left: PrimitiveState,
    right: PrimitiveState,
    params: &ModelParams,
) -> Result<PrimitiveState> {
    Ok(RiemannFan::solve(&Model::rarz(*params), left, right)?.middle)
}

/// Rankine–Hugoniot speed `σ = [ρu] / [ρ]` of a jump from `left` to `middle`.
pub fn shock_speed(left: PrimitiveState, middle: PrimitiveState) -> Result<f64> {
    let jump = middle.rho - left.rho;
    if jump.abs() < SHOCK_MIN_JUMP {
        return Err(Error::DegenerateJump { jump });
    }
    Ok((middle.rho * middle.u - left.rho * left.u) / jump)
}

/// Left-limit sample of `fan` at `ξ = x / t`.
pub fn sample(fan: &RiemannFan, xi: f64) -> PrimitiveState {
    fan.sample(xi)
}

impl RiemannFan {
    pub fn solve(model: &Model, left: PrimitiveState, right: PrimitiveState) -> Result<Self> {
        for (name, state) in [("left", left), ("right", right)] {
            if !(state.rho.is_finite() && state.u.is_finite()) || state.rho < 0.0 {
                return Err(Error::NonFinite(format!("{name} state {state:?}")));
            }
            if model.kind != crate::model::ModelKind::Arz && state.rho >= model.params.rho_star {
                return Err(Error::domain("rho", state.rho, "density must stay below rho_star"));
            }
        }

        let mut fan = RiemannFan {
            model: *model,
            left,
            right,
            middle: PrimitiveState::new(left.rho, right.u),
            pattern: WavePattern::ContactOnly,
            shock_speed: None,
            fan_edges: None,
            contact_speed: right.u,
            w_left: 0.0,
        };

        if model.is_vacuum(left.rho) {
            // nothing to the left; the right state simply drives away
            fan.middle = PrimitiveState::new(0.0, right.u);
            return Ok(fan);
        }

        let w_left = model.advected(left.rho, left.u);
        fan.w_left = w_left;
        let mut pattern = classify_velocities(left.u, right.u, model.params.u_star);
        if model.is_vacuum(right.rho) && pattern == WavePattern::ContactOnly {
            pattern = WavePattern::RarefactionContact;
        }

        match pattern {
            WavePattern::ContactOnly => {}
            WavePattern::ShockContact | WavePattern::RarefactionContact => {
                let target_u = if model.is_vacuum(right.rho) {
                    model.vacuum_velocity(w_left)
                } else {
                    right.u
                };
                match model.density_on_curve(target_u, w_left) {
                    Some(rho_mid) if !model.is_vacuum(right.rho) => {
                        fan.middle = PrimitiveState::new(rho_mid, right.u);
                        if pattern == WavePattern::ShockContact {
                            let sigma = shock_speed(left, fan.middle)
                                .unwrap_or_else(|_| model.lambda2(left.rho, left.u));
                            fan.shock_speed = Some(sigma);
                        } else {
                            fan.fan_edges = Some((
                                model.lambda2(left.rho, left.u),
                                model.lambda2(rho_mid, right.u),
                            ));
                        }
                        fan.pattern = pattern;
                    }
                    _ => {
                        let u_end = model.vacuum_velocity(w_left).max(left.u);
                        fan.middle = PrimitiveState::new(0.0, u_end);
                        fan.fan_edges = Some((model.lambda2(left.rho, left.u), u_end));
                        fan.contact_speed = right.u.max(u_end);
                        fan.pattern = WavePattern::VacuumFan;
                    }
                }
            }
            WavePattern::VacuumFan => unreachable!("velocity ordering never yields a vacuum fan"),
        }
        Ok(fan)
    }

    /// Slowest wave speed of the fan.
    pub fn min_speed(&self) -> f64 {
        match self.pattern {
            WavePattern::ShockContact => self.shock_speed.unwrap_or(self.contact_speed),
            WavePattern::RarefactionContact | WavePattern::VacuumFan => {
                self.fan_edges.map_or(self.contact_speed, |(lo, _)| lo)
            }
            WavePattern::ContactOnly => self.contact_speed,
        }
    }

    /// State at `ξ`, taking the left limit on every wave.
    pub fn sample(&self, xi: f64) -> PrimitiveState {
        self.sample_with_side(xi).0
    }

    /// Like [`RiemannFan::sample`], also reporting whether `ξ` lies to the
    /// right of the contact.
    pub fn sample_with_side(&self, xi: f64) -> (PrimitiveState, bool) {
        if xi > self.contact_speed {
            return (self.right, true);
        }
        let state = match self.pattern {
            WavePattern::ContactOnly => self.left,
            WavePattern::ShockContact => {
                if xi <= self.shock_speed.unwrap_or(self.contact_speed) {
                    self.left
                } else {
                    self.middle
                }
            }
            WavePattern::RarefactionContact | WavePattern::VacuumFan => {
                let (head, tail) = self.fan_edges.unwrap_or((self.contact_speed, self.contact_speed));
                if xi <= head {
                    self.left
                } else if xi < tail {
                    self.fan_state(xi)
                } else {
                    self.middle
                }
            }
        };
        (state, false)
    }

    /// State inside the rarefaction where `λ2 = ξ`, by bisection on `u`.
    fn fan_state(&self, xi: f64) -> PrimitiveState {
        let model = &self.model;
        let w = self.w_left;
        let at = |u: f64| {
            let rho = model.density_on_curve(u, w).unwrap_or(0.0);
            PrimitiveState::new(rho, u)
        };
        let (mut lo, mut hi) = (self.left.u, self.middle.u);
        let tol = 1e-12 * xi.abs().max(1.0);
        let mut best = at(0.5 * (lo + hi));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            best = at(mid);
            let speed = model.lambda2(best.rho, best.u);
            if (speed - xi).abs() < tol || hi - lo <= f64::EPSILON * hi.abs() {
                break;
            }
            if speed < xi {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        best
    }
}

/// Points `(u, ρ)` on the shock or rarefaction branch of the level set
/// through `origin`, starting at `origin` and moving away from it.
pub fn wave_curve_points(
    origin: PrimitiveState,
    branch: WaveBranch,
    n: usize,
    params: &ModelParams,
) -> Result<Vec<(f64, f64)>> {
    let model = Model::rarz(*params);
    if !(origin.rho > model.vacuum_density() && origin.rho < params.rho_star) {
        return Err(Error::domain("rho", origin.rho, "curve origin must be a non-vacuum state"));
    }
    if !(origin.u > 0.0 && origin.u < params.u_star) {
        return Err(Error::domain("u", origin.u, "curve origin needs 0 < u < u_star"));
    }
    let w = model.advected(origin.rho, origin.u);
    let n = n.max(1);
    let points = (0..n)
        .map(|k| {
            let frac = k as f64 / n as f64;
            let u = match branch {
                WaveBranch::Shock => origin.u * (1.0 - frac),
                WaveBranch::Rarefaction => origin.u + (params.u_star - origin.u) * frac,
            };
            let rho = if k == 0 {
                origin.rho
            } else {
                model.density_on_curve(u, w).unwrap_or(0.0)
            };
            (u, rho)
        })
        .collect();
    Ok(points)
}
