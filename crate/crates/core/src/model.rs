//! Model algebra: the pressure law, the pseudo-velocity map, state
//! conversions, fluxes and eigenvalues of the constrained second-order
//! traffic model, plus the ARZ and MAR closures used for comparison.
//!
//! The constrained model transports `w = ũ(u) p(ρ)` with
//!
//! ```text
//! p(ρ) = (1/ρ − 1/ρ*)^(−γ),     ũ(u) = (1/u − 1/u*)^(−1)
//! ```
//!
//! so that densities stay below `ρ*` and velocities below `u*`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cells with `ρ ≤ VACUUM_FRACTION · ρ*` are treated as vacuum.
pub const VACUUM_FRACTION: f64 = 1e-10;

/// Velocities are clamped to `u* · VELOCITY_CAP` before entering `ũ`.
pub const VELOCITY_CAP: f64 = 1.0 - 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Jam density.
    pub rho_star: f64,
    /// Maximal longitudinal velocity.
    pub u_star: f64,
    /// Maximal lateral velocity (two-dimensional runs only).
    pub v_star: f64,
    /// Pressure exponent.
    pub gamma: f64,
}

impl ModelParams {
    pub fn new(rho_star: f64, u_star: f64, v_star: f64, gamma: f64) -> Result<Self> {
        let params = ModelParams {
            rho_star,
            u_star,
            v_star,
            gamma,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("rho_star", self.rho_star),
            ("u_star", self.u_star),
            ("v_star", self.v_star),
            ("gamma", self.gamma),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParams { name, value });
            }
        }
        Ok(())
    }

    pub fn vacuum_density(&self) -> f64 {
        VACUUM_FRACTION * self.rho_star
    }

    /// The same parameters with the roles of `u*` and `v*` exchanged.
    pub fn transposed(&self) -> Self {
        ModelParams {
            u_star: self.v_star,
            v_star: self.u_star,
            ..*self
        }
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            rho_star: 1.0,
            u_star: 1.0,
            v_star: 1.0,
            gamma: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PrimitiveState {
    pub rho: f64,
    pub u: f64,
}

impl PrimitiveState {
    pub const fn new(rho: f64, u: f64) -> Self {
        PrimitiveState { rho, u }
    }
}

/// `(ρ, ρw)` where `w` is the advected quantity of the closure in use.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConservedState {
    pub rho: f64,
    pub y: f64,
}

impl ConservedState {
    pub const fn new(rho: f64, y: f64) -> Self {
        ConservedState { rho, y }
    }

    pub fn to_array(self) -> [f64; 2] {
        [self.rho, self.y]
    }

    pub fn from_array(a: [f64; 2]) -> Self {
        ConservedState { rho: a[0], y: a[1] }
    }
}

/// `p(ρ) = (1/ρ − 1/ρ*)^(−γ)` for `0 < ρ < ρ*`.
pub fn pressure(rho: f64, params: &ModelParams) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::domain("rho", rho, "density must be positive"));
    }
    if !(rho < params.rho_star) {
        return Err(Error::domain("rho", rho, "density must stay below rho_star"));
    }
    Ok(pressure_unchecked(rho, params))
}

#[inline]
pub(crate) fn pressure_unchecked(rho: f64, params: &ModelParams) -> f64 {
    (1.0 / rho - 1.0 / params.rho_star).powf(-params.gamma)
}

/// Closed-form inverse of [`pressure`].
pub fn pressure_inverse(p: f64, params: &ModelParams) -> Result<f64> {
    if !(p > 0.0) || p.is_nan() {
        return Err(Error::domain("p", p, "pressure must be positive"));
    }
    Ok(pressure_inverse_unchecked(p, params))
}

#[inline]
pub(crate) fn pressure_inverse_unchecked(p: f64, params: &ModelParams) -> f64 {
    1.0 / (p.powf(-1.0 / params.gamma) + 1.0 / params.rho_star)
}

/// `ũ(u) = (1/u − 1/u*)^(−1)` for `0 < u < u*`.
pub fn pseudo_velocity(u: f64, params: &ModelParams) -> Result<f64> {
    pseudo_velocity_with(u, params.u_star)
}

pub(crate) fn pseudo_velocity_with(u: f64, u_star: f64) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::domain("u", u, "velocity must be positive"));
    }
    if !(u < u_star) {
        return Err(Error::domain("u", u, "velocity must stay below u_star"));
    }
    Ok(1.0 / (1.0 / u - 1.0 / u_star))
}

/// `ũ` extended to `[0, u*]`: zero at rest, and the velocity cap applied
/// at the upper end.
#[inline]
pub(crate) fn pseudo_velocity_clamped(u: f64, u_star: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        let u = u.min(u_star * VELOCITY_CAP);
        1.0 / (1.0 / u - 1.0 / u_star)
    }
}

/// `u = ũ u* / (ũ + u*)`, mapping `[0, ∞)` onto `[0, u*)`.
pub fn pseudo_velocity_inverse(utilde: f64, params: &ModelParams) -> Result<f64> {
    if !(utilde >= 0.0) {
        return Err(Error::domain(
            "utilde",
            utilde,
            "pseudo-velocity must be non-negative",
        ));
    }
    Ok(pseudo_velocity_inverse_with(utilde, params.u_star))
}

#[inline]
pub(crate) fn pseudo_velocity_inverse_with(utilde: f64, u_star: f64) -> f64 {
    if utilde.is_infinite() {
        u_star
    } else {
        utilde * u_star / (utilde + u_star)
    }
}

/// Encodes `(ρ, u)` as `(ρ, ρ ũ p)`.
///
/// Vacuum cells map to the zero state.
pub fn to_conserved(w: PrimitiveState, params: &ModelParams) -> Result<ConservedState> {
    Model::rarz(*params).to_conserved(w)
}

/// Decodes `(ρ, ρ ũ p)`; vacuum cells come back as `(ρ, u*)`.
pub fn to_primitive(q: ConservedState, params: &ModelParams) -> Result<PrimitiveState> {
    Model::rarz(*params).to_primitive(q)
}

/// Physical flux `(ρu, ρuũp)`.
pub fn flux(w: PrimitiveState, params: &ModelParams) -> Result<[f64; 2]> {
    Model::rarz(*params).flux(w)
}

/// `(λ1, λ2)` with `λ1 = u` the contact speed and `λ2` the genuinely
/// nonlinear field.
pub fn eigenvalues(w: PrimitiveState, params: &ModelParams) -> Result<(f64, f64)> {
    if !(w.rho < params.rho_star) {
        return Err(Error::domain("rho", w.rho, "density must stay below rho_star"));
    }
    Ok((w.u, rarz_lambda2(w.rho, w.u, params.rho_star, params.u_star, params.gamma)))
}

#[inline]
pub(crate) fn rarz_lambda2(rho: f64, u: f64, rho_star: f64, u_star: f64, gamma: f64) -> f64 {
    u - gamma * u * rho_star * (u_star - u) / (u_star * (rho_star - rho))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// `w = u + ρ^γ`.
    Arz,
    /// `w = u + p(ρ)` with the jam-density pressure.
    Mar,
    /// `w = ũ(u) p(ρ)`.
    Rarz,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Arz, ModelKind::Mar, ModelKind::Rarz];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Arz => "arz",
            ModelKind::Mar => "mar",
            ModelKind::Rarz => "rarz",
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A closure of the two-equation system: which advected quantity `w` is
/// transported and how it relates to `(ρ, u)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Model {
    pub kind: ModelKind,
    pub params: ModelParams,
}

impl Model {
    pub fn new(kind: ModelKind, params: ModelParams) -> Self {
        Model { kind, params }
    }

    pub fn rarz(params: ModelParams) -> Self {
        Model::new(ModelKind::Rarz, params)
    }

    pub fn vacuum_density(&self) -> f64 {
        self.params.vacuum_density()
    }

    pub fn is_vacuum(&self, rho: f64) -> bool {
        rho <= self.vacuum_density()
    }

    /// The closure's velocity offset; ARZ uses `ρ^γ`.
    pub fn offset(&self, rho: f64) -> f64 {
        match self.kind {
            ModelKind::Arz => rho.powf(self.params.gamma),
            ModelKind::Mar | ModelKind::Rarz => pressure_unchecked(rho, &self.params),
        }
    }

    fn offset_inverse(&self, p: f64) -> f64 {
        match self.kind {
            ModelKind::Arz => p.powf(1.0 / self.params.gamma),
            ModelKind::Mar | ModelKind::Rarz => pressure_inverse_unchecked(p, &self.params),
        }
    }

    /// `ρ p'(ρ)`.
    fn offset_log_slope(&self, rho: f64) -> f64 {
        let g = self.params.gamma;
        match self.kind {
            ModelKind::Arz => g * rho.powf(g),
            ModelKind::Mar | ModelKind::Rarz => {
                let rs = self.params.rho_star;
                g * pressure_unchecked(rho, &self.params) * rs / (rs - rho)
            }
        }
    }

    fn check_density(&self, rho: f64) -> Result<()> {
        if !rho.is_finite() || rho < 0.0 {
            return Err(Error::domain("rho", rho, "density must be finite and non-negative"));
        }
        if self.kind != ModelKind::Arz && rho >= self.params.rho_star {
            return Err(Error::domain("rho", rho, "density must stay below rho_star"));
        }
        Ok(())
    }

    /// The advected quantity `w(ρ, u)`.
    pub fn advected(&self, rho: f64, u: f64) -> f64 {
        match self.kind {
            ModelKind::Arz | ModelKind::Mar => u + self.offset(rho),
            ModelKind::Rarz => pseudo_velocity_clamped(u, self.params.u_star) * self.offset(rho),
        }
    }

    /// Velocity on the level set `w = const` at density `rho > 0`.
    pub fn velocity_on_curve(&self, rho: f64, w: f64) -> f64 {
        match self.kind {
            ModelKind::Arz | ModelKind::Mar => w - self.offset(rho),
            ModelKind::Rarz => pseudo_velocity_inverse_with(w / self.offset(rho), self.params.u_star),
        }
    }

    /// Density on the level set `w = const` at velocity `u`, or `None` when
    /// the level set reaches vacuum before `u`.
    pub fn density_on_curve(&self, u: f64, w: f64) -> Option<f64> {
        let p = match self.kind {
            ModelKind::Arz | ModelKind::Mar => w - u,
            ModelKind::Rarz => {
                let ut = pseudo_velocity_clamped(u, self.params.u_star);
                if ut == 0.0 {
                    // at rest any density is compatible with w = 0 only
                    return if w > 0.0 { Some(self.params.rho_star) } else { None };
                }
                w / ut
            }
        };
        if p > 1e-300 {
            let rho = self.offset_inverse(p);
            (rho > self.vacuum_density()).then_some(rho)
        } else {
            None
        }
    }

    /// Velocity reached at the vacuum end of the level set `w = const`.
    pub fn vacuum_velocity(&self, w: f64) -> f64 {
        match self.kind {
            ModelKind::Arz | ModelKind::Mar => w,
            ModelKind::Rarz => {
                if w > 0.0 {
                    self.params.u_star
                } else {
                    0.0
                }
            }
        }
    }

    /// Speed of the genuinely nonlinear field.
    pub fn lambda2(&self, rho: f64, u: f64) -> f64 {
        if self.is_vacuum(rho) {
            return u;
        }
        match self.kind {
            ModelKind::Arz | ModelKind::Mar => u - self.offset_log_slope(rho),
            ModelKind::Rarz => {
                let p = &self.params;
                rarz_lambda2(rho, u, p.rho_star, p.u_star, p.gamma)
            }
        }
    }

    pub fn to_conserved(&self, w: PrimitiveState) -> Result<ConservedState> {
        self.check_density(w.rho)?;
        if !w.u.is_finite() {
            return Err(Error::domain("u", w.u, "velocity must be finite"));
        }
        if self.kind == ModelKind::Rarz && !(0.0..=self.params.u_star).contains(&w.u) {
            return Err(Error::domain("u", w.u, "velocity must lie in [0, u_star]"));
        }
        if self.is_vacuum(w.rho) {
            return Ok(ConservedState::new(w.rho, 0.0));
        }
        Ok(ConservedState::new(w.rho, w.rho * self.advected(w.rho, w.u)))
    }

    pub fn to_primitive(&self, q: ConservedState) -> Result<PrimitiveState> {
        if !(q.rho.is_finite() && q.y.is_finite()) {
            return Err(Error::NonFinite(format!("conserved state ({}, {})", q.rho, q.y)));
        }
        if q.rho <= self.vacuum_density() {
            if q.rho < -self.vacuum_density() {
                return Err(Error::domain("rho", q.rho, "negative density"));
            }
            return Ok(PrimitiveState::new(q.rho.max(0.0), self.params.u_star));
        }
        self.check_density(q.rho)?;
        let w = q.y / q.rho;
        match self.kind {
            ModelKind::Arz | ModelKind::Mar => Ok(PrimitiveState::new(q.rho, w - self.offset(q.rho))),
            ModelKind::Rarz => {
                let p = self.offset(q.rho);
                let mut ut = w / p;
                if ut < 0.0 {
                    if ut >= -1e-12 * self.params.u_star {
                        ut = 0.0;
                    } else {
                        return Err(Error::domain("y", q.y, "momentum variable must be non-negative"));
                    }
                }
                Ok(PrimitiveState::new(
                    q.rho,
                    pseudo_velocity_inverse_with(ut, self.params.u_star),
                ))
            }
        }
    }

    pub fn flux(&self, w: PrimitiveState) -> Result<[f64; 2]> {
        if w.u == 0.0 || self.is_vacuum(w.rho) {
            self.check_density(w.rho.min(self.params.rho_star * VELOCITY_CAP))?;
            return Ok([0.0, 0.0]);
        }
        let q = self.to_conserved(w)?;
        Ok([w.rho * w.u, w.u * q.y])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdPoint {
    pub rho: f64,
    pub u: f64,
    pub q: f64,
}

/// One fundamental-diagram curve at fixed advected quantity `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct FdSeries {
    pub model_kind: ModelKind,
    pub w: f64,
    pub points: Vec<FdPoint>,
}

/// Equilibrium velocity and flow along `w = const`.
///
/// ARZ uses the offset `ρ^γ` and clips negative speeds to zero; MAR keeps
/// negative speeds as they come.
pub fn fd_curve(
    model_kind: ModelKind,
    w: f64,
    rho_samples: &[f64],
    params: &ModelParams,
) -> Result<FdSeries> {
    if !(w > 0.0) || !w.is_finite() {
        return Err(Error::domain("w", w, "advected quantity must be positive"));
    }
    if rho_samples.windows(2).any(|pair| !(pair[1] > pair[0])) {
        return Err(Error::Unsupported(
            "density samples must be strictly increasing".into(),
        ));
    }
    let points = rho_samples
        .iter()
        .map(|&rho| {
            let u = match model_kind {
                ModelKind::Arz => {
                    if !(rho > 0.0) {
                        return Err(Error::domain("rho", rho, "density must be positive"));
                    }
                    (w - rho.powf(params.gamma)).max(0.0)
                }
                ModelKind::Mar => w - pressure(rho, params)?,
                ModelKind::Rarz => pseudo_velocity_inverse(w / pressure(rho, params)?, params)?,
            };
            Ok(FdPoint { rho, u, q: rho * u })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FdSeries {
        model_kind,
        w,
        points,
    })
}

/// `n` increasing densities in `(0, ρ*)`, the last one pushed close to the
/// jam density so the congested limit is visible.
pub fn fd_density_samples(n: usize, params: &ModelParams) -> Vec<f64> {
    let rs = params.rho_star;
    let mut samples: Vec<f64> = (1..n.max(2)).map(|k| rs * k as f64 / n.max(2) as f64).collect();
    samples.push(rs * (1.0 - 1e-9));
    samples
}
