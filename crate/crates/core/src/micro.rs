//! Follow-the-leader dynamics whose continuum limit is the constrained model.
//!
//! In one dimension vehicle `i` follows vehicle `i + 1`:
//!
//! ```text
//! u̇_i = γ u_i (u* − u_i) / u* · (u_{i+1} − u_i) / (x_{i+1} − x_i − d)
//! ```
//!
//! which keeps `w_i = ũ(u_i) τ_i^(−γ)` constant with `τ_i = (x_{i+1} − x_i − d)/ΔX`.
//! The front vehicle keeps its velocity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::pseudo_velocity_clamped;

/// Lateral offsets below `LATERAL_LIMIT · ΔY` count as zero.
pub const LATERAL_LIMIT: f64 = 1e-9;

/// A step is retried with `dt / 2^k` for `k ≤ MAX_HALVINGS`.
pub const MAX_HALVINGS: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vehicle1D {
    pub x: f64,
    pub u: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vehicle2D {
    pub x: f64,
    pub y: f64,
    pub u: f64,
    pub v: f64,
    /// Index of the vehicle ahead; `None` for a free vehicle.
    pub leader: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MicroParams {
    pub gamma: f64,
    pub u_star: f64,
    pub v_star: f64,
    /// Minimal longitudinal distance of the one-dimensional law.
    pub d: f64,
    /// Vehicle length `ΔX`.
    pub dx_len: f64,
    /// Vehicle width `ΔY`.
    pub dy_len: f64,
    pub d_x: f64,
    pub d_y: f64,
    /// The product entering the two-dimensional denominators.
    pub dl: f64,
}

impl MicroParams {
    /// Parameters with `dl = d_x · d_y`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        gamma: f64,
        u_star: f64,
        v_star: f64,
        d: f64,
        dx_len: f64,
        dy_len: f64,
        d_x: f64,
        d_y: f64,
    ) -> Result<Self> {
        let params = MicroParams {
            gamma,
            u_star,
            v_star,
            d,
            dx_len,
            dy_len,
            d_x,
            d_y,
            dl: d_x * d_y,
        };
        params.validate()?;
        Ok(params)
    }

    /// One-dimensional parameters; the lateral quantities are set so that
    /// the two-dimensional law reduces to the one-dimensional one.
    pub fn one_dimensional(gamma: f64, u_star: f64, d: f64, dx_len: f64) -> Result<Self> {
        MicroParams::new(gamma, u_star, u_star, d, dx_len, 1.0, d, 1.0)
    }

    /// `ρ* = ΔX / d`.
    pub fn rho_star(&self) -> f64 {
        self.dx_len / self.d
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("gamma", self.gamma),
            ("u_star", self.u_star),
            ("v_star", self.v_star),
            ("d", self.d),
            ("dx_len", self.dx_len),
            ("dy_len", self.dy_len),
            ("d_x", self.d_x),
            ("d_y", self.d_y),
            ("dl", self.dl),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParams { name, value });
            }
        }
        let lhs = self.d_x * self.d_y / (self.dx_len * self.dy_len);
        let rhs = 1.0 / self.rho_star();
        if (lhs - rhs).abs() > 1e-12 * rhs {
            return Err(Error::InvalidParams {
                name: "d_y",
                value: self.d_y,
            });
        }
        Ok(())
    }
}

fn relaxation(u: f64, u_star: f64, gamma: f64) -> f64 {
    gamma * u * (u_star - u) / u_star
}

/// Accelerations of the one-dimensional platoon, ordered back to front.
pub fn micro_rhs_1d(platoon: &[Vehicle1D], params: &MicroParams) -> Result<Vec<f64>> {
    let mut acc = vec![0.0; platoon.len()];
    for i in 0..platoon.len().saturating_sub(1) {
        let (a, b) = (platoon[i], platoon[i + 1]);
        let gap = b.x - a.x - params.d;
        if !(gap > 0.0) {
            return Err(Error::Collision {
                follower: i,
                leader: i + 1,
                gap,
            });
        }
        acc[i] = relaxation(a.u, params.u_star, params.gamma) * (b.u - a.u) / gap;
    }
    Ok(acc)
}

/// Offsets `(Δx, Δy)` to the leader, with the lateral limit applied.
fn offsets(a: &Vehicle2D, b: &Vehicle2D, params: &MicroParams) -> (f64, f64, bool) {
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    if dy.abs() < LATERAL_LIMIT * params.dy_len {
        (dx, params.d_y, true)
    } else {
        (dx, dy, false)
    }
}

fn leader_of(platoon: &[Vehicle2D], i: usize) -> Result<Option<&Vehicle2D>> {
    match platoon[i].leader {
        None => Ok(None),
        Some(j) if j < platoon.len() && j != i => Ok(Some(&platoon[j])),
        Some(j) => Err(Error::Unsupported(format!("vehicle {i} has invalid leader {j}"))),
    }
}

/// Accelerations `(u̇, v̇)` of the two-dimensional law.
pub fn micro_rhs_2d(platoon: &[Vehicle2D], params: &MicroParams) -> Result<Vec<(f64, f64)>> {
    let mut acc = vec![(0.0, 0.0); platoon.len()];
    for (i, a) in platoon.iter().enumerate() {
        let Some(b) = leader_of(platoon, i)? else {
            continue;
        };
        let leader = a.leader.unwrap_or(i);
        let (dx, dy, lateral_limit) = offsets(a, b, params);
        let d1 = dx - params.dl / dy.abs();
        if !(dx > 0.0 && d1 > 0.0) {
            return Err(Error::Collision {
                follower: i,
                leader,
                gap: d1,
            });
        }
        let du = b.u - a.u;
        let dv = b.v - a.v;
        let lateral = if lateral_limit {
            if dv != 0.0 {
                return Err(Error::Unsupported(format!(
                    "vehicles {i} and {leader} share a lane but differ in lateral velocity"
                )));
            }
            0.0
        } else {
            dv / (dy - params.dl * dy / (dx * dy.abs()))
        };
        let bracket = du / d1 + lateral;
        acc[i] = (
            relaxation(a.u, params.u_star, params.gamma) * bracket,
            relaxation(a.v, params.v_star, params.gamma) * bracket,
        );
    }
    Ok(acc)
}

/// Stored states of an integration run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<V> {
    pub times: Vec<f64>,
    pub frames: Vec<Vec<V>>,
}

/// Classical RK4 on a flat state vector.
fn rk4<F>(y: &[f64], h: f64, rhs: &F) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let axpy = |a: f64, k: &[f64]| -> Vec<f64> { y.iter().zip(k).map(|(yi, ki)| yi + a * ki).collect() };
    let k1 = rhs(y)?;
    let k2 = rhs(&axpy(0.5 * h, &k1))?;
    let k3 = rhs(&axpy(0.5 * h, &k2))?;
    let k4 = rhs(&axpy(h, &k3))?;
    Ok((0..y.len())
        .map(|k| y[k] + h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]))
        .collect())
}

/// Advances `y` by `dt`, splitting the interval into `2^k` substeps until
/// every substep passes `admissible`.
fn advance<F, C>(y: &[f64], dt: f64, rhs: &F, admissible: &C) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
    C: Fn(&[f64]) -> Result<()>,
{
    let mut last = String::new();
    for halvings in 0..=MAX_HALVINGS {
        let n_sub = 1u64 << halvings;
        let h = dt / n_sub as f64;
        let mut state = y.to_vec();
        let mut ok = true;
        for _ in 0..n_sub {
            match rk4(&state, h, rhs).and_then(|s| admissible(&s).map(|_| s)) {
                Ok(s) => state = s,
                Err(e) => {
                    last = e.to_string();
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return Ok(state);
        }
    }
    Err(Error::StepRejected {
        halvings: MAX_HALVINGS,
        reason: last,
    })
}

fn check_velocity(value: f64, star: f64, name: &'static str) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::NonFinite(format!("{name} = {value}")));
    }
    if !(0.0..=star).contains(&value) {
        return Err(Error::Domain {
            quantity: name,
            value,
            reason: "velocity bound violated",
        });
    }
    Ok(())
}

fn check_steps(dt: f64, store_every: usize) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Unsupported(format!("dt must be positive, got {dt}")));
    }
    if store_every == 0 {
        return Err(Error::Unsupported("store_every must be at least 1".into()));
    }
    Ok(())
}

fn unpack_1d(y: &[f64]) -> Vec<Vehicle1D> {
    y.chunks_exact(2).map(|c| Vehicle1D { x: c[0], u: c[1] }).collect()
}

/// RK4 integration of the one-dimensional law over `n_steps` steps of `dt`,
/// storing every `store_every`-th state plus the last one.
pub fn integrate_1d(
    platoon: &[Vehicle1D],
    params: &MicroParams,
    dt: f64,
    n_steps: usize,
    store_every: usize,
) -> Result<Trajectory<Vehicle1D>> {
    params.validate()?;
    check_steps(dt, store_every)?;
    let admissible = |y: &[f64]| -> Result<()> {
        let vehicles = unpack_1d(y);
        for (i, v) in vehicles.iter().enumerate() {
            check_velocity(v.u, params.u_star, "u").map_err(|e| e.at_cell(i))?;
            if let Some(next) = vehicles.get(i + 1) {
                let gap = next.x - v.x - params.d;
                if !(gap > 0.0) {
                    return Err(Error::Collision {
                        follower: i,
                        leader: i + 1,
                        gap,
                    });
                }
            }
        }
        Ok(())
    };
    let rhs = |y: &[f64]| -> Result<Vec<f64>> {
        let vehicles = unpack_1d(y);
        let acc = micro_rhs_1d(&vehicles, params)?;
        Ok(vehicles.iter().zip(acc).flat_map(|(v, a)| [v.u, a]).collect())
    };

    let mut y: Vec<f64> = platoon.iter().flat_map(|v| [v.x, v.u]).collect();
    admissible(&y)?;
    let mut traj = Trajectory {
        times: vec![0.0],
        frames: vec![platoon.to_vec()],
    };
    for step in 1..=n_steps {
        y = advance(&y, dt, &rhs, &admissible)?;
        if step % store_every == 0 || step == n_steps {
            traj.times.push(step as f64 * dt);
            traj.frames.push(unpack_1d(&y));
        }
    }
    Ok(traj)
}

fn unpack_2d(y: &[f64], template: &[Vehicle2D]) -> Vec<Vehicle2D> {
    y.chunks_exact(4)
        .zip(template)
        .map(|(c, t)| Vehicle2D {
            x: c[0],
            y: c[1],
            u: c[2],
            v: c[3],
            leader: t.leader,
        })
        .collect()
}

/// RK4 integration of the two-dimensional law; see [`integrate_1d`].
pub fn integrate_2d(
    platoon: &[Vehicle2D],
    params: &MicroParams,
    dt: f64,
    n_steps: usize,
    store_every: usize,
) -> Result<Trajectory<Vehicle2D>> {
    params.validate()?;
    check_steps(dt, store_every)?;
    let admissible = |y: &[f64]| -> Result<()> {
        let vehicles = unpack_2d(y, platoon);
        for (i, v) in vehicles.iter().enumerate() {
            check_velocity(v.u, params.u_star, "u").map_err(|e| e.at_cell(i))?;
            check_velocity(v.v, params.v_star, "v").map_err(|e| e.at_cell(i))?;
        }
        // the accelerations check every denominator
        micro_rhs_2d(&vehicles, params).map(|_| ())
    };
    let rhs = |y: &[f64]| -> Result<Vec<f64>> {
        let vehicles = unpack_2d(y, platoon);
        let acc = micro_rhs_2d(&vehicles, params)?;
        Ok(vehicles
            .iter()
            .zip(acc)
            .flat_map(|(v, (au, av))| [v.u, v.v, au, av])
            .collect())
    };

    let mut y: Vec<f64> = platoon.iter().flat_map(|v| [v.x, v.y, v.u, v.v]).collect();
    admissible(&y)?;
    let mut traj = Trajectory {
        times: vec![0.0],
        frames: vec![platoon.to_vec()],
    };
    for step in 1..=n_steps {
        y = advance(&y, dt, &rhs, &admissible)?;
        if step % store_every == 0 || step == n_steps {
            traj.times.push(step as f64 * dt);
            traj.frames.push(unpack_2d(&y, platoon));
        }
    }
    Ok(traj)
}

/// `τ_i = (x_{i+1} − x_i − d) / ΔX`.
pub fn specific_volume_1d(follower: &Vehicle1D, leader: &Vehicle1D, params: &MicroParams) -> f64 {
    (leader.x - follower.x - params.d) / params.dx_len
}

/// `τ_i = (Δx |Δy| − dl) / (ΔX ΔY)`, with the lateral limit applied.
pub fn specific_volume_2d(follower: &Vehicle2D, leader: &Vehicle2D, params: &MicroParams) -> f64 {
    let (dx, dy, _) = offsets(follower, leader, params);
    (dx * dy.abs() - params.dl) / (params.dx_len * params.dy_len)
}

/// `w_i = ũ(u_i) τ_i^(−γ)` for every vehicle with a leader.
pub fn invariants_1d(platoon: &[Vehicle1D], params: &MicroParams) -> Vec<f64> {
    platoon
        .windows(2)
        .map(|pair| {
            let tau = specific_volume_1d(&pair[0], &pair[1], params);
            pseudo_velocity_clamped(pair[0].u, params.u_star) * tau.powf(-params.gamma)
        })
        .collect()
}

/// `(w_i, σ_i)` for every vehicle with a leader, in platoon order.
pub fn invariants_2d(platoon: &[Vehicle2D], params: &MicroParams) -> Vec<(f64, f64)> {
    platoon
        .iter()
        .filter_map(|a| {
            let b = platoon.get(a.leader?)?;
            let p = specific_volume_2d(a, b, params).powf(-params.gamma);
            Some((
                pseudo_velocity_clamped(a.u, params.u_star) * p,
                pseudo_velocity_clamped(a.v, params.v_star) * p,
            ))
        })
        .collect()
}

/// Per-vehicle drift of a conserved quantity over a trajectory.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Drift {
    /// `max_t |q_i(t) − q_i(0)|`.
    pub absolute: Vec<f64>,
    /// The same divided by `|q_i(0)|` (zero when `q_i(0) = 0` and the
    /// quantity never moved).
    pub relative: Vec<f64>,
}

impl Drift {
    fn from_series(series: &[Vec<f64>]) -> Self {
        let Some(first) = series.first() else {
            return Drift::default();
        };
        let absolute: Vec<f64> = (0..first.len())
            .map(|i| series.iter().map(|s| (s[i] - first[i]).abs()).fold(0.0, f64::max))
            .collect();
        let relative = absolute
            .iter()
            .zip(first)
            .map(|(&a, &q0)| if a == 0.0 { 0.0 } else { a / q0.abs() })
            .collect();
        Drift { absolute, relative }
    }

    pub fn max_absolute(&self) -> f64 {
        self.absolute.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_relative(&self) -> f64 {
        self.relative.iter().copied().fold(0.0, f64::max)
    }
}

/// Drift of `w_i` over the stored frames.
pub fn w_drift(traj: &Trajectory<Vehicle1D>, params: &MicroParams) -> Drift {
    let series: Vec<Vec<f64>> = traj.frames.iter().map(|f| invariants_1d(f, params)).collect();
    Drift::from_series(&series)
}

/// Drifts of `w_i` and `σ_i` over the stored frames.
pub fn w_sigma_drift(traj: &Trajectory<Vehicle2D>, params: &MicroParams) -> (Drift, Drift) {
    let pairs: Vec<Vec<(f64, f64)>> = traj.frames.iter().map(|f| invariants_2d(f, params)).collect();
    let w: Vec<Vec<f64>> = pairs.iter().map(|f| f.iter().map(|p| p.0).collect()).collect();
    let sigma: Vec<Vec<f64>> = pairs.iter().map(|f| f.iter().map(|p| p.1).collect()).collect();
    (Drift::from_series(&w), Drift::from_series(&sigma))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params_1d() -> MicroParams {
        MicroParams::one_dimensional(2.0, 25.0, 5.0, 5.0).unwrap()
    }

    #[test]
    fn rhs_1d_examples() {
        let p = MicroParams::one_dimensional(1.0, 2.0, 1.0, 1.0).unwrap();
        let platoon = [Vehicle1D { x: 0.0, u: 1.0 }, Vehicle1D { x: 2.0, u: 1.5 }];
        let acc = micro_rhs_1d(&platoon, &p).unwrap();
        assert!((acc[0] - 0.25).abs() < 1e-15);
        assert_eq!(acc[1], 0.0);

        let at_max = [Vehicle1D { x: 0.0, u: 2.0 }, Vehicle1D { x: 3.0, u: 1.0 }];
        assert_eq!(micro_rhs_1d(&at_max, &p).unwrap()[0], 0.0);
        let same = [Vehicle1D { x: 0.0, u: 0.7 }, Vehicle1D { x: 3.0, u: 0.7 }];
        assert_eq!(micro_rhs_1d(&same, &p).unwrap()[0], 0.0);
    }

    #[test]
    fn collision_is_reported() {
        let p = params_1d();
        let platoon = [Vehicle1D { x: 0.0, u: 1.0 }, Vehicle1D { x: 4.0, u: 1.5 }];
        let err = micro_rhs_1d(&platoon, &p).unwrap_err();
        assert!(matches!(err, Error::Collision { follower: 0, leader: 1, .. }));
    }

    #[test]
    fn params_enforce_area_constraint() {
        assert!(MicroParams::new(2.0, 25.0, 5.0, 5.0, 5.0, 2.0, 5.0, 2.0).is_ok());
        assert!(MicroParams::new(2.0, 25.0, 5.0, 5.0, 5.0, 2.0, 5.0, 1.0).is_err());
        assert!(MicroParams::one_dimensional(2.0, 25.0, 0.0, 5.0).is_err());
    }

    #[test]
    fn lateral_limit_reduces_to_1d() {
        let p = params_1d();
        let line = [
            Vehicle1D { x: 0.0, u: 10.0 },
            Vehicle1D { x: 9.0, u: 12.0 },
            Vehicle1D { x: 17.5, u: 8.0 },
        ];
        let plane: Vec<Vehicle2D> = line
            .iter()
            .enumerate()
            .map(|(i, v)| Vehicle2D {
                x: v.x,
                y: 3.0,
                u: v.u,
                v: 0.0,
                leader: (i + 1 < line.len()).then_some(i + 1),
            })
            .collect();
        let a1 = micro_rhs_1d(&line, &p).unwrap();
        let a2 = micro_rhs_2d(&plane, &p).unwrap();
        for (x, (u, v)) in a1.iter().zip(&a2) {
            assert!((x - u).abs() <= 1e-12 * x.abs().max(1.0));
            assert_eq!(*v, 0.0);
        }
    }

    #[test]
    fn stationary_platoon_stays_put() {
        let p = params_1d();
        let platoon: Vec<Vehicle1D> = (0..5).map(|i| Vehicle1D { x: 7.0 * i as f64, u: 0.0 }).collect();
        let traj = integrate_1d(&platoon, &p, 0.1, 50, 10).unwrap();
        assert_eq!(traj.frames.last().unwrap(), &platoon);
        assert_eq!(w_drift(&traj, &p).max_absolute(), 0.0);
        assert_eq!(traj.times, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn follower_approaches_leader_speed() {
        let p = params_1d();
        let platoon = [Vehicle1D { x: 0.0, u: 5.0 }, Vehicle1D { x: 20.0, u: 15.0 }];
        let traj = integrate_1d(&platoon, &p, 0.01, 5000, 1).unwrap();
        let us: Vec<f64> = traj.frames.iter().map(|f| f[0].u).collect();
        assert!(us.windows(2).all(|w| w[1] >= w[0]));
        assert!(us.iter().all(|&u| u <= 15.0));
        assert!((us.last().unwrap() - 15.0).abs() < 0.5);
    }

    #[test]
    fn zero_lateral_velocity_keeps_sigma_zero() {
        let p = MicroParams::new(2.0, 25.0, 5.0, 5.0, 5.0, 2.0, 5.0, 2.0).unwrap();
        let platoon = vec![
            Vehicle2D { x: 0.0, y: 0.0, u: 10.0, v: 0.0, leader: Some(1) },
            Vehicle2D { x: 12.0, y: 3.0, u: 14.0, v: 0.0, leader: None },
        ];
        let traj = integrate_2d(&platoon, &p, 0.01, 200, 10).unwrap();
        let (_, sigma) = w_sigma_drift(&traj, &p);
        assert_eq!(sigma.max_absolute(), 0.0);
        assert!(traj.frames.iter().all(|f| f.iter().all(|v| v.v == 0.0)));
    }
}
