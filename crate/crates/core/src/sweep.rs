//! One-dimensional finite-volume sweeps shared by the 1D solver and the
//! directional stages of the 2D solver.
//!
//! A [`LineSystem`] describes a hyperbolic system along one line of cells;
//! [`sweep_line`] advances such a line by one step of the Godunov, HLL, or
//! two-step Godunov–Glimm scheme.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Model, PrimitiveState};
use crate::riemann::RiemannFan;

/// Relative tolerance used when deciding whether two conserved states are
/// the same state.
pub const STATE_MATCH_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// Zero-gradient ghost cells.
    #[default]
    Outflow,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Exact-Riemann Godunov fluxes.
    Godunov,
    /// HLL fluxes.
    Hll,
    /// Glimm transport of contacts followed by a Godunov flux update.
    Hybrid,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Godunov => "godunov",
            Scheme::Hll => "hll",
            Scheme::Hybrid => "hybrid",
        }
    }

    pub fn uses_sampler(self) -> bool {
        self == Scheme::Hybrid
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "godunov" => Ok(Scheme::Godunov),
            "hll" => Ok(Scheme::Hll),
            "hybrid" => Ok(Scheme::Hybrid),
            other => Err(format!("unknown scheme '{other}'")),
        }
    }
}

/// A hyperbolic system with `N` conserved components along one direction.
pub trait LineSystem<const N: usize>: Sync {
    /// Decoded cell: conserved vector plus whatever primitives the fluxes need.
    type Cell: Copy + Send + Sync;

    fn decode(&self, q: &[f64; N]) -> Result<Self::Cell>;

    fn conserved(&self, cell: &Self::Cell) -> [f64; N];

    /// Contact speed of the cell (the flow velocity along the line).
    fn normal_velocity(&self, cell: &Self::Cell) -> f64;

    /// Largest characteristic speed magnitude.
    fn max_speed(&self, cell: &Self::Cell) -> f64;

    fn physical_flux(&self, cell: &Self::Cell) -> [f64; N];

    /// `F(U_r(0⁻; L, R))` from the exact Riemann solution.
    fn godunov_flux(&self, left: &Self::Cell, right: &Self::Cell) -> Result<[f64; N]>;

    fn hll_flux(&self, left: &Self::Cell, right: &Self::Cell) -> [f64; N];

    /// Conserved form of the state between the nonlinear wave and the contact.
    fn intermediate(&self, left: &Self::Cell, right: &Self::Cell) -> Result<[f64; N]>;
}

pub fn states_match<const N: usize>(a: &[f64; N], b: &[f64; N]) -> bool {
    a.iter().zip(b).all(|(x, y)| {
        let scale = x.abs().max(y.abs());
        (x - y).abs() <= STATE_MATCH_TOLERANCE * scale
    })
}

/// Standard three-case HLL flux from wave-speed bounds `s_left ≤ s_right`.
pub fn hll_combine<const N: usize>(
    q_left: &[f64; N],
    q_right: &[f64; N],
    f_left: &[f64; N],
    f_right: &[f64; N],
    s_left: f64,
    s_right: f64,
) -> [f64; N] {
    if s_left >= 0.0 || q_left == q_right {
        *f_left
    } else if s_right <= 0.0 {
        *f_right
    } else {
        let inv = 1.0 / (s_right - s_left);
        std::array::from_fn(|k| {
            inv * (s_right * f_left[k] - s_left * f_right[k]
                + s_left * s_right * (q_right[k] - q_left[k]))
        })
    }
}

fn decode_line<S, const N: usize>(system: &S, line: &[[f64; N]]) -> Result<Vec<S::Cell>>
where
    S: LineSystem<N>,
{
    line.iter()
        .enumerate()
        .map(|(i, q)| system.decode(q).map_err(|e| e.at_cell(i)))
        .collect()
}

fn ghosts<T: Copy>(cells: &[T], boundary: Boundary) -> (T, T) {
    let n = cells.len();
    match boundary {
        Boundary::Outflow => (cells[0], cells[n - 1]),
        Boundary::Periodic => (cells[n - 1], cells[0]),
    }
}

/// Largest characteristic speed along the line.
pub fn line_max_speed<S, const N: usize>(system: &S, line: &[[f64; N]]) -> Result<f64>
where
    S: LineSystem<N>,
{
    let mut speed: f64 = 0.0;
    for (i, q) in line.iter().enumerate() {
        let cell = system.decode(q).map_err(|e| e.at_cell(i))?;
        speed = speed.max(system.max_speed(&cell));
    }
    Ok(speed)
}

/// Glimm sampling of the contacts entering each cell from the left:
/// cell `j` takes `U*(U_{j-1}, U_j)` when `sample < ratio · u_j` and keeps
/// `U_j` otherwise. One sample is shared by the whole line.
pub fn glimm_half_step<S, const N: usize>(
    system: &S,
    line: &[[f64; N]],
    boundary: Boundary,
    ratio: f64,
    sample: f64,
) -> Result<Vec<[f64; N]>>
where
    S: LineSystem<N>,
{
    let cells = decode_line(system, line)?;
    glimm_from_cells(system, &cells, boundary, ratio, sample)
}

fn glimm_from_cells<S, const N: usize>(
    system: &S,
    cells: &[S::Cell],
    boundary: Boundary,
    ratio: f64,
    sample: f64,
) -> Result<Vec<[f64; N]>>
where
    S: LineSystem<N>,
{
    let (ghost_left, _) = ghosts(cells, boundary);
    cells
        .iter()
        .enumerate()
        .map(|(j, cell)| {
            let u = system.normal_velocity(cell);
            if u < 0.0 {
                return Err(Error::Unsupported(format!(
                    "contact transport needs non-negative velocity, found {u}"
                ))
                .at_cell(j));
            }
            if sample < ratio * u {
                let left = if j == 0 { &ghost_left } else { &cells[j - 1] };
                system.intermediate(left, cell).map_err(|e| e.at_cell(j))
            } else {
                Ok(system.conserved(cell))
            }
        })
        .collect()
}

/// Advances `line` in place by one step with `ratio = Δt / Δx`.
///
/// `sample` is the van der Corput draw for this step; it is ignored by the
/// purely flux-based schemes.
pub fn sweep_line<S, const N: usize>(
    system: &S,
    line: &mut [[f64; N]],
    boundary: Boundary,
    ratio: f64,
    scheme: Scheme,
    sample: f64,
) -> Result<()>
where
    S: LineSystem<N>,
{
    if line.is_empty() {
        return Ok(());
    }
    let cells = decode_line(system, line)?;
    match scheme {
        Scheme::Godunov | Scheme::Hll => flux_update(system, line, &cells, boundary, ratio, scheme),
        Scheme::Hybrid => hybrid_update(system, line, &cells, boundary, ratio, sample),
    }
}

fn flux_update<S, const N: usize>(
    system: &S,
    line: &mut [[f64; N]],
    cells: &[S::Cell],
    boundary: Boundary,
    ratio: f64,
    scheme: Scheme,
) -> Result<()>
where
    S: LineSystem<N>,
{
    let n = cells.len();
    let (ghost_left, ghost_right) = ghosts(cells, boundary);
    let cell_at = |i: isize| -> &S::Cell {
        if i < 0 {
            &ghost_left
        } else if i as usize >= n {
            &ghost_right
        } else {
            &cells[i as usize]
        }
    };
    // interface k sits between cells k-1 and k
    let fluxes = (0..=n)
        .map(|k| {
            let (l, r) = (cell_at(k as isize - 1), cell_at(k as isize));
            match scheme {
                Scheme::Hll => Ok(system.hll_flux(l, r)),
                _ => system.godunov_flux(l, r).map_err(|e| e.at_cell(k.min(n - 1))),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    for (j, q) in line.iter_mut().enumerate() {
        for c in 0..N {
            q[c] -= ratio * (fluxes[j + 1][c] - fluxes[j][c]);
        }
    }
    Ok(())
}

fn hybrid_update<S, const N: usize>(
    system: &S,
    line: &mut [[f64; N]],
    cells: &[S::Cell],
    boundary: Boundary,
    ratio: f64,
    sample: f64,
) -> Result<()>
where
    S: LineSystem<N>,
{
    let n = cells.len();
    let half = glimm_from_cells(system, cells, boundary, ratio, sample)?;
    let half_cells = decode_line(system, &half)?;
    let (ghost_left, ghost_right) = ghosts(cells, boundary);

    for j in 0..n {
        let here = &half_cells[j];
        let old_left = if j == 0 { &ghost_left } else { &cells[j - 1] };
        let old_right = if j + 1 == n { &ghost_right } else { &cells[j + 1] };

        // only left-going waves enter through the right interface
        let flux_right = system.godunov_flux(here, old_right).map_err(|e| e.at_cell(j))?;

        let star = system.intermediate(old_left, here).map_err(|e| e.at_cell(j))?;
        let flux_left = if states_match(&star, &half[j]) {
            system.godunov_flux(old_left, here).map_err(|e| e.at_cell(j))?
        } else {
            system.physical_flux(here)
        };

        for c in 0..N {
            line[j][c] = half[j][c] - ratio * (flux_right[c] - flux_left[c]);
        }
    }
    Ok(())
}

/// Decoded cell of a two-equation closure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelCell {
    pub q: [f64; 2],
    pub prim: PrimitiveState,
}

impl LineSystem<2> for Model {
    type Cell = ModelCell;

    fn decode(&self, q: &[f64; 2]) -> Result<ModelCell> {
        let prim = self.to_primitive(crate::model::ConservedState::from_array(*q))?;
        Ok(ModelCell { q: *q, prim })
    }

    fn conserved(&self, cell: &ModelCell) -> [f64; 2] {
        cell.q
    }

    fn normal_velocity(&self, cell: &ModelCell) -> f64 {
        cell.prim.u
    }

    fn max_speed(&self, cell: &ModelCell) -> f64 {
        if self.is_vacuum(cell.prim.rho) {
            return 0.0;
        }
        let l2 = self.lambda2(cell.prim.rho, cell.prim.u);
        cell.prim.u.abs().max(l2.abs())
    }

    fn physical_flux(&self, cell: &ModelCell) -> [f64; 2] {
        if self.is_vacuum(cell.prim.rho) {
            return [0.0, 0.0];
        }
        let u = cell.prim.u;
        [cell.q[0] * u, cell.q[1] * u]
    }

    fn godunov_flux(&self, left: &ModelCell, right: &ModelCell) -> Result<[f64; 2]> {
        let fan = RiemannFan::solve(self, left.prim, right.prim)?;
        let (state, right_of_contact) = fan.sample_with_side(0.0);
        if right_of_contact {
            Ok(self.physical_flux(right))
        } else if state == left.prim {
            Ok(self.physical_flux(left))
        } else {
            self.flux(state)
        }
    }

    fn hll_flux(&self, left: &ModelCell, right: &ModelCell) -> [f64; 2] {
        let bounds = |c: &ModelCell| {
            if self.is_vacuum(c.prim.rho) {
                (c.prim.u, c.prim.u)
            } else {
                (self.lambda2(c.prim.rho, c.prim.u), c.prim.u)
            }
        };
        let (lo_l, hi_l) = bounds(left);
        let (lo_r, hi_r) = bounds(right);
        hll_combine(
            &left.q,
            &right.q,
            &self.physical_flux(left),
            &self.physical_flux(right),
            lo_l.min(lo_r),
            hi_l.max(hi_r),
        )
    }

    fn intermediate(&self, left: &ModelCell, right: &ModelCell) -> Result<[f64; 2]> {
        let fan = RiemannFan::solve(self, left.prim, right.prim)?;
        if fan.middle == right.prim {
            return Ok(right.q);
        }
        Ok(self.to_conserved(fan.middle)?.to_array())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModelKind, ModelParams};

    fn model() -> Model {
        Model::new(ModelKind::Rarz, ModelParams::new(1.0, 25.0, 25.0, 2.0).unwrap())
    }

    fn encode(m: &Model, rho: f64, u: f64) -> [f64; 2] {
        m.to_conserved(PrimitiveState::new(rho, u)).unwrap().to_array()
    }

    #[test]
    fn hll_is_consistent_and_upwinds() {
        let m = model();
        let a = m.decode(&encode(&m, 0.3, 20.0)).unwrap();
        assert_eq!(m.hll_flux(&a, &a), m.physical_flux(&a));

        let (q, r) = ([1.0, 2.0], [1.5, 2.5]);
        let f = [3.0, 4.0];
        let g = [5.0, 6.0];
        assert_eq!(hll_combine(&q, &r, &f, &g, 0.5, 1.0), f);
        assert_eq!(hll_combine(&q, &r, &f, &g, -1.0, -0.5), g);
    }

    #[test]
    fn uniform_line_is_a_fixed_point() {
        let m = model();
        for scheme in [Scheme::Godunov, Scheme::Hll, Scheme::Hybrid] {
            let mut line = vec![encode(&m, 0.45, 11.0); 20];
            let before = line.clone();
            sweep_line(&m, &mut line, Boundary::Outflow, 0.01, scheme, 0.3).unwrap();
            assert_eq!(line, before, "{scheme}");
        }
    }

    #[test]
    fn glimm_keeps_cells_when_sample_is_large() {
        let m = model();
        let mut line = vec![encode(&m, 0.8, 15.0); 5];
        line.extend(vec![encode(&m, 0.7, 15.0); 5]);
        let half = glimm_half_step(&m, &line, Boundary::Outflow, 0.01, 0.99).unwrap();
        assert_eq!(half, line);
        // small sample: the contact moves one cell to the right
        let half = glimm_half_step(&m, &line, Boundary::Outflow, 0.01, 0.1).unwrap();
        assert!(states_match(&half[5], &line[4]));
        assert_eq!(half[6], line[6]);
    }

    #[test]
    fn negative_velocity_is_rejected_by_glimm() {
        let m = Model::new(ModelKind::Mar, ModelParams::new(1.0, 25.0, 25.0, 2.0).unwrap());
        let line = vec![encode(&m, 0.9, -1.0); 3];
        let err = glimm_half_step(&m, &line, Boundary::Outflow, 0.01, 0.5).unwrap_err();
        assert!(matches!(err, Error::Cell { cell: 0, .. }));
    }

    #[test]
    fn periodic_godunov_conserves_mass() {
        let m = model();
        let mut line: Vec<[f64; 2]> = (0..40)
            .map(|i| encode(&m, 0.3 + 0.4 * ((i as f64) * 0.3).sin().abs(), 5.0 + (i % 7) as f64))
            .collect();
        let mass0: f64 = line.iter().map(|q| q[0]).sum();
        for _ in 0..20 {
            let s = line_max_speed(&m, &line).unwrap();
            sweep_line(&m, &mut line, Boundary::Periodic, 0.45 / s, Scheme::Godunov, 0.0).unwrap();
        }
        let mass1: f64 = line.iter().map(|q| q[0]).sum();
        assert!((mass1 - mass0).abs() < 1e-13 * mass0);
    }
}
