use rarz::model::{Model, ModelParams, PrimitiveState};
use rarz::scheme1d::{step_with, Grid1D, Piecewise1D};
use rarz::solver2d::*;
use rarz::{Boundary, Scheme, VdcSampler};

fn params() -> ModelParams {
    ModelParams::default()
}

fn profile(x: f64) -> State2D {
    if x < 0.7 {
        State2D::new(0.3, 0.7, 0.0)
    } else if x < 1.3 {
        State2D::new(0.6, 0.4, 0.0)
    } else {
        State2D::new(0.45, 0.8, 0.0)
    }
}

#[test]
fn y_uniform_data_reduces_to_1d() {
    let p = params();
    let model = Model::rarz(p);
    let nx = 80;
    for scheme in [Scheme::Godunov, Scheme::Hll, Scheme::Hybrid] {
        let mut grid = Grid2D::from_fn(&p, (0.0, 2.0), (0.0, 1.0), nx, 5, Default::default(), |x, _| {
            profile(x)
        })
        .unwrap();
        let initial = Piecewise1D {
            states: [0.1, 1.0, 1.5]
                .iter()
                .map(|&x| {
                    let w = profile(x);
                    PrimitiveState::new(w.rho, w.u)
                })
                .collect(),
            breaks: vec![0.7, 1.3],
        };
        let mut line = Grid1D::from_piecewise(&model, 0.0, 2.0, nx, &initial, Boundary::Outflow).unwrap();

        let mut sampler = VdcSampler::new();
        let mut samples_1d = VdcSampler::new();
        for _ in 0..40 {
            let dt = cfl_dt_2d(&grid, 0.45, 10.0, &p).unwrap();
            strang_step(&mut grid, dt, scheme, &mut sampler, &p).unwrap();
            // the x sweeps draw the first and third samples of each step
            let (a, _, c) = if scheme.uses_sampler() {
                (samples_1d.next_sample(), samples_1d.next_sample(), samples_1d.next_sample())
            } else {
                (0.0, 0.0, 0.0)
            };
            step_with(&mut line, 0.5 * dt, &model, scheme, a).unwrap();
            step_with(&mut line, 0.5 * dt, &model, scheme, c).unwrap();
        }
        let mut worst: f64 = 0.0;
        for j in 0..grid.ny {
            for i in 0..nx {
                let q = grid.cells[grid.index(i, j)];
                let r = line.cells[i];
                worst = worst.max((q[0] - r.rho).abs()).max((q[1] - r.y).abs()).max(q[2].abs());
            }
        }
        assert!(worst < 1e-10, "{scheme}: {worst:e}");
    }
}

#[test]
fn periodic_mass_is_conserved() {
    let p = params();
    for scheme in [Scheme::Godunov, Scheme::Hll] {
        let periodic = (Boundary::Periodic, Boundary::Periodic);
        let mut grid = Grid2D::from_fn(&p, (0.0, 1.0), (0.0, 1.0), 24, 20, periodic, |x, y| {
            let s = (6.0 * x).sin() * (4.0 * y).cos();
            State2D::new(0.4 + 0.2 * s, 0.5 + 0.3 * s, 0.5 - 0.2 * s)
        })
        .unwrap();
        let mut sampler = VdcSampler::new();
        for _ in 0..20 {
            let before = grid.mass();
            let dt = cfl_dt_2d(&grid, 0.45, 10.0, &p).unwrap();
            strang_step(&mut grid, dt, scheme, &mut sampler, &p).unwrap();
            let after = grid.mass();
            assert!((after - before).abs() <= 1e-12 * before, "{scheme}: {before} -> {after}");
        }
    }
}

#[test]
fn transposed_data_gives_transposed_field() {
    let p = params();
    let quads = Quadrants::new([
        State2D::new(0.2, 0.8, 0.3),
        State2D::new(0.3, 0.8, 0.5),
        State2D::new(0.4, 0.5, 0.5),
        State2D::new(0.5, 0.5, 0.3),
    ]);
    for scheme in [Scheme::Godunov, Scheme::Hll, Scheme::Hybrid] {
        let cfg = Solver2DConfig::new(scheme, 0.1, p);
        let grid = Grid2D::from_quadrants(&p, (0.0, 2.0), (0.0, 2.0), 40, 40, &quads).unwrap();
        let swapped = grid.transposed();

        let mut a = Simulation2D::new(grid, cfg).unwrap();
        a.advance_to(0.1, |_| Ok(())).unwrap();
        let mut b = Simulation2D::new(
            swapped,
            Solver2DConfig {
                order: SplitOrder::Yxy,
                ..cfg
            },
        )
        .unwrap();
        b.advance_to(0.1, |_| Ok(())).unwrap();

        let a_t = a.grid.transposed();
        let worst = a_t
            .cells
            .iter()
            .zip(&b.grid.cells)
            .flat_map(|(x, y)| (0..3).map(move |k| (x[k] - y[k]).abs()))
            .fold(0.0, f64::max);
        assert!(worst < 1e-10, "{scheme}: {worst:e}");

    }
}

#[test]
fn quadrant_tests_stay_in_bounds() {
    let p = params();
    let tests = [
        ([(0.4275, 0.5, 0.2), (0.3199, 0.8, 0.2), (0.2152, 0.8, 0.4), (0.3033, 0.5, 0.4)], 1.0),
        ([(0.2, 0.8, 0.3), (0.3, 0.8, 0.5), (0.4, 0.5, 0.5), (0.5, 0.5, 0.3)], 0.4),
        ([(0.5287, 0.5, 0.5), (0.7, 0.2, 0.5), (0.4, 0.5, 0.5), (0.7, 0.5, 0.2)], 0.25),
    ];
    for (states, t_end) in tests {
        let quads = Quadrants::new(states.map(|(r, u, v)| State2D::new(r, u, v)));
        for scheme in [Scheme::Godunov, Scheme::Hll, Scheme::Hybrid] {
            let grid = Grid2D::from_quadrants(&p, (0.0, 2.0), (0.0, 2.0), 40, 40, &quads).unwrap();
            let mut sim = Simulation2D::new(grid, Solver2DConfig::new(scheme, t_end, p)).unwrap();
            sim.advance_to(t_end, |g| check_bounds_2d(g, &p)).unwrap();
            assert_eq!(sim.grid.time, t_end);
        }
    }
}

#[test]
fn snapshots_follow_requested_times() {
    let p = params();
    let quads = Quadrants::new([State2D::new(0.3, 0.5, 0.5); 4]);
    let cfg = Solver2DConfig::new(Scheme::Hll, 0.2, p);
    let snaps = run_2d(&quads, &cfg, (0.0, 2.0), (0.0, 2.0), (10, 8), &[0.05, 0.5, 0.1]).unwrap();
    let times: Vec<f64> = snaps.iter().map(|s| s.time).collect();
    assert_eq!(times, vec![0.05, 0.1, 0.2]);
    assert_eq!(snaps[0].rho.len(), 80);
    assert!(snaps.iter().all(|s| s.rho.iter().all(|&r| (r - 0.3).abs() < 1e-14)));
}
