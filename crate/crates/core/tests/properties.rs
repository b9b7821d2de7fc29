use proptest::prelude::*;

use rarz::micro::{micro_rhs_2d, MicroParams, Vehicle2D};
use rarz::model::{self, ConservedState, Model, ModelKind, ModelParams, PrimitiveState};
use rarz::riemann::{self, RiemannFan, WavePattern};
use rarz::solver2d::{self, Axis, State2D};
use rarz::sweep::{hll_combine, LineSystem};
use rarz::van_der_corput;

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Density on the level set `w` at velocity `u`, by bisection on `ln w`.
fn bisect_density(m: &Model, u: f64, w: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, m.params.rho_star);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if m.advected(mid, u).ln() < w.ln() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn params() -> impl Strategy<Value = ModelParams> {
    (0.5f64..2.0, 5.0f64..40.0, 0.5f64..3.0)
        .prop_map(|(rs, us, g)| ModelParams::new(rs, us, us, g).unwrap())
}

/// Admissible state away from the vacuum and jam limits.
fn state(p: ModelParams) -> impl Strategy<Value = PrimitiveState> {
    (0.02f64..0.98, 0.01f64..0.99)
        .prop_map(move |(r, u)| PrimitiveState::new(r * p.rho_star, u * p.u_star))
}

fn state_2d() -> impl Strategy<Value = State2D> {
    (0.05f64..0.95, 0.02f64..0.98, 0.02f64..0.98).prop_map(|(r, u, v)| State2D::new(r, u, v))
}

proptest! {
    #[test]
    fn pressure_round_trip((p, w) in params().prop_flat_map(|p| (Just(p), state(p)))) {
        let pr = model::pressure(w.rho, &p).unwrap();
        let back = model::pressure_inverse(pr, &p).unwrap();
        prop_assert!(rel(back, w.rho) < 1e-10);
        let ut = model::pseudo_velocity(w.u, &p).unwrap();
        prop_assert!(rel(model::pseudo_velocity_inverse(ut, &p).unwrap(), w.u) < 1e-10);
    }

    #[test]
    fn conserved_round_trip((p, w) in params().prop_flat_map(|p| (Just(p), state(p)))) {
        let q = model::to_conserved(w, &p).unwrap();
        let back = model::to_primitive(q, &p).unwrap();
        prop_assert!(rel(back.rho, w.rho) < 1e-10);
        prop_assert!(rel(back.u, w.u) < 1e-10);
    }

    #[test]
    fn eigenvalues_are_ordered((p, w) in params().prop_flat_map(|p| (Just(p), state(p)))) {
        let (l1, l2) = model::eigenvalues(w, &p).unwrap();
        prop_assert_eq!(l1, w.u);
        prop_assert!(l2 <= l1);
    }

    #[test]
    fn intermediate_state_lies_on_left_level_set(
        (p, l, r) in params().prop_flat_map(|p| (Just(p), state(p), state(p)))
    ) {
        let m = Model::rarz(p);
        let fan = RiemannFan::solve(&m, l, r).unwrap();
        prop_assert_eq!(fan.pattern, riemann::classify(l, r, &p));
        if fan.pattern != WavePattern::VacuumFan {
            prop_assert_eq!(fan.middle.u, r.u);
            let root = bisect_density(&m, r.u, m.advected(l.rho, l.u));
            prop_assert!(rel(root, fan.middle.rho) < 1e-12, "{} vs {}", root, fan.middle.rho);
        }
        if let Some(sigma) = fan.shock_speed {
            // both jump conditions
            let ql = m.to_conserved(l).unwrap();
            let qm = m.to_conserved(fan.middle).unwrap();
            let fl = m.flux(l).unwrap();
            let fm = m.flux(fan.middle).unwrap();
            let r1 = fm[0] - fl[0] - sigma * (qm.rho - ql.rho);
            let r2 = fm[1] - fl[1] - sigma * (qm.y - ql.y);
            // encoding a state near ρ* loses digits in proportion to ρ p'/p
            let kappa = p.gamma * p.rho_star / (p.rho_star - fan.middle.rho);
            let tol = 1e-10f64.max(8.0 * kappa * f64::EPSILON);
            let scale = |a: f64, b: f64| a.abs().max(b.abs()).max(1.0);
            prop_assert!(r1.abs() < tol * scale(fl[0], fm[0]));
            prop_assert!(r2.abs() < tol * scale(fl[1], fm[1]));
        }
    }

    #[test]
    fn sampled_fan_stays_admissible(
        (p, l, r) in params().prop_flat_map(|p| (Just(p), state(p), state(p))),
        xi in -200.0f64..200.0,
    ) {
        let fan = RiemannFan::solve(&Model::rarz(p), l, r).unwrap();
        let w = fan.sample(xi);
        prop_assert!(w.rho >= 0.0 && w.rho < p.rho_star);
        prop_assert!(w.u >= 0.0 && w.u <= p.u_star);
    }

    #[test]
    fn comparison_closures_keep_w_across_middle(
        l in (0.05f64..0.6, 5.0f64..20.0),
        r in (0.05f64..0.6, 5.0f64..20.0),
    ) {
        let p = ModelParams::new(1.0, 25.0, 25.0, 2.0).unwrap();
        for kind in [ModelKind::Arz, ModelKind::Mar] {
            let m = Model::new(kind, p);
            let (l, r) = (PrimitiveState::new(l.0, l.1), PrimitiveState::new(r.0, r.1));
            let fan = RiemannFan::solve(&m, l, r).unwrap();
            if fan.pattern != WavePattern::VacuumFan {
                prop_assert!(rel(m.advected(fan.middle.rho, fan.middle.u), m.advected(l.rho, l.u)) < 1e-10);
            }
        }
    }

    #[test]
    fn van_der_corput_stays_in_unit_interval(n in 1u64..(1u64 << 53)) {
        let a = van_der_corput(n);
        prop_assert!(a > 0.0 && a < 1.0);
    }

    #[test]
    fn hll_is_consistent((p, w) in params().prop_flat_map(|p| (Just(p), state(p)))) {
        let m = Model::rarz(p);
        let q = m.to_conserved(w).unwrap().to_array();
        let cell = m.decode(&q).unwrap();
        prop_assert_eq!(m.hll_flux(&cell, &cell), m.physical_flux(&cell));
    }

    #[test]
    fn split_intermediate_conditions(l in state_2d(), r in state_2d()) {
        let p = ModelParams::default();
        let m = solver2d::split_intermediate_x(l, r, &p).unwrap();
        prop_assert_eq!(m.u, r.u);
        prop_assert!(rel(solver2d::longitudinal_invariant(m, &p), solver2d::longitudinal_invariant(l, &p)) < 1e-12);
        prop_assert!(rel(solver2d::transverse_invariant(m, &p), solver2d::transverse_invariant(l, &p)) < 1e-12);
    }

    #[test]
    fn split_eigenvalues_ignore_transverse(w in state_2d(), v in 0.0f64..1.0) {
        let p = ModelParams::default();
        let a = solver2d::split_eigenvalues_x(w, &p).unwrap();
        let b = solver2d::split_eigenvalues_x(State2D::new(w.rho, w.u, v), &p).unwrap();
        prop_assert_eq!(a, b);
        prop_assert!(a.2 <= a.0);
    }

    #[test]
    fn hll_intermediate_density_is_non_negative(l in state_2d(), r in state_2d(), y_axis in any::<bool>()) {
        let p = ModelParams::default();
        let axis = if y_axis { Axis::Y } else { Axis::X };
        let ql = solver2d::to_conserved_2d(l, &p).unwrap();
        let qr = solver2d::to_conserved_2d(r, &p).unwrap();
        let fl = solver2d::physical_flux(l, axis, &p).unwrap();
        let fr = solver2d::physical_flux(r, axis, &p).unwrap();
        let speeds = |w: State2D| {
            let (a, _, c) = match axis {
                Axis::X => solver2d::split_eigenvalues_x(w, &p).unwrap(),
                Axis::Y => solver2d::split_eigenvalues_y(w, &p).unwrap(),
            };
            (c, a)
        };
        let (sl, sr) = {
            let (a, b) = speeds(l);
            let (c, d) = speeds(r);
            (a.min(c), b.max(d))
        };
        let f = solver2d::hll_flux(l, r, axis, &p).unwrap();
        let expected = hll_combine(&ql, &qr, &fl, &fr, sl, sr);
        let scale = fl.iter().chain(&fr).fold(1e-12f64, |m, x| m.max(x.abs()));
        for k in 0..3 {
            prop_assert!((f[k] - expected[k]).abs() <= 1e-14 * scale);
        }
        if sl < 0.0 && sr > 0.0 {
            let rho = (sr * qr[0] - sl * ql[0] - fr[0] + fl[0]) / (sr - sl);
            prop_assert!(rho >= 0.0);
        }
    }

    #[test]
    fn micro_components_share_bracket(
        u in 1.0f64..24.0, v in 0.2f64..4.8,
        du in -3.0f64..3.0, dv in -1.0f64..1.0,
        dx in 7.0f64..12.0, dy in 2.5f64..4.0,
    ) {
        let p = MicroParams::new(2.0, 25.0, 5.0, 5.0, 5.0, 2.0, 5.0, 2.0).unwrap();
        let platoon = [
            Vehicle2D { x: 0.0, y: 0.0, u, v, leader: Some(1) },
            Vehicle2D { x: dx, y: dy, u: u + du, v: v + dv, leader: None },
        ];
        let acc = micro_rhs_2d(&platoon, &p).unwrap();
        let (au, av) = acc[0];
        let fu = u * (25.0 - u) / 25.0;
        let fv = v * (5.0 - v) / 5.0;
        prop_assert!((au * fv - av * fu).abs() <= 1e-12 * (au * fv).abs().max(1e-300));
    }
}

#[test]
fn conserved_state_arrays_round_trip() {
    let q = ConservedState::new(0.3, 12.0);
    assert_eq!(ConservedState::from_array(q.to_array()), q);
}

