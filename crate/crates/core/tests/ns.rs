use std::f64::consts::PI;

use decaylab::ns::{duhamel_nl_bound, heat_on_grid_trace, random_dipoles, taylor_green, NseSolver, Trajectory};

const BOX: f64 = 4.0 * PI;

fn run(n: usize, dt: f64, times: &[f64]) -> Trajectory {
    let s0 = random_dipoles(n, BOX, 3, 0.8, 1.0, 5).unwrap();
    let mut solver = NseSolver::for_state(&s0).unwrap();
    solver.run(&s0, dt, times).unwrap()
}

fn samples() -> Vec<f64> {
    (1..=8).map(|i| 0.25 * i as f64).collect()
}

#[test]
fn energy_is_stable_under_refinement() {
    let coarse = run(64, 0.02, &samples());
    let fine = run(128, 0.01, &samples());
    for (a, b) in coarse.snapshots.iter().zip(&fine.snapshots) {
        let rel = (a.energy() - b.energy()).abs() / b.energy();
        assert!(rel < 5e-3, "t = {}: rel diff {rel}", a.time());
    }
}

#[test]
fn energy_never_increases_between_steps() {
    let traj = run(64, 0.02, &samples());
    let mut prev = traj.initial.energy();
    for d in &traj.steps {
        assert!(d.energy <= prev * (1.0 + 1e-12), "t = {}: {} > {prev}", d.t, d.energy);
        prev = d.energy;
    }
    assert!(traj.max_relative_nl_power() < 1e-10);
    assert!(traj.energy_inequality_excess() < 1e-4);
}

#[test]
fn nonlinear_bound_is_resolution_independent() {
    let coarse = run(64, 0.02, &samples());
    let fine = run(128, 0.01, &samples());
    let a = duhamel_nl_bound(&coarse.snapshots, 1.0, 1.0).unwrap();
    let b = duhamel_nl_bound(&fine.snapshots, 1.0, 1.0).unwrap();
    assert!(a.ok && b.ok);
    let ratio = a.c_measured.max(b.c_measured) / a.c_measured.min(b.c_measured);
    assert!(ratio <= 1.2, "{} vs {}", a.c_measured, b.c_measured);
}

#[test]
fn taylor_green_follows_heat_flow() {
    // Steady Euler flow, so the NSE solution is the heat solution exactly.
    let s0 = taylor_green(64, 1.0).unwrap();
    let mut solver = NseSolver::for_state(&s0).unwrap();
    let times = [0.25, 0.5, 0.75, 1.0];
    let traj = solver.run(&s0, 0.01, &times).unwrap();
    let heat = heat_on_grid_trace(&s0, &times).unwrap();
    for (s, e) in traj.snapshots.iter().zip(heat.values()) {
        assert!((s.energy() - e).abs() <= 1e-10 * e);
        assert!((e - 2.0 * PI * PI * (-4.0 * s.time()).exp()).abs() <= 1e-10 * e);
    }
}

