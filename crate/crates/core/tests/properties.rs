use std::f64::consts::PI;

use decaylab::decay_character::{decay_indicator, power_indicator, LimitVerdict, ProbeSpec};
use decaylab::heat::{decay_sandwich_check, exp_decay_classify, high_pass_apply, DecayKind, ExpDecaySpec, FilterSpec};
use decaylab::interval::{eigenvalues, poincare_interval_check, IntervalFunction};
use decaylab::spectral::{
    dft_forward, heat_energy, low_ball_mass, radial_energy, GridField, QuadratureSpec, RadialSpectralProfile,
};
use decaylab::whole_space::{fpi_check, modified_poincare_check, optimality_sweep};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q() -> QuadratureSpec {
    QuadratureSpec::default()
}

/// `|û₀|(r) = a r^s e^{-b r²}`.
fn bump(n: usize, a: f64, s: f64, b: f64) -> RadialSpectralProfile {
    RadialSpectralProfile::new(n, move |r: f64| a * r.powf(s) * (-b * r * r).exp()).unwrap()
}

fn verdict_rank(v: LimitVerdict) -> u8 {
    match v {
        LimitVerdict::Zero => 0,
        LimitVerdict::Finite(_) => 1,
        LimitVerdict::Infinite => 2,
        LimitVerdict::Inconclusive => 3,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn heat_energy_is_nonincreasing(n in 1usize..4, s in 0.0..2.0f64, b in 0.2..3.0f64, t0 in 0.0..50.0f64, dt in 0.01..50.0f64) {
        let p = bump(n, 1.0, s, b);
        let e0 = heat_energy(&p, t0, &q()).unwrap();
        let e1 = heat_energy(&p, t0 + dt, &q()).unwrap();
        prop_assert!(e1 <= e0 * (1.0 + 1e-10));
    }

    #[test]
    fn ball_mass_plus_tail_is_energy(n in 1usize..4, s in 0.0..2.0f64, b in 0.2..3.0f64, k in 0.01..5.0f64) {
        let p = bump(n, 1.0, s, b);
        let inner = low_ball_mass(&p, k, &q()).unwrap();
        let outer = p.radial_moment(|_| 1.0, k, f64::INFINITY, &q()).unwrap();
        let total = radial_energy(&p, &q()).unwrap();
        prop_assert!((inner + outer - total).abs() <= 1e-10 * total);
    }

    #[test]
    fn plancherel_on_band_limited_grids(seed in 0u64..1000, nx in 3usize..6, ny in 3usize..6, lx in 0.5..10.0f64) {
        let (nx, ny) = (1usize << nx, 1usize << ny);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let modes: Vec<(f64, f64, f64, f64)> = (0..6)
            .map(|_| (rng.random_range(0..nx / 2) as f64, rng.random_range(0..ny / 2) as f64, rng.random_range(-1.0..1.0), rng.random_range(0.0..2.0 * PI)))
            .collect();
        let f = GridField::from_fn(vec![nx, ny], vec![lx, 1.0], |x| {
            modes.iter().map(|(kx, ky, a, ph)| a * (2.0 * PI * (kx * x[0] / lx + ky * x[1]) + ph).cos()).sum()
        }).unwrap();
        let e = f.energy();
        let s = dft_forward(&f).energy();
        prop_assert!((e - s).abs() <= 1e-11 * e.max(1e-300));
    }

    #[test]
    fn eigenvalues_scale_as_inverse_square(r in 0.01..100.0f64, c in 0.1..10.0f64) {
        let a = eigenvalues(r, 8).unwrap();
        let b = eigenvalues(c * r, 8).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((y * c * c - x).abs() <= 1e-12 * x);
        }
    }

    #[test]
    fn fpi_holds_whenever_alpha_is_defined(n in 1usize..4, s in 0.0..2.0f64, b in 0.2..3.0f64, k in 0.05..3.0f64) {
        let p = bump(n, 1.0, s, b);
        if let Ok(rep) = fpi_check(&p, k, &q()) {
            prop_assert!(rep.holds, "{rep:?}");
        }
    }

    #[test]
    fn optimality_correction_never_exceeds_ball_mass(k in 0.1..10.0f64, beta in 0.1..10.0f64, alphas in proptest::collection::vec(1e-3..10.0f64, 1..20)) {
        let (sup, probes) = optimality_sweep(k, beta, &alphas).unwrap();
        prop_assert!(sup < beta);
        for pr in probes {
            prop_assert!(pr.mu_required <= pr.ball_mass * (1.0 + 1e-12));
        }
    }

    #[test]
    fn verdict_is_monotone_in_q(n in 1usize..4, s in 0.0..2.0f64, qa in -0.4..3.0f64, dq in 0.05..2.0f64) {
        let p = bump(n, 1.0, s, 1.0);
        let spec = ProbeSpec::default();
        let va = decay_indicator(&p, qa, &spec).unwrap().verdict();
        let vb = decay_indicator(&p, qa + dq, &spec).unwrap().verdict();
        prop_assume!(!matches!(va, LimitVerdict::Inconclusive) && !matches!(vb, LimitVerdict::Inconclusive));
        prop_assert!(verdict_rank(va) <= verdict_rank(vb), "{va} then {vb}");
    }

    #[test]
    fn indicator_bounded_by_power_envelope(n in 1usize..4, q0 in -0.3..2.0f64, a in 0.1..10.0f64, wobble in 0.0..1.0f64) {
        // |û₀|² ≤ a r^{2q0}.
        let sa = a.sqrt();
        let p = RadialSpectralProfile::new(n, move |r: f64| sa * r.powf(q0) * (1.0 - wobble * (r * 37.0).sin().powi(2)) * (-r * r).exp()).unwrap();
        let probe = decay_indicator(&p, q0, &ProbeSpec::default()).unwrap();
        let bound = a * power_indicator(n, q0).unwrap() * 1.05;
        for v in probe.values() {
            prop_assert!(*v <= bound, "{v} > {bound}");
        }
    }
}

#[test]
fn interval_poincare_on_seeded_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..200 {
        let r = rng.random_range(0.1..20.0);
        let ns = rng.random_range(0..12);
        let nc = rng.random_range(0..12);
        let sine: Vec<f64> = (0..ns).map(|_| rng.random_range(-1.0..1.0)).collect();
        let cosine: Vec<f64> = (0..nc).map(|_| rng.random_range(-1.0..1.0)).collect();
        if sine.iter().chain(&cosine).all(|c| *c == 0.0) {
            continue;
        }
        let u = IntervalFunction::new(r, sine, cosine).unwrap();
        let rep = poincare_interval_check(&u).unwrap();
        assert!(rep.holds(), "R = {r}: {rep:?}");
    }
}

#[test]
fn modified_poincare_on_seeded_profiles() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let n = rng.random_range(1..4);
        let p = bump(n, rng.random_range(0.1..5.0), rng.random_range(0.0..2.5), rng.random_range(0.1..4.0));
        for _ in 0..10 {
            let lambda = 10f64.powf(rng.random_range(-2.0..1.0));
            let rep = modified_poincare_check(&p, lambda, &q()).unwrap();
            assert!(rep.holds, "{rep:?}");
        }
    }
}

#[test]
fn exponential_iff_spectral_gap_at_origin() {
    let gapped = [
        RadialSpectralProfile::annulus(2, 0.5, 2.0).unwrap(),
        RadialSpectralProfile::annulus(3, 0.01, 1.0).unwrap(),
        bump(1, 1.0, 0.0, 1.0).with_support_lower(0.2).unwrap(),
        RadialSpectralProfile::new(2, |r: f64| if r > 0.3 { (-r).exp() } else { 0.0 }).unwrap(),
    ];
    let ungapped = [
        bump(2, 1.0, 0.0, 1.0),
        bump(3, 1.0, 1.5, 0.5),
        RadialSpectralProfile::power_cutoff(1, -0.3, 1.0).unwrap(),
        bump(2, 1.0, 4.0, 1.0),
    ];
    let spec = ExpDecaySpec::default();
    for p in &gapped {
        let c = exp_decay_classify(p, &spec).unwrap();
        assert!(matches!(c.kind, DecayKind::ExponentialWithRate(r) if r > 0.0), "{:?}", c.kind);
        assert!(c.bound_samples.iter().all(|s| s.holds));
    }
    for p in &ungapped {
        let c = exp_decay_classify(p, &spec).unwrap();
        assert!(!matches!(c.kind, DecayKind::ExponentialWithRate(_)), "{:?}", c.kind);
        assert!(!c.witnesses.is_empty() && c.witnesses.iter().all(|w| w.violated));
    }
}

#[test]
fn sandwich_contains_the_trace() {
    let cases = [(bump(2, 1.0, 0.0, 1.0), 0.0), (bump(3, 2.0, 1.0, 0.5), 1.0), (bump(1, 1.0, 0.5, 2.0), 0.5)];
    for (p, q0) in &cases {
        let rep = decay_sandwich_check(p, *q0, [1e2, 1e5], &ProbeSpec::default()).unwrap();
        assert!(rep.pass, "{:?}", (rep.c1, rep.c2, rep.c3, rep.slope));
        for (t, e) in rep.trace.iter() {
            assert!(rep.lower(t) <= e * (1.0 + 1e-12));
            assert!(e <= rep.upper(t) * (1.0 + 1e-12));
        }
    }
}

#[test]
fn high_pass_is_idempotent() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..10 {
        let samples: Vec<f64> = (0..32 * 16).map(|_| rng.random_range(-1.0..1.0)).collect();
        let f = GridField::new(vec![32, 16], vec![2.0 * PI, 4.0], samples).unwrap();
        let spec = FilterSpec::new(vec![rng.random_range(0.5..6.0), rng.random_range(0.5..6.0)]).unwrap();
        let once = high_pass_apply(&f, &spec).unwrap();
        let twice = high_pass_apply(&once, &spec).unwrap();
        for (a, b) in once.samples().iter().zip(twice.samples()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(once.energy() <= f.energy() * (1.0 + 1e-12));
    }
}
