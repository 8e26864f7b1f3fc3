use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use decaylab::interval::{orthonormality_check, poincare_interval_check, BasisKind, IntervalFunction};
use decaylab::spectral::{log_grid, QuadratureSpec, RadialSpectralProfile, TailBound, TailDecay};
use decaylab::whole_space::{
    fpi_alpha, fpi_check, modified_poincare_check, optimality_sweep, poisson_example_check, poisson_source,
    GaussianFamily, POINCARE_REL_TOL,
};

use super::{rel_close, Ctx, Outcome, RunError};
use crate::output::{Table, Trace};

fn quad() -> QuadratureSpec {
    QuadratureSpec::default()
}

/// Reads: radius R (1), seed (2024); tolerance relative (1e-10) for both
/// orthonormality and the sharp ratio of `Cosine(0)`.
pub(super) fn interval_poincare(ctx: &Ctx) -> Result<Outcome, RunError> {
    let r = ctx.params.radius.unwrap_or(1.0);
    let tol = ctx.tol.relative.unwrap_or(1e-10);
    let orth = orthonormality_check(r, 6, &quad())?;

    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed_or(2024));
    let mut table = Table::new(&["sample", "ratio"]);
    let mut all_hold = true;
    let mut min_ratio = f64::INFINITY;
    let mut sample = 0;
    while sample < 200 {
        let ns = rng.random_range(0..=10);
        let nc = rng.random_range(0..=10);
        let sine: Vec<f64> = (0..ns).map(|_| rng.random_range(-1.0..1.0)).collect();
        let cosine: Vec<f64> = (0..nc).map(|_| rng.random_range(-1.0..1.0)).collect();
        if sine.iter().chain(&cosine).all(|c| *c == 0.0) {
            continue;
        }
        let rep = poincare_interval_check(&IntervalFunction::new(r, sine, cosine)?)?;
        all_hold &= rep.holds();
        min_ratio = min_ratio.min(rep.ratio);
        table.push_values(&[sample as f64, rep.ratio]);
        sample += 1;
    }
    let ground = poincare_interval_check(&IntervalFunction::mode(BasisKind::Cosine(0), r)?)?;
    let sharp = rel_close(ground.ratio, 1.0, tol);
    let pass = orth <= tol && all_hold && sharp;
    Ok(Outcome {
        pass,
        results: json!({
            "R": r,
            "gap": (std::f64::consts::PI / (2.0 * r)).powi(2),
            "orthonormality_error": orth,
            "samples": 200,
            "all_hold": all_hold,
            "min_ratio": min_ratio,
            "ground_mode_ratio": ground.ratio,
        }),
        traces: vec![Trace { label: "interval".into(), table }],
        tables: Vec::new(),
    })
}

/// `a r^s (1 − (r/c)²)²` on `r < c`.
fn band_limited(n: usize, a: f64, s: f64, c: f64) -> Result<RadialSpectralProfile, decaylab::Error> {
    RadialSpectralProfile::new(n, move |r: f64| if r < c { a * r.powf(s) * (1.0 - (r / c).powi(2)).powi(2) } else { 0.0 })?
        .with_tail(TailBound { radius: c, decay: TailDecay::Vanishing })
}

/// Reads: n (mixed 1..3 when unset), Lambda (10 log-spaced values in
/// [1e-2, 10] when unset), seed (7); tolerance relative (1e-10).
pub(super) fn modified_poincare(ctx: &Ctx) -> Result<Outcome, RunError> {
    let tol = ctx.tol.relative.unwrap_or(POINCARE_REL_TOL);
    let lambdas = match ctx.params.lambda {
        Some(l) => vec![l],
        None => log_grid(1e-2, 10.0, 10),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed_or(7));
    let profiles = (0..100)
        .map(|_| {
            let n = ctx.params.n.unwrap_or_else(|| rng.random_range(1..=3));
            band_limited(n, rng.random_range(0.1..5.0), rng.random_range(0.0..2.5), rng.random_range(0.3..6.0))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let q = quad();
    let mut table = Table::new(&["lambda", "min_relative_slack"]);
    let mut pass = true;
    let mut worst = f64::INFINITY;
    for &lambda in &lambdas {
        let mut min_rel = f64::INFINITY;
        for p in &profiles {
            let rep = modified_poincare_check(p, lambda, &q)?;
            let rel = rep.slack / rep.gradient_energy;
            pass &= rep.slack >= -tol * rep.gradient_energy;
            min_rel = min_rel.min(rel);
        }
        worst = worst.min(min_rel);
        table.push_values(&[lambda, min_rel]);
    }
    Ok(Outcome {
        pass,
        results: json!({
            "profiles": profiles.len(),
            "lambdas": lambdas,
            "min_relative_slack": worst,
        }),
        traces: vec![Trace { label: "modified".into(), table }],
        tables: Vec::new(),
    })
}

/// Reads: K (1), beta (1). The α-grid spans `[K/1000, 10K]`.
pub(super) fn optimality(ctx: &Ctx) -> Result<Outcome, RunError> {
    let k = ctx.params.k.unwrap_or(1.0);
    let beta = ctx.params.beta.unwrap_or(1.0);
    let alphas = log_grid(k * 1e-3, k * 10.0, 41);
    let (sup, probes) = optimality_sweep(k, beta, &alphas)?;
    let target = 0.99 * beta;
    let vanishes = probes.iter().filter(|p| p.alpha >= k).all(|p| p.mu_required == 0.0);
    let mut table = Table::new(&["alpha", "mu_required", "ball_mass", "gradient_term"]);
    for p in &probes {
        table.push_values(&[p.alpha, p.mu_required, p.ball_mass, p.gradient_term]);
    }
    Ok(Outcome {
        pass: sup >= target && vanishes,
        results: json!({
            "K": k,
            "beta": beta,
            "sup_mu_required": sup,
            "target": target,
            "zero_for_alpha_ge_K": vanishes,
        }),
        traces: vec![Trace { label: "optimality".into(), table }],
        tables: Vec::new(),
    })
}

/// Reads: n (2), alpha (1), beta (1), K (1).
pub(super) fn fpi(ctx: &Ctx) -> Result<Outcome, RunError> {
    let n = ctx.params.n.unwrap_or(2);
    let k = ctx.params.k.unwrap_or(1.0);
    let g = GaussianFamily::new(ctx.params.beta.unwrap_or(1.0), ctx.params.alpha.unwrap_or(1.0), n)?;
    let p = g.profile();
    let q = quad();
    let rep = fpi_check(&p, k, &q)?;
    let mut table = Table::probe();
    for kk in log_grid(k * 1e-2, k, 20) {
        table.push_values(&[kk, fpi_alpha(&p, kk, &q)?]);
    }
    Ok(Outcome {
        pass: rep.holds,
        results: json!({
            "K": k,
            "alpha": rep.alpha,
            "lhs": rep.lhs,
            "rhs": rep.rhs,
            "holds": rep.holds,
        }),
        traces: vec![Trace { label: "fpi".into(), table }],
        tables: Vec::new(),
    })
}

/// Reads: m (1), order k (1), cutoff (1), amplitude (1), n (2).
pub(super) fn poisson_example(ctx: &Ctx) -> Result<Outcome, RunError> {
    let p = &ctx.params;
    let (m, k) = (p.m.unwrap_or(1.0), p.order.unwrap_or(1.0));
    let (cut, amp, n) = (p.cutoff.unwrap_or(1.0), p.amplitude.unwrap_or(1.0), p.n.unwrap_or(2));
    let rep = poisson_example_check(m, k, cut, amp, n, &quad())?;
    let source = poisson_source(m, cut, amp, n)?;
    let mut table = Table::probe();
    for r in log_grid(1e-3 * cut, 4.0 * cut, 40) {
        table.push_values(&[r, source.magnitude(r) * r.powf(-k)]);
    }
    Ok(Outcome {
        pass: rep.holds,
        results: json!({
            "m": m,
            "k": k,
            "beta0": rep.beta0,
            "source_energy": rep.source_energy,
            "energy": rep.energy,
            "gradient_energy": rep.gradient_energy,
            "fpi_alpha": rep.fpi_alpha,
            "holds": rep.holds,
        }),
        traces: vec![Trace { label: "poisson".into(), table }],
        tables: Vec::new(),
    })
}
