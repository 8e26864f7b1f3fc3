use rayon::prelude::*;
use serde_json::{json, Value};

use decaylab::decay_character::{decay_character_estimate, riesz_decay_check, ProbeSpec, QStar};
use decaylab::heat::{
    decay_sandwich_check, exp_decay_classify, fourier_splitting_rate, fractional_heat_energy, heat_trace,
    low_frequency_constant, norate_witness, DecayKind, ExpDecaySpec, SPLITTING_RADIUS,
};
use decaylab::spectral::{
    least_squares, log_grid, loglog_slope, radial_energy, QuadratureSpec, RadialSpectralProfile, TailBound,
    TailDecay,
};
use decaylab::whole_space::GaussianFamily;

use super::{Ctx, Outcome, RunError};
use crate::output::{Table, Trace};

fn quad() -> QuadratureSpec {
    QuadratureSpec::default()
}

/// Reads: n, alpha, beta, window; tolerances relative (1e-6), slope (0.02, absolute).
pub(super) fn heat_gaussian(ctx: &Ctx) -> Result<Outcome, RunError> {
    let p = &ctx.params;
    let n = p.n.unwrap_or(2);
    let g = GaussianFamily::new(p.beta.unwrap_or(1.0), p.alpha.unwrap_or(1.0), n)?;
    let window = ctx.window_or([10.0, 1e4])?;
    let rel_tol = ctx.tol.relative.unwrap_or(1e-6);
    let slope_tol = ctx.tol.slope.unwrap_or(0.02);
    let profile = g.profile();
    let q = quad();

    let times = log_grid(1e-2, 1e4, 20);
    let trace = heat_trace(&profile, &times, &q)?;
    let mut table = Table::decay();
    let mut max_rel = 0.0_f64;
    for (t, e) in trace.iter() {
        let exact = g.heat_energy(t);
        max_rel = max_rel.max((e - exact).abs() / exact);
        table.push(vec![Some(t), Some(e), Some(exact * (1.0 - rel_tol)), Some(exact * (1.0 + rel_tol))]);
    }
    let fit = heat_trace(&profile, &log_grid(window[0], window[1], 50), &q)?;
    let slope = loglog_slope(&fit, window)?;
    let expected = -(n as f64) / 2.0;
    let pass = max_rel <= rel_tol && (slope - expected).abs() <= slope_tol;
    Ok(Outcome {
        pass,
        results: json!({
            "max_relative_error": max_rel,
            "slope": slope,
            "expected_slope": expected,
            "window": window,
        }),
        traces: vec![Trace { label: "gaussian".into(), table }],
        tables: Vec::new(),
    })
}

fn decay_table(rep_trace: &decaylab::spectral::EnergyTrace, lower: impl Fn(f64) -> f64, upper: impl Fn(f64) -> f64) -> Table {
    let mut t = Table::decay();
    for (time, e) in rep_trace.iter() {
        t.push(vec![Some(time), Some(e), Some(lower(time)), Some(upper(time))]);
    }
    t
}

/// Reads: n and q (restrict the case grid), window; tolerances bracket (0.05), slope (0.07).
pub(super) fn decay_character(ctx: &Ctx) -> Result<Outcome, RunError> {
    let q0s: Vec<f64> = match ctx.params.q {
        Some(q) => vec![q],
        None => vec![-0.4, 0.0, 0.5, 1.0, 2.0],
    };
    let dims: Vec<usize> = match ctx.params.n {
        Some(n) => vec![n],
        None => vec![1, 2, 3],
    };
    let resolution = ctx.tol.bracket.unwrap_or(0.05);
    let slope_tol = ctx.tol.slope.unwrap_or(0.07);
    let window = ctx.window_or([1e2, 1e5])?;
    let spec = ProbeSpec::default();

    let mut pass = true;
    let mut cases = Vec::new();
    let mut traces = Vec::new();
    for &n in &dims {
        for &q0 in &q0s {
            let profile = RadialSpectralProfile::power_cutoff(n, q0, 1.0)?;
            let est = decay_character_estimate(&profile, resolution)?;
            let (q_hat, bracket_ok) = match (est.q_star, est.bracket) {
                (QStar::Finite(qh), Some((lo, hi))) => {
                    (Some(qh), (qh - q0).abs() <= resolution && lo - 1e-12 <= q0 && q0 <= hi + 1e-12)
                }
                _ => (None, false),
            };
            let sw = decay_sandwich_check(&profile, q0, window, &spec)?;
            let exponent = q0 + n as f64 / 2.0;
            let slope_ok = (sw.slope + exponent).abs() <= slope_tol * exponent;
            pass &= bracket_ok && slope_ok;
            let label = format!("n={n},q0={q0}");
            cases.push(json!({
                "case": label,
                "n": n,
                "q0": q0,
                "q_star": q_hat,
                "bracket": est.bracket.map(|(a, b)| [a, b]),
                "bracket_ok": bracket_ok,
                "p_at_q_star": est.p_at_q_star,
                "slope": sw.slope,
                "expected_slope": -exponent,
                "slope_ok": slope_ok,
                "c1": sw.c1,
                "c2": sw.c2,
                "c3": sw.c3,
            }));
            traces.push(Trace {
                label,
                table: decay_table(&sw.trace, |t| sw.lower(t), |t| sw.upper(t)),
            });
        }
    }
    Ok(Outcome {
        pass,
        results: json!({ "resolution": resolution, "window": window, "cases": cases }),
        traces,
        tables: Vec::new(),
    })
}

/// Reads: n (2), q (0), window.
pub(super) fn decay_sandwich(ctx: &Ctx) -> Result<Outcome, RunError> {
    let n = ctx.params.n.unwrap_or(2);
    let q0 = ctx.params.q.unwrap_or(0.0);
    let window = ctx.window_or([1e2, 1e5])?;
    let profile = RadialSpectralProfile::power_cutoff(n, q0, ctx.params.cutoff.unwrap_or(1.0))?;
    let sw = decay_sandwich_check(&profile, q0, window, &ProbeSpec::default())?;
    Ok(Outcome {
        pass: sw.pass,
        results: json!({
            "exponent": sw.exponent,
            "slope": sw.slope,
            "c1": sw.c1,
            "c2": sw.c2,
            "c3": sw.c3,
            "window": window,
        }),
        traces: vec![Trace {
            label: profile.label().into(),
            table: decay_table(&sw.trace, |t| sw.lower(t), |t| sw.upper(t)),
        }],
        tables: Vec::new(),
    })
}

fn bump(n: usize, s: f64, b: f64) -> Result<RadialSpectralProfile, decaylab::Error> {
    Ok(RadialSpectralProfile::new(n, move |r: f64| r.powf(s) * (-b * r * r).exp())?.with_label(format!("bump(n={n},s={s},b={b})")))
}

/// Ten profiles with a declared gap at the origin, ten without.
fn exp_corpus() -> Result<Vec<RadialSpectralProfile>, decaylab::Error> {
    let mut v = vec![
        RadialSpectralProfile::annulus(1, 0.1, 1.0)?,
        RadialSpectralProfile::annulus(2, 0.5, 2.0)?,
        RadialSpectralProfile::annulus(3, 0.01, 1.0)?,
        RadialSpectralProfile::annulus(2, 1.0, 3.0)?,
        bump(1, 0.0, 1.0)?.with_support_lower(0.2)?,
        bump(2, 1.0, 0.5)?.with_support_lower(0.05)?,
        bump(3, 0.5, 2.0)?.with_support_lower(0.3)?,
        bump(2, 0.0, 1.0)?.with_support_lower(1e-3)?,
        RadialSpectralProfile::power_cutoff(2, 0.5, 2.0)?.with_support_lower(0.25)?,
        bump(3, 2.0, 1.0)?.with_support_lower(0.7)?,
    ];
    v.extend([
        bump(1, 0.0, 1.0)?,
        bump(2, 0.0, 1.0)?,
        bump(3, 0.0, 1.0)?,
        bump(2, 0.5, 2.0)?,
        bump(3, 1.5, 0.5)?,
        bump(2, 4.0, 1.0)?,
        RadialSpectralProfile::power_cutoff(1, -0.3, 1.0)?,
        RadialSpectralProfile::power_cutoff(3, 1.0, 1.0)?,
        RadialSpectralProfile::power_cutoff(2, 2.0, 0.5)?,
        RadialSpectralProfile::annulus(2, 0.0, 1.0)?,
    ]);
    Ok(v)
}

/// Reads nothing; the corpus is fixed.
pub(super) fn exp_decay(_ctx: &Ctx) -> Result<Outcome, RunError> {
    let spec = ExpDecaySpec::default();
    let corpus = exp_corpus()?;
    let classified = corpus
        .par_iter()
        .map(|p| exp_decay_classify(p, &spec))
        .collect::<Result<Vec<_>, _>>()?;

    let mut pass = true;
    let mut cases = Vec::new();
    let mut traces = Vec::new();
    for (i, (p, c)) in corpus.iter().zip(&classified).enumerate() {
        let gapped = p.support_lower().is_some();
        let exponential = matches!(c.kind, DecayKind::ExponentialWithRate(_));
        let forward_ok = !exponential || (c.bound_samples.len() == spec.bound_samples && c.bound_samples.iter().all(|s| s.holds));
        let converse_ok = exponential || (c.witnesses.len() == spec.proposals.len() && c.witnesses.iter().all(|w| w.violated));
        let ok = gapped == exponential && forward_ok && converse_ok;
        pass &= ok;
        let label = format!("{i:02}:{}", p.label());
        let mut doc = c.to_json(p.dim(), None);
        if let Value::Object(m) = &mut doc {
            m.insert("case".into(), json!(label));
            m.insert("support_lower".into(), json!(p.support_lower()));
            m.insert("ok".into(), json!(ok));
        }
        cases.push(doc);
        let mut table = Table::decay();
        if exponential {
            for s in &c.bound_samples {
                table.push(vec![Some(s.t), Some(s.energy), None, Some(s.bound)]);
            }
        } else {
            for (t, e) in c.evidence.iter() {
                table.push(vec![Some(t), Some(e), None, None]);
            }
        }
        traces.push(Trace { label, table });
    }
    Ok(Outcome {
        pass,
        results: json!({ "cases": cases }),
        traces,
        tables: Vec::new(),
    })
}

/// Reads: T (10, 100, 1000 when unset), eps (0.1), beta (1), n (2);
/// tolerance relative (1e-9) covers quadrature error against the exact `1 − ε`.
pub(super) fn norate(ctx: &Ctx) -> Result<Outcome, RunError> {
    let horizons: Vec<f64> = match ctx.params.t {
        Some(t) => vec![t],
        None => vec![10.0, 100.0, 1000.0],
    };
    let eps = ctx.params.eps.unwrap_or(0.1);
    let beta = ctx.params.beta.unwrap_or(1.0);
    let n = ctx.params.n.unwrap_or(2);
    let tol = ctx.tol.relative.unwrap_or(1e-9);
    let q = quad();

    let mut pass = true;
    let mut cases = Vec::new();
    let mut traces = Vec::new();
    for &big_t in &horizons {
        let w = norate_witness(big_t, eps, beta, n, &q)?;
        let ok = w.ratio >= (1.0 - eps) * (1.0 - tol);
        pass &= ok;
        cases.push(json!({
            "T": big_t,
            "alpha": w.alpha,
            "ratio": w.ratio,
            "closed_form_ratio": w.closed_form_ratio,
            "ok": ok,
        }));
        let profile = GaussianFamily::new(beta, w.alpha, n)?.profile();
        let e0 = radial_energy(&profile, &q)?;
        let tr = heat_trace(&profile, &log_grid(big_t * 1e-3, big_t * 10.0, 30), &q)?;
        let mut table = Table::decay();
        for (t, e) in tr.iter() {
            table.push(vec![Some(t), Some(e), (t <= big_t).then_some((1.0 - eps) * e0), Some(e0)]);
        }
        traces.push(Trace {
            label: format!("T={big_t}"),
            table,
        });
    }
    Ok(Outcome {
        pass,
        results: json!({ "eps": eps, "beta": beta, "n": n, "cases": cases }),
        traces,
        tables: Vec::new(),
    })
}

/// Reads: beta (0 and 1 when unset), n (2), window ([1, 1e4]).
pub(super) fn riesz_bound(ctx: &Ctx) -> Result<Outcome, RunError> {
    let betas: Vec<f64> = match ctx.params.beta {
        Some(b) => vec![b],
        None => vec![0.0, 1.0],
    };
    let n = ctx.params.n.unwrap_or(2);
    let window = ctx.window_or([1.0, 1e4])?;
    let times = log_grid(window[0], window[1], 40);
    let spec = ProbeSpec::default();

    let mut pass = true;
    let mut cases = Vec::new();
    let mut traces = Vec::new();
    for &beta in &betas {
        let profile = RadialSpectralProfile::new(n, move |r: f64| r.powf(beta / 2.0) * (-r * r).exp())?;
        let rep = riesz_decay_check(&profile, beta, &times, &spec)?;
        pass &= rep.bound_ok;
        cases.push(json!({
            "beta": beta,
            "a_beta": rep.a_beta,
            "constant": rep.constant,
            "bound": rep.bound,
            "sup_scaled": rep.sup_scaled,
            "bound_ok": rep.bound_ok,
        }));
        let scale = 0.5 * (n as f64 + beta);
        let mut table = Table::decay();
        for &(t, s) in &rep.scaled {
            table.push(vec![Some(t), Some(s / t.powf(scale)), None, Some(rep.bound / t.powf(scale))]);
        }
        traces.push(Trace {
            label: format!("beta={beta}"),
            table,
        });
    }
    Ok(Outcome {
        pass,
        results: json!({ "n": n, "window": window, "cases": cases }),
        traces,
        tables: Vec::new(),
    })
}

/// Reads: n (2), q as the low-frequency exponent k (0), diffusion a (1),
/// window ([1e3, 1e6]); tolerance slope (0.02, relative).
pub(super) fn fourier_splitting(ctx: &Ctx) -> Result<Outcome, RunError> {
    let n = ctx.params.n.unwrap_or(2);
    let k = ctx.params.q.unwrap_or(0.0);
    let a = ctx.params.diffusion.unwrap_or(1.0);
    let window = ctx.window_or([1e3, 1e6])?;
    let slope_tol = ctx.tol.slope.unwrap_or(0.02);
    let rate = fourier_splitting_rate(n, k, a)?;
    let profile = RadialSpectralProfile::new(n, move |r: f64| if r <= 1.0 { r.powf(k) } else { 0.0 })?
        .with_tail(TailBound { radius: 1.0, decay: TailDecay::Vanishing })?;
    let q = quad();
    let times = log_grid(window[0], window[1], 24);
    let energies = times
        .par_iter()
        .map(|&t| fractional_heat_energy(&profile, t, a, &q))
        .collect::<Result<Vec<_>, _>>()?;
    if energies.iter().any(|&e| !(e > 0.0)) {
        return Err(RunError::Failed("energy underflowed inside the window".into()));
    }
    let logs: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let half_log_e: Vec<f64> = energies.iter().map(|e| 0.5 * e.ln()).collect();
    let (slope, _) = least_squares(&logs, &half_log_e)?;
    let pass = (slope + rate).abs() <= slope_tol * rate;
    let mut table = Table::decay();
    for (&t, &e) in times.iter().zip(&energies) {
        table.push(vec![Some(t), Some(e), None, None]);
    }
    Ok(Outcome {
        pass,
        results: json!({
            "n": n,
            "k": k,
            "a": a,
            "rate": rate,
            "norm_slope": slope,
            "low_frequency_constant": low_frequency_constant(&profile, k, SPLITTING_RADIUS, 64),
            "window": window,
        }),
        traces: vec![Trace { label: "splitting".into(), table }],
        tables: Vec::new(),
    })
}

