use std::f64::consts::PI;

use serde_json::json;

use decaylab::ns::{
    diff_trace, duhamel_exponent, duhamel_nl_bound, heat_on_grid_trace, ns_decay_classify, random_dipoles,
    taylor_green, torus_window_end, wiegner_rate, window_is_valid, HKind, NsDecay, NseSolver, RunManifest,
};
use decaylab::spectral::{log_grid, loglog_slope};

use super::{Ctx, Outcome, RunError};
use crate::output::{Table, Trace};

/// Grid of the Taylor–Green check, fixed by the acceptance setup.
const TG_GRID: usize = 128;
const TG_DT: f64 = 0.01;

/// Reads: grid (256), box (16π), dt (0.02), window ([1, L²/(16π²)]), seed (11),
/// checkpoints (false); tolerances relative (1e-5, Taylor–Green), energy (1e-3),
/// nl_power (1e-8), slope (0.15).
pub(super) fn nse_desk(ctx: &Ctx) -> Result<Outcome, RunError> {
    let p = &ctx.params;
    let tg_tol = ctx.tol.relative.unwrap_or(1e-5);
    let energy_tol = ctx.tol.energy.unwrap_or(1e-3);
    let nl_tol = ctx.tol.nl_power.unwrap_or(1e-8);
    let slope_tol = ctx.tol.slope.unwrap_or(0.15);

    // Steady Euler flow: the energy is exactly 2π² e^{−4t}.
    let tg0 = taylor_green(TG_GRID, 1.0)?;
    let tg_times: Vec<f64> = (1..=20).map(|i| 0.05 * i as f64).collect();
    let tg = NseSolver::for_state(&tg0)?.run(&tg0, TG_DT, &tg_times)?;
    let tg_err = std::iter::once(&tg0)
        .chain(&tg.snapshots)
        .map(|s| {
            let exact = 2.0 * PI * PI * (-4.0 * s.time()).exp();
            (s.energy() - exact).abs() / exact
        })
        .fold(0.0, f64::max);

    let n = p.grid.unwrap_or(256);
    let box_length = p.box_length.unwrap_or(16.0 * PI);
    let dt = p.dt.unwrap_or(0.02);
    let end = torus_window_end(box_length);
    let window = ctx.window_or([1.0, end])?;
    if !window_is_valid(window, box_length) {
        return Err(RunError::Usage(format!(
            "window [{}, {}] leaves the torus-valid range t <= {end}",
            window[0], window[1]
        )));
    }
    let s0 = random_dipoles(n, box_length, 4, 1.0, 1.0, ctx.seed_or(11))?;
    let times = log_grid(window[0] / 4.0, window[1], 40);
    let mut solver = NseSolver::for_state(&s0)?;
    let traj = solver.run(&s0, dt, &times)?;

    let excess = traj.energy_inequality_excess();
    let nl = traj.max_relative_nl_power();
    let heat = heat_on_grid_trace(&s0, &times)?;
    let diff = diff_trace(&traj)?;
    let heat_slope = loglog_slope(&heat, window)?;
    let diff_slope = loglog_slope(&diff, window)?;
    let slope_ok = diff_slope <= heat_slope + slope_tol * heat_slope.abs();
    let duhamel = duhamel_nl_bound(&traj.snapshots, 1.0, 1.0)?;

    let checkpoints = if p.checkpoints.unwrap_or(false) {
        traj.write_checkpoints(&ctx.out.join("checkpoints"))?
    } else {
        Vec::new()
    };
    RunManifest::new(&traj, window, &checkpoints).write(&ctx.out.join("manifest.json"))?;

    let tg_ok = tg_err <= tg_tol;
    let energy_ok = excess <= energy_tol;
    let nl_ok = nl <= nl_tol;
    let mut table = Table::decay();
    table.push(vec![Some(traj.initial.time()), Some(traj.initial.energy()), None, None]);
    for s in &traj.snapshots {
        table.push(vec![Some(s.time()), Some(s.energy()), None, None]);
    }
    let mut diff_table = Table::new(&["t", "diff", "heat"]);
    for ((t, d), h) in diff.iter().zip(heat.values()) {
        diff_table.push_values(&[t, d, *h]);
    }
    Ok(Outcome {
        pass: tg_ok && energy_ok && nl_ok && slope_ok,
        results: json!({
            "taylor_green": { "grid": TG_GRID, "dt": TG_DT, "max_relative_error": tg_err, "ok": tg_ok },
            "grid": n,
            "box": box_length,
            "dt": dt,
            "window": window,
            "torus_window_end": end,
            "steps": traj.steps.len(),
            "energy_inequality_excess": excess,
            "energy_ok": energy_ok,
            "max_relative_nl_power": nl,
            "nl_ok": nl_ok,
            "heat_slope": heat_slope,
            "diff_slope": diff_slope,
            "slope_ok": slope_ok,
            "duhamel": duhamel,
            "duhamel_exponent_q0": duhamel_exponent(0.0, 1.0, 2),
        }),
        traces: vec![Trace { label: "nse".into(), table }],
        tables: vec![("diff.csv".into(), diff_table)],
    })
}

/// Reads nothing; checks the formula evaluators against worked values.
pub(super) fn wiegner_rates(_ctx: &Ctx) -> Result<Outcome, RunError> {
    let rates = [
        (1.0, 2, 2.0, HKind::LogSquared),
        (0.5, 3, 1.5, HKind::Constant),
        (0.0, 4, 1.0, HKind::EpsilonVanishing),
        (2.0, 2, 2.0, HKind::Constant),
        (0.75, 2, 1.5, HKind::Constant),
        (1.0, 4, 3.0, HKind::LogSquared),
    ];
    let classes = [
        (-1.0, 2, NsDecay::Undetermined),
        (-1.5, 3, NsDecay::SlowerThanAnyPolynomial),
        (-1.0, 3, NsDecay::TwoSided(0.5)),
        (-0.5, 2, NsDecay::TwoSided(0.5)),
        (0.0, 3, NsDecay::Upper(1.5)),
        (2.0, 2, NsDecay::Upper(2.0)),
        (f64::INFINITY, 3, NsDecay::Upper(2.5)),
    ];
    let mut pass = true;
    let mut table = Table::new(&["n", "alpha", "d"]);
    let mut rate_docs = Vec::new();
    for (alpha, n, d, h) in rates {
        let got = wiegner_rate(alpha, n)?;
        let ok = (got.d - d).abs() < 1e-15 && got.h_kind == h;
        pass &= ok;
        table.push_values(&[n as f64, alpha, got.d]);
        rate_docs.push(json!({ "n": n, "alpha": alpha, "d": got.d, "h": got.h_kind, "ok": ok }));
    }
    let mut class_docs = Vec::new();
    for (q_star, n, want) in classes {
        let got = ns_decay_classify(q_star, n)?;
        let ok = got == want;
        pass &= ok;
        class_docs.push(json!({ "n": n, "q_star": q_star.is_finite().then_some(q_star), "class": got, "ok": ok }));
    }
    Ok(Outcome {
        pass,
        results: json!({ "rates": rate_docs, "classes": class_docs }),
        traces: vec![Trace { label: "wiegner".into(), table }],
        tables: Vec::new(),
    })
}
