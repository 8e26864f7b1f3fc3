//! The experiment catalog.

mod heat;
mod nse;
mod poincare;

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::output::{self, Artifacts, Table, Trace};
use crate::params::{Params, Tolerances};

/// Everything an experiment may read.
#[derive(Debug, Clone, PartialEq)]
pub struct Ctx {
    pub params: Params,
    pub tol: Tolerances,
    pub seed: Option<u64>,
    /// Directory for auxiliary artifacts such as checkpoints.
    pub out: PathBuf,
}

impl Ctx {
    pub fn new(out: impl Into<PathBuf>) -> Self {
        Self {
            params: Params::default(),
            tol: Tolerances::default(),
            seed: None,
            out: out.into(),
        }
    }

    fn seed_or(&self, d: u64) -> u64 {
        self.seed.unwrap_or(d)
    }

    fn window_or(&self, d: [f64; 2]) -> Result<[f64; 2], RunError> {
        let w = self.params.window.unwrap_or(d);
        if !(w[0] > 0.0 && w[1] > w[0] && w[1].is_finite()) {
            return Err(RunError::Usage(format!("window must satisfy 0 < lo < hi, got [{}, {}]", w[0], w[1])));
        }
        Ok(w)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub pass: bool,
    pub results: Value,
    pub traces: Vec<Trace>,
    /// Extra CSV files, by file name.
    pub tables: Vec<(String, Table)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    /// Bad parameters or I/O; exit code 1.
    Usage(String),
    /// The computation itself could not produce a verdict; exit code 2.
    Failed(String),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Usage(m) | RunError::Failed(m) => f.write_str(m),
        }
    }
}

impl From<decaylab::Error> for RunError {
    fn from(e: decaylab::Error) -> Self {
        use decaylab::Error as E;
        match e {
            E::InvalidArgument { .. } | E::Io { .. } | E::Format(_) | E::ShapeMismatch(_) => RunError::Usage(e.to_string()),
            _ => RunError::Failed(e.to_string()),
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Usage(e.to_string())
    }
}

type RunFn = fn(&Ctx) -> Result<Outcome, RunError>;

#[derive(Clone, Copy, Serialize)]
pub struct Experiment {
    pub id: &'static str,
    /// Acceptance criterion reproduced by this experiment.
    pub criterion: Option<u8>,
    /// The result being exercised.
    pub topic: &'static str,
    pub summary: &'static str,
    #[serde(skip)]
    run: RunFn,
}

impl fmt::Debug for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Experiment").field("id", &self.id).finish_non_exhaustive()
    }
}

impl Experiment {
    pub fn run(&self, ctx: &Ctx) -> Result<Outcome, RunError> {
        (self.run)(ctx)
    }
}

static CATALOG: [Experiment; 14] = [
    Experiment {
        id: "heat-gaussian",
        criterion: Some(1),
        topic: "Gaussian heat decay",
        summary: "quadrature heat energy against the closed form, and the fitted log-log slope",
        run: heat::heat_gaussian,
    },
    Experiment {
        id: "interval-poincare",
        criterion: Some(2),
        topic: "Poincare inequality on an interval",
        summary: "basis orthonormality, 200 seeded coefficient vectors, sharpness of the spectral gap",
        run: poincare::interval_poincare,
    },
    Experiment {
        id: "modified-poincare",
        criterion: Some(3),
        topic: "whole-space Poincare inequality with ball correction",
        summary: "inequality slack on seeded band-limited profiles over a range of cut-offs",
        run: poincare::modified_poincare,
    },
    Experiment {
        id: "optimality",
        criterion: Some(4),
        topic: "optimality of the ball correction",
        summary: "Gaussian family that forces the correction constant towards beta",
        run: poincare::optimality,
    },
    Experiment {
        id: "decay-character",
        criterion: Some(5),
        topic: "decay character recovery",
        summary: "bisection for q* on power profiles, and sandwich slopes",
        run: heat::decay_character,
    },
    Experiment {
        id: "exp-decay",
        criterion: Some(6),
        topic: "exponential decay iff a spectral gap at the origin",
        summary: "classification of a 20-profile corpus with forward bounds and converse witnesses",
        run: heat::exp_decay,
    },
    Experiment {
        id: "norate",
        criterion: Some(7),
        topic: "no uniform decay rate",
        summary: "Gaussian data retaining 1 - eps of the energy up to time T",
        run: heat::norate,
    },
    Experiment {
        id: "riesz-bound",
        criterion: Some(8),
        topic: "sharp constant from the Riesz limit",
        summary: "scaled heat energy against the calibrated constant",
        run: heat::riesz_bound,
    },
    Experiment {
        id: "nse-desk",
        criterion: Some(9),
        topic: "2D Navier-Stokes at desk scale",
        summary: "Taylor-Green decay, energy inequality, nonlinear neutrality and heat comparison",
        run: nse::nse_desk,
    },
    Experiment {
        id: "decay-sandwich",
        criterion: None,
        topic: "two-sided algebraic decay bounds",
        summary: "fit C1 (1+t)^-p <= E(t) <= C2 (C3+t)^-p for a single power profile",
        run: heat::decay_sandwich,
    },
    Experiment {
        id: "fourier-splitting",
        criterion: None,
        topic: "Fourier splitting rates for fractional diffusion",
        summary: "fitted decay of |xi|^k data under (-Delta)^a against (n + 2k) / 4a",
        run: heat::fourier_splitting,
    },
    Experiment {
        id: "fpi",
        criterion: None,
        topic: "frequency-split Poincare inequality",
        summary: "(1 - alpha) |u|^2 <= K^-2 |grad u|^2 on Gaussian data",
        run: poincare::fpi,
    },
    Experiment {
        id: "poisson-example",
        criterion: None,
        topic: "fractional Poisson problem",
        summary: "|u|^2 <= 2 |grad u|^2 for the solution of |xi|^k u = f",
        run: poincare::poisson_example,
    },
    Experiment {
        id: "wiegner-rates",
        criterion: None,
        topic: "Navier-Stokes decay rates from the decay character",
        summary: "Wiegner exponents and NS decay classes against hand-checked values",
        run: nse::wiegner_rates,
    },
];

pub fn catalog() -> &'static [Experiment] {
    &CATALOG
}

pub fn find(id: &str) -> Option<&'static Experiment> {
    CATALOG.iter().find(|e| e.id == id)
}

pub fn catalog_json() -> Value {
    serde_json::to_value(catalog()).expect("catalog serialises")
}

/// Runs `exp` and writes `trace.csv` and `report.json` into `ctx.out`.
/// Quantitative errors still produce a report, with `pass = false`.
pub fn run_to_dir(exp: &Experiment, ctx: &Ctx) -> Result<(Value, Artifacts), RunError> {
    std::fs::create_dir_all(&ctx.out).map_err(|e| RunError::Usage(format!("{}: {e}", ctx.out.display())))?;
    let trace = ctx.out.join("trace.csv");
    let report_path = ctx.out.join("report.json");
    let (pass, results, error) = match exp.run(ctx) {
        Ok(o) => {
            output::write_traces(&trace, &o.traces).map_err(|e| io_error(&trace, e))?;
            for (name, table) in &o.tables {
                let p = ctx.out.join(name);
                output::write_table(&p, table).map_err(|e| io_error(&p, e))?;
            }
            (o.pass, o.results, None)
        }
        Err(RunError::Failed(msg)) => {
            output::write_traces(&trace, &[]).map_err(|e| io_error(&trace, e))?;
            (false, Value::Null, Some(msg))
        }
        Err(usage) => return Err(usage),
    };
    let report = json!({
        "experiment": exp.id,
        "criterion": exp.criterion,
        "params": ctx.params,
        "tolerances": ctx.tol,
        "seed": ctx.seed,
        "pass": pass,
        "results": results,
        "error": error,
    });
    output::write_json(&report_path, &report).map_err(|e| io_error(&report_path, e))?;
    Ok((
        report,
        Artifacts {
            report: report_path,
            trace,
        },
    ))
}

fn io_error(path: &Path, e: std::io::Error) -> RunError {
    RunError::Usage(format!("{}: {e}", path.display()))
}

/// `|a − b| ≤ tol · |b|`.
fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs()
}
