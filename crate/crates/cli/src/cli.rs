//! Argument parsing and dispatch for the `decay-lab` binary.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{self, LoadError};
use crate::experiments::{self, Ctx, RunError};
use crate::params::{Params, Tolerances};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAIL: i32 = 2;

/// Env var capping the worker threads.
pub const THREADS_ENV: &str = "DECAYLAB_THREADS";

#[derive(Parser, Debug)]
#[command(name = "decay-lab", version, about = "Decay experiments for the heat and Navier-Stokes equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one experiment and write trace.csv and report.json.
    Run(Box<RunArgs>),
    /// Print the experiment catalog.
    List {
        #[arg(long)]
        json: bool,
    },
    /// Check a TOML config without running it.
    ValidateConfig { path: PathBuf },
}

fn parse_window(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    let [a, b] = parts.as_slice() else {
        return Err(format!("expected `lo,hi`, got `{s}`"));
    };
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
    Ok([num(a)?, num(b)?])
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected `name=value`, got `{s}`"))?;
    if !Tolerances::FIELDS.contains(&k) {
        return Err(format!("unknown tolerance `{k}`; one of {}", Tolerances::FIELDS.join(", ")));
    }
    let v: f64 = v.parse().map_err(|e| format!("`{v}`: {e}"))?;
    if !(v >= 0.0 && v.is_finite()) {
        return Err(format!("tolerance `{k}` must be nonnegative, got {v}"));
    }
    Ok((k.to_owned(), v))
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Experiment id; see `decay-lab list`. May come from --config instead.
    experiment: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    q: Option<f64>,
    #[arg(long = "K")]
    k: Option<f64>,
    #[arg(long = "Lambda")]
    lambda: Option<f64>,
    #[arg(long = "T")]
    t: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long = "box")]
    box_length: Option<f64>,
    /// `lo,hi`.
    #[arg(long, value_parser = parse_window)]
    window: Option<[f64; 2]>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    order: Option<f64>,
    #[arg(long)]
    cutoff: Option<f64>,
    #[arg(long)]
    amplitude: Option<f64>,
    #[arg(long)]
    diffusion: Option<f64>,
    /// Write solver checkpoints (nse-desk).
    #[arg(long)]
    checkpoints: bool,
    /// Override a tolerance, e.g. `--tol slope=0.01`. Repeatable.
    #[arg(long = "tol", value_parser = parse_tol)]
    tol: Vec<(String, f64)>,
    /// Output directory; defaults to `decay-lab-out/<id>`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Print the report to stdout.
    #[arg(long)]
    json: bool,
}

impl RunArgs {
    fn params(&self) -> Params {
        Params {
            n: self.n,
            alpha: self.alpha,
            beta: self.beta,
            q: self.q,
            k: self.k,
            lambda: self.lambda,
            t: self.t,
            eps: self.eps,
            grid: self.grid,
            dt: self.dt,
            box_length: self.box_length,
            window: self.window,
            radius: self.radius,
            m: self.m,
            order: self.order,
            cutoff: self.cutoff,
            amplitude: self.amplitude,
            diffusion: self.diffusion,
            checkpoints: self.checkpoints.then_some(true),
        }
    }
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got `{v}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn known_ids() -> String {
    experiments::catalog().iter().map(|e| e.id).collect::<Vec<_>>().join(", ")
}

fn list(json: bool) -> i32 {
    if json {
        println!("{}", serde_json::to_string_pretty(&experiments::catalog_json()).expect("catalog serialises"));
        return EXIT_PASS;
    }
    for e in experiments::catalog() {
        let crit = e.criterion.map(|c| format!("criterion {c}")).unwrap_or_default();
        println!("{:<18} {:<12} {} : {}", e.id, crit, e.topic, e.summary);
    }
    EXIT_PASS
}

fn validate(path: &Path) -> i32 {
    match config::load(path) {
        Ok(cfg) => {
            println!("{}: ok (experiment `{}`)", path.display(), cfg.experiment);
            EXIT_PASS
        }
        Err(LoadError::Io(e)) => {
            eprintln!("{}: {e}", path.display());
            EXIT_USAGE
        }
        Err(LoadError::Invalid(diags)) => {
            for d in diags {
                eprintln!("{}:{}", path.display(), d);
            }
            EXIT_USAGE
        }
    }
}

fn run(args: RunArgs) -> i32 {
    let mut params = Params::default();
    let mut tol = Tolerances::default();
    let mut seed = None;
    let mut out = None;
    let mut id = None;
    if let Some(path) = &args.config {
        match config::load(path) {
            Ok(cfg) => {
                params = cfg.params;
                tol = cfg.tolerances;
                seed = cfg.seed;
                out = cfg.out;
                id = Some(cfg.experiment);
            }
            Err(LoadError::Io(e)) => {
                eprintln!("{}: {e}", path.display());
                return EXIT_USAGE;
            }
            Err(LoadError::Invalid(diags)) => {
                for d in diags {
                    eprintln!("{}:{}", path.display(), d);
                }
                return EXIT_USAGE;
            }
        }
    }
    params.overlay(&args.params());
    for (k, v) in &args.tol {
        tol.set(k, *v);
    }
    seed = args.seed.or(seed);
    out = args.out.clone().or(out);
    let Some(id) = args.experiment.clone().or(id) else {
        eprintln!("error: no experiment given\n\nusage: decay-lab run <EXPERIMENT> [OPTIONS]\nexperiments: {}", known_ids());
        return EXIT_USAGE;
    };
    let Some(exp) = experiments::find(&id) else {
        eprintln!("error: unknown experiment `{id}`\n\nusage: decay-lab run <EXPERIMENT> [OPTIONS]\nexperiments: {}", known_ids());
        return EXIT_USAGE;
    };
    let ctx = Ctx {
        params,
        tol,
        seed,
        out: out.unwrap_or_else(|| PathBuf::from("decay-lab-out").join(exp.id)),
    };
    match experiments::run_to_dir(exp, &ctx) {
        Ok((report, artifacts)) => {
            let pass = report["pass"].as_bool().unwrap_or(false);
            if args.json {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serialises"));
            } else {
                println!(
                    "{}: {} ({}, {})",
                    exp.id,
                    if pass { "pass" } else { "FAIL" },
                    artifacts.report.display(),
                    artifacts.trace.display()
                );
                if let Some(err) = report["error"].as_str() {
                    eprintln!("{}: {err}", exp.id);
                }
            }
            if pass {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(RunError::Usage(msg)) | Err(RunError::Failed(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
    }
}

/// Entry point; returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    if let Err(msg) = init_threads() {
        eprintln!("error: {msg}");
        return EXIT_USAGE;
    }
    match cli.command {
        Command::Run(args) => run(*args),
        Command::List { json } => list(json),
        Command::ValidateConfig { path } => validate(&path),
    }
}
