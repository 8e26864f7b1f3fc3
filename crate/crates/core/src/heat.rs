//! Exact heat-semigroup evolution and its decay classification.
//!
//! `û(ξ, t) = e^{−|ξ|²t} û₀(ξ)`, so `‖u(t)‖₂² = ∫ e^{−2|ξ|²t} |û₀|² dξ` is
//! evaluated by quadrature on the radial profile. No time stepping is involved.
//!
//! * Data whose transform vanishes on a ball `|ξ| < ρ` decays like
//!   `e^{−2ρ²t}`, and only such data decays exponentially
//!   ([`exp_decay_classify`]).
//! * Otherwise the decay character `q*` fixes the algebraic rate
//!   `(1+t)^{−(q*+n/2)}` ([`decay_sandwich_check`]).
//! * For any candidate rate there is datum of fixed energy that has not
//!   decayed at time `T` ([`norate_witness`]).

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::decay_character::{decay_character_with, decay_indicator, CharacterSearch, LimitVerdict, ProbeSpec, QStar};
use crate::error::{Error, Result};
use crate::spectral::dft::{dft_forward, dft_inverse};
use crate::spectral::fit::{log_grid, loglog_slope};
use crate::spectral::grid::GridField;
use crate::spectral::profile::{heat_energy, low_ball_mass, radial_energy, RadialSpectralProfile};
use crate::spectral::quadrature::QuadratureSpec;
use crate::spectral::trace::{EnergyTrace, TraceSource};
use crate::whole_space::GaussianFamily;

/// Exact heat energies at `times`, evaluated in parallel.
pub fn heat_trace(p: &RadialSpectralProfile, times: &[f64], q: &QuadratureSpec) -> Result<EnergyTrace> {
    let values = times
        .par_iter()
        .map(|&t| heat_energy(p, t, q))
        .collect::<Result<Vec<_>>>()?;
    EnergyTrace::new(times.to_vec(), values, TraceSource::ExactSemigroup)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum DecayKind {
    ExponentialWithRate(f64),
    AlgebraicWithExponent(f64),
    SlowerThanAnyPolynomial,
    FasterThanAnyPolynomial,
}

/// `E(t) ≤ e^{−2ρ²t} E(0)` at one sample time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentialBoundSample {
    pub t: f64,
    pub energy: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Time at which `‖u(t)‖₂² ≤ C e^{−α²t}` must fail.
///
/// Energy in `|ξ| ≤ α/2` alone gives `‖u(t)‖₂² ≥ c e^{−α²t/2}`, which beats
/// `C e^{−α²t}` for `t > t* = 2 ln(C/c) / α²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConverseWitness {
    pub big_c: f64,
    pub alpha: f64,
    /// `∫_{|ξ|≤α/2} |û₀|²`.
    pub c: f64,
    pub t_star: f64,
    /// Time actually checked, past `t*`.
    pub t_check: f64,
    pub log_energy: f64,
    pub log_bound: f64,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayClassification {
    pub kind: DecayKind,
    pub evidence: EnergyTrace,
    pub bound_samples: Vec<ExponentialBoundSample>,
    pub witnesses: Vec<ConverseWitness>,
    pub q_star: Option<QStar>,
}

#[derive(Serialize)]
struct ClassificationJson<'a> {
    #[serde(flatten)]
    kind: DecayKind,
    q_star: Option<f64>,
    bound_samples: &'a [ExponentialBoundSample],
    witnesses: &'a [ConverseWitness],
    evidence_csv: Option<String>,
}

impl DecayClassification {
    /// JSON report; `evidence_csv` records where the trace was written.
    pub fn to_json(&self, n: usize, evidence_csv: Option<&Path>) -> serde_json::Value {
        let doc = ClassificationJson {
            kind: self.kind,
            q_star: self.q_star.map(|q| q.value(n)).filter(|v| v.is_finite()),
            bound_samples: &self.bound_samples,
            witnesses: &self.witnesses,
            evidence_csv: evidence_csv.map(|p| p.display().to_string()),
        };
        serde_json::to_value(doc).expect("classification serialises")
    }

    /// Writes `<dir>/classification.json` and `<dir>/evidence.csv`.
    pub fn save(&self, n: usize, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        let csv_path = dir.join("evidence.csv");
        let json_path = dir.join("classification.json");
        let file = std::fs::File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
        self.evidence.write_csv(std::io::BufWriter::new(file))?;
        let text = serde_json::to_string_pretty(&self.to_json(n, Some(Path::new("evidence.csv"))))
            .map_err(|e| Error::Format(e.to_string()))?;
        std::fs::write(&json_path, text).map_err(|e| Error::io(&json_path, e))?;
        Ok((json_path, csv_path))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpDecaySpec {
    pub probe: ProbeSpec,
    /// `(C, α)` pairs to refute for non-exponential data.
    pub proposals: Vec<(f64, f64)>,
    /// Resolution of the follow-up `q*` search.
    pub resolution: f64,
    /// Number of forward-bound check times.
    pub bound_samples: usize,
}

impl Default for ExpDecaySpec {
    fn default() -> Self {
        Self {
            probe: ProbeSpec::default(),
            proposals: vec![(1.0, 1.0), (10.0, 0.5), (100.0, 2.0), (1e3, 0.2), (1e6, 5.0)],
            resolution: 0.05,
            bound_samples: 20,
        }
    }
}

/// Radii probed for an empty ball, from `2^4` down to the probe floor.
fn exp_probe_radii(spec: &ProbeSpec) -> Vec<f64> {
    (-4..=spec.last_exponent).map(|j| 2f64.powi(-j)).collect()
}

pub fn exp_decay_classify(p: &RadialSpectralProfile, spec: &ExpDecaySpec) -> Result<DecayClassification> {
    let q = &spec.probe.quadrature;
    let e0 = radial_energy(p, q)?;
    let radii = exp_probe_radii(&spec.probe);
    let empty = radii
        .par_iter()
        .map(|&r| ball_is_empty(p, 0.0, r, q))
        .collect::<Result<Vec<_>>>()?;

    if let Some(i) = empty.iter().position(|&e| e) {
        let mut rate = radii[i];
        if i > 0 {
            // The largest empty ball lies in [radii[i], radii[i-1]).
            let mut hi = radii[i - 1];
            for _ in 0..60 {
                let mid = 0.5 * (rate + hi);
                if mid <= rate || mid >= hi {
                    break;
                }
                if ball_is_empty(p, rate, mid, q)? {
                    rate = mid;
                } else {
                    hi = mid;
                }
            }
        }
        let times = log_grid(0.01 / (rate * rate), 10.0 / (rate * rate), spec.bound_samples.max(2));
        let evidence = heat_trace(p, &times, q)?;
        let bound_samples = evidence
            .iter()
            .map(|(t, energy)| {
                let bound = (-2.0 * rate * rate * t).exp() * e0;
                ExponentialBoundSample {
                    t,
                    energy,
                    bound,
                    holds: energy <= bound * (1.0 + 1e-8),
                }
            })
            .collect();
        return Ok(DecayClassification {
            kind: DecayKind::ExponentialWithRate(rate),
            evidence,
            bound_samples,
            witnesses: Vec::new(),
            q_star: Some(QStar::PlusInfinity),
        });
    }

    let witnesses = spec
        .proposals
        .iter()
        .map(|&(c, a)| converse_witness(p, c, a, q))
        .collect::<Result<Vec<_>>>()?;
    let mut search = CharacterSearch::new(spec.resolution);
    search.probe = spec.probe.clone();
    let estimate = decay_character_with(p, &search)?;
    let n = p.dim() as f64;
    let kind = match estimate.q_star {
        QStar::Finite(q) => DecayKind::AlgebraicWithExponent(q + n / 2.0),
        QStar::NegHalfN => DecayKind::SlowerThanAnyPolynomial,
        QStar::PlusInfinity => DecayKind::FasterThanAnyPolynomial,
    };
    let evidence = heat_trace(p, &log_grid(1e-2, 1e4, 40), q)?;
    Ok(DecayClassification {
        kind,
        evidence,
        bound_samples: Vec::new(),
        witnesses,
        q_star: Some(estimate.q_star),
    })
}

/// Whether `|û₀|` vanishes on `lower ≤ |ξ| ≤ upper`, given that it vanishes
/// below `lower`. Quadrature nodes alone can step over a thin sliver of
/// support, so the magnitude is also sampled directly.
fn ball_is_empty(p: &RadialSpectralProfile, lower: f64, upper: f64, q: &QuadratureSpec) -> Result<bool> {
    if p.support_lower().is_some_and(|r0| r0 >= upper) {
        return Ok(true);
    }
    const SAMPLES: usize = 512;
    let sampled_zero = (0..=SAMPLES).all(|i| p.magnitude(lower + (upper - lower) * i as f64 / SAMPLES as f64) == 0.0);
    Ok(sampled_zero && low_ball_mass(p, upper, q)? == 0.0)
}

/// Refutes the exponential bound `‖u(t)‖₂² ≤ C e^{−α²t}` for data with
/// energy near the frequency origin.
pub fn converse_witness(p: &RadialSpectralProfile, big_c: f64, alpha: f64, q: &QuadratureSpec) -> Result<ConverseWitness> {
    if !(big_c > 0.0 && big_c.is_finite()) {
        return Err(Error::invalid("C", format!("must be positive, got {big_c}")));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::invalid("alpha", format!("must be positive, got {alpha}")));
    }
    let c = low_ball_mass(p, alpha / 2.0, q)?;
    if c == 0.0 {
        return Err(Error::Precondition(format!(
            "`{}` has no energy in |ξ| <= {}; no witness exists",
            p.label(),
            alpha / 2.0
        )));
    }
    let a2 = alpha * alpha;
    let t_star = 2.0 * (big_c / c).ln() / a2;
    let t_check = t_star.max(0.0) + 2.0 / a2;
    let energy = heat_energy(p, t_check, q)?;
    let log_energy = energy.ln();
    let log_bound = big_c.ln() - a2 * t_check;
    Ok(ConverseWitness {
        big_c,
        alpha,
        c,
        t_star,
        t_check,
        log_energy,
        log_bound,
        violated: log_energy > log_bound,
    })
}

/// Per-axis cut-offs of a box-shaped high-pass filter.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterSpec {
    rho: Vec<f64>,
}

impl FilterSpec {
    pub fn new(rho: Vec<f64>) -> Result<Self> {
        if rho.is_empty() || rho.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(Error::invalid("rho", "cut-offs must be positive and finite"));
        }
        Ok(Self { rho })
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    /// `min_j ρ_j`, the radius of the largest ball inside the removed box.
    pub fn ball_radius(&self) -> f64 {
        self.rho.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Removes every Fourier mode with `|ξ_j| < ρ_j` for all `j`.
pub fn high_pass_apply(f: &GridField, spec: &FilterSpec) -> Result<GridField> {
    if spec.rho.len() != f.dim() {
        return Err(Error::ShapeMismatch(format!("{} cut-offs for a {}-dimensional field", spec.rho.len(), f.dim())));
    }
    let mut s = dft_forward(f);
    for flat in 0..s.coeffs().len() {
        let xi = s.xi(flat);
        if xi.iter().zip(&spec.rho).all(|(x, r)| x.abs() < *r) {
            s.coeffs_mut()[flat] = num_complex::Complex64::new(0.0, 0.0);
        }
    }
    dft_inverse(&s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SandwichReport {
    /// `q + n/2`.
    pub exponent: f64,
    /// `min_t E(t) (1+t)^p`.
    pub c1: f64,
    /// `max_t E(t) (C3+t)^p`, so the upper bound holds at every sample.
    pub c2: f64,
    pub c3: f64,
    pub slope: f64,
    pub trace: EnergyTrace,
    pub pass: bool,
}

impl SandwichReport {
    pub fn lower(&self, t: f64) -> f64 {
        self.c1 * (1.0 + t).powf(-self.exponent)
    }

    pub fn upper(&self, t: f64) -> f64 {
        self.c2 * (self.c3 + t).powf(-self.exponent)
    }
}

/// Relative slope tolerance in [`decay_sandwich_check`].
pub const SANDWICH_SLOPE_TOL: f64 = 0.05;

/// Samples per window in [`decay_sandwich_check`].
pub const SANDWICH_SAMPLES: usize = 60;

/// Fits `C1 (1+t)^{−p} ≤ E(t) ≤ C2 (C3+t)^{−p}`, `p = q + n/2`, on a log grid.
pub fn decay_sandwich_check(
    p: &RadialSpectralProfile,
    q: f64,
    window: [f64; 2],
    spec: &ProbeSpec,
) -> Result<SandwichReport> {
    let [lo, hi] = window;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::invalid("window", format!("need 0 < lo < hi, got [{lo}, {hi}]")));
    }
    let qs = &spec.quadrature;
    if radial_energy(p, qs)? == 0.0 {
        return Err(Error::Degenerate("zero profile has no decay rate".into()));
    }
    let verdict = decay_indicator(p, q, spec)?.verdict();
    if !matches!(verdict, LimitVerdict::Finite(_)) {
        return Err(Error::Precondition(format!("decay indicator at q = {q} is {verdict}, not finite")));
    }
    let exponent = q + p.dim() as f64 / 2.0;
    let trace = heat_trace(p, &log_grid(lo, hi, SANDWICH_SAMPLES), qs)?;
    if trace.values().contains(&0.0) {
        return Err(Error::Degenerate("energy underflowed inside the window".into()));
    }
    let c1 = trace
        .iter()
        .map(|(t, e)| e * (1.0 + t).powf(exponent))
        .fold(f64::INFINITY, f64::min);
    let c3 = fit_shift(&trace, exponent);
    let c2 = trace
        .iter()
        .map(|(t, e)| e * (c3 + t).powf(exponent))
        .fold(0.0, f64::max);
    let slope = loglog_slope(&trace, window)?;
    let positive = |v: f64| v.is_finite() && v > 0.0;
    let pass = positive(c1) && positive(c2) && (slope + exponent).abs() <= SANDWICH_SLOPE_TOL * exponent.abs();
    Ok(SandwichReport {
        exponent,
        c1,
        c2,
        c3,
        slope,
        trace,
        pass,
    })
}

/// Least-squares `C3 ≥ 1` for `ln E ≈ ln C2 − p ln(C3 + t)`.
fn fit_shift(trace: &EnergyTrace, p: f64) -> f64 {
    let rss = |log_c3: f64| {
        let c3 = log_c3.exp();
        let r: Vec<f64> = trace.iter().map(|(t, e)| e.ln() + p * (c3 + t).ln()).collect();
        let mean = r.iter().sum::<f64>() / r.len() as f64;
        r.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
    };
    let (lo, hi) = (0.0, 16.0);
    let steps = 64;
    let best = (0..=steps)
        .map(|i| lo + (hi - lo) * i as f64 / steps as f64)
        .min_by(|a, b| rss(*a).total_cmp(&rss(*b)))
        .expect("nonempty grid");
    let h = (hi - lo) / steps as f64;
    let (mut a, mut b) = ((best - h).max(lo), (best + h).min(hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if rss(x1) <= rss(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    (0.5 * (a + b)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NorateWitness {
    pub alpha: f64,
    /// `E(T)/E(0)` by quadrature.
    pub ratio: f64,
    /// The same ratio in closed form, `(1 + 2α²T)^{−n/2}`.
    pub closed_form_ratio: f64,
}

/// Gaussian datum of energy `β` that keeps the fraction `1 − ε` of its energy
/// up to time `T`: `α² = ((1−ε)^{−2/n} − 1) / (2T)`.
///
/// The ratio is the energy ratio `E(T)/E(0)`.
pub fn norate_witness(t: f64, eps: f64, beta: f64, n: usize, q: &QuadratureSpec) -> Result<NorateWitness> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::invalid("T", format!("must be positive, got {t}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid("eps", format!("must lie in (0, 1), got {eps}")));
    }
    let alpha2 = ((1.0 - eps).powf(-2.0 / n as f64) - 1.0) / (2.0 * t);
    let g = GaussianFamily::new(beta, alpha2.sqrt(), n)?;
    let ratio = heat_energy(&g.profile(), t, q)? / beta;
    Ok(NorateWitness {
        alpha: g.alpha,
        ratio,
        closed_form_ratio: g.heat_energy(t) / beta,
    })
}

/// Predicted decay exponent of `‖u(t)‖₂` under `(−Δ)^a` diffusion for data
/// with `|û₀(ξ)| ≤ C|ξ|^k` near the origin: `(n + 2k) / (4a)`.
pub fn fourier_splitting_rate(n: usize, k: f64, a: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("n", "dimension must be at least 1"));
    }
    if !(k >= 0.0 && k.is_finite()) {
        return Err(Error::invalid("k", format!("must be nonnegative, got {k}")));
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::invalid("a", format!("diffusion order must be positive, got {a}")));
    }
    Ok((n as f64 + 2.0 * k) / (4.0 * a))
}

/// `∫ e^{−2|ξ|^{2a} t} |û₀|² dξ`, the energy under `(−Δ)^a` diffusion.
pub fn fractional_heat_energy(p: &RadialSpectralProfile, t: f64, a: f64, q: &QuadratureSpec) -> Result<f64> {
    if !(t >= 0.0 && a > 0.0) {
        return Err(Error::invalid("t", format!("need t >= 0 and a > 0, got t = {t}, a = {a}")));
    }
    p.radial_moment_at_scale(|r| (-2.0 * r.powf(2.0 * a) * t).exp(), t.powf(-0.5 / a), q)
}

/// Default neighbourhood `|ξ| ≤ 1/4` for measuring `sup |û₀|/|ξ|^k`.
pub const SPLITTING_RADIUS: f64 = 0.25;

/// `sup_{0<r≤radius} |û₀|(r) / r^k` over `samples` log-spaced radii.
pub fn low_frequency_constant(p: &RadialSpectralProfile, k: f64, radius: f64, samples: usize) -> f64 {
    log_grid(radius * 1e-6, radius, samples.max(2))
        .into_iter()
        .map(|r| p.magnitude(r) / r.powf(k))
        .fold(0.0, f64::max)
}

/// Relative slack of the energy inequality in [`energy_inequality_check`].
pub const ENERGY_INEQUALITY_SLACK: f64 = 0.02;

/// Worst value of `(dE/dt + C D) / (C D)` over interior samples, with `dE/dt`
/// by central differences. Nonpositive means the inequality holds exactly;
/// `∞` flags growth without dissipation.
pub fn energy_inequality_excess(tr: &EnergyTrace, diss: &[f64], c: f64) -> Result<f64> {
    if diss.len() != tr.len() {
        return Err(Error::ShapeMismatch(format!("{} dissipation samples for {} trace samples", diss.len(), tr.len())));
    }
    if tr.len() < 3 {
        return Err(Error::Degenerate("need at least three samples".into()));
    }
    if !(c > 0.0) {
        return Err(Error::invalid("C", format!("must be positive, got {c}")));
    }
    let (t, e) = (tr.times(), tr.values());
    let mut worst = f64::NEG_INFINITY;
    for i in 1..tr.len() - 1 {
        let de = (e[i + 1] - e[i - 1]) / (t[i + 1] - t[i - 1]);
        let cd = c * diss[i];
        let excess = de + cd;
        let rel = if cd > 0.0 {
            excess / cd
        } else if excess > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        worst = worst.max(rel);
    }
    Ok(worst)
}

/// `dE/dt ≤ −C D` at every interior sample, up to 2% of `C D`.
pub fn energy_inequality_check(tr: &EnergyTrace, diss: &[f64], c: f64) -> Result<bool> {
    Ok(energy_inequality_excess(tr, diss, c)? <= ENERGY_INEQUALITY_SLACK)
}
