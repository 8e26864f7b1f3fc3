//! Decay indicator, decay character and the Riesz-potential limit.
//!
//! For data `u₀ ∈ L²(R^n)` and `q > −n/2` the decay indicator is
//!
//! ```text
//! P_q(u₀) = lim_{ρ→0} ρ^{−2q−n} ∫_{B(ρ)} |û₀(ξ)|² dξ,
//! ```
//!
//! and there is at most one `q*` with `0 < P_{q*} < ∞`. Below it the limit is
//! zero, above it infinite. The heat energy then decays exactly like
//! `(1+t)^{−(q*+n/2)}`.
//!
//! Degenerate labels follow the decay-consistent convention: `q* = +∞` when
//! `P_q = 0` for every `q` (faster than any polynomial, e.g. high-pass data)
//! and `q* = −n/2` when `P_q = ∞` for every `q`. The opposite assignment also
//! appears in the literature and does not match the decay statements.
//!
//! Limits are probed numerically along `ρ_j = 2^{−j}`. The coarse
//! [`LimitVerdict`] is complemented by a log-log `trend` of the probe values,
//! which is what bisection for `q*` relies on near the crossing.

use std::fmt;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spectral::fit::least_squares;
use crate::spectral::profile::{sphere_area, RadialSpectralProfile};
use crate::spectral::quadrature::{integrate_to_infinity, QuadratureSpec};

/// Geometric probe sequence and classification thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSpec {
    /// `ρ_j = 2^{−j}` for `j` in this inclusive range.
    pub first_exponent: i32,
    pub last_exponent: i32,
    /// Relative spread of the last three values accepted as convergence.
    pub finite_tol: f64,
    /// `last < zero_ratio · first` counts as a vanishing limit.
    pub zero_ratio: f64,
    /// `last / third-last ≥ growth` counts as divergence.
    pub growth: f64,
    /// Number of trailing points in the trend fit.
    pub trend_points: usize,
    /// RMS residual of the trend fit beyond which the probe is unusable.
    pub max_trend_residual: f64,
    pub quadrature: QuadratureSpec,
}

impl Default for ProbeSpec {
    fn default() -> Self {
        Self {
            first_exponent: 3,
            last_exponent: 20,
            finite_tol: 0.05,
            zero_ratio: 1e-8,
            growth: 4.0,
            trend_points: 6,
            max_trend_residual: 0.25,
            quadrature: QuadratureSpec::default(),
        }
    }
}

impl ProbeSpec {
    pub fn validate(&self) -> Result<()> {
        if self.last_exponent < self.first_exponent + 2 {
            return Err(Error::invalid("last_exponent", "need at least three probe radii"));
        }
        if !(self.finite_tol > 0.0) {
            return Err(Error::invalid("finite_tol", "must be positive"));
        }
        if !(self.zero_ratio > 0.0 && self.zero_ratio < 1.0) {
            return Err(Error::invalid("zero_ratio", "must lie in (0, 1)"));
        }
        if !(self.growth > 1.0) {
            return Err(Error::invalid("growth", "must exceed 1"));
        }
        if self.trend_points < 3 {
            return Err(Error::invalid("trend_points", "need at least three points"));
        }
        self.quadrature.validate()
    }

    pub fn rhos(&self) -> Vec<f64> {
        (self.first_exponent..=self.last_exponent).map(|j| 2f64.powi(-j)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitVerdict {
    Zero,
    Finite(f64),
    Infinite,
    Inconclusive,
}

impl fmt::Display for LimitVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LimitVerdict::Zero => f.write_str("zero"),
            LimitVerdict::Finite(c) => write!(f, "finite({c:e})"),
            LimitVerdict::Infinite => f.write_str("infinite"),
            LimitVerdict::Inconclusive => f.write_str("inconclusive"),
        }
    }
}

/// `(ρ, value)` samples approaching `ρ = 0` and their classified limit.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitProbe {
    rho_values: Vec<f64>,
    values: Vec<f64>,
    verdict: LimitVerdict,
    tolerance: f64,
    /// Slope of `ln value` against `ln ρ` over the trailing points; absent when
    /// a trailing value is zero or not finite.
    trend: Option<f64>,
    trend_residual: f64,
}

impl LimitProbe {
    /// Classifies `values` sampled at strictly decreasing `rho_values`.
    pub fn classify(rho_values: Vec<f64>, values: Vec<f64>, spec: &ProbeSpec) -> Result<Self> {
        if rho_values.len() != values.len() || rho_values.len() < 3 {
            return Err(Error::ShapeMismatch(format!(
                "{} radii and {} values; need at least three pairs",
                rho_values.len(),
                values.len()
            )));
        }
        if rho_values.iter().any(|r| !(*r > 0.0)) || rho_values.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::invalid("rho_values", "radii must be positive and strictly decreasing"));
        }
        if values.iter().any(|v| *v < 0.0) {
            return Err(Error::invalid("values", "probe values must be nonnegative"));
        }
        let (trend, trend_residual) = trend_fit(&rho_values, &values, spec.trend_points);
        let verdict = verdict(&values, spec);
        Ok(Self {
            rho_values,
            values,
            verdict,
            tolerance: spec.finite_tol,
            trend,
            trend_residual,
        })
    }

    pub fn rho_values(&self) -> &[f64] {
        &self.rho_values
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn verdict(&self) -> LimitVerdict {
        self.verdict
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn trend(&self) -> Option<f64> {
        self.trend
    }

    pub fn trend_residual(&self) -> f64 {
        self.trend_residual
    }

    pub fn finite_value(&self) -> Option<f64> {
        match self.verdict {
            LimitVerdict::Finite(c) => Some(c),
            _ => None,
        }
    }

    /// CSV with header `rho,value,verdict`; the verdict is repeated per row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let fmt_err = |e: csv::Error| Error::Format(e.to_string());
        w.write_record(["rho", "value", "verdict"]).map_err(fmt_err)?;
        let verdict = self.verdict.to_string();
        for (r, v) in self.rho_values.iter().zip(&self.values) {
            w.write_record([r.to_string(), v.to_string(), verdict.clone()]).map_err(fmt_err)?;
        }
        w.flush().map_err(|e| Error::Format(e.to_string()))
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

fn verdict(values: &[f64], spec: &ProbeSpec) -> LimitVerdict {
    let n = values.len();
    let first = values[0];
    let last = values[n - 1];
    if values.iter().any(|v| v.is_nan()) {
        return LimitVerdict::Inconclusive;
    }
    if last.is_infinite() {
        return LimitVerdict::Infinite;
    }
    if values.iter().all(|&v| v == 0.0) || (first.is_finite() && last < spec.zero_ratio * first) {
        return LimitVerdict::Zero;
    }
    let tail = &values[n - 3..];
    if last > 0.0 && tail.iter().all(|v| (v - last).abs() <= spec.finite_tol * last) {
        return LimitVerdict::Finite(last);
    }
    if tail[0] > 0.0 && last / tail[0] >= spec.growth {
        return LimitVerdict::Infinite;
    }
    LimitVerdict::Inconclusive
}

fn trend_fit(rho: &[f64], values: &[f64], points: usize) -> (Option<f64>, f64) {
    let k = points.min(rho.len());
    let tail_r = &rho[rho.len() - k..];
    let tail_v = &values[values.len() - k..];
    if tail_v.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return (None, 0.0);
    }
    let x: Vec<f64> = tail_r.iter().map(|r| r.ln()).collect();
    let y: Vec<f64> = tail_v.iter().map(|v| v.ln()).collect();
    match least_squares(&x, &y) {
        Ok((slope, icpt)) => {
            let rms = (x.iter().zip(&y).map(|(a, b)| (b - slope * a - icpt).powi(2)).sum::<f64>() / k as f64).sqrt();
            (Some(slope), rms)
        }
        Err(_) => (None, 0.0),
    }
}

/// Ball masses `∫_{B(ρ)} |û₀|²` along the probe radii. They do not depend on
/// `q`, so one set serves every indicator query.
pub fn probe_ball_masses(p: &RadialSpectralProfile, spec: &ProbeSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    spec.rhos()
        .par_iter()
        .map(|&rho| p.radial_moment(|_| 1.0, 0.0, rho, &spec.quadrature))
        .collect()
}

fn indicator_from_masses(n: usize, q: f64, masses: &[f64], spec: &ProbeSpec) -> Result<LimitProbe> {
    let rhos = spec.rhos();
    let e = 2.0 * q + n as f64;
    let values = rhos.iter().zip(masses).map(|(r, m)| if *m == 0.0 { 0.0 } else { m * r.powf(-e) }).collect();
    LimitProbe::classify(rhos, values, spec)
}

fn check_q(n: usize, q: f64) -> Result<()> {
    if !(q > -(n as f64) / 2.0) || q.is_nan() {
        return Err(Error::invalid("q", format!("need q > -n/2 = {}, got {q}", -(n as f64) / 2.0)));
    }
    Ok(())
}

/// Probes `ρ^{−2q−n} ∫_{B(ρ)} |û₀|²` as `ρ → 0`.
pub fn decay_indicator(p: &RadialSpectralProfile, q: f64, spec: &ProbeSpec) -> Result<LimitProbe> {
    check_q(p.dim(), q)?;
    let masses = probe_ball_masses(p, spec)?;
    indicator_from_masses(p.dim(), q, &masses, spec)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QStar {
    Finite(f64),
    /// `P_q = ∞` for every probed `q`.
    NegHalfN,
    /// `P_q = 0` for every probed `q`.
    PlusInfinity,
}

impl QStar {
    /// `q*` as an extended real for dimension `n`.
    pub fn value(&self, n: usize) -> f64 {
        match *self {
            QStar::Finite(q) => q,
            QStar::NegHalfN => -(n as f64) / 2.0,
            QStar::PlusInfinity => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayCharacterEstimate {
    pub q_star: QStar,
    /// Final bisection bracket; present when `q_star` is finite.
    pub bracket: Option<(f64, f64)>,
    /// `P_{q*}` when the probe at the estimate converged.
    pub p_at_q_star: Option<f64>,
}

/// Search range and resolution for [`decay_character_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterSearch {
    pub resolution: f64,
    pub q_max: f64,
    pub probe: ProbeSpec,
}

impl CharacterSearch {
    pub fn new(resolution: f64) -> Self {
        Self {
            resolution,
            q_max: 6.0,
            probe: ProbeSpec::default(),
        }
    }
}

/// Which side of `q*` a probe at `q` lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Below,
    Above,
}

fn side(q: f64, probe: &LimitProbe, spec: &ProbeSpec) -> Result<Side> {
    match probe.verdict() {
        LimitVerdict::Zero => return Ok(Side::Below),
        LimitVerdict::Infinite => return Ok(Side::Above),
        _ => {}
    }
    match probe.trend() {
        Some(t) if probe.trend_residual() <= spec.max_trend_residual => Ok(if t > 0.0 { Side::Below } else { Side::Above }),
        _ => Err(Error::InconclusiveProbe {
            q,
            probe: Box::new(probe.clone()),
        }),
    }
}

pub fn decay_character_estimate(p: &RadialSpectralProfile, resolution: f64) -> Result<DecayCharacterEstimate> {
    decay_character_with(p, &CharacterSearch::new(resolution))
}

/// Bisection for the unique sign change of the indicator over `(−n/2, q_max]`.
pub fn decay_character_with(p: &RadialSpectralProfile, search: &CharacterSearch) -> Result<DecayCharacterEstimate> {
    if !(search.resolution > 0.0 && search.resolution.is_finite()) {
        return Err(Error::invalid("resolution", format!("must be positive, got {}", search.resolution)));
    }
    let n = p.dim();
    let spec = &search.probe;
    let masses = probe_ball_masses(p, spec)?;
    let probe_at = |q: f64| indicator_from_masses(n, q, &masses, spec);

    let mut lo = -(n as f64) / 2.0 + search.resolution / 4.0;
    let mut hi = search.q_max;
    if hi <= lo {
        return Err(Error::invalid("q_max", format!("must exceed -n/2 + resolution/4 = {lo}")));
    }
    if side(hi, &probe_at(hi)?, spec)? == Side::Below {
        return Ok(DecayCharacterEstimate {
            q_star: QStar::PlusInfinity,
            bracket: None,
            p_at_q_star: None,
        });
    }
    if side(lo, &probe_at(lo)?, spec)? == Side::Above {
        return Ok(DecayCharacterEstimate {
            q_star: QStar::NegHalfN,
            bracket: None,
            p_at_q_star: None,
        });
    }
    while hi - lo > search.resolution {
        let mid = 0.5 * (lo + hi);
        match side(mid, &probe_at(mid)?, spec)? {
            Side::Below => lo = mid,
            Side::Above => hi = mid,
        }
    }
    let q_star = 0.5 * (lo + hi);
    Ok(DecayCharacterEstimate {
        q_star: QStar::Finite(q_star),
        bracket: Some((lo, hi)),
        p_at_q_star: probe_at(q_star)?.finite_value(),
    })
}

/// Probes `|û₀|²(ρ) / ρ^β` as `ρ → 0`.
pub fn riesz_limit(p: &RadialSpectralProfile, beta: f64, spec: &ProbeSpec) -> Result<LimitProbe> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::invalid("beta", format!("must be nonnegative, got {beta}")));
    }
    spec.validate()?;
    let rhos = spec.rhos();
    let values = rhos
        .iter()
        .map(|&r| {
            let m = p.magnitude(r);
            if m == 0.0 {
                0.0
            } else {
                m * m * r.powf(-beta)
            }
        })
        .collect();
    LimitProbe::classify(rhos, values, spec)
}

/// `μ_q`, the indicator of `|ξ|^q` itself: `|S^{n−1}| / (n + 2q)`.
pub fn power_indicator(n: usize, q: f64) -> Result<f64> {
    check_q(n, q)?;
    Ok(sphere_area(n)? / (n as f64 + 2.0 * q))
}

/// `∫_{R^n} e^{−2|η|²} |η|^β dη`, the constant in the Riesz decay bound.
pub fn riesz_constant(n: usize, beta: f64, q: &QuadratureSpec) -> Result<f64> {
    let nm1 = n as f64 - 1.0;
    let radial = integrate_to_infinity(|r: f64| (-2.0 * r * r).exp() * r.powf(beta + nm1), 0.0, q)?.value;
    Ok(sphere_area(n)? * radial)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RieszReport {
    pub beta: f64,
    /// `A_β`, the Riesz limit.
    pub a_beta: f64,
    /// The calibrated constant `∫ e^{−2|η|²}|η|^β dη`.
    pub constant: f64,
    pub bound: f64,
    /// `(t, t^{(n+β)/2} E(t))`.
    pub scaled: Vec<(f64, f64)>,
    pub sup_scaled: f64,
    pub bound_ok: bool,
}

/// Slack on the bound in [`riesz_decay_check`].
pub const RIESZ_SLACK: f64 = 0.05;

/// Checks `t^{(n+β)/2} ‖u(t)‖₂² ≤ C A_β` at the given times.
///
/// Substituting `η = √t ξ` in `∫ e^{−2|ξ|²t} |û₀|² dξ` with
/// `|û₀|² ≈ A_β |ξ|^β` gives exactly this scaling.
pub fn riesz_decay_check(
    p: &RadialSpectralProfile,
    beta: f64,
    times: &[f64],
    spec: &ProbeSpec,
) -> Result<RieszReport> {
    if times.is_empty() || times.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(Error::invalid("times", "need at least one positive finite time"));
    }
    let a_beta = match riesz_limit(p, beta, spec)?.verdict() {
        LimitVerdict::Finite(a) => a,
        LimitVerdict::Zero => 0.0,
        other => {
            return Err(Error::Precondition(format!(
                "Riesz limit of `{}` at beta = {beta} is {other}",
                p.label()
            )))
        }
    };
    let n = p.dim() as f64;
    let constant = riesz_constant(p.dim(), beta, &spec.quadrature)?;
    let bound = constant * a_beta;
    let scaled = times
        .par_iter()
        .map(|&t| {
            crate::spectral::profile::heat_energy(p, t, &spec.quadrature).map(|e| (t, t.powf(0.5 * (n + beta)) * e))
        })
        .collect::<Result<Vec<_>>>()?;
    let sup_scaled = scaled.iter().fold(0.0_f64, |m, &(_, v)| m.max(v));
    Ok(RieszReport {
        beta,
        a_beta,
        constant,
        bound,
        scaled,
        sup_scaled,
        bound_ok: sup_scaled <= bound * (1.0 + RIESZ_SLACK),
    })
}
