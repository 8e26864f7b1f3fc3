//! Radially symmetric frequency-space data on `R^n`.

use std::fmt;
use std::sync::Arc;

use super::quadrature::{integrate, integrate_to_infinity, QuadratureSpec};
use crate::error::{Error, Result};

/// Surface measure of the unit sphere `S^{n-1} ⊂ R^n`, `2 π^{n/2} / Γ(n/2)`.
pub fn sphere_area(n: usize) -> Result<f64> {
    use std::f64::consts::PI;
    if n == 0 {
        return Err(Error::invalid("n", "dimension must be at least 1"));
    }
    // Γ(n/2) by the half-integer recurrence, seeded with Γ(1) = 1 and Γ(1/2) = √π.
    let mut gamma = if n.is_multiple_of(2) { 1.0 } else { PI.sqrt() };
    let mut x = if n.is_multiple_of(2) { 1.0 } else { 0.5 };
    let target = n as f64 / 2.0;
    while x < target {
        gamma *= x;
        x += 1.0;
    }
    Ok(2.0 * PI.powf(target) / gamma)
}

/// How the profile behaves beyond `radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailDecay {
    /// The magnitude vanishes identically for `r > radius`.
    Vanishing,
    /// Bounded by a multiple of `exp(-rate r²)`.
    Gaussian { rate: f64 },
    /// Bounded by a multiple of `r^{-exponent}`.
    Power { exponent: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBound {
    pub radius: f64,
    pub decay: TailDecay,
}

type Magnitude = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Whole-space datum described by the radial magnitude `r ↦ |û₀|(r)` of its
/// Fourier transform, normalised so that `‖u₀‖₂² = |S^{n-1}| ∫₀^∞ |û₀|²(r) r^{n-1} dr`.
///
/// Non-radial data enters through its spherical average.
#[derive(Clone)]
pub struct RadialSpectralProfile {
    n: usize,
    magnitude: Magnitude,
    tail: Option<TailBound>,
    support_lower: Option<f64>,
    label: String,
}

impl fmt::Debug for RadialSpectralProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialSpectralProfile")
            .field("label", &self.label)
            .field("n", &self.n)
            .field("tail", &self.tail)
            .field("support_lower", &self.support_lower)
            .finish()
    }
}

impl RadialSpectralProfile {
    pub fn new<F>(n: usize, magnitude: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if n == 0 {
            return Err(Error::invalid("n", "dimension must be at least 1"));
        }
        Ok(Self {
            n,
            magnitude: Arc::new(magnitude),
            tail: None,
            support_lower: None,
            label: "custom".into(),
        })
    }

    /// The identically zero datum.
    pub fn zero(n: usize) -> Result<Self> {
        Ok(Self::new(n, |_| 0.0)?
            .with_tail(TailBound { radius: 0.0, decay: TailDecay::Vanishing })?
            .with_label("zero"))
    }

    /// `|û₀|(r) = r^{q0}` on `[0, cutoff]` and zero beyond.
    pub fn power_cutoff(n: usize, q0: f64, cutoff: f64) -> Result<Self> {
        if !(2.0 * q0 + n as f64 > 0.0) {
            return Err(Error::invalid("q0", format!("need 2 q0 + n > 0 for finite energy, got q0 = {q0}")));
        }
        if !(cutoff > 0.0 && cutoff.is_finite()) {
            return Err(Error::invalid("cutoff", "must be positive and finite"));
        }
        Ok(Self::new(n, move |r| if r <= cutoff { r.powf(q0) } else { 0.0 })?
            .with_tail(TailBound { radius: cutoff, decay: TailDecay::Vanishing })?
            .with_label(format!("power_cutoff(q0={q0}, cutoff={cutoff})")))
    }

    /// Indicator of the annulus `lower <= r <= upper`.
    pub fn annulus(n: usize, lower: f64, upper: f64) -> Result<Self> {
        if !(lower >= 0.0 && upper > lower && upper.is_finite()) {
            return Err(Error::invalid("annulus", format!("need 0 <= lower < upper, got [{lower}, {upper}]")));
        }
        let p = Self::new(n, move |r| if (lower..=upper).contains(&r) { 1.0 } else { 0.0 })?
            .with_tail(TailBound { radius: upper, decay: TailDecay::Vanishing })?
            .with_label(format!("annulus({lower}, {upper})"));
        if lower > 0.0 {
            p.with_support_lower(lower)
        } else {
            Ok(p)
        }
    }

    pub fn with_tail(mut self, tail: TailBound) -> Result<Self> {
        if !(tail.radius >= 0.0 && tail.radius.is_finite()) {
            return Err(Error::invalid("tail_bound", "radius must be finite and nonnegative"));
        }
        match tail.decay {
            TailDecay::Gaussian { rate } if !(rate > 0.0) => {
                return Err(Error::invalid("tail_bound", "gaussian rate must be positive"));
            }
            // |û|² r^{n-1} ~ r^{n-1-2p} must be integrable at infinity.
            TailDecay::Power { exponent } if !(2.0 * exponent > self.n as f64) => {
                return Err(Error::invalid(
                    "tail_bound",
                    format!("power tail r^-{exponent} has infinite energy in dimension {}", self.n),
                ));
            }
            _ => {}
        }
        self.tail = Some(tail);
        Ok(self)
    }

    /// Declares `|û₀|(r) = 0` for `r < rho0`.
    pub fn with_support_lower(mut self, rho0: f64) -> Result<Self> {
        if !(rho0 >= 0.0 && rho0.is_finite()) {
            return Err(Error::invalid("support_lower", "must be finite and nonnegative"));
        }
        self.support_lower = (rho0 > 0.0).then_some(rho0);
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn tail(&self) -> Option<TailBound> {
        self.tail
    }

    pub fn support_lower(&self) -> Option<f64> {
        self.support_lower
    }

    /// `|û₀|(r)`, forced to zero below the declared support.
    pub fn magnitude(&self, r: f64) -> f64 {
        if let Some(rho0) = self.support_lower {
            if r < rho0 {
                return 0.0;
            }
        }
        if let Some(TailBound { radius, decay: TailDecay::Vanishing }) = self.tail {
            if r > radius {
                return 0.0;
            }
        }
        (self.magnitude)(r)
    }

    /// Same datum with `|û₀|` multiplied pointwise by `factor(r)`.
    pub fn map_magnitude<F>(&self, factor: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let inner = self.magnitude.clone();
        Self {
            magnitude: Arc::new(move |r| inner(r) * factor(r)),
            ..self.clone()
        }
    }

    /// [`Self::radial_moment`] over `[0, ∞)` for a weight concentrated near radius
    /// `scale`; the range is cut geometrically around `scale` so the adaptive
    /// rule cannot step over a narrow peak.
    pub fn radial_moment_at_scale<W>(&self, weight: W, scale: f64, q: &QuadratureSpec) -> Result<f64>
    where
        W: Fn(f64) -> f64,
    {
        if !(scale > 0.0 && scale.is_finite()) {
            return self.radial_moment(weight, 0.0, f64::INFINITY, q);
        }
        let mut cuts = vec![0.0];
        cuts.extend((-4..=4).map(|k| scale * 4f64.powi(k)));
        cuts.push(f64::INFINITY);
        cuts.windows(2).map(|w| self.radial_moment(&weight, w[0], w[1], q)).sum()
    }

    /// `|S^{n-1}| ∫_lower^upper weight(r) |û₀|²(r) r^{n-1} dr`; `upper` may be infinite.
    pub fn radial_moment<W>(&self, weight: W, lower: f64, upper: f64, q: &QuadratureSpec) -> Result<f64>
    where
        W: Fn(f64) -> f64,
    {
        if !(lower >= 0.0) || upper.is_nan() {
            return Err(Error::invalid("bounds", format!("need 0 <= lower, got [{lower}, {upper}]")));
        }
        let mut lower = lower;
        if let Some(rho0) = self.support_lower {
            lower = lower.max(rho0);
        }
        let mut upper = upper;
        let mut tail_start = None;
        match self.tail {
            Some(TailBound { radius, decay: TailDecay::Vanishing }) => upper = upper.min(radius),
            Some(TailBound { radius, .. }) => tail_start = Some(radius),
            None => {}
        }
        if upper <= lower {
            return Ok(0.0);
        }
        let nm1 = (self.n - 1) as i32;
        let integrand = |r: f64| {
            let m = self.magnitude(r);
            if m == 0.0 {
                return 0.0;
            }
            weight(r) * m * m * r.powi(nm1)
        };
        let value = if upper.is_finite() {
            integrate(integrand, lower, upper, q)?.value
        } else {
            // Finite core up to the tail radius (or 1), mapped tail beyond.
            let split = tail_start.unwrap_or(1.0).max(lower);
            let core = if split > lower { integrate(integrand, lower, split, q)?.value } else { 0.0 };
            core + integrate_to_infinity(integrand, split, q)?.value
        };
        Ok(sphere_area(self.n)? * value)
    }
}

/// `‖u₀‖₂²`.
pub fn radial_energy(p: &RadialSpectralProfile, q: &QuadratureSpec) -> Result<f64> {
    p.radial_moment(|_| 1.0, 0.0, f64::INFINITY, q)
}

/// `‖∇u₀‖₂² = ∫ |ξ|² |û₀|² dξ`.
pub fn gradient_energy(p: &RadialSpectralProfile, q: &QuadratureSpec) -> Result<f64> {
    p.radial_moment(|r| r * r, 0.0, f64::INFINITY, q)
}

/// Energy in the closed frequency ball `|ξ| <= k`.
pub fn low_ball_mass(p: &RadialSpectralProfile, k: f64, q: &QuadratureSpec) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::invalid("K", format!("ball radius must be positive, got {k}")));
    }
    p.radial_moment(|_| 1.0, 0.0, k, q)
}

/// Energy of the exact heat evolution, `∫ e^{-2|ξ|² t} |û₀|² dξ`.
pub fn heat_energy(p: &RadialSpectralProfile, t: f64, q: &QuadratureSpec) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::invalid("t", format!("time must be finite and nonnegative, got {t}")));
    }
    if t == 0.0 {
        return radial_energy(p, q);
    }
    p.radial_moment_at_scale(|r| (-2.0 * r * r * t).exp(), t.sqrt().recip(), q)
}

/// Dissipation of the heat evolution, `‖∇u(t)‖₂² = ∫ |ξ|² e^{-2|ξ|² t} |û₀|² dξ`.
pub fn heat_dissipation(p: &RadialSpectralProfile, t: f64, q: &QuadratureSpec) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::invalid("t", format!("time must be finite and nonnegative, got {t}")));
    }
    p.radial_moment_at_scale(|r| r * r * (-2.0 * r * r * t).exp(), t.sqrt().recip(), q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn unit_disk() -> RadialSpectralProfile {
        RadialSpectralProfile::annulus(2, 0.0, 1.0).unwrap()
    }

    #[test]
    fn sphere_areas() {
        assert_eq!(sphere_area(1).unwrap(), 2.0);
        assert!((sphere_area(2).unwrap() - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3).unwrap() - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_area(4).unwrap() - 2.0 * PI * PI).abs() < 1e-13);
        assert!(sphere_area(0).is_err());
    }

    #[test]
    fn indicator_of_unit_disk() {
        let p = unit_disk();
        assert!((radial_energy(&p, &q()).unwrap() - PI).abs() < 1e-12);
        assert!((gradient_energy(&p, &q()).unwrap() - PI / 2.0).abs() < 1e-12);
        assert!((low_ball_mass(&p, 0.5, &q()).unwrap() - PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn zero_profile() {
        let p = RadialSpectralProfile::zero(3).unwrap();
        assert_eq!(radial_energy(&p, &q()).unwrap(), 0.0);
        assert_eq!(gradient_energy(&p, &q()).unwrap(), 0.0);
        assert_eq!(heat_energy(&p, 5.0, &q()).unwrap(), 0.0);
    }

    #[test]
    fn support_lower_excludes_small_balls() {
        let p = RadialSpectralProfile::annulus(2, 0.5, 2.0).unwrap();
        assert_eq!(low_ball_mass(&p, 0.5, &q()).unwrap(), 0.0);
        assert_eq!(low_ball_mass(&p, 0.25, &q()).unwrap(), 0.0);
        assert!(low_ball_mass(&p, 0.75, &q()).unwrap() > 0.0);
    }

    #[test]
    fn heat_energy_at_zero_is_energy() {
        let p = RadialSpectralProfile::power_cutoff(3, 0.5, 1.0).unwrap();
        assert_eq!(heat_energy(&p, 0.0, &q()).unwrap(), radial_energy(&p, &q()).unwrap());
    }

    #[test]
    fn power_cutoff_energy() {
        // |S^{n-1}| / (2 q0 + n)
        for (n, q0) in [(1, -0.4), (2, 0.0), (3, 2.0)] {
            let p = RadialSpectralProfile::power_cutoff(n, q0, 1.0).unwrap();
            let expect = sphere_area(n).unwrap() / (2.0 * q0 + n as f64);
            let got = radial_energy(&p, &q()).unwrap();
            assert!((got - expect).abs() < 1e-10 * expect, "n={n} q0={q0}: {got} vs {expect}");
        }
        assert!(RadialSpectralProfile::power_cutoff(1, -0.5, 1.0).is_err());
    }

    #[test]
    fn infinite_energy_tail_fails() {
        let p = RadialSpectralProfile::new(2, |r: f64| 1.0 / (1.0 + r)).unwrap();
        let spec = QuadratureSpec::new(1e-10, 1e-300, 400).unwrap();
        assert!(matches!(radial_energy(&p, &spec), Err(Error::Quadrature { .. })));
        assert!(p
            .clone()
            .with_tail(TailBound { radius: 1.0, decay: TailDecay::Power { exponent: 1.0 } })
            .is_err());
    }
}
