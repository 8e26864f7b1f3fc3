//! Poincaré-type inequalities on the whole space.
//!
//! There is no Poincaré inequality on `R^n`, but splitting frequency space at
//! any radius `Λ` gives
//!
//! ```text
//! ‖∇u‖₂² ≥ Λ² ∫ |û|² dξ − ∫_{|ξ|≤Λ} (Λ² − |ξ|²) |û|² dξ,
//! ```
//!
//! with the ball term as the price for the missing spectral gap. The Gaussian
//! family of [`GaussianFamily`] shows that price cannot be replaced by a
//! uniform additive constant smaller than the energy itself.
//!
//! For a bounded domain with Poincaré constant `C_Ω = inf ‖∇v‖₂ / ‖v‖₂` the
//! choice `Λ = π/2R` recovers the interval inequality up to the ball term; the
//! constant itself is not computed here.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spectral::profile::{
    gradient_energy, low_ball_mass, radial_energy, sphere_area, RadialSpectralProfile, TailBound, TailDecay,
};
use crate::spectral::quadrature::QuadratureSpec;

/// `u_α` with `‖u_α‖₂² = β` and `û_α(ξ) = c e^{-|ξ|²/(2α²)}`, `c² = β / (π^{n/2} α^n)`.
///
/// In two dimensions `c = √(β/π) / α`; small `α` concentrates the datum at
/// low frequencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianFamily {
    pub beta: f64,
    pub alpha: f64,
    pub n: usize,
}

impl GaussianFamily {
    pub fn new(beta: f64, alpha: f64, n: usize) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::invalid("beta", format!("energy must be positive, got {beta}")));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::invalid("alpha", format!("scale must be positive, got {alpha}")));
        }
        if n == 0 {
            return Err(Error::invalid("n", "dimension must be at least 1"));
        }
        Ok(Self { beta, alpha, n })
    }

    /// `|û_α(0)|²`.
    pub fn peak_squared(&self) -> f64 {
        self.beta / (PI.powf(self.n as f64 / 2.0) * self.alpha.powi(self.n as i32))
    }

    pub fn profile(&self) -> RadialSpectralProfile {
        let c = self.peak_squared().sqrt();
        let inv = 1.0 / (2.0 * self.alpha * self.alpha);
        RadialSpectralProfile::new(self.n, move |r| c * (-r * r * inv).exp())
            .and_then(|p| {
                p.with_tail(TailBound {
                    radius: 4.0 * self.alpha,
                    decay: TailDecay::Gaussian { rate: inv },
                })
            })
            .expect("gaussian family parameters were validated")
            .with_label(format!("gaussian(beta={}, alpha={}, n={})", self.beta, self.alpha, self.n))
    }

    pub fn energy(&self) -> f64 {
        self.beta
    }

    /// `‖∇u_α‖₂² = (n/2) β α²`.
    pub fn gradient_energy(&self) -> f64 {
        0.5 * self.n as f64 * self.beta * self.alpha * self.alpha
    }

    /// `∫_{|ξ|≤K} |û_α|²`; closed form only in two dimensions.
    pub fn ball_mass(&self, k: f64) -> Option<f64> {
        (self.n == 2).then(|| -self.beta * (-(k * k) / (self.alpha * self.alpha)).exp_m1())
    }

    /// Exact heat energy `β (1 + 2α² t)^{-n/2}`.
    pub fn heat_energy(&self, t: f64) -> f64 {
        self.beta * (1.0 + 2.0 * self.alpha * self.alpha * t).powf(-(self.n as f64) / 2.0)
    }

    /// `lim_{ρ→0} ρ^{-n} ∫_{B(ρ)} |û_α|² = |S^{n-1}| c² / n`.
    pub fn indicator_at_zero(&self) -> f64 {
        sphere_area(self.n).expect("n >= 1") * self.peak_squared() / self.n as f64
    }
}

/// The three terms of the whole-space inequality at one cut-off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoincareReport {
    pub lambda: f64,
    /// `‖∇u‖₂²`, the left-hand side.
    pub gradient_energy: f64,
    pub total_energy: f64,
    /// `∫_{|ξ|≤Λ} |û|²`.
    pub low_ball_mass: f64,
    /// `∫_{|ξ|≤Λ} (Λ² − |ξ|²) |û|²`.
    pub ball_correction: f64,
    /// `Λ² ‖u‖₂² − ball_correction`.
    pub rhs: f64,
    /// `lhs − rhs`.
    pub slack: f64,
    pub tolerance: f64,
    pub holds: bool,
}

/// Relative slack below which a violation is attributed to quadrature.
pub const POINCARE_REL_TOL: f64 = 1e-10;

pub fn modified_poincare_check(p: &RadialSpectralProfile, lambda: f64, q: &QuadratureSpec) -> Result<PoincareReport> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::invalid("Lambda", format!("cut-off must be positive, got {lambda}")));
    }
    let l2 = lambda * lambda;
    // Each integral is split at Λ so that the rule resolves the same kink.
    let energy_in = p.radial_moment(|_| 1.0, 0.0, lambda, q)?;
    let energy_out = p.radial_moment(|_| 1.0, lambda, f64::INFINITY, q)?;
    let grad_in = p.radial_moment(|r| r * r, 0.0, lambda, q)?;
    let grad_out = p.radial_moment(|r| r * r, lambda, f64::INFINITY, q)?;
    let ball_correction = p.radial_moment(|r| l2 - r * r, 0.0, lambda, q)?;

    let gradient_energy = grad_in + grad_out;
    let total_energy = energy_in + energy_out;
    let rhs = l2 * total_energy - ball_correction;
    let slack = gradient_energy - rhs;
    let tolerance = POINCARE_REL_TOL * gradient_energy;
    Ok(PoincareReport {
        lambda,
        gradient_energy,
        total_energy,
        low_ball_mass: energy_in,
        ball_correction,
        rhs,
        slack,
        tolerance,
        holds: slack >= -tolerance,
    })
}

/// One member of the optimality argument, in closed form for `n = 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalityProbe {
    pub alpha: f64,
    /// Smallest `μ` with `β ≤ K^{-2}‖∇u_α‖₂² + μ`.
    pub mu_required: f64,
    /// `β (1 − e^{-K²/α²})`.
    pub ball_mass: f64,
    /// `β α² / K²`.
    pub gradient_term: f64,
}

pub fn optimality_probe(k: f64, beta: f64, alpha: f64) -> Result<OptimalityProbe> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::invalid("K", format!("must be positive, got {k}")));
    }
    let family = GaussianFamily::new(beta, alpha, 2)?;
    let gradient_term = family.gradient_energy() / (k * k);
    Ok(OptimalityProbe {
        alpha,
        mu_required: (beta - gradient_term).max(0.0),
        ball_mass: family.ball_mass(k).expect("n = 2"),
        gradient_term,
    })
}

/// Supremum of `mu_required` over the given scales, with the probes.
pub fn optimality_sweep(k: f64, beta: f64, alphas: &[f64]) -> Result<(f64, Vec<OptimalityProbe>)> {
    let probes = alphas
        .iter()
        .map(|&a| optimality_probe(k, beta, a))
        .collect::<Result<Vec<_>>>()?;
    let sup = probes.iter().fold(0.0_f64, |m, p| m.max(p.mu_required));
    Ok((sup, probes))
}

/// Fraction of the energy inside `|ξ| ≤ K`: the `α` for which
/// `(1 − α) ‖u‖₂² ≤ K^{-2} ‖∇u‖₂²`.
pub fn fpi_alpha(p: &RadialSpectralProfile, k: f64, q: &QuadratureSpec) -> Result<f64> {
    let energy = radial_energy(p, q)?;
    if energy == 0.0 {
        return Err(Error::Degenerate("zero-energy profile".into()));
    }
    let alpha = low_ball_mass(p, k, q)? / energy;
    if alpha >= 1.0 {
        return Err(Error::Degenerate(format!(
            "all energy of `{}` lies in |ξ| <= {k}; choose a smaller K",
            p.label()
        )));
    }
    Ok(alpha)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FpiReport {
    pub k: f64,
    pub alpha: f64,
    pub energy: f64,
    pub gradient_energy: f64,
    /// `(1 − α) ‖u‖₂²`.
    pub lhs: f64,
    /// `K^{-2} ‖∇u‖₂²`.
    pub rhs: f64,
    pub holds: bool,
}

pub fn fpi_check(p: &RadialSpectralProfile, k: f64, q: &QuadratureSpec) -> Result<FpiReport> {
    let alpha = fpi_alpha(p, k, q)?;
    let energy = radial_energy(p, q)?;
    let grad = gradient_energy(p, q)?;
    let lhs = (1.0 - alpha) * energy;
    let rhs = grad / (k * k);
    Ok(FpiReport {
        k,
        alpha,
        energy,
        gradient_energy: grad,
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + POINCARE_REL_TOL),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonReport {
    /// Cut-off for which `M|ω| β₀^{2m−2k+n} ≤ ‖f‖₂²/2`, capped at `β_cut`.
    pub beta0: f64,
    pub source_energy: f64,
    pub energy: f64,
    pub gradient_energy: f64,
    /// Low-frequency fraction of `u` at `K = β₀` (absent for `f ≡ 0`).
    pub fpi_alpha: Option<f64>,
    /// `‖u‖₂² ≤ 2 ‖∇u‖₂²`.
    pub holds: bool,
}

/// Representative source `f̂(r) = M r^m` for `r ≤ β_cut`, continued by
/// `M β_cut^m e^{-(r − β_cut)²}`.
pub fn poisson_source(m: f64, beta_cut: f64, amplitude: f64, n: usize) -> Result<RadialSpectralProfile> {
    if !(m >= 0.0 && m.is_finite()) {
        return Err(Error::invalid("m", format!("must be nonnegative, got {m}")));
    }
    if !(beta_cut > 0.0 && beta_cut.is_finite()) {
        return Err(Error::invalid("beta_cut", format!("must be positive, got {beta_cut}")));
    }
    if !(amplitude >= 0.0 && amplitude.is_finite()) {
        return Err(Error::invalid("M", format!("must be nonnegative, got {amplitude}")));
    }
    let edge = amplitude * beta_cut.powf(m);
    let p = RadialSpectralProfile::new(n, move |r| {
        if r <= beta_cut {
            amplitude * r.powf(m)
        } else {
            edge * (-(r - beta_cut).powi(2)).exp()
        }
    })?
    .with_tail(TailBound {
        radius: beta_cut,
        decay: TailDecay::Gaussian { rate: 1.0 },
    })?;
    Ok(p.with_label(format!("poisson_source(m={m}, beta_cut={beta_cut}, M={amplitude})")))
}

/// Solves `|ξ|^k û = f̂` for the representative source and checks
/// `‖u‖₂² ≤ 2 ‖∇u‖₂²`.
pub fn poisson_example_check(
    m: f64,
    k: f64,
    beta_cut: f64,
    amplitude: f64,
    n: usize,
    q: &QuadratureSpec,
) -> Result<PoissonReport> {
    if !(k >= 0.0 && k.is_finite()) {
        return Err(Error::invalid("k", format!("must be nonnegative, got {k}")));
    }
    if m < k {
        return Err(Error::invalid("m", format!("need m >= k, got m = {m}, k = {k}")));
    }
    let exponent = 2.0 * m - 2.0 * k + n as f64;
    if !(exponent > 0.0) {
        return Err(Error::Degenerate(format!(
            "‖u‖₂² diverges at the origin: 2m − 2k + n = {exponent} <= 0"
        )));
    }
    let source = poisson_source(m, beta_cut, amplitude, n)?;
    let u = source
        .map_magnitude(move |r| r.powf(-k))
        .with_label(format!("poisson_solution(m={m}, k={k})"));

    let source_energy = radial_energy(&source, q)?;
    let energy = radial_energy(&u, q)?;
    let grad = gradient_energy(&u, q)?;
    if source_energy == 0.0 {
        return Ok(PoissonReport {
            beta0: 0.0,
            source_energy,
            energy,
            gradient_energy: grad,
            fpi_alpha: None,
            holds: energy <= 2.0 * grad,
        });
    }
    let m0 = amplitude * sphere_area(n)?;
    let beta0 = (source_energy / (2.0 * m0)).powf(1.0 / exponent).min(beta_cut);
    Ok(PoissonReport {
        beta0,
        source_energy,
        energy,
        gradient_energy: grad,
        fpi_alpha: Some(fpi_alpha(&u, beta0, q)?),
        holds: energy <= 2.0 * grad,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn gaussian_closed_forms_match_quadrature() {
        for alpha in [1e-2, 0.3, 1.0, 7.0, 1e2] {
            let g = GaussianFamily::new(1.7, alpha, 2).unwrap();
            let p = g.profile();
            let e = radial_energy(&p, &q()).unwrap();
            let ge = gradient_energy(&p, &q()).unwrap();
            let bm = low_ball_mass(&p, 0.8, &q()).unwrap();
            assert!((e - 1.7).abs() < 1e-8 * 1.7, "alpha={alpha}: {e}");
            assert!((ge - g.gradient_energy()).abs() < 1e-8 * g.gradient_energy());
            let want = g.ball_mass(0.8).unwrap();
            assert!((bm - want).abs() < 1e-8 * want.max(1e-300), "alpha={alpha}: {bm} vs {want}");
        }
    }

    #[test]
    fn gaussian_energy_in_other_dimensions() {
        for n in [1, 3] {
            let g = GaussianFamily::new(2.0, 0.5, n).unwrap();
            let e = radial_energy(&g.profile(), &q()).unwrap();
            assert!((e - 2.0).abs() < 1e-10);
            let ge = gradient_energy(&g.profile(), &q()).unwrap();
            assert!((ge - g.gradient_energy()).abs() < 1e-10 * ge);
        }
    }

    #[test]
    fn modified_inequality_on_gaussian() {
        let g = GaussianFamily::new(1.0, 0.5, 2).unwrap();
        let k = 1.2;
        let rep = modified_poincare_check(&g.profile(), k, &q()).unwrap();
        assert!(rep.holds);
        // β ≤ (α²/K²) β + β (1 − e^{-K²/α²})
        let rhs_closed = g.beta * g.alpha.powi(2) / (k * k) + g.ball_mass(k).unwrap();
        assert!(g.beta <= rhs_closed);
        assert!((rep.gradient_energy / (k * k) + rep.low_ball_mass - (g.beta * g.alpha.powi(2) / (k * k) + g.ball_mass(k).unwrap())).abs() < 1e-10);
    }

    #[test]
    fn small_lambda_degenerates() {
        let g = GaussianFamily::new(1.0, 1.0, 2).unwrap();
        let rep = modified_poincare_check(&g.profile(), 1e-6, &q()).unwrap();
        assert!(rep.rhs.abs() < 1e-11);
        assert!(rep.holds);
        assert!(modified_poincare_check(&g.profile(), 0.0, &q()).is_err());
    }

    #[test]
    fn optimality_numbers() {
        let p = optimality_probe(1.0, 1.0, 0.1).unwrap();
        assert!((p.mu_required - 0.99).abs() < 1e-14);
        assert!((p.ball_mass - 1.0).abs() < 1e-15);
        for a in [1.0, 1.5, 10.0] {
            assert_eq!(optimality_probe(1.0, 1.0, a).unwrap().mu_required, 0.0);
        }
        assert!(optimality_probe(1.0, 1.0, 1e-4).unwrap().ball_mass > 0.0);
        // Large α pushes the mass out of the ball.
        assert!(optimality_probe(1.0, 1.0, 1e3).unwrap().ball_mass < 1e-5);
    }

    #[test]
    fn fpi_on_high_pass_and_gaussian() {
        let p = RadialSpectralProfile::annulus(2, 2.0, 3.0).unwrap();
        assert_eq!(fpi_alpha(&p, 1.5, &q()).unwrap(), 0.0);
        let g = GaussianFamily::new(1.0, 2.0, 2).unwrap();
        let a = fpi_alpha(&g.profile(), 1.0, &q()).unwrap();
        assert!((a - (1.0 - (-0.25f64).exp())).abs() < 1e-10);
        assert!(fpi_check(&g.profile(), 1.0, &q()).unwrap().holds);
        let inside = RadialSpectralProfile::annulus(2, 0.0, 1.0).unwrap();
        assert!(fpi_alpha(&inside, 2.0, &q()).is_err());
        assert!(fpi_alpha(&RadialSpectralProfile::zero(2).unwrap(), 1.0, &q()).is_err());
    }

    #[test]
    fn poisson_example() {
        let rep = poisson_example_check(1.0, 1.0, 1.0, 1.0, 2, &q()).unwrap();
        assert!(rep.holds);
        let m0 = sphere_area(2).unwrap();
        assert!(m0 * rep.beta0.powf(2.0) <= rep.source_energy / 2.0 * (1.0 + 1e-12));
        let zero = poisson_example_check(2.0, 1.0, 1.0, 0.0, 2, &q()).unwrap();
        assert!(zero.holds);
        assert_eq!(zero.energy, 0.0);
        assert!(poisson_example_check(0.5, 1.0, 1.0, 1.0, 2, &q()).is_err());
    }
}
