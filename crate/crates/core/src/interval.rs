//! The Dirichlet problem on the interval `(-R, R)`.
//!
//! The Dirichlet eigenfunctions on `(-R, R)` split into an odd and an even
//! family,
//!
//! * `sin(nπx/R)` with eigenvalue `(nπ/R)²`, `n = 1, 2, …`
//! * `cos((2n+1)πx/2R)` with eigenvalue `((2n+1)π/2R)²`, `n = 0, 1, …`
//!
//! and together they are `sin(mπ(x+R)/2R)` for `m = 1, 2, …` up to sign, so
//! the spectrum is `{(mπ/2R)² : m ≥ 1}` and the gap is `(π/2R)²`, attained by
//! the lowest cosine. Expanding `u` in this basis turns `‖u'‖₂²` into a
//! weighted sum of squared coefficients, which is how the Poincaré inequality
//! `‖u'‖₂² ≥ (π/2R)² ‖u‖₂²` is checked here.
//!
//! Each element is scaled by `1/√R`, which is what gives unit `L²(-R, R)`
//! norm (an `√(2/R)` prefactor produces norm `√2` on an interval of length `2R`).
//!
//! Only the interval is implemented. On the box `(-R, R)^n` the
//! eigenfunctions are tensor products of the two families and the same
//! argument goes through coordinate by coordinate.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spectral::quadrature::{integrate, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisKind {
    /// `sin(nπx/R)`, `n >= 1`.
    Sine(usize),
    /// `cos((2n+1)πx/2R)`, `n >= 0`.
    Cosine(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalBasisElement {
    kind: BasisKind,
    r: f64,
}

fn check_half_length(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("R", format!("half-length must be positive and finite, got {r}")))
    }
}

impl IntervalBasisElement {
    pub fn new(kind: BasisKind, r: f64) -> Result<Self> {
        check_half_length(r)?;
        if kind == BasisKind::Sine(0) {
            return Err(Error::invalid("kind", "sine indices start at 1"));
        }
        Ok(Self { kind, r })
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn half_length(&self) -> f64 {
        self.r
    }

    /// Frequency `|ξ|` of the element; its eigenvalue is the square.
    pub fn frequency(&self) -> f64 {
        match self.kind {
            BasisKind::Sine(n) => n as f64 * PI / self.r,
            BasisKind::Cosine(n) => (2 * n + 1) as f64 * PI / (2.0 * self.r),
        }
    }

    pub fn eigenvalue(&self) -> f64 {
        self.frequency().powi(2)
    }

    pub fn normalization(&self) -> f64 {
        1.0 / self.r.sqrt()
    }

    /// Value at `x` without the domain check.
    fn value_unchecked(&self, x: f64) -> f64 {
        let w = self.frequency() * x;
        self.normalization()
            * match self.kind {
                BasisKind::Sine(_) => w.sin(),
                BasisKind::Cosine(_) => w.cos(),
            }
    }
}

pub fn basis_eval(e: &IntervalBasisElement, x: f64) -> Result<f64> {
    if !(x.abs() <= e.r) {
        return Err(Error::invalid("x", format!("{x} lies outside [-{r}, {r}]", r = e.r)));
    }
    Ok(e.value_unchecked(x))
}

/// The smallest `count` Dirichlet eigenvalues on `(-R, R)`, ascending.
pub fn eigenvalues(r: f64, count: usize) -> Result<Vec<f64>> {
    check_half_length(r)?;
    if count == 0 {
        return Err(Error::invalid("count", "need at least one eigenvalue"));
    }
    // Cosines take the odd m, sines the even m in (mπ/2R)².
    Ok((1..=count).map(|m| (m as f64 * PI / (2.0 * r)).powi(2)).collect())
}

/// Truncation of the frequency set `M` of the interval: the first `count`
/// positive frequencies, each present with both signs.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSpectrum {
    r: f64,
    frequencies: Vec<f64>,
}

impl IntervalSpectrum {
    pub fn new(r: f64, count: usize) -> Result<Self> {
        let positive: Vec<f64> = eigenvalues(r, count)?.into_iter().map(f64::sqrt).collect();
        let mut frequencies: Vec<f64> = positive.iter().rev().map(|x| -x).chain(positive.iter().copied()).collect();
        frequencies.dedup();
        Ok(Self { r, frequencies })
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    /// `min_{ξ ∈ M} |ξ|`, equal to `π/2R`.
    pub fn gap(&self) -> f64 {
        self.frequencies.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()))
    }

    pub fn half_length(&self) -> f64 {
        self.r
    }
}

/// Real function on `(-R, R)` through its coefficients in the orthonormal basis.
/// `sine_coeffs[i]` multiplies `Sine(i + 1)`, `cosine_coeffs[i]` multiplies `Cosine(i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalFunction {
    pub r: f64,
    pub sine_coeffs: Vec<f64>,
    pub cosine_coeffs: Vec<f64>,
}

impl IntervalFunction {
    pub fn new(r: f64, sine_coeffs: Vec<f64>, cosine_coeffs: Vec<f64>) -> Result<Self> {
        check_half_length(r)?;
        if sine_coeffs.iter().chain(&cosine_coeffs).any(|c| !c.is_finite()) {
            return Err(Error::invalid("coefficients", "coefficients must be finite"));
        }
        Ok(Self {
            r,
            sine_coeffs,
            cosine_coeffs,
        })
    }

    /// A single basis element with unit coefficient.
    pub fn mode(kind: BasisKind, r: f64) -> Result<Self> {
        IntervalBasisElement::new(kind, r)?;
        let (mut s, mut c) = (Vec::new(), Vec::new());
        match kind {
            BasisKind::Sine(n) => {
                s.resize(n, 0.0);
                s[n - 1] = 1.0;
            }
            BasisKind::Cosine(n) => {
                c.resize(n + 1, 0.0);
                c[n] = 1.0;
            }
        }
        Self::new(r, s, c)
    }

    fn terms(&self) -> impl Iterator<Item = (IntervalBasisElement, f64)> + '_ {
        let r = self.r;
        let sines = self
            .sine_coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (IntervalBasisElement { kind: BasisKind::Sine(i + 1), r }, c));
        let cosines = self
            .cosine_coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (IntervalBasisElement { kind: BasisKind::Cosine(i), r }, c));
        sines.chain(cosines)
    }

    /// `‖u‖₂²` by Parseval.
    pub fn energy(&self) -> f64 {
        self.terms().map(|(_, c)| c * c).sum()
    }

    /// `‖u'‖₂²`: each coefficient weighted by its eigenvalue.
    pub fn derivative_energy(&self) -> f64 {
        self.terms().map(|(e, c)| e.eigenvalue() * c * c).sum()
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x.abs() <= self.r) {
            return Err(Error::invalid("x", format!("{x} lies outside [-{r}, {r}]", r = self.r)));
        }
        Ok(self.terms().map(|(e, c)| c * e.value_unchecked(x)).sum())
    }
}

/// Largest `|⟨e_i, e_j⟩ - δ_ij|` over `Sine(1..=max_index)` and
/// `Cosine(0..=max_index)`, inner products by quadrature.
pub fn orthonormality_check(r: f64, max_index: usize, q: &QuadratureSpec) -> Result<f64> {
    check_half_length(r)?;
    if max_index == 0 {
        return Err(Error::invalid("max_index", "need at least index 1"));
    }
    let elements: Vec<IntervalBasisElement> = (1..=max_index)
        .map(BasisKind::Sine)
        .chain((0..=max_index).map(BasisKind::Cosine))
        .map(|kind| IntervalBasisElement { kind, r })
        .collect();
    let mut worst: f64 = 0.0;
    for (i, a) in elements.iter().enumerate() {
        for b in &elements[i..] {
            let ip = inner_product(a, b, q)?;
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((ip - target).abs());
        }
    }
    Ok(worst)
}

/// `⟨a, b⟩_{L²(-R, R)}` by adaptive quadrature.
pub fn inner_product(a: &IntervalBasisElement, b: &IntervalBasisElement, q: &QuadratureSpec) -> Result<f64> {
    if a.r != b.r {
        return Err(Error::ShapeMismatch(format!("elements on (-{}, {}) and (-{}, {})", a.r, a.r, b.r, b.r)));
    }
    let r = a.r;
    // Unit-norm elements: orthogonal pairs integrate to zero, so the error
    // floor is taken relative to the norm rather than to the value.
    let q = QuadratureSpec {
        abs_tol: q.abs_tol.max(q.rel_tol),
        ..*q
    };
    integrate(|x| a.value_unchecked(x) * b.value_unchecked(x), -r, r, &q).map(|res| res.value)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoincareInterval {
    /// `‖u'‖₂²`.
    pub lhs: f64,
    /// `(π/2R)² ‖u‖₂²`.
    pub rhs: f64,
    pub ratio: f64,
}

impl PoincareInterval {
    pub fn holds(&self) -> bool {
        self.lhs >= self.rhs * (1.0 - 1e-12)
    }
}

pub fn poincare_interval_check(u: &IntervalFunction) -> Result<PoincareInterval> {
    let energy = u.energy();
    if energy == 0.0 {
        return Err(Error::Degenerate("zero function has no Rayleigh quotient".into()));
    }
    let gap = (PI / (2.0 * u.r)).powi(2);
    let lhs = u.derivative_energy();
    let rhs = gap * energy;
    Ok(PoincareInterval { lhs, rhs, ratio: lhs / rhs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> QuadratureSpec {
        QuadratureSpec::new(1e-13, 1e-14, 10_000).unwrap()
    }

    #[test]
    fn eigenvalues_on_pi_interval() {
        let ev = eigenvalues(PI, 4).unwrap();
        for (got, want) in ev.iter().zip([0.25, 1.0, 2.25, 4.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        assert!((eigenvalues(1.0, 1).unwrap()[0] - PI * PI / 4.0).abs() < 1e-14);
        assert!(eigenvalues(1.0, 0).is_err());
        assert!(eigenvalues(0.0, 3).is_err());
    }

    #[test]
    fn eigenvalues_come_from_both_families() {
        let r = 1.7;
        let mut families: Vec<f64> = (1..=5)
            .map(|n| IntervalBasisElement::new(BasisKind::Sine(n), r).unwrap().eigenvalue())
            .chain((0..5).map(|n| IntervalBasisElement::new(BasisKind::Cosine(n), r).unwrap().eigenvalue()))
            .collect();
        families.sort_by(f64::total_cmp);
        let ev = eigenvalues(r, 10).unwrap();
        for (a, b) in ev.iter().zip(&families) {
            assert!((a - b).abs() < 1e-12 * b);
        }
    }

    #[test]
    fn basis_values() {
        let r = 2.0;
        let s1 = IntervalBasisElement::new(BasisKind::Sine(1), r).unwrap();
        let c0 = IntervalBasisElement::new(BasisKind::Cosine(0), r).unwrap();
        assert!(basis_eval(&s1, 0.0).unwrap().abs() < 1e-15);
        assert!((basis_eval(&c0, 0.0).unwrap() - 1.0 / r.sqrt()).abs() < 1e-15);
        let s2 = IntervalBasisElement::new(BasisKind::Sine(2), 1.0).unwrap();
        assert!((basis_eval(&s2, 0.25).unwrap() - 1.0).abs() < 1e-15);
        assert!(basis_eval(&s1, 2.5).is_err());
        assert!(IntervalBasisElement::new(BasisKind::Sine(0), 1.0).is_err());
    }

    #[test]
    fn elements_vanish_at_the_boundary() {
        let r = 0.75;
        for kind in (1..8).map(BasisKind::Sine).chain((0..8).map(BasisKind::Cosine)) {
            let e = IntervalBasisElement::new(kind, r).unwrap();
            assert!(basis_eval(&e, r).unwrap().abs() < 1e-12, "{kind:?}");
            assert!(basis_eval(&e, -r).unwrap().abs() < 1e-12, "{kind:?}");
        }
    }

    #[test]
    fn orthonormal_family() {
        assert!(orthonormality_check(1.0, 6, &q()).unwrap() <= 1e-10);
        let c0 = IntervalBasisElement::new(BasisKind::Cosine(0), 3.0).unwrap();
        let s1 = IntervalBasisElement::new(BasisKind::Sine(1), 3.0).unwrap();
        assert!((inner_product(&c0, &c0, &q()).unwrap() - 1.0).abs() < 1e-12);
        assert!(inner_product(&s1, &c0, &q()).unwrap().abs() < 1e-12);
    }

    #[test]
    fn spectrum_gap() {
        let s = IntervalSpectrum::new(2.0, 6).unwrap();
        assert!(!s.frequencies().contains(&0.0));
        assert!((s.gap() - PI / 4.0).abs() < 1e-15);
        assert_eq!(s.frequencies().len(), 12);
    }

    #[test]
    fn poincare_on_single_modes() {
        let r = 1.3;
        let c0 = poincare_interval_check(&IntervalFunction::mode(BasisKind::Cosine(0), r).unwrap()).unwrap();
        assert!((c0.ratio - 1.0).abs() < 1e-12);
        let u = IntervalFunction::mode(BasisKind::Sine(1), r).unwrap();
        let s1 = poincare_interval_check(&u).unwrap();
        assert!((s1.lhs / u.energy() - (PI / r).powi(2)).abs() < 1e-12);
        let zero = IntervalFunction::new(r, vec![0.0; 3], vec![0.0; 2]).unwrap();
        assert!(poincare_interval_check(&zero).is_err());
    }
}
