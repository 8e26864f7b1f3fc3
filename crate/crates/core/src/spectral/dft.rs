//! Discrete Fourier transform on the periodic box.
//!
//! The forward transform approximates `û(ξ) = (2π)^{-n} ∫ e^{-i x·ξ} v(x) dx`
//! at the lattice `ξ_k = 2π k / L`, so that
//!
//! * `dft_inverse(dft_forward(f)) = f`,
//! * `∫ |f|² dx = (2π)^n Σ_k |F_k|² Δξ` with `Δξ = Π 2π / L_j`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::GridField;
use crate::error::{Error, Result};

/// Cached unnormalised complex FFT plans for a 1D or 2D row-major shape.
#[derive(Clone)]
pub struct FftPlan {
    shape: Vec<usize>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
}

impl std::fmt::Debug for FftPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftPlan").field("shape", &self.shape).finish()
    }
}

impl FftPlan {
    pub fn new(shape: &[usize]) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            shape: shape.to_vec(),
            forward: shape.iter().map(|&n| planner.plan_fft_forward(n)).collect(),
            inverse: shape.iter().map(|&n| planner.plan_fft_inverse(n)).collect(),
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `X_k = Σ_j x_j e^{-2πi j·k/N}`, in place.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.apply(&self.forward, data);
    }

    /// `x_j = Σ_k X_k e^{+2πi j·k/N}` (no `1/N`), in place.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.apply(&self.inverse, data);
    }

    fn apply(&self, plans: &[Arc<dyn Fft<f64>>], data: &mut [Complex64]) {
        assert_eq!(data.len(), self.len(), "buffer does not match plan shape");
        match self.shape.as_slice() {
            [_] => plans[0].process(data),
            [rows, cols] => {
                // Rows are contiguous; columns go through a scratch column.
                plans[1].process(data);
                let mut column = vec![Complex64::new(0.0, 0.0); *rows];
                for c in 0..*cols {
                    for r in 0..*rows {
                        column[r] = data[r * cols + c];
                    }
                    plans[0].process(&mut column);
                    for r in 0..*rows {
                        data[r * cols + c] = column[r];
                    }
                }
            }
            _ => unreachable!("plans are 1D or 2D"),
        }
    }
}

/// Signed FFT index of position `i` on an axis of length `n`.
pub fn signed_index(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Angular wavenumber `2π k / L` of position `i`.
pub fn wavenumber(i: usize, n: usize, length: f64) -> f64 {
    2.0 * PI * signed_index(i, n) as f64 / length
}

/// Fourier coefficients of a [`GridField`] in the `(2π)^{-n}` normalisation.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    shape: Vec<usize>,
    box_length: Vec<f64>,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(shape: Vec<usize>, box_length: Vec<f64>, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != shape.iter().product::<usize>() || shape.len() != box_length.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} coefficients for shape {:?} / box {:?}",
                coeffs.len(),
                shape,
                box_length
            )));
        }
        Ok(Self {
            shape,
            box_length,
            coeffs,
        })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn box_length(&self) -> &[f64] {
        &self.box_length
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Lattice spacing volume `Π 2π / L_j`.
    pub fn cell_volume(&self) -> f64 {
        self.box_length.iter().map(|l| 2.0 * PI / l).product()
    }

    /// Wave vector of the flat index.
    pub fn xi(&self, flat: usize) -> Vec<f64> {
        let mut rem = flat;
        let mut xi = vec![0.0; self.shape.len()];
        for axis in (0..self.shape.len()).rev() {
            let i = rem % self.shape[axis];
            rem /= self.shape[axis];
            xi[axis] = wavenumber(i, self.shape[axis], self.box_length[axis]);
        }
        xi
    }

    /// `(2π)^n Σ |F_k|² Δξ`, equal to the grid energy by Parseval.
    pub fn energy(&self) -> f64 {
        let n = self.shape.len() as i32;
        (2.0 * PI).powi(n) * self.cell_volume() * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }
}

pub fn dft_forward(f: &GridField) -> Spectrum {
    dft_forward_with(&FftPlan::new(f.shape()), f)
}

pub fn dft_forward_with(plan: &FftPlan, f: &GridField) -> Spectrum {
    let mut data: Vec<Complex64> = f.samples().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    plan.forward(&mut data);
    let scale = f.cell_volume() / (2.0 * PI).powi(f.dim() as i32);
    data.iter_mut().for_each(|c| *c *= scale);
    Spectrum {
        shape: f.shape().to_vec(),
        box_length: f.box_length().to_vec(),
        coeffs: data,
    }
}

/// Inverse transform; the imaginary residue (nonzero only for spectra without
/// Hermitian symmetry) is discarded.
pub fn dft_inverse(s: &Spectrum) -> Result<GridField> {
    dft_inverse_with(&FftPlan::new(&s.shape), s)
}

pub fn dft_inverse_with(plan: &FftPlan, s: &Spectrum) -> Result<GridField> {
    if plan.shape() != s.shape.as_slice() {
        return Err(Error::ShapeMismatch(format!("plan {:?} vs spectrum {:?}", plan.shape(), s.shape)));
    }
    let mut data = s.coeffs.clone();
    plan.inverse(&mut data);
    let scale = s.cell_volume();
    GridField::new(
        s.shape.clone(),
        s.box_length.clone(),
        data.iter().map(|c| c.re * scale).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_field_hits_only_the_zero_mode() {
        let f = GridField::from_fn(vec![8, 4], vec![2.0, 3.0], |_| 1.5).unwrap();
        let s = dft_forward(&f);
        for (k, c) in s.coeffs().iter().enumerate() {
            if k == 0 {
                // (2π)^{-2} ∫ 1.5 dx
                assert!((c.re - 1.5 * 6.0 / (4.0 * PI * PI)).abs() < 1e-14);
            } else {
                assert!(c.norm() < 1e-14);
            }
        }
    }

    #[test]
    fn pure_tone_has_two_coefficients() {
        let l = 3.0;
        let f = GridField::from_fn(vec![16], vec![l], |x| (2.0 * PI * x[0] / l).cos()).unwrap();
        let s = dft_forward(&f);
        let nonzero: Vec<usize> = (0..16).filter(|&k| s.coeffs()[k].norm() > 1e-12).collect();
        assert_eq!(nonzero, vec![1, 15]);
        assert!((s.xi(1)[0] - 2.0 * PI / l).abs() < 1e-15);
        assert!((s.xi(15)[0] + 2.0 * PI / l).abs() < 1e-15);
    }

    #[test]
    fn parseval_with_the_forward_normalisation() {
        let f = GridField::from_fn(vec![16, 8], vec![2.0, 5.0], |x| (x[0] * 3.0).sin() + x[1] * x[0]).unwrap();
        let s = dft_forward(&f);
        assert!((s.energy() - f.energy()).abs() < 1e-12 * f.energy());
    }

    #[test]
    fn signed_indices() {
        assert_eq!(signed_index(0, 8), 0);
        assert_eq!(signed_index(4, 8), 4);
        assert_eq!(signed_index(5, 8), -3);
        assert_eq!(signed_index(2, 5), 2);
        assert_eq!(signed_index(3, 5), -2);
    }
}
