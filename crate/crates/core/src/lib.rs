//! Numerical toolkit for the energy decay of diffusive evolution equations.
//!
//! The crate is organised bottom-up:
//!
//! * [`spectral`] holds the shared representations: radial frequency profiles of
//!   whole-space data, periodic grid fields, energy traces, adaptive quadrature,
//!   the discrete Fourier transform and log-log slope fitting.
//! * [`interval`] is the bounded-domain picture: the Dirichlet eigenbasis on
//!   `(-R, R)`, its spectral gap and the classical Poincaré inequality.
//! * [`whole_space`] collects the whole-space substitutes of Poincaré's
//!   inequality and the Gaussian family that shows they are sharp.
//! * [`decay_character`] probes the behaviour of `|û₀|²` at the frequency origin
//!   (decay indicator, decay character, Riesz-type limits).
//! * [`heat`] evolves radial data with the exact heat multiplier and checks the
//!   exponential / algebraic decay classification against it.
//! * [`ns`] is a pseudo-spectral 2D Navier–Stokes solver on a periodic box used
//!   to look at the nonlinear statements at desk scale.
//!
//! Fourier conventions: radial profiles are normalised so that
//! `‖u‖₂² = ∫ |û|² dξ` (Plancherel without constants). Grid transforms put the
//! full `(2π)^{-n}` on the forward direction, see [`spectral::dft_forward`].

// Guards are written `!(x > 0.0)` on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decay_character;
pub mod error;
pub mod heat;
pub mod interval;
pub mod ns;
pub mod spectral;
pub mod whole_space;

pub use error::{Error, Result};
