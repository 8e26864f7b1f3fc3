//! Shared representations used by every other module.

pub mod dft;
pub mod fit;
pub mod grid;
pub mod profile;
pub mod quadrature;
pub mod trace;

pub use dft::{dft_forward, dft_inverse, FftPlan, Spectrum};
pub use fit::{least_squares, log_grid, loglog_slope};
pub use grid::{GridField, GridHeader};
pub use profile::{
    gradient_energy, heat_dissipation, heat_energy, low_ball_mass, radial_energy, sphere_area,
    RadialSpectralProfile, TailBound, TailDecay,
};
pub use quadrature::{integrate, integrate_to_infinity, QuadratureResult, QuadratureSpec};
pub use trace::{EnergyTrace, TraceSource};
