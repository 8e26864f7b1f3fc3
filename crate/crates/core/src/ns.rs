//! Pseudo-spectral 2D Navier–Stokes on a periodic box, unit viscosity.
//!
//! The state is the vorticity `ω = ∂ₓv − ∂ᵧu`, evolved as
//!
//! ```text
//! ∂ₜω + u·∇ω = Δω,   u = (∂ᵧψ, −∂ₓψ),   −Δψ = ω,
//! ```
//!
//! with the viscous term absorbed exactly by the integrating factor
//! `e^{−|k|²t}` and a four-stage Lawson Runge–Kutta step for the advection.
//! Products are dealiased by the 2/3 rule on a square mask, which also makes
//! the discrete nonlinearity exactly energy neutral.
//!
//! Internally the state holds Fourier-series coefficients
//! `ω(x) = Σ_k ω_k e^{ik·x}`, so `∫|f|² = L² Σ |f_k|²`. Energies are
//! `E = ‖u‖₂²` (no factor ½) and the dissipation is `D = ‖∇u‖₂² = ‖ω‖₂²`,
//! so that `dE/dt = −2D`.
//!
//! A large box stands in for `R²`: data concentrated at scale `ℓ ≪ L` behaves
//! like whole-space data only while `t ≤ 1/(4λ₁)`, `λ₁ = (2π/L)²`. Outside
//! that window the lowest box mode dominates and decay turns exponential.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::dft::{signed_index, FftPlan};
use crate::spectral::grid::GridField;
use crate::spectral::trace::{EnergyTrace, TraceSource};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Wavenumbers and dealiasing mask of an `N × N` box of side `L`.
#[derive(Debug, Clone)]
pub struct NseGrid {
    n: usize,
    box_length: f64,
    kx: Vec<f64>,
    ky: Vec<f64>,
    k2: Vec<f64>,
    mask: Vec<bool>,
}

impl NseGrid {
    pub fn new(n: usize, box_length: f64) -> Result<Self> {
        if n < 4 {
            return Err(Error::invalid("grid", format!("need at least 4 points per axis, got {n}")));
        }
        if !(box_length > 0.0 && box_length.is_finite()) {
            return Err(Error::invalid("box", format!("box length must be positive, got {box_length}")));
        }
        let len = n * n;
        let (mut kx, mut ky, mut k2, mut mask) = (
            Vec::with_capacity(len),
            Vec::with_capacity(len),
            Vec::with_capacity(len),
            Vec::with_capacity(len),
        );
        let scale = 2.0 * PI / box_length;
        let cut = n as f64 / 3.0;
        for i in 0..n {
            let si = signed_index(i, n);
            for j in 0..n {
                let sj = signed_index(j, n);
                let (a, b) = (si as f64 * scale, sj as f64 * scale);
                kx.push(a);
                ky.push(b);
                k2.push(a * a + b * b);
                mask.push((si.abs() as f64) < cut && (sj.abs() as f64) < cut);
            }
        }
        Ok(Self {
            n,
            box_length,
            kx,
            ky,
            k2,
            mask,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.n as f64
    }

    /// `λ₁ = (2π/L)²`.
    pub fn lambda1(&self) -> f64 {
        (2.0 * PI / self.box_length).powi(2)
    }

    /// `|k|²` at the flat index.
    pub fn k2(&self, flat: usize) -> f64 {
        self.k2[flat]
    }

    pub fn in_band(&self, flat: usize) -> bool {
        self.mask[flat]
    }

    /// `L² Σ w(k) |c_k|²` over nonzero modes.
    fn weighted_sum(&self, c: &[Complex64], w: impl Fn(f64) -> f64) -> f64 {
        let l2 = self.box_length * self.box_length;
        l2 * c
            .iter()
            .zip(&self.k2)
            .filter(|(_, k2)| **k2 > 0.0)
            .map(|(c, k2)| w(*k2) * c.norm_sqr())
            .sum::<f64>()
    }
}

/// `1/(4λ₁)`, the end of the torus-valid window.
pub fn torus_window_end(box_length: f64) -> f64 {
    let lambda1 = (2.0 * PI / box_length).powi(2);
    1.0 / (4.0 * lambda1)
}

/// Whether `[lo, hi]` lies inside the torus-valid window of a box of side `L`.
pub fn window_is_valid(window: [f64; 2], box_length: f64) -> bool {
    window[0] >= 0.0 && window[0] < window[1] && window[1] <= torus_window_end(box_length)
}

/// Vorticity state with zero mean on a square periodic box.
#[derive(Debug, Clone, PartialEq)]
pub struct NSEState {
    omega: Vec<Complex64>,
    time: f64,
    n: usize,
    box_length: f64,
}

impl NSEState {
    pub fn zero(n: usize, box_length: f64) -> Self {
        Self {
            omega: vec![ZERO; n * n],
            time: 0.0,
            n,
            box_length,
        }
    }

    /// Projects a sampled vorticity onto the dealiased band with the mean
    /// removed.
    pub fn from_vorticity(field: &GridField, time: f64) -> Result<Self> {
        let grid = grid_of(field)?;
        if !(time >= 0.0 && time.is_finite()) {
            return Err(Error::invalid("time", "must be finite and nonnegative"));
        }
        let plan = FftPlan::new(&[grid.n, grid.n]);
        let mut c: Vec<Complex64> = field.samples().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        plan.forward(&mut c);
        let inv = 1.0 / grid.len() as f64;
        for (k, v) in c.iter_mut().enumerate() {
            *v = if grid.mask[k] && grid.k2[k] > 0.0 { *v * inv } else { ZERO };
        }
        Ok(Self {
            omega: c,
            time,
            n: grid.n,
            box_length: grid.box_length,
        })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn grid_size(&self) -> usize {
        self.n
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    /// Fourier-series coefficients of the vorticity, row-major.
    pub fn coefficients(&self) -> &[Complex64] {
        &self.omega
    }

    pub fn vorticity(&self) -> GridField {
        let plan = FftPlan::new(&[self.n, self.n]);
        let mut c = self.omega.clone();
        plan.inverse(&mut c);
        GridField::new(
            vec![self.n, self.n],
            vec![self.box_length, self.box_length],
            c.iter().map(|v| v.re).collect(),
        )
        .expect("state coefficients are finite")
    }

    fn grid(&self) -> NseGrid {
        NseGrid::new(self.n, self.box_length).expect("state geometry was validated")
    }

    /// `‖u‖₂² = L² Σ |ω_k|²/|k|²`.
    pub fn energy(&self) -> f64 {
        self.grid().weighted_sum(&self.omega, |k2| 1.0 / k2)
    }

    /// `‖∇u‖₂² = ‖ω‖₂²`.
    pub fn dissipation(&self) -> f64 {
        self.grid().weighted_sum(&self.omega, |_| 1.0)
    }
}

fn grid_of(field: &GridField) -> Result<NseGrid> {
    match (field.shape(), field.box_length()) {
        ([a, b], [la, lb]) if a == b && la == lb => NseGrid::new(*a, *la),
        (shape, lengths) => Err(Error::ShapeMismatch(format!(
            "the solver needs a square 2D grid on a square box, got {shape:?} / {lengths:?}"
        ))),
    }
}

/// Diagnostics of the state at the start of a step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepDiag {
    pub t: f64,
    pub energy: f64,
    pub dissipation: f64,
    /// `dE/dt` contributed by the nonlinear term; zero in exact arithmetic.
    pub nl_power: f64,
    pub max_velocity: f64,
    /// `2∫ D` over the step that follows, integrating each mode's viscous
    /// decay exactly; zero for the closing entry.
    pub step_dissipation: f64,
}

/// Lawson RK4 integrator with cached Fourier multipliers.
pub struct NseSolver {
    grid: NseGrid,
    plan: FftPlan,
    /// Admissible `dt = cfl · Δx / max|u|`.
    pub cfl: f64,
    factors: Option<(f64, Vec<f64>, Vec<f64>)>,
}

impl std::fmt::Debug for NseSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NseSolver")
            .field("n", &self.grid.n)
            .field("box_length", &self.grid.box_length)
            .field("cfl", &self.cfl)
            .finish()
    }
}

/// Default Courant number; the Lawson RK4 stability limit sits a bit above 1.3.
pub const DEFAULT_CFL: f64 = 1.0;

impl NseSolver {
    pub fn new(n: usize, box_length: f64) -> Result<Self> {
        Ok(Self {
            grid: NseGrid::new(n, box_length)?,
            plan: FftPlan::new(&[n, n]),
            cfl: DEFAULT_CFL,
            factors: None,
        })
    }

    pub fn for_state(s: &NSEState) -> Result<Self> {
        Self::new(s.n, s.box_length)
    }

    pub fn grid(&self) -> &NseGrid {
        &self.grid
    }

    fn check_state(&self, s: &NSEState) -> Result<()> {
        if s.n != self.grid.n || s.box_length != self.grid.box_length {
            return Err(Error::ShapeMismatch(format!(
                "state is {}² on L = {}, solver is {}² on L = {}",
                s.n, s.box_length, self.grid.n, self.grid.box_length
            )));
        }
        Ok(())
    }

    /// `−P_{2/3}(u·∇ω)` in coefficient space, with `max|u|` on the grid.
    fn nonlinear(&self, w: &[Complex64]) -> (Vec<Complex64>, f64) {
        let g = &self.grid;
        let len = g.len();
        let mut u = vec![ZERO; len];
        let mut v = vec![ZERO; len];
        let mut wx = vec![ZERO; len];
        let mut wy = vec![ZERO; len];
        for k in 0..len {
            if g.k2[k] == 0.0 || !g.mask[k] {
                continue;
            }
            let psi = w[k] / g.k2[k];
            u[k] = I * g.ky[k] * psi;
            v[k] = -I * g.kx[k] * psi;
            wx[k] = I * g.kx[k] * w[k];
            wy[k] = I * g.ky[k] * w[k];
        }
        for buf in [&mut u, &mut v, &mut wx, &mut wy] {
            self.plan.inverse(buf);
        }
        let mut umax = 0.0_f64;
        let mut adv: Vec<Complex64> = (0..len)
            .map(|i| {
                umax = umax.max(u[i].re.hypot(v[i].re));
                Complex64::new(u[i].re * wx[i].re + v[i].re * wy[i].re, 0.0)
            })
            .collect();
        self.plan.forward(&mut adv);
        let inv = 1.0 / len as f64;
        for (k, a) in adv.iter_mut().enumerate() {
            *a = if g.mask[k] && g.k2[k] > 0.0 { -*a * inv } else { ZERO };
        }
        (adv, umax)
    }

    fn factors(&mut self, dt: f64) -> (Vec<f64>, Vec<f64>) {
        if let Some((cached, full, half)) = &self.factors {
            if *cached == dt {
                return (full.clone(), half.clone());
            }
        }
        let full: Vec<f64> = self.grid.k2.iter().map(|k2| (-k2 * dt).exp()).collect();
        let half: Vec<f64> = self.grid.k2.iter().map(|k2| (-0.5 * k2 * dt).exp()).collect();
        self.factors = Some((dt, full.clone(), half.clone()));
        (full, half)
    }

    /// Largest step the CFL bound admits at `s`.
    pub fn admissible_dt(&self, s: &NSEState) -> Result<f64> {
        self.check_state(s)?;
        let (_, umax) = self.nonlinear(&s.omega);
        Ok(self.admissible_for(umax))
    }

    fn admissible_for(&self, umax: f64) -> f64 {
        if umax > 0.0 {
            self.cfl * self.grid.spacing() / umax
        } else {
            f64::INFINITY
        }
    }

    pub fn diagnostics(&self, s: &NSEState) -> Result<StepDiag> {
        self.check_state(s)?;
        let (a, umax) = self.nonlinear(&s.omega);
        Ok(self.diag_from(s, &a, umax))
    }

    fn diag_from(&self, s: &NSEState, a: &[Complex64], umax: f64) -> StepDiag {
        let g = &self.grid;
        let l2 = g.box_length * g.box_length;
        // dE/dt = 2 L² Re Σ conj(ψ_k) N_k with ψ_k = ω_k/|k|².
        let nl_power = 2.0
            * l2
            * s.omega
                .iter()
                .zip(a)
                .zip(&g.k2)
                .filter(|(_, k2)| **k2 > 0.0)
                .map(|((w, n), k2)| (w.conj() * n).re / k2)
                .sum::<f64>();
        StepDiag {
            t: s.time,
            energy: s.energy(),
            dissipation: s.dissipation(),
            nl_power,
            max_velocity: umax,
            step_dissipation: 0.0,
        }
    }

    /// One step; returns the new state and diagnostics of the old one.
    pub fn step(&mut self, s: &NSEState, dt: f64) -> Result<(NSEState, StepDiag)> {
        self.check_state(s)?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::invalid("dt", format!("must be positive, got {dt}")));
        }
        let (a, umax) = self.nonlinear(&s.omega);
        let admissible = self.admissible_for(umax);
        if dt > admissible {
            return Err(Error::Cfl { dt, admissible });
        }
        let mut diag = self.diag_from(s, &a, umax);
        diag.step_dissipation = self.grid.weighted_sum(&s.omega, |k2| -(-2.0 * k2 * dt).exp_m1() / k2);
        let (e, eh) = self.factors(dt);
        let w = &s.omega;
        let len = w.len();
        let h = 0.5 * dt;

        let w1: Vec<Complex64> = (0..len).map(|k| eh[k] * (w[k] + h * a[k])).collect();
        let (b, _) = self.nonlinear(&w1);
        let w2: Vec<Complex64> = (0..len).map(|k| eh[k] * w[k] + h * b[k]).collect();
        let (c, _) = self.nonlinear(&w2);
        let w3: Vec<Complex64> = (0..len).map(|k| e[k] * w[k] + dt * eh[k] * c[k]).collect();
        let (d, _) = self.nonlinear(&w3);
        let next: Vec<Complex64> = (0..len)
            .map(|k| e[k] * w[k] + dt / 6.0 * (e[k] * a[k] + 2.0 * eh[k] * (b[k] + c[k]) + d[k]))
            .collect();
        Ok((
            NSEState {
                omega: next,
                time: s.time + dt,
                n: s.n,
                box_length: s.box_length,
            },
            diag,
        ))
    }

    /// Advances to the last of `sample_times`, snapshotting at each one. Steps
    /// are shortened to land on sample times exactly.
    pub fn run(&mut self, s0: &NSEState, dt: f64, sample_times: &[f64]) -> Result<Trajectory> {
        self.check_state(s0)?;
        if sample_times.windows(2).any(|w| w[1] <= w[0]) || sample_times.first().is_some_and(|&t| t < s0.time) {
            return Err(Error::invalid("sample_times", "must be increasing and not before the initial time"));
        }
        let mut state = s0.clone();
        let mut steps = Vec::new();
        let mut snapshots = Vec::new();
        for &target in sample_times {
            while target - state.time > 1e-12 * target.max(1.0) {
                let h = dt.min(target - state.time);
                let (next, diag) = self.step(&state, h)?;
                steps.push(diag);
                state = next;
            }
            state.time = target;
            snapshots.push(state.clone());
        }
        steps.push(self.diagnostics(&state)?);
        Ok(Trajectory {
            initial: s0.clone(),
            steps,
            snapshots,
            dt,
        })
    }
}

/// Convenience single step with a fresh solver.
pub fn nse_step(s: &NSEState, dt: f64) -> Result<NSEState> {
    NseSolver::for_state(s)?.step(s, dt).map(|(next, _)| next)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub initial: NSEState,
    /// Per-step diagnostics, closed by the final state.
    pub steps: Vec<StepDiag>,
    pub snapshots: Vec<NSEState>,
    pub dt: f64,
}

impl Trajectory {
    pub fn energy_trace(&self) -> Result<EnergyTrace> {
        let (t, e) = self.steps.iter().map(|d| (d.t, d.energy)).unzip();
        EnergyTrace::new(t, e, TraceSource::NseSolver)
    }

    pub fn dissipation(&self) -> Vec<f64> {
        self.steps.iter().map(|d| d.dissipation).collect()
    }

    /// `max_k |P_NL,k| / D_k` over steps with positive dissipation.
    pub fn max_relative_nl_power(&self) -> f64 {
        self.steps
            .iter()
            .filter(|d| d.dissipation > 0.0)
            .map(|d| d.nl_power.abs() / d.dissipation)
            .fold(0.0, f64::max)
    }

    /// Worst relative excess of `E(t) + 2∫ₛᵗ D ≤ E(s)` over all step pairs.
    pub fn energy_inequality_excess(&self) -> f64 {
        energy_inequality_pairs(&self.steps)
    }

    /// Writes each snapshot as a grid field `<dir>/omega_<i>` stamped with its time.
    pub fn write_checkpoints(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        self.snapshots
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let stem = dir.join(format!("omega_{i:04}"));
                s.vorticity().write(&stem, Some(s.time)).map(|(h, _)| h)
            })
            .collect()
    }
}

/// See [`Trajectory::energy_inequality_excess`].
pub fn energy_inequality_pairs(steps: &[StepDiag]) -> f64 {
    let n = steps.len();
    if n < 2 {
        return 0.0;
    }
    // I(t_i) = 2∫₀^{t_i} D; need max_{t>s} (E(t) + I(t)) − I(s) ≤ E(s).
    let mut cumulative = vec![0.0; n];
    for i in 1..n {
        cumulative[i] = cumulative[i - 1] + steps[i - 1].step_dissipation;
    }
    let mut suffix_max = f64::NEG_INFINITY;
    let mut worst = f64::NEG_INFINITY;
    for s in (0..n - 1).rev() {
        suffix_max = suffix_max.max(steps[s + 1].energy + cumulative[s + 1]);
        let e = steps[s].energy;
        let excess = suffix_max - cumulative[s] - e;
        worst = worst.max(if e > 0.0 {
            excess / e
        } else if excess > 0.0 {
            f64::INFINITY
        } else {
            0.0
        });
    }
    worst
}

/// Run manifest written next to checkpoints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub grid: [usize; 2],
    pub box_length: f64,
    pub dt: f64,
    pub window: [f64; 2],
    pub lambda1: f64,
    pub torus_window_end: f64,
    pub window_valid: bool,
    pub steps: usize,
    pub checkpoints: Vec<String>,
}

impl RunManifest {
    pub fn new(traj: &Trajectory, window: [f64; 2], checkpoints: &[PathBuf]) -> Self {
        let l = traj.initial.box_length;
        Self {
            grid: [traj.initial.n, traj.initial.n],
            box_length: l,
            dt: traj.dt,
            window,
            lambda1: (2.0 * PI / l).powi(2),
            torus_window_end: torus_window_end(l),
            window_valid: window_is_valid(window, l),
            steps: traj.steps.len().saturating_sub(1),
            checkpoints: checkpoints
                .iter()
                .map(|p| p.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default())
                .collect(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Format(e.to_string()))?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

/// Taylor–Green vorticity `2 cos x cos y`, an exact decaying solution on the
/// `2π` box.
pub fn taylor_green(n: usize, amplitude: f64) -> Result<NSEState> {
    let l = 2.0 * PI;
    let f = GridField::from_fn(vec![n, n], vec![l, l], |x| amplitude * 2.0 * x[0].cos() * x[1].cos())?;
    NSEState::from_vorticity(&f, 0.0)
}

/// Seeded cluster of vortex dipoles of width `scale` near the box centre.
///
/// Each dipole is `a (b·∇) e^{−|x−x_i|²/(2ℓ²)}` with random direction `b`, so
/// the total circulation vanishes and `|û₀|` stays bounded away from zero
/// near the frequency origin.
pub fn random_dipoles(n: usize, box_length: f64, count: usize, scale: f64, amplitude: f64, seed: u64) -> Result<NSEState> {
    if !(scale > 0.0 && scale < box_length / 8.0) {
        return Err(Error::invalid("scale", format!("need 0 < scale < L/8, got {scale}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centre = box_length / 2.0;
    let spread = 2.0 * scale * (count as f64).sqrt();
    let dipoles: Vec<([f64; 2], [f64; 2], f64)> = (0..count)
        .map(|_| {
            let pos = [centre + rng.random_range(-spread..spread), centre + rng.random_range(-spread..spread)];
            let theta = rng.random_range(0.0..2.0 * PI);
            let a = amplitude * rng.random_range(0.5..1.5);
            (pos, [theta.cos(), theta.sin()], a)
        })
        .collect();
    let s2 = scale * scale;
    let field = GridField::from_fn(vec![n, n], vec![box_length, box_length], |x| {
        dipoles
            .iter()
            .map(|(p, b, a)| {
                let d = [x[0] - p[0], x[1] - p[1]];
                let g = (-(d[0] * d[0] + d[1] * d[1]) / (2.0 * s2)).exp();
                // (b·∇)g = −(b·d)/ℓ² g
                -a * (b[0] * d[0] + b[1] * d[1]) / s2 * g * scale
            })
            .sum()
    })?;
    NSEState::from_vorticity(&field, 0.0)
}

/// Energy of the exact heat evolution of the same datum on the grid.
pub fn heat_on_grid_trace(s0: &NSEState, times: &[f64]) -> Result<EnergyTrace> {
    let g = s0.grid();
    let values = times
        .iter()
        .map(|&t| g.weighted_sum(&s0.omega, |k2| (-2.0 * k2 * (t - s0.time)).exp() / k2))
        .collect();
    EnergyTrace::new(times.to_vec(), values, TraceSource::HeatOnGrid)
}

/// `‖u(t) − e^{Δt}u₀‖₂²` at each snapshot of the trajectory.
pub fn diff_trace(traj: &Trajectory) -> Result<EnergyTrace> {
    let s0 = &traj.initial;
    let g = s0.grid();
    let mut times = Vec::with_capacity(traj.snapshots.len());
    let mut values = Vec::with_capacity(traj.snapshots.len());
    for s in &traj.snapshots {
        if s.n != s0.n || s.box_length != s0.box_length {
            return Err(Error::ShapeMismatch("snapshot grid differs from the initial datum".into()));
        }
        let dt = s.time - s0.time;
        let diff: Vec<Complex64> = s
            .omega
            .iter()
            .zip(&s0.omega)
            .zip(&g.k2)
            .map(|((w, w0), k2)| w - w0 * (-k2 * dt).exp())
            .collect();
        times.push(s.time);
        values.push(g.weighted_sum(&diff, |k2| 1.0 / k2));
    }
    EnergyTrace::new(times, values, TraceSource::NseSolver)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DuhamelBound {
    pub k: f64,
    pub ball_radius: f64,
    /// `sup |N̂L(ξ, s)| / |ξ|^k` over snapshots and `0 < |ξ| ≤ ball_radius`.
    pub c_measured: f64,
    pub per_snapshot: Vec<(f64, f64)>,
    pub ok: bool,
}

/// Measures `|N̂L(u)(ξ, s)| ≤ C|ξ|^k` for `NL(u) = −P∇·(u⊗u)` on the
/// trajectory snapshots, in the continuous normalisation
/// `f̂(ξ) = (2π)^{−2} ∫ e^{−ix·ξ} f(x) dx`.
pub fn duhamel_nl_bound(snapshots: &[NSEState], k: f64, ball_radius: f64) -> Result<DuhamelBound> {
    if snapshots.is_empty() {
        return Err(Error::Degenerate("empty trajectory".into()));
    }
    if snapshots.len() < 5 {
        return Err(Error::Precondition(format!("need at least 5 snapshots, got {}", snapshots.len())));
    }
    if !(k >= 0.0 && ball_radius > 0.0) {
        return Err(Error::invalid("k", format!("need k >= 0 and a positive radius, got k = {k}, radius = {ball_radius}")));
    }
    let first = &snapshots[0];
    let g = first.grid();
    let plan = FftPlan::new(&[g.n, g.n]);
    let len = g.len();
    let continuous = (g.box_length / (2.0 * PI)).powi(2);
    let inv = 1.0 / len as f64;
    let mut per_snapshot = Vec::with_capacity(snapshots.len());
    for s in snapshots {
        if s.n != first.n || s.box_length != first.box_length {
            return Err(Error::ShapeMismatch("snapshots on different grids".into()));
        }
        let mut u = vec![ZERO; len];
        let mut v = vec![ZERO; len];
        for i in 0..len {
            if g.k2[i] > 0.0 {
                let psi = s.omega[i] / g.k2[i];
                u[i] = I * g.ky[i] * psi;
                v[i] = -I * g.kx[i] * psi;
            }
        }
        plan.inverse(&mut u);
        plan.inverse(&mut v);
        let mut uu: Vec<Complex64> = u.iter().map(|a| Complex64::new(a.re * a.re, 0.0)).collect();
        let mut uv: Vec<Complex64> = u.iter().zip(&v).map(|(a, b)| Complex64::new(a.re * b.re, 0.0)).collect();
        let mut vv: Vec<Complex64> = v.iter().map(|b| Complex64::new(b.re * b.re, 0.0)).collect();
        for buf in [&mut uu, &mut uv, &mut vv] {
            plan.forward(buf);
        }
        let mut sup = 0.0_f64;
        for i in 0..len {
            let k2 = g.k2[i];
            if k2 == 0.0 || !g.mask[i] || k2 > ball_radius * ball_radius {
                continue;
            }
            let (kx, ky) = (g.kx[i], g.ky[i]);
            // −i k_j (u_i u_j)_k, then the Leray projection.
            let fx = -I * (kx * uu[i] + ky * uv[i]) * inv;
            let fy = -I * (kx * uv[i] + ky * vv[i]) * inv;
            let kf = (kx * fx + ky * fy) / k2;
            let px = fx - kx * kf;
            let py = fy - ky * kf;
            let norm = (px.norm_sqr() + py.norm_sqr()).sqrt() * continuous;
            sup = sup.max(norm / k2.sqrt().powf(k));
        }
        per_snapshot.push((s.time, sup));
    }
    let c_measured = per_snapshot.iter().fold(0.0_f64, |m, &(_, c)| m.max(c));
    Ok(DuhamelBound {
        k,
        ball_radius,
        c_measured,
        per_snapshot,
        ok: c_measured.is_finite(),
    })
}

/// Decay exponent of the Duhamel bound, `min(q + n/2, k + n/2)`.
pub fn duhamel_exponent(q: f64, k: f64, n: usize) -> f64 {
    let h = n as f64 / 2.0;
    (q + h).min(k + h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HKind {
    /// `h(t) = ε(t) ↘ 0`.
    EpsilonVanishing,
    /// `h(t) = C ln²(t + e)`.
    LogSquared,
    Constant,
}

/// Wiegner's bound `‖u(t) − e^{Δt}u₀‖₂² ≤ h(t)(1+t)^{−d}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WiegnerRate {
    pub alpha: f64,
    pub d: f64,
    pub h_kind: HKind,
}

/// `d = n/2 + 1 − 2 max(1 − α, 0)` for heat decay `(1+t)^{−α}`, `2 ≤ n ≤ 4`.
pub fn wiegner_rate(alpha: f64, n: usize) -> Result<WiegnerRate> {
    if !(2..=4).contains(&n) {
        return Err(Error::invalid("n", format!("the bound is stated for 2 <= n <= 4, got {n}")));
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::invalid("alpha", format!("must be nonnegative, got {alpha}")));
    }
    let d = n as f64 / 2.0 + 1.0 - 2.0 * (1.0 - alpha).max(0.0);
    let h_kind = if alpha == 0.0 {
        HKind::EpsilonVanishing
    } else if alpha == 1.0 {
        HKind::LogSquared
    } else {
        HKind::Constant
    };
    Ok(WiegnerRate { alpha, d, h_kind })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "exponent", rename_all = "snake_case")]
pub enum NsDecay {
    /// `C₁(1+t)^{−p} ≤ ‖u(t)‖₂² ≤ C₂(1+t)^{−p}`.
    TwoSided(f64),
    /// `‖u(t)‖₂² ≤ C(1+t)^{−p}`.
    Upper(f64),
    SlowerThanAnyPolynomial,
    /// `q* = −1` in two dimensions, where no statement is available.
    Undetermined,
}

/// Energy decay of Navier–Stokes solutions from the decay character of the
/// data. `q_star` may be `+∞`.
pub fn ns_decay_classify(q_star: f64, n: usize) -> Result<NsDecay> {
    if !(2..=4).contains(&n) {
        return Err(Error::invalid("n", format!("need 2 <= n <= 4, got {n}")));
    }
    let h = n as f64 / 2.0;
    if q_star.is_nan() || q_star < -h {
        return Err(Error::invalid("q_star", format!("must lie in [-n/2, ∞], got {q_star}")));
    }
    Ok(if q_star == -h {
        if n == 2 {
            NsDecay::Undetermined
        } else {
            NsDecay::SlowerThanAnyPolynomial
        }
    } else if q_star < 1.0 - h {
        NsDecay::TwoSided(q_star + h)
    } else {
        NsDecay::Upper(h + q_star.min(1.0))
    })
}
