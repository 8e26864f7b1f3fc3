//! Experiment parameters shared by the command line and config files.

use serde::{Deserialize, Serialize};

/// Every knob an experiment may read. Unset fields fall back to the
/// experiment's own defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(rename = "Lambda", skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(rename = "box", skip_serializing_if = "Option::is_none")]
    pub box_length: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
    /// Half-length of the interval `(−R, R)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Low-frequency exponent of the Poisson source.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    /// Order of the Poisson symbol `|ξ|^k`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    /// Order `a` of the `(−Δ)^a` diffusion.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diffusion: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checkpoints: Option<bool>,
}

impl Params {
    /// Fields set in `other` replace ours.
    pub fn overlay(&mut self, other: &Params) {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(n, alpha, beta, q, k, lambda, t, eps, grid, dt, box_length, window, radius, m, order, cutoff, amplitude, diffusion, checkpoints);
    }
}

/// Pass/fail thresholds. Each experiment documents which ones it reads.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Relative error against a closed form.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relative: Option<f64>,
    /// Allowed slope deviation, relative unless an experiment says otherwise.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope: Option<f64>,
    /// Resolution of decay character brackets.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bracket: Option<f64>,
    /// Relative excess allowed in the energy inequality.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    /// Nonlinear power relative to dissipation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nl_power: Option<f64>,
}

impl Tolerances {
    pub const FIELDS: [&'static str; 5] = ["relative", "slope", "bracket", "energy", "nl_power"];

    pub fn get(&self, name: &str) -> Option<f64> {
        match name {
            "relative" => self.relative,
            "slope" => self.slope,
            "bracket" => self.bracket,
            "energy" => self.energy,
            "nl_power" => self.nl_power,
            _ => None,
        }
    }

    /// Sets `name`; `false` if the field does not exist.
    pub fn set(&mut self, name: &str, value: f64) -> bool {
        let slot = match name {
            "relative" => &mut self.relative,
            "slope" => &mut self.slope,
            "bracket" => &mut self.bracket,
            "energy" => &mut self.energy,
            "nl_power" => &mut self.nl_power,
            _ => return false,
        };
        *slot = Some(value);
        true
    }

    pub fn overlay(&mut self, other: &Tolerances) {
        for f in Self::FIELDS {
            if let Some(v) = other.get(f) {
                self.set(f, v);
            }
        }
    }

    /// First field that is negative or not finite.
    pub fn invalid_field(&self) -> Option<(&'static str, f64)> {
        Self::FIELDS
            .into_iter()
            .find_map(|f| self.get(f).filter(|v| !(*v >= 0.0 && v.is_finite())).map(|v| (f, v)))
    }
}
