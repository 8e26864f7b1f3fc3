//! TOML experiment configs with line-anchored diagnostics.
//!
//! ```toml
//! experiment = "heat-gaussian"
//! out = "runs/heat"
//! seed = 3
//!
//! [params]
//! n = 2
//! alpha = 0.5
//!
//! [tolerances]
//! slope = 0.02
//! ```

use std::fmt;
use std::ops::Range;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use toml::Spanned;

use crate::experiments;
use crate::params::{Params, Tolerances};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub params: Params,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    /// Offending field, when one can be named.
    pub field: Option<String>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: Spanned<String>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    #[serde(default)]
    params: Params,
    #[serde(default)]
    tolerances: RawTolerances,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    relative: Option<Spanned<f64>>,
    slope: Option<Spanned<f64>>,
    bracket: Option<Spanned<f64>>,
    energy: Option<Spanned<f64>>,
    nl_power: Option<Spanned<f64>>,
}

impl RawTolerances {
    fn entries(&self) -> [(&'static str, &Option<Spanned<f64>>); 5] {
        [
            ("relative", &self.relative),
            ("slope", &self.slope),
            ("bracket", &self.bracket),
            ("energy", &self.energy),
            ("nl_power", &self.nl_power),
        ]
    }
}

fn position(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = offset - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

fn diagnostic(text: &str, span: Option<Range<usize>>, field: Option<&str>, message: String) -> Diagnostic {
    let (line, column) = position(text, span.map_or(0, |s| s.start));
    Diagnostic {
        line,
        column,
        field: field.map(str::to_owned),
        message,
    }
}

/// Parses and validates a config. All semantic problems are reported, not
/// just the first.
pub fn parse(text: &str) -> Result<ExperimentConfig, Vec<Diagnostic>> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let message = e.message().trim().to_owned();
        let field = message
            .split('`')
            .nth(1)
            .filter(|_| message.contains("field"))
            .map(str::to_owned);
        vec![diagnostic(text, e.span(), field.as_deref(), message)]
    })?;

    let mut diags = Vec::new();
    let id = raw.experiment.get_ref();
    if experiments::find(id).is_none() {
        diags.push(diagnostic(
            text,
            Some(raw.experiment.span()),
            Some("experiment"),
            format!("unknown experiment id `{id}`; run `decay-lab list` for the catalog"),
        ));
    }
    let mut tolerances = Tolerances::default();
    for (name, value) in raw.tolerances.entries() {
        if let Some(v) = value {
            let x = *v.get_ref();
            if !(x >= 0.0 && x.is_finite()) {
                diags.push(diagnostic(
                    text,
                    Some(v.span()),
                    Some(name),
                    format!("tolerances.{name} must be a nonnegative finite number, got {x}"),
                ));
            }
            tolerances.set(name, x);
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    Ok(ExperimentConfig {
        experiment: raw.experiment.into_inner(),
        out: raw.out,
        seed: raw.seed,
        params: raw.params,
        tolerances,
    })
}

#[derive(Debug)]
pub enum LoadError {
    Io(std::io::Error),
    Invalid(Vec<Diagnostic>),
}

pub fn load(path: &Path) -> Result<ExperimentConfig, LoadError> {
    let text = std::fs::read_to_string(path).map_err(LoadError::Io)?;
    parse(&text).map_err(LoadError::Invalid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valid_config_parses() {
        let cfg = parse("experiment = \"norate\"\nseed = 4\n[params]\nT = 100.0\neps = 0.1\n").unwrap();
        assert_eq!(cfg.experiment, "norate");
        assert_eq!(cfg.params.t, Some(100.0));
        assert_eq!(cfg.seed, Some(4));
    }

    #[test]
    fn negative_tolerance_names_field_and_line() {
        let text = "experiment = \"heat-gaussian\"\n\n[tolerances]\nslope = -0.1\n";
        let d = parse(text).unwrap_err();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].field.as_deref(), Some("slope"));
        assert_eq!(d[0].line, 4);
        assert!(d[0].message.contains("tolerances.slope"));
    }

    #[test]
    fn missing_id_is_reported() {
        let d = parse("[params]\nn = 2\n").unwrap_err();
        assert!(d[0].message.contains("experiment"), "{}", d[0]);
    }

    #[test]
    fn unknown_id_points_at_value() {
        let d = parse("seed = 1\nexperiment = \"nope\"\n").unwrap_err();
        assert_eq!((d[0].line, d[0].column), (2, 14));
    }

    #[test]
    fn unknown_param_is_anchored() {
        let d = parse("experiment = \"norate\"\n[params]\nbogus = 1\n").unwrap_err();
        assert_eq!(d[0].line, 3);
        assert_eq!(d[0].field.as_deref(), Some("bogus"));
    }

    #[test]
    fn position_counts_from_one() {
        assert_eq!(position("ab\ncd", 0), (1, 1));
        assert_eq!(position("ab\ncd", 4), (2, 2));
    }
}
