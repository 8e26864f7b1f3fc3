//! Time series of energies.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceSource {
    ExactSemigroup,
    NseSolver,
    HeatOnGrid,
}

impl TraceSource {
    pub fn as_str(self) -> &'static str {
        match self {
            TraceSource::ExactSemigroup => "exact_semigroup",
            TraceSource::NseSolver => "nse_solver",
            TraceSource::HeatOnGrid => "heat_on_grid",
        }
    }
}

impl fmt::Display for TraceSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TraceSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact_semigroup" => Ok(TraceSource::ExactSemigroup),
            "nse_solver" => Ok(TraceSource::NseSolver),
            "heat_on_grid" => Ok(TraceSource::HeatOnGrid),
            other => Err(Error::Format(format!("unknown trace source `{other}`"))),
        }
    }
}

/// Samples `(t_i, ‖u(t_i)‖₂²)` with strictly increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyTrace {
    times: Vec<f64>,
    values: Vec<f64>,
    source: TraceSource,
}

impl EnergyTrace {
    pub fn new(times: Vec<f64>, values: Vec<f64>, source: TraceSource) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::ShapeMismatch(format!("{} times vs {} values", times.len(), values.len())));
        }
        if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(Error::invalid("times", "times must be finite and nonnegative"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("times", "times must be strictly increasing"));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid("values", "energies must be finite and nonnegative"));
        }
        if source == TraceSource::ExactSemigroup {
            // Allow quadrature-level wiggle on plateaus.
            if let Some(w) = values.windows(2).find(|w| w[1] > w[0] * (1.0 + 1e-9) + 1e-300) {
                return Err(Error::invalid(
                    "values",
                    format!("exact semigroup energy increased from {} to {}", w[0], w[1]),
                ));
            }
        }
        Ok(Self { times, values, source })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn source(&self) -> TraceSource {
        self.source
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }

    /// CSV with header `t,energy,source`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let fmt_err = |e: csv::Error| Error::Format(e.to_string());
        w.write_record(["t", "energy", "source"]).map_err(fmt_err)?;
        for (t, e) in self.iter() {
            w.write_record([format!("{t:e}"), format!("{e:e}"), self.source.to_string()])
                .map_err(fmt_err)?;
        }
        w.flush().map_err(|e| Error::Format(e.to_string()))
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
        let headers = r.headers().map_err(|e| Error::Format(e.to_string()))?.clone();
        if headers.iter().collect::<Vec<_>>() != ["t", "energy", "source"] {
            return Err(Error::Format(format!("expected header `t,energy,source`, got `{}`", headers.iter().collect::<Vec<_>>().join(","))));
        }
        let mut times = Vec::new();
        let mut values = Vec::new();
        let mut source = None;
        for (line, record) in r.records().enumerate() {
            let record = record.map_err(|e| Error::Format(e.to_string()))?;
            let field = |i: usize| record.get(i).ok_or_else(|| Error::Format(format!("row {}: missing column {i}", line + 2)));
            let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Format(format!("row {}: {e}", line + 2)));
            times.push(parse(field(0)?)?);
            values.push(parse(field(1)?)?);
            let s: TraceSource = field(2)?.trim().parse()?;
            match source {
                None => source = Some(s),
                Some(prev) if prev != s => {
                    return Err(Error::Format(format!("row {}: mixed sources `{prev}` and `{s}`", line + 2)));
                }
                _ => {}
            }
        }
        let source = source.ok_or_else(|| Error::Format("trace has no rows".into()))?;
        Self::new(times, values, source)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariants() {
        assert!(EnergyTrace::new(vec![0.0, 1.0], vec![1.0], TraceSource::NseSolver).is_err());
        assert!(EnergyTrace::new(vec![1.0, 1.0], vec![1.0, 1.0], TraceSource::NseSolver).is_err());
        assert!(EnergyTrace::new(vec![0.0, 1.0], vec![1.0, -1.0], TraceSource::NseSolver).is_err());
        assert!(EnergyTrace::new(vec![0.0, 1.0], vec![1.0, 2.0], TraceSource::ExactSemigroup).is_err());
        assert!(EnergyTrace::new(vec![0.0, 1.0], vec![1.0, 2.0], TraceSource::NseSolver).is_ok());
    }

    #[test]
    fn csv_round_trip() {
        let tr = EnergyTrace::new(vec![0.0, 0.5, 2.0], vec![3.0, 2.0, 0.125], TraceSource::ExactSemigroup).unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,energy,source\n"));
        assert_eq!(EnergyTrace::read_csv(buf.as_slice()).unwrap(), tr);
    }

    #[test]
    fn malformed_csv() {
        for bad in [
            "t,energy\n1,2\n",
            "t,energy,source\n",
            "t,energy,source\n1,x,nse_solver\n",
            "t,energy,source\n1,1,nse_solver\n2,1,heat_on_grid\n",
            "t,energy,source\n1,1,warp\n",
        ] {
            assert!(EnergyTrace::read_csv(bad.as_bytes()).is_err(), "{bad:?}");
        }
    }
}
