//! Real fields sampled on a periodic box, and their on-disk representation.
//!
//! A field is stored as two files: a JSON sidecar header
//!
//! ```json
//! {"dim":2,"shape":[256,256],"box_length":[50.27,50.27],"dtype":"f64-le","layout":"row-major"}
//! ```
//!
//! and a `.field` payload of `prod(shape)` little-endian `f64` values in
//! row-major order (last axis fastest). Checkpoints may carry an extra
//! `"time"` entry in the header.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DTYPE: &str = "f64-le";
pub const LAYOUT: &str = "row-major";

#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    shape: Vec<usize>,
    box_length: Vec<f64>,
    samples: Vec<f64>,
}

impl GridField {
    pub fn new(shape: Vec<usize>, box_length: Vec<f64>, samples: Vec<f64>) -> Result<Self> {
        validate_geometry(&shape, &box_length)?;
        let expected: usize = shape.iter().product();
        if samples.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "{} samples for shape {:?} (expected {expected})",
                samples.len(),
                shape
            )));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid("samples", format!("non-finite sample at index {i}")));
        }
        Ok(Self {
            shape,
            box_length,
            samples,
        })
    }

    pub fn zeros(shape: Vec<usize>, box_length: Vec<f64>) -> Result<Self> {
        let len = shape.iter().product();
        Self::new(shape, box_length, vec![0.0; len])
    }

    /// Samples `f` at the grid nodes `x_j = i_j L_j / N_j`.
    pub fn from_fn<F>(shape: Vec<usize>, box_length: Vec<f64>, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64,
    {
        validate_geometry(&shape, &box_length)?;
        let len: usize = shape.iter().product();
        let mut samples = Vec::with_capacity(len);
        let mut x = vec![0.0; shape.len()];
        for flat in 0..len {
            let mut rem = flat;
            for axis in (0..shape.len()).rev() {
                let i = rem % shape[axis];
                rem /= shape[axis];
                x[axis] = i as f64 * box_length[axis] / shape[axis] as f64;
            }
            samples.push(f(&x));
        }
        Self::new(shape, box_length, samples)
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn box_length(&self) -> &[f64] {
        &self.box_length
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    /// Volume of one grid cell.
    pub fn cell_volume(&self) -> f64 {
        self.box_length
            .iter()
            .zip(&self.shape)
            .map(|(l, &n)| l / n as f64)
            .product()
    }

    /// `∫ |f|² dx` by the (spectrally exact) rectangle rule.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum::<f64>() * self.cell_volume()
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    pub fn same_geometry(&self, other: &GridField) -> bool {
        self.shape == other.shape && self.box_length == other.box_length
    }

    pub fn header(&self) -> GridHeader {
        GridHeader {
            dim: self.dim(),
            shape: self.shape.clone(),
            box_length: self.box_length.clone(),
            dtype: DTYPE.into(),
            layout: LAYOUT.into(),
            time: None,
        }
    }

    /// Little-endian payload bytes.
    pub fn payload(&self) -> Vec<u8> {
        self.samples.iter().flat_map(|v| v.to_le_bytes()).collect()
    }

    /// Reassembles a field from a parsed header and its payload.
    pub fn from_parts(header: &GridHeader, payload: &[u8]) -> Result<Self> {
        header.validate()?;
        let expected = header.sample_count()?;
        if !payload.len().is_multiple_of(8) || payload.len() / 8 != expected {
            return Err(Error::ShapeMismatch(format!(
                "payload has {} bytes, header {:?} needs {}",
                payload.len(),
                header.shape,
                expected.saturating_mul(8)
            )));
        }
        let samples = payload
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
            .collect();
        Self::new(header.shape.clone(), header.box_length.clone(), samples)
    }

    /// Writes `<stem>.json` and `<stem>.field`; returns both paths.
    pub fn write(&self, stem: &Path, time: Option<f64>) -> Result<(PathBuf, PathBuf)> {
        let header_path = stem.with_extension("json");
        let payload_path = stem.with_extension("field");
        let mut header = self.header();
        header.time = time;
        let json = serde_json::to_string_pretty(&header).map_err(|e| Error::Format(e.to_string()))?;
        fs::write(&header_path, json).map_err(|e| Error::io(&header_path, e))?;
        fs::write(&payload_path, self.payload()).map_err(|e| Error::io(&payload_path, e))?;
        Ok((header_path, payload_path))
    }

    /// Reads a field written by [`GridField::write`].
    pub fn read(stem: &Path) -> Result<(Self, GridHeader)> {
        let header_path = stem.with_extension("json");
        let payload_path = stem.with_extension("field");
        let text = fs::read_to_string(&header_path).map_err(|e| Error::io(&header_path, e))?;
        let header = GridHeader::parse(&text)?;
        let payload = fs::read(&payload_path).map_err(|e| Error::io(&payload_path, e))?;
        Ok((Self::from_parts(&header, &payload)?, header))
    }
}

fn validate_geometry(shape: &[usize], box_length: &[f64]) -> Result<()> {
    if !(1..=2).contains(&shape.len()) {
        return Err(Error::invalid("dim", format!("grid fields are 1- or 2-dimensional, got {}", shape.len())));
    }
    if box_length.len() != shape.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} box lengths for a {}-dimensional shape",
            box_length.len(),
            shape.len()
        )));
    }
    if shape.contains(&0) {
        return Err(Error::invalid("shape", "every axis needs at least one sample"));
    }
    if box_length.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
        return Err(Error::invalid("box_length", "box lengths must be positive and finite"));
    }
    Ok(())
}

/// JSON sidecar header of a `.field` payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridHeader {
    pub dim: usize,
    pub shape: Vec<usize>,
    pub box_length: Vec<f64>,
    pub dtype: String,
    pub layout: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
}

impl GridHeader {
    pub fn parse(text: &str) -> Result<Self> {
        let header: GridHeader = serde_json::from_str(text).map_err(|e| Error::Format(format!("grid header: {e}")))?;
        header.validate()?;
        Ok(header)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dtype != DTYPE {
            return Err(Error::Format(format!("unsupported dtype `{}` (expected `{DTYPE}`)", self.dtype)));
        }
        if self.layout != LAYOUT {
            return Err(Error::Format(format!("unsupported layout `{}` (expected `{LAYOUT}`)", self.layout)));
        }
        if self.dim != self.shape.len() {
            return Err(Error::ShapeMismatch(format!("dim {} but shape {:?}", self.dim, self.shape)));
        }
        if let Some(t) = self.time {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::invalid("time", "checkpoint time must be finite and nonnegative"));
            }
        }
        validate_geometry(&self.shape, &self.box_length)?;
        self.sample_count().map(|_| ())
    }

    pub fn sample_count(&self) -> Result<usize> {
        self.shape
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .filter(|n| n.checked_mul(8).is_some())
            .ok_or_else(|| Error::invalid("shape", "sample count overflows"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_count_must_match_shape() {
        assert!(GridField::new(vec![2, 3], vec![1.0, 1.0], vec![0.0; 5]).is_err());
        assert!(GridField::new(vec![2, 3], vec![1.0, 1.0], vec![0.0; 6]).is_ok());
        assert!(GridField::new(vec![2], vec![1.0], vec![0.0, f64::NAN]).is_err());
        assert!(GridField::new(vec![2, 2, 2], vec![1.0; 3], vec![0.0; 8]).is_err());
    }

    #[test]
    fn file_round_trip() {
        let f = GridField::from_fn(vec![4, 8], vec![1.0, 2.0], |x| x[0] + 10.0 * x[1]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let stem = dir.path().join("omega");
        f.write(&stem, Some(1.5)).unwrap();
        let (g, header) = GridField::read(&stem).unwrap();
        assert_eq!(f, g);
        assert_eq!(header.time, Some(1.5));
    }

    #[test]
    fn header_rejects_foreign_layouts() {
        let ok = r#"{"dim":1,"shape":[4],"box_length":[1.0],"dtype":"f64-le","layout":"row-major"}"#;
        assert!(GridHeader::parse(ok).is_ok());
        for bad in [
            r#"{"dim":1,"shape":[4],"box_length":[1.0],"dtype":"f32-le","layout":"row-major"}"#,
            r#"{"dim":1,"shape":[4],"box_length":[1.0],"dtype":"f64-le","layout":"column-major"}"#,
            r#"{"dim":2,"shape":[4],"box_length":[1.0],"dtype":"f64-le","layout":"row-major"}"#,
            r#"{"dim":1,"shape":[0],"box_length":[1.0],"dtype":"f64-le","layout":"row-major"}"#,
            r#"{"dim":1,"shape":[4],"box_length":[-1.0],"dtype":"f64-le","layout":"row-major"}"#,
            r#"{"dim":1,"shape":[4],"box_length":[1.0],"dtype":"f64-le","layout":"row-major","extra":1}"#,
            r#"{"dim":2,"shape":[4294967296,4294967296],"box_length":[1.0,1.0],"dtype":"f64-le","layout":"row-major"}"#,
        ] {
            assert!(GridHeader::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn payload_length_checked() {
        let h = GridHeader::parse(r#"{"dim":1,"shape":[2],"box_length":[1.0],"dtype":"f64-le","layout":"row-major"}"#)
            .unwrap();
        assert!(GridField::from_parts(&h, &[0u8; 15]).is_err());
        assert!(GridField::from_parts(&h, &[0u8; 16]).is_ok());
    }
}
