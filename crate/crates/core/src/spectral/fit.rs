//! Power-law exponents from energy traces.

use super::trace::EnergyTrace;
use crate::error::{Error, Result};

/// Ordinary least-squares slope and intercept of `y` against `x`.
pub fn least_squares(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Degenerate(format!("need at least two paired samples, got {} and {}", x.len(), y.len())));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Slope of `log E` against `log(1 + t)` over the samples with `t ∈ [lo, hi]`.
pub fn loglog_slope(trace: &EnergyTrace, window: [f64; 2]) -> Result<f64> {
    let [lo, hi] = window;
    let (xs, ys): (Vec<f64>, Vec<f64>) = trace
        .iter()
        .filter(|(t, _)| (lo..=hi).contains(t))
        .map(|(t, e)| {
            if e > 0.0 {
                Ok(((1.0 + t).ln(), e.ln()))
            } else {
                Err(Error::Degenerate(format!("nonpositive energy {e} at t = {t}")))
            }
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    if xs.len() < 5 {
        return Err(Error::Degenerate(format!(
            "window [{lo}, {hi}] holds {} samples, need at least 5",
            xs.len()
        )));
    }
    least_squares(&xs, &ys).map(|(slope, _)| slope)
}

/// `count` log-spaced points covering `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && count >= 2, "log grid needs 0 < lo < hi and 2+ points");
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| {
            if i == count - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::trace::TraceSource;

    fn trace(f: impl Fn(f64) -> f64) -> EnergyTrace {
        let times = log_grid(1e-2, 1e4, 50);
        let values = times.iter().map(|&t| f(t)).collect();
        EnergyTrace::new(times, values, TraceSource::NseSolver).unwrap()
    }

    #[test]
    fn exact_power_law() {
        let s = loglog_slope(&trace(|t| 1.0 / (1.0 + t)), [0.0, 1e4]).unwrap();
        assert!((s + 1.0).abs() < 1e-9);
        let s = loglog_slope(&trace(|t| 3.0 * (1.0 + t).powf(-2.5)), [1.0, 1e3]).unwrap();
        assert!((s + 2.5).abs() < 1e-9);
    }

    #[test]
    fn constant_trace_has_zero_slope() {
        assert!(loglog_slope(&trace(|_| 2.0), [0.0, 1e4]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn window_errors() {
        assert!(loglog_slope(&trace(|_| 2.0), [2e4, 3e4]).is_err());
        assert!(loglog_slope(&trace(|t| if t > 1.0 { 0.0 } else { 1.0 }), [0.0, 1e4]).is_err());
    }

    #[test]
    fn grid_endpoints() {
        let g = log_grid(10.0, 1e4, 7);
        assert_eq!(g.len(), 7);
        assert!((g[0] - 10.0).abs() < 1e-12);
        assert_eq!(g[6], 1e4);
        assert!((g[1] - 10.0 * 10f64.powf(0.5)).abs() < 1e-9);
    }
}
