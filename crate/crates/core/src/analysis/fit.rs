//! Power-law fits `sup ≈ C t^p` of sampled decay quantities.

use serde::{Deserialize, Serialize};

use crate::energies::monitor::DecaySample;
use crate::error::{Error, Result};

/// Smallest admissible `t_hi / t_lo`.
pub const MIN_WINDOW_RATIO: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub quantity: String,
    pub t_lo: f64,
    pub t_hi: f64,
    pub exponent: f64,
    pub amplitude: f64,
    /// RMS deviation of `log sup` from the fitted line.
    pub residual: f64,
    /// Samples inside the window.
    pub n: usize,
    /// Fewer than two positive samples; exponent and amplitude are zero.
    pub degenerate: bool,
}

/// Default window `[t_end/4, t_end]`.
pub fn default_window(t_end: f64) -> (f64, f64) {
    (t_end / 4.0, t_end)
}

/// Least-squares line through `(log t, log v)` for the samples with
/// `t ∈ [lo, hi]`.
pub fn fit_decay(quantity: &str, series: &[(f64, f64)], window: (f64, f64)) -> Result<DecayFit> {
    let (lo, hi) = window;
    let short = || Error::WindowTooShort { lo, hi };
    if !(lo > 0.0) || !(hi >= MIN_WINDOW_RATIO * lo) {
        return Err(short());
    }
    let t_min = series.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let t_max = series.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let slack = 1e-9 * hi;
    if t_min > lo + slack || t_max < hi - slack {
        return Err(short());
    }
    let inside: Vec<(f64, f64)> = series.iter().copied().filter(|(t, _)| *t >= lo - slack && *t <= hi + slack).collect();
    let pts: Vec<(f64, f64)> = inside.iter().filter(|(_, v)| *v > 0.0).map(|(t, v)| (t.ln(), v.ln())).collect();
    let mut fit = DecayFit {
        quantity: quantity.to_string(),
        t_lo: lo,
        t_hi: hi,
        exponent: 0.0,
        amplitude: 0.0,
        residual: 0.0,
        n: inside.len(),
        degenerate: true,
    };
    if pts.len() < 2 {
        return Ok(fit);
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Ok(fit);
    }
    let p = sxy / sxx;
    let b = my - p * mx;
    fit.exponent = p;
    fit.amplitude = b.exp();
    fit.residual = (pts.iter().map(|q| (q.1 - b - p * q.0).powi(2)).sum::<f64>() / n).sqrt();
    fit.degenerate = false;
    Ok(fit)
}

/// Fits one of [`DecaySample::QUANTITIES`] over the monitored samples.
pub fn fit_quantity(samples: &[DecaySample], quantity: &str, window: (f64, f64)) -> Result<DecayFit> {
    if !DecaySample::QUANTITIES.contains(&quantity) {
        return Err(Error::UnknownQuantity {
            given: quantity.to_string(),
            valid: DecaySample::QUANTITIES.join(", "),
        });
    }
    let series: Vec<(f64, f64)> = samples.iter().map(|s| (s.t, s.get(quantity).unwrap_or(0.0))).collect();
    fit_decay(quantity, &series, window)
}

pub const FITS_CSV_HEADER: &str = "quantity,t_lo,t_hi,exponent,amplitude,residual,n,degenerate";

impl DecayFit {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{:?},{:?},{:?},{:?},{:?},{},{}",
            self.quantity, self.t_lo, self.t_hi, self.exponent, self.amplitude, self.residual, self.n, self.degenerate
        )
    }
}
