//! Algebraic decay exponents by least squares on `(log(1+t), log y)`.

use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub window: (f64, f64),
    pub n_points: usize,
}

pub const MIN_POINTS: usize = 8;
pub const MIN_SPAN: f64 = 10.0;

/// Fits `y ≈ e^{intercept}(1+t)^{slope}` over samples with `t` inside
/// `window` (inclusive).
pub fn fit_decay(times: &[f64], values: &[f64], window: (f64, f64)) -> Result<DecayFit> {
    if times.len() != values.len() {
        return Err(Error::InvalidInput("times and values differ in length".into()));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (&t, &y) in times.iter().zip(values) {
        if t < window.0 || t > window.1 {
            continue;
        }
        if !(y > 0.0) {
            return Err(Error::NonPositiveValue { t, value: y });
        }
        lo = lo.min(t);
        hi = hi.max(t);
        xs.push((1.0 + t).ln());
        ys.push(y.ln());
    }
    let n = xs.len();
    if n < MIN_POINTS || !(hi >= MIN_SPAN * lo) {
        return Err(Error::WindowTooSmall { n_points: n, t_min: lo, t_max: hi });
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let stderr = (ssr / (nf - 2.0) / sxx).sqrt();
    Ok(DecayFit { slope, intercept, stderr, window: (lo, hi), n_points: n })
}
