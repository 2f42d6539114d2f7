//! Power-law fitting on log-log axes.

use core::fmt;

use libm::log;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitError {
    TooFewSamples { found: usize, required: usize },
    NonPositive { t: f64, value: f64 },
}

impl fmt::Display for FitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FitError::TooFewSamples { found, required } => {
                write!(f, "{found} samples in window, at least {required} required")
            }
            FitError::NonPositive { t, value } => {
                write!(f, "sample ({t}, {value}) is not positive; log-log fit undefined")
            }
        }
    }
}

pub const MIN_SAMPLES: usize = 10;

/// Least-squares slope of `log value` against `log t` over samples with
/// `window.0 <= t <= window.1`.
pub fn decay_fit(series: &[(f64, f64)], window: (f64, f64)) -> Result<f64, FitError> {
    let mut n = 0usize;
    let (mut sx, mut sy) = (0.0, 0.0);
    for &(t, v) in series.iter().filter(|(t, _)| *t >= window.0 && *t <= window.1) {
        if !(t > 0.0 && v > 0.0) {
            return Err(FitError::NonPositive { t, value: v });
        }
        n += 1;
        sx += log(t);
        sy += log(v);
    }
    if n < MIN_SAMPLES {
        return Err(FitError::TooFewSamples { found: n, required: MIN_SAMPLES });
    }
    let (mx, my) = (sx / n as f64, sy / n as f64);
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(t, v) in series.iter().filter(|(t, _)| *t >= window.0 && *t <= window.1) {
        let dx = log(t) - mx;
        sxx += dx * dx;
        sxy += dx * (log(v) - my);
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn exact_power_law() {
        let s: Vec<(f64, f64)> = (0..50).map(|i| {
            let t = 20.0 + 4.0 * i as f64;
            (t, 3.0 * t.powf(-0.5))
        }).collect();
        assert!((decay_fit(&s, (20.0, 200.0)).unwrap() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn constant_series_has_zero_slope() {
        let s: Vec<(f64, f64)> = (1..=20).map(|i| (i as f64, 2.5)).collect();
        assert!(decay_fit(&s, (0.0, 100.0)).unwrap().abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        let s: Vec<(f64, f64)> = (1..=5).map(|i| (i as f64, 1.0)).collect();
        assert!(matches!(decay_fit(&s, (0.0, 10.0)), Err(FitError::TooFewSamples { .. })));
        let mut s: Vec<(f64, f64)> = (1..=20).map(|i| (i as f64, 1.0)).collect();
        s[3].1 = 0.0;
        assert!(matches!(decay_fit(&s, (0.0, 100.0)), Err(FitError::NonPositive { .. })));
    }
}
