//! Globally adaptive Gauss-Kronrod (7/15) quadrature.

use alloc::collections::BinaryHeap;
use core::cmp::Ordering;
use core::fmt;

use libm::fabs;

use crate::special::CompensatedSum;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of a converged integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadratureError {
    /// The subdivision budget ran out before the tolerance was met.
    BudgetExhausted { value: f64, error: f64, intervals: usize },
    /// The integrand returned NaN or an infinity.
    NonFinite { at: f64 },
}

impl fmt::Display for QuadratureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuadratureError::BudgetExhausted { value, error, intervals } => write!(
                f,
                "quadrature did not converge after {intervals} intervals (value {value:e}, error estimate {error:e})"
            ),
            QuadratureError::NonFinite { at } => write!(f, "integrand is not finite at {at:e}"),
        }
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive integrator configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussKronrod {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for GaussKronrod {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 0.0, max_intervals: 2000 }
    }
}

impl GaussKronrod {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Self {
        Self { rel_tol, abs_tol, ..Self::default() }
    }

    pub fn with_max_intervals(mut self, max_intervals: usize) -> Self {
        self.max_intervals = max_intervals;
        self
    }

    fn rule<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<Panel, QuadratureError> {
        let center = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let fc = f(center);
        if !fc.is_finite() {
            return Err(QuadratureError::NonFinite { at: center });
        }
        let mut kronrod = WGK[7] * fc;
        let mut gauss = WG[3] * fc;
        for j in 0..7 {
            let dx = half * XGK[j];
            let f1 = f(center - dx);
            let f2 = f(center + dx);
            if !f1.is_finite() {
                return Err(QuadratureError::NonFinite { at: center - dx });
            }
            if !f2.is_finite() {
                return Err(QuadratureError::NonFinite { at: center + dx });
            }
            kronrod += WGK[j] * (f1 + f2);
            if j % 2 == 1 {
                gauss += WG[j / 2] * (f1 + f2);
            }
        }
        let value = kronrod * half;
        let error = fabs((kronrod - gauss) * half);
        Ok(Panel { a, b, value, error })
    }

    /// Integrate `f` over the finite interval `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(
        &self,
        mut f: F,
        a: f64,
        b: f64,
    ) -> Result<Estimate, QuadratureError> {
        if a == b {
            return Ok(Estimate { value: 0.0, error: 0.0, evaluations: 0 });
        }
        let mut heap = BinaryHeap::new();
        let first = Self::rule(&mut f, a, b)?;
        let mut evaluations = 15;
        let mut value = first.value;
        let mut error = first.error;
        heap.push(first);
        loop {
            if error <= self.abs_tol.max(self.rel_tol * fabs(value)) {
                break;
            }
            if heap.len() >= self.max_intervals {
                return Err(QuadratureError::BudgetExhausted { value, error, intervals: heap.len() });
            }
            let worst = heap.pop().expect("heap is never empty");
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                // Interval can no longer be split in floating point.
                return Err(QuadratureError::BudgetExhausted { value, error, intervals: heap.len() + 1 });
            }
            let left = Self::rule(&mut f, worst.a, mid)?;
            let right = Self::rule(&mut f, mid, worst.b)?;
            evaluations += 30;
            value += left.value + right.value - worst.value;
            error += left.error + right.error - worst.error;
            heap.push(left);
            heap.push(right);
            // Refresh running sums now and then to stop drift.
            if heap.len() % 64 == 0 {
                let (v, e) = totals(&heap);
                value = v;
                error = e;
            }
        }
        let (value, error) = totals(&heap);
        Ok(Estimate { value, error, evaluations })
    }

    /// Integrate `f` over `[a, inf)` through the map `x = a + (1 - t) / t`.
    pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(
        &self,
        mut f: F,
        a: f64,
    ) -> Result<Estimate, QuadratureError> {
        self.integrate(
            |t| {
                if t <= 0.0 {
                    return 0.0;
                }
                let x = a + (1.0 - t) / t;
                f(x) / (t * t)
            },
            0.0,
            1.0,
        )
    }
}

fn totals(heap: &BinaryHeap<Panel>) -> (f64, f64) {
    let mut v = CompensatedSum::new();
    let mut e = 0.0;
    for p in heap.iter() {
        v.add(p.value);
        e += p.error;
    }
    (v.value(), e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let q = GaussKronrod::new(1e-14, 0.0);
        let est = q.integrate(|x| x.powi(10) - 3.0 * x * x, -1.0, 2.0).unwrap();
        let exact = (2f64.powi(11) + 1.0) / 11.0 - (8.0 + 1.0);
        assert!((est.value - exact).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_integrand_converges() {
        let q = GaussKronrod::new(1e-12, 1e-14);
        let est = q.integrate(|x| (50.0 * x).cos(), 0.0, PI).unwrap();
        assert!(est.value.abs() < 1e-12);
        let est = q.integrate(|x| (50.0 * x).sin() * x, 0.0, PI).unwrap();
        let exact = -PI / 50.0;
        assert!((est.value - exact).abs() < 1e-12 * exact.abs());
    }

    #[test]
    fn infinite_interval() {
        let q = GaussKronrod::new(1e-12, 0.0);
        let est = q.integrate_to_infinity(|x| 1.0 / (1.0 + x * x), 0.0).unwrap();
        assert!((est.value - PI / 2.0).abs() < 1e-11);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let q = GaussKronrod::new(1e-15, 0.0).with_max_intervals(4);
        let err = q.integrate(|x| (1.0 / (x + 1e-3)).sin(), 0.0, 1.0).unwrap_err();
        assert!(matches!(err, QuadratureError::BudgetExhausted { .. }));
    }

    #[test]
    fn non_finite_is_reported() {
        let q = GaussKronrod::default();
        let err = q.integrate(|x| if x > 0.5 { f64::NAN } else { x }, 0.0, 1.0).unwrap_err();
        assert!(matches!(err, QuadratureError::NonFinite { .. }));
    }
}
