//! Expansion coefficients and the multilinear symbols `T_n`.
//!
//! The symbol of degree `2n + 1` is
//!
//! ```text
//! T_n(eta) = int_R Re prod_j (1 - exp(i eta_j zeta)) / |zeta|^{2n+1} d zeta
//!          = 2 (-1)^{n+1} / (2n)!  sum_{S nonempty} (-1)^{|S|} s_S^{2n} log|s_S|,
//! ```
//!
//! where `s_S` is the sum of the `eta_j` over the index subset `S`. Both
//! routes are implemented independently: [`t_symbol_closed`] evaluates the
//! subset sum, [`t_symbol_quadrature`] integrates in `zeta`.
//!
//! Coefficients: `c_n` are the binomial-series coefficients of
//! `(1 + x)^{-1/2}` and `d_{n,l} = 2|c_n| / (l! (2n + 1 - l)!)`.

use alloc::vec::Vec;
use core::fmt;

use libm::{cos, exp, fabs, log, sin};

use crate::quadrature::{GaussKronrod, QuadratureError};
use crate::special::{pow_log, powi, x_log, CompensatedSum};

/// Largest `n` accepted by the symbol evaluators (`2^{13} - 1` subsets).
pub const MAX_DEGREE_INDEX: usize = 6;

/// Largest tuple length accepted by [`cancellation_sum`].
pub const MAX_CANCELLATION_LEN: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SymbolError {
    DegreeOutOfRange { n: usize },
    WrongArity { expected: usize, found: usize },
    NonPositiveTolerance { tol: f64 },
    IndexOutOfRange { n: usize, l: usize },
    PowerOutOfRange { p: usize, len: usize },
    NonFinite,
    Quadrature(QuadratureError),
}

impl fmt::Display for SymbolError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolError::DegreeOutOfRange { n } => {
                write!(f, "degree index n = {n} outside 1..={MAX_DEGREE_INDEX}")
            }
            SymbolError::WrongArity { expected, found } => {
                write!(f, "expected {expected} frequency arguments, found {found}")
            }
            SymbolError::NonPositiveTolerance { tol } => write!(f, "tolerance {tol} must be positive"),
            SymbolError::IndexOutOfRange { n, l } => {
                write!(f, "index l = {l} outside 1..={} for n = {n}", 2 * n + 1)
            }
            SymbolError::PowerOutOfRange { p, len } => {
                write!(f, "power p = {p} outside 1..={} for {len} arguments", len.saturating_sub(1))
            }
            SymbolError::NonFinite => write!(f, "frequency arguments must be finite"),
            SymbolError::Quadrature(e) => write!(f, "{e}"),
        }
    }
}

impl From<QuadratureError> for SymbolError {
    fn from(e: QuadratureError) -> Self {
        SymbolError::Quadrature(e)
    }
}

/// `c_n`, from `c_0 = 1`, `c_n = -c_{n-1} (2n - 1) / (2n)`.
pub fn coeff_c(n: usize) -> f64 {
    let mut c = 1.0;
    for k in 1..=n {
        let k = k as f64;
        c *= -(2.0 * k - 1.0) / (2.0 * k);
    }
    c
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, j| acc * j as f64)
}

/// `d_{n,l} = 2 |c_n| / (l! (2n + 1 - l)!)` for `1 <= l <= 2n + 1`.
pub fn coeff_d(n: usize, l: usize) -> Result<f64, SymbolError> {
    if n == 0 {
        return Err(SymbolError::DegreeOutOfRange { n });
    }
    if l == 0 || l > 2 * n + 1 {
        return Err(SymbolError::IndexOutOfRange { n, l });
    }
    let (a, b) = (l.min(2 * n + 1 - l), l.max(2 * n + 1 - l));
    Ok(2.0 * fabs(coeff_c(n)) / (factorial(a) * factorial(b)))
}

/// A validated argument tuple for `T_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolQuery {
    n: usize,
    etas: Vec<f64>,
    tol: f64,
}

impl SymbolQuery {
    pub fn new(n: usize, etas: &[f64], tol: f64) -> Result<Self, SymbolError> {
        if n == 0 || n > MAX_DEGREE_INDEX {
            return Err(SymbolError::DegreeOutOfRange { n });
        }
        if etas.len() != 2 * n + 1 {
            return Err(SymbolError::WrongArity { expected: 2 * n + 1, found: etas.len() });
        }
        if !(tol > 0.0) {
            return Err(SymbolError::NonPositiveTolerance { tol });
        }
        if etas.iter().any(|e| !e.is_finite()) {
            return Err(SymbolError::NonFinite);
        }
        Ok(Self { n, etas: etas.to_vec(), tol })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn etas(&self) -> &[f64] {
        &self.etas
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Power of two at least as large as every `|eta_j|` (1 for the zero tuple).
    fn scale(&self) -> f64 {
        let m = self.etas.iter().fold(0.0f64, |acc, e| acc.max(fabs(*e)));
        if m == 0.0 {
            return 1.0;
        }
        let mut mu = 1.0;
        while mu < m {
            mu *= 2.0;
        }
        while mu * 0.5 >= m {
            mu *= 0.5;
        }
        mu
    }
}

/// Closed-form `T_n` by enumeration of all nonempty index subsets.
///
/// The arguments are first divided by a power of two `mu >= max|eta_j|`; the
/// `log mu` part of every term sums to zero by [`cancellation_sum`] and is
/// dropped, and the result is multiplied back by `mu^{2n}`.
pub fn t_symbol_closed(q: &SymbolQuery) -> f64 {
    let n = q.n;
    let mu = q.scale();
    let scaled: Vec<f64> = q.etas.iter().map(|e| e / mu).collect();
    let p = 2 * n as i32;
    let m = scaled.len();
    let mut acc = CompensatedSum::new();
    for mask in 1u32..(1u32 << m) {
        let s: f64 = (0..m).filter(|j| mask & (1 << j) != 0).map(|j| scaled[j]).sum();
        let term = pow_log(s, p);
        if mask.count_ones() % 2 == 1 {
            acc.add(-term);
        } else {
            acc.add(term);
        }
    }
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    sign * 2.0 / factorial(2 * n) * acc.value() * powi(mu, p)
}

// Split point of the zeta integral, in units of 1 / max|eta|.
const SPLIT: f64 = 20.0;
// Beyond |s| zeta >= ASYMPTOTIC the oscillatory tail uses its asymptotic series.
const ASYMPTOTIC: f64 = 40.0;

/// `int_z^inf cos(s t) t^{-p} dt` from the integration-by-parts series,
/// accurate once `|s| z` is comfortably larger than `p`.
fn cos_tail_asymptotic(s: f64, z: f64, p: usize) -> f64 {
    // I = -w e^{isz} z^{-p} sum_k (p)_k (w/z)^k with w = 1/(is) = -i/s.
    // (w/z)^k = (-i)^k / (s z)^k
    let sz = s * z;
    let mut re = 0.0;
    let mut im = 0.0;
    let mut mag = 1.0;
    let mut prev = f64::INFINITY;
    for k in 0..200usize {
        if k > 0 {
            mag *= (p + k - 1) as f64 / sz;
        }
        if fabs(mag) > prev || fabs(mag) < 1e-18 {
            break;
        }
        prev = fabs(mag);
        match k % 4 {
            0 => re += mag,
            1 => im -= mag,
            2 => re -= mag,
            _ => im += mag,
        }
    }
    // -w = i/s; multiply (re + i im) by i/s then by e^{isz} z^{-p}
    let (a, b) = (-im / s, re / s);
    let (c, d) = (cos(sz), sin(sz));
    (a * c - b * d) * powi(z, -(p as i32))
}

fn cos_tail(gk: &GaussKronrod, s: f64, z: f64, p: usize) -> Result<f64, QuadratureError> {
    let s_abs = fabs(s);
    if s_abs == 0.0 {
        return Ok(powi(z, 1 - p as i32) / (p as f64 - 1.0));
    }
    if s_abs * z >= ASYMPTOTIC {
        return Ok(cos_tail_asymptotic(s_abs, z, p));
    }
    let z_far = ASYMPTOTIC / s_abs;
    let (u0, u1) = (log(z), log(z_far));
    let near = gk.integrate(
        |u| {
            let t = exp(u);
            cos(s_abs * t) * powi(t, 1 - p as i32)
        },
        u0,
        u1,
    )?;
    Ok(near.value + cos_tail_asymptotic(s_abs, z_far, p))
}

/// `T_n` by direct integration over `zeta`.
///
/// The real part of the product is rewritten exactly as
/// `2^{2n+1} (-1)^n prod_j sin(eta_j zeta / 2) sin(S zeta / 2)` with
/// `S = sum_j eta_j`, which is `O(zeta^{2n+2})` at the origin without any
/// cancellation. The half line is cut at `20 / max|eta|`; the inner piece is
/// integrated adaptively and the outer piece is expanded into the cosine sum
/// `sum_S (-1)^{|S|} cos(s_S zeta)` whose terms are integrated one by one.
pub fn t_symbol_quadrature(q: &SymbolQuery) -> Result<f64, SymbolError> {
    let n = q.n;
    let p = 2 * n + 1;
    let mu = q.scale();
    let scaled: Vec<f64> = q.etas.iter().map(|e| e / mu).collect();
    if scaled.contains(&0.0) {
        return Ok(0.0);
    }
    let total: f64 = scaled.iter().sum();
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let prefactor = sign * powi(2.0, p as i32);

    let inner_tol = q.tol / 8.0;
    let gk = GaussKronrod::new(inner_tol, 1e-15).with_max_intervals(50_000);
    let inner = gk.integrate(
        |z| {
            if z == 0.0 {
                return 0.0;
            }
            let prod: f64 = scaled.iter().map(|e| sin(0.5 * e * z)).product();
            prefactor * prod * sin(0.5 * total * z) / powi(z, p as i32)
        },
        0.0,
        SPLIT,
    )?;

    let m = scaled.len();
    let mut tail = CompensatedSum::new();
    let tail_gk = GaussKronrod::new(inner_tol, 1e-17).with_max_intervals(50_000);
    for mask in 0u32..(1u32 << m) {
        let s: f64 = (0..m).filter(|j| mask & (1 << j) != 0).map(|j| scaled[j]).sum();
        let v = cos_tail(&tail_gk, s, SPLIT, p)?;
        if mask.count_ones() % 2 == 1 {
            tail.add(-v);
        } else {
            tail.add(v);
        }
    }
    let half_line = inner.value + tail.value();
    Ok(2.0 * half_line * powi(mu, 2 * n as i32))
}

/// The degree-three symbol written out term by term.
pub fn t1(eta1: f64, eta2: f64, eta3: f64) -> f64 {
    let f = |x: f64| pow_log(x, 2);
    let mut acc = CompensatedSum::new();
    acc.add(-f(eta1));
    acc.add(-f(eta2));
    acc.add(-f(eta3));
    acc.add(f(eta1 + eta2));
    acc.add(f(eta1 + eta3));
    acc.add(f(eta2 + eta3));
    acc.add(-f(eta1 + eta2 + eta3));
    acc.value()
}

/// Gradient of `(eta1, eta2) -> t1(eta1, eta2, xi - eta1 - eta2)`.
pub fn t1_gradient(xi: f64, eta1: f64, eta2: f64) -> (f64, f64) {
    let eta3 = xi - eta1 - eta2;
    let d1 = 2.0 * (x_log(eta3) - x_log(eta1) + x_log(eta1 + eta2) - x_log(xi - eta1));
    let d2 = 2.0 * (x_log(eta3) - x_log(eta2) + x_log(eta1 + eta2) - x_log(xi - eta2));
    (d1, d2)
}

/// `sum_{S nonempty} (-1)^{|S|} s_S^p`, which vanishes identically for
/// `1 <= p < len`. Returned as computed in plain floating point, so the
/// rounding residual is visible.
pub fn cancellation_sum(p: usize, etas: &[f64]) -> Result<f64, SymbolError> {
    let len = etas.len();
    if len < 2 || p == 0 || p >= len || len > MAX_CANCELLATION_LEN {
        return Err(SymbolError::PowerOutOfRange { p, len });
    }
    let mut acc = 0.0;
    for mask in 1u32..(1u32 << len) {
        let s: f64 = (0..len).filter(|j| mask & (1 << j) != 0).map(|j| etas[j]).sum();
        let term = powi(s, p as i32);
        if mask.count_ones() % 2 == 1 {
            acc -= term;
        } else {
            acc += term;
        }
    }
    Ok(acc)
}
