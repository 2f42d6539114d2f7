//! Periodic grids, discrete Fourier transforms, multipliers, Littlewood-Paley
//! projections and norms.
//!
//! # Conventions
//!
//! A grid of `N` points (even) on an interval of length `L` has nodes
//! `x_j = -L/2 + j L/N`, so the origin sits at index `N/2`. Coefficients are
//!
//! ```text
//! c_k = (1/N) sum_j f(x_j) exp(-i xi_k x_j),    f(x_j) = sum_k c_k exp(i xi_k x_j),
//! ```
//!
//! with `xi_k = 2 pi k / L`, stored in FFT order: storage index `i` holds
//! `k = i` for `i < N/2` and `k = i - N` otherwise; index `N/2` is the
//! Nyquist mode `k = -N/2`.
//!
//! On the line the transform `f^(xi) = (1/2pi) int f exp(-i xi x) dx` is
//! approximated by the density `c_k / d_xi`, where `d_xi = 2 pi / L`.
//!
//! Norms:
//! - `sobolev_norm(s)^2 = L sum_k (1 + xi_k^2)^s |c_k|^2`, so `s = 0` gives the
//!   discrete `L^2` norm of the samples, `(dx sum_j f_j^2)^{1/2}`.
//! - `z_norm(r) = max_k (|xi_k| + |xi_k|^{r+3}) |c_k| / d_xi`. A single mode
//!   `a cos(x)` on a grid containing `xi = 1` has `z_norm(7) = a L / (2 pi)`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use sqgfront_core::cutoff::{psi_ge, psi_k, psi_le, psi_tilde};
use thiserror::Error;

pub type C64 = Complex64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("grid needs an even number of points >= 2, got {0}")]
    OddOrEmptyGrid(usize),
    #[error("domain length must be positive and finite, got {0}")]
    BadLength(f64),
    #[error("expected {expected} values for this grid, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("field contains a non-finite value at index {0}")]
    NonFiniteValue(usize),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("multiplier is not finite at xi = {0}")]
    NonFiniteSymbol(f64),
    #[error("cannot resize a {from}-point field to {to} points")]
    BadResize { from: usize, to: usize },
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    type Cache = Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>;
    static PLANS: OnceLock<Cache> = OnceLock::new();
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry((n, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if inverse {
                planner.plan_fft_inverse(n)
            } else {
                planner.plan_fft_forward(n)
            }
        })
        .clone()
}

/// Uniform periodic grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierGrid {
    n: usize,
    length: f64,
}

impl FourierGrid {
    pub fn new(n_points: usize, domain_length: f64) -> Result<Self, SpectralError> {
        if n_points < 2 || !n_points.is_multiple_of(2) {
            return Err(SpectralError::OddOrEmptyGrid(n_points));
        }
        if !(domain_length > 0.0 && domain_length.is_finite()) {
            return Err(SpectralError::BadLength(domain_length));
        }
        Ok(Self { n: n_points, length: domain_length })
    }

    pub fn n_points(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn dxi(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Node `x_j = -L/2 + j dx`.
    pub fn x(&self, j: usize) -> f64 {
        -0.5 * self.length + j as f64 * self.dx()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Integer wavenumber stored at index `i`.
    pub fn k_at(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Storage index of integer wavenumber `k`, if it lies on the grid.
    pub fn index_of(&self, k: i64) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if k >= -half && k < half {
            Some(if k >= 0 { k as usize } else { (k + self.n as i64) as usize })
        } else {
            None
        }
    }

    /// `xi` at storage index `i`.
    pub fn xi_at(&self, i: usize) -> f64 {
        self.xi_at_k(self.k_at(i))
    }

    /// `xi_k = 2 pi k / L`.
    pub fn xi_at_k(&self, k: i64) -> f64 {
        k as f64 * self.dxi()
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.xi_at(i)).collect()
    }

    pub fn nyquist_index(&self) -> usize {
        self.n / 2
    }

    /// Same interval, `m` points.
    pub fn resized(&self, m: usize) -> Result<Self, SpectralError> {
        Self::new(m, self.length)
    }
}

/// Real samples on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: FourierGrid,
    samples: Vec<f64>,
}

impl RealField {
    pub fn new(grid: FourierGrid, samples: Vec<f64>) -> Result<Self, SpectralError> {
        if samples.len() != grid.n {
            return Err(SpectralError::LengthMismatch { expected: grid.n, found: samples.len() });
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(SpectralError::NonFiniteValue(i));
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: FourierGrid) -> Self {
        Self { grid, samples: vec![0.0; grid.n] }
    }

    pub fn from_fn(grid: FourierGrid, f: impl Fn(f64) -> f64) -> Self {
        Self { grid, samples: (0..grid.n).map(|j| f(grid.x(j))).collect() }
    }

    pub fn grid(&self) -> &FourierGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn forward(&self) -> SpectralField {
        forward_transform(self)
    }

    pub fn l2_norm(&self) -> f64 {
        (self.grid.dx() * self.samples.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.grid.n as f64
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid, samples: self.samples.iter().map(|v| f(*v)).collect() }
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self, SpectralError> {
        if self.grid != other.grid {
            return Err(SpectralError::GridMismatch);
        }
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| f(*a, *b)).collect();
        Ok(Self { grid: self.grid, samples })
    }

    /// Multiply by the centered coordinate `x`.
    pub fn times_x(&self) -> Self {
        let g = self.grid;
        Self { grid: g, samples: self.samples.iter().enumerate().map(|(j, v)| g.x(j) * v).collect() }
    }
}

/// Fourier coefficients on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: FourierGrid,
    coeffs: Vec<C64>,
}

/// Forward transform with the documented normalization.
pub fn forward_transform(f: &RealField) -> SpectralField {
    let n = f.grid.n;
    let mut buf: Vec<C64> = f.samples.iter().map(|v| C64::new(*v, 0.0)).collect();
    plan(n, false).process(&mut buf);
    let scale = 1.0 / n as f64;
    for (i, c) in buf.iter_mut().enumerate() {
        let sign = if i % 2 == 0 { scale } else { -scale };
        *c *= sign;
    }
    SpectralField { grid: f.grid, coeffs: buf }
}

/// Inverse transform; imaginary parts of the synthesized samples are dropped.
pub fn inverse_transform(f: &SpectralField) -> RealField {
    let samples = f.synthesize().into_iter().map(|z| z.re).collect();
    RealField { grid: f.grid, samples }
}

impl SpectralField {
    pub fn new(grid: FourierGrid, coeffs: Vec<C64>) -> Result<Self, SpectralError> {
        if coeffs.len() != grid.n {
            return Err(SpectralError::LengthMismatch { expected: grid.n, found: coeffs.len() });
        }
        if let Some(i) = coeffs.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(SpectralError::NonFiniteValue(i));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn zeros(grid: FourierGrid) -> Self {
        Self { grid, coeffs: vec![C64::new(0.0, 0.0); grid.n] }
    }

    /// Coefficients of complex samples; partner of [`SpectralField::synthesize`].
    pub fn from_complex_samples(grid: FourierGrid, samples: &[C64]) -> Result<Self, SpectralError> {
        if samples.len() != grid.n {
            return Err(SpectralError::LengthMismatch { expected: grid.n, found: samples.len() });
        }
        let mut buf = samples.to_vec();
        plan(grid.n, false).process(&mut buf);
        let scale = 1.0 / grid.n as f64;
        for (i, c) in buf.iter_mut().enumerate() {
            *c *= if i % 2 == 0 { scale } else { -scale };
        }
        Self::new(grid, buf)
    }

    pub fn grid(&self) -> &FourierGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [C64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    /// Coefficient of integer wavenumber `k` (zero off the grid).
    pub fn coeff(&self, k: i64) -> C64 {
        self.grid.index_of(k).map(|i| self.coeffs[i]).unwrap_or_default()
    }

    pub fn inverse(&self) -> RealField {
        inverse_transform(self)
    }

    /// Complex samples `sum_k c_k exp(i xi_k x_j)`.
    pub fn synthesize(&self) -> Vec<C64> {
        let n = self.grid.n;
        let mut buf: Vec<C64> =
            self.coeffs.iter().enumerate().map(|(i, c)| if i % 2 == 0 { *c } else { -*c }).collect();
        plan(n, true).process(&mut buf);
        buf
    }

    /// Largest `|c_k - conj(c_{-k})|`, with the Nyquist mode compared to itself.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.grid.n;
        (0..n)
            .map(|i| {
                let j = (n - i) % n;
                (self.coeffs[i] - self.coeffs[j].conj()).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Project onto conjugate-symmetric coefficients (the real part of the field).
    pub fn symmetrized(&self) -> Self {
        let n = self.grid.n;
        let coeffs = (0..n)
            .map(|i| {
                let j = (n - i) % n;
                0.5 * (self.coeffs[i] + self.coeffs[j].conj())
            })
            .collect();
        Self { grid: self.grid, coeffs }
    }

    pub fn scale(&self, a: f64) -> Self {
        Self { grid: self.grid, coeffs: self.coeffs.iter().map(|c| c * a).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SpectralError> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SpectralError> {
        self.zip(other, |a, b| a - b)
    }

    pub fn zip(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self, SpectralError> {
        if self.grid != other.grid {
            return Err(SpectralError::GridMismatch);
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(*a, *b)).collect();
        Ok(Self { grid: self.grid, coeffs })
    }

    /// Multiply coefficient `i` by `m(i, xi_i)`.
    pub fn map_modes(&self, m: impl Fn(usize, f64) -> C64) -> Self {
        let g = self.grid;
        let coeffs = self.coeffs.iter().enumerate().map(|(i, c)| c * m(i, g.xi_at(i))).collect();
        Self { grid: g, coeffs }
    }

    /// Apply a built-in multiplier.
    pub fn apply(&self, m: Multiplier) -> Self {
        let nyq = self.grid.nyquist_index();
        self.map_modes(|i, xi| if i == nyq && m.is_odd() { C64::new(0.0, 0.0) } else { m.symbol(xi) })
    }

    /// Apply an arbitrary symbol. The zero mode uses `m(0)` when finite and `0`
    /// otherwise; a non-finite value anywhere else is an error.
    pub fn apply_fn(&self, m: impl Fn(f64) -> C64) -> Result<Self, SpectralError> {
        let g = self.grid;
        let mut coeffs = Vec::with_capacity(g.n);
        for (i, c) in self.coeffs.iter().enumerate() {
            let xi = g.xi_at(i);
            let v = m(xi);
            let finite = v.re.is_finite() && v.im.is_finite();
            if i == 0 {
                coeffs.push(if finite { c * v } else { C64::new(0.0, 0.0) });
            } else if finite {
                coeffs.push(c * v);
            } else {
                return Err(SpectralError::NonFiniteSymbol(xi));
            }
        }
        Ok(Self { grid: g, coeffs })
    }

    /// `psi_j(D) f`.
    pub fn dyadic_project(&self, j: i32) -> Self {
        self.map_modes(|_, xi| C64::new(psi_k(xi, j), 0.0))
    }

    /// `psi_{<=j}(D) f`.
    pub fn project_low(&self, j: i32) -> Self {
        self.map_modes(|_, xi| C64::new(psi_le(xi, j), 0.0))
    }

    /// `psi_{>=j}(D) f`.
    pub fn project_high(&self, j: i32) -> Self {
        self.map_modes(|_, xi| C64::new(psi_ge(xi, j), 0.0))
    }

    /// `psi~_j(D) f`.
    pub fn project_tilde(&self, j: i32) -> Self {
        self.map_modes(|_, xi| C64::new(psi_tilde(xi, j), 0.0))
    }

    /// Dyadic indices whose blocks meet the nonzero grid wavenumbers.
    pub fn dyadic_range(&self) -> std::ops::RangeInclusive<i32> {
        let lo = self.grid.dxi();
        let hi = (self.grid.n / 2) as f64 * self.grid.dxi();
        let a = *sqgfront_core::cutoff::active_blocks(lo).start();
        let b = *sqgfront_core::cutoff::active_blocks(hi).end();
        a..=b
    }

    pub fn sobolev_norm(&self, s: f64) -> f64 {
        let l = self.grid.length;
        let sum: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let xi = self.grid.xi_at(i);
                (1.0 + xi * xi).powf(s) * c.norm_sqr()
            })
            .sum();
        (l * sum).sqrt()
    }

    /// `(L sum_k |xi_k|^{2s} |c_k|^2)^{1/2}`.
    pub fn homogeneous_norm(&self, s: f64) -> f64 {
        let l = self.grid.length;
        let sum: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != 0)
            .map(|(i, c)| self.grid.xi_at(i).abs().powf(2.0 * s) * c.norm_sqr())
            .sum();
        (l * sum).sqrt()
    }

    pub fn l2_norm(&self) -> f64 {
        self.sobolev_norm(0.0)
    }

    pub fn z_norm(&self, r: i32) -> f64 {
        let dxi = self.grid.dxi();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let a = self.grid.xi_at(i).abs();
                (a + a.powi(r + 3)) * c.norm() / dxi
            })
            .fold(0.0, f64::max)
    }

    /// Zero-pad to `m >= N` points on the same interval. The Nyquist
    /// coefficient is split evenly between `+-N/2`.
    pub fn padded(&self, m: usize) -> Result<Self, SpectralError> {
        let n = self.grid.n;
        if m < n || !m.is_multiple_of(2) {
            return Err(SpectralError::BadResize { from: n, to: m });
        }
        let big = self.grid.resized(m)?;
        let mut out = vec![C64::new(0.0, 0.0); m];
        let half = n / 2;
        for i in 0..half {
            out[i] = self.coeffs[i];
        }
        for i in half + 1..n {
            out[m - (n - i)] = self.coeffs[i];
        }
        if m > n {
            let nyq = 0.5 * self.coeffs[half];
            out[half] = nyq;
            out[m - half] = nyq;
        } else {
            out[half] = self.coeffs[half];
        }
        Ok(Self { grid: big, coeffs: out })
    }

    /// Keep modes `|k| < n/2` on an `n`-point grid; the Nyquist slot is zero.
    pub fn truncated(&self, n: usize) -> Result<Self, SpectralError> {
        let m = self.grid.n;
        if n > m || n < 2 || !n.is_multiple_of(2) {
            return Err(SpectralError::BadResize { from: m, to: n });
        }
        let small = self.grid.resized(n)?;
        let mut out = vec![C64::new(0.0, 0.0); n];
        let half = n / 2;
        for i in 0..half {
            out[i] = self.coeffs[i];
        }
        for i in half + 1..n {
            out[i] = self.coeffs[m - (n - i)];
        }
        Ok(Self { grid: small, coeffs: out })
    }

    /// Trigonometric interpolant and its derivative at an arbitrary point
    /// (Nyquist mode split as in [`SpectralField::padded`]).
    pub fn evaluate(&self, x: f64) -> (f64, f64) {
        let g = self.grid;
        let nyq = g.nyquist_index();
        let (mut v, mut d) = (0.0, 0.0);
        for (i, c) in self.coeffs.iter().enumerate() {
            let xi = g.xi_at(i);
            if i == nyq {
                v += c.re * (xi * x).cos();
                d -= c.re * xi * (xi * x).sin();
                continue;
            }
            let e = C64::from_polar(1.0, xi * x);
            let z = c * e;
            v += z.re;
            d += (z * C64::new(0.0, xi)).re;
        }
        (v, d)
    }

    /// Inner product `L sum_k conj(a_k) b_k`, the discrete `int conj(f) g dx`.
    pub fn inner(&self, other: &Self) -> Result<C64, SpectralError> {
        if self.grid != other.grid {
            return Err(SpectralError::GridMismatch);
        }
        let s: C64 = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.conj() * b).sum();
        Ok(s * self.grid.length)
    }
}

/// Built-in Fourier multipliers. All vanish at `xi = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Multiplier {
    /// `log|xi|`
    Log,
    /// `|xi|^s`, `s > 0`
    AbsPow(f64),
    /// `i xi`
    Deriv,
    /// `(i xi)^m`
    DerivPow(u32),
    /// `i xi log|xi|`
    DerivLog,
    /// `exp(i theta xi log|xi|)` (identity at the zero and Nyquist modes)
    LogPhase(f64),
}

impl Multiplier {
    pub fn symbol(&self, xi: f64) -> C64 {
        if xi == 0.0 {
            return match self {
                Multiplier::LogPhase(_) => C64::new(1.0, 0.0),
                Multiplier::DerivPow(0) => C64::new(1.0, 0.0),
                _ => C64::new(0.0, 0.0),
            };
        }
        match *self {
            Multiplier::Log => C64::new(xi.abs().ln(), 0.0),
            Multiplier::AbsPow(s) => C64::new(xi.abs().powf(s), 0.0),
            Multiplier::Deriv => C64::new(0.0, xi),
            Multiplier::DerivPow(m) => C64::new(0.0, xi).powu(m),
            Multiplier::DerivLog => C64::new(0.0, xi * xi.abs().ln()),
            Multiplier::LogPhase(theta) => C64::from_polar(1.0, theta * xi * xi.abs().ln()),
        }
    }

    /// Odd symbols are zeroed at the Nyquist mode; the phase is set to 1 there.
    fn is_odd(&self) -> bool {
        matches!(self, Multiplier::Deriv | Multiplier::DerivLog)
            || matches!(self, Multiplier::DerivPow(m) if m % 2 == 1)
    }
}

impl SpectralField {
    fn nyquist_fixed(&self, m: Multiplier) -> Self {
        let nyq = self.grid.nyquist_index();
        self.map_modes(|i, xi| if i == nyq { C64::new(1.0, 0.0) } else { m.symbol(xi) })
    }

    /// Multiply by `exp(i theta xi log|xi|)`; zero and Nyquist modes are untouched.
    pub fn log_phase(&self, theta: f64) -> Self {
        self.nyquist_fixed(Multiplier::LogPhase(theta))
    }
}
