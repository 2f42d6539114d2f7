//! The nonlinear term `N(phi)` in the evolution law `phi_t + N(phi) = 2 L phi_x`.
//!
//! Three evaluation routes are provided and checked against each other:
//!
//! * physical products on a zero-padded grid ([`cubic_term_spectral`],
//!   [`higher_term_spectral`], [`full_nonlinearity`]);
//! * direct multilinear convolution of Fourier coefficients weighted by the
//!   symbols `T_n` ([`cubic_term_convolution`], [`multilinear_convolution`]);
//! * quadrature of the original `zeta` integral ([`zeta_integral_oracle`]).
//!
//! The degree `2n + 1` term is
//!
//! ```text
//! N_n(phi) = d/dx sum_{l=1}^{2n+1} (-1)^{l+n} d_{n,l} phi^{2n+1-l} d^{2n}/dx^{2n} L(phi^l)
//! ```
//!
//! whose Fourier coefficients are `-c_n/(2n+1) i xi sum T_n(eta) prod c(eta_j)`.
//! The physical-product form relies on cancellations between large terms and
//! is only meaningful for smooth fields whose spectrum has decayed to rounding
//! level well inside the grid.
//!
//! With a padding ratio of at least `n + 1`, every product is free of aliasing
//! on the retained modes `|k| < N/2`, so the product and convolution routes
//! compute the same trigonometric polynomial. Outputs have a zero Nyquist slot.

use rayon::prelude::*;
use sqgfront_core::quadrature::GaussKronrod;
use sqgfront_core::special::hurwitz_zeta;
use sqgfront_core::symbols::{coeff_c, coeff_d, t1, t_symbol_closed, MAX_DEGREE_INDEX};
use sqgfront_core::SymbolQuery;
use thiserror::Error;

use crate::spectral::{FourierGrid, RealField, SpectralError, SpectralField, C64};

/// Largest grid accepted by the `O(N^3)` cubic convolution.
pub const CONVOLUTION_CAP: usize = 128;
/// Largest number of coefficient tuples enumerated by [`multilinear_convolution`].
pub const TUPLE_CAP: u128 = 50_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NonlinearityError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("invalid nonlinearity configuration: {0}")]
    InvalidConfig(String),
    #[error("degree index n = {n} outside 1..={max}")]
    DegreeOutOfRange { n: usize, max: usize },
    #[error("grid of {n} points exceeds the convolution cap of {cap}")]
    GridTooLarge { n: usize, cap: usize },
    #[error("{0} coefficient tuples exceed the enumeration cap")]
    TooManyTuples(u128),
    #[error("max |phi_x| = {0} violates the small-slope requirement (< 1/2)")]
    SlopeTooLarge(f64),
    #[error("grid index {index} out of range for {n} points")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("oracle quadrature failed: {0}")]
    Quadrature(String),
}

/// Truncation and discretization controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlinearityConfig {
    pub n_max: usize,
    pub dealias_factor: f64,
    pub oracle_cutoff: f64,
}

impl Default for NonlinearityConfig {
    fn default() -> Self {
        Self { n_max: 1, dealias_factor: 2.0, oracle_cutoff: 1e3 }
    }
}

impl NonlinearityConfig {
    pub fn with_n_max(n_max: usize) -> Self {
        Self { n_max, dealias_factor: (n_max + 1).max(2) as f64, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), NonlinearityError> {
        if self.n_max == 0 || self.n_max > MAX_DEGREE_INDEX {
            return Err(NonlinearityError::DegreeOutOfRange { n: self.n_max, max: MAX_DEGREE_INDEX });
        }
        let need = (self.n_max + 1).max(2) as f64;
        if !(self.dealias_factor >= need) {
            return Err(NonlinearityError::InvalidConfig(format!(
                "dealias_factor {} below {} for n_max = {}",
                self.dealias_factor, need, self.n_max
            )));
        }
        if !(self.oracle_cutoff > 0.0 && self.oracle_cutoff.is_finite()) {
            return Err(NonlinearityError::InvalidConfig(format!(
                "oracle_cutoff {} must be positive",
                self.oracle_cutoff
            )));
        }
        Ok(())
    }

    fn padded_size(&self, n: usize) -> usize {
        padded_size(n, self.dealias_factor)
    }
}

fn padded_size(n: usize, factor: f64) -> usize {
    let m = (factor * n as f64).ceil() as usize;
    m.div_ceil(2) * 2
}

/// Samples of `phi` on the padded grid.
fn fine_samples(phi_hat: &SpectralField, m: usize) -> Result<Vec<f64>, SpectralError> {
    Ok(phi_hat.padded(m)?.inverse().into_samples())
}

/// `(i xi)^{2n} log|xi|` applied to real samples on the fine grid.
fn log_even_derivative(grid: FourierGrid, samples: Vec<f64>, n: usize) -> Result<Vec<f64>, SpectralError> {
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let f = RealField::new(grid, samples)?.forward();
    let g = f.map_modes(|_, xi| {
        if xi == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            C64::new(sign * xi.powi(2 * n as i32) * xi.abs().ln(), 0.0)
        }
    });
    Ok(g.inverse().into_samples())
}

/// `d/dx` of fine-grid samples, truncated back to `n` points.
fn differentiate_and_truncate(grid: FourierGrid, samples: Vec<f64>, n: usize) -> Result<SpectralField, SpectralError> {
    let f = RealField::new(grid, samples)?.forward();
    f.map_modes(|_, xi| C64::new(0.0, xi)).truncated(n)
}

fn cubic_hat(phi_hat: &SpectralField, m: usize) -> Result<SpectralField, SpectralError> {
    let n = phi_hat.grid().n_points();
    let fine = phi_hat.grid().resized(m)?;
    let u = fine_samples(phi_hat, m)?;
    let u2: Vec<f64> = u.iter().map(|v| v * v).collect();
    let u3: Vec<f64> = u.iter().map(|v| v * v * v).collect();
    let l_u = log_even_derivative(fine, u.clone(), 1)?;
    let l_u2 = log_even_derivative(fine, u2.clone(), 1)?;
    let l_u3 = log_even_derivative(fine, u3, 1)?;
    let inner: Vec<f64> = (0..m).map(|j| 0.5 * (u2[j] * l_u[j] - u[j] * l_u2[j] + l_u3[j] / 3.0)).collect();
    differentiate_and_truncate(fine, inner, n)
}

fn degree_hat(phi_hat: &SpectralField, n_deg: usize, m: usize) -> Result<SpectralField, NonlinearityError> {
    let n = phi_hat.grid().n_points();
    let fine = phi_hat.grid().resized(m)?;
    let u = fine_samples(phi_hat, m)?;
    let top = 2 * n_deg + 1;
    // powers[l] = u^l
    let mut powers = vec![vec![1.0; m]];
    for l in 1..=top {
        let next: Vec<f64> = powers[l - 1].iter().zip(&u).map(|(a, b)| a * b).collect();
        powers.push(next);
    }
    let mut inner = vec![0.0; m];
    for l in 1..=top {
        let sign = if (l + n_deg).is_multiple_of(2) { 1.0 } else { -1.0 };
        let d = coeff_d(n_deg, l).map_err(|e| NonlinearityError::InvalidConfig(e.to_string()))?;
        let lp = log_even_derivative(fine, powers[l].clone(), n_deg)?;
        for j in 0..m {
            inner[j] += sign * d * powers[top - l][j] * lp[j];
        }
    }
    Ok(differentiate_and_truncate(fine, inner, n)?)
}

/// Cubic term `(1/2) d/dx { phi^2 L phi_xx - phi L(phi^2)_xx + (1/3) L(phi^3)_xx }`.
pub fn cubic_term_spectral(phi: &RealField) -> Result<RealField, NonlinearityError> {
    let hat = phi.forward();
    let m = padded_size(phi.grid().n_points(), 2.0);
    Ok(cubic_hat(&hat, m)?.inverse())
}

/// Coefficient-space version of [`cubic_term_spectral`] with a chosen padding ratio.
pub fn cubic_term_hat(phi_hat: &SpectralField, dealias_factor: f64) -> Result<SpectralField, NonlinearityError> {
    if !(dealias_factor >= 2.0) {
        return Err(NonlinearityError::InvalidConfig(format!("dealias_factor {dealias_factor} below 2")));
    }
    let m = padded_size(phi_hat.grid().n_points(), dealias_factor);
    Ok(cubic_hat(phi_hat, m)?)
}

/// Degree `2n + 1` term for `2 <= n <= cfg.n_max`.
pub fn higher_term_spectral(phi: &RealField, n: usize, cfg: &NonlinearityConfig) -> Result<RealField, NonlinearityError> {
    cfg.validate()?;
    if n < 2 || n > cfg.n_max {
        return Err(NonlinearityError::DegreeOutOfRange { n, max: cfg.n_max });
    }
    let m = cfg.padded_size(phi.grid().n_points());
    Ok(degree_hat(&phi.forward(), n, m)?.inverse())
}

/// Degree `2n + 1` term in coefficient space, any `1 <= n <= 6`.
pub fn degree_term_hat(phi_hat: &SpectralField, n: usize, dealias_factor: f64) -> Result<SpectralField, NonlinearityError> {
    if n == 0 || n > MAX_DEGREE_INDEX {
        return Err(NonlinearityError::DegreeOutOfRange { n, max: MAX_DEGREE_INDEX });
    }
    if !(dealias_factor >= (n + 1) as f64) {
        return Err(NonlinearityError::InvalidConfig(format!(
            "dealias_factor {dealias_factor} below {} for degree index {n}",
            n + 1
        )));
    }
    let m = padded_size(phi_hat.grid().n_points(), dealias_factor);
    degree_hat(phi_hat, n, m)
}

/// Truncated series `sum_{n <= n_max} N_n(phi)` in coefficient space.
pub fn full_nonlinearity_hat(phi_hat: &SpectralField, cfg: &NonlinearityConfig) -> Result<SpectralField, NonlinearityError> {
    cfg.validate()?;
    let m = cfg.padded_size(phi_hat.grid().n_points());
    let mut total = cubic_hat(phi_hat, m)?;
    for n in 2..=cfg.n_max {
        total = total.add(&degree_hat(phi_hat, n, m)?)?;
    }
    Ok(total)
}

/// Truncated series `sum_{n <= n_max} N_n(phi)`.
pub fn full_nonlinearity(phi: &RealField, cfg: &NonlinearityConfig) -> Result<RealField, NonlinearityError> {
    Ok(full_nonlinearity_hat(&phi.forward(), cfg)?.inverse())
}

/// Support of a coefficient field as `(k, c_k)`, with the Nyquist coefficient
/// split evenly between `k = +-N/2`.
fn support(phi_hat: &SpectralField, threshold: f64) -> Vec<(i64, C64)> {
    let g = phi_hat.grid();
    let nyq = g.nyquist_index();
    let mut out = Vec::new();
    for (i, c) in phi_hat.coeffs().iter().enumerate() {
        if c.norm() <= threshold {
            continue;
        }
        if i == nyq {
            let k = (g.n_points() / 2) as i64;
            out.push((k, 0.5 * c));
            out.push((-k, 0.5 * c));
        } else {
            out.push((g.k_at(i), *c));
        }
    }
    out
}

/// `(1/6) i xi sum_{k1+k2+k3=k} T_1 c_{k1} c_{k2} c_{k3}` by explicit triple sum.
pub fn cubic_term_convolution(phi_hat: &SpectralField) -> Result<SpectralField, NonlinearityError> {
    let g = *phi_hat.grid();
    let n = g.n_points();
    if n > CONVOLUTION_CAP {
        return Err(NonlinearityError::GridTooLarge { n, cap: CONVOLUTION_CAP });
    }
    let modes = support(phi_hat, -1.0);
    let half = (n / 2) as i64;
    let dxi = g.dxi();
    // Lookup from wavenumber k in [-half, half] to its (split) coefficient.
    let mut table = vec![C64::new(0.0, 0.0); (2 * half + 1) as usize];
    for (k, c) in &modes {
        table[(k + half) as usize] += *c;
    }
    let coeffs: Vec<C64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let k = g.k_at(i);
            if k == -half {
                return C64::new(0.0, 0.0);
            }
            let xi = k as f64 * dxi;
            let mut acc = C64::new(0.0, 0.0);
            for k1 in -half..=half {
                let c1 = table[(k1 + half) as usize];
                if c1 == C64::new(0.0, 0.0) {
                    continue;
                }
                for k2 in -half..=half {
                    let k3 = k - k1 - k2;
                    if k3 < -half || k3 > half {
                        continue;
                    }
                    let c2 = table[(k2 + half) as usize];
                    let c3 = table[(k3 + half) as usize];
                    let w = t1(k1 as f64 * dxi, k2 as f64 * dxi, k3 as f64 * dxi);
                    acc += c1 * c2 * c3 * w;
                }
            }
            acc * C64::new(0.0, xi / 6.0)
        })
        .collect();
    Ok(SpectralField::new(g, coeffs)?)
}

/// `-c_n/(2n+1) i xi sum T_n(eta) prod c(eta_j)` over all `(2n+1)`-tuples of
/// nonzero coefficients (entries with `|c| <= threshold` are skipped), using
/// the closed-form symbol. Output modes `|k| >= N/2` are dropped.
pub fn multilinear_convolution(
    phi_hat: &SpectralField,
    n: usize,
    threshold: f64,
) -> Result<SpectralField, NonlinearityError> {
    if n == 0 || n > MAX_DEGREE_INDEX {
        return Err(NonlinearityError::DegreeOutOfRange { n, max: MAX_DEGREE_INDEX });
    }
    let g = *phi_hat.grid();
    let modes = support(phi_hat, threshold);
    let arity = 2 * n + 1;
    let count = (modes.len() as u128).pow(arity as u32);
    if count > TUPLE_CAP {
        return Err(NonlinearityError::TooManyTuples(count));
    }
    let mut out = SpectralField::zeros(g);
    if modes.is_empty() {
        return Ok(out);
    }
    let dxi = g.dxi();
    let weight = -coeff_c(n) / arity as f64;
    let mut idx = vec![0usize; arity];
    let mut etas = vec![0.0; arity];
    loop {
        let mut k = 0i64;
        let mut prod = C64::new(1.0, 0.0);
        for (slot, &j) in idx.iter().enumerate() {
            k += modes[j].0;
            prod *= modes[j].1;
            etas[slot] = modes[j].0 as f64 * dxi;
        }
        if let Some(i) = g.index_of(k).filter(|i| *i != g.nyquist_index()) {
            let q = SymbolQuery::new(n, &etas, 1e-8).expect("arity matches by construction");
            let xi = k as f64 * dxi;
            out.coeffs_mut()[i] += prod * t_symbol_closed(&q) * C64::new(0.0, weight * xi);
        }
        // odometer increment
        let mut slot = 0;
        loop {
            idx[slot] += 1;
            if idx[slot] < modes.len() {
                break;
            }
            idx[slot] = 0;
            slot += 1;
            if slot == arity {
                return Ok(out);
            }
        }
    }
}

/// Pointwise evaluation of `phi(x) - phi(x + u)` and `phi_x(x) - phi_x(x + u)`
/// from the trigonometric interpolant, written with `1 - e^{i theta} =
/// -2i sin(theta/2) e^{i theta/2}` so small offsets lose no digits.
struct Differences {
    modes: Vec<(f64, C64)>,
}

impl Differences {
    fn new(phi_hat: &SpectralField, x: f64) -> Self {
        let g = phi_hat.grid();
        let modes = support(phi_hat, 0.0)
            .into_iter()
            .map(|(k, c)| {
                let xi = k as f64 * g.dxi();
                (xi, c * C64::from_polar(1.0, xi * x))
            })
            .collect();
        Self { modes }
    }

    fn at(&self, u: f64) -> (f64, f64) {
        let (mut d, mut a) = (0.0, 0.0);
        for (xi, b) in &self.modes {
            let half = 0.5 * xi * u;
            let factor = C64::new(0.0, -2.0 * half.sin()) * C64::from_polar(1.0, half);
            let z = b * factor;
            d += z.re;
            a += (z * C64::new(0.0, *xi)).re;
        }
        (d, a)
    }
}

/// `1/|z| - 1/sqrt(z^2 + d^2)` without cancellation.
fn kernel(z: f64, d: f64) -> f64 {
    let az = z.abs();
    let r = (z * z + d * d).sqrt();
    d * d / (az * r * (r + az))
}

/// Sum of the kernel over the periodic images `u + mL`: explicit for
/// `|m| <= images`, then the series `-sum_n c_n d^{2n} |z|^{-2n-1}` summed
/// over the remaining images with Hurwitz zeta functions.
fn periodized_kernel(u: f64, d: f64, length: f64, images: i64) -> f64 {
    let mut acc = 0.0;
    for m in -images..=images {
        acc += kernel(u + m as f64 * length, d);
    }
    let q_plus = (images + 1) as f64 + u / length;
    let q_minus = (images + 1) as f64 - u / length;
    let ratio = (d / length) * (d / length);
    let mut dpow = 1.0;
    let mut tail = 0.0;
    for n in 1..=60usize {
        dpow *= ratio;
        let p = (2 * n + 1) as f64;
        let term = -coeff_c(n) * dpow * (hurwitz_zeta(p, q_plus) + hurwitz_zeta(p, q_minus));
        tail += term;
        if term.abs() <= 1e-18 * tail.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    acc + tail / length
}

/// Direct quadrature of
/// `int_R [phi_x(x) - phi_x(x+z)] {1/|z| - 1/sqrt(z^2 + (phi(x) - phi(x+z))^2)} dz`
/// at the grid node `x_index`, for the periodic extension of `phi`.
///
/// The line is folded onto one period: images with `|m L| <= cfg.oracle_cutoff`
/// are summed explicitly and the rest through the kernel's large-`z`
/// expansion, so the result does not depend on the cutoff beyond rounding.
/// The two half-periods are integrated together over `[0, L/2]`.
pub fn zeta_integral_oracle(
    phi: &RealField,
    x_index: usize,
    cfg: &NonlinearityConfig,
) -> Result<f64, NonlinearityError> {
    cfg.validate()?;
    let g = *phi.grid();
    if x_index >= g.n_points() {
        return Err(NonlinearityError::IndexOutOfRange { index: x_index, n: g.n_points() });
    }
    let hat = phi.forward();
    let slope = hat.apply(crate::spectral::Multiplier::Deriv).inverse().max_abs();
    if !(slope < 0.5) {
        return Err(NonlinearityError::SlopeTooLarge(slope));
    }
    if slope == 0.0 {
        return Ok(0.0);
    }
    let length = g.length();
    let images = ((cfg.oracle_cutoff / length).ceil() as i64).max(1);
    let diff = Differences::new(&hat, g.x(x_index));
    let integrand = |u: f64| {
        let (d_plus, a_plus) = diff.at(u);
        let (d_minus, a_minus) = diff.at(-u);
        a_plus * periodized_kernel(u, d_plus, length, images) + a_minus * periodized_kernel(-u, d_minus, length, images)
    };
    let gk = GaussKronrod::new(1e-13, 1e-16 * slope.powi(3)).with_max_intervals(20_000);
    let est = gk.integrate(integrand, 0.0, 0.5 * length).map_err(|e| NonlinearityError::Quadrature(e.to_string()))?;
    Ok(est.value)
}
