//! Weyl paraproducts on the periodic grid, the logarithmic symbol built from a
//! front profile, and the weighted energies it defines.
//!
//! A symbol `a(x, xi)` is tabulated at the grid nodes and a finite set of
//! frequencies. With `a~_q(xi)` the Fourier coefficients of `x -> a(x, xi)`,
//! the paraproduct acts on coefficients by
//!
//! ```text
//! (T_a f)_k = sum_j chi(|k - j| / |k + j|) a~_{k-j}((xi_k + xi_j) / 2) f_j
//! ```
//!
//! with `chi(0/0) = 1`. On the default frequency set (every grid wavenumber)
//! the midpoint is a grid wavenumber when `k + j` is even; otherwise the two
//! neighbouring columns are averaged. Arbitrary frequency sets are linearly
//! interpolated and clamped at their ends. Real symbols give self-adjoint
//! operators because the pairing weights are symmetric in `(k, j)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sqgfront_core::cutoff::chi;
use sqgfront_core::symbols::coeff_c;
use thiserror::Error;

use crate::spectral::{FourierGrid, Multiplier, RealField, SpectralError, SpectralField, C64};

/// Largest grid for which an `N x N` symbol table is built.
pub const SYMBOL_GRID_CAP: usize = 2048;
/// Largest Sobolev order accepted by the weighted energies.
pub const MAX_ENERGY_ORDER: u32 = 8;
/// Relative stopping tolerance of the operator-norm power iteration.
pub const NORM_TOLERANCE: f64 = 1e-6;
const NORM_ITERATION_CAP: usize = 5000;

#[derive(Debug, Error)]
pub enum ParaproductError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("symbol table has {found} entries, expected {expected}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("frequency set must be nonempty, finite and strictly increasing")]
    BadFrequencySet,
    #[error("non-finite symbol value at node {node}, column {column}")]
    NonFiniteSymbol { node: usize, column: usize },
    #[error("grid of {n} points exceeds the symbol table cap {cap}")]
    GridTooLarge { n: usize, cap: usize },
    #[error("energy order {s} outside 0..={max}")]
    OrderTooLarge { s: u32, max: u32 },
    #[error("power iteration stalled after {iterations} steps at {estimate}")]
    NoConvergence { iterations: usize, estimate: f64 },
    #[error("paraproduct norm {norm} is not below 2; the weighted energy is not coercive")]
    NotCoercive { norm: f64 },
    #[error("field is not supported in the central half of the domain (outer amplitude {outer:e}, peak {peak:e})")]
    Support { outer: f64, peak: f64 },
    #[error("field mean {0:e} is not zero")]
    NonzeroMean(f64),
}

#[derive(Debug, Clone, PartialEq)]
enum Frequencies {
    /// Ascending grid wavenumbers `k = -N/2 .. N/2 - 1`.
    Grid,
    Custom(Vec<f64>),
}

/// Symbol values `a(x_i, xi_m)` stored column by column.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolGrid {
    grid: FourierGrid,
    freqs: Frequencies,
    values: Vec<C64>,
}

impl SymbolGrid {
    /// Table over the grid's own wavenumbers in ascending order, with column
    /// `m` holding `k = m - N/2`.
    pub fn new(grid: FourierGrid, values: Vec<C64>) -> Result<Self, ParaproductError> {
        Self::build(grid, Frequencies::Grid, values)
    }

    /// Table over an arbitrary strictly increasing frequency set.
    pub fn with_frequencies(grid: FourierGrid, xis: Vec<f64>, values: Vec<C64>) -> Result<Self, ParaproductError> {
        if xis.is_empty() || xis.iter().any(|x| !x.is_finite()) || xis.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ParaproductError::BadFrequencySet);
        }
        Self::build(grid, Frequencies::Custom(xis), values)
    }

    fn build(grid: FourierGrid, freqs: Frequencies, values: Vec<C64>) -> Result<Self, ParaproductError> {
        let n = grid.n_points();
        if n > SYMBOL_GRID_CAP {
            return Err(ParaproductError::GridTooLarge { n, cap: SYMBOL_GRID_CAP });
        }
        let columns = match &freqs {
            Frequencies::Grid => n,
            Frequencies::Custom(x) => x.len(),
        };
        if values.len() != n * columns {
            return Err(ParaproductError::ShapeMismatch { expected: n * columns, found: values.len() });
        }
        if let Some(p) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(ParaproductError::NonFiniteSymbol { node: p % n, column: p / n });
        }
        Ok(Self { grid, freqs, values })
    }

    pub fn from_fn(grid: FourierGrid, a: impl Fn(f64, f64) -> C64 + Sync) -> Result<Self, ParaproductError> {
        let n = grid.n_points();
        let values = (0..n)
            .into_par_iter()
            .flat_map_iter(|m| {
                let xi = grid_column_xi(&grid, m);
                let a = &a;
                (0..n).map(move |i| a(grid.x(i), xi))
            })
            .collect();
        Self::new(grid, values)
    }

    pub fn constant(grid: FourierGrid, c: C64) -> Result<Self, ParaproductError> {
        Self::new(grid, vec![c; grid.n_points() * grid.n_points()])
    }

    pub fn zeros(grid: FourierGrid) -> Result<Self, ParaproductError> {
        Self::constant(grid, C64::new(0.0, 0.0))
    }

    pub fn grid(&self) -> &FourierGrid {
        &self.grid
    }

    pub fn n_columns(&self) -> usize {
        self.values.len() / self.grid.n_points()
    }

    pub fn xi(&self, m: usize) -> f64 {
        match &self.freqs {
            Frequencies::Grid => grid_column_xi(&self.grid, m),
            Frequencies::Custom(x) => x[m],
        }
    }

    pub fn value(&self, node: usize, column: usize) -> C64 {
        self.values[column * self.grid.n_points() + node]
    }

    pub fn column(&self, m: usize) -> &[C64] {
        let n = self.grid.n_points();
        &self.values[m * n..(m + 1) * n]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    fn uniform_value(&self) -> Option<C64> {
        let first = self.values[0];
        self.values.iter().all(|v| *v == first).then_some(first)
    }

    fn column_x_independent(&self, m: usize) -> bool {
        let col = self.column(m);
        col.iter().all(|v| *v == col[0])
    }

    /// Interpolation stencil `(column, weight)` pairs for the midpoint of
    /// integer wavenumbers `k` and `j`.
    fn midpoint_stencil(&self, k: i64, j: i64) -> [(usize, f64); 2] {
        match &self.freqs {
            Frequencies::Grid => {
                let half = (self.grid.n_points() / 2) as i64;
                let s = k + j;
                let lo = (s.div_euclid(2) + half) as usize;
                if s % 2 == 0 {
                    [(lo, 1.0), (lo, 0.0)]
                } else {
                    let hi = ((s.div_euclid(2) + 1 + half) as usize).min(2 * half as usize - 1);
                    [(lo, 0.5), (hi, 0.5)]
                }
            }
            Frequencies::Custom(x) => {
                let target = 0.5 * (self.grid.xi_at_k(k) + self.grid.xi_at_k(j));
                interpolation_stencil(x, target)
            }
        }
    }
}

fn grid_column_xi(grid: &FourierGrid, m: usize) -> f64 {
    grid.xi_at_k(m as i64 - (grid.n_points() / 2) as i64)
}

fn interpolation_stencil(xs: &[f64], target: f64) -> [(usize, f64); 2] {
    let last = xs.len() - 1;
    if target <= xs[0] {
        return [(0, 1.0), (0, 0.0)];
    }
    if target >= xs[last] {
        return [(last, 1.0), (last, 0.0)];
    }
    let hi = xs.partition_point(|x| *x < target);
    if xs[hi] == target {
        return [(hi, 1.0), (hi, 0.0)];
    }
    let lo = hi - 1;
    let w = (target - xs[lo]) / (xs[hi] - xs[lo]);
    [(lo, 1.0 - w), (hi, w)]
}

/// Pair cutoff `chi(|k - j| / |k + j|)`.
fn pair_weight(k: i64, j: i64) -> f64 {
    let sum = (k + j).abs();
    let diff = (k - j).abs();
    if diff == 0 {
        1.0
    } else if sum == 0 {
        0.0
    } else {
        chi(diff as f64 / sum as f64)
    }
}

/// Precomputed spectra of a symbol's columns, ready to act on fields.
#[derive(Debug, Clone)]
pub struct Paraproduct {
    symbol: SymbolGrid,
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    Scalar(C64),
    Multiplier,
    General(Vec<SpectralField>),
}

impl Paraproduct {
    pub fn new(symbol: SymbolGrid) -> Result<Self, ParaproductError> {
        let kind = if let Some(c) = symbol.uniform_value() {
            Kind::Scalar(c)
        } else if (0..symbol.n_columns()).all(|m| symbol.column_x_independent(m)) {
            Kind::Multiplier
        } else {
            let grid = symbol.grid;
            let spectra = (0..symbol.n_columns())
                .into_par_iter()
                .map(|m| SpectralField::from_complex_samples(grid, symbol.column(m)))
                .collect::<Result<Vec<_>, _>>()?;
            Kind::General(spectra)
        };
        Ok(Self { symbol, kind })
    }

    pub fn symbol(&self) -> &SymbolGrid {
        &self.symbol
    }

    /// Coefficient `a~_q` of column stencil evaluated at the midpoint.
    fn coefficient(&self, q: i64, k: i64, j: i64) -> C64 {
        let stencil = self.symbol.midpoint_stencil(k, j);
        let mut acc = C64::new(0.0, 0.0);
        for (m, w) in stencil {
            if w == 0.0 {
                continue;
            }
            let v = match &self.kind {
                Kind::Scalar(c) => {
                    if q == 0 {
                        *c
                    } else {
                        C64::new(0.0, 0.0)
                    }
                }
                Kind::Multiplier => {
                    if q == 0 {
                        self.symbol.column(m)[0]
                    } else {
                        C64::new(0.0, 0.0)
                    }
                }
                Kind::General(spectra) => spectra[m].coeff(q),
            };
            acc += v * w;
        }
        acc
    }

    /// Matrix entry coupling input mode `j` to output mode `k`.
    pub fn entry(&self, k: i64, j: i64) -> C64 {
        let w = pair_weight(k, j);
        if w == 0.0 {
            return C64::new(0.0, 0.0);
        }
        self.coefficient(k - j, k, j) * w
    }

    pub fn apply(&self, f: &SpectralField) -> Result<SpectralField, ParaproductError> {
        let grid = self.symbol.grid;
        if *f.grid() != grid {
            return Err(SpectralError::GridMismatch.into());
        }
        if let Kind::Scalar(c) = self.kind {
            let coeffs = f.coeffs().iter().map(|v| v * c).collect();
            return Ok(SpectralField::new(grid, coeffs)?);
        }
        let n = grid.n_points();
        let half = (n / 2) as i64;
        let coeffs: Vec<C64> = (0..n)
            .into_par_iter()
            .map(|i| {
                let k = grid.k_at(i);
                let mut acc = C64::new(0.0, 0.0);
                for j in -half..half {
                    let w = pair_weight(k, j);
                    if w == 0.0 {
                        continue;
                    }
                    let fj = f.coeff(j);
                    if fj == C64::new(0.0, 0.0) {
                        continue;
                    }
                    acc += self.coefficient(k - j, k, j) * (fj * w);
                }
                acc
            })
            .collect();
        Ok(SpectralField::new(grid, coeffs)?)
    }

    /// `L^2` operator norm by power iteration on `T* T`, assuming `T` is
    /// self-adjoint.
    pub fn operator_norm(&self) -> Result<f64, ParaproductError> {
        if let Kind::Scalar(c) = self.kind {
            return Ok(c.norm());
        }
        let grid = self.symbol.grid;
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let start = (0..grid.n_points()).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let mut v = SpectralField::new(grid, start)?;
        v = v.scale(1.0 / coefficient_norm(&v));
        let mut previous = f64::NAN;
        for iteration in 1..=NORM_ITERATION_CAP {
            let tv = self.apply(&v)?;
            let estimate = coefficient_norm(&tv);
            if estimate == 0.0 {
                return Ok(0.0);
            }
            if (estimate - previous).abs() <= NORM_TOLERANCE * estimate {
                return Ok(estimate);
            }
            previous = estimate;
            let ttv = self.apply(&tv)?;
            let size = coefficient_norm(&ttv);
            if size == 0.0 {
                return Ok(estimate);
            }
            v = ttv.scale(1.0 / size);
            if iteration == NORM_ITERATION_CAP {
                return Err(ParaproductError::NoConvergence { iterations: iteration, estimate });
            }
        }
        unreachable!("loop returns on its final iteration")
    }
}

fn coefficient_norm(f: &SpectralField) -> f64 {
    f.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// `T_a f` for a tabulated symbol.
pub fn weyl_paraproduct(a: &SymbolGrid, f: &SpectralField) -> Result<SpectralField, ParaproductError> {
    Paraproduct::new(a.clone())?.apply(f)
}

/// Logarithmic symbol `sum_{n <= n_max} -2 c_n g_{n,xi}(x)^{2n}`, where
/// `g_{n,xi}` is `phi_x` filtered by `chi((2n + 1) eta / xi)`. The `xi = 0`
/// column is zero.
pub fn build_blog_symbol(phi: &RealField, n_max: usize) -> Result<SymbolGrid, ParaproductError> {
    let grid = *phi.grid();
    let n = grid.n_points();
    if n > SYMBOL_GRID_CAP {
        return Err(ParaproductError::GridTooLarge { n, cap: SYMBOL_GRID_CAP });
    }
    let slope = phi.forward().apply(Multiplier::Deriv);
    let values: Vec<C64> = (0..n)
        .into_par_iter()
        .flat_map_iter(|m| {
            let xi = grid_column_xi(&grid, m);
            let mut column = vec![0.0; n];
            if xi != 0.0 {
                for degree in 1..=n_max {
                    let width = (2 * degree + 1) as f64 / xi;
                    let filtered = slope.map_modes(|_, eta| C64::new(chi(width * eta), 0.0)).inverse();
                    let weight = -2.0 * coeff_c(degree);
                    let power = 2 * degree as i32;
                    for (acc, g) in column.iter_mut().zip(filtered.samples()) {
                        *acc += weight * g.powi(power);
                    }
                }
            }
            column.into_iter().map(|v| C64::new(v, 0.0))
        })
        .collect();
    SymbolGrid::new(grid, values)
}

/// `||T_{B^log[phi]}||` for the leading (`n = 1`) logarithmic symbol.
pub fn operator_norm_tblog(phi: &RealField) -> Result<f64, ParaproductError> {
    Paraproduct::new(build_blog_symbol(phi, 1)?)?.operator_norm()
}

/// Weighted energies `E^(j) = <|D|^j phi, (2 - T)^{2j+1} |D|^j phi>` for
/// `j = 0..=s` together with the operator norm they were computed under.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub tblog_norm: f64,
    pub energies: Vec<f64>,
}

impl EnergyReport {
    pub fn order(&self) -> u32 {
        (self.energies.len() - 1) as u32
    }

    /// `E^(s)` at the top order.
    pub fn energy(&self) -> f64 {
        *self.energies.last().expect("energies always include order 0")
    }

    /// `E~^(j) = sum_{i <= j} E^(i)`.
    pub fn tilde(&self, j: u32) -> f64 {
        self.energies[..=j as usize].iter().sum()
    }

    /// Coercivity margin `2 - ||T||`.
    pub fn margin(&self) -> f64 {
        2.0 - self.tblog_norm
    }
}

pub fn energy_report(phi: &RealField, s: u32) -> Result<EnergyReport, ParaproductError> {
    if s > MAX_ENERGY_ORDER {
        return Err(ParaproductError::OrderTooLarge { s, max: MAX_ENERGY_ORDER });
    }
    let op = Paraproduct::new(build_blog_symbol(phi, 1)?)?;
    let norm = op.operator_norm()?;
    if norm >= 2.0 {
        return Err(ParaproductError::NotCoercive { norm });
    }
    let hat = phi.forward();
    let mut energies = Vec::with_capacity(s as usize + 1);
    for j in 0..=s {
        let u = if j == 0 { hat.clone() } else { hat.apply(Multiplier::AbsPow(j as f64)) };
        let mut w = u.clone();
        for _ in 0..(2 * j + 1) {
            w = w.scale(2.0).sub(&op.apply(&w)?)?;
        }
        energies.push(u.inner(&w)?.re);
    }
    Ok(EnergyReport { tblog_norm: norm, energies })
}

/// `E^(s)`.
pub fn weighted_energy(phi: &RealField, s: u32) -> Result<f64, ParaproductError> {
    Ok(energy_report(phi, s)?.energy())
}

/// `E~^(s) = sum_{j <= s} E^(j)`.
pub fn energy_tilde(phi: &RealField, s: u32) -> Result<f64, ParaproductError> {
    Ok(energy_report(phi, s)?.tilde(s))
}

/// Reject fields with visible amplitude in the outer quarter on either side.
pub(crate) fn check_central_support(f: &RealField, rel: f64) -> Result<(), ParaproductError> {
    let g = f.grid();
    let quarter = g.length() / 4.0;
    let peak = f.max_abs();
    let outer = f
        .samples()
        .iter()
        .enumerate()
        .filter(|(j, _)| g.x(*j).abs() > quarter)
        .map(|(_, v)| v.abs())
        .fold(0.0, f64::max);
    if outer > rel * peak {
        return Err(ParaproductError::Support { outer, peak });
    }
    Ok(())
}

/// Both sides of the commutator identity for `[x, L]`: the direct
/// `x L f - L(x f)` and the multiplier `i / xi` applied to `f`.
pub fn commutator_xl(f: &RealField) -> Result<(RealField, RealField), ParaproductError> {
    check_central_support(f, 1e-10)?;
    let mean = f.mean();
    if mean.abs() > 1e-12 * f.max_abs().max(f64::MIN_POSITIVE) {
        return Err(ParaproductError::NonzeroMean(mean));
    }
    let lf = f.forward().apply(Multiplier::Log).inverse();
    let lxf = f.times_x().forward().apply(Multiplier::Log).inverse();
    let direct = lf.times_x().zip_with(&lxf, |a, b| a - b)?;
    let nyq = f.grid().nyquist_index();
    let predicted = f
        .forward()
        .map_modes(|i, xi| if xi == 0.0 || i == nyq { C64::new(0.0, 0.0) } else { C64::new(0.0, 1.0 / xi) })
        .inverse();
    Ok((direct, predicted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;

    fn random_spectrum(grid: FourierGrid, band: i64, seed: u64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut hat = SpectralField::zeros(grid);
        for k in 1..=band {
            let c = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            hat.coeffs_mut()[grid.index_of(k).unwrap()] = c;
            hat.coeffs_mut()[grid.index_of(-k).unwrap()] = c.conj();
        }
        hat
    }

    #[test]
    fn constant_symbol_is_scalar_multiple() {
        let grid = FourierGrid::new(32, 12.0).unwrap();
        let f = random_spectrum(grid, 15, 1);
        let c = C64::new(1.75, -0.5);
        let out = weyl_paraproduct(&SymbolGrid::constant(grid, c).unwrap(), &f).unwrap();
        for (a, b) in out.coeffs().iter().zip(f.coeffs()) {
            assert_eq!(*a, b * c);
        }
        let op = Paraproduct::new(SymbolGrid::constant(grid, c).unwrap()).unwrap();
        assert_eq!(op.operator_norm().unwrap(), c.norm());
    }

    #[test]
    fn x_independent_symbol_is_a_multiplier() {
        let grid = FourierGrid::new(64, 20.0).unwrap();
        let a = SymbolGrid::from_fn(grid, |_, xi| C64::new(1.0 + xi * xi, 0.0)).unwrap();
        let f = random_spectrum(grid, 31, 2);
        let out = weyl_paraproduct(&a, &f).unwrap();
        for i in 0..64 {
            let xi = grid.xi_at(i);
            assert!((out.coeffs()[i] - f.coeffs()[i] * (1.0 + xi * xi)).norm() < 1e-12);
        }
    }

    #[test]
    fn pair_weight_support() {
        assert_eq!(pair_weight(0, 0), 1.0);
        assert_eq!(pair_weight(3, -3), 0.0);
        assert_eq!(pair_weight(40, 40), 1.0);
        assert_eq!(pair_weight(41, 39), 1.0);
        assert_eq!(pair_weight(45, 35), 0.0);
        assert_eq!(pair_weight(-41, -39), 1.0);
    }

    #[test]
    fn stencils() {
        let grid = FourierGrid::new(8, 8.0).unwrap();
        let a = SymbolGrid::zeros(grid).unwrap();
        assert_eq!(a.midpoint_stencil(2, 0), [(5, 1.0), (5, 0.0)]);
        assert_eq!(a.midpoint_stencil(2, 1), [(5, 0.5), (6, 0.5)]);
        assert_eq!(a.midpoint_stencil(-3, -4), [(0, 0.5), (1, 0.5)]);
        assert_eq!(interpolation_stencil(&[0.0, 1.0, 3.0], 2.0), [(1, 0.5), (2, 0.5)]);
        assert_eq!(interpolation_stencil(&[0.0, 1.0, 3.0], 5.0), [(2, 1.0), (2, 0.0)]);
        assert_eq!(interpolation_stencil(&[0.0, 1.0, 3.0], 1.0), [(1, 1.0), (1, 0.0)]);
    }

    #[test]
    fn custom_frequency_validation() {
        let grid = FourierGrid::new(8, 8.0).unwrap();
        assert!(SymbolGrid::with_frequencies(grid, vec![1.0, 1.0], vec![C64::default(); 16]).is_err());
        assert!(SymbolGrid::with_frequencies(grid, vec![1.0, 2.0], vec![C64::default(); 15]).is_err());
        assert!(SymbolGrid::with_frequencies(grid, vec![1.0, 2.0], vec![C64::default(); 16]).is_ok());
    }

    #[test]
    fn blog_symbol_of_low_mode_at_high_frequency() {
        let grid = FourierGrid::new(128, 2.0 * std::f64::consts::PI * 8.0).unwrap();
        let phi = RealField::from_fn(grid, |x| 0.01 * (x / 8.0).sin());
        let symbol = build_blog_symbol(&phi, 1).unwrap();
        let m = 127;
        assert!(symbol.xi(m) > 7.0);
        for i in 0..128 {
            let slope = 0.01 / 8.0 * (grid.x(i) / 8.0).cos();
            assert!((symbol.value(i, m).re - slope * slope).abs() < 1e-12 * 1e-6);
        }
        let zero = symbol.column(64);
        assert!(zero.iter().all(|v| *v == C64::new(0.0, 0.0)));
        assert!(symbol.values.iter().all(|v| v.re >= 0.0 && v.im == 0.0));
    }

    #[test]
    fn blog_symbol_homogeneity() {
        let grid = FourierGrid::new(64, 30.0).unwrap();
        let phi = RealField::from_fn(grid, |x| 0.1 * (-(x / 3.0).powi(2)).exp());
        let a = build_blog_symbol(&phi, 2).unwrap();
        let b = build_blog_symbol(&phi.map(|v| 2.0 * v), 2).unwrap();
        let a1 = build_blog_symbol(&phi, 1).unwrap();
        let b1 = build_blog_symbol(&phi.map(|v| 2.0 * v), 1).unwrap();
        for idx in 0..a.values.len() {
            assert!((b1.values[idx] - a1.values[idx] * 4.0).norm() <= 1e-15 * a1.values[idx].norm().max(1e-30));
            let quartic = a.values[idx] - a1.values[idx];
            let quartic_b = b.values[idx] - b1.values[idx];
            assert!((quartic_b - quartic * 16.0).norm() <= 1e-12 * b.values[idx].norm().max(1e-300));
        }
    }

    #[test]
    fn operator_norm_scales_quadratically() {
        let grid = FourierGrid::new(64, 30.0).unwrap();
        let bump = |a: f64| RealField::from_fn(grid, move |x| a * (-(x / 2.0).powi(2)).exp());
        let n1 = operator_norm_tblog(&bump(0.2)).unwrap();
        let n2 = operator_norm_tblog(&bump(0.1)).unwrap();
        assert!(n1 > 0.0);
        assert!((n1 / n2 / 4.0 - 1.0).abs() < 0.05, "{}", n1 / n2);
        assert_eq!(operator_norm_tblog(&RealField::zeros(grid)).unwrap(), 0.0);
    }

    #[test]
    fn infinitesimal_data_energy() {
        let grid = FourierGrid::new(64, 30.0).unwrap();
        let phi = RealField::from_fn(grid, |x| 1e-6 * (-(x / 2.0).powi(2)).exp());
        let report = energy_report(&phi, 3).unwrap();
        let hat = phi.forward();
        for s in 0..=3u32 {
            let h = if s == 0 { hat.l2_norm() } else { hat.homogeneous_norm(s as f64) };
            let expected = 2f64.powi(2 * s as i32 + 1) * h * h;
            assert!((report.energies[s as usize] / expected - 1.0).abs() < 1e-6);
        }
        assert!(report.energy() > 0.0);
        assert!(matches!(energy_report(&phi, 9), Err(ParaproductError::OrderTooLarge { .. })));
    }

    #[test]
    fn steep_data_is_not_coercive() {
        let grid = FourierGrid::new(256, 200.0).unwrap();
        let phi = RealField::from_fn(grid, |x| 100.0 * (-(x / 10.0).powi(2)).exp());
        let r = energy_report(&phi, 1);
        assert!(matches!(r, Err(ParaproductError::NotCoercive { .. })), "{r:?}");
    }

    #[test]
    fn commutator_pair_agrees_on_a_packet() {
        let grid = FourierGrid::new(512, 200.0).unwrap();
        let packet = |a: f64| RealField::from_fn(grid, move |x| a * (-(x / 8.0).powi(2)).exp() * (2.0 * x).cos());
        let (direct, predicted) = commutator_xl(&packet(1.0)).unwrap();
        let gap = direct.zip_with(&predicted, |a, b| a - b).unwrap().l2_norm();
        assert!(gap <= 1e-8 * predicted.l2_norm(), "{gap}");
        let (direct3, _) = commutator_xl(&packet(3.0)).unwrap();
        for (a, b) in direct3.samples().iter().zip(direct.samples()) {
            assert!((a - 3.0 * b).abs() < 1e-12);
        }
    }

    #[test]
    fn commutator_parity_and_preconditions() {
        let grid = FourierGrid::new(256, 100.0).unwrap();
        let odd = RealField::from_fn(grid, |x| x * (-(x / 4.0).powi(2)).exp());
        let (direct, predicted) = commutator_xl(&odd).unwrap();
        for j in 1..256 {
            let mirror = 256 - j;
            assert!((direct.samples()[j] - direct.samples()[mirror]).abs() < 1e-10);
            assert!((predicted.samples()[j] - predicted.samples()[mirror]).abs() < 1e-10);
        }
        let wide = RealField::from_fn(grid, |x| x * (-(x / 30.0).powi(2)).exp());
        assert!(matches!(commutator_xl(&wide), Err(ParaproductError::Support { .. })));
        let even = RealField::from_fn(grid, |x| (-(x / 4.0).powi(2)).exp());
        assert!(matches!(commutator_xl(&even), Err(ParaproductError::NonzeroMean(_))));
    }
}
