//! Linear dispersion, decay measurement, resonance bookkeeping, the
//! modified-scattering phase and the scaling-Galilean vector field
//! `S = (x + 2t) d/dx + t d/dt`.

use thiserror::Error;

use crate::evolution::{linear_propagate, solution_time_derivative, EvolutionError, SimState};
use crate::nonlinearity::NonlinearityConfig;
use crate::paraproduct::{check_central_support, ParaproductError};
use crate::spectral::{FourierGrid, Multiplier, RealField, SpectralError, SpectralField, C64};

pub use sqgfront_core::fit::{decay_fit, FitError, MIN_SAMPLES};
pub use sqgfront_core::resonance::{
    phase_phi, resonant_symbol, rho, stationary_point, t1_over_phi, t1_over_phi_limit, Parallelogram, ResonanceError,
    ResonanceSet, ResonanceSets,
};

#[derive(Debug, Error)]
pub enum DispersionError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Evolution(#[from] EvolutionError),
    #[error(transparent)]
    Paraproduct(#[from] ParaproductError),
    #[error("{0}")]
    Resonance(ResonanceError),
    #[error("{0}")]
    Fit(FitError),
    #[error("time {next} precedes the last update at {last}")]
    NonMonotoneTime { last: f64, next: f64 },
    #[error("mode {0} is not a tracked positive wavenumber on this grid")]
    BadMode(i64),
    #[error("invalid decay study: {0}")]
    Study(String),
}

impl From<ResonanceError> for DispersionError {
    fn from(e: ResonanceError) -> Self {
        Self::Resonance(e)
    }
}

impl From<FitError> for DispersionError {
    fn from(e: FitError) -> Self {
        Self::Fit(e)
    }
}

/// Linear evolution of a narrow wave packet and its `L^inf` decay.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayStudy {
    pub n_points: usize,
    pub length: f64,
    pub amplitude: f64,
    pub width: f64,
    pub carrier: f64,
    /// Fit window `[t_start, t_end]`.
    pub t_start: f64,
    pub t_end: f64,
    /// Logarithmically spaced sample times in the window.
    pub samples: usize,
}

impl Default for DecayStudy {
    fn default() -> Self {
        Self {
            n_points: 1 << 14,
            length: 4000.0,
            amplitude: 1.0,
            width: 4.0,
            carrier: 1.5,
            t_start: 20.0,
            t_end: 200.0,
            samples: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayResult {
    pub series: Vec<(f64, f64)>,
    pub exponent: f64,
}

impl DecayStudy {
    pub fn times(&self) -> Vec<f64> {
        let n = self.samples;
        let (a, b) = (self.t_start.ln(), self.t_end.ln());
        (0..n).map(|i| if i + 1 == n { self.t_end } else { (a + (b - a) * i as f64 / (n - 1) as f64).exp() }).collect()
    }

    pub fn run(&self) -> Result<DecayResult, DispersionError> {
        if !(self.t_start > 0.0 && self.t_end > self.t_start) || self.samples < MIN_SAMPLES {
            return Err(DispersionError::Study(format!(
                "need 0 < t_start < t_end and at least {MIN_SAMPLES} samples"
            )));
        }
        let grid = FourierGrid::new(self.n_points, self.length)?;
        let (a, w, k) = (self.amplitude, self.width, self.carrier);
        let phi0 = RealField::from_fn(grid, |x| a * (-(x / w).powi(2)).exp() * (k * x).cos()).forward();
        let series = linear_sup_series(&phi0, &self.times());
        let exponent = decay_fit(&series, (self.t_start, self.t_end))?;
        Ok(DecayResult { series, exponent })
    }
}

/// `(t, max |phi(t)|)` under the exact linear flow.
pub fn linear_sup_series(phi0: &SpectralField, times: &[f64]) -> Vec<(f64, f64)> {
    times.iter().map(|&t| (t, linear_propagate(phi0, t).inverse().max_abs())).collect()
}

/// Running modified-scattering phase at a set of tracked modes.
///
/// For each tracked positive wavenumber the accumulator integrates
/// `R(xi, tau) |phi^(xi, tau)|^2` by the trapezoid rule, where
/// `R = resonant_symbol(xi, beta(tau))` and the weights `beta_j` are the
/// cutoff areas of the parallelograms centred at `(xi, xi)`, `(xi, -xi)` and
/// `(-xi, xi)` at time `tau`. `|phi^|` is the line-transform density
/// `|c_k| / d_xi`. The phase is
/// `Theta(xi, t) = -2 t xi log|xi| + xi * integral`, and it is odd in `xi`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringPhase {
    grid: FourierGrid,
    modes: Vec<i64>,
    integral: Vec<f64>,
    last: Option<(f64, Vec<f64>)>,
    tol: f64,
}

impl ScatteringPhase {
    pub fn new(grid: FourierGrid, modes: Vec<i64>) -> Result<Self, DispersionError> {
        let half = (grid.n_points() / 2) as i64;
        if let Some(&k) = modes.iter().find(|&&k| k <= 0 || k >= half) {
            return Err(DispersionError::BadMode(k));
        }
        let n = modes.len();
        Ok(Self { grid, modes, integral: vec![0.0; n], last: None, tol: 1e-8 })
    }

    pub fn modes(&self) -> &[i64] {
        &self.modes
    }

    /// Time of the latest update.
    pub fn time(&self) -> Option<f64> {
        self.last.as_ref().map(|(t, _)| *t)
    }

    fn integrand(&self, phi_hat: &SpectralField, tau: f64) -> Result<Vec<f64>, DispersionError> {
        let dxi = self.grid.dxi();
        self.modes
            .iter()
            .map(|&k| {
                let xi = self.grid.xi_at_k(k);
                let betas = ResonanceSets::new(xi, tau)?.scattering_weights(self.tol)?;
                let density = phi_hat.coeff(k).norm() / dxi;
                Ok(resonant_symbol(xi, betas) * density * density)
            })
            .collect()
    }

    /// Add the snapshot `phi^(tau)`; times must not decrease.
    pub fn update(&mut self, phi_hat: &SpectralField, tau: f64) -> Result<(), DispersionError> {
        if *phi_hat.grid() != self.grid {
            return Err(SpectralError::GridMismatch.into());
        }
        let values = self.integrand(phi_hat, tau)?;
        if let Some((last_t, last_v)) = &self.last {
            if tau < *last_t {
                return Err(DispersionError::NonMonotoneTime { last: *last_t, next: tau });
            }
            let dt = tau - last_t;
            for ((acc, a), b) in self.integral.iter_mut().zip(last_v).zip(&values) {
                *acc += 0.5 * dt * (a + b);
            }
        }
        self.last = Some((tau, values));
        Ok(())
    }

    /// `Theta` at the tracked modes for time `t`.
    pub fn theta(&self, t: f64) -> Vec<f64> {
        self.modes
            .iter()
            .zip(&self.integral)
            .map(|(&k, acc)| {
                let xi = self.grid.xi_at_k(k);
                -2.0 * t * xi * xi.abs().ln() + xi * acc
            })
            .collect()
    }

    /// `v^ = exp(i Theta) phi^` at the latest update time. Tracked modes and
    /// their mirrors get the full phase; every other mode gets the linear part.
    pub fn corrected_profile(&self, phi_hat: &SpectralField) -> SpectralField {
        let t = self.time().unwrap_or(0.0);
        let mut out = phi_hat.log_phase(-2.0 * t);
        let theta = self.theta(t);
        for (&k, th) in self.modes.iter().zip(theta) {
            for (kk, sign) in [(k, 1.0), (-k, -1.0)] {
                let i = self.grid.index_of(kk).expect("tracked modes lie on the grid");
                out.coeffs_mut()[i] = phi_hat.coeffs()[i] * C64::from_polar(1.0, sign * th);
            }
        }
        out
    }
}

/// `S phi = (x + 2t) phi_x + t phi_t` with `phi_t = 2 L phi_x - N(phi)`;
/// no support check.
pub fn scaling_field(phi_hat: &SpectralField, t: f64, cfg: &NonlinearityConfig) -> Result<RealField, EvolutionError> {
    let phi_x = phi_hat.apply(Multiplier::Deriv).inverse();
    let shifted = phi_x.times_x().zip_with(&phi_x, |a, b| a + 2.0 * t * b)?;
    if t == 0.0 {
        return Ok(shifted);
    }
    let phi_t = solution_time_derivative(phi_hat, cfg)?.inverse();
    Ok(shifted.zip_with(&phi_t, |a, b| a + t * b)?)
}

/// `S` applied to a time-dependent field `g(x, t)` with known `g_t`.
fn apply_s(g: &SpectralField, g_t: &SpectralField, t: f64) -> Result<RealField, SpectralError> {
    let g_x = g.apply(Multiplier::Deriv).inverse();
    let time = g_t.inverse();
    let space = g_x.times_x();
    space.zip_with(&g_x, |a, b| a + 2.0 * t * b)?.zip_with(&time, |a, b| a + t * b)
}

/// Scaling-Galilean field of a state with its commutator residuals.
#[derive(Debug, Clone)]
pub struct ScalingReport {
    pub field: RealField,
    /// `||S phi||_{H^r}`.
    pub norm: f64,
    /// `||[S, L] phi + phi|| / ||phi||`.
    pub residual_log: f64,
    /// `||[S, d/dx] phi + phi_x|| / ||phi_x||`.
    pub residual_derivative: f64,
}

/// `S phi` for a state whose field sits in the central half of the domain.
pub fn scaling_galilean(state: &SimState, cfg: &NonlinearityConfig, r: f64) -> Result<ScalingReport, DispersionError> {
    let phi_hat = state.solution();
    let phi = phi_hat.inverse();
    check_central_support(&phi, 1e-10)?;
    let t = state.t;
    let phi_t = solution_time_derivative(&phi_hat, cfg)?;
    let s_phi = apply_s(&phi_hat, &phi_t, t)?;
    let s_hat = s_phi.forward();

    let l_phi = phi_hat.apply(Multiplier::Log);
    let s_l_phi = apply_s(&l_phi, &phi_t.apply(Multiplier::Log), t)?;
    let l_s_phi = s_hat.apply(Multiplier::Log).inverse();
    let log_defect = s_l_phi.zip_with(&l_s_phi, |a, b| a - b)?.zip_with(&phi, |a, b| a + b)?;

    let dx_phi = phi_hat.apply(Multiplier::Deriv);
    let s_dx_phi = apply_s(&dx_phi, &phi_t.apply(Multiplier::Deriv), t)?;
    let dx_s_phi = s_hat.apply(Multiplier::Deriv).inverse();
    let dx = dx_phi.inverse();
    let dx_defect = s_dx_phi.zip_with(&dx_s_phi, |a, b| a - b)?.zip_with(&dx, |a, b| a + b)?;

    Ok(ScalingReport {
        norm: s_hat.sobolev_norm(r),
        residual_log: log_defect.l2_norm() / phi.l2_norm(),
        residual_derivative: dx_defect.l2_norm() / dx.l2_norm(),
        field: s_phi,
    })
}
