//! Time integration in the profile variable.
//!
//! The solution `phi` and the profile `h` are related mode by mode by
//! `phi^(xi, t) = exp(2 i t xi log|xi|) h^(xi, t)`, which removes the linear
//! flow `phi_t = 2 L phi_x` exactly. The profile obeys
//! `h^_t = -exp(-2 i t xi log|xi|) F[N(phi)]` and is advanced with classical
//! fixed-step RK4.
//!
//! A run stops early, keeping everything emitted so far, when a state turns
//! non-finite, when the high-passed field reaches the guard margin at the ends
//! of the domain, when the Sobolev norm jumps by more than [`DRIFT_LIMIT`] in a
//! single step, or when the logarithmic paraproduct norm reaches
//! [`BREAKDOWN_NORM`].

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::nonlinearity::{full_nonlinearity_hat, NonlinearityConfig, NonlinearityError};
use crate::paraproduct::{energy_report, ParaproductError, MAX_ENERGY_ORDER, SYMBOL_GRID_CAP};
use crate::spectral::{FourierGrid, Multiplier, RealField, SpectralError, SpectralField, C64};

/// Largest accepted relative change of the monitored Sobolev norm per step.
pub const DRIFT_LIMIT: f64 = 1e-2;
/// Paraproduct norm at which a run is declared to be breaking down.
pub const BREAKDOWN_NORM: f64 = 1.9;
/// Guard-margin amplitude limit relative to the field's peak.
pub const GUARD_LEVEL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum EvolutionError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Nonlinearity(#[from] NonlinearityError),
    #[error(transparent)]
    Paraproduct(#[from] ParaproductError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("snapshot initial data must be loaded before the run starts")]
    UnresolvedSnapshot,
}

/// Named initial profiles. Widths and centers are in `x` units.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// `a exp(-((x - c)/w)^2)`
    Gaussian { amplitude: f64, width: f64, center: f64 },
    /// `-a (2 (x - c)/w) exp(-((x - c)/w)^2)`, the `w`-scaled derivative of the bump.
    GaussianDerivative { amplitude: f64, width: f64, center: f64 },
    /// `a exp(-((x - c)/w)^2) cos(k (x - c))`
    Packet { amplitude: f64, width: f64, carrier: f64, center: f64 },
    /// Profile read from a snapshot file.
    Snapshot(PathBuf),
}

impl InitialCondition {
    pub fn gaussian(amplitude: f64, width: f64) -> Self {
        Self::Gaussian { amplitude, width, center: 0.0 }
    }

    /// Samples on `grid`; `None` for snapshot data.
    pub fn sample(&self, grid: FourierGrid) -> Option<RealField> {
        let field = match *self {
            Self::Gaussian { amplitude, width, center } => {
                RealField::from_fn(grid, |x| amplitude * (-((x - center) / width).powi(2)).exp())
            }
            Self::GaussianDerivative { amplitude, width, center } => RealField::from_fn(grid, |x| {
                let u = (x - center) / width;
                -amplitude * 2.0 * u * (-u * u).exp()
            }),
            Self::Packet { amplitude, width, carrier, center } => RealField::from_fn(grid, |x| {
                let u = x - center;
                amplitude * (-(u / width).powi(2)).exp() * (carrier * u).cos()
            }),
            Self::Snapshot(_) => return None,
        };
        Some(field)
    }

    fn validate(&self) -> Result<(), EvolutionError> {
        let (a, w) = match *self {
            Self::Gaussian { amplitude, width, .. }
            | Self::GaussianDerivative { amplitude, width, .. }
            | Self::Packet { amplitude, width, .. } => (amplitude, width),
            Self::Snapshot(_) => return Ok(()),
        };
        if !a.is_finite() || !(w > 0.0 && w.is_finite()) {
            return Err(EvolutionError::Config(format!("initial amplitude {a} / width {w} invalid")));
        }
        Ok(())
    }
}

/// Optional diagnostics beyond the always-on norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DiagnosticSet {
    /// Weighted energy and paraproduct norm (enables the breakdown monitor).
    pub energy: bool,
    /// `||S phi||_{H^r}`.
    pub vector_field: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n_points: usize,
    pub length: f64,
    pub initial: InitialCondition,
    /// Time step; `None` selects `0.25 dx`.
    pub dt: Option<f64>,
    pub t_end: f64,
    pub n_max: usize,
    /// Steps between diagnostics rows.
    pub output_stride: usize,
    /// Steps between snapshots, `0` for none.
    pub snapshot_stride: usize,
    pub diagnostics: DiagnosticSet,
    /// Fraction of the domain at each end that forms the guard margin.
    pub guard_fraction: f64,
    /// High-pass frequency of the guarded field.
    pub guard_cutoff: f64,
    /// Drop the nonlinearity.
    pub linear: bool,
    /// Order `s` of the monitored Sobolev norm.
    pub sobolev_order: f64,
    /// Order `r` of the Z-norm and of the vector-field norm.
    pub z_order: i32,
    /// Order of the weighted energy.
    pub energy_order: u32,
    pub seed: u64,
    /// Amplitude of a seeded random perturbation added to the initial data.
    pub perturbation: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_points: 2048,
            length: 1024.0,
            initial: InitialCondition::gaussian(1e-2, 5.0),
            dt: None,
            t_end: 100.0,
            n_max: 1,
            output_stride: 20,
            snapshot_stride: 0,
            diagnostics: DiagnosticSet::default(),
            guard_fraction: 0.1,
            guard_cutoff: 0.3,
            linear: false,
            sobolev_order: 4.0,
            z_order: 7,
            energy_order: 1,
            seed: 0,
            perturbation: 0.0,
        }
    }
}

impl SimConfig {
    pub fn grid(&self) -> Result<FourierGrid, EvolutionError> {
        Ok(FourierGrid::new(self.n_points, self.length)?)
    }

    pub fn time_step(&self) -> f64 {
        self.dt.unwrap_or(0.25 * self.length / self.n_points as f64)
    }

    pub fn nonlinearity(&self) -> NonlinearityConfig {
        NonlinearityConfig::with_n_max(self.n_max)
    }

    pub fn validate(&self) -> Result<(), EvolutionError> {
        let bad = |msg: String| Err(EvolutionError::Config(msg));
        self.grid()?;
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return bad(format!("dt = {dt} must be positive"));
            }
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end = {} must be nonnegative", self.t_end));
        }
        self.nonlinearity().validate()?;
        if self.output_stride == 0 {
            return bad("output_stride must be at least 1".into());
        }
        if !(self.guard_fraction > 0.0 && self.guard_fraction < 0.5) {
            return bad(format!("guard_fraction = {} must lie in (0, 0.5)", self.guard_fraction));
        }
        if !(self.guard_cutoff > 0.0 && self.guard_cutoff.is_finite()) {
            return bad(format!("guard_cutoff = {} must be positive", self.guard_cutoff));
        }
        if !self.sobolev_order.is_finite() || self.sobolev_order < 0.0 {
            return bad(format!("sobolev_order = {} must be nonnegative", self.sobolev_order));
        }
        if self.z_order < 0 {
            return bad(format!("z_order = {} must be nonnegative", self.z_order));
        }
        if self.diagnostics.energy {
            if self.energy_order > MAX_ENERGY_ORDER {
                return bad(format!("energy_order = {} exceeds {MAX_ENERGY_ORDER}", self.energy_order));
            }
            if self.n_points > SYMBOL_GRID_CAP {
                return bad(format!("energy diagnostics need n_points <= {SYMBOL_GRID_CAP}"));
            }
        }
        if !(self.perturbation >= 0.0 && self.perturbation.is_finite()) {
            return bad(format!("perturbation = {} must be nonnegative", self.perturbation));
        }
        self.initial.validate()
    }

    /// Initial field from an analytic profile plus the seeded perturbation.
    pub fn initial_field(&self) -> Result<RealField, EvolutionError> {
        let grid = self.grid()?;
        let base = self.initial.sample(grid).ok_or(EvolutionError::UnresolvedSnapshot)?;
        if self.perturbation == 0.0 {
            return Ok(base);
        }
        let noise = seeded_perturbation(grid, self.perturbation, self.seed).inverse();
        Ok(base.zip_with(&noise, |a, b| a + b)?)
    }
}

/// Mean-free random field with a Gaussian spectral envelope `exp(-xi^2)` and
/// peak coefficient modulus at most `amplitude`.
pub fn seeded_perturbation(grid: FourierGrid, amplitude: f64, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hat = SpectralField::zeros(grid);
    let half = (grid.n_points() / 2) as i64;
    for k in 1..half {
        let xi = grid.xi_at_k(k);
        let c = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * (amplitude * (-xi * xi).exp() / 2f64.sqrt());
        let (i, j) = (grid.index_of(k).unwrap(), grid.index_of(-k).unwrap());
        hat.coeffs_mut()[i] = c;
        hat.coeffs_mut()[j] = c.conj();
    }
    hat
}

/// Time and profile coefficients `h^(xi, t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub profile: SpectralField,
    pub step: u64,
}

impl SimState {
    pub fn from_solution(phi_hat: &SpectralField, t: f64) -> Self {
        Self { t, profile: solution_to_profile(phi_hat, t), step: 0 }
    }

    pub fn solution(&self) -> SpectralField {
        profile_to_solution(self)
    }

    pub fn field(&self) -> RealField {
        self.solution().inverse()
    }
}

/// `phi^ = exp(2 i t xi log|xi|) h^`.
pub fn profile_to_solution(state: &SimState) -> SpectralField {
    state.profile.log_phase(2.0 * state.t)
}

/// `h^ = exp(-2 i t xi log|xi|) phi^`.
pub fn solution_to_profile(phi_hat: &SpectralField, t: f64) -> SpectralField {
    phi_hat.log_phase(-2.0 * t)
}

/// Exact linear flow over `dt`.
pub fn linear_propagate(phi_hat: &SpectralField, dt: f64) -> SpectralField {
    phi_hat.log_phase(2.0 * dt)
}

/// Mirror `x -> -x`.
pub fn reflect(f: &SpectralField) -> SpectralField {
    let n = f.grid().n_points();
    let c = f.coeffs();
    let coeffs = (0..n).map(|i| c[(n - i) % n]).collect();
    SpectralField::new(*f.grid(), coeffs).expect("reflection keeps entries finite")
}

/// `phi_t = 2 L phi_x - N(phi)` in coefficient space.
pub fn solution_time_derivative(phi_hat: &SpectralField, cfg: &NonlinearityConfig) -> Result<SpectralField, EvolutionError> {
    let linear = phi_hat.apply(Multiplier::DerivLog).scale(2.0);
    Ok(linear.sub(&full_nonlinearity_hat(phi_hat, cfg)?)?)
}

/// Right-hand side of the profile equation at `(t, h^)`.
fn profile_rhs(t: f64, profile: &SpectralField, cfg: &NonlinearityConfig) -> Result<SpectralField, EvolutionError> {
    let phi_hat = profile.log_phase(2.0 * t);
    let n_hat = full_nonlinearity_hat(&phi_hat, cfg)?;
    Ok(n_hat.log_phase(-2.0 * t).scale(-1.0))
}

/// `d h^ / dt` for the state.
pub fn rhs_profile(state: &SimState, cfg: &NonlinearityConfig) -> Result<SpectralField, EvolutionError> {
    profile_rhs(state.t, &state.profile, cfg)
}

/// Integrator for one configuration: RK4 step plus the linear switch.
#[derive(Debug, Clone)]
pub struct Stepper {
    cfg: NonlinearityConfig,
    linear: bool,
}

impl Stepper {
    pub fn new(cfg: NonlinearityConfig, linear: bool) -> Result<Self, EvolutionError> {
        cfg.validate()?;
        Ok(Self { cfg, linear })
    }

    pub fn rhs(&self, t: f64, profile: &SpectralField) -> Result<SpectralField, EvolutionError> {
        if self.linear {
            return Ok(SpectralField::zeros(*profile.grid()));
        }
        profile_rhs(t, profile, &self.cfg)
    }

    pub fn step(&self, state: &SimState, dt: f64) -> Result<SimState, EvolutionError> {
        let t = state.t;
        let h = &state.profile;
        let next = if self.linear {
            h.clone()
        } else {
            let k1 = self.rhs(t, h)?;
            let k2 = self.rhs(t + 0.5 * dt, &h.add(&k1.scale(0.5 * dt))?)?;
            let k3 = self.rhs(t + 0.5 * dt, &h.add(&k2.scale(0.5 * dt))?)?;
            let k4 = self.rhs(t + dt, &h.add(&k3.scale(dt))?)?;
            let incr = k1.add(&k2.scale(2.0))?.add(&k3.scale(2.0))?.add(&k4)?;
            h.add(&incr.scale(dt / 6.0))?
        };
        Ok(SimState { t: t + dt, profile: next, step: state.step + 1 })
    }

    /// Advance to `t_end` with steps of at most `dt`, landing on `t_end`.
    pub fn advance(&self, state: &SimState, dt: f64, t_end: f64) -> Result<SimState, EvolutionError> {
        let t0 = state.t;
        let steps = step_count(t_end - t0, dt);
        let mut s = state.clone();
        for k in 1..=steps {
            let target = if k == steps { t_end } else { t0 + k as f64 * dt };
            let h = target - s.t;
            s = self.step(&s, h)?;
            s.t = target;
        }
        Ok(s)
    }
}

fn step_count(span: f64, dt: f64) -> u64 {
    if span <= 0.0 {
        0
    } else {
        (span / dt - 1e-9).ceil().max(1.0) as u64
    }
}

/// One classical RK4 step of the full equation.
pub fn step_rk4(state: &SimState, dt: f64, cfg: &NonlinearityConfig) -> Result<SimState, EvolutionError> {
    Stepper::new(*cfg, false)?.step(state, dt)
}

/// Largest amplitude in the guard margin of the high-passed field, relative
/// to the peak of the full field. The high-pass weight is
/// `erfc((cutoff - |xi|) / (cutoff / 8)) / 2`.
pub fn guard_ratio(phi_hat: &SpectralField, fraction: f64, cutoff: f64) -> f64 {
    let grid = *phi_hat.grid();
    let width = cutoff / 8.0;
    let high = phi_hat.map_modes(|_, xi| C64::new(0.5 * libm::erfc((cutoff - xi.abs()) / width), 0.0)).inverse();
    let peak = phi_hat.inverse().max_abs();
    if peak == 0.0 {
        return 0.0;
    }
    let n = grid.n_points();
    let m = ((fraction * n as f64).ceil() as usize).max(1);
    let edge = high.samples()[..m].iter().chain(&high.samples()[n - m..]).fold(0.0f64, |acc, v| acc.max(v.abs()));
    edge / peak
}

/// One row of run diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub step: u64,
    pub t: f64,
    pub sobolev: f64,
    pub z_norm: f64,
    pub slope_max: f64,
    pub log_slope_max: f64,
    pub mean: f64,
    pub guard: f64,
    pub energy: Option<f64>,
    pub tblog_norm: Option<f64>,
    pub vector_field: Option<f64>,
}

impl DiagnosticsRecord {
    pub const COLUMNS: [&'static str; 11] = [
        "step",
        "t",
        "sobolev_norm",
        "z_norm",
        "max_abs_phi_x",
        "max_abs_L_phi_x",
        "mean",
        "guard_ratio",
        "weighted_energy",
        "tblog_norm",
        "vector_field_norm",
    ];
}

#[derive(Debug, Clone, PartialEq)]
pub enum AbortReason {
    NonFinite,
    Guard { ratio: f64 },
    Drift { relative: f64 },
    Breakdown { norm: f64 },
}

impl std::fmt::Display for AbortReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::NonFinite => write!(f, "state became non-finite"),
            Self::Guard { ratio } => {
                write!(f, "field reached the guard margin at relative amplitude {ratio:e}; the domain is too small")
            }
            Self::Drift { relative } => write!(f, "Sobolev norm changed by {relative:e} in one step"),
            Self::Breakdown { norm } => write!(f, "paraproduct norm {norm} reached {BREAKDOWN_NORM}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Abort {
    pub reason: AbortReason,
    pub last_good_time: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub records: Vec<DiagnosticsRecord>,
    pub final_state: SimState,
    pub abort: Option<Abort>,
}

/// Observer hook called for every diagnostics row and snapshot time.
pub trait RunObserver {
    fn record(&mut self, _state: &SimState, _record: &DiagnosticsRecord) {}
    fn snapshot(&mut self, _state: &SimState) {}
}

impl RunObserver for () {}

/// A configured run.
#[derive(Debug, Clone)]
pub struct Simulation {
    config: SimConfig,
    stepper: Stepper,
    state: SimState,
}

impl Simulation {
    /// Start from the configured analytic profile.
    pub fn new(config: SimConfig) -> Result<Self, EvolutionError> {
        config.validate()?;
        let phi = config.initial_field()?;
        let state = SimState::from_solution(&phi.forward(), 0.0);
        Self::from_state(config, state)
    }

    /// Start from a given state, for example one read from a snapshot.
    pub fn from_state(config: SimConfig, state: SimState) -> Result<Self, EvolutionError> {
        config.validate()?;
        if *state.profile.grid() != config.grid()? {
            return Err(EvolutionError::Config("initial state does not match the configured grid".into()));
        }
        let stepper = Stepper::new(config.nonlinearity(), config.linear)?;
        Ok(Self { config, stepper, state })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn diagnostics(&self, state: &SimState) -> Result<DiagnosticsRecord, EvolutionError> {
        let cfg = &self.config;
        let phi_hat = state.solution();
        let slope = phi_hat.apply(Multiplier::Deriv).inverse().max_abs();
        let log_slope = phi_hat.apply(Multiplier::DerivLog).inverse().max_abs();
        let (energy, tblog_norm) = if cfg.diagnostics.energy {
            match energy_report(&phi_hat.inverse(), cfg.energy_order) {
                Ok(r) => (Some(r.energy()), Some(r.tblog_norm)),
                Err(ParaproductError::NotCoercive { norm }) => (None, Some(norm)),
                Err(e) => return Err(e.into()),
            }
        } else {
            (None, None)
        };
        let vector_field = if cfg.diagnostics.vector_field {
            let s_phi = crate::dispersion::scaling_field(&phi_hat, state.t, &cfg.nonlinearity())?;
            Some(s_phi.forward().sobolev_norm(cfg.z_order as f64))
        } else {
            None
        };
        Ok(DiagnosticsRecord {
            step: state.step,
            t: state.t,
            sobolev: phi_hat.sobolev_norm(cfg.sobolev_order),
            z_norm: phi_hat.z_norm(cfg.z_order),
            slope_max: slope,
            log_slope_max: log_slope,
            mean: phi_hat.coeffs()[0].re,
            guard: guard_ratio(&phi_hat, cfg.guard_fraction, cfg.guard_cutoff),
            energy,
            tblog_norm,
            vector_field,
        })
    }

    fn check(&self, record: &DiagnosticsRecord) -> Option<AbortReason> {
        if record.guard > GUARD_LEVEL {
            return Some(AbortReason::Guard { ratio: record.guard });
        }
        match record.tblog_norm {
            Some(norm) if norm >= BREAKDOWN_NORM => Some(AbortReason::Breakdown { norm }),
            _ => None,
        }
    }

    pub fn run(&mut self) -> Result<RunOutcome, EvolutionError> {
        self.run_with(&mut ())
    }

    /// Integrate to `t_end`, reporting diagnostics every `output_stride`
    /// steps and at the end, and snapshots every `snapshot_stride` steps.
    pub fn run_with(&mut self, observer: &mut dyn RunObserver) -> Result<RunOutcome, EvolutionError> {
        let cfg = self.config.clone();
        let dt = cfg.time_step();
        let t0 = self.state.t;
        let steps = step_count(cfg.t_end - t0, dt);
        let mut records = Vec::new();
        let s_order = cfg.sobolev_order;

        let first = self.diagnostics(&self.state)?;
        observer.record(&self.state, &first);
        let mut abort = self.check(&first).map(|reason| Abort { reason, last_good_time: t0 });
        records.push(first);
        if abort.is_none() && cfg.snapshot_stride > 0 {
            observer.snapshot(&self.state);
        }

        let mut norm = self.state.profile.sobolev_norm(s_order);
        let mut k = 0;
        while abort.is_none() && k < steps {
            k += 1;
            let target = if k == steps { cfg.t_end } else { t0 + k as f64 * dt };
            let mut next = self.stepper.step(&self.state, target - self.state.t)?;
            next.t = target;
            let finite = next.profile.coeffs().iter().all(|c| c.re.is_finite() && c.im.is_finite());
            if !finite {
                abort = Some(Abort { reason: AbortReason::NonFinite, last_good_time: self.state.t });
                break;
            }
            let new_norm = next.profile.sobolev_norm(s_order);
            let relative = if norm > 0.0 { (new_norm - norm).abs() / norm } else { 0.0 };
            if relative > DRIFT_LIMIT {
                abort = Some(Abort { reason: AbortReason::Drift { relative }, last_good_time: self.state.t });
                break;
            }
            norm = new_norm;
            self.state = next;
            let output = k == steps || k % cfg.output_stride as u64 == 0;
            if output {
                let record = self.diagnostics(&self.state)?;
                observer.record(&self.state, &record);
                if let Some(reason) = self.check(&record) {
                    abort = Some(Abort { reason, last_good_time: self.state.t });
                }
                records.push(record);
            }
            if abort.is_none() && cfg.snapshot_stride > 0 && (k % cfg.snapshot_stride as u64 == 0 || k == steps) {
                observer.snapshot(&self.state);
            }
        }
        Ok(RunOutcome { records, final_state: self.state.clone(), abort })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump(grid: FourierGrid, a: f64, w: f64) -> SpectralField {
        RealField::from_fn(grid, |x| a * (-(x / w).powi(2)).exp()).forward()
    }

    #[test]
    fn profile_maps_are_inverse_and_unimodular() {
        let grid = FourierGrid::new(128, 40.0).unwrap();
        let phi = bump(grid, 0.3, 2.0);
        let state = SimState::from_solution(&phi, 17.3);
        let back = profile_to_solution(&state);
        for ((a, b), h) in back.coeffs().iter().zip(phi.coeffs()).zip(state.profile.coeffs()) {
            assert!((a - b).norm() <= 1e-12 * phi.coeffs()[0].norm());
            assert!((h.norm() - b.norm()).abs() <= 1e-15 * b.norm().max(1e-300) + 1e-300);
        }
        assert_eq!(solution_to_profile(&phi, 0.0), phi);
    }

    #[test]
    fn linear_propagation() {
        let grid = FourierGrid::new(64, 2.0 * std::f64::consts::PI).unwrap();
        let phi = bump(grid, 1.0, 0.7);
        let out = linear_propagate(&phi, 3.7);
        assert!((out.l2_norm() - phi.l2_norm()).abs() <= 1e-13 * phi.l2_norm());
        let mut single = SpectralField::zeros(grid);
        single.coeffs_mut()[1] = C64::new(0.5, 0.25);
        assert_eq!(linear_propagate(&single, 2.0).coeffs()[1], C64::new(0.5, 0.25));
        single.coeffs_mut()[1] = C64::new(0.0, 0.0);
        single.coeffs_mut()[3] = C64::new(1.0, 0.0);
        let turned = linear_propagate(&single, 0.1).coeffs()[3];
        assert!((turned.arg() - 0.2 * 3.0 * 3f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn tiny_and_zero_states() {
        let grid = FourierGrid::new(128, 60.0).unwrap();
        let cfg = NonlinearityConfig::default();
        let zero = SimState::from_solution(&SpectralField::zeros(grid), 0.4);
        assert!(rhs_profile(&zero, &cfg).unwrap().coeffs().iter().all(|c| *c == C64::new(0.0, 0.0)));
        let tiny = SimState::from_solution(&bump(grid, 1e-8, 3.0), 0.4);
        assert!(rhs_profile(&tiny, &cfg).unwrap().l2_norm() < 1e-22);
    }

    #[test]
    fn profile_rhs_matches_solution_law() {
        let grid = FourierGrid::new(128, 40.0).unwrap();
        let cfg = NonlinearityConfig::with_n_max(2);
        let t = 1.3;
        let phi = bump(grid, 0.2, 2.0);
        let state = SimState::from_solution(&phi, t);
        let dh = rhs_profile(&state, &cfg).unwrap();
        let phi_t = solution_time_derivative(&phi, &cfg).unwrap();
        let linear = phi.apply(Multiplier::DerivLog).scale(2.0);
        let expected = solution_to_profile(&phi_t.sub(&linear).unwrap(), t);
        let gap = dh.sub(&expected).unwrap().l2_norm();
        assert!(gap <= 1e-12 * dh.l2_norm(), "{gap}");
    }

    #[test]
    fn linear_mode_freezes_the_profile() {
        let grid = FourierGrid::new(64, 30.0).unwrap();
        let stepper = Stepper::new(NonlinearityConfig::default(), true).unwrap();
        let start = SimState::from_solution(&bump(grid, 0.1, 2.0), 0.0);
        let end = stepper.advance(&start, 0.05, 50.0).unwrap();
        assert_eq!(end.step, 1000);
        assert_eq!(end.profile, start.profile);
        let phi_end = end.solution();
        for s in [0.0, 1.0, 4.0] {
            let (a, b) = (phi_end.sobolev_norm(s), start.profile.sobolev_norm(s));
            assert!((a - b).abs() <= 1e-12 * b);
        }
    }

    #[test]
    fn mean_is_conserved() {
        let grid = FourierGrid::new(64, 30.0).unwrap();
        let stepper = Stepper::new(NonlinearityConfig::default(), false).unwrap();
        let start = SimState::from_solution(&bump(grid, 0.3, 2.0), 0.0);
        let end = stepper.advance(&start, 0.1, 2.0).unwrap();
        assert_eq!(end.profile.coeffs()[0], start.profile.coeffs()[0]);
    }

    #[test]
    fn reflection() {
        let grid = FourierGrid::new(32, 10.0).unwrap();
        let f = RealField::from_fn(grid, |x| (x - 1.0).exp() * (-(x * x)).exp());
        let r = reflect(&f.forward()).inverse();
        for j in 1..32 {
            assert!((r.samples()[j] - f.samples()[32 - j]).abs() < 1e-14);
        }
    }

    #[test]
    fn config_validation() {
        assert!(SimConfig::default().validate().is_ok());
        let mut c = SimConfig { dt: Some(-1.0), ..SimConfig::default() };
        assert!(c.validate().is_err());
        c.dt = None;
        c.guard_fraction = 0.5;
        assert!(c.validate().is_err());
        c.guard_fraction = 0.1;
        c.n_max = 9;
        assert!(c.validate().is_err());
        c.n_max = 1;
        c.diagnostics.energy = true;
        c.n_points = 4096;
        assert!(c.validate().is_err());
        let c = SimConfig { initial: InitialCondition::Snapshot("x.bin".into()), ..SimConfig::default() };
        assert!(matches!(Simulation::new(c), Err(EvolutionError::UnresolvedSnapshot)));
    }

    #[test]
    fn perturbation_is_seeded() {
        let grid = FourierGrid::new(64, 30.0).unwrap();
        let a = seeded_perturbation(grid, 1e-3, 5);
        assert_eq!(a, seeded_perturbation(grid, 1e-3, 5));
        assert_ne!(a, seeded_perturbation(grid, 1e-3, 6));
        assert_eq!(a.coeffs()[0], C64::new(0.0, 0.0));
        assert!(a.symmetry_defect() == 0.0);
    }

    #[test]
    fn small_domain_trips_the_guard() {
        let cfg = SimConfig {
            n_points: 512,
            length: 256.0,
            t_end: 20.0,
            output_stride: 8,
            ..SimConfig::default()
        };
        let outcome = Simulation::new(cfg).unwrap().run().unwrap();
        let abort = outcome.abort.expect("guard should trip");
        assert!(matches!(abort.reason, AbortReason::Guard { .. }));
        assert!(!outcome.records.is_empty());
    }
}
