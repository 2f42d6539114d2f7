//! The `sqgfront` command line.
//!
//! Exit status is 0 on success, 1 for invalid input (including a missing
//! subcommand) and 2 when a computation aborts or an oracle check fails.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use sqgfront_core::symbols::{coeff_c, coeff_d, t_symbol_closed, t_symbol_quadrature, SymbolQuery};

use crate::config::parse_config;
use crate::dispersion::{phase_phi, DecayStudy, ResonanceSets, ScatteringPhase};
use crate::evolution::{DiagnosticsRecord, EvolutionError, InitialCondition, RunObserver, SimState, Simulation};
use crate::manifest::RunManifest;
use crate::nonlinearity::{
    cubic_term_convolution, cubic_term_spectral, full_nonlinearity, zeta_integral_oracle, NonlinearityConfig,
};
use crate::paraproduct::{energy_report, ParaproductError};
use crate::snapshot::{read_snapshot, write_bytes_atomic, write_snapshot};
use crate::spectral::{FourierGrid, RealField, SpectralField, C64};

#[derive(Debug, Parser)]
#[command(name = "sqgfront", version, about = "Simulation and diagnostics for the SQG front equation", arg_required_else_help = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate a configured run; writes diagnostics.csv, snapshots and manifest.json.
    Simulate {
        /// Configuration file (key = value lines).
        #[arg(long)]
        config: PathBuf,
        /// Output directory, created if missing.
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Linear L-infinity decay of a wave packet with a fitted exponent (CSV).
    DecayStudy(DecayArgs),
    /// Compare closed-form and quadrature symbols on random tuples (CSV).
    SymbolCheck {
        /// Degree index n; the symbol takes 2n + 1 arguments.
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Relative tolerance of each comparison.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Expansion coefficients c_n and d_{n,l} for n = 1..=N (CSV).
    Coeffs {
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Two-path checks of the nonlinearity (JSON).
    OracleCheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random fields in the trilinear comparison.
        #[arg(long, default_value_t = 20)]
        fields: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Paraproduct norm and weighted energies of a Gaussian or a snapshot (JSON).
    EnergyReport {
        #[arg(long, default_value_t = 1e-2)]
        amplitude: f64,
        #[arg(long, default_value_t = 5.0)]
        width: f64,
        #[arg(long, default_value_t = 256)]
        n_points: usize,
        #[arg(long, default_value_t = 128.0)]
        length: f64,
        /// Energy order s.
        #[arg(long, default_value_t = 2)]
        order: u32,
        /// Use the field stored in this snapshot instead of a Gaussian.
        #[arg(long)]
        snapshot: Option<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Phase function and resonance-set labels on an (eta1, eta2) grid (CSV).
    ResonanceMap {
        #[arg(long, default_value_t = 1.0)]
        xi: f64,
        #[arg(long, default_value_t = 0.0)]
        t: f64,
        /// Points per axis.
        #[arg(long, default_value_t = 101)]
        points: usize,
        /// Half-width of the square; defaults to 2|xi|.
        #[arg(long)]
        extent: Option<f64>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Run a configuration and track the modified-scattering phase at given modes (CSV).
    ScatterPhase {
        #[arg(long)]
        config: PathBuf,
        /// Positive integer wavenumbers k, with xi = 2 pi k / L.
        #[arg(long, value_delimiter = ',', required = true)]
        modes: Vec<i64>,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Debug, Args)]
pub struct OutArg {
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecayArgs {
    #[arg(long, default_value_t = 1 << 14)]
    pub n_points: usize,
    #[arg(long, default_value_t = 4000.0)]
    pub length: f64,
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 4.0)]
    pub width: f64,
    #[arg(long, default_value_t = 1.5)]
    pub carrier: f64,
    #[arg(long, default_value_t = 20.0)]
    pub t_start: f64,
    #[arg(long, default_value_t = 200.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 40)]
    pub samples: usize,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug)]
pub enum Failure {
    /// Bad input; exit status 1.
    Validation(String),
    /// Numerical abort or failed check; exit status 2.
    Numerical(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Self::Validation(_) => 1,
            Self::Numerical(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Validation(m) | Self::Numerical(m) => m,
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> Failure {
    Failure::Validation(e.to_string())
}

fn numerical(e: impl std::fmt::Display) -> Failure {
    Failure::Numerical(e.to_string())
}

fn evolution_failure(e: EvolutionError) -> Failure {
    match e {
        EvolutionError::Config(_) | EvolutionError::UnresolvedSnapshot => invalid(e),
        _ => numerical(e),
    }
}

/// `name[unit]` header.
fn header(cols: &[(&str, &str)]) -> String {
    cols.iter().map(|(n, u)| format!("{n}[{u}]")).collect::<Vec<_>>().join(",")
}

fn emit(out: &OutArg, stdout: &mut dyn Write, text: &str) -> Result<(), Failure> {
    match &out.out {
        Some(path) => write_bytes_atomic(path, text.as_bytes()).map_err(|e| invalid(format!("{}: {e}", path.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(invalid),
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

fn record_row(r: &DiagnosticsRecord) -> String {
    format!(
        "{},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{},{},{}\n",
        r.step,
        r.t,
        r.sobolev,
        r.z_norm,
        r.slope_max,
        r.log_slope_max,
        r.mean,
        r.guard,
        opt(r.energy),
        opt(r.tblog_norm),
        opt(r.vector_field)
    )
}

fn diagnostics_header() -> String {
    let units = ["count", "time", "1", "1", "1", "1", "length", "1", "1", "1", "1"];
    let cols: Vec<_> = DiagnosticsRecord::COLUMNS.iter().copied().zip(units).collect();
    header(&cols) + "\n"
}

fn load_simulation(config_path: &Path) -> Result<Simulation, Failure> {
    let config = parse_config(config_path).map_err(invalid)?;
    match &config.initial {
        InitialCondition::Snapshot(path) => {
            let state = read_snapshot(path).map_err(invalid)?;
            Simulation::from_state(config, state).map_err(evolution_failure)
        }
        _ => Simulation::new(config).map_err(evolution_failure),
    }
}

struct SimulateObserver {
    csv: String,
    dir: PathBuf,
    snapshots: Vec<PathBuf>,
    error: Option<String>,
}

impl RunObserver for SimulateObserver {
    fn record(&mut self, _state: &SimState, record: &DiagnosticsRecord) {
        self.csv.push_str(&record_row(record));
    }

    fn snapshot(&mut self, state: &SimState) {
        let path = self.dir.join(format!("snapshot_{:08}.sqgf", state.step));
        match write_snapshot(state, &path) {
            Ok(()) => self.snapshots.push(path),
            Err(e) => self.error = self.error.take().or(Some(e.to_string())),
        }
    }
}

fn simulate(config_path: &Path, out_dir: &Path, stderr: &mut dyn Write) -> Result<(), Failure> {
    let mut sim = load_simulation(config_path)?;
    std::fs::create_dir_all(out_dir).map_err(|e| invalid(format!("{}: {e}", out_dir.display())))?;
    let mut manifest = RunManifest::start("simulate", Some(sim.config().clone()));
    let mut obs = SimulateObserver { csv: diagnostics_header(), dir: out_dir.to_path_buf(), snapshots: Vec::new(), error: None };
    let result = sim.run_with(&mut obs);

    let csv_path = out_dir.join("diagnostics.csv");
    write_bytes_atomic(&csv_path, obs.csv.as_bytes()).map_err(|e| invalid(format!("{}: {e}", csv_path.display())))?;
    manifest.add_file(&csv_path);
    for p in &obs.snapshots {
        manifest.add_file(p);
    }
    let (abort, failure) = match result {
        Ok(outcome) => {
            let failure = outcome.abort.as_ref().map(|a| {
                numerical(format!("run aborted: {} (last good time {})", a.reason, a.last_good_time))
            });
            (outcome.abort, failure)
        }
        Err(e) => (None, Some(evolution_failure(e))),
    };
    manifest.finish(abort);
    manifest.write(&out_dir.join("manifest.json")).map_err(invalid)?;
    if let Some(e) = obs.error {
        let _ = writeln!(stderr, "snapshot write failed: {e}");
        return Err(Failure::Validation(e));
    }
    failure.map_or(Ok(()), Err)
}

fn decay_study(a: &DecayArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let study = DecayStudy {
        n_points: a.n_points,
        length: a.length,
        amplitude: a.amplitude,
        width: a.width,
        carrier: a.carrier,
        t_start: a.t_start,
        t_end: a.t_end,
        samples: a.samples,
    };
    let result = study.run().map_err(|e| match e {
        crate::dispersion::DispersionError::Fit(_) => numerical(e),
        _ => invalid(e),
    })?;
    let mut s = header(&[("t", "time"), ("linf", "amplitude"), ("fitted_exponent", "1")]) + "\n";
    for (t, v) in &result.series {
        let _ = writeln!(s, "{t:?},{v:?},{:?}", result.exponent);
    }
    emit(&a.out, stdout, &s)
}

fn symbol_check(n: usize, trials: usize, tol: f64, seed: u64, out: &OutArg, stdout: &mut dyn Write) -> Result<(), Failure> {
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance {tol} must be positive")));
    }
    SymbolQuery::new(n, &vec![1.0; 2 * n + 1], tol).map_err(invalid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = header(&[
        ("trial", "count"),
        ("n", "count"),
        ("etas", "wavenumber"),
        ("closed", "1"),
        ("quadrature", "1"),
        ("relative_error", "1"),
        ("status", "text"),
    ]) + "\n";
    let mut failures = 0;
    for trial in 0..trials {
        let etas: Vec<f64> = (0..2 * n + 1)
            .map(|_| {
                let m: f64 = rng.gen_range(0.3..3.0);
                if rng.gen_bool(0.5) { m } else { -m }
            })
            .collect();
        let q = SymbolQuery::new(n, &etas, tol * 1e-2).map_err(invalid)?;
        let closed = t_symbol_closed(&q);
        let quad = t_symbol_quadrature(&q).map_err(numerical)?;
        let rel = (closed - quad).abs() / closed.abs().max(f64::MIN_POSITIVE);
        let pass = rel <= tol;
        failures += usize::from(!pass);
        let etas = etas.iter().map(|e| format!("{e:?}")).collect::<Vec<_>>().join(" ");
        let _ = writeln!(s, "{trial},{n},{etas},{closed:?},{quad:?},{rel:e},{}", if pass { "PASS" } else { "FAIL" });
    }
    emit(out, stdout, &s)?;
    if failures > 0 {
        return Err(numerical(format!("{failures} of {trials} comparisons exceeded {tol:e}")));
    }
    Ok(())
}

fn coeffs(n_top: usize, out: &OutArg, stdout: &mut dyn Write) -> Result<(), Failure> {
    if n_top == 0 {
        return Err(invalid("--n must be at least 1"));
    }
    let mut s = header(&[("n", "count"), ("l", "count"), ("c_n", "1"), ("d_n_l", "1")]) + "\n";
    for n in 1..=n_top {
        let c = coeff_c(n);
        for l in 1..=2 * n + 1 {
            let d = coeff_d(n, l).map_err(invalid)?;
            let _ = writeln!(s, "{n},{l},{c:?},{d:?}");
        }
    }
    emit(out, stdout, &s)
}

fn random_band_limited(grid: FourierGrid, amplitude: f64, band: i64, rng: &mut ChaCha8Rng) -> RealField {
    let mut hat = SpectralField::zeros(grid);
    for k in 1..=band {
        let c = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * amplitude;
        hat.coeffs_mut()[grid.index_of(k).expect("band below Nyquist")] = c;
        hat.coeffs_mut()[grid.index_of(-k).expect("band below Nyquist")] = c.conj();
    }
    hat.inverse()
}

fn oracle_check(seed: u64, fields: usize, out: &OutArg, stdout: &mut dyn Write) -> Result<(), Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = FourierGrid::new(64, 20.0).map_err(invalid)?;
    let mut worst: f64 = 0.0;
    for _ in 0..fields {
        let phi = random_band_limited(grid, 1e-2, 31, &mut rng);
        let spec = cubic_term_spectral(&phi).map_err(numerical)?.forward();
        let conv = cubic_term_convolution(&phi.forward()).map_err(numerical)?;
        worst = worst.max(spec.sub(&conv).map_err(numerical)?.l2_norm() / conv.l2_norm());
    }

    let g128 = FourierGrid::new(128, 40.0).map_err(invalid)?;
    let quintic_gap = |a: f64| -> Result<f64, Failure> {
        let phi = RealField::from_fn(g128, |x| a * (-(x / 2.0).powi(2)).exp());
        let n1 = full_nonlinearity(&phi, &NonlinearityConfig::with_n_max(1)).map_err(numerical)?;
        let n2 = full_nonlinearity(&phi, &NonlinearityConfig::with_n_max(2)).map_err(numerical)?;
        Ok(n1.forward().sub(&n2.forward()).map_err(numerical)?.l2_norm())
    };
    let quintic = quintic_gap(0.1)? / quintic_gap(0.05)?;

    let g256 = FourierGrid::new(256, 40.0).map_err(invalid)?;
    let cfg = NonlinearityConfig::with_n_max(2);
    let idx = 133;
    let oracle_gap = |a: f64| -> Result<f64, Failure> {
        let phi = RealField::from_fn(g256, |x| a * (-(x - 0.3).powi(2)).exp());
        let oracle = zeta_integral_oracle(&phi, idx, &cfg).map_err(numerical)?;
        let series = full_nonlinearity(&phi, &cfg).map_err(numerical)?.samples()[idx];
        Ok((oracle - series).abs())
    };
    let zeta = oracle_gap(0.1)? / oracle_gap(0.05)?;

    let checks = [
        ("trilinear_relative_gap", worst, worst <= 1e-11, "<= 1e-11"),
        ("quintic_gap_ratio", quintic, (24.0..=40.0).contains(&quintic), "[24, 40]"),
        ("oracle_gap_ratio", zeta, (64.0..=256.0).contains(&zeta), "[64, 256]"),
    ];
    let report: serde_json::Map<_, _> = checks
        .iter()
        .map(|(name, v, pass, bound)| (name.to_string(), json!({ "value": v, "bound": bound, "pass": pass })))
        .collect();
    let text = serde_json::to_string_pretty(&json!({ "seed": seed, "fields": fields, "checks": report })).map_err(invalid)?;
    emit(out, stdout, &(text + "\n"))?;
    if checks.iter().any(|c| !c.2) {
        return Err(numerical("an oracle check failed"));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn energy(
    amplitude: f64,
    width: f64,
    n_points: usize,
    length: f64,
    order: u32,
    snapshot: Option<&Path>,
    out: &OutArg,
    stdout: &mut dyn Write,
) -> Result<(), Failure> {
    let phi = match snapshot {
        Some(p) => read_snapshot(p).map_err(invalid)?.field(),
        None => {
            let grid = FourierGrid::new(n_points, length).map_err(invalid)?;
            if !(width > 0.0) {
                return Err(invalid("--width must be positive"));
            }
            RealField::from_fn(grid, |x| amplitude * (-(x / width).powi(2)).exp())
        }
    };
    let hat = phi.forward();
    let sobolev: Vec<f64> = (0..=order).map(|j| hat.sobolev_norm(j as f64)).collect();
    let value = match energy_report(&phi, order) {
        Ok(r) => json!({
            "order": order,
            "sobolev_norms": sobolev,
            "tblog_norm": r.tblog_norm,
            "coercivity_margin": r.margin(),
            "energies": r.energies,
            "energy_tilde": (0..=order).map(|j| r.tilde(j)).collect::<Vec<_>>(),
        }),
        Err(ParaproductError::NotCoercive { norm }) => {
            let text = serde_json::to_string_pretty(&json!({ "order": order, "tblog_norm": norm })).map_err(invalid)?;
            emit(out, stdout, &(text + "\n"))?;
            return Err(numerical(format!("paraproduct norm {norm} is not below 2; energies are undefined")));
        }
        Err(e @ (ParaproductError::GridTooLarge { .. } | ParaproductError::OrderTooLarge { .. })) => return Err(invalid(e)),
        Err(e) => return Err(numerical(e)),
    };
    let text = serde_json::to_string_pretty(&value).map_err(invalid)?;
    emit(out, stdout, &(text + "\n"))
}

fn resonance_map(xi: f64, t: f64, points: usize, extent: Option<f64>, out: &OutArg, stdout: &mut dyn Write) -> Result<(), Failure> {
    let sets = ResonanceSets::new(xi, t).map_err(invalid)?;
    if points < 2 {
        return Err(invalid("--points must be at least 2"));
    }
    let e = extent.unwrap_or(2.0 * xi.abs());
    if !(e > 0.0 && e.is_finite()) {
        return Err(invalid("--extent must be positive"));
    }
    let mut s = header(&[("eta1", "wavenumber"), ("eta2", "wavenumber"), ("phi", "1"), ("set", "label")]) + "\n";
    let at = |i: usize| -e + 2.0 * e * i as f64 / (points - 1) as f64;
    for i in 0..points {
        for j in 0..points {
            let (a, b) = (at(i), at(j));
            let label = sets.membership(a, b).map_or("none", |m| m.label());
            let _ = writeln!(s, "{a:?},{b:?},{:?},{label}", phase_phi(xi, a, b));
        }
    }
    emit(out, stdout, &s)
}

struct PhaseObserver {
    phase: ScatteringPhase,
    rows: Vec<(f64, usize, f64, f64)>,
    error: Option<String>,
}

impl RunObserver for PhaseObserver {
    fn record(&mut self, state: &SimState, _record: &DiagnosticsRecord) {
        let phi_hat = state.solution();
        if let Err(e) = self.phase.update(&phi_hat, state.t) {
            self.error.get_or_insert(e.to_string());
            return;
        }
        let v = self.phase.corrected_profile(&phi_hat);
        for (m, &k) in self.phase.modes().iter().enumerate() {
            self.rows.push((state.t, m, state.profile.coeff(k).arg(), v.coeff(k).arg()));
        }
    }
}

/// Ratio of the phase increments of `v^` and `h^` over the last doubling window.
fn increment_ratio(series: &[(f64, f64, f64)]) -> Option<f64> {
    let t_last = series.last()?.0;
    let unwrap = |idx: fn(&(f64, f64, f64)) -> f64| {
        let mut acc = Vec::with_capacity(series.len());
        let mut prev = idx(&series[0]);
        let mut total = prev;
        for p in series {
            let mut d = idx(p) - prev;
            d -= std::f64::consts::TAU * (d / std::f64::consts::TAU).round();
            total += d;
            prev = idx(p);
            acc.push(total);
        }
        acc
    };
    let (h, v) = (unwrap(|p| p.1), unwrap(|p| p.2));
    let start = series.iter().position(|p| p.0 >= t_last / 2.0)?;
    let end = series.len() - 1;
    if start >= end {
        return None;
    }
    let dh = (h[end] - h[start]).abs();
    (dh > 0.0).then(|| (v[end] - v[start]).abs() / dh)
}

fn scatter_phase(config: &Path, modes: &[i64], out: &OutArg, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    let mut sim = load_simulation(config)?;
    let grid = *sim.state().profile.grid();
    let phase = ScatteringPhase::new(grid, modes.to_vec()).map_err(invalid)?;
    let mut obs = PhaseObserver { phase, rows: Vec::new(), error: None };
    let outcome = sim.run_with(&mut obs).map_err(evolution_failure)?;
    let mut s = header(&[("t", "time"), ("k", "count"), ("xi", "wavenumber"), ("arg_h", "rad"), ("arg_v", "rad")]) + "\n";
    for (t, m, ah, av) in &obs.rows {
        let k = modes[*m];
        let _ = writeln!(s, "{t:?},{k},{:?},{ah:?},{av:?}", grid.xi_at_k(k));
    }
    emit(out, stdout, &s)?;
    for (m, &k) in modes.iter().enumerate() {
        let series: Vec<_> = obs.rows.iter().filter(|r| r.1 == m).map(|r| (r.0, r.2, r.3)).collect();
        if let Some(r) = increment_ratio(&series) {
            let _ = writeln!(stderr, "mode {k}: late-window phase increment ratio |d arg v| / |d arg h| = {r:.6}");
        }
    }
    if let Some(e) = obs.error {
        return Err(numerical(e));
    }
    if let Some(a) = outcome.abort {
        return Err(numerical(format!("run aborted: {} (last good time {})", a.reason, a.last_good_time)));
    }
    Ok(())
}

fn dispatch(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate { config, out_dir } => simulate(&config, &out_dir, stderr),
        Command::DecayStudy(a) => decay_study(&a, stdout),
        Command::SymbolCheck { n, trials, tol, seed, out } => symbol_check(n, trials, tol, seed, &out, stdout),
        Command::Coeffs { n, out } => coeffs(n, &out, stdout),
        Command::OracleCheck { seed, fields, out } => oracle_check(seed, fields, &out, stdout),
        Command::EnergyReport { amplitude, width, n_points, length, order, snapshot, out } => {
            energy(amplitude, width, n_points, length, order, snapshot.as_deref(), &out, stdout)
        }
        Command::ResonanceMap { xi, t, points, extent, out } => resonance_map(xi, t, points, extent, &out, stdout),
        Command::ScatterPhase { config, modes, out } => scatter_phase(&config, &modes, &out, stdout, stderr),
    }
}

/// Parse `args` (including the program name), run, and return the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().ansi().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    1
                }
            };
        }
    };
    match dispatch(cli, stdout, stderr) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message());
            f.code()
        }
    }
}
