//! Run configuration files.
//!
//! A configuration is a list of `key = value` lines. `[section]` headers group
//! keys and `#` starts a comment. Keys may also be written bare at the top
//! level (`dt = 0.1`) or dotted anywhere (`time.dt = 0.1`). Every key is optional:
//!
//! | section       | key             | default      | meaning                                           |
//! |---------------|-----------------|--------------|---------------------------------------------------|
//! | `grid`        | `n_points` (`N`)| 2048         | number of grid points, even                       |
//! | `grid`        | `length` (`L`)  | 1024         | period of the domain, centred on 0                |
//! | `initial`     | `profile`       | `gaussian`   | `gaussian`, `gaussian_derivative`, `packet`, `snapshot` |
//! | `initial`     | `amplitude`     | 0.01         | amplitude `a`                                     |
//! | `initial`     | `width`         | 5            | envelope width `w`                                |
//! | `initial`     | `carrier`       | 1            | carrier wavenumber of `packet`                    |
//! | `initial`     | `center`        | 0            | centre of the profile                             |
//! | `initial`     | `path`          | (none)       | snapshot file relative to the config, implies `profile = snapshot` |
//! | `time`        | `dt`            | `auto`       | step; `auto` means `0.25 L / N`                   |
//! | `time`        | `t_end`         | 100          | final time                                        |
//! | `model`       | `n_max`         | 1            | highest retained degree `2 n_max + 1`             |
//! | `model`       | `linear`        | false        | drop the nonlinearity                             |
//! | `output`      | `output_stride` | 20           | steps between diagnostics rows                    |
//! | `output`      | `snapshot_stride`| 0           | steps between snapshots, 0 disables               |
//! | `diagnostics` | `energy`        | false        | weighted energy and paraproduct norm              |
//! | `diagnostics` | `vector_field`  | false        | norm of the scaling-Galilean field                |
//! | `diagnostics` | `sobolev_order` | 4            | order of the monitored Sobolev norm               |
//! | `diagnostics` | `z_order`       | 7            | order of the Z-norm and vector-field norm         |
//! | `diagnostics` | `energy_order`  | 1            | order of the weighted energy                      |
//! | `guard`       | `fraction`      | 0.1          | guard margin at each end, in (0, 0.5)             |
//! | `guard`       | `cutoff`        | 0.3          | high-pass frequency of the guarded field          |
//! | `run`         | `seed`          | 0            | seed of all random choices                        |
//! | `run`         | `perturbation`  | 0            | amplitude of a seeded random perturbation         |

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::evolution::{DiagnosticSet, EvolutionError, InitialCondition, SimConfig};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: expected `key = value` or `[section]`, found `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown section `[{name}]`")]
    UnknownSection { line: usize, name: String },
    #[error("line {line}: unknown key `{key}`; did you mean `{suggestion}`?")]
    UnknownKey { line: usize, key: String, suggestion: String },
    #[error("line {line}: key `{key}` given twice")]
    Duplicate { line: usize, key: String },
    #[error("key `{key}`: cannot parse `{value}` as {expected}")]
    Type { key: String, value: String, expected: &'static str },
    #[error(transparent)]
    Invalid(#[from] EvolutionError),
}

struct KeySpec {
    section: &'static str,
    name: &'static str,
    alias: Option<&'static str>,
}

const fn key(section: &'static str, name: &'static str) -> KeySpec {
    KeySpec { section, name, alias: None }
}

const KEYS: [KeySpec; 23] = [
    KeySpec { section: "grid", name: "n_points", alias: Some("N") },
    KeySpec { section: "grid", name: "length", alias: Some("L") },
    key("initial", "profile"),
    key("initial", "amplitude"),
    key("initial", "width"),
    key("initial", "carrier"),
    key("initial", "center"),
    key("initial", "path"),
    key("time", "dt"),
    key("time", "t_end"),
    key("model", "n_max"),
    key("model", "linear"),
    key("output", "output_stride"),
    key("output", "snapshot_stride"),
    key("diagnostics", "energy"),
    key("diagnostics", "vector_field"),
    key("diagnostics", "sobolev_order"),
    key("diagnostics", "z_order"),
    key("diagnostics", "energy_order"),
    key("guard", "fraction"),
    key("guard", "cutoff"),
    key("run", "seed"),
    key("run", "perturbation"),
];

fn is_section(name: &str) -> bool {
    KEYS.iter().any(|k| k.section == name)
}

fn lookup(section: Option<&str>, raw: &str) -> Option<&'static KeySpec> {
    let (section, raw) = match raw.split_once('.') {
        Some((s, k)) => (Some(s), k),
        None => (section, raw),
    };
    KEYS.iter().find(|k| {
        section.is_none_or(|s| s == k.section) && (k.name == raw || k.alias == Some(raw))
    })
}

fn suggest(raw: &str) -> String {
    let bare = raw.rsplit('.').next().unwrap_or(raw);
    KEYS.iter()
        .flat_map(|k| std::iter::once(k.name).chain(k.alias))
        .min_by_key(|cand| strsim::levenshtein(bare, cand))
        .unwrap_or("dt")
        .to_string()
}

/// Canonical `section.key` to raw value.
fn collect(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut section: Option<String> = None;
    let mut out = BTreeMap::new();
    for (i, raw_line) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim();
            if !is_section(name) {
                return Err(ConfigError::UnknownSection { line, name: name.to_string() });
            }
            section = Some(name.to_string());
            continue;
        }
        let Some((k, v)) = content.split_once('=') else {
            return Err(ConfigError::Syntax { line, text: content.to_string() });
        };
        let (k, v) = (k.trim(), v.trim());
        let spec = lookup(section.as_deref(), k).ok_or_else(|| ConfigError::UnknownKey {
            line,
            key: k.to_string(),
            suggestion: suggest(k),
        })?;
        let canonical = format!("{}.{}", spec.section, spec.name);
        if out.insert(canonical.clone(), v.to_string()).is_some() {
            return Err(ConfigError::Duplicate { line, key: canonical });
        }
    }
    Ok(out)
}

struct Values(BTreeMap<String, String>);

impl Values {
    fn get<T: FromStr>(&self, key: &str, expected: &'static str) -> Result<Option<T>, ConfigError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| ConfigError::Type {
                key: key.to_string(),
                value: v.clone(),
                expected,
            }),
        }
    }

    fn real(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.get(key, "a real number")?.unwrap_or(default))
    }

    fn count<T: FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError> {
        Ok(self.get(key, "a nonnegative integer")?.unwrap_or(default))
    }

    fn flag(&self, key: &str, default: bool) -> Result<bool, ConfigError> {
        Ok(self.get(key, "true or false")?.unwrap_or(default))
    }
}

/// Parse configuration text; the result is validated.
pub fn parse_config_str(text: &str) -> Result<SimConfig, ConfigError> {
    let v = Values(collect(text)?);
    let d = SimConfig::default();
    let (amplitude, width, center) = (
        v.real("initial.amplitude", 1e-2)?,
        v.real("initial.width", 5.0)?,
        v.real("initial.center", 0.0)?,
    );
    let path = v.0.get("initial.path").map(PathBuf::from);
    let profile = match v.0.get("initial.profile") {
        Some(p) => p.as_str(),
        None if path.is_some() => "snapshot",
        None => "gaussian",
    };
    let initial = match profile {
        "gaussian" => InitialCondition::Gaussian { amplitude, width, center },
        "gaussian_derivative" => InitialCondition::GaussianDerivative { amplitude, width, center },
        "packet" => InitialCondition::Packet { amplitude, width, carrier: v.real("initial.carrier", 1.0)?, center },
        "snapshot" => InitialCondition::Snapshot(path.ok_or_else(|| ConfigError::Type {
            key: "initial.path".into(),
            value: String::new(),
            expected: "a snapshot path (required by profile = snapshot)",
        })?),
        other => {
            return Err(ConfigError::Type {
                key: "initial.profile".into(),
                value: other.into(),
                expected: "gaussian, gaussian_derivative, packet or snapshot",
            })
        }
    };
    let dt = match v.0.get("time.dt").map(String::as_str) {
        None | Some("auto") => None,
        Some(_) => Some(v.real("time.dt", 0.0)?),
    };
    let config = SimConfig {
        n_points: v.count("grid.n_points", d.n_points)?,
        length: v.real("grid.length", d.length)?,
        initial,
        dt,
        t_end: v.real("time.t_end", d.t_end)?,
        n_max: v.count("model.n_max", d.n_max)?,
        output_stride: v.count("output.output_stride", d.output_stride)?,
        snapshot_stride: v.count("output.snapshot_stride", d.snapshot_stride)?,
        diagnostics: DiagnosticSet {
            energy: v.flag("diagnostics.energy", false)?,
            vector_field: v.flag("diagnostics.vector_field", false)?,
        },
        guard_fraction: v.real("guard.fraction", d.guard_fraction)?,
        guard_cutoff: v.real("guard.cutoff", d.guard_cutoff)?,
        linear: v.flag("model.linear", d.linear)?,
        sobolev_order: v.real("diagnostics.sobolev_order", d.sobolev_order)?,
        z_order: v.get("diagnostics.z_order", "a nonnegative integer")?.unwrap_or(d.z_order),
        energy_order: v.count("diagnostics.energy_order", d.energy_order)?,
        seed: v.count("run.seed", d.seed)?,
        perturbation: v.real("run.perturbation", d.perturbation)?,
    };
    config.validate()?;
    Ok(config)
}

pub fn parse_config(path: &Path) -> Result<SimConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    let mut config = parse_config_str(&text)?;
    if let InitialCondition::Snapshot(p) = &mut config.initial {
        if p.is_relative() {
            *p = path.parent().unwrap_or(Path::new("")).join(&*p);
        }
    }
    Ok(config)
}

/// Full configuration text with every key written out.
pub fn serialize_config(c: &SimConfig) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "[grid]\nn_points = {}\nlength = {:?}\n", c.n_points, c.length);
    s.push_str("[initial]\n");
    let _ = match &c.initial {
        InitialCondition::Gaussian { amplitude, width, center } => writeln!(
            s,
            "profile = gaussian\namplitude = {amplitude:?}\nwidth = {width:?}\ncenter = {center:?}"
        ),
        InitialCondition::GaussianDerivative { amplitude, width, center } => writeln!(
            s,
            "profile = gaussian_derivative\namplitude = {amplitude:?}\nwidth = {width:?}\ncenter = {center:?}"
        ),
        InitialCondition::Packet { amplitude, width, carrier, center } => writeln!(
            s,
            "profile = packet\namplitude = {amplitude:?}\nwidth = {width:?}\ncarrier = {carrier:?}\ncenter = {center:?}"
        ),
        InitialCondition::Snapshot(p) => writeln!(s, "profile = snapshot\npath = {}", p.display()),
    };
    let dt = c.dt.map_or_else(|| "auto".to_string(), |dt| format!("{dt:?}"));
    let _ = writeln!(s, "\n[time]\ndt = {dt}\nt_end = {:?}", c.t_end);
    let _ = writeln!(s, "\n[model]\nn_max = {}\nlinear = {}", c.n_max, c.linear);
    let _ = writeln!(s, "\n[output]\noutput_stride = {}\nsnapshot_stride = {}", c.output_stride, c.snapshot_stride);
    let _ = writeln!(
        s,
        "\n[diagnostics]\nenergy = {}\nvector_field = {}\nsobolev_order = {:?}\nz_order = {}\nenergy_order = {}",
        c.diagnostics.energy, c.diagnostics.vector_field, c.sobolev_order, c.z_order, c.energy_order
    );
    let _ = writeln!(s, "\n[guard]\nfraction = {:?}\ncutoff = {:?}", c.guard_fraction, c.guard_cutoff);
    let _ = writeln!(s, "\n[run]\nseed = {}\nperturbation = {:?}", c.seed, c.perturbation);
    s
}
