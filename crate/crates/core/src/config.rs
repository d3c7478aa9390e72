//! Sectioned `key = value` configuration.
//!
//! ```text
//! # comment
//! [circuit]
//! c_j_pF = 0.03
//! omega_q_GHz = auto
//! ```
//!
//! Values are kept in configuration units (pF, nH, GHz, MHz, mK, ns, μs) and
//! converted to SI when domain objects are built. A document only stores the
//! keys that were given explicitly; defaults are filled in on read and when
//! the effective configuration is rendered. Rendering then re-parsing is the
//! identity.

use std::collections::BTreeMap;

use serde_json::{Map, Value};
use thiserror::Error;

use crate::circuit::{
    linear_bank, mode_frequency_with, resonant_capacitance, CircuitParams, FrequencyModel, ReservoirMode,
};
use crate::optimize::{Bound, Objective, OptimizeError, OptimizeSpec, Variable};
use crate::rates::{PurcellGuard, RatesConfig};
use crate::sweep::{Axis, Observable, Scenario, SweepError, SweepParam, SweepSpec, MAX_AXES};
use crate::units::{ghz_to_angular, ghz_to_joules, mhz_to_angular, MICRO, MILLI, NANO, PICO};

pub const SCHEMA: &str = "decoherence-lab/1";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unknown section [{section}] (line {line})")]
    UnknownSection { section: String, line: usize },
    #[error("unknown key `{key}` in [{section}] (line {line})")]
    UnknownKey { section: String, key: String, line: usize },
    #[error("{key}: {message}")]
    UnitRange { key: String, message: String },
    #[error(transparent)]
    Sweep(#[from] SweepError),
    #[error(transparent)]
    Optimize(#[from] OptimizeError),
}

#[derive(Debug, Clone, Copy)]
enum Kind {
    Positive,
    NonNegative,
    Finite,
    /// Integer ≥ 1.
    Count,
    /// Integer ≥ 0.
    Index,
    AutoPositive,
    AutoNonNegative,
    AutoFinite,
    AutoIndex,
    OffPositive,
    Choice(&'static [&'static str]),
    /// Significant digits, 0 for shortest round-trip.
    Precision,
    Name,
    NameList,
    FloatList,
}

struct KeySpec {
    key: &'static str,
    default: &'static str,
    kind: Kind,
}

const fn k(key: &'static str, default: &'static str, kind: Kind) -> KeySpec {
    KeySpec { key, default, kind }
}

struct SectionSpec {
    name: &'static str,
    /// Always part of the effective configuration.
    always: bool,
    keys: &'static [KeySpec],
}

const ON_OFF: &[&str] = &["on", "off"];

const SECTIONS: &[SectionSpec] = &[
    SectionSpec {
        name: "circuit",
        always: true,
        keys: &[
            k("c_j_pF", "0.03", Kind::Positive),
            k("e_j_GHz", "0.0", Kind::NonNegative),
            k("omega_q_GHz", "auto", Kind::AutoPositive),
            k("kappa_MHz", "1.0", Kind::NonNegative),
            k("temperature_mK", "10.0", Kind::NonNegative),
            k("coupling_scale", "0.1", Kind::Positive),
        ],
    },
    SectionSpec {
        name: "reservoir",
        always: true,
        keys: &[
            k("c_jk_pF", "0.05", Kind::NonNegative),
            k("l_k_nH", "5.0", Kind::Positive),
            k("c_k_min_pF", "0.18", Kind::Positive),
            k("c_k_max_pF", "2.02", Kind::Positive),
            k("n_modes", "64", Kind::Count),
            k("frequency_model", "bare", Kind::Choice(&["bare", "loaded"])),
        ],
    },
    SectionSpec {
        name: "rates",
        always: true,
        keys: &[
            k("mode_density", "1.0", Kind::Positive),
            k("calibration_t_s_us", "off", Kind::OffPositive),
            k("calibration_c_jk_pF", "0.05", Kind::Positive),
            k("calibration_c_k_pF", "auto", Kind::AutoPositive),
            k("purcell_floor_MHz", "1.0", Kind::NonNegative),
            k("purcell_dispersive_ratio", "10.0", Kind::NonNegative),
        ],
    },
    SectionSpec {
        name: "output",
        always: true,
        keys: &[
            k("format", "csv", Kind::Choice(&["csv", "json"])),
            k("precision", "0", Kind::Precision),
            k("plot_script", "off", Kind::Choice(ON_OFF)),
        ],
    },
    SectionSpec {
        name: "evolve",
        always: false,
        keys: &[
            k("probe_mode", "auto", Kind::AutoIndex),
            k("n_q", "auto", Kind::AutoNonNegative),
            k("detuning_min_GHz", "-1.0", Kind::Finite),
            k("detuning_max_GHz", "1.0", Kind::Finite),
            k("detuning_points", "201", Kind::Count),
            k("time_min_ns", "0.0", Kind::NonNegative),
            k("time_max_ns", "50.0", Kind::NonNegative),
            k("time_points", "101", Kind::Count),
        ],
    },
    SectionSpec {
        name: "sweep",
        always: false,
        keys: &[
            k("preset", "none", Kind::Name),
            k("probe_mode", "auto", Kind::AutoIndex),
            k("observables", "n_q", Kind::NameList),
            k("omega_GHz", "auto", Kind::AutoPositive),
            k("n_q", "auto", Kind::AutoNonNegative),
            k("detuning_GHz", "auto", Kind::AutoFinite),
            k("time_ns", "10.0", Kind::NonNegative),
            k("aggregate", "off", Kind::Choice(ON_OFF)),
        ],
    },
    SectionSpec {
        name: "optimize",
        always: false,
        keys: &[
            k("variables", "c_jk", Kind::NameList),
            k("c_j_min_pF", "0.01", Kind::Positive),
            k("c_j_max_pF", "0.3", Kind::Positive),
            k("c_jk_min_pF", "0.005", Kind::Positive),
            k("c_jk_max_pF", "0.1", Kind::Positive),
            k("objective", "max_t_s", Kind::Choice(&["max_t_s", "max_t_total"])),
            k("grid_points", "11", Kind::Count),
            k("refinement_iterations", "6", Kind::Index),
        ],
    },
];

const AXIS_FIELDS: [(&str, Kind); 5] = [
    ("param", Kind::Name),
    ("min", Kind::Finite),
    ("max", Kind::Finite),
    ("count", Kind::Count),
    ("values", Kind::FloatList),
];

fn section_index(name: &str) -> Option<usize> {
    SECTIONS.iter().position(|s| s.name == name)
}

/// Sort position of `key` within `section`, or `None` if unknown.
fn key_position(section: usize, key: &str) -> Option<(usize, Kind)> {
    let spec = &SECTIONS[section];
    if let Some(i) = spec.keys.iter().position(|k| k.key == key) {
        return Some((i, spec.keys[i].kind));
    }
    if spec.name == "sweep" {
        let rest = key.strip_prefix("axis")?;
        let (n, field) = rest.split_once('_')?;
        let n: usize = n.parse().ok()?;
        if !(1..=MAX_AXES).contains(&n) {
            return None;
        }
        let f = AXIS_FIELDS.iter().position(|(name, _)| *name == field)?;
        return Some((spec.keys.len() + (n - 1) * AXIS_FIELDS.len() + f, AXIS_FIELDS[f].1));
    }
    None
}

fn format_number(x: f64) -> String {
    format!("{x:?}")
}

/// Validates `raw` for `kind` and returns its canonical spelling. The error
/// is `(message, is_range_error)`.
fn canonical(kind: Kind, raw: &str) -> Result<String, (String, bool)> {
    let number = |s: &str| -> Result<f64, (String, bool)> {
        let v: f64 = s.parse().map_err(|_| (format!("expected a number, found `{s}`"), false))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err((format!("`{s}` is not finite"), true))
        }
    };
    let integer = |s: &str| -> Result<usize, (String, bool)> {
        s.parse().map_err(|_| (format!("expected a non-negative integer, found `{s}`"), false))
    };
    let positive = |v: f64| if v > 0.0 { Ok(format_number(v)) } else { Err((format!("must be > 0 (got {v})"), true)) };
    let non_negative =
        |v: f64| if v >= 0.0 { Ok(format_number(v)) } else { Err((format!("must be ≥ 0 (got {v})"), true)) };
    match kind {
        Kind::Positive => positive(number(raw)?),
        Kind::NonNegative => non_negative(number(raw)?),
        Kind::Finite => number(raw).map(format_number),
        Kind::Count => match integer(raw)? {
            0 => Err(("must be ≥ 1".to_string(), true)),
            n => Ok(n.to_string()),
        },
        Kind::Index => integer(raw).map(|n| n.to_string()),
        Kind::AutoPositive if raw == "auto" => Ok(raw.to_string()),
        Kind::AutoPositive => positive(number(raw)?),
        Kind::AutoNonNegative if raw == "auto" => Ok(raw.to_string()),
        Kind::AutoNonNegative => non_negative(number(raw)?),
        Kind::AutoFinite if raw == "auto" => Ok(raw.to_string()),
        Kind::AutoFinite => number(raw).map(format_number),
        Kind::AutoIndex if raw == "auto" => Ok(raw.to_string()),
        Kind::AutoIndex => integer(raw).map(|n| n.to_string()),
        Kind::OffPositive if raw == "off" => Ok(raw.to_string()),
        Kind::OffPositive => positive(number(raw)?),
        Kind::Choice(options) => {
            if options.contains(&raw) {
                Ok(raw.to_string())
            } else {
                Err((format!("expected one of {}, found `{raw}`", options.join("|")), false))
            }
        }
        Kind::Precision => match integer(raw)? {
            n @ 0..=17 => Ok(n.to_string()),
            n => Err((format!("must be between 0 and 17 (got {n})"), true)),
        },
        Kind::Name => {
            if !raw.is_empty() && raw.chars().all(|c| c.is_ascii_alphanumeric() || "_-".contains(c)) {
                Ok(raw.to_string())
            } else {
                Err((format!("invalid name `{raw}`"), false))
            }
        }
        Kind::NameList => {
            let items: Vec<&str> = raw.split(',').map(str::trim).collect();
            if items.iter().any(|s| s.is_empty() || s.contains(char::is_whitespace)) {
                return Err((format!("invalid list `{raw}`"), false));
            }
            Ok(items.join(", "))
        }
        Kind::FloatList => {
            let items = raw.split(',').map(|s| number(s.trim())).collect::<Result<Vec<_>, _>>()?;
            Ok(items.into_iter().map(format_number).collect::<Vec<_>>().join(", "))
        }
    }
}

/// Explicitly given configuration entries.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigDocument {
    /// Section index → (key position → (key, canonical value)).
    entries: BTreeMap<usize, BTreeMap<usize, (String, String)>>,
}

impl ConfigDocument {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut doc = Self::new();
        let mut section: Option<usize> = None;
        for (i, full_line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = full_line.split('#').next().unwrap_or("");
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let indent = line.len() - line.trim_start().len();
            if let Some(rest) = trimmed.strip_prefix('[') {
                let Some(name) = rest.strip_suffix(']') else {
                    return Err(ConfigError::Parse {
                        line: line_no,
                        column: indent + trimmed.chars().count() + 1,
                        message: "expected `]` to close the section header".into(),
                    });
                };
                let name = name.trim();
                let idx = section_index(name)
                    .ok_or_else(|| ConfigError::UnknownSection { section: name.to_string(), line: line_no })?;
                doc.entries.entry(idx).or_default();
                section = Some(idx);
                continue;
            }
            let Some(eq) = line.find('=') else {
                return Err(ConfigError::Parse {
                    line: line_no,
                    column: indent + 1,
                    message: "expected `key = value`".into(),
                });
            };
            let key = line[..eq].trim();
            let value = line[eq + 1..].trim();
            let value_column = eq + 2 + (line[eq + 1..].len() - line[eq + 1..].trim_start().len());
            if key.is_empty() {
                return Err(ConfigError::Parse { line: line_no, column: indent + 1, message: "missing key".into() });
            }
            if value.is_empty() {
                return Err(ConfigError::Parse { line: line_no, column: value_column, message: "missing value".into() });
            }
            let Some(sec) = section else {
                return Err(ConfigError::Parse {
                    line: line_no,
                    column: indent + 1,
                    message: "key outside of any [section]".into(),
                });
            };
            if doc.entries.get(&sec).is_some_and(|m| m.values().any(|(k, _)| k == key)) {
                return Err(ConfigError::Parse {
                    line: line_no,
                    column: indent + 1,
                    message: format!("duplicate key `{key}`"),
                });
            }
            doc.insert(sec, key, value, line_no, value_column)?;
        }
        Ok(doc)
    }

    fn insert(&mut self, sec: usize, key: &str, value: &str, line: usize, column: usize) -> Result<(), ConfigError> {
        let (pos, kind) = key_position(sec, key).ok_or_else(|| ConfigError::UnknownKey {
            section: SECTIONS[sec].name.to_string(),
            key: key.to_string(),
            line,
        })?;
        let value = canonical(kind, value).map_err(|(message, range)| {
            if range {
                ConfigError::UnitRange { key: key.to_string(), message }
            } else {
                ConfigError::Parse { line, column, message: format!("{key}: {message}") }
            }
        })?;
        self.entries.entry(sec).or_default().insert(pos, (key.to_string(), value));
        Ok(())
    }

    /// Sets one value; the section is created if needed.
    pub fn set(&mut self, section: &str, key: &str, value: &str) -> Result<(), ConfigError> {
        let sec = section_index(section)
            .ok_or_else(|| ConfigError::UnknownSection { section: section.to_string(), line: 0 })?;
        self.insert(sec, key, value, 0, 0)
    }

    /// Marks an optional section as part of the effective configuration.
    pub fn include_section(&mut self, section: &str) {
        if let Some(sec) = section_index(section) {
            self.entries.entry(sec).or_default();
        }
    }

    pub fn has_section(&self, section: &str) -> bool {
        section_index(section).is_some_and(|i| self.entries.contains_key(&i))
    }

    /// Explicit value, or the default for a known static key.
    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        let sec = section_index(section)?;
        let (pos, _) = key_position(sec, key)?;
        if let Some((_, v)) = self.entries.get(&sec).and_then(|m| m.get(&pos)) {
            return Some(v);
        }
        SECTIONS[sec].keys.get(pos).filter(|k| k.key == key).map(|k| k.default)
    }

    /// Numeric value; `None` for `auto`, `off` and absent keys.
    pub fn number(&self, section: &str, key: &str) -> Option<f64> {
        self.get(section, key).and_then(|v| v.parse().ok())
    }

    pub fn integer(&self, section: &str, key: &str) -> Option<usize> {
        self.get(section, key).and_then(|v| v.parse().ok())
    }

    fn list(&self, section: &str, key: &str) -> Vec<String> {
        self.get(section, key)
            .map(|v| v.split(',').map(|s| s.trim().to_string()).collect())
            .unwrap_or_default()
    }

    /// Entries of `other` replace those of `self`.
    pub fn merge(&mut self, other: &ConfigDocument) {
        for (sec, entries) in &other.entries {
            let target = self.entries.entry(*sec).or_default();
            for (pos, kv) in entries {
                target.insert(*pos, kv.clone());
            }
        }
    }

    /// Effective configuration with defaults filled in, in canonical order.
    pub fn resolved(&self) -> Vec<(&'static str, Vec<(String, String)>)> {
        SECTIONS
            .iter()
            .enumerate()
            .filter(|(i, s)| s.always || self.entries.contains_key(i))
            .map(|(i, s)| {
                let explicit = self.entries.get(&i);
                let mut out: Vec<(String, String)> = s
                    .keys
                    .iter()
                    .enumerate()
                    .map(|(pos, spec)| {
                        let v = explicit.and_then(|m| m.get(&pos)).map_or(spec.default, |(_, v)| v.as_str());
                        (spec.key.to_string(), v.to_string())
                    })
                    .collect();
                if let Some(m) = explicit {
                    out.extend(m.range(s.keys.len()..).map(|(_, kv)| kv.clone()));
                }
                (s.name, out)
            })
            .collect()
    }

    /// The effective configuration as text; parses back to an equal
    /// effective configuration.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, (name, entries)) in self.resolved().into_iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&format!("[{name}]\n"));
            for (key, value) in entries {
                out.push_str(&format!("{key} = {value}\n"));
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let mut root = Map::new();
        for (name, entries) in self.resolved() {
            let section: Map<String, Value> = entries.into_iter().map(|(k, v)| (k, Value::String(v))).collect();
            root.insert(name.to_string(), Value::Object(section));
        }
        Value::Object(root)
    }

    pub fn from_json(value: &Value) -> Result<Self, ConfigError> {
        let bad = |message: &str| ConfigError::Parse { line: 0, column: 0, message: message.to_string() };
        let root = value.as_object().ok_or_else(|| bad("config must be an object"))?;
        let mut doc = Self::new();
        for (section, entries) in root {
            let entries = entries.as_object().ok_or_else(|| bad("config sections must be objects"))?;
            let sec = section_index(section)
                .ok_or_else(|| ConfigError::UnknownSection { section: section.clone(), line: 0 })?;
            doc.entries.entry(sec).or_default();
            for (key, v) in entries {
                let v = v.as_str().ok_or_else(|| bad("config values must be strings"))?;
                doc.insert(sec, key, v, 0, 0)?;
            }
        }
        Ok(doc)
    }
}

fn range_error(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::UnitRange { key: key.to_string(), message: message.into() }
}

fn req(doc: &ConfigDocument, section: &str, key: &str) -> f64 {
    doc.number(section, key).unwrap_or_else(|| panic!("{section}.{key} has a numeric default"))
}

pub fn frequency_model(doc: &ConfigDocument) -> FrequencyModel {
    match doc.get("reservoir", "frequency_model") {
        Some("loaded") => FrequencyModel::Loaded,
        _ => FrequencyModel::Bare,
    }
}

/// `ω_q` used when `omega_q_GHz = auto`: the resonance of a mode at the
/// midpoint of the `C_k` range (rad/s).
pub fn auto_omega_q(doc: &ConfigDocument) -> f64 {
    let mid = ReservoirMode {
        c_jk: req(doc, "reservoir", "c_jk_pF") * PICO,
        c_k: (req(doc, "reservoir", "c_k_min_pF") + req(doc, "reservoir", "c_k_max_pF")) / 2.0 * PICO,
        l_k: req(doc, "reservoir", "l_k_nH") * NANO,
    };
    mode_frequency_with(&mid, frequency_model(doc))
}

pub fn circuit_params(doc: &ConfigDocument) -> Result<CircuitParams<f64>, ConfigError> {
    let c_k_min = req(doc, "reservoir", "c_k_min_pF");
    let c_k_max = req(doc, "reservoir", "c_k_max_pF");
    if c_k_min > c_k_max {
        return Err(range_error("c_k_min_pF", "must not exceed c_k_max_pF"));
    }
    let n = doc.integer("reservoir", "n_modes").unwrap_or(1);
    let modes = linear_bank(
        req(doc, "reservoir", "c_jk_pF") * PICO,
        req(doc, "reservoir", "l_k_nH") * NANO,
        c_k_min * PICO,
        c_k_max * PICO,
        n,
    );
    let omega_q = doc.number("circuit", "omega_q_GHz").map_or_else(|| auto_omega_q(doc), ghz_to_angular);
    let params = CircuitParams {
        c_j: req(doc, "circuit", "c_j_pF") * PICO,
        e_j: ghz_to_joules(req(doc, "circuit", "e_j_GHz")),
        omega_q,
        modes,
        kappa: mhz_to_angular(req(doc, "circuit", "kappa_MHz")),
        temperature: req(doc, "circuit", "temperature_mK") * MILLI,
        coupling_scale: req(doc, "circuit", "coupling_scale"),
        frequency_model: frequency_model(doc),
    };
    params.validate().map_err(|e| range_error("circuit", e.to_string()))?;
    Ok(params)
}

/// Single-mode circuit the calibration is pinned to.
pub fn calibration_reference(doc: &ConfigDocument, circuit: &CircuitParams<f64>) -> Result<CircuitParams<f64>, ConfigError> {
    let c_jk = req(doc, "rates", "calibration_c_jk_pF") * PICO;
    let l_k = req(doc, "reservoir", "l_k_nH") * NANO;
    let c_k = match doc.number("rates", "calibration_c_k_pF") {
        Some(v) => v * PICO,
        None => resonant_capacitance(l_k, c_jk, circuit.omega_q, circuit.frequency_model),
    };
    if !(c_k > 0.0) {
        return Err(range_error("calibration_c_k_pF", "no positive C_k is resonant with omega_q"));
    }
    Ok(CircuitParams { modes: vec![ReservoirMode { c_jk, c_k, l_k }], ..circuit.clone() })
}

pub fn rates_config(doc: &ConfigDocument, circuit: &CircuitParams<f64>) -> Result<RatesConfig<f64>, ConfigError> {
    let cfg = RatesConfig {
        mode_density: req(doc, "rates", "mode_density"),
        calibration: None,
        purcell: PurcellGuard {
            floor: mhz_to_angular(req(doc, "rates", "purcell_floor_MHz")),
            dispersive_ratio: req(doc, "rates", "purcell_dispersive_ratio"),
        },
    };
    match doc.number("rates", "calibration_t_s_us") {
        None => Ok(cfg),
        Some(t) => {
            let reference = calibration_reference(doc, circuit)?;
            cfg.calibrate(&reference, t * MICRO)
                .map_err(|e| range_error("calibration_t_s_us", e.to_string()))
        }
    }
}

/// Base evaluation context without sweep-specific overrides.
pub fn scenario(doc: &ConfigDocument) -> Result<Scenario, ConfigError> {
    let circuit = circuit_params(doc)?;
    let rates = rates_config(doc, &circuit)?;
    Ok(Scenario::new(circuit, rates))
}

fn probe_mode(doc: &ConfigDocument, section: &str, s: &Scenario) -> Result<Option<usize>, ConfigError> {
    match doc.integer(section, "probe_mode") {
        None => Ok(None),
        Some(i) if i < s.circuit.modes.len() => Ok(Some(i)),
        Some(i) => Err(range_error("probe_mode", format!("index {i} out of range for {} modes", s.circuit.modes.len()))),
    }
}

pub fn sweep_spec(doc: &ConfigDocument) -> Result<SweepSpec, ConfigError> {
    let mut base = scenario(doc)?;
    base.probe_mode = probe_mode(doc, "sweep", &base)?;
    base.omega = doc.number("sweep", "omega_GHz").map(ghz_to_angular);
    base.n_q = doc.number("sweep", "n_q");
    base.detuning = doc.number("sweep", "detuning_GHz").map(ghz_to_angular);
    base.time = req(doc, "sweep", "time_ns") * NANO;

    let mut axes = Vec::new();
    for n in 1..=MAX_AXES {
        let key = |f: &str| format!("axis{n}_{f}");
        let Some(param) = doc.get("sweep", &key("param")) else {
            let stray = AXIS_FIELDS.iter().find(|(f, _)| doc.get("sweep", &key(f)).is_some());
            if let Some((f, _)) = stray {
                return Err(SweepError::InvalidAxis(format!("{} given without {}", key(f), key("param"))).into());
            }
            continue;
        };
        let param: SweepParam = param.parse()?;
        let axis = if let Some(values) = doc.get("sweep", &key("values")) {
            let v = values.split(',').map(|s| s.trim().parse().unwrap()).collect();
            Axis::values(param, v)
        } else {
            let (min, max, count) = (
                doc.number("sweep", &key("min")),
                doc.number("sweep", &key("max")),
                doc.integer("sweep", &key("count")),
            );
            match (min, max, count) {
                (Some(min), Some(max), Some(count)) => Axis::linear(param, min, max, count),
                _ => {
                    return Err(SweepError::InvalidAxis(format!(
                        "{} needs {} or all of {}, {}, {}",
                        key("param"),
                        key("values"),
                        key("min"),
                        key("max"),
                        key("count")
                    ))
                    .into())
                }
            }
        };
        axes.push(axis);
    }
    let observables = doc
        .list("sweep", "observables")
        .iter()
        .map(|s| s.parse::<Observable>())
        .collect::<Result<Vec<_>, _>>()?;
    let preset = doc.get("sweep", "preset").filter(|p| *p != "none").map(str::to_string);
    let spec = SweepSpec { base, axes, observables, aggregate: doc.get("sweep", "aggregate") == Some("on"), preset };
    spec.validate()?;
    Ok(spec)
}

pub fn optimize_spec(doc: &ConfigDocument) -> Result<OptimizeSpec, ConfigError> {
    let base = scenario(doc)?;
    let mut variables = Vec::new();
    for name in doc.list("optimize", "variables") {
        let variable: Variable = name.parse()?;
        if variables.iter().any(|b: &Bound| b.variable == variable) {
            return Err(range_error("variables", format!("{name} listed twice")));
        }
        let min = req(doc, "optimize", &format!("{name}_min_pF"));
        let max = req(doc, "optimize", &format!("{name}_max_pF"));
        if min >= max {
            return Err(range_error(&format!("{name}_min_pF"), format!("must be below {name}_max_pF")));
        }
        variables.push(Bound { variable, min, max });
    }
    let objective: Objective = doc.get("optimize", "objective").unwrap_or("max_t_s").parse()?;
    let grid_points = doc.integer("optimize", "grid_points").unwrap_or(11);
    if grid_points < 2 {
        return Err(range_error("grid_points", "must be at least 2"));
    }
    Ok(OptimizeSpec {
        base,
        variables,
        objective,
        grid_points,
        refinement_iterations: doc.integer("optimize", "refinement_iterations").unwrap_or(0),
    })
}

/// Density-matrix grid request.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolveSpec {
    pub base: Scenario,
    /// Detuning range (rad/s).
    pub detuning: (f64, f64),
    /// Time range (s).
    pub time: (f64, f64),
    pub resolution: (usize, usize),
}

pub fn evolve_spec(doc: &ConfigDocument) -> Result<EvolveSpec, ConfigError> {
    let mut base = scenario(doc)?;
    base.probe_mode = probe_mode(doc, "evolve", &base)?;
    base.n_q = doc.number("evolve", "n_q");
    let detuning = (
        ghz_to_angular(req(doc, "evolve", "detuning_min_GHz")),
        ghz_to_angular(req(doc, "evolve", "detuning_max_GHz")),
    );
    let time = (req(doc, "evolve", "time_min_ns") * NANO, req(doc, "evolve", "time_max_ns") * NANO);
    let resolution = (
        doc.integer("evolve", "detuning_points").unwrap_or(2),
        doc.integer("evolve", "time_points").unwrap_or(2),
    );
    if detuning.0 >= detuning.1 || resolution.0 < 2 {
        return Err(range_error("detuning_min_GHz", "detuning range needs min < max and at least 2 points"));
    }
    if time.0 >= time.1 || resolution.1 < 2 {
        return Err(range_error("time_min_ns", "time range needs min < max and at least 2 points"));
    }
    Ok(EvolveSpec { base, detuning, time, resolution })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_caption_defaults() {
        let doc = ConfigDocument::parse("").unwrap();
        let c = circuit_params(&doc).unwrap();
        assert!((c.c_j - 0.03e-12).abs() < 1e-27);
        assert_eq!(c.modes.len(), 64);
        assert!((c.modes[0].c_jk - 0.05e-12).abs() < 1e-27);
        assert!((c.modes[0].l_k - 5e-9).abs() < 1e-24);
        assert!((c.modes[0].c_k - 0.18e-12).abs() < 1e-27);
        assert!((c.modes[63].c_k - 2.02e-12).abs() < 1e-27);
        assert!((c.temperature - 0.01).abs() < 1e-18);
        assert_eq!(c.coupling_scale, 0.1);
    }

    #[test]
    fn negative_capacitance_names_the_key() {
        let err = ConfigDocument::parse("[circuit]\nc_j_pF = -1\n").unwrap_err();
        assert!(matches!(err, ConfigError::UnitRange { ref key, .. } if key == "c_j_pF"), "{err:?}");
    }

    #[test]
    fn typo_is_an_unknown_key() {
        let err = ConfigDocument::parse("[circuit]\nc_jpF = 0.03\n").unwrap_err();
        assert_eq!(err, ConfigError::UnknownKey { section: "circuit".into(), key: "c_jpF".into(), line: 2 });
    }

    #[test]
    fn parse_errors_carry_line_and_column() {
        let err = ConfigDocument::parse("[circuit]\n  c_j_pF 0.03\n").unwrap_err();
        assert_eq!(err, ConfigError::Parse { line: 2, column: 3, message: "expected `key = value`".into() });
        let err = ConfigDocument::parse("[circuit]\nc_j_pF = abc\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 2, column: 10, .. }), "{err:?}");
        assert!(matches!(ConfigDocument::parse("[bogus]"), Err(ConfigError::UnknownSection { .. })));
        assert!(matches!(ConfigDocument::parse("c_j_pF = 1"), Err(ConfigError::Parse { line: 1, .. })));
        assert!(matches!(ConfigDocument::parse("[circuit\n"), Err(ConfigError::Parse { line: 1, .. })));
        let dup = ConfigDocument::parse("[circuit]\nc_j_pF = 1\nc_j_pF = 2\n").unwrap_err();
        assert!(matches!(dup, ConfigError::Parse { line: 3, .. }));
    }

    #[test]
    fn zero_inductance_and_negative_temperature_are_range_errors() {
        assert!(matches!(
            ConfigDocument::parse("[reservoir]\nl_k_nH = 0\n"),
            Err(ConfigError::UnitRange { .. })
        ));
        assert!(matches!(
            ConfigDocument::parse("[circuit]\ntemperature_mK = -3 # cold\n"),
            Err(ConfigError::UnitRange { .. })
        ));
    }

    #[test]
    fn render_then_parse_is_identity() {
        let text = "[circuit]\nc_j_pF = 0.060 # doubled\n[sweep]\naxis1_param = c_k_pF\naxis1_values = 0.2, 1\n";
        let doc = ConfigDocument::parse(text).unwrap();
        let rendered = doc.render();
        let again = ConfigDocument::parse(&rendered).unwrap();
        assert_eq!(again.render(), rendered);
        assert!(rendered.contains("c_j_pF = 0.06\n"));
        assert!(rendered.contains("axis1_values = 0.2, 1.0\n"));
        let defaults = ConfigDocument::parse("").unwrap().render();
        assert_eq!(ConfigDocument::parse(&defaults).unwrap().render(), defaults);
    }

    #[test]
    fn json_round_trip() {
        let doc = ConfigDocument::parse("[optimize]\nvariables = c_j, c_jk\n").unwrap();
        let back = ConfigDocument::from_json(&doc.to_json()).unwrap();
        assert_eq!(back.render(), doc.render());
    }

    #[test]
    fn merge_prefers_later_entries() {
        let mut a = ConfigDocument::parse("[circuit]\nc_j_pF = 0.1\nkappa_MHz = 3\n").unwrap();
        a.merge(&ConfigDocument::parse("[circuit]\nc_j_pF = 0.2\n").unwrap());
        assert_eq!(a.get("circuit", "c_j_pF"), Some("0.2"));
        assert_eq!(a.get("circuit", "kappa_MHz"), Some("3.0"));
    }

    #[test]
    fn auto_omega_q_sits_at_range_midpoint() {
        let doc = ConfigDocument::parse("[reservoir]\nn_modes = 1\n").unwrap();
        let c = circuit_params(&doc).unwrap();
        assert!((c.omega_q / c.mode_frequency(0) - 1.0).abs() < 4.0 * f64::EPSILON);
        assert!((crate::units::angular_to_ghz(c.omega_q) - 2.1459).abs() < 1e-3);
    }

    #[test]
    fn calibration_pins_reference_time() {
        let doc = ConfigDocument::parse("[reservoir]\nn_modes = 1\n[rates]\ncalibration_t_s_us = 0.7\n").unwrap();
        let c = circuit_params(&doc).unwrap();
        let cfg = rates_config(&doc, &c).unwrap();
        let r = crate::rates::rates(&c, &cfg);
        assert!((1.0 / r.gamma_1 / 0.7e-6 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sweep_axes_from_keys() {
        let doc = ConfigDocument::parse(
            "[sweep]\naxis1_param = c_j_pF\naxis1_values = 0.03, 0.06\naxis2_param = c_k_pF\naxis2_min = 0.18\naxis2_max = 2.02\naxis2_count = 5\nobservables = n_q, t_phi\n",
        )
        .unwrap();
        let spec = sweep_spec(&doc).unwrap();
        assert_eq!(spec.shape(), vec![2, 5]);
        assert_eq!(spec.observables, vec![Observable::NQ, Observable::TPhi]);
        let missing = ConfigDocument::parse("[sweep]\naxis1_param = c_j_pF\naxis1_min = 0.1\n").unwrap();
        assert!(matches!(sweep_spec(&missing), Err(ConfigError::Sweep(SweepError::InvalidAxis(_)))));
        let bad = ConfigDocument::parse("[sweep]\naxis4_param = c_j_pF\n").unwrap_err();
        assert!(matches!(bad, ConfigError::UnknownKey { .. }));
    }

    #[test]
    fn optimize_defaults() {
        let spec = optimize_spec(&ConfigDocument::parse("[optimize]\n").unwrap()).unwrap();
        assert_eq!(spec.variables.len(), 1);
        assert_eq!(spec.variables[0].variable, Variable::CJk);
        assert_eq!(spec.objective, Objective::MaxTs);
        let err = optimize_spec(&ConfigDocument::parse("[optimize]\nvariables = c_k\n").unwrap()).unwrap_err();
        assert!(matches!(err, ConfigError::Optimize(OptimizeError::Unknown { .. })));
    }
}
