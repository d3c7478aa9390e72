//! Tabular results and their CSV / JSON / plot-script serializations.
//!
//! Every emitted file carries the complete effective configuration, so any
//! output can be fed back as `--config` or `--spec` to reproduce itself.
//! CSV embeds it as `#| `-prefixed lines above the column header; JSON as
//! the `config` member of the envelope.

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::config::{ConfigDocument, ConfigError, SCHEMA};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OutputError {
    #[error("plot script for preset `{requested}` requested for a result produced by {actual}")]
    PresetMismatch { requested: String, actual: String },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Num(f64),
    Text(String),
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

impl Column {
    pub fn new(name: impl Into<String>, unit: impl Into<String>) -> Self {
        Self { name: name.into(), unit: unit.into() }
    }

    /// Column whose unit is implied by its name suffix.
    pub fn axis(name: &str) -> Self {
        let unit = ["pF", "nH", "GHz", "MHz", "mK", "ns", "us"]
            .into_iter()
            .find(|u| name.ends_with(&format!("_{u}")))
            .unwrap_or("1");
        Self::new(name, unit)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub command: String,
    pub preset: Option<String>,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Field>>,
    pub aggregates: Vec<(String, f64)>,
    /// Error-row counts by reason code.
    pub diagnostics: Vec<(String, usize)>,
}

impl Table {
    pub fn new(command: &str, columns: Vec<Column>) -> Self {
        Self { command: command.into(), preset: None, columns, rows: Vec::new(), aggregates: Vec::new(), diagnostics: Vec::new() }
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Numeric column values; non-numeric fields become `None`.
    pub fn numbers(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let j = self.column_index(name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match r[j] {
                    Field::Num(v) => Some(v),
                    _ => None,
                })
                .collect(),
        )
    }
}

/// Number formatting: `precision = 0` is the shortest representation that
/// parses back to the same `f64`, otherwise that many significant digits.
pub fn format_number(x: f64, precision: usize) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else if precision == 0 {
        format!("{x:e}")
    } else {
        format!("{:.*e}", precision - 1, x)
    }
}

fn header_lines(table: &Table) -> Vec<String> {
    let mut out = vec![format!("schema = {SCHEMA}"), format!("command = {}", table.command)];
    if let Some(p) = &table.preset {
        out.push(format!("preset = {p}"));
    }
    let units: Vec<String> = table.columns.iter().map(|c| format!("{} [{}]", c.name, c.unit)).collect();
    out.push(format!("columns = {}", units.join(", ")));
    out.push("frequencies: *_GHz and *_MHz columns are ordinary frequencies, rad/s columns are angular".into());
    out
}

pub fn emit_csv(table: &Table, doc: &ConfigDocument, precision: usize) -> String {
    let mut out = String::new();
    for line in header_lines(table) {
        out.push_str(&format!("# {line}\n"));
    }
    for (name, v) in &table.aggregates {
        out.push_str(&format!("# aggregate {name} = {}\n", format_number(*v, precision)));
    }
    for (code, n) in &table.diagnostics {
        out.push_str(&format!("# errors {code} = {n}\n"));
    }
    for line in doc.render().lines() {
        if !line.is_empty() {
            out.push_str(&format!("#| {line}\n"));
        }
    }
    let names: Vec<&str> = table.columns.iter().map(|c| c.name.as_str()).collect();
    out.push_str(&names.join(","));
    out.push('\n');
    for row in &table.rows {
        let fields: Vec<String> = row
            .iter()
            .map(|f| match f {
                Field::Num(v) => format_number(*v, precision),
                Field::Text(s) => s.clone(),
                Field::Empty => String::new(),
            })
            .collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

fn json_number(x: f64, precision: usize) -> Value {
    if !x.is_finite() {
        return Value::String(format_number(x, precision));
    }
    let rounded = if precision == 0 { x } else { format_number(x, precision).parse().unwrap_or(x) };
    json!(rounded)
}

pub fn emit_json(table: &Table, doc: &ConfigDocument, precision: usize) -> String {
    let columns: Vec<Value> = table.columns.iter().map(|c| json!(c.name)).collect();
    let units: Vec<Value> = table.columns.iter().map(|c| json!(c.unit)).collect();
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|r| {
            Value::Array(
                r.iter()
                    .map(|f| match f {
                        Field::Num(v) => json_number(*v, precision),
                        Field::Text(s) => json!(s),
                        Field::Empty => Value::Null,
                    })
                    .collect(),
            )
        })
        .collect();
    let aggregates: Map<String, Value> =
        table.aggregates.iter().map(|(k, v)| (k.clone(), json_number(*v, precision))).collect();
    let diagnostics: Map<String, Value> = table.diagnostics.iter().map(|(k, n)| (k.clone(), json!(n))).collect();
    let envelope = json!({
        "schema": SCHEMA,
        "command": table.command,
        "preset": table.preset,
        "config": doc.to_json(),
        "grid": {
            "columns": columns,
            "units": units,
            "rows": rows,
            "aggregates": aggregates,
            "diagnostics": diagnostics,
        },
    });
    let mut s = serde_json::to_string_pretty(&envelope).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn emit(table: &Table, doc: &ConfigDocument, format: Format, precision: usize) -> String {
    match format {
        Format::Csv => emit_csv(table, doc, precision),
        Format::Json => emit_json(table, doc, precision),
    }
}

/// Reads a configuration from plain config text, an emitted CSV file or an
/// emitted JSON envelope.
pub fn read_config(text: &str) -> Result<ConfigDocument, ConfigError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let value: Value = serde_json::from_str(trimmed).map_err(|e| ConfigError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let config = value.get("config").ok_or_else(|| ConfigError::Parse {
            line: 0,
            column: 0,
            message: "JSON document has no `config` member".into(),
        })?;
        return ConfigDocument::from_json(config);
    }
    if trimmed.starts_with("# schema") {
        let embedded: String = text
            .lines()
            .filter_map(|l| l.strip_prefix("#| "))
            .flat_map(|l| [l, "\n"])
            .collect();
        return ConfigDocument::parse(&embedded);
    }
    ConfigDocument::parse(text)
}

const PLOT_PRELUDE: &str = r##"import csv
import json
import math
import os

import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))


def load(path):
    if path.endswith(".json"):
        with open(path) as f:
            grid = json.load(f)["grid"]
        cols, rows = grid["columns"], grid["rows"]
    else:
        with open(path) as f:
            lines = [line for line in f if not line.startswith("#")]
        reader = csv.reader(lines)
        cols = next(reader)
        rows = list(reader)

    def num(v):
        try:
            return float(v)
        except (TypeError, ValueError):
            return math.nan

    return {c: [r[i] if c == "status" else num(r[i]) for r in rows] for i, c in enumerate(cols)}


def groups(data, key):
    keys = sorted(set(data[key]))
    for k in keys:
        idx = [i for i, v in enumerate(data[key]) if v == k]
        yield k, {c: [vals[i] for i in idx] for c, vals in data.items()}


def heat(ax, data, xkey, ykey, zkey, title):
    xs = sorted(set(data[xkey]))
    ys = sorted(set(data[ykey]))
    z = [[math.nan] * len(xs) for _ in ys]
    xi = {v: i for i, v in enumerate(xs)}
    yi = {v: i for i, v in enumerate(ys)}
    for x, y, v in zip(data[xkey], data[ykey], data[zkey]):
        z[yi[y]][xi[x]] = v
    mesh = ax.pcolormesh(xs, ys, z, shading="auto")
    ax.figure.colorbar(mesh, ax=ax)
    ax.set_title(title)


US = 1e6
"##;

fn plot_body(preset: Option<&str>, table: &Table) -> Result<String, OutputError> {
    let body = match preset {
        Some("fig2a") => r#"fig, ax = plt.subplots()
ax.plot(d["omega_k_GHz"], d["n_q"], label="n_q")
ax.plot(d["omega_k_GHz"], d["n_k"], label="n_k")
ax.set_yscale("log")
ax.set_xlabel("omega_k / 2pi (GHz)")
ax.set_ylabel("photon number")
ax.legend()
"#
        .to_string(),
        Some("fig2b") | Some("fig5a") => {
            let key = if preset == Some("fig2b") { "c_j_pF" } else { "c_jk_pF" };
            format!(
                r#"fig, ax = plt.subplots()
for k, g in groups(d, "{key}"):
    ax.plot(g["omega_k_GHz"], g["n_q"], label="{key} = %g" % k)
ax.set_yscale("log")
ax.set_xlabel("omega_k / 2pi (GHz)")
ax.set_ylabel("n_q")
ax.legend()
"#
            )
        }
        Some("fig3a") | Some("fig3b") | Some("fig3b-text") => r#"fig, (a, b) = plt.subplots(1, 2, figsize=(10, 4))
heat(a, d, "detuning_GHz", "time_ns", "rho11", "rho11")
heat(b, d, "detuning_GHz", "time_ns", "rho22", "rho22")
for ax in (a, b):
    ax.set_xlabel("detuning / 2pi (GHz)")
    ax.set_ylabel("t (ns)")
"#
        .to_string(),
        Some("fig5b") => r#"pairs = list(groups(d, "c_jk_pF"))
fig, axes = plt.subplots(len(pairs), 2, figsize=(10, 4 * len(pairs)), squeeze=False)
for row, (k, g) in zip(axes, pairs):
    heat(row[0], g, "detuning_GHz", "time_ns", "rho11", "rho11, c_jk = %g pF" % k)
    heat(row[1], g, "detuning_GHz", "time_ns", "rho22", "rho22, c_jk = %g pF" % k)
    for ax in row:
        ax.set_xlabel("detuning / 2pi (GHz)")
        ax.set_ylabel("t (ns)")
"#
        .to_string(),
        Some("fig4a") => r#"t_purcell = [1.0 / g if g and g > 0 else math.nan for g in d["gamma_purcell"]]
fig, ax = plt.subplots()
ax.plot(d["omega_k_GHz"], [t * US for t in d["t_s"]], label="T_s")
ax.plot(d["omega_k_GHz"], [5 * t * US for t in d["t_phi"]], label="5 x T_phi")
ax.plot(d["omega_k_GHz"], [50 * t * US for t in t_purcell], label="50 x 1/gamma_purcell")
ax.set_yscale("log")
ax.set_xlabel("omega_k / 2pi (GHz)")
ax.set_ylabel("time (us)")
ax.legend()
"#
        .to_string(),
        Some("fig4b") => r#"fig, ax = plt.subplots()
for k, g in groups(d, "c_j_pF"):
    ax.plot(g["omega_k_GHz"], [t * US for t in g["t_s"]], label="C_j = %g pF" % k)
ax.set_yscale("log")
ax.set_xlabel("omega_k / 2pi (GHz)")
ax.set_ylabel("T_s (us)")
ax.legend()
"#
        .to_string(),
        Some("fig5c") | Some("fig5d") => {
            let (col, label) = if preset == Some("fig5c") { ("t_s", "T_s (us)") } else { ("t_phi", "T_phi (us)") };
            format!(
                r#"fig, ax = plt.subplots()
for k, g in groups(d, "c_jk_pF"):
    ax.plot(g["omega_k_GHz"], [t * US for t in g["{col}"]], label="C_jk = %g pF" % k)
ax.set_yscale("log")
ax.set_xlabel("omega_k / 2pi (GHz)")
ax.set_ylabel("{label}")
ax.legend()
"#
            )
        }
        Some("figB1") => r#"scales = list(groups(d, "coupling_scale"))
fig, axes = plt.subplots(len(scales), 2, figsize=(10, 4 * len(scales)), squeeze=False)
for row, (k, g) in zip(axes, scales):
    for ax, col in zip(row, ("n_q", "n_k")):
        g = dict(g)
        g[col] = [math.log10(v) if v and v > 0 else math.nan for v in g[col]]
        heat(ax, g, "omega_k_GHz", "omega_GHz", col, "log10 %s, coupling scale %g" % (col, k))
        ax.set_xlabel("omega_k / 2pi (GHz)")
        ax.set_ylabel("omega / 2pi (GHz)")
"#
        .to_string(),
        Some(other) => return Err(OutputError::UnknownPreset(other.to_string())),
        None => {
            let x = &table.columns[0].name;
            let ys: Vec<&str> = table
                .columns
                .iter()
                .skip(1)
                .filter(|c| c.name != "status" && c.unit != "pF" && c.unit != "GHz" && c.unit != "ns")
                .map(|c| c.name.as_str())
                .collect();
            let mut s = String::from("fig, ax = plt.subplots()\n");
            for y in ys {
                s.push_str(&format!("ax.plot(d[{x:?}], d[{y:?}], \".\", label={y:?})\n"));
            }
            s.push_str(&format!("ax.set_xlabel({:?})\nax.legend()\n", format!("{} ({})", x, table.columns[0].unit)));
            s
        }
    };
    Ok(body)
}

/// Standalone matplotlib script rendering `table` from `data_file`, a path
/// relative to the script. `preset_id` must match the preset the table was
/// produced by; `None` plots each column against the first one.
pub fn emit_plot_script(table: &Table, preset_id: Option<&str>, data_file: &str) -> Result<String, OutputError> {
    if preset_id.is_some() && table.preset.as_deref() != preset_id {
        return Err(OutputError::PresetMismatch {
            requested: preset_id.unwrap_or_default().to_string(),
            actual: table.preset.as_deref().map_or("a non-preset run".to_string(), |p| format!("preset `{p}`")),
        });
    }
    let body = plot_body(preset_id, table)?;
    let stem = data_file.rsplit_once('.').map_or(data_file, |(s, _)| s);
    Ok(format!(
        "{PLOT_PRELUDE}\nd = load(os.path.join(HERE, {data_file:?}))\n{body}fig.tight_layout()\nfig.savefig(os.path.join(HERE, {:?}))\n",
        format!("{stem}.png")
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> Table {
        let mut t = Table::new("rates", vec![Column::new("t_s", "s"), Column::new("t_phi", "s"), Column::new("status", "")]);
        t.rows.push(vec![Field::Num(0.1 + 0.2), Field::Num(f64::INFINITY), Field::Text("ok".into())]);
        t.rows.push(vec![Field::Empty, Field::Empty, Field::Text("purcell_resonance".into())]);
        t
    }

    #[test]
    fn csv_numbers_round_trip_bit_exactly() {
        let doc = ConfigDocument::new();
        let csv = emit_csv(&table(), &doc, 0);
        let data = csv.lines().find(|l| l.ends_with(",ok")).unwrap();
        let first: f64 = data.split(',').next().unwrap().parse().unwrap();
        assert_eq!(first.to_bits(), (0.1 + 0.2_f64).to_bits());
        assert!(data.contains(",inf,"));
        assert!(csv.contains("\n,,purcell_resonance\n"));
    }

    #[test]
    fn embedded_config_is_recovered() {
        let doc = ConfigDocument::parse("[circuit]\nc_j_pF = 0.07\n").unwrap();
        for format in [Format::Csv, Format::Json] {
            let text = emit(&table(), &doc, format, 0);
            assert_eq!(read_config(&text).unwrap().render(), doc.render());
        }
    }

    #[test]
    fn json_reemit_is_byte_identical() {
        let text = emit_json(&table(), &ConfigDocument::new(), 0);
        let value: Value = serde_json::from_str(&text).unwrap();
        let mut again = serde_json::to_string_pretty(&value).unwrap();
        again.push('\n');
        assert_eq!(again, text);
        assert!(text.contains("\"inf\""));
    }

    #[test]
    fn precision_limits_digits() {
        assert_eq!(format_number(1.23456, 3), "1.23e0");
        assert_eq!(format_number(1.5e-7, 0), "1.5e-7");
    }

    #[test]
    fn plot_script_checks_preset() {
        let mut t = table();
        t.preset = Some("fig2a".into());
        assert!(emit_plot_script(&t, Some("fig4a"), "x.csv").is_err());
        let s = emit_plot_script(&t, Some("fig2a"), "x.csv").unwrap();
        assert!(s.contains("\"x.csv\""));
        assert!(emit_plot_script(&t, None, "x.csv").is_ok());
    }
}
