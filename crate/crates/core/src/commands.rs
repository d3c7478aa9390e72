//! Command implementations shared by the CLI and the tests: each turns an
//! effective configuration into a [`Table`].

use thiserror::Error;

use crate::config::{evolve_spec, optimize_spec, scenario, sweep_spec, ConfigDocument, ConfigError};
use crate::dynamics::distribution_grid;
use crate::langevin::{photon_numbers, photon_numbers_closed_form};
use crate::optimize::{optimize, OptimizeError};
use crate::output::{Column, Field, Table};
use crate::rates::rates;
use crate::sweep::{run_sweep, SweepResult};
use crate::units::{angular_to_ghz, NANO};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical domain error: {0}")]
    Numerical(String),
}

impl From<crate::sweep::SweepError> for CommandError {
    fn from(e: crate::sweep::SweepError) -> Self {
        CommandError::Config(e.into())
    }
}

fn status(result: Result<(), &'static str>) -> Field {
    Field::Text(result.err().unwrap_or("ok").to_string())
}

/// One-row rate budget.
pub fn rates_table(doc: &ConfigDocument) -> Result<Table, CommandError> {
    let s = scenario(doc)?;
    let r = rates(&s.circuit, &s.rates);
    let mut t = Table::new(
        "rates",
        vec![
            Column::new("gamma_1", "1/s"),
            Column::new("gamma_purcell", "1/s"),
            Column::new("gamma_phi", "1/s"),
            Column::new("t_s", "s"),
            Column::new("t_phi", "s"),
            Column::new("shifted_omega_q", "rad/s"),
        ],
    );
    t.rows.push(
        [r.gamma_1, r.gamma_purcell, r.gamma_phi, r.t_s.value(), r.t_phi.value(), r.shifted_omega_q]
            .into_iter()
            .map(Field::Num)
            .collect(),
    );
    t.aggregates = vec![
        ("gamma_c".into(), r.gamma_c),
        ("gamma_c_purcell".into(), r.gamma_c_purcell),
        ("purcell_excluded".into(), r.purcell_excluded as f64),
        ("n_modes".into(), s.circuit.modes.len() as f64),
    ];
    Ok(t)
}

/// Photon numbers at `ω = ω_q`, one row per reservoir mode.
pub fn photons_table(doc: &ConfigDocument) -> Result<Table, CommandError> {
    let mut s = scenario(doc)?;
    let mut t = Table::new(
        "photons",
        vec![
            Column::new("mode", "1"),
            Column::new("omega_k_GHz", "GHz"),
            Column::new("g_k", "rad/s"),
            Column::new("n_q", "1"),
            Column::new("n_k", "1"),
            Column::new("n_in", "1"),
            Column::new("determinant", "1"),
            Column::new("n_q_closed_form", "1"),
            Column::new("status", ""),
        ],
    );
    let mut errors = std::collections::BTreeMap::new();
    for i in 0..s.circuit.modes.len() {
        s.probe_mode = Some(i);
        let lp = s.langevin_point().map_err(|e| CommandError::Config(ConfigError::UnitRange {
            key: "reservoir".into(),
            message: e.to_string(),
        }))?;
        let mut row = vec![Field::Num(i as f64), Field::Num(angular_to_ghz(lp.omega_k)), Field::Num(lp.g_k)];
        match photon_numbers(&lp) {
            Ok(n) => {
                let closed = photon_numbers_closed_form(&lp).map_or(Field::Empty, Field::Num);
                row.extend([Field::Num(n.n_q), Field::Num(n.n_k), Field::Num(n.n_in), Field::Num(n.determinant), closed]);
                row.push(status(Ok(())));
            }
            Err(e) => {
                row.extend(std::iter::repeat(Field::Empty).take(5));
                row.push(status(Err(e.code())));
                *errors.entry(e.code().to_string()).or_insert(0) += 1;
            }
        }
        t.rows.push(row);
    }
    t.diagnostics = errors.into_iter().collect();
    Ok(t)
}

/// Density-matrix elements over the detuning × time grid.
pub fn evolve_table(doc: &ConfigDocument) -> Result<Table, CommandError> {
    let spec = evolve_spec(doc)?;
    let s = &spec.base;
    let probe = s.probe().map_err(|e| CommandError::Numerical(e.to_string()))?;
    let n_q = match s.n_q {
        Some(n) => n,
        None => {
            let lp = s.langevin_point().map_err(|e| CommandError::Numerical(e.to_string()))?;
            photon_numbers(&lp).map_err(|e| CommandError::Numerical(e.to_string()))?.n_q
        }
    };
    let grid = distribution_grid(&s.circuit, probe, n_q, spec.detuning, spec.time, spec.resolution)
        .map_err(|e| CommandError::Numerical(e.to_string()))?;
    let mut t = Table::new(
        "evolve",
        vec![
            Column::new("detuning_GHz", "GHz"),
            Column::new("time_ns", "ns"),
            Column::new("rho11", "1"),
            Column::new("rho12_im", "1"),
            Column::new("rho22", "1"),
        ],
    );
    for (i, &d) in grid.detunings.iter().enumerate() {
        for (j, &time) in grid.times.iter().enumerate() {
            let c = grid.at(i, j);
            t.rows.push(vec![
                Field::Num(angular_to_ghz(d)),
                Field::Num(time / NANO),
                Field::Num(c.rho11),
                Field::Num(c.rho12.im),
                Field::Num(c.rho22),
            ]);
        }
    }
    let lp = s.langevin_point().map_err(|e| CommandError::Numerical(e.to_string()))?;
    t.aggregates = vec![("n_q".into(), n_q), ("g_k".into(), lp.g_k), ("probe_mode".into(), probe as f64)];
    Ok(t)
}

pub fn sweep_result_table(r: &SweepResult) -> Table {
    let mut columns: Vec<Column> = r.axis_columns().into_iter().map(Column::axis).collect();
    columns.extend(r.spec.observables.iter().map(|o| Column::new(o.name(), o.unit())));
    columns.push(Column::new("status", ""));
    let mut t = Table::new("sweep", columns);
    t.preset = r.spec.preset.clone();
    let n_obs = r.spec.observables.len();
    for cell in &r.cells {
        let mut row: Vec<Field> = cell.coords.iter().map(|&v| Field::Num(v)).collect();
        match &cell.outcome {
            Ok(values) => {
                row.extend(values.iter().map(|&v| Field::Num(v)));
                row.push(status(Ok(())));
            }
            Err(e) => {
                row.extend(std::iter::repeat(Field::Empty).take(n_obs));
                row.push(status(Err(e.code())));
            }
        }
        t.rows.push(row);
    }
    t.aggregates = r.aggregates.clone();
    t.diagnostics = r.diagnostics.iter().map(|(k, n)| (k.to_string(), *n)).collect();
    t
}

pub fn sweep_table(doc: &ConfigDocument) -> Result<Table, CommandError> {
    let spec = sweep_spec(doc)?;
    let result = run_sweep(&spec)?;
    Ok(sweep_result_table(&result))
}

/// Search trace, one row per evaluation, with the optimum as aggregates.
pub fn optimize_table(doc: &ConfigDocument) -> Result<Table, CommandError> {
    let spec = optimize_spec(doc)?;
    let m = optimize(&spec).map_err(|e| match e {
        OptimizeError::AllPointsInvalid => CommandError::Numerical(e.to_string()),
        other => CommandError::Config(other.into()),
    })?;
    let mut columns = vec![Column::new("round", "1")];
    columns.extend(spec.variables.iter().map(|b| Column::axis(b.variable.column())));
    columns.push(Column::new(spec.objective.name(), "s"));
    columns.push(Column::new("status", ""));
    let mut t = Table::new("optimize", columns);
    let mut errors = std::collections::BTreeMap::new();
    for e in &m.trace {
        let mut row = vec![Field::Num(e.round as f64)];
        row.extend(e.x.iter().map(|&v| Field::Num(v)));
        match &e.value {
            Ok(v) => {
                row.push(Field::Num(*v));
                row.push(status(Ok(())));
            }
            Err(err) => {
                row.push(Field::Empty);
                row.push(status(Err(err.code())));
                *errors.entry(err.code().to_string()).or_insert(0) += 1;
            }
        }
        t.rows.push(row);
    }
    for (b, v) in spec.variables.iter().zip(&m.argmax) {
        t.aggregates.push((format!("best_{}", b.variable.column()), *v));
    }
    t.aggregates.push((format!("best_{}", spec.objective.name()), m.value));
    t.diagnostics = errors.into_iter().collect();
    Ok(t)
}

impl Table {
    /// True when the table has a status column and no row succeeded.
    pub fn all_rows_failed(&self) -> bool {
        match self.column_index("status") {
            Some(j) => self.rows.iter().all(|r| !matches!(&r[j], Field::Text(s) if s == "ok")),
            None => false,
        }
    }
}
