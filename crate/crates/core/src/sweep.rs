//! Grid evaluation over circuit parameters, frequency and time axes.
//!
//! A [`Scenario`] is one fully specified evaluation context. A sweep applies
//! up to three axes to a base scenario and evaluates a list of observables at
//! every grid cell. Cells are independent and evaluated in parallel; the
//! result is always assembled in row-major order with the first axis
//! outermost.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::circuit::{coupling_rate, effective_capacitances, thermal_occupation, CircuitError, CircuitParams};
use crate::dynamics::{delta_alpha_sq, density_elements, DynamicsPoint};
use crate::langevin::{photon_numbers, LangevinError, LangevinPoint, PhotonNumbers};
use crate::rates::{mode_rates, rates, total_decoherence, RatesConfig, RatesError, RatesResult};
use crate::scalar::linspace;
use crate::units::{angular_to_ghz, ghz_to_angular, ghz_to_joules, mhz_to_angular, MILLI, NANO, PICO};

pub const MAX_AXES: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepError {
    #[error("invalid axis: {0}")]
    InvalidAxis(String),
    #[error("unknown observable `{0}`")]
    UnknownObservable(String),
    #[error("a sweep needs at least one observable")]
    NoObservables,
    #[error("aggregation needs the gamma_purcell and gamma_phi observables")]
    AggregateNeedsRates,
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// Why a single cell produced no values.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CellError {
    #[error(transparent)]
    Langevin(#[from] LangevinError),
    #[error(transparent)]
    Rates(#[from] RatesError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

impl CellError {
    pub fn code(&self) -> &'static str {
        match self {
            CellError::Langevin(e) => e.code(),
            CellError::Rates(e) => e.code(),
            CellError::Circuit(_) => "invalid_circuit",
        }
    }
}

/// Parameters an axis can drive, named with their configuration unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParam {
    CJ,
    CJk,
    /// Sets `C_k` of every mode; reported as the probe mode's frequency.
    CK,
    OmegaQ,
    /// Langevin sweeping frequency.
    Omega,
    CouplingScale,
    Temperature,
    Kappa,
    EJ,
    /// Photon number fed to the density dynamics.
    NQ,
    Time,
    /// Detuning fed to the density dynamics.
    Detuning,
}

impl SweepParam {
    pub const ALL: [SweepParam; 12] = [
        SweepParam::CJ,
        SweepParam::CJk,
        SweepParam::CK,
        SweepParam::OmegaQ,
        SweepParam::Omega,
        SweepParam::CouplingScale,
        SweepParam::Temperature,
        SweepParam::Kappa,
        SweepParam::EJ,
        SweepParam::NQ,
        SweepParam::Time,
        SweepParam::Detuning,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::CJ => "c_j_pF",
            SweepParam::CJk => "c_jk_pF",
            SweepParam::CK => "c_k_pF",
            SweepParam::OmegaQ => "omega_q_GHz",
            SweepParam::Omega => "omega_GHz",
            SweepParam::CouplingScale => "coupling_scale",
            SweepParam::Temperature => "temperature_mK",
            SweepParam::Kappa => "kappa_MHz",
            SweepParam::EJ => "e_j_GHz",
            SweepParam::NQ => "n_q",
            SweepParam::Time => "time_ns",
            SweepParam::Detuning => "detuning_GHz",
        }
    }

    /// Output column header for this axis.
    pub fn column(self) -> &'static str {
        match self {
            SweepParam::CK => "omega_k_GHz",
            other => other.name(),
        }
    }

    /// Whether negative axis values are meaningful.
    fn signed(self) -> bool {
        matches!(self, SweepParam::Detuning)
    }

    /// Writes `value` (configuration units) into `s`.
    pub fn apply(self, s: &mut Scenario, value: f64) {
        let c = &mut s.circuit;
        match self {
            SweepParam::CJ => c.c_j = value * PICO,
            SweepParam::CJk => c.modes.iter_mut().for_each(|m| m.c_jk = value * PICO),
            SweepParam::CK => c.modes.iter_mut().for_each(|m| m.c_k = value * PICO),
            SweepParam::OmegaQ => c.omega_q = ghz_to_angular(value),
            SweepParam::Omega => s.omega = Some(ghz_to_angular(value)),
            SweepParam::CouplingScale => c.coupling_scale = value,
            SweepParam::Temperature => c.temperature = value * MILLI,
            SweepParam::Kappa => c.kappa = mhz_to_angular(value),
            SweepParam::EJ => c.e_j = ghz_to_joules(value),
            SweepParam::NQ => s.n_q = Some(value),
            SweepParam::Time => s.time = value * NANO,
            SweepParam::Detuning => s.detuning = Some(ghz_to_angular(value)),
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| SweepError::InvalidAxis(format!("unknown parameter `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Observable {
    NQ,
    NK,
    Rho11,
    Rho22,
    Gamma1,
    GammaPurcell,
    GammaPhi,
    TS,
    TPhi,
    GK,
    DeltaAlphaSq,
}

impl Observable {
    pub const ALL: [Observable; 11] = [
        Observable::NQ,
        Observable::NK,
        Observable::Rho11,
        Observable::Rho22,
        Observable::Gamma1,
        Observable::GammaPurcell,
        Observable::GammaPhi,
        Observable::TS,
        Observable::TPhi,
        Observable::GK,
        Observable::DeltaAlphaSq,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::NQ => "n_q",
            Observable::NK => "n_k",
            Observable::Rho11 => "rho11",
            Observable::Rho22 => "rho22",
            Observable::Gamma1 => "gamma_1",
            Observable::GammaPurcell => "gamma_purcell",
            Observable::GammaPhi => "gamma_phi",
            Observable::TS => "t_s",
            Observable::TPhi => "t_phi",
            Observable::GK => "g_k",
            Observable::DeltaAlphaSq => "delta_alpha_sq",
        }
    }

    /// SI unit of the emitted value.
    pub fn unit(self) -> &'static str {
        match self {
            Observable::NQ | Observable::NK | Observable::Rho11 | Observable::Rho22 => "1",
            Observable::Gamma1 | Observable::GammaPurcell | Observable::GammaPhi => "1/s",
            Observable::TS | Observable::TPhi => "s",
            Observable::GK => "rad/s",
            Observable::DeltaAlphaSq => "(rad/s)^2",
        }
    }

    fn needs_photons(self) -> bool {
        matches!(self, Observable::NQ | Observable::NK)
    }

    fn needs_dynamics(self) -> bool {
        matches!(self, Observable::Rho11 | Observable::Rho22 | Observable::DeltaAlphaSq)
    }

    fn needs_rates(self) -> bool {
        matches!(
            self,
            Observable::Gamma1 | Observable::GammaPurcell | Observable::GammaPhi | Observable::TS | Observable::TPhi
        )
    }

    fn needs_purcell(self) -> bool {
        matches!(self, Observable::GammaPurcell | Observable::TS)
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Observable {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| SweepError::UnknownObservable(s.to_string()))
    }
}

/// One evaluation context.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub circuit: CircuitParams<f64>,
    pub rates: RatesConfig<f64>,
    /// Mode used for single-mode observables; `None` picks the mode closest
    /// to `ω_q`.
    pub probe_mode: Option<usize>,
    /// Langevin sweeping frequency (rad/s); defaults to `ω_q`.
    pub omega: Option<f64>,
    /// Photon number fed to the density dynamics; defaults to the Langevin
    /// value.
    pub n_q: Option<f64>,
    /// Detuning for the density dynamics (rad/s); defaults to `ω_q − ω_k`.
    pub detuning: Option<f64>,
    /// Evaluation time for the density dynamics (s).
    pub time: f64,
}

impl Scenario {
    pub fn new(circuit: CircuitParams<f64>, rates: RatesConfig<f64>) -> Self {
        Self { circuit, rates, probe_mode: None, omega: None, n_q: None, detuning: None, time: 0.0 }
    }

    pub fn probe(&self) -> Result<usize, CircuitError> {
        match self.probe_mode {
            Some(i) => self.circuit.mode(i).map(|_| i),
            None => nearest_mode(&self.circuit),
        }
    }

    /// Langevin point for the probe mode.
    pub fn langevin_point(&self) -> Result<LangevinPoint<f64>, CircuitError> {
        let c = &self.circuit;
        let probe = self.probe()?;
        let eff = effective_capacitances(c);
        Ok(LangevinPoint {
            omega: self.omega.unwrap_or(c.omega_q),
            omega_q: c.omega_q,
            omega_k: c.mode_frequency(probe),
            g_k: coupling_rate(probe, c, &eff),
            kappa: c.kappa,
            n_in: thermal_occupation(c.omega_q, c.temperature),
        })
    }

    /// Evaluates `observables` in order.
    pub fn evaluate(&self, observables: &[Observable]) -> Result<Vec<f64>, CellError> {
        let c = &self.circuit;
        c.validate()?;
        let probe = self.probe()?;
        let lp = self.langevin_point()?;

        let want_photons = observables.iter().any(|o| o.needs_photons())
            || (self.n_q.is_none() && observables.iter().any(|o| o.needs_dynamics()));
        let photons: Option<PhotonNumbers<f64>> = if want_photons { Some(photon_numbers(&lp)?) } else { None };
        let n_q = self.n_q.or(photons.map(|p| p.n_q)).unwrap_or(0.0);

        let rate_result: Option<RatesResult<f64>> = if observables.iter().any(|o| o.needs_rates()) {
            if observables.iter().any(|o| o.needs_purcell()) {
                if let Some(Err(e)) = mode_rates(c, &self.rates).into_iter().map(|m| m.purcell).find(Result::is_err) {
                    return Err(e.into());
                }
            }
            Some(rates(c, &self.rates))
        } else {
            None
        };

        let dyn_point = DynamicsPoint {
            delta_omega: self.detuning.unwrap_or(c.omega_q - c.mode_frequency(probe)),
            e_j_over_hbar: c.e_j_over_hbar(),
            g_k: lp.g_k,
            n_q,
            t: self.time,
        };
        let density = observables
            .iter()
            .any(|o| matches!(o, Observable::Rho11 | Observable::Rho22))
            .then(|| density_elements(&dyn_point));

        Ok(observables
            .iter()
            .map(|o| match o {
                Observable::NQ => n_q,
                Observable::NK => photons.map_or(f64::NAN, |p| p.n_k),
                Observable::Rho11 => density.map_or(f64::NAN, |d| d.rho11),
                Observable::Rho22 => density.map_or(f64::NAN, |d| d.rho22),
                Observable::Gamma1 => rate_result.map_or(f64::NAN, |r| r.gamma_1),
                Observable::GammaPurcell => rate_result.map_or(f64::NAN, |r| r.gamma_purcell),
                Observable::GammaPhi => rate_result.map_or(f64::NAN, |r| r.gamma_phi),
                Observable::TS => rate_result.map_or(f64::NAN, |r| r.t_s.value()),
                Observable::TPhi => rate_result.map_or(f64::NAN, |r| r.t_phi.value()),
                Observable::GK => lp.g_k,
                Observable::DeltaAlphaSq => delta_alpha_sq(&dyn_point),
            })
            .collect())
    }
}

/// Index of the mode whose frequency is closest to `ω_q`; ties go to the
/// lower index.
pub fn nearest_mode(c: &CircuitParams<f64>) -> Result<usize, CircuitError> {
    if c.modes.is_empty() {
        return Err(CircuitError::NoModes);
    }
    let mut best = 0;
    let mut best_gap = f64::INFINITY;
    for i in 0..c.modes.len() {
        let gap = (c.mode_frequency(i) - c.omega_q).abs();
        if gap < best_gap {
            best = i;
            best_gap = gap;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub enum AxisValues {
    Linear { min: f64, max: f64, count: usize },
    Values(Vec<f64>),
}

impl AxisValues {
    pub fn points(&self) -> Vec<f64> {
        match self {
            AxisValues::Linear { min, max, count } => linspace(*min, *max, *count),
            AxisValues::Values(v) => v.clone(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            AxisValues::Linear { count, .. } => *count,
            AxisValues::Values(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub param: SweepParam,
    pub values: AxisValues,
}

impl Axis {
    pub fn linear(param: SweepParam, min: f64, max: f64, count: usize) -> Self {
        Self { param, values: AxisValues::Linear { min, max, count } }
    }

    pub fn values(param: SweepParam, values: Vec<f64>) -> Self {
        Self { param, values: AxisValues::Values(values) }
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        let name = self.param.name();
        let bad = |msg: &str| Err(SweepError::InvalidAxis(format!("{name}: {msg}")));
        let points = match &self.values {
            AxisValues::Linear { min, max, count } => {
                if *count < 2 {
                    return bad("count must be at least 2");
                }
                if !(min < max) {
                    return bad("min must be below max");
                }
                vec![*min, *max]
            }
            AxisValues::Values(v) if v.is_empty() => return bad("no values"),
            AxisValues::Values(v) => v.clone(),
        };
        if points.iter().any(|v| !v.is_finite()) {
            return bad("values must be finite");
        }
        if !self.param.signed() && points.iter().any(|&v| v < 0.0) {
            return bad("values must be non-negative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: Scenario,
    pub axes: Vec<Axis>,
    pub observables: Vec<Observable>,
    /// Also emit `γ_c` sums over the non-error cells.
    pub aggregate: bool,
    /// Figure preset this spec was built from.
    pub preset: Option<String>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SweepError> {
        if self.axes.is_empty() || self.axes.len() > MAX_AXES {
            return Err(SweepError::InvalidAxis(format!("between 1 and {MAX_AXES} axes required")));
        }
        for (i, a) in self.axes.iter().enumerate() {
            a.validate()?;
            if self.axes[..i].iter().any(|b| b.param == a.param) {
                return Err(SweepError::InvalidAxis(format!("{} used twice", a.param)));
            }
        }
        if self.observables.is_empty() {
            return Err(SweepError::NoObservables);
        }
        if self.aggregate
            && !(self.observables.contains(&Observable::GammaPurcell) && self.observables.contains(&Observable::GammaPhi))
        {
            return Err(SweepError::AggregateNeedsRates);
        }
        self.base.circuit.validate()?;
        Ok(())
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.values.len()).collect()
    }

    pub fn cell_count(&self) -> usize {
        self.shape().iter().product()
    }

    /// Axis indices of a row-major flat index.
    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let shape = self.shape();
        let mut idx = vec![0; shape.len()];
        for (slot, &n) in idx.iter_mut().zip(&shape).rev() {
            *slot = flat % n;
            flat /= n;
        }
        idx
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    /// Axis column values (configuration units).
    pub coords: Vec<f64>,
    pub outcome: Result<Vec<f64>, CellError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub cells: Vec<SweepCell>,
    /// Named sums over the non-error cells.
    pub aggregates: Vec<(String, f64)>,
    /// Error-cell counts by reason code.
    pub diagnostics: BTreeMap<&'static str, usize>,
}

impl SweepResult {
    pub fn axis_columns(&self) -> Vec<&'static str> {
        self.spec.axes.iter().map(|a| a.param.column()).collect()
    }

    pub fn error_count(&self) -> usize {
        self.diagnostics.values().sum()
    }

    /// Values of `observable` at every cell, `None` for error cells.
    pub fn column(&self, observable: Observable) -> Option<Vec<Option<f64>>> {
        let j = self.spec.observables.iter().position(|&o| o == observable)?;
        Some(self.cells.iter().map(|c| c.outcome.as_ref().ok().map(|v| v[j])).collect())
    }
}

/// Evaluates one cell exactly as the full sweep does.
pub fn evaluate_cell(spec: &SweepSpec, flat_index: usize) -> SweepCell {
    let idx = spec.unravel(flat_index);
    let mut s = spec.base.clone();
    let mut values = Vec::with_capacity(idx.len());
    for (axis, &i) in spec.axes.iter().zip(&idx) {
        let v = match &axis.values {
            AxisValues::Linear { min, max, count } => linspace(*min, *max, *count)[i],
            AxisValues::Values(v) => v[i],
        };
        axis.param.apply(&mut s, v);
        values.push(v);
    }
    let coords = spec
        .axes
        .iter()
        .zip(values)
        .map(|(axis, v)| match axis.param {
            SweepParam::CK => s.probe().map_or(f64::NAN, |p| angular_to_ghz(s.circuit.mode_frequency(p))),
            _ => v,
        })
        .collect();
    SweepCell { coords, outcome: s.evaluate(&spec.observables) }
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult, SweepError> {
    spec.validate()?;
    let cells: Vec<SweepCell> = (0..spec.cell_count())
        .into_par_iter()
        .map(|i| evaluate_cell(spec, i))
        .collect();

    let mut diagnostics = BTreeMap::new();
    for c in &cells {
        if let Err(e) = &c.outcome {
            *diagnostics.entry(e.code()).or_insert(0) += 1;
        }
    }

    let mut aggregates = Vec::new();
    if spec.aggregate {
        let pos = |o| spec.observables.iter().position(|&x| x == o).unwrap();
        let (jp, jphi) = (pos(Observable::GammaPurcell), pos(Observable::GammaPhi));
        let ok: Vec<&Vec<f64>> = cells.iter().filter_map(|c| c.outcome.as_ref().ok()).collect();
        let purcell: Vec<f64> = ok.iter().map(|v| v[jp]).collect();
        let combined: Vec<f64> = ok.iter().map(|v| v[jp] + v[jphi]).collect();
        aggregates.push(("gamma_c".to_string(), total_decoherence(&combined)));
        aggregates.push(("gamma_c_purcell".to_string(), total_decoherence(&purcell)));
        aggregates.push(("cells_aggregated".to_string(), ok.len() as f64));
    }

    Ok(SweepResult { spec: spec.clone(), cells, aggregates, diagnostics })
}
