//! Derivative-free search for the capacitor values that maximize a coherence
//! time.
//!
//! The search is a coarse tensor grid over the bounds followed by a fixed
//! number of coordinate-wise refinement rounds. Each round re-samples one
//! coordinate at a time on `grid_points` points spanning one current grid
//! spacing either side of the incumbent, then shrinks that spacing to the new
//! grid's spacing. Evaluations inside a round run in parallel; the trace is
//! kept in a deterministic order.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::rates::{rates, CoherenceTime, RatesError};
use crate::scalar::linspace;
use crate::sweep::{CellError, Scenario};
use crate::units::PICO;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimizeError {
    #[error("no variables to optimize")]
    NoVariables,
    #[error("bounds for {0} must be positive, finite and ordered")]
    InvalidBounds(String),
    #[error("grid_points must be at least 2")]
    TooFewPoints,
    #[error("every evaluated point was invalid")]
    AllPointsInvalid,
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variable {
    CJ,
    CJk,
}

impl Variable {
    pub fn name(self) -> &'static str {
        match self {
            Variable::CJ => "c_j",
            Variable::CJk => "c_jk",
        }
    }

    /// Output column header.
    pub fn column(self) -> &'static str {
        match self {
            Variable::CJ => "c_j_pF",
            Variable::CJk => "c_jk_pF",
        }
    }

    fn apply(self, s: &mut Scenario, value_pf: f64) {
        match self {
            Variable::CJ => s.circuit.c_j = value_pf * PICO,
            Variable::CJk => s.circuit.modes.iter_mut().for_each(|m| m.c_jk = value_pf * PICO),
        }
    }
}

impl FromStr for Variable {
    type Err = OptimizeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "c_j" => Ok(Variable::CJ),
            "c_jk" => Ok(Variable::CJk),
            _ => Err(OptimizeError::Unknown { kind: "variable", name: s.to_string() }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// `1/(Γ₁ + γ_purcell)`.
    MaxTs,
    /// `1/(Γ₁ + γ_purcell + γ_φ)`.
    MaxTTotal,
}

impl Objective {
    pub fn name(self) -> &'static str {
        match self {
            Objective::MaxTs => "max_t_s",
            Objective::MaxTTotal => "max_t_total",
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Objective {
    type Err = OptimizeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "max_t_s" => Ok(Objective::MaxTs),
            "max_t_total" => Ok(Objective::MaxTTotal),
            _ => Err(OptimizeError::Unknown { kind: "objective", name: s.to_string() }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound {
    pub variable: Variable,
    /// pF.
    pub min: f64,
    /// pF.
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeSpec {
    pub base: Scenario,
    pub variables: Vec<Bound>,
    pub objective: Objective,
    pub grid_points: usize,
    pub refinement_iterations: usize,
}

/// One objective evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry<E> {
    /// 0 for the coarse grid, then the refinement round.
    pub round: usize,
    pub x: Vec<f64>,
    pub value: Result<f64, E>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Maximum<E> {
    pub argmax: Vec<f64>,
    pub value: f64,
    /// Final half-width of the refinement window per coordinate.
    pub resolution: Vec<f64>,
    pub trace: Vec<TraceEntry<E>>,
}

/// Maximizes `f` over the box `bounds`. Non-finite values count as invalid.
pub fn maximize<E, F>(
    bounds: &[(f64, f64)],
    grid_points: usize,
    refinement_iterations: usize,
    f: F,
) -> Result<Maximum<E>, OptimizeError>
where
    E: Send,
    F: Fn(&[f64]) -> Result<f64, E> + Sync,
{
    if bounds.is_empty() {
        return Err(OptimizeError::NoVariables);
    }
    if grid_points < 2 {
        return Err(OptimizeError::TooFewPoints);
    }
    let eval = |round: usize, points: Vec<Vec<f64>>| -> Vec<TraceEntry<E>> {
        points
            .into_par_iter()
            .map(|x| {
                let value = f(&x);
                TraceEntry { round, x, value }
            })
            .collect()
    };

    let axes: Vec<Vec<f64>> = bounds.iter().map(|&(lo, hi)| linspace(lo, hi, grid_points)).collect();
    let mut trace = eval(0, tensor_grid(&axes));
    let mut best: Option<(Vec<f64>, f64)> = None;
    update_best(&mut best, &trace);

    let steps = (grid_points - 1) as f64;
    let mut half_width: Vec<f64> = bounds.iter().map(|&(lo, hi)| (hi - lo) / steps).collect();
    for round in 1..=refinement_iterations {
        for i in 0..bounds.len() {
            let Some((x0, _)) = best.clone() else { break };
            let (lo, hi) = bounds[i];
            let a = (x0[i] - half_width[i]).max(lo);
            let b = (x0[i] + half_width[i]).min(hi);
            let points = linspace(a, b, grid_points)
                .into_iter()
                .map(|v| {
                    let mut x = x0.clone();
                    x[i] = v;
                    x
                })
                .collect();
            let entries = eval(round, points);
            update_best(&mut best, &entries);
            trace.extend(entries);
            half_width[i] = 2.0 * half_width[i] / steps;
        }
    }

    let (argmax, value) = best.ok_or(OptimizeError::AllPointsInvalid)?;
    Ok(Maximum { argmax, value, resolution: half_width, trace })
}

fn tensor_grid(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![Vec::new()], |acc, axis| {
        acc.iter()
            .flat_map(|prefix| {
                axis.iter().map(move |&v| {
                    let mut x = prefix.clone();
                    x.push(v);
                    x
                })
            })
            .collect()
    })
}

/// Keeps the first strictly best finite value.
fn update_best<E>(best: &mut Option<(Vec<f64>, f64)>, entries: &[TraceEntry<E>]) {
    for e in entries {
        if let Ok(v) = e.value {
            if v.is_finite() && best.as_ref().is_none_or(|(_, b)| v > *b) {
                *best = Some((e.x.clone(), v));
            }
        }
    }
}

/// Objective value of `spec` at `x` (pF, in `spec.variables` order).
pub fn objective_value(spec: &OptimizeSpec, x: &[f64]) -> Result<f64, CellError> {
    let mut s = spec.base.clone();
    for (b, &v) in spec.variables.iter().zip(x) {
        b.variable.apply(&mut s, v);
    }
    s.circuit.validate()?;
    let r = rates(&s.circuit, &s.rates);
    if r.purcell_excluded > 0 {
        let err = crate::rates::mode_rates(&s.circuit, &s.rates)
            .into_iter()
            .find_map(|m| m.purcell.err())
            .unwrap_or(RatesError::ZeroRate);
        return Err(err.into());
    }
    let rate = match spec.objective {
        Objective::MaxTs => r.gamma_1 + r.gamma_purcell,
        Objective::MaxTTotal => r.gamma_1 + r.gamma_purcell + r.gamma_phi,
    };
    match CoherenceTime::from_rate(rate) {
        CoherenceTime::Finite(t) => Ok(t),
        CoherenceTime::Unbounded => Err(RatesError::ZeroRate.into()),
    }
}

pub fn optimize(spec: &OptimizeSpec) -> Result<Maximum<CellError>, OptimizeError> {
    if spec.variables.is_empty() {
        return Err(OptimizeError::NoVariables);
    }
    for b in &spec.variables {
        if !(b.min > 0.0 && b.min < b.max && b.max.is_finite()) {
            return Err(OptimizeError::InvalidBounds(b.variable.name().to_string()));
        }
    }
    let bounds: Vec<(f64, f64)> = spec.variables.iter().map(|b| (b.min, b.max)).collect();
    maximize(&bounds, spec.grid_points, spec.refinement_iterations, |x| objective_value(spec, x))
}
