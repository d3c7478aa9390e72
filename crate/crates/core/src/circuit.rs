//! Circuit description and parameter-level derived quantities.
//!
//! A Josephson qubit (capacitance `C_j`, Josephson energy `E_j`) is coupled
//! through capacitors `C_jk` to a bank of LC oscillators `(C_k, L_k)`. The
//! reduced charging structure is expressed through the lumped quantities
//!
//! ```text
//! C²   = C_j·Σ(C_jk + C_k) + Σ(C_jk·C_k)
//! C_q0 = C² / Σ(C_jk + C_k)
//! C_q1 = C² / (C_j + ΣC_jk)
//! 1/(2·C_q2) = ΣC_jk / C²
//! ```
//!
//! The cross term is stored as a coefficient (`ΣC_jk / C²`) rather than as a
//! capacitance so that the decoupled circuit gives an exact zero.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::constants::PhysicalConstants;
use crate::scalar::{linspace, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("{field} must be strictly positive and finite (got {value})")]
    NotPositive { field: &'static str, value: f64 },
    #[error("{field} must be non-negative and finite (got {value})")]
    Negative { field: &'static str, value: f64 },
    #[error("circuit has no reservoir modes")]
    NoModes,
    #[error("mode index {index} out of range for {len} modes")]
    ModeIndex { index: usize, len: usize },
}

/// How a reservoir mode's resonance frequency is derived from its elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FrequencyModel {
    /// `ω_k = 1/√(L_k·C_k)`.
    #[default]
    Bare,
    /// `ω_k = 1/√(L_k·(C_k + C_jk))`, the mode loaded by its coupling capacitor.
    Loaded,
}

impl FrequencyModel {
    pub fn as_str(self) -> &'static str {
        match self {
            FrequencyModel::Bare => "bare",
            FrequencyModel::Loaded => "loaded",
        }
    }
}

/// One LC oscillator of the reservoir.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReservoirMode<T> {
    /// Coupling capacitance to the qubit node (F).
    pub c_jk: T,
    /// Mode capacitance (F).
    pub c_k: T,
    /// Mode inductance (H).
    pub l_k: T,
}

impl<T: Real> ReservoirMode<T> {
    pub fn new(c_jk: T, c_k: T, l_k: T) -> Result<Self, CircuitError> {
        let mode = Self { c_jk, c_k, l_k };
        mode.validate()?;
        Ok(mode)
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        positive("c_k", self.c_k)?;
        positive("l_k", self.l_k)?;
        non_negative("c_jk", self.c_jk)
    }
}

/// Full description of the qubit and its reservoir.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitParams<T> {
    /// Qubit capacitance (F).
    pub c_j: T,
    /// Josephson energy (J).
    pub e_j: T,
    /// Qubit angular frequency (rad/s).
    pub omega_q: T,
    pub modes: Vec<ReservoirMode<T>>,
    /// Qubit photon loss rate (rad/s).
    pub kappa: T,
    /// Temperature of the input noise (K).
    pub temperature: T,
    /// Multiplier applied to every coupling rate.
    pub coupling_scale: T,
    pub frequency_model: FrequencyModel,
}

impl<T: Real> CircuitParams<T> {
    pub fn validate(&self) -> Result<(), CircuitError> {
        positive("c_j", self.c_j)?;
        non_negative("e_j", self.e_j)?;
        positive("omega_q", self.omega_q)?;
        non_negative("kappa", self.kappa)?;
        non_negative("temperature", self.temperature)?;
        positive("coupling_scale", self.coupling_scale)?;
        if self.modes.is_empty() {
            return Err(CircuitError::NoModes);
        }
        self.modes.iter().try_for_each(ReservoirMode::validate)
    }

    pub fn mode(&self, index: usize) -> Result<&ReservoirMode<T>, CircuitError> {
        self.modes.get(index).ok_or(CircuitError::ModeIndex {
            index,
            len: self.modes.len(),
        })
    }

    /// Resonance frequency of mode `index` under this circuit's frequency model.
    pub fn mode_frequency(&self, index: usize) -> T {
        mode_frequency_with(&self.modes[index], self.frequency_model)
    }

    /// `E_j/ħ` (rad/s).
    pub fn e_j_over_hbar(&self) -> T {
        self.e_j / PhysicalConstants::<T>::codata2018().hbar
    }
}

/// Lumped effective capacitances of the reduced Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveCapacitances<T> {
    /// `C²` (F²).
    pub c_sq: T,
    /// Qubit-side effective capacitance (F).
    pub c_q0: T,
    /// Reservoir-side effective capacitance (F).
    pub c_q1: T,
    /// `ΣC_jk / C²` (1/F), the charge–charge cross coefficient.
    pub coupling_coeff: T,
    /// `ΣC_jk` (F).
    pub c_jk_sum: T,
    /// `ΣC_k` (F).
    pub c_k_sum: T,
}

pub fn effective_capacitances<T: Real>(params: &CircuitParams<T>) -> EffectiveCapacitances<T> {
    let c_jk_sum = sum(params.modes.iter().map(|m| m.c_jk));
    let c_k_sum = sum(params.modes.iter().map(|m| m.c_k));
    let series = sum(params.modes.iter().map(|m| m.c_jk * m.c_k));
    let shunt = c_jk_sum + c_k_sum;
    let c_sq = params.c_j * shunt + series;
    EffectiveCapacitances {
        c_sq,
        c_q0: c_sq / shunt,
        c_q1: c_sq / (params.c_j + c_jk_sum),
        coupling_coeff: c_jk_sum / c_sq,
        c_jk_sum,
        c_k_sum,
    }
}

/// Bare resonance frequency `1/√(L_k·C_k)` (rad/s).
pub fn mode_frequency<T: Real>(mode: &ReservoirMode<T>) -> T {
    mode_frequency_with(mode, FrequencyModel::Bare)
}

pub fn mode_frequency_with<T: Real>(mode: &ReservoirMode<T>, model: FrequencyModel) -> T {
    let c = match model {
        FrequencyModel::Bare => mode.c_k,
        FrequencyModel::Loaded => mode.c_k + mode.c_jk,
    };
    (mode.l_k * c).sqrt().recip()
}

/// Mode capacitance `C_k` that puts the mode at `omega` under `model`.
pub fn resonant_capacitance<T: Real>(l_k: T, c_jk: T, omega: T, model: FrequencyModel) -> T {
    let total = (l_k * omega * omega).recip();
    match model {
        FrequencyModel::Bare => total,
        FrequencyModel::Loaded => total - c_jk,
    }
}

/// Oscillator impedance `Z_k = √(L_k / C_q1)` (Ω).
pub fn mode_impedance<T: Real>(mode: &ReservoirMode<T>, eff: &EffectiveCapacitances<T>) -> T {
    (mode.l_k / eff.c_q1).sqrt()
}

/// Qubit–mode coupling rate `g_k = (2e·ΣC_jk/(ħ·C²))·√(ħ/2Z_k)`, scaled by
/// `params.coupling_scale` (rad/s).
///
/// Panics if `mode_index` is out of range.
pub fn coupling_rate<T: Real>(
    mode_index: usize,
    params: &CircuitParams<T>,
    eff: &EffectiveCapacitances<T>,
) -> T {
    let k = PhysicalConstants::<T>::codata2018();
    let z = mode_impedance(&params.modes[mode_index], eff);
    let charge_gain = T::two() * (k.e / k.hbar) * eff.coupling_coeff;
    let zero_point_charge = (k.hbar / (T::two() * z)).sqrt();
    charge_gain * zero_point_charge * params.coupling_scale
}

/// Bose–Einstein occupancy `1/(exp(ħω/k_B T) − 1)`; zero at `T = 0`.
pub fn thermal_occupation<T: Real>(omega: T, temperature: T) -> T {
    if temperature <= T::zero() {
        return T::zero();
    }
    let k = PhysicalConstants::<T>::codata2018();
    let x = (k.hbar / k.k_b) * omega / temperature;
    x.exp_m1().recip()
}

/// Bank of `n` modes with `C_k` linearly spaced over `[c_k_min, c_k_max]`,
/// all sharing `c_jk` and `l_k`. A single mode sits at the range midpoint.
pub fn linear_bank<T: Real>(c_jk: T, l_k: T, c_k_min: T, c_k_max: T, n: usize) -> Vec<ReservoirMode<T>> {
    let c_ks = if n == 1 {
        vec![(c_k_min + c_k_max) / T::two()]
    } else {
        linspace(c_k_min, c_k_max, n)
    };
    c_ks.into_iter().map(|c_k| ReservoirMode { c_jk, c_k, l_k }).collect()
}

/// Node-charge capacitance matrix of the full circuit, qubit node first.
pub fn capacitance_matrix(params: &CircuitParams<f64>) -> DMatrix<f64> {
    let n = params.modes.len();
    let mut m = DMatrix::zeros(n + 1, n + 1);
    m[(0, 0)] = params.c_j + params.modes.iter().map(|m| m.c_jk).sum::<f64>();
    for (i, mode) in params.modes.iter().enumerate() {
        m[(0, i + 1)] = -mode.c_jk;
        m[(i + 1, 0)] = -mode.c_jk;
        m[(i + 1, i + 1)] = mode.c_jk + mode.c_k;
    }
    m
}

/// Comparison of the lumped qubit charging coefficient `1/C_q0` with the
/// qubit entry of the exact inverse capacitance matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LumpedDiscrepancy {
    pub exact_inverse_qq: f64,
    pub lumped_inverse_qq: f64,
    pub relative_error: f64,
}

/// Diagnostic for multi-mode circuits, where the lumped closed forms are an
/// approximation of the `(N+1)×(N+1)` network. Exact for a single mode.
pub fn lumped_discrepancy(params: &CircuitParams<f64>) -> Option<LumpedDiscrepancy> {
    let inv = capacitance_matrix(params).try_inverse()?;
    let exact = inv[(0, 0)];
    let lumped = effective_capacitances(params).c_q0.recip();
    Some(LumpedDiscrepancy {
        exact_inverse_qq: exact,
        lumped_inverse_qq: lumped,
        relative_error: (lumped - exact).abs() / exact.abs(),
    })
}

fn sum<T: Real>(it: impl Iterator<Item = T>) -> T {
    it.fold(T::zero(), |acc, x| acc + x)
}

fn positive<T: Real>(field: &'static str, value: T) -> Result<(), CircuitError> {
    if value > T::zero() && value.is_finite() {
        Ok(())
    } else {
        Err(CircuitError::NotPositive { field, value: value.to_f64().unwrap_or(f64::NAN) })
    }
}

fn non_negative<T: Real>(field: &'static str, value: T) -> Result<(), CircuitError> {
    if value >= T::zero() && value.is_finite() {
        Ok(())
    } else {
        Err(CircuitError::Negative { field, value: value.to_f64().unwrap_or(f64::NAN) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix2;

    const PF: f64 = 1e-12;
    const NH: f64 = 1e-9;

    fn circuit(c_j: f64, modes: Vec<ReservoirMode<f64>>) -> CircuitParams<f64> {
        CircuitParams {
            c_j,
            e_j: 0.0,
            omega_q: 2.0 * std::f64::consts::PI * 5e9,
            modes,
            kappa: 2.0 * std::f64::consts::PI * 1e6,
            temperature: 0.01,
            coupling_scale: 1.0,
            frequency_model: FrequencyModel::Bare,
        }
    }

    fn mode(c_jk: f64, c_k: f64, l_k: f64) -> ReservoirMode<f64> {
        ReservoirMode { c_jk: c_jk * PF, c_k: c_k * PF, l_k: l_k * NH }
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn single_mode_matches_two_by_two_inverse() {
        let p = circuit(0.03 * PF, vec![mode(0.05, 0.2, 5.0)]);
        let eff = effective_capacitances(&p);
        assert!(rel(eff.c_sq, 0.0175 * PF * PF) < 1e-12);
        assert!(rel(eff.c_q0, 0.07 * PF) < 1e-12);
        assert!(rel(eff.c_q1, 0.21875 * PF) < 1e-12);
        assert!(rel(eff.coupling_coeff, 0.05 / 0.0175 / PF) < 1e-12);

        let (cj, cjk, ck) = (0.03 * PF, 0.05 * PF, 0.2 * PF);
        let inv = Matrix2::new(cj + cjk, -cjk, -cjk, cjk + ck).try_inverse().unwrap();
        assert!(rel(inv[(0, 0)], 1.0 / eff.c_q0) < 1e-12);
        assert!(rel(inv[(1, 1)], 1.0 / eff.c_q1) < 1e-12);
        assert!(rel(inv[(0, 1)], eff.coupling_coeff) < 1e-12);
    }

    #[test]
    fn decoupled_mode_reverts_to_bare_qubit() {
        let p = circuit(0.03 * PF, vec![mode(0.0, 0.2, 5.0)]);
        let eff = effective_capacitances(&p);
        assert!(rel(eff.c_sq, 0.03 * 0.2 * PF * PF) < 1e-15);
        assert!(rel(eff.c_q0, 0.03 * PF) < 1e-15);
        assert_eq!(eff.coupling_coeff, 0.0);
        assert_eq!(coupling_rate(0, &p, &eff), 0.0);
    }

    #[test]
    fn two_equal_modes_use_summed_capacitances() {
        let p = circuit(0.03 * PF, vec![mode(0.05, 0.2, 5.0), mode(0.05, 0.2, 5.0)]);
        let eff = effective_capacitances(&p);
        let (cj, s_jk, s_k) = (0.03, 0.1, 0.4);
        let c_sq = cj * (s_jk + s_k) + 2.0 * 0.05 * 0.2;
        assert!(rel(eff.c_sq, c_sq * PF * PF) < 1e-12);
        assert!(rel(eff.c_q0, c_sq / (s_jk + s_k) * PF) < 1e-12);
        assert!(rel(eff.c_q1, c_sq / (cj + s_jk) * PF) < 1e-12);
        assert!(rel(eff.c_jk_sum, s_jk * PF) < 1e-12);
        assert!(rel(eff.c_k_sum, s_k * PF) < 1e-12);
        // Doubling the bank doubles ΣC_jk while C² grows by less than 2×.
        let single = effective_capacitances(&circuit(0.03 * PF, vec![mode(0.05, 0.2, 5.0)]));
        let ratio = eff.coupling_coeff / single.coupling_coeff;
        assert!(rel(ratio, 2.0 * 0.0175 / c_sq) < 1e-12);
    }

    #[test]
    fn mode_frequency_examples() {
        let f = |c_k: f64| mode_frequency(&mode(0.05, c_k, 5.0)) / (2.0 * std::f64::consts::PI);
        assert!((f(0.18) / 1e9 - 5.305).abs() < 1e-3);
        assert!((f(2.02) / 1e9 - 1.584).abs() < 1e-3);
        let w = mode_frequency(&mode(0.05, 0.5, 5.0));
        let w4 = mode_frequency(&mode(0.05, 0.5, 20.0));
        assert!(rel(w4, w / 2.0) < 1e-15);

        let loaded = mode_frequency_with(&mode(0.05, 0.5, 5.0), FrequencyModel::Loaded);
        assert!(rel(loaded, 1.0 / (5.0 * NH * 0.55 * PF).sqrt()) < 1e-15);
    }

    #[test]
    fn resonant_capacitance_inverts_frequency() {
        for model in [FrequencyModel::Bare, FrequencyModel::Loaded] {
            let w = 2.0 * std::f64::consts::PI * 3e9;
            let c_k = resonant_capacitance(5.0 * NH, 0.05 * PF, w, model);
            let m = ReservoirMode { c_jk: 0.05 * PF, c_k, l_k: 5.0 * NH };
            assert!(rel(mode_frequency_with(&m, model), w) < 1e-14);
        }
    }

    #[test]
    fn impedance_examples() {
        let m = mode(0.05, 0.2, 5.0);
        let eff = EffectiveCapacitances {
            c_sq: 0.0,
            c_q0: 0.0,
            c_q1: 0.21875 * PF,
            coupling_coeff: 0.0,
            c_jk_sum: 0.0,
            c_k_sum: 0.0,
        };
        let z = mode_impedance(&m, &eff);
        assert!((z - 151.19).abs() < 0.01, "Z = {z}");
        let z_l4 = mode_impedance(&mode(0.05, 0.2, 20.0), &eff);
        assert!(rel(z_l4, 2.0 * z) < 1e-15);
        let eff4 = EffectiveCapacitances { c_q1: 4.0 * eff.c_q1, ..eff };
        assert!(rel(mode_impedance(&m, &eff4), z / 2.0) < 1e-15);
    }

    #[test]
    fn coupling_rate_magnitude_and_scaling() {
        let mut p = circuit(0.03 * PF, vec![mode(0.05, 0.2, 5.0)]);
        let eff = effective_capacitances(&p);
        let g = coupling_rate(0, &p, &eff);
        // Hand evaluation in SI.
        let k = PhysicalConstants::<f64>::codata2018();
        let z = (5e-9 / 0.21875e-12_f64).sqrt();
        let expected = 2.0 * k.e * 0.05e-12 / (k.hbar * 0.0175e-24) * (k.hbar / (2.0 * z)).sqrt();
        assert!(rel(g, expected) < 1e-12);
        assert!(g > 1e9 && g < 1e10, "g = {g}");

        p.coupling_scale = 0.1;
        let g_small = coupling_rate(0, &p, &eff);
        assert!(rel(g_small, 0.1 * g) < 1e-15);
    }

    #[test]
    fn thermal_occupation_examples() {
        let two_pi = 2.0 * std::f64::consts::PI;
        let n = thermal_occupation(two_pi * 5.64e9, 0.05);
        assert!(n > 0.004 && n < 0.005, "n = {n}");
        assert_eq!(thermal_occupation(two_pi * 5e9, 0.0), 0.0);
        let cold = thermal_occupation(two_pi * 5e9, 0.01);
        assert!((cold / 3.8e-11 - 1.0).abs() < 0.02, "n = {cold}");
    }

    #[test]
    fn validation_rejects_bad_values() {
        let mut p = circuit(0.03 * PF, vec![mode(0.05, 0.2, 5.0)]);
        assert!(p.validate().is_ok());
        p.c_j = -1.0;
        assert_eq!(p.validate().unwrap_err(), CircuitError::NotPositive { field: "c_j", value: -1.0 });
        p.c_j = 1e-13;
        p.modes.clear();
        assert_eq!(p.validate().unwrap_err(), CircuitError::NoModes);
        assert!(ReservoirMode::new(-1e-15, 1e-13, 1e-9).is_err());
        assert!(ReservoirMode::new(0.0, 1e-13, 0.0).is_err());
        assert!(p.mode(3).is_err());
    }

    #[test]
    fn lumped_forms_are_exact_for_one_mode_only() {
        let one = circuit(0.03 * PF, vec![mode(0.05, 0.2, 5.0)]);
        assert!(lumped_discrepancy(&one).unwrap().relative_error < 1e-12);
        let bank = circuit(0.03 * PF, linear_bank(0.05 * PF, 5.0 * NH, 0.18 * PF, 2.02 * PF, 8));
        assert!(lumped_discrepancy(&bank).unwrap().relative_error > 1e-3);
    }

    #[test]
    fn bank_spacing() {
        let bank = linear_bank(0.05_f64, 5.0, 0.18, 2.02, 3);
        assert_eq!(bank.iter().map(|m| m.c_k).collect::<Vec<_>>(), vec![0.18, 1.1, 2.02]);
        let single = linear_bank(0.05_f64, 5.0, 0.18, 2.02, 1);
        assert!((single[0].c_k - 1.1).abs() < 1e-15);
    }

    #[test]
    fn single_precision_pipeline_stays_normal() {
        let p = CircuitParams::<f32> {
            c_j: 0.03e-12,
            e_j: 0.0,
            omega_q: 1.3e10,
            modes: vec![ReservoirMode { c_jk: 0.05e-12, c_k: 0.2e-12, l_k: 5e-9 }],
            kappa: 6.28e6,
            temperature: 0.01,
            coupling_scale: 1.0,
            frequency_model: FrequencyModel::Bare,
        };
        let eff = effective_capacitances(&p);
        assert!(eff.c_sq.is_normal());
        let g32 = coupling_rate(0, &p, &eff) as f64;
        let p64 = circuit(0.03 * PF, vec![mode(0.05, 0.2, 5.0)]);
        let g64 = coupling_rate(0, &p64, &effective_capacitances(&p64));
        assert!(rel(g32, g64) < 1e-5);
    }
}
