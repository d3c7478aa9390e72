//! Circuit-induced decoherence rates.
//!
//! * spontaneous emission
//!   `Γ₁ = (8π²e²/ħc³)·(ΣC_jk/C_j)²·C_q1/(ΣC_jk + ΣC_k)²·ω_q³·D`
//! * dispersive Purcell decay `γ_k = κ·g_k²/Δω²`
//! * dephasing, identified with the dispersive shift `γ_φ = 2g_k²/ω_k`
//!
//! The density of states `D` fixes only the absolute scale of Γ₁. It is
//! either set directly or calibrated against a reference circuit with a known
//! spontaneous-emission time.

use thiserror::Error;

use crate::circuit::{coupling_rate, effective_capacitances, CircuitParams, EffectiveCapacitances};
use crate::constants::PhysicalConstants;
use crate::scalar::Real;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum RatesError {
    #[error("detuning {delta_omega:e} rad/s is inside the resonance window ±{threshold:e} rad/s")]
    ResonantDivergence { delta_omega: f64, threshold: f64 },
    #[error("total rate is zero; time is unbounded")]
    ZeroRate,
    #[error("{field} must be strictly positive and finite")]
    InvalidConfig { field: &'static str },
}

impl RatesError {
    pub fn code(&self) -> &'static str {
        match self {
            RatesError::ResonantDivergence { .. } => "purcell_resonance",
            RatesError::ZeroRate => "zero_rate",
            RatesError::InvalidConfig { .. } => "invalid_config",
        }
    }
}

/// A coherence time that may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoherenceTime<T> {
    Finite(T),
    Unbounded,
}

impl<T: Real> CoherenceTime<T> {
    /// Reciprocal of a non-negative rate.
    pub fn from_rate(rate: T) -> Self {
        if rate > T::zero() {
            CoherenceTime::Finite(rate.recip())
        } else {
            CoherenceTime::Unbounded
        }
    }

    pub fn seconds(&self) -> Option<T> {
        match *self {
            CoherenceTime::Finite(t) => Some(t),
            CoherenceTime::Unbounded => None,
        }
    }

    /// Seconds, with `Unbounded` mapped to `+∞`.
    pub fn value(&self) -> T {
        self.seconds().unwrap_or_else(T::infinity)
    }
}

/// Validity window of the dispersive Purcell formula.
///
/// A detuning is rejected when `|Δω| < max(floor, dispersive_ratio·g_k)`.
/// A ratio of zero leaves only the fixed floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PurcellGuard<T> {
    /// Absolute floor (rad/s).
    pub floor: T,
    /// Minimum `|Δω|/g_k`.
    pub dispersive_ratio: T,
}

impl<T: Real> Default for PurcellGuard<T> {
    fn default() -> Self {
        Self { floor: T::lit(2.0e6) * T::PI(), dispersive_ratio: T::lit(10.0) }
    }
}

impl<T: Real> PurcellGuard<T> {
    pub fn threshold(&self, g_k: T) -> T {
        self.floor.max(self.dispersive_ratio * g_k)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration<T> {
    pub reference: CircuitParams<T>,
    /// Spontaneous-emission time `1/Γ₁` reproduced at the reference (s).
    pub target_t_s: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatesConfig<T> {
    /// Density of states `D`; absorbs the unknown quantization volume.
    pub mode_density: T,
    /// The reference this config was calibrated against, if any.
    pub calibration: Option<Calibration<T>>,
    pub purcell: PurcellGuard<T>,
}

impl<T: Real> Default for RatesConfig<T> {
    fn default() -> Self {
        Self { mode_density: T::one(), calibration: None, purcell: PurcellGuard::default() }
    }
}

impl<T: Real> RatesConfig<T> {
    pub fn validate(&self) -> Result<(), RatesError> {
        if !(self.mode_density > T::zero() && self.mode_density.is_finite()) {
            return Err(RatesError::InvalidConfig { field: "mode_density" });
        }
        if !(self.purcell.floor >= T::zero() && self.purcell.dispersive_ratio >= T::zero()) {
            return Err(RatesError::InvalidConfig { field: "purcell" });
        }
        Ok(())
    }

    /// Returns a copy whose density of states makes `reference` radiate with
    /// `1/Γ₁ = target_t_s`.
    pub fn calibrate(&self, reference: &CircuitParams<T>, target_t_s: T) -> Result<Self, RatesError> {
        if !(target_t_s > T::zero() && target_t_s.is_finite()) {
            return Err(RatesError::InvalidConfig { field: "target_t_s" });
        }
        let unit = RatesConfig { mode_density: T::one(), ..self.clone() };
        let gamma = spontaneous_emission_rate(reference, &effective_capacitances(reference), &unit);
        if gamma <= T::zero() {
            return Err(RatesError::ZeroRate);
        }
        Ok(Self {
            mode_density: (target_t_s * gamma).recip(),
            calibration: Some(Calibration { reference: reference.clone(), target_t_s }),
            purcell: self.purcell,
        })
    }
}

/// Spontaneous emission rate Γ₁ (1/s, up to the scale set by `mode_density`).
pub fn spontaneous_emission_rate<T: Real>(
    params: &CircuitParams<T>,
    eff: &EffectiveCapacitances<T>,
    cfg: &RatesConfig<T>,
) -> T {
    let k = PhysicalConstants::<T>::codata2018();
    let prefactor = T::lit(8.0) * T::PI() * T::PI() * (k.e / k.hbar) * (k.e / k.c) / (k.c * k.c);
    let ratio = eff.c_jk_sum / params.c_j;
    let shunt = eff.c_jk_sum + eff.c_k_sum;
    let w = params.omega_q;
    prefactor * ratio * ratio * (eff.c_q1 / shunt / shunt) * (w * w * w) * cfg.mode_density
}

/// Dispersive Purcell rate `κ·g²/Δω²`.
pub fn purcell_rate<T: Real>(g_k: T, kappa: T, delta_omega: T, guard: &PurcellGuard<T>) -> Result<T, RatesError> {
    let threshold = guard.threshold(g_k);
    if !(delta_omega.abs() >= threshold) || delta_omega == T::zero() {
        return Err(RatesError::ResonantDivergence {
            delta_omega: delta_omega.to_f64().unwrap_or(f64::NAN),
            threshold: threshold.to_f64().unwrap_or(f64::NAN),
        });
    }
    let r = g_k / delta_omega;
    Ok(kappa * r * r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dephasing<T> {
    /// `ω_q − 2g²/ω_k` (rad/s).
    pub shifted_omega_q: T,
    /// `2g²/ω_k` (1/s).
    pub gamma_phi: T,
    pub t_phi: CoherenceTime<T>,
}

pub fn dephasing<T: Real>(g_k: T, omega_k: T, omega_q: T) -> Dephasing<T> {
    let gamma_phi = T::two() * g_k * g_k / omega_k;
    Dephasing { shifted_omega_q: omega_q - gamma_phi, gamma_phi, t_phi: CoherenceTime::from_rate(gamma_phi) }
}

/// `T_s = 1/(Γ₁ + γ_purcell)`.
pub fn relaxation_time<T: Real>(gamma_1: T, gamma_purcell: T) -> Result<T, RatesError> {
    let total = gamma_1 + gamma_purcell;
    if total > T::zero() {
        Ok(total.recip())
    } else {
        Err(RatesError::ZeroRate)
    }
}

/// `γ_c = Σγ_k`.
pub fn total_decoherence<T: Real>(per_mode: &[T]) -> T {
    per_mode.iter().fold(T::zero(), |acc, &r| acc + r)
}

/// Rates contributed by one reservoir mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeRates<T> {
    pub omega_k: T,
    pub g_k: T,
    /// `ω_q − ω_k` (rad/s).
    pub delta_omega: T,
    pub purcell: Result<T, RatesError>,
    pub dephasing: Dephasing<T>,
}

pub fn mode_rates<T: Real>(params: &CircuitParams<T>, cfg: &RatesConfig<T>) -> Vec<ModeRates<T>> {
    let eff = effective_capacitances(params);
    (0..params.modes.len())
        .map(|i| {
            let omega_k = params.mode_frequency(i);
            let g_k = coupling_rate(i, params, &eff);
            let delta_omega = params.omega_q - omega_k;
            ModeRates {
                omega_k,
                g_k,
                delta_omega,
                purcell: purcell_rate(g_k, params.kappa, delta_omega, &cfg.purcell),
                dephasing: dephasing(g_k, omega_k, params.omega_q),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatesResult<T> {
    pub gamma_1: T,
    /// Purcell rate summed over modes outside the resonance window.
    pub gamma_purcell: T,
    pub gamma_phi: T,
    /// `Σ(γ_purcell,k + γ_φ,k)` over the bank.
    pub gamma_c: T,
    /// `Σγ_purcell,k` alone.
    pub gamma_c_purcell: T,
    pub t_s: CoherenceTime<T>,
    pub t_phi: CoherenceTime<T>,
    pub shifted_omega_q: T,
    /// Modes whose Purcell term was dropped because they sit inside the
    /// resonance window.
    pub purcell_excluded: usize,
}

/// Full rate budget of a circuit. Modes inside the Purcell resonance window
/// contribute Γ₁ and dephasing but no Purcell term; their count is reported.
pub fn rates<T: Real>(params: &CircuitParams<T>, cfg: &RatesConfig<T>) -> RatesResult<T> {
    let eff = effective_capacitances(params);
    let gamma_1 = spontaneous_emission_rate(params, &eff, cfg);
    let per_mode = mode_rates(params, cfg);
    let purcell: Vec<T> = per_mode.iter().filter_map(|m| m.purcell.ok()).collect();
    let phi: Vec<T> = per_mode.iter().map(|m| m.dephasing.gamma_phi).collect();
    let combined: Vec<T> = per_mode
        .iter()
        .map(|m| m.purcell.unwrap_or(T::zero()) + m.dephasing.gamma_phi)
        .collect();
    let gamma_purcell = total_decoherence(&purcell);
    let gamma_phi = total_decoherence(&phi);
    RatesResult {
        gamma_1,
        gamma_purcell,
        gamma_phi,
        gamma_c: total_decoherence(&combined),
        gamma_c_purcell: gamma_purcell,
        t_s: CoherenceTime::from_rate(gamma_1 + gamma_purcell),
        t_phi: CoherenceTime::from_rate(gamma_phi),
        shifted_omega_q: params.omega_q - gamma_phi,
        purcell_excluded: per_mode.len() - purcell.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{mode_frequency, FrequencyModel, ReservoirMode};

    const PF: f64 = 1e-12;

    fn caption(c_j: f64, c_jk: f64, c_k: f64) -> CircuitParams<f64> {
        let mode = ReservoirMode { c_jk: c_jk * PF, c_k: c_k * PF, l_k: 5e-9 };
        CircuitParams {
            c_j: c_j * PF,
            e_j: 0.0,
            omega_q: mode_frequency(&ReservoirMode { c_k: 1.1 * PF, ..mode }),
            modes: vec![mode],
            kappa: 2.0 * std::f64::consts::PI * 1e6,
            temperature: 0.01,
            coupling_scale: 0.1,
            frequency_model: FrequencyModel::Bare,
        }
    }

    fn gamma_1(p: &CircuitParams<f64>) -> f64 {
        spontaneous_emission_rate(p, &effective_capacitances(p), &RatesConfig::default())
    }

    #[test]
    fn no_coupling_no_emission() {
        assert_eq!(gamma_1(&caption(0.03, 0.0, 1.1)), 0.0);
    }

    #[test]
    fn cubic_frequency_scaling() {
        let mut p = caption(0.03, 0.05, 1.1);
        let base = gamma_1(&p);
        p.omega_q *= 2.0;
        assert_eq!(gamma_1(&p) / base, 8.0);
    }

    #[test]
    fn larger_qubit_capacitor_radiates_less() {
        assert!(gamma_1(&caption(0.06, 0.05, 1.1)) < gamma_1(&caption(0.03, 0.05, 1.1)));
    }

    #[test]
    fn purcell_examples() {
        let guard = PurcellGuard { floor: 2.0 * std::f64::consts::PI * 1e6, dispersive_ratio: 10.0 };
        assert_eq!(purcell_rate(0.0, 1e7, 1e9, &guard).unwrap(), 0.0);
        let a = purcell_rate(1e7, 1e7, 1e9, &guard).unwrap();
        let b = purcell_rate(1e7, 1e7, 2e9, &guard).unwrap();
        assert_eq!(a / b, 4.0);
        assert!(matches!(purcell_rate(1e7, 1e7, 0.0, &guard), Err(RatesError::ResonantDivergence { .. })));
        // Inside ten coupling rates but outside the fixed floor.
        assert!(purcell_rate(1e8, 1e7, 5e8, &guard).is_err());
        let floor_only = PurcellGuard { dispersive_ratio: 0.0, ..guard };
        assert!(purcell_rate(1e8, 1e7, 5e8, &floor_only).is_ok());
        assert!(purcell_rate(1e8, 1e7, 1e6, &floor_only).is_err());
    }

    #[test]
    fn dephasing_examples() {
        let d = dephasing(0.0, 1e10, 2e10);
        assert_eq!((d.shifted_omega_q, d.gamma_phi, d.t_phi), (2e10, 0.0, CoherenceTime::Unbounded));
        let a = dephasing(1e8, 1e10, 2e10);
        let b = dephasing(1e8, 2e10, 2e10);
        assert_eq!(a.gamma_phi / b.gamma_phi, 2.0);
        assert!(a.shifted_omega_q < 2e10);
    }

    #[test]
    fn relaxation_time_examples() {
        assert_eq!(relaxation_time(1e6, 0.0).unwrap(), 1e-6);
        assert_eq!(relaxation_time(1e6, 1e6).unwrap(), 5e-7);
        assert_eq!(relaxation_time(0.0, 0.0), Err(RatesError::ZeroRate));
    }

    #[test]
    fn total_is_a_plain_sum() {
        assert_eq!(total_decoherence(&[3.5]), 3.5);
        assert_eq!(total_decoherence(&[2.0; 8]), 16.0);
    }

    #[test]
    fn calibration_reproduces_target() {
        let reference = caption(0.03, 0.05, 1.1);
        let cfg = RatesConfig::default().calibrate(&reference, 0.7e-6).unwrap();
        let t = 1.0 / spontaneous_emission_rate(&reference, &effective_capacitances(&reference), &cfg);
        assert!((t / 0.7e-6 - 1.0).abs() < 1e-12);
        assert_eq!(cfg.calibration.as_ref().unwrap().target_t_s, 0.7e-6);
        assert_eq!(RatesConfig::default().calibrate(&caption(0.03, 0.0, 1.1), 1e-6), Err(RatesError::ZeroRate));
    }

    #[test]
    fn resonant_mode_is_excluded_from_purcell_sum() {
        let p = caption(0.03, 0.05, 1.1);
        let r = rates(&p, &RatesConfig::default());
        assert_eq!(r.purcell_excluded, 1);
        assert_eq!(r.gamma_purcell, 0.0);
        assert!(r.gamma_phi > 0.0);
        assert_eq!(r.gamma_c, r.gamma_phi);
        assert!(r.shifted_omega_q < p.omega_q);
        assert_eq!(r.t_s, CoherenceTime::Finite(1.0 / r.gamma_1));
    }

    #[test]
    fn detuned_mode_contributes_purcell() {
        let p = caption(0.03, 0.05, 0.3);
        let r = rates(&p, &RatesConfig::default());
        assert_eq!(r.purcell_excluded, 0);
        assert!(r.gamma_purcell > 0.0);
        assert_eq!(r.gamma_c, r.gamma_purcell + r.gamma_phi);
    }
}
