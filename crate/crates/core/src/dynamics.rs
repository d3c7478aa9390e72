//! Closed-form evolution of the qubit density matrix for an initially excited
//! qubit and a reservoir mode in vacuum.
//!
//! With `Δα² = Δω²/4 + (E_j/ħ)² + g²n_q²` and `X = Δα² + g²`:
//!
//! ```text
//! ρ11 = cos²(t√X) + (Δω²/4)·sin²(t√X)/X
//! ρ12 = −j(E_j/ħ)·cos(t√X)·sin(t√X)/√X
//! ρ22 = ((E_j/ħ)² + g²n_q²)·sin²(t√X)/X
//! ```
//!
//! `sin(t√X)/√X` is evaluated as `t·sinc(t√X)` so that `X = 0` needs no
//! special case. The trace deficit `1 − ρ11 − ρ22` is the population held by
//! the reservoir mode.

use num_complex::Complex;
use thiserror::Error;

use crate::circuit::{coupling_rate, effective_capacitances, CircuitError, CircuitParams};
use crate::scalar::{linspace, sinc, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("{axis} axis needs min < max and at least 2 points")]
    InvalidRange { axis: &'static str },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicsPoint<T> {
    /// Detuning `ω_q − ω_k` (rad/s).
    pub delta_omega: T,
    /// `E_j/ħ` (rad/s).
    pub e_j_over_hbar: T,
    pub g_k: T,
    pub n_q: T,
    /// Time (s).
    pub t: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityElements<T> {
    pub rho11: T,
    pub rho12: Complex<T>,
    pub rho22: T,
}

/// `Δα² = Δω²/4 + (E_j/ħ)² + g²n_q²` in (rad/s)².
pub fn delta_alpha_sq<T: Real>(p: &DynamicsPoint<T>) -> T {
    let half = p.delta_omega / T::two();
    let gn = p.g_k * p.n_q;
    half * half + p.e_j_over_hbar * p.e_j_over_hbar + gn * gn
}

pub fn density_elements<T: Real>(p: &DynamicsPoint<T>) -> DensityElements<T> {
    let x = delta_alpha_sq(p) + p.g_k * p.g_k;
    let phase = p.t * x.sqrt();
    let c = phase.cos();
    // sin(t√X)/√X
    let s = p.t * sinc(phase);
    let half = p.delta_omega / T::two();
    let gn = p.g_k * p.n_q;
    let e = p.e_j_over_hbar;
    DensityElements {
        rho11: c * c + half * half * s * s,
        rho12: Complex::new(T::zero(), -e * c * s),
        rho22: (e * e + gn * gn) * s * s,
    }
}

/// Time maximum of ρ22, `((E_j/ħ)² + g²n_q²)/X`; zero when `X = 0`.
pub fn peak_rho22<T: Real>(p: &DynamicsPoint<T>) -> T {
    let x = delta_alpha_sq(p) + p.g_k * p.g_k;
    if x == T::zero() {
        return T::zero();
    }
    let gn = p.g_k * p.n_q;
    (p.e_j_over_hbar * p.e_j_over_hbar + gn * gn) / x
}

/// Elements on a `(detuning, time)` grid, stored row-major with detuning as
/// the outer index.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid<T> {
    pub detunings: Vec<T>,
    pub times: Vec<T>,
    pub cells: Vec<DensityElements<T>>,
}

impl<T: Real> DensityGrid<T> {
    pub fn at(&self, detuning_index: usize, time_index: usize) -> &DensityElements<T> {
        &self.cells[detuning_index * self.times.len() + time_index]
    }

    /// Largest ρ22 over the time axis for one detuning row.
    pub fn row_max_rho22(&self, detuning_index: usize) -> T {
        let n = self.times.len();
        self.cells[detuning_index * n..(detuning_index + 1) * n]
            .iter()
            .fold(T::zero(), |m, c| m.max(c.rho22))
    }
}

/// Evaluates `density_elements` over a detuning × time grid for the coupling
/// rate of `probe_mode`. `resolution` is `(detuning points, time points)`.
pub fn distribution_grid<T: Real>(
    params: &CircuitParams<T>,
    probe_mode: usize,
    n_q: T,
    detuning: (T, T),
    time: (T, T),
    resolution: (usize, usize),
) -> Result<DensityGrid<T>, DynamicsError> {
    check_axis("detuning", detuning, resolution.0)?;
    check_axis("time", time, resolution.1)?;
    params.mode(probe_mode)?;
    let g_k = coupling_rate(probe_mode, params, &effective_capacitances(params));
    let e_j_over_hbar = params.e_j_over_hbar();
    let detunings = linspace(detuning.0, detuning.1, resolution.0);
    let times = linspace(time.0, time.1, resolution.1);
    let cells = detunings
        .iter()
        .flat_map(|&delta_omega| {
            times.iter().map(move |&t| density_elements(&DynamicsPoint { delta_omega, e_j_over_hbar, g_k, n_q, t }))
        })
        .collect();
    Ok(DensityGrid { detunings, times, cells })
}

fn check_axis<T: Real>(axis: &'static str, (lo, hi): (T, T), count: usize) -> Result<(), DynamicsError> {
    if count >= 2 && lo < hi && lo.is_finite() && hi.is_finite() {
        Ok(())
    } else {
        Err(DynamicsError::InvalidRange { axis })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{FrequencyModel, ReservoirMode};

    fn point() -> DynamicsPoint<f64> {
        DynamicsPoint { delta_omega: 3e8, e_j_over_hbar: 1e8, g_k: 1.5e8, n_q: 0.2, t: 7e-9 }
    }

    #[test]
    fn delta_alpha_examples() {
        let zero = DynamicsPoint { delta_omega: 0.0, e_j_over_hbar: 0.0, g_k: 1e8, n_q: 0.0, t: 0.0 };
        assert_eq!(delta_alpha_sq(&zero), 0.0);
        let single = DynamicsPoint { delta_omega: 2e9, ..zero };
        assert_eq!(delta_alpha_sq(&single), 1e18);
    }

    #[test]
    fn initial_condition_is_exact() {
        let d = density_elements(&DynamicsPoint { t: 0.0, ..point() });
        assert_eq!(d.rho11, 1.0);
        assert_eq!(d.rho12, Complex::new(0.0, -0.0));
        assert_eq!(d.rho22, 0.0);
    }

    #[test]
    fn resonant_half_period_empties_the_qubit() {
        let g = 1.5e8;
        let p = DynamicsPoint { delta_omega: 0.0, e_j_over_hbar: 0.0, g_k: g, n_q: 0.0, t: std::f64::consts::PI / (2.0 * g) };
        let d = density_elements(&p);
        assert!(d.rho11.abs() < 1e-30);
        assert_eq!(d.rho22, 0.0);
    }

    #[test]
    fn uncoupled_populations_are_frozen() {
        for t in [1e-9_f64, 3.3e-8, 1e-6] {
            let p = DynamicsPoint { delta_omega: 4e9, e_j_over_hbar: 0.0, g_k: 0.0, n_q: 0.3, t };
            assert!((density_elements(&p).rho11 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_frequency_limit_is_finite() {
        let p = DynamicsPoint { delta_omega: 0.0, e_j_over_hbar: 0.0, g_k: 0.0, n_q: 0.0, t: 1e-6 };
        let d = density_elements(&p);
        assert_eq!((d.rho11, d.rho22), (1.0, 0.0));
        assert_eq!(peak_rho22(&p), 0.0);
    }

    #[test]
    fn periodic_in_pi_over_root_x() {
        let p = point();
        let x = delta_alpha_sq(&p) + p.g_k * p.g_k;
        let a = density_elements(&p);
        let b = density_elements(&DynamicsPoint { t: p.t + std::f64::consts::PI / x.sqrt(), ..p });
        assert!((a.rho11 - b.rho11).abs() < 1e-10);
        assert!((a.rho22 - b.rho22).abs() < 1e-10);
        assert!((a.rho12 - b.rho12).norm() < 1e-10);
    }

    #[test]
    fn peak_matches_time_maximum() {
        let p = point();
        let x = delta_alpha_sq(&p) + p.g_k * p.g_k;
        let at_peak = density_elements(&DynamicsPoint { t: std::f64::consts::FRAC_PI_2 / x.sqrt(), ..p });
        assert!((at_peak.rho22 - peak_rho22(&p)).abs() < 1e-14);
    }

    #[test]
    fn grid_cells_match_pointwise_evaluation() {
        let params = CircuitParams {
            c_j: 0.03e-12,
            e_j: 0.0,
            omega_q: 1.35e10,
            modes: vec![ReservoirMode { c_jk: 0.05e-12, c_k: 1.1e-12, l_k: 5e-9 }],
            kappa: 6.28e6,
            temperature: 0.01,
            coupling_scale: 0.1,
            frequency_model: FrequencyModel::Bare,
        };
        let grid = distribution_grid(&params, 0, 0.005, (-1e9, 1e9), (0.0, 5e-8), (2, 2)).unwrap();
        let g_k = coupling_rate(0, &params, &effective_capacitances(&params));
        for (i, &delta_omega) in [-1e9, 1e9].iter().enumerate() {
            for (j, &t) in [0.0, 5e-8].iter().enumerate() {
                let p = DynamicsPoint { delta_omega, e_j_over_hbar: 0.0, g_k, n_q: 0.005, t };
                assert_eq!(*grid.at(i, j), density_elements(&p));
            }
        }
        let dark = distribution_grid(&params, 0, 0.0, (-1e9, 1e9), (0.0, 5e-8), (5, 7)).unwrap();
        assert!(dark.cells.iter().all(|c| c.rho22 == 0.0));
        assert!(distribution_grid(&params, 0, 0.0, (1.0, 1.0), (0.0, 1.0), (3, 3)).is_err());
        assert!(distribution_grid(&params, 4, 0.0, (0.0, 1.0), (0.0, 1.0), (3, 3)).is_err());
    }

    #[test]
    fn single_precision_bounds() {
        let p = DynamicsPoint::<f32> { delta_omega: 3e8, e_j_over_hbar: 1e8, g_k: 1.5e8, n_q: 0.2, t: 7e-9 };
        let d = density_elements(&p);
        assert!(d.rho11 >= 0.0 && d.rho11 <= 1.0);
        assert!(d.rho11 + d.rho22 <= 1.0 + 1e-6);
    }
}
