//! Decoherence budget of a superconducting qubit capacitively coupled to a
//! bank of LC reservoir modes.
//!
//! The physics modules ([`circuit`], [`langevin`], [`dynamics`], [`rates`])
//! are generic over [`Real`] and work in SI units throughout. The remaining
//! modules drive sweeps, search capacitor values and handle configuration
//! and serialization in `f64`.

pub mod circuit;
pub mod commands;
pub mod config;
pub mod constants;
pub mod dynamics;
pub mod langevin;
pub mod optimize;
pub mod output;
pub mod presets;
pub mod rates;
pub mod scalar;
pub mod sweep;
pub mod units;

pub use circuit::{
    coupling_rate, effective_capacitances, mode_frequency, mode_impedance, thermal_occupation, CircuitError,
    CircuitParams, EffectiveCapacitances, FrequencyModel, ReservoirMode,
};
pub use constants::PhysicalConstants;
pub use dynamics::{delta_alpha_sq, density_elements, distribution_grid, DensityElements, DynamicsPoint};
pub use langevin::{
    cross_correlation, entanglement_metric, photon_numbers, photon_numbers_closed_form, LangevinError,
    LangevinPoint, PhotonNumbers,
};
pub use rates::{
    dephasing, purcell_rate, rates, relaxation_time, spontaneous_emission_rate, total_decoherence, CoherenceTime,
    RatesConfig, RatesError, RatesResult,
};
pub use config::{ConfigDocument, ConfigError};
pub use optimize::{maximize, optimize, Objective, OptimizeError, OptimizeSpec};
pub use output::{emit_plot_script, read_config, Format, Table};
pub use presets::{figure_preset, preset_document, PRESET_IDS};
pub use scalar::Real;
pub use sweep::{run_sweep, Axis, Observable, Scenario, SweepError, SweepParam, SweepResult, SweepSpec};

pub type CircuitParamsF64 = CircuitParams<f64>;
pub type CircuitParamsF32 = CircuitParams<f32>;
pub type ReservoirModeF64 = ReservoirMode<f64>;
pub type EffectiveCapacitancesF64 = EffectiveCapacitances<f64>;
pub type LangevinPointF64 = LangevinPoint<f64>;
pub type LangevinPointF32 = LangevinPoint<f32>;
pub type PhotonNumbersF64 = PhotonNumbers<f64>;
pub type DynamicsPointF64 = DynamicsPoint<f64>;
pub type DynamicsPointF32 = DynamicsPoint<f32>;
pub type DensityElementsF64 = DensityElements<f64>;
pub type RatesConfigF64 = RatesConfig<f64>;
pub type RatesResultF64 = RatesResult<f64>;
