//! Conversions between configuration units and SI.

use core::f64::consts::TAU;

use crate::constants::PLANCK;

pub const PICO: f64 = 1e-12;
pub const NANO: f64 = 1e-9;
pub const MICRO: f64 = 1e-6;
pub const MILLI: f64 = 1e-3;

/// Ordinary frequency in GHz to angular frequency in rad/s.
pub fn ghz_to_angular(f: f64) -> f64 {
    TAU * f * 1e9
}

pub fn angular_to_ghz(w: f64) -> f64 {
    w / (TAU * 1e9)
}

pub fn mhz_to_angular(f: f64) -> f64 {
    TAU * f * 1e6
}

/// Energy `h·f` for `f` in GHz.
pub fn ghz_to_joules(f: f64) -> f64 {
    PLANCK * f * 1e9
}
