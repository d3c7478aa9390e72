//! Physical constants (CODATA 2018, SI).

use crate::scalar::Real;

/// Exact SI value of the elementary charge (C).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Exact SI value of the Planck constant (J·s).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant h/2π (J·s).
pub const HBAR: f64 = PLANCK / (2.0 * core::f64::consts::PI);
/// Exact SI value of the Boltzmann constant (J/K).
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// The set of constants used by every formula in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants<T> {
    /// Elementary charge (C).
    pub e: T,
    /// Reduced Planck constant (J·s).
    pub hbar: T,
    /// Planck constant (J·s).
    pub h: T,
    /// Boltzmann constant (J/K).
    pub k_b: T,
    /// Speed of light (m/s).
    pub c: T,
}

impl<T: Real> PhysicalConstants<T> {
    pub fn codata2018() -> Self {
        Self {
            e: T::lit(ELEMENTARY_CHARGE),
            hbar: T::lit(HBAR),
            h: T::lit(PLANCK),
            k_b: T::lit(BOLTZMANN),
            c: T::lit(SPEED_OF_LIGHT),
        }
    }
}

impl<T: Real> Default for PhysicalConstants<T> {
    fn default() -> Self {
        Self::codata2018()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planck_relation_holds() {
        let k = PhysicalConstants::<f64>::codata2018();
        let rel = (k.h - 2.0 * core::f64::consts::PI * k.hbar).abs() / k.h;
        assert!(rel < 1e-15, "relative mismatch {rel}");
        // Published rounded value of ħ.
        assert!((k.hbar - 1.054_571_817e-34).abs() / k.hbar < 1e-9);
    }

    #[test]
    fn all_positive() {
        let k = PhysicalConstants::<f32>::codata2018();
        for v in [k.e, k.hbar, k.h, k.k_b, k.c] {
            assert!(v > 0.0 && v.is_normal());
        }
    }
}
