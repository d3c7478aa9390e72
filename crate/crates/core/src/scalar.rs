//! Scalar abstraction shared by the physics modules.
//!
//! All closed-form physics is written once against [`Real`] and instantiated
//! for `f32` and `f64`. Expressions are ordered so that intermediate products
//! of SI-scale quantities (pF, ħ, e) stay inside the `f32` normal range.

use core::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Default + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `sin(x)/x` with the removable singularity filled in.
pub(crate) fn sinc<T: Real>(x: T) -> T {
    if x.abs() < T::lit(1e-4) {
        // Taylor series; truncation error below x^6/5040.
        let x2 = x * x;
        T::one() - x2 / T::lit(6.0) + x2 * x2 / T::lit(120.0)
    } else {
        x.sin() / x
    }
}

/// `count` evenly spaced values from `min` to `max` inclusive.
pub fn linspace<T: Real>(min: T, max: T, count: usize) -> Vec<T> {
    match count {
        0 => Vec::new(),
        1 => vec![min],
        _ => {
            let step = (max - min) / T::from_usize(count - 1).unwrap();
            (0..count)
                .map(|i| {
                    if i + 1 == count {
                        max
                    } else {
                        min + step * T::from_usize(i).unwrap()
                    }
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinc_matches_direct_evaluation_away_from_zero() {
        for &x in &[1e-3_f64, 0.1, 1.0, 3.0] {
            assert!((sinc(x) - x.sin() / x).abs() < 1e-15);
        }
        assert_eq!(sinc(0.0_f64), 1.0);
        assert!((sinc(5e-5_f64) - (5e-5_f64).sin() / 5e-5).abs() <= 2.0 * f64::EPSILON);
    }

    #[test]
    fn linspace_hits_both_endpoints() {
        let v = linspace(0.18_f64, 2.02, 201);
        assert_eq!(v.len(), 201);
        assert_eq!(v[0], 0.18);
        assert_eq!(v[200], 2.02);
        assert!((v[100] - 1.1).abs() < 1e-15);
        assert_eq!(linspace(1.0_f32, 2.0, 1), vec![1.0]);
    }
}
