//! Fourier-domain Heisenberg–Langevin solve for the qubit and reservoir
//! photon numbers.
//!
//! With `D_q = (ω_q + ω)² + κ²/4` and `D_k = (ω_k + ω)²` the steady-state
//! balance is
//!
//! ```text
//! n_q = g²/D_q · (2 n_k + 1) + 2κ n_in / D_q
//! n_k = g²/D_k · (2 n_q + 1)
//! ```
//!
//! which is solved as a 2×2 linear system. The single-expression form for
//! `n_q` that circulates alongside it is kept as a diagnostic only; it is not
//! algebraically equivalent to the system above.

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::Real;

/// `|determinant|` below which the linearized system is treated as singular.
pub const SINGULARITY_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum LangevinError {
    #[error("linearized Langevin system is singular (determinant {determinant:e})")]
    SingularSystem { determinant: f64 },
    #[error("frequency denominator vanishes (ω = −ω_k or ω = −ω_q with κ = 0)")]
    DegenerateFrequency,
    #[error("entanglement metric undefined: n_q·n_k = 0")]
    UndefinedMetric,
}

impl LangevinError {
    /// Short machine-readable reason code.
    pub fn code(&self) -> &'static str {
        match self {
            LangevinError::SingularSystem { .. } => "singular_system",
            LangevinError::DegenerateFrequency => "degenerate_frequency",
            LangevinError::UndefinedMetric => "undefined_metric",
        }
    }
}

/// One evaluation point of the Fourier-domain system. All frequencies in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LangevinPoint<T> {
    /// Sweeping frequency.
    pub omega: T,
    pub omega_q: T,
    pub omega_k: T,
    pub g_k: T,
    pub kappa: T,
    /// Thermal input photon number.
    pub n_in: T,
}

impl<T: Real> LangevinPoint<T> {
    pub fn d_q(&self) -> T {
        let w = self.omega_q + self.omega;
        w * w + self.kappa * self.kappa / T::lit(4.0)
    }

    pub fn d_k(&self) -> T {
        let w = self.omega_k + self.omega;
        w * w
    }

    fn denominators(&self) -> Result<(T, T), LangevinError> {
        let (d_q, d_k) = (self.d_q(), self.d_k());
        if d_q <= T::zero() || d_k <= T::zero() {
            return Err(LangevinError::DegenerateFrequency);
        }
        Ok((d_q, d_k))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonNumbers<T> {
    pub n_q: T,
    pub n_k: T,
    pub n_in: T,
    /// `1 − 4g⁴/(D_q·D_k)`.
    pub determinant: T,
}

/// Solves the photon-number balance by Cramer's rule.
pub fn photon_numbers<T: Real>(p: &LangevinPoint<T>) -> Result<PhotonNumbers<T>, LangevinError> {
    let (d_q, d_k) = p.denominators()?;
    let g2 = p.g_k * p.g_k;
    // Off-diagonal magnitudes of the system matrix.
    let a = T::two() * g2 / d_q;
    let b = T::two() * g2 / d_k;
    let determinant = T::one() - a * b;
    if determinant.abs() < T::lit(SINGULARITY_THRESHOLD) {
        return Err(LangevinError::SingularSystem { determinant: determinant.to_f64().unwrap_or(f64::NAN) });
    }
    let r_q = (g2 + T::two() * p.kappa * p.n_in) / d_q;
    let r_k = g2 / d_k;
    Ok(PhotonNumbers {
        n_q: (r_q + a * r_k) / determinant,
        n_k: (r_k + b * r_q) / determinant,
        n_in: p.n_in,
        determinant,
    })
}

/// The single-expression qubit photon number
/// `(g⁴ + 4κ²n_in + 2g⁴/D_k) / (D_q − 4g⁴/D_k)`, evaluated as written.
pub fn photon_numbers_closed_form<T: Real>(p: &LangevinPoint<T>) -> Result<T, LangevinError> {
    let (d_q, d_k) = p.denominators()?;
    let g2 = p.g_k * p.g_k;
    // Numerator and denominator both divided by D_q to keep g⁴ in range.
    let x = g2 / d_q;
    let four = T::lit(4.0);
    let den = T::one() - four * x * (g2 / d_k);
    if den.abs() < T::lit(SINGULARITY_THRESHOLD) {
        return Err(LangevinError::SingularSystem { determinant: den.to_f64().unwrap_or(f64::NAN) });
    }
    let num = g2 * x + four * p.kappa * p.kappa * p.n_in / d_q + T::two() * g2 * x / d_k;
    Ok(num / den)
}

/// Side-by-side values of the canonical solve and the closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormComparison<T> {
    pub canonical: T,
    pub closed_form: T,
    /// `closed_form / canonical`; `None` when the canonical value is zero.
    pub ratio: Option<T>,
}

pub fn compare_closed_form<T: Real>(p: &LangevinPoint<T>) -> Result<ClosedFormComparison<T>, LangevinError> {
    let canonical = photon_numbers(p)?.n_q;
    let closed_form = photon_numbers_closed_form(p)?;
    let ratio = (canonical != T::zero()).then(|| closed_form / canonical);
    Ok(ClosedFormComparison { canonical, closed_form, ratio })
}

/// Coefficients of an operator on the input noise `(a_in(ω), a_in(ω)†)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseExpansion<T> {
    pub a_in: Complex<T>,
    pub a_in_dag: Complex<T>,
}

impl<T: Real> NoiseExpansion<T> {
    fn scale(self, s: Complex<T>) -> Self {
        Self { a_in: self.a_in * s, a_in_dag: self.a_in_dag * s }
    }

    fn add(self, o: Self) -> Self {
        Self { a_in: self.a_in + o.a_in, a_in_dag: self.a_in_dag + o.a_in_dag }
    }

    /// Expansion of the Hermitian conjugate operator.
    pub fn adjoint(self) -> Self {
        Self { a_in: self.a_in_dag.conj(), a_in_dag: self.a_in.conj() }
    }
}

/// Linear response of the four mode operators at one sweeping frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Response<T> {
    pub a: NoiseExpansion<T>,
    pub a_dag: NoiseExpansion<T>,
    pub b: NoiseExpansion<T>,
    pub b_dag: NoiseExpansion<T>,
}

/// Eliminates `b_k = −g/(ω_k+ω)·(a − a†)` from the qubit equation and
/// expresses every operator through the input noise.
pub fn linear_response<T: Real>(p: &LangevinPoint<T>) -> Result<Response<T>, LangevinError> {
    let (d_q, _) = p.denominators()?;
    let w = p.omega_q + p.omega;
    let chi = Complex::new(p.kappa / T::two(), w).inv();
    let beta = p.g_k / (p.omega_k + p.omega);
    let den = T::one() - T::lit(4.0) * p.g_k * beta * w / d_q;
    if den.abs() < T::lit(SINGULARITY_THRESHOLD) {
        return Err(LangevinError::SingularSystem { determinant: den.to_f64().unwrap_or(f64::NAN) });
    }
    let drive = (T::two() * p.kappa).sqrt();
    let zero = Complex::new(T::zero(), T::zero());
    let a_in = NoiseExpansion { a_in: Complex::new(T::one(), T::zero()), a_in_dag: zero };
    let a_in_dag = NoiseExpansion { a_in: zero, a_in_dag: Complex::new(T::one(), T::zero()) };

    // d = a − a†
    let d = a_in
        .scale(chi)
        .add(a_in_dag.scale(-chi.conj()))
        .scale(Complex::new(drive / den, T::zero()));
    let feedback = Complex::new(T::zero(), T::two() * p.g_k * beta);
    let a = d.scale(feedback * chi).add(a_in.scale(chi * drive));
    let a_dag = d.scale(feedback * chi.conj()).add(a_in_dag.scale(chi.conj() * drive));
    let b = d.scale(Complex::new(-beta, T::zero()));
    let b_dag = d.scale(Complex::new(beta, T::zero()));
    Ok(Response { a, a_dag, b, b_dag })
}

/// Stationary thermal correlator `⟨x(ω) y(ω')⟩` of the input noise.
///
/// Only equal-frequency pairs correlate; phase-sensitive pairs never do.
fn input_correlator<T: Real>(x_dag: bool, y_dag: bool, same_frequency: bool, n_in: T) -> T {
    match (x_dag, y_dag, same_frequency) {
        (false, true, true) => n_in + T::one(),
        (true, false, true) => n_in,
        _ => T::zero(),
    }
}

/// Phase-sensitive cross-correlation `⟨a b_k⟩`.
///
/// A stationary product pairs `a(ω)` with `b_k(−ω)`. Each term of the
/// contraction is weighted by an input correlator; when every weight
/// vanishes the response at the partner frequency is never evaluated.
pub fn cross_correlation<T: Real>(p: &LangevinPoint<T>) -> Result<Complex<T>, LangevinError> {
    let partner = LangevinPoint { omega: -p.omega, ..*p };
    let same = partner.omega == p.omega;
    let pairs = [(false, false), (false, true), (true, false), (true, true)];
    let weights: Vec<_> = pairs
        .iter()
        .map(|&(x, y)| ((x, y), input_correlator(x, y, same, p.n_in)))
        .filter(|(_, w)| *w != T::zero())
        .collect();
    let mut total = Complex::new(T::zero(), T::zero());
    if weights.is_empty() {
        return Ok(total);
    }
    let a = linear_response(p)?.a;
    let b = linear_response(&partner)?.b;
    for ((x, y), w) in weights {
        let cx = if x { a.a_in_dag } else { a.a_in };
        let cy = if y { b.a_in_dag } else { b.a_in };
        total = total + cx * cy * w;
    }
    Ok(total)
}

/// `|⟨a b_k⟩| / √(n_q·n_k)`.
pub fn entanglement_metric<T: Real>(p: &LangevinPoint<T>) -> Result<T, LangevinError> {
    let n = photon_numbers(p)?;
    if !(n.n_q > T::zero() && n.n_k > T::zero()) {
        return Err(LangevinError::UndefinedMetric);
    }
    Ok(cross_correlation(p)?.norm() / (n.n_q * n.n_k).sqrt())
}
