//! Shared domain types: equation parameters, phase-space points, augmented
//! quadrature states, and comparison reports.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("b must be positive and finite, got {0}")]
    InvalidB(f64),
    #[error("special-solution mode requires a < 0 and epsilon = +1 (a = {a}, epsilon = {epsilon})")]
    SpecialModeViolation { a: f64, epsilon: i8 },
    #[error("non-finite {what}: {value}")]
    NonFinite { what: &'static str, value: f64 },
    #[error("epsilon must be +1 or -1, got {0}")]
    InvalidEpsilon(i8),
    #[error("tau must be positive and finite, got {0}")]
    InvalidTau(f64),
}

/// Parameters (a, b, ε) of the degenerate Painlevé III equation
///
///   u'' = (u')²/u − u'/τ + (−8εu² + 2ab)/τ + b²/u,
///
/// with `special` marking the regime (a < 0 real, b > 0, ε = +1) in which the
/// odd solution vanishing at the origin exists, stays positive and pole-free
/// on τ > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    a: f64,
    b: f64,
    epsilon: f64,
    special: bool,
}

/// Validating constructor for [`Params`]; `special = true` additionally
/// enforces a < 0 and ε = +1.
pub fn make_params(a: f64, b: f64, epsilon: i8, special: bool) -> Result<Params, ModelError> {
    if !a.is_finite() {
        return Err(ModelError::NonFinite { what: "a", value: a });
    }
    if !(b.is_finite() && b > 0.0) {
        return Err(ModelError::InvalidB(b));
    }
    if epsilon != 1 && epsilon != -1 {
        return Err(ModelError::InvalidEpsilon(epsilon));
    }
    if special && (a >= 0.0 || epsilon != 1) {
        return Err(ModelError::SpecialModeViolation { a, epsilon });
    }
    Ok(Params {
        a,
        b,
        epsilon: f64::from(epsilon),
        special,
    })
}

impl Params {
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// ε as ±1.0, ready for arithmetic.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn is_special(&self) -> bool {
        self.special
    }

    /// Slope of the odd solution at the origin, c₁ = u'(0) = −b/(2a).
    pub fn c1(&self) -> f64 {
        -self.b / (2.0 * self.a)
    }

    /// Parameter of the raised equation, a + i.
    pub fn a_plus(&self) -> Complex64 {
        Complex64::new(self.a, 1.0)
    }

    /// Parameter of the lowered equation, a − i.
    pub fn a_minus(&self) -> Complex64 {
        Complex64::new(self.a, -1.0)
    }
}

/// A real phase point (τ, u, u') of the second-order equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionPoint {
    pub tau: f64,
    pub u: f64,
    pub du: f64,
}

impl SolutionPoint {
    pub fn new(tau: f64, u: f64, du: f64) -> Result<Self, ModelError> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(ModelError::InvalidTau(tau));
        }
        if !u.is_finite() {
            return Err(ModelError::NonFinite { what: "u", value: u });
        }
        if !du.is_finite() {
            return Err(ModelError::NonFinite {
                what: "du",
                value: du,
            });
        }
        Ok(SolutionPoint { tau, u, du })
    }
}

/// Phase point plus the two running integrals accumulated from the origin:
/// `i1` = ∫₀^τ (2a/s + b/u(s)) ds and `i2` = ∫₀^τ f(s)/s ds, where
/// f = u₊·u. The real part of `i2` equals (b/8)·`i1` identically; the
/// integrator keeps both so the identity doubles as an error oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AugmentedState {
    pub point: SolutionPoint,
    pub i1: f64,
    pub i2: Complex64,
}

impl AugmentedState {
    pub fn new(point: SolutionPoint, i1: f64, i2: Complex64) -> Result<Self, ModelError> {
        if !i1.is_finite() {
            return Err(ModelError::NonFinite {
                what: "i1",
                value: i1,
            });
        }
        if !i2.re.is_finite() || !i2.im.is_finite() {
            return Err(ModelError::NonFinite {
                what: "i2",
                value: if i2.re.is_finite() { i2.im } else { i2.re },
            });
        }
        Ok(AugmentedState { point, i1, i2 })
    }

    /// Signed defect of the exact identity Re I₂ = (b/8)·I₁.
    pub fn re_i2_identity_defect(&self, p: &Params) -> f64 {
        self.i2.re - p.b() / 8.0 * self.i1
    }
}

/// One row of a numeric-versus-asymptotic comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticReport {
    pub tau: f64,
    pub numeric: f64,
    pub asymptotic_leading: f64,
    pub asymptotic_with_correction: Option<f64>,
    /// |numeric − target| where target is the corrected value when present,
    /// otherwise the leading one.
    pub abs_residual: f64,
    /// abs_residual / |numeric| (0 when numeric = 0).
    pub rel_residual: f64,
}

impl AsymptoticReport {
    pub fn new(
        tau: f64,
        numeric: f64,
        asymptotic_leading: f64,
        asymptotic_with_correction: Option<f64>,
    ) -> Self {
        let target = asymptotic_with_correction.unwrap_or(asymptotic_leading);
        let abs_residual = (numeric - target).abs();
        let rel_residual = if numeric != 0.0 {
            abs_residual / numeric.abs()
        } else {
            0.0
        };
        AsymptoticReport {
            tau,
            numeric,
            asymptotic_leading,
            asymptotic_with_correction,
            abs_residual,
            rel_residual,
        }
    }
}
