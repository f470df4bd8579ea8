//! Complex log-Gamma and the two argument conventions used by the large-τ
//! asymptotic formulas.
//!
//! The core is a Lanczos approximation (Godfrey's g = 607/128, 15-term
//! coefficient set, ~15 significant digits on the right half-plane) with a
//! recurrence ascent for Re z < 1. The continuous argument Arg Γ(1+ai) is the
//! imaginary part of the principal log-Gamma, which is analytic — hence
//! continuous in a — because 1+ai never leaves the right half-plane.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialFnError {
    #[error("gamma pole at z = {0}")]
    PoleOfGamma(f64),
    #[error("q^2 must be positive and finite, got {0}")]
    NonPositiveQ2(f64),
    #[error("non-finite argument ({re}, {im})")]
    NonFiniteZ { re: f64, im: f64 },
}

/// Lanczos g parameter, 607/128.
const G: f64 = 4.7421875;

/// Godfrey's 15-term coefficient set for g = 607/128.
const LANCZOS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_746,
    -0.491_913_816_097_620_2,
    3.399_464_998_481_189e-5,
    4.652_362_892_704_858e-5,
    -9.837_447_530_487_956e-5,
    1.580_887_032_249_125e-4,
    -2.102_644_417_241_049e-4,
    2.174_396_181_152_126e-4,
    -1.643_181_065_367_639e-4,
    8.441_822_398_385_275e-5,
    -2.619_083_840_158_141e-5,
    3.689_918_265_953_162e-6,
];

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Lanczos core, valid for Re z >= 1 (callers shift first).
fn ln_gamma_core(z: Complex64) -> Complex64 {
    let zz = z - 1.0;
    let mut s = Complex64::new(LANCZOS[0], 0.0);
    for (k, &c) in LANCZOS.iter().enumerate().skip(1) {
        s += c / (zz + k as f64);
    }
    let t = zz + (G + 0.5);
    (SQRT_2PI * s).ln() + (zz + 0.5) * t.ln() - t
}

/// Principal log-Gamma: analytic on the plane cut along (−∞, 0], real on the
/// positive real axis. For Re z < 1 the value is obtained through
/// ln Γ(z) = ln Γ(z+m) − Σ_{k<m} Log(z+k).
pub fn log_gamma(z: Complex64) -> Result<Complex64, SpecialFnError> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(SpecialFnError::NonFiniteZ { re: z.re, im: z.im });
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.floor() {
        return Err(SpecialFnError::PoleOfGamma(z.re));
    }
    if z.re >= 1.0 {
        return Ok(ln_gamma_core(z));
    }
    let shifts = (1.0 - z.re).ceil() as usize;
    let mut log_prod = Complex64::new(0.0, 0.0);
    for k in 0..shifts {
        log_prod += (z + k as f64).ln();
    }
    Ok(ln_gamma_core(z + shifts as f64) - log_prod)
}

/// Arg Γ(1+ai) as a continuous function of real a, normalized by
/// Arg Γ(1) = 0. Coincides with the principal argument only while the latter
/// stays in (−π, π]; beyond that it keeps winding instead of jumping.
pub fn arg_gamma_continuous(a: f64) -> f64 {
    if !a.is_finite() {
        return f64::NAN;
    }
    // 1 + ai is never a pole, so the unwrap cannot fire.
    log_gamma(Complex64::new(1.0, a))
        .expect("1+ai is pole-free")
        .im
}

/// Principal argument of Γ(i·q²) for q² > 0, obtained by one recurrence step
/// off the imaginary axis: arg Γ(iq²) = Im ln Γ(1+iq²) − π/2. For the range
/// reachable from a < 0 (q² ≲ 0.9) the right side already lies in (−π, 0),
/// so it is the principal value.
pub fn arg_gamma_iq2(q2: f64) -> Result<f64, SpecialFnError> {
    if !(q2.is_finite() && q2 > 0.0) {
        return Err(SpecialFnError::NonPositiveQ2(q2));
    }
    Ok(log_gamma(Complex64::new(1.0, q2))?.im - std::f64::consts::FRAC_PI_2)
}
