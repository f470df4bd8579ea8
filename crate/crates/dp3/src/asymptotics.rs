//! Closed-form large-τ behaviour of the solution and of both integrals.
//!
//! Everything here is an explicit function of (a, b, τ). The natural
//! variable is z = (bτ²)^(1/3): the solution settles onto the arc
//! u ≈ z²/(2τ) = (b^(2/3)/2)·τ^(1/3), I₁ grows like 3z + 2a·ln z + const,
//! and Im I₂ like (b/8)(ln z − ln(−a)). Superimposed on the arc is a slowly
//! decaying oscillation
//!
//!   −(2q/√x)·cos(3x + q²·ln(3x) + φ₀),   x = √3·z,
//!
//! whose amplitude q = sqrt(−ln(1−e^(2πa))/(2π)) is exponentially small in
//! |a|: prominent for a = −1/8, far below double precision visibility for
//! a = −8. The phase constant φ₀ involves the argument of Γ(iq²), supplied
//! by the gamma module.

use crate::gamma::{arg_gamma_continuous, arg_gamma_iq2};
use crate::model::Params;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, LN_2, PI};

/// Scale, amplitude, and phase constant of the oscillatory term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectionInputs {
    pub x: f64,
    pub q: f64,
    pub phi0: f64,
}

fn ln_2_plus_sqrt3() -> f64 {
    (2.0 + 3.0_f64.sqrt()).ln()
}

fn q_squared(a: f64) -> f64 {
    // −ln(1 − e^{2πa})/(2π); ln_1p keeps full precision when e^{2πa} is
    // far below 1 (large |a|).
    -(-(2.0 * PI * a).exp()).ln_1p() / (2.0 * PI)
}

/// z = (bτ²)^(1/3).
fn scale_z(p: &Params, tau: f64) -> f64 {
    (p.b() * tau * tau).cbrt()
}

pub fn correction_inputs(p: &Params, tau: f64) -> CorrectionInputs {
    let a = p.a();
    let q2 = q_squared(a);
    let x = 3.0_f64.sqrt() * scale_z(p, tau);
    let arg = arg_gamma_iq2(q2).expect("q² > 0 for a < 0");
    let phi0 = a * ln_2_plus_sqrt3() + q2 * 12.0_f64.ln() - FRAC_PI_4 - arg;
    CorrectionInputs {
        x,
        q: q2.sqrt(),
        phi0,
    }
}

/// Large-τ closed form of I₁.
pub fn i1_asymptotic(p: &Params, tau: f64) -> f64 {
    let a = p.a();
    let z = scale_z(p, tau);
    3.0 * z + 2.0 * a * z.ln() - ln_2_plus_sqrt3() / PI * (-(2.0 * PI * a).exp()).ln_1p()
        - FRAC_PI_2
        - 2.0 * arg_gamma_continuous(a)
}

/// The decaying oscillation about the leading arc:
/// −(2q/√x)·cos(3x + q²ln(3x) + φ₀).
pub fn oscillatory_correction(p: &Params, tau: f64) -> f64 {
    let ci = correction_inputs(p, tau);
    let q2 = ci.q * ci.q;
    -(2.0 * ci.q / ci.x.sqrt()) * (3.0 * ci.x + q2 * (3.0 * ci.x).ln() + ci.phi0).cos()
}

/// Envelope 2q/√x of the oscillation — the amplitude the correction cannot
/// exceed at the given τ.
pub fn correction_envelope(p: &Params, tau: f64) -> f64 {
    let ci = correction_inputs(p, tau);
    2.0 * ci.q / ci.x.sqrt()
}

/// Large-τ form of ln(u/τ), optionally with the oscillatory term.
pub fn ln_u_over_tau_asymptotic(p: &Params, tau: f64, with_correction: bool) -> f64 {
    let lead = 2.0 / 3.0 * (p.b().ln() - tau.ln()) - LN_2;
    if with_correction {
        lead + oscillatory_correction(p, tau)
    } else {
        lead
    }
}

/// τ → 0 limit of ln(u/τ): ln b − ln(−a) − ln 2, i.e. ln u′(0).
pub fn limit_ln_u_over_tau_at_zero(p: &Params) -> f64 {
    p.b().ln() - (-p.a()).ln() - LN_2
}

/// Large-τ closed form of Im I₂, optionally with the oscillatory term
/// (which enters with a minus sign relative to ln(u/τ)).
pub fn im_i2_asymptotic(p: &Params, tau: f64, with_correction: bool) -> f64 {
    let (a, b) = (p.a(), p.b());
    let mut v = scale_z(p, tau).ln() - (-a).ln();
    if with_correction {
        v -= oscillatory_correction(p, tau);
    }
    b / 8.0 * v
}

/// Large-τ closed form of Re I₂: exactly (b/8) times the I₁ form.
pub fn re_i2_asymptotic(p: &Params, tau: f64) -> f64 {
    p.b() / 8.0 * i1_asymptotic(p, tau)
}

/// The smooth arc u ≈ (b^(2/3)/2)·τ^(1/3), optionally modulated by the
/// oscillation.
pub fn u_asymptotic(p: &Params, tau: f64, with_correction: bool) -> f64 {
    tau * ln_u_over_tau_asymptotic(p, tau, with_correction).exp()
}
