//! Randomized structural checks. Each property is an exact mathematical
//! consequence of the definitions (symmetry, conjugation, algebraic
//! identity), so failures indicate implementation bugs, not loose tolerances.

use dp3::asymptotics::{correction_envelope, oscillatory_correction};
use dp3::dynamics::{backlund_minus, backlund_plus, ddu_at, f_value, f_value_log_form};
use dp3::gamma::log_gamma;
use dp3::integrate::{integrate, IntegratorConfig};
use dp3::model::ModelError;
use dp3::series::build_series;
use dp3::{make_params, SolutionPoint};
use num_complex::Complex64;
use proptest::prelude::*;

proptest! {
    #[test]
    fn valid_special_parameters_are_accepted(a in -50.0..-0.001f64, b in 0.001..100.0f64) {
        let p = make_params(a, b, 1, true).unwrap();
        prop_assert_eq!(p.a(), a);
        prop_assert_eq!(p.b(), b);
        prop_assert_eq!(p.c1(), -b / (2.0 * a));
        prop_assert_eq!(p.a_plus(), p.a_minus().conj());
    }

    #[test]
    fn nonnegative_a_is_rejected_in_special_mode(a in 0.0..10.0f64, b in 0.001..10.0f64) {
        let rejected = matches!(
            make_params(a, b, 1, true),
            Err(ModelError::SpecialModeViolation { .. })
        );
        prop_assert!(rejected, "a = {a} slipped through");
    }

    #[test]
    fn nonpositive_b_is_rejected(a in -10.0..-0.01f64, b in -10.0..=0.0f64) {
        prop_assert!(matches!(make_params(a, b, 1, true), Err(ModelError::InvalidB(_))));
    }

    #[test]
    fn vector_field_is_odd_under_reflection(
        a in -10.0..-0.01f64,
        b in 0.001..1.0f64,
        tau in 0.05..20.0f64,
        u in 1e-6..5.0f64,
        du in -5.0..5.0f64,
    ) {
        // If u(τ) solves the equation then so does −u(−τ); infinitesimally
        // that is u''(−τ, −u, du) = −u''(τ, u, du), and every term of the
        // right-hand side negates exactly in floating point as well.
        let p = make_params(a, b, 1, true).unwrap();
        prop_assert_eq!(ddu_at(&p, -tau, -u, du), -ddu_at(&p, tau, u, du));
    }

    #[test]
    fn backlund_images_are_complex_conjugates(
        a in -10.0..-0.01f64,
        b in 0.001..1.0f64,
        tau in 0.1..30.0f64,
        u in 1e-4..5.0f64,
        du in -2.0..2.0f64,
    ) {
        // Real input data and conjugate parameters a ± i force u₊ = conj(u₋).
        let p = make_params(a, b, 1, true).unwrap();
        let s = SolutionPoint::new(tau, u, du).unwrap();
        let (up, um) = match (backlund_plus(&p, &s), backlund_minus(&p, &s)) {
            (Ok(up), Ok(um)) => (up, um),
            _ => return Ok(()), // degenerate denominator: nothing to compare
        };
        prop_assert!(
            (up - um.conj()).norm() <= 1e-12 * (1.0 + up.norm()),
            "u+ = {}, conj(u-) = {}", up, um.conj()
        );
    }

    #[test]
    fn product_and_log_forms_of_f_agree(
        a in -10.0..-0.01f64,
        b in 0.001..1.0f64,
        tau in 0.1..30.0f64,
        u in 1e-4..5.0f64,
        du in -2.0..2.0f64,
    ) {
        let p = make_params(a, b, 1, true).unwrap();
        let s = SolutionPoint::new(tau, u, du).unwrap();
        let (direct, via_logs) = match (f_value(&p, &s), f_value_log_form(&p, &s)) {
            (Ok(x), Ok(y)) => (x, y),
            _ => return Ok(()),
        };
        prop_assert!(
            (direct - via_logs).norm() <= 1e-10 * (1.0 + direct.norm()),
            "product form {}, log form {}", direct, via_logs
        );
    }

    #[test]
    fn envelope_bounds_the_oscillatory_correction(
        a in -10.0..-0.02f64,
        b in 0.001..1.0f64,
        tau in 0.5..100.0f64,
    ) {
        let p = make_params(a, b, 1, true).unwrap();
        let corr = oscillatory_correction(&p, tau).abs();
        let env = correction_envelope(&p, tau);
        prop_assert!(corr <= env * (1.0 + 1e-12), "|corr| = {corr:e} > envelope = {env:e}");
    }

    #[test]
    fn log_gamma_satisfies_the_recurrence(re in 0.05..15.0f64, im in -15.0..15.0f64) {
        let z = Complex64::new(re, im);
        let lhs = log_gamma(z + 1.0).unwrap();
        let rhs = log_gamma(z).unwrap() + z.ln();
        prop_assert!(
            (lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()),
            "ln Γ(z+1) = {lhs}, ln Γ(z) + Log z = {rhs}"
        );
    }

    #[test]
    fn series_solution_is_odd_to_the_bit(
        a in -10.0..-0.05f64,
        b in 0.005..1.0f64,
        frac in 0.01..0.8f64,
    ) {
        let p = make_params(a, b, 1, true).unwrap();
        let series = build_series(&p, 10).unwrap();
        let tau = frac * series.radius_estimate();
        let (u_pos, du_pos) = series.eval_u(tau).unwrap();
        let (u_neg, du_neg) = series.eval_u(-tau).unwrap();
        prop_assert_eq!(u_neg, -u_pos);
        prop_assert_eq!(du_neg, du_pos);
    }

    #[test]
    fn series_integrals_keep_the_exact_proportionality(
        a in -10.0..-0.05f64,
        b in 0.005..1.0f64,
        frac in 0.01..0.6f64,
    ) {
        let p = make_params(a, b, 1, true).unwrap();
        let series = build_series(&p, 10).unwrap();
        let tau0 = frac * series.radius_estimate();
        let (i1, i2) = series.eval_integrals(tau0).unwrap();
        prop_assert_eq!(i2.re, b / 8.0 * i1);
    }
}

proptest! {
    // Full integrations are comparatively slow; a handful of cases is enough
    // to exercise parameter dependence without dominating the test run.
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]
    #[test]
    fn short_integrations_preserve_the_quadrature_identity(
        a in -6.0..-0.05f64,
        b in 0.01..0.5f64,
        tau_max in 1.0..4.0f64,
    ) {
        let p = make_params(a, b, 1, true).unwrap();
        let series = build_series(&p, 12).unwrap();
        let tau0 = series.recommended_tau0(0.1);
        let cfg = IntegratorConfig {
            rtol: 1e-8,
            atol: 1e-10,
            ..IntegratorConfig::default()
        };
        let traj = integrate(&p, &series, tau0, tau_max, &cfg).unwrap();
        let end = traj.end();
        prop_assert!(end.point.u > 0.0);
        let defect = end.re_i2_identity_defect(&p).abs();
        prop_assert!(
            defect <= 1e-7 * (1.0 + end.i1.abs()),
            "Re I2 defect {defect:e} at tau = {tau_max}"
        );
    }
}
