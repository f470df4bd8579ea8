//! Adaptive integration of the augmented system
//!
//!   y = [u, u′, I₁, Re I₂, Im I₂],
//!
//! seeded from the origin series at τ₀ and advanced to τ_max with an
//! embedded Dormand–Prince 5(4) pair (Hairer–Nørsett–Wanner coefficients,
//! FSAL form) and its quartic dense-output interpolant. The two integral
//! components ride along as quadratures:
//!
//!   I₁′ = 2a/τ + b/u,   (Re I₂)′ = (εb/8)·I₁′,   (Im I₂)′ = (εb/8)(1/τ − u′/u).
//!
//! Positivity of u is part of the solution's definition on the real half
//! line, so any trial stage with u ≤ 0 is treated as a step failure; if
//! that persists down to the step floor the run aborts with `ZeroCrossing`
//! rather than continuing through a sign change the model forbids.

use crate::dynamics::ddu_at;
use crate::model::{AugmentedState, Params, SolutionPoint};
use crate::series::{OriginSeries, SeriesError};
use num_complex::Complex64;
use thiserror::Error;

const N: usize = 5;
type State = [f64; N];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrateError {
    #[error("integration requires special-solution parameters")]
    NotSpecialMode,
    #[error("invalid integration range [{tau0}, {tau_max}]")]
    BadRange { tau0: f64, tau_max: f64 },
    #[error("invalid integrator configuration: {0}")]
    BadConfig(String),
    #[error("pole guard tripped at tau = {tau}: |u| exceeded {guard:e}")]
    PoleEncountered { tau: f64, guard: f64 },
    #[error("solution forced below u = 0 near tau = {tau}")]
    ZeroCrossing { tau: f64 },
    #[error("step size underflow at tau = {tau} (h = {h:e})")]
    StepUnderflow { tau: f64, h: f64 },
    #[error("step budget of {max_steps} exhausted at tau = {tau}")]
    TooManySteps { tau: f64, max_steps: usize },
    #[error("invalid start state: {0}")]
    BadSeed(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    /// Relative error tolerance per step.
    pub rtol: f64,
    /// Absolute error tolerance per step.
    pub atol: f64,
    /// Hard cap on the step size; the integrator additionally caps h at
    /// 0.25·τ^(1/3) so the step stays small relative to the oscillation
    /// scale that develops at large τ.
    pub max_step: f64,
    /// Abort threshold on |u|.
    pub pole_guard: f64,
    /// Spacing of the returned sample grid.
    pub stride: f64,
    /// Abort threshold on the number of accepted + rejected steps.
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rtol: 1e-10,
            atol: 1e-12,
            max_step: f64::INFINITY,
            pole_guard: 1e8,
            stride: 0.05,
            max_steps: 1_000_000,
        }
    }
}

impl IntegratorConfig {
    fn validate(&self) -> Result<(), IntegrateError> {
        let bad = |msg: &str| Err(IntegrateError::BadConfig(msg.to_string()));
        if !(self.rtol > 0.0) || !self.rtol.is_finite() {
            return bad("rtol must be positive and finite");
        }
        if !(self.atol >= 0.0) || !self.atol.is_finite() {
            return bad("atol must be nonnegative and finite");
        }
        // atol = 0 with a very small rtol is allowed: the error norm may
        // then be unattainable, but that surfaces as StepUnderflow, not a
        // hang, so there is nothing to forbid here.
        if !(self.max_step > 0.0) {
            return bad("max_step must be positive");
        }
        if !(self.pole_guard > 0.0) {
            return bad("pole_guard must be positive");
        }
        if !(self.stride > 0.0) || !self.stride.is_finite() {
            return bad("stride must be positive and finite");
        }
        if self.max_steps == 0 {
            return bad("max_steps must be nonzero");
        }
        Ok(())
    }
}

/// One accepted step's dense-output data: the interpolant on
/// [t0, t0 + h] is y(θ) = c0 + θ(c1 + (1−θ)(c2 + θ(c3 + (1−θ)c4))).
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSegment {
    pub t0: f64,
    pub h: f64,
    pub cont: [[f64; N]; 5],
}

impl DenseSegment {
    pub fn eval(&self, theta: f64) -> State {
        let c = &self.cont;
        let mut y = [0.0; N];
        for i in 0..N {
            y[i] = c[0][i]
                + theta
                    * (c[1][i]
                        + (1.0 - theta) * (c[2][i] + theta * (c[3][i] + (1.0 - theta) * c[4][i])));
        }
        y
    }

    /// d y / dτ of the interpolant (divides the θ-derivative by h).
    pub fn eval_derivative(&self, theta: f64) -> State {
        let c = &self.cont;
        let t = theta;
        let mut d = [0.0; N];
        for i in 0..N {
            d[i] = (c[1][i]
                + (1.0 - 2.0 * t) * c[2][i]
                + (2.0 * t - 3.0 * t * t) * c[3][i]
                + (2.0 * t - 6.0 * t * t + 4.0 * t * t * t) * c[4][i])
                / self.h;
        }
        d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IntegrationStats {
    pub n_accepted: usize,
    pub n_rejected: usize,
    pub n_rhs_evals: usize,
    /// Largest tolerance-scaled defect |P′(τ) − f(τ, P(τ))|·h observed when
    /// spot-checking the interpolant at sample points; a self-diagnostic,
    /// not an error bound.
    pub max_interp_defect: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    samples: Vec<AugmentedState>,
    segments: Vec<DenseSegment>,
    end: AugmentedState,
    stats: IntegrationStats,
}

impl Trajectory {
    pub fn samples(&self) -> &[AugmentedState] {
        &self.samples
    }

    pub fn segments(&self) -> &[DenseSegment] {
        &self.segments
    }

    /// The exact terminal state of the run (not interpolated).
    pub fn end(&self) -> &AugmentedState {
        &self.end
    }

    pub fn stats(&self) -> &IntegrationStats {
        &self.stats
    }

    pub fn tau_range(&self) -> (f64, f64) {
        (self.segments[0].t0, self.end.point.tau)
    }

    /// Dense-output evaluation anywhere inside the integrated range.
    pub fn sample_at(&self, tau: f64) -> Option<AugmentedState> {
        let (t_start, t_end) = self.tau_range();
        let slack = 1e-9 * t_end.max(1.0);
        if !(tau >= t_start - slack && tau <= t_end + slack) {
            return None;
        }
        let idx = self
            .segments
            .partition_point(|s| s.t0 + s.h < tau)
            .min(self.segments.len() - 1);
        let seg = &self.segments[idx];
        let theta = ((tau - seg.t0) / seg.h).clamp(0.0, 1.0);
        let y = seg.eval(theta);
        Some(state_to_augmented(tau.clamp(t_start, t_end), &y))
    }
}

fn state_to_augmented(tau: f64, y: &State) -> AugmentedState {
    AugmentedState {
        point: SolutionPoint {
            tau,
            u: y[0],
            du: y[1],
        },
        i1: y[2],
        i2: Complex64::new(y[3], y[4]),
    }
}

/// Integrates from the series seed at τ₀ up to τ_max.
pub fn integrate(
    p: &Params,
    series: &OriginSeries,
    tau0: f64,
    tau_max: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory, IntegrateError> {
    if !(tau0 > 0.0 && tau_max > tau0 && tau_max.is_finite()) {
        return Err(IntegrateError::BadRange { tau0, tau_max });
    }
    let (u, du) = series.eval_u(tau0)?;
    let (i1, i2) = series.eval_integrals(tau0)?;
    let seed = AugmentedState {
        point: SolutionPoint { tau: tau0, u, du },
        i1,
        i2,
    };
    integrate_from(p, &seed, tau_max, cfg)
}

/// Integrates from an explicit augmented state. The seed is taken at face
/// value; it is the caller's job to supply one on the solution manifold if
/// the invariants of the special solution are to hold downstream.
pub fn integrate_from(
    p: &Params,
    seed: &AugmentedState,
    tau_max: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory, IntegrateError> {
    cfg.validate()?;
    if !p.is_special() {
        return Err(IntegrateError::NotSpecialMode);
    }
    let tau0 = seed.point.tau;
    if !(tau0 > 0.0 && tau_max > tau0 && tau_max.is_finite()) {
        return Err(IntegrateError::BadRange { tau0, tau_max });
    }
    if !(seed.point.u > 0.0) || !seed.point.du.is_finite() {
        return Err(IntegrateError::BadSeed(format!(
            "need finite state with u > 0 at tau0, got u = {}, du = {}",
            seed.point.u, seed.point.du
        )));
    }

    let y0: State = [
        seed.point.u,
        seed.point.du,
        seed.i1,
        seed.i2.re,
        seed.i2.im,
    ];
    let mut core = Core::new(p, cfg);
    let segments = core.run(tau0, y0, tau_max)?;

    // Fixed-stride sample grid, built from the dense output.
    let mut samples = Vec::new();
    let mut max_defect = 0.0_f64;
    let t_end = segments.last().map(|s| s.t0 + s.h).unwrap_or(tau_max);
    let mut j = 0_u64;
    loop {
        let tau = tau0 + j as f64 * cfg.stride;
        if tau > t_end * (1.0 + 1e-12) {
            break;
        }
        let tau = tau.min(t_end);
        let idx = segments
            .partition_point(|s| s.t0 + s.h < tau)
            .min(segments.len() - 1);
        let seg = &segments[idx];
        let theta = ((tau - seg.t0) / seg.h).clamp(0.0, 1.0);
        let y = seg.eval(theta);
        if let Ok(f) = derivative(p, tau, &y) {
            let d = seg.eval_derivative(theta);
            let mut defect = 0.0_f64;
            for i in 0..N {
                let sc = cfg.atol + cfg.rtol * y[i].abs();
                defect = defect.max((d[i] - f[i]).abs() * seg.h / sc);
            }
            max_defect = max_defect.max(defect);
        }
        samples.push(state_to_augmented(tau, &y));
        j += 1;
    }

    let end_seg = segments.last().unwrap();
    let end = state_to_augmented(end_seg.t0 + end_seg.h, &end_seg.eval(1.0));
    let mut stats = core.stats;
    stats.max_interp_defect = max_defect;
    Ok(Trajectory {
        samples,
        segments,
        end,
        stats,
    })
}

/// Augmented vector field. Fails (for step control) when u is nonpositive
/// or the state has gone nonfinite.
fn derivative(p: &Params, tau: f64, y: &State) -> Result<State, ()> {
    let (u, du) = (y[0], y[1]);
    if !(u > 0.0) || !du.is_finite() {
        return Err(());
    }
    let (a, b, eps) = (p.a(), p.b(), p.epsilon());
    let phi = 2.0 * a / tau + b / u;
    let q = eps * b / 8.0;
    Ok([
        du,
        ddu_at(p, tau, u, du),
        phi,
        q * phi,
        q * (1.0 / tau - du / u),
    ])
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
// Difference between the 5th- and 4th-order solutions.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Dense-output weights for the quartic interpolant.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

struct Core<'a> {
    p: &'a Params,
    cfg: &'a IntegratorConfig,
    stats: IntegrationStats,
}

impl<'a> Core<'a> {
    fn new(p: &'a Params, cfg: &'a IntegratorConfig) -> Self {
        Core {
            p,
            cfg,
            stats: IntegrationStats::default(),
        }
    }

    fn eval(&mut self, tau: f64, y: &State) -> Result<State, ()> {
        self.stats.n_rhs_evals += 1;
        derivative(self.p, tau, y)
    }

    fn h_cap(&self, t: f64) -> f64 {
        self.cfg.max_step.min(0.25 * t.cbrt())
    }

    fn h_floor(t: f64) -> f64 {
        1e-14 * t.abs().max(1.0)
    }

    fn run(&mut self, t0: f64, y0: State, t_end: f64) -> Result<Vec<DenseSegment>, IntegrateError> {
        let cfg = self.cfg;
        let mut t = t0;
        let mut y = y0;
        let mut comp = [0.0_f64; N]; // Kahan compensation for y
        let mut k1 = self
            .eval(t, &y)
            .map_err(|_| IntegrateError::ZeroCrossing { tau: t })?;
        let mut h = self.initial_step(t, &y, &k1, t_end);
        let mut segments = Vec::new();
        let mut rejected_last = false;
        let mut steps = 0_usize;

        while t < t_end {
            steps += 1;
            if steps > cfg.max_steps {
                return Err(IntegrateError::TooManySteps {
                    tau: t,
                    max_steps: cfg.max_steps,
                });
            }
            // A final sliver step down to t_end is always permitted, however
            // small; the floor only guards against tolerance-driven collapse.
            let capped = h.min(self.h_cap(t));
            let (h_try, last) = if t + capped >= t_end {
                (t_end - t, true)
            } else {
                (capped, false)
            };
            if !last && h_try < Self::h_floor(t) {
                return Err(IntegrateError::StepUnderflow { tau: t, h: h_try });
            }

            match self.try_step(t, &y, &k1, h_try) {
                Err(()) => {
                    // A trial stage left the admissible region (u ≤ 0 or
                    // nonfinite); shrink hard.
                    self.stats.n_rejected += 1;
                    rejected_last = true;
                    h = 0.5 * h_try;
                    if h < Self::h_floor(t) {
                        return Err(IntegrateError::ZeroCrossing { tau: t });
                    }
                }
                Ok(step) => {
                    if step.err > 1.0 {
                        self.stats.n_rejected += 1;
                        rejected_last = true;
                        h = h_try * factor(step.err, true);
                        continue;
                    }
                    // Accept: commit y via compensated summation.
                    let y_old = y;
                    for i in 0..N {
                        let dv = step.delta[i] - comp[i];
                        let s = y[i] + dv;
                        comp[i] = (s - y[i]) - dv;
                        y[i] = s;
                    }
                    segments.push(dense_segment(t, h_try, &y_old, &y, &step));
                    self.stats.n_accepted += 1;
                    let t_new = if last { t_end } else { t + h_try };

                    if y[0].abs() > cfg.pole_guard {
                        return Err(IntegrateError::PoleEncountered {
                            tau: t_new,
                            guard: cfg.pole_guard,
                        });
                    }
                    if !(y[0] > 0.0) {
                        return Err(IntegrateError::ZeroCrossing { tau: t_new });
                    }

                    t = t_new;
                    k1 = step.k7; // FSAL
                    h = h_try * factor(step.err, rejected_last);
                    rejected_last = false;
                }
            }
        }
        Ok(segments)
    }

    fn try_step(&mut self, t: f64, y: &State, k1: &State, h: f64) -> Result<StepResult, ()> {
        let mut ys = [0.0_f64; N];

        for i in 0..N {
            ys[i] = y[i] + h * A21 * k1[i];
        }
        let k2 = self.eval(t + C2 * h, &ys).map_err(|_| ())?;
        for i in 0..N {
            ys[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        let k3 = self.eval(t + C3 * h, &ys).map_err(|_| ())?;
        for i in 0..N {
            ys[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        let k4 = self.eval(t + C4 * h, &ys).map_err(|_| ())?;
        for i in 0..N {
            ys[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        let k5 = self.eval(t + C5 * h, &ys).map_err(|_| ())?;
        for i in 0..N {
            ys[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        let k6 = self.eval(t + h, &ys).map_err(|_| ())?;

        // 5th-order combination (also stage 7's argument).
        let mut delta = [0.0_f64; N];
        let mut y1 = [0.0_f64; N];
        for i in 0..N {
            delta[i] =
                h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
            y1[i] = y[i] + delta[i];
        }
        let k7 = self.eval(t + h, &y1).map_err(|_| ())?;

        let mut err_acc = 0.0_f64;
        for i in 0..N {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = self.cfg.atol + self.cfg.rtol * y[i].abs().max(y1[i].abs());
            err_acc += (e / sc) * (e / sc);
        }
        let err = (err_acc / N as f64).sqrt();
        if !err.is_finite() {
            return Err(());
        }
        Ok(StepResult {
            err,
            delta,
            k1: *k1,
            k3,
            k4,
            k5,
            k6,
            k7,
        })
    }

    /// Starting step size estimate (Hairer–Nørsett–Wanner's algorithm for a
    /// 5th-order method).
    fn initial_step(&mut self, t: f64, y: &State, f0: &State, t_end: f64) -> f64 {
        let cfg = self.cfg;
        let sc: Vec<f64> = y.iter().map(|v| cfg.atol + cfg.rtol * v.abs()).collect();
        let rms = |v: &State| -> f64 {
            let s: f64 = v.iter().zip(&sc).map(|(x, s)| (x / s) * (x / s)).sum();
            (s / N as f64).sqrt()
        };
        let d0 = rms(y);
        let d1 = rms(f0);
        let mut h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        h0 = h0.min(self.h_cap(t)).min(t_end - t);
        let mut y1 = [0.0_f64; N];
        for i in 0..N {
            y1[i] = y[i] + h0 * f0[i];
        }
        let h1 = match self.eval(t + h0, &y1) {
            Err(()) => h0 * 1e-2,
            Ok(f1) => {
                let mut diff = [0.0_f64; N];
                for i in 0..N {
                    diff[i] = f1[i] - f0[i];
                }
                let d2 = rms(&diff) / h0;
                if d1.max(d2) <= 1e-15 {
                    (h0 * 1e-3).max(1e-6)
                } else {
                    (0.01 / d1.max(d2)).powf(0.2)
                }
            }
        };
        (100.0 * h0).min(h1).min(self.h_cap(t)).min(t_end - t)
    }
}

struct StepResult {
    err: f64,
    delta: State,
    k1: State,
    k3: State,
    k4: State,
    k5: State,
    k6: State,
    k7: State,
}

fn factor(err: f64, after_rejection: bool) -> f64 {
    let raw = 0.9 * err.powf(-0.2);
    let hi = if after_rejection { 1.0 } else { 10.0 };
    raw.clamp(0.2, hi)
}

fn dense_segment(t0: f64, h: f64, y0: &State, y1: &State, s: &StepResult) -> DenseSegment {
    let mut cont = [[0.0_f64; N]; 5];
    for i in 0..N {
        let ydiff = y1[i] - y0[i];
        let bspl = h * s.k1[i] - ydiff;
        cont[0][i] = y0[i];
        cont[1][i] = ydiff;
        cont[2][i] = bspl;
        cont[3][i] = ydiff - h * s.k7[i] - bspl;
        cont[4][i] = h
            * (D1 * s.k1[i]
                + D3 * s.k3[i]
                + D4 * s.k4[i]
                + D5 * s.k5[i]
                + D6 * s.k6[i]
                + D7 * s.k7[i]);
    }
    DenseSegment { t0, h, cont }
}
