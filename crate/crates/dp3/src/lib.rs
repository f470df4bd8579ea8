//! Numerics for a family of odd solutions of the degenerate third Painlevé
//! equation
//!
//!   u″ = (u′)²/u − u′/τ + (−8εu² + 2ab)/τ + b²/u,
//!
//! in the parameter regime a < 0, b > 0, ε = +1, where a distinguished
//! solution vanishes at the origin with slope u′(0) = −b/(2a) and stays
//! positive and pole-free on the whole real half line. Alongside u the
//! library accumulates two integrals from the origin,
//!
//!   I₁(τ) = ∫₀^τ (2a/τ̃ + b/u) dτ̃,    I₂(τ) = ∫₀^τ f(τ̃)/τ̃ dτ̃,
//!
//! where f is the product of u with its raising transform, and compares
//! both against explicit large-τ formulas.
//!
//! Pipeline: [`series`] seeds (u, u′, I₁, I₂) near the singular origin from
//! the Taylor expansion, [`integrate`] advances the augmented system with
//! an adaptive embedded Runge–Kutta pair, [`dynamics`] supplies the vector
//! field plus the raising/lowering transforms and their algebraic
//! consistency checks, and [`asymptotics`] (backed by the complex
//! log-Gamma in [`gamma`]) provides the closed forms the results are
//! verified against. [`model`] holds the shared parameter and state types.

pub mod asymptotics;
pub mod dynamics;
pub mod gamma;
pub mod integrate;
pub mod model;
pub mod series;

pub use model::{make_params, AsymptoticReport, AugmentedState, ModelError, Params, SolutionPoint};
