//! Simulation and verification laboratory for softmax policy-gradient
//! dynamics on k-armed Gaussian bandits.
//!
//! The crate runs the discrete policy-gradient algorithm and its
//! continuous-time diffusion approximation side by side, measures regret,
//! and numerically verifies the algebraic identities, concentration
//! statements and closed-form regret bounds that govern the dynamics.
//!
//! Module map:
//! - [`bandit`]: instances, softmax policies, value/gradient/regret;
//! - [`discrete`]: the sampled-action algorithm with exact regret
//!   accounting;
//! - [`sde`]: Euler–Maruyama integration of the diffusion, plus scalar
//!   hitting-time SDEs;
//! - [`diagnostics`]: dual-route identities, stopping conditions, the
//!   concave potential;
//! - [`bounds`]: every closed-form bound, used as oracles;
//! - [`experiments`]: instance families, parallel sweeps, estimators,
//!   persistence;
//! - [`verify`]: the named check suites run by the CLI and the acceptance
//!   tests.

pub mod bandit;
pub mod bounds;
pub mod diagnostics;
pub mod discrete;
pub mod error;
pub mod experiments;
pub mod rng;
pub mod sde;
pub mod trajectory;
pub mod verify;

pub use bandit::{
    instant_regret, policy_gradient, softmax, value, BanditInstance, PolicyState, ValidationMode,
};
pub use error::{Error, Result};
pub use trajectory::{ConditionId, RunSummary, StopEvent, Trajectory};
