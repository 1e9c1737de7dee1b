//! Bandit instances, softmax policies, and the value/gradient/regret
//! primitives shared by both simulation engines.
//!
//! A `k`-armed Gaussian bandit has mean vector `mu` and per-arm standard
//! deviations `sigma`. The learner plays the softmax policy
//! `pi(theta)_a ∝ exp(theta_a)` over a preference vector `theta`. The value
//! of a preference vector is `v(theta) = <pi(theta), mu>`, its gradient is
//! `(diag(pi) - pi pi^T) mu`, and the instantaneous regret of a policy `pi`
//! is `mu_star - <pi, mu>`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How strictly [`BanditInstance`] validates its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ValidationMode {
    /// `1 >= mu_1 > mu_2 >= ... >= mu_k >= 0` and `max(sigma) <= 1`.
    /// Arm 0 is the unique best arm.
    PaperStandard,
    /// Only finiteness is required; the best arm is wherever `max(mu)` is
    /// and ties are allowed (tied arms contribute zero regret).
    Permissive,
}

/// A `k`-armed Gaussian bandit: arm `a` pays `N(mu[a], sigma[a]^2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BanditInstance {
    mu: Vec<f64>,
    sigma: Vec<f64>,
    mode: ValidationMode,
}

impl BanditInstance {
    /// Strictly validated instance: means sorted decreasing in `[0, 1]`
    /// with a unique best arm, noise scales at most 1.
    pub fn new(mu: Vec<f64>, sigma: Vec<f64>) -> Result<Self> {
        Self::with_mode(mu, sigma, ValidationMode::PaperStandard)
    }

    /// Instance that only checks shapes and finiteness.
    pub fn permissive(mu: Vec<f64>, sigma: Vec<f64>) -> Result<Self> {
        Self::with_mode(mu, sigma, ValidationMode::Permissive)
    }

    pub fn with_mode(mu: Vec<f64>, sigma: Vec<f64>, mode: ValidationMode) -> Result<Self> {
        let k = mu.len();
        if k < 2 {
            return Err(Error::invalid(format!("need at least 2 arms, got {k}")));
        }
        if sigma.len() != k {
            return Err(Error::invalid(format!(
                "mu has {k} arms but sigma has {}",
                sigma.len()
            )));
        }
        if mu.iter().chain(sigma.iter()).any(|x| !x.is_finite()) {
            return Err(Error::invalid("mu and sigma must be finite"));
        }
        if sigma.iter().any(|&s| s < 0.0) {
            return Err(Error::invalid("sigma must be non-negative"));
        }
        if mode == ValidationMode::PaperStandard {
            if !(mu[0] <= 1.0 && mu[k - 1] >= 0.0) {
                return Err(Error::invalid("means must lie in [0, 1]"));
            }
            if !(mu[0] > mu[1]) {
                return Err(Error::invalid("arm 0 must be strictly best"));
            }
            if mu.windows(2).skip(1).any(|w| w[0] < w[1]) {
                return Err(Error::invalid("means must be non-increasing"));
            }
            if sigma.iter().any(|&s| s > 1.0) {
                return Err(Error::invalid("noise scales must be at most 1"));
            }
        }
        Ok(Self { mu, sigma, mode })
    }

    pub fn k(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn mode(&self) -> ValidationMode {
        self.mode
    }

    /// Best achievable mean reward.
    pub fn mu_star(&self) -> f64 {
        self.mu.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Suboptimality gap of arm `a`: `mu_star - mu[a]`.
    pub fn gap(&self, a: usize) -> f64 {
        self.mu_star() - self.mu[a]
    }

    /// Minimum positive gap (best vs second best). Zero if the best mean
    /// is tied, which only a permissive instance allows.
    pub fn min_gap(&self) -> f64 {
        let star = self.mu_star();
        self.mu
            .iter()
            .map(|&m| star - m)
            .filter(|&g| g > 0.0)
            .fold(f64::INFINITY, f64::min)
            .min(star - self.second_best())
            .max(0.0)
    }

    fn second_best(&self) -> f64 {
        let star = self.mu_star();
        let mut best_idx_seen = false;
        let mut second = f64::NEG_INFINITY;
        for &m in &self.mu {
            if m == star && !best_idx_seen {
                best_idx_seen = true;
            } else if m > second {
                second = m;
            }
        }
        second
    }
}

/// Softmax with max-subtraction so large preferences never overflow.
///
/// The output is a probability vector; it is shift-invariant
/// (`softmax(theta + c·1) = softmax(theta)`) up to float rounding.
pub fn softmax(theta: &[f64]) -> Result<Vec<f64>> {
    if theta.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("softmax input must be finite"));
    }
    let m = theta.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = theta.iter().map(|&x| (x - m).exp()).collect();
    let sum: f64 = out.iter().sum();
    for p in &mut out {
        *p /= sum;
    }
    Ok(out)
}

/// Value of a preference vector: `<softmax(theta), mu>`.
pub fn value(theta: &[f64], inst: &BanditInstance) -> Result<f64> {
    if theta.len() != inst.k() {
        return Err(Error::invalid(format!(
            "theta has length {}, instance has {} arms",
            theta.len(),
            inst.k()
        )));
    }
    let pi = softmax(theta)?;
    Ok(pi.iter().zip(inst.mu()).map(|(p, m)| p * m).sum())
}

/// Gradient of the value function, `(diag(pi) - pi pi^T) mu`, computed as
/// `pi_a (mu_a - v)`. The entries sum to zero.
pub fn policy_gradient(theta: &[f64], inst: &BanditInstance) -> Result<Vec<f64>> {
    if theta.len() != inst.k() {
        return Err(Error::invalid(format!(
            "theta has length {}, instance has {} arms",
            theta.len(),
            inst.k()
        )));
    }
    let pi = softmax(theta)?;
    let v: f64 = pi.iter().zip(inst.mu()).map(|(p, m)| p * m).sum();
    Ok(pi
        .iter()
        .zip(inst.mu())
        .map(|(p, m)| p * (m - v))
        .collect())
}

/// Instantaneous regret of playing `pi`: `mu_star - <pi, mu>`.
pub fn instant_regret(pi: &[f64], inst: &BanditInstance) -> Result<f64> {
    if pi.len() != inst.k() {
        return Err(Error::invalid(format!(
            "pi has length {}, instance has {} arms",
            pi.len(),
            inst.k()
        )));
    }
    let v: f64 = pi.iter().zip(inst.mu()).map(|(p, m)| p * m).sum();
    Ok(inst.mu_star() - v)
}

/// Learner state shared by both engines: time, preferences, the cached
/// policy, and the running regret / clock integrals.
///
/// `pi` is recomputed from `theta` after every step rather than updated
/// incrementally, so the cache cannot drift from the preferences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyState {
    /// Continuous time, or the round index in the discrete engine.
    pub t: f64,
    pub theta: Vec<f64>,
    pub pi: Vec<f64>,
    /// Accumulated regret: sum of realized gaps (discrete) or the
    /// left-endpoint integral of instantaneous regret (continuous).
    pub cum_regret: f64,
    /// Time-change clock `s(t) = ∫ eta·pibar(1-pibar) du` where `pibar` is
    /// the probability mass on arms 3..k. Only meaningful for `k >= 3`.
    pub clock_s: f64,
}

impl PolicyState {
    /// Fresh state at `theta = 0` (uniform policy).
    pub fn initial(k: usize) -> Self {
        Self {
            t: 0.0,
            theta: vec![0.0; k],
            pi: vec![1.0 / k as f64; k],
            cum_regret: 0.0,
            clock_s: 0.0,
        }
    }

    /// State at a given preference vector, with the policy cache filled in.
    pub fn from_theta(theta: Vec<f64>) -> Result<Self> {
        let pi = softmax(&theta)?;
        Ok(Self {
            t: 0.0,
            theta,
            pi,
            cum_regret: 0.0,
            clock_s: 0.0,
        })
    }

    pub fn k(&self) -> usize {
        self.theta.len()
    }

    /// Recompute the cached policy from `theta`.
    pub fn refresh_pi(&mut self) -> Result<()> {
        self.pi = softmax(&self.theta)?;
        Ok(())
    }

    /// Preference gap `theta_0 - theta_a` of arm `a` relative to arm 0.
    pub fn z_gap(&self, a: usize) -> f64 {
        self.theta[0] - self.theta[a]
    }

    /// Smallest preference gap over arms `1..k`.
    pub fn min_z_gap(&self) -> f64 {
        self.theta[1..]
            .iter()
            .map(|&th| self.theta[0] - th)
            .fold(f64::INFINITY, f64::min)
    }

    /// `theta_0 + theta_1`, the joint preference of the two leading arms.
    pub fn s_sum(&self) -> f64 {
        self.theta[0] + self.theta[1]
    }

    /// Probability mass on arms `2..k` (zero for `k = 2`).
    pub fn tail_mass(&self) -> f64 {
        self.pi[2..].iter().sum()
    }
}
