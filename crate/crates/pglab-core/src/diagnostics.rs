//! Analysis quantities and algebraic identities of the dynamics.
//!
//! Everything here is a closed-form function of the current state. Each
//! quantity is computed two ways where possible (a massaged closed form and
//! a direct first-principles route), so the pair acts as its own oracle:
//!
//! - drift and diffusion of the preference gap `Z_a = theta_0 - theta_a`;
//! - the clock rate, `S`/`Z` coefficients, `alpha`, `sigma^2` and the
//!   mass ratio `G` for the two-leaders decomposition on the lower-bound
//!   instance family;
//! - the stopping conditions on `(S, Z, s)` and their log relaxation;
//! - the concave potential of `theta_0` and the `1/pi_0` bound it controls.

use serde::{Deserialize, Serialize};

use crate::bandit::{instant_regret, policy_gradient, softmax, BanditInstance, PolicyState};
use crate::bounds;
use crate::error::{Error, Result};
use crate::trajectory::{ConditionId, StopEvent};

// ---------------------------------------------------------------------------
// Preference-gap coefficients
// ---------------------------------------------------------------------------

/// Drift and diffusion of `Z_a = theta_0 - theta_a` under the continuous
/// dynamics with unit noise scales, in both algebraic routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZCoefficients {
    /// Closed form `eta [pi_a gap_a + (pi_0 - pi_a) R]`.
    pub drift: f64,
    /// The same drift via `<e_0 - e_a, eta v'(theta)>`.
    pub drift_direct: f64,
    /// `eta sqrt(pi_0 + pi_a - (pi_0 - pi_a)^2)`.
    pub diffusion: f64,
}

/// Coefficients of the gap process for arm `a >= 1` (0-based; arm 0 is the
/// reference arm). Gaps and regret are measured against arm 0's mean.
pub fn z_coefficients(
    state: &PolicyState,
    inst: &BanditInstance,
    eta: f64,
    arm: usize,
) -> Result<ZCoefficients> {
    if arm == 0 {
        return Err(Error::invalid("arm 0 is the reference arm"));
    }
    if arm >= inst.k() || state.k() != inst.k() {
        return Err(Error::invalid("arm index out of range"));
    }
    let pi = &state.pi;
    let mu = inst.mu();
    let v: f64 = pi.iter().zip(mu).map(|(p, m)| p * m).sum();
    let regret_vs_arm0 = mu[0] - v;
    let gap = mu[0] - mu[arm];
    let drift = eta * (pi[arm] * gap + (pi[0] - pi[arm]) * regret_vs_arm0);
    let grad = policy_gradient(&state.theta, inst)?;
    let drift_direct = eta * (grad[0] - grad[arm]);
    let diffusion =
        eta * (pi[0] + pi[arm] - (pi[0] - pi[arm]) * (pi[0] - pi[arm])).max(0.0).sqrt();
    Ok(ZCoefficients {
        drift,
        drift_direct,
        diffusion,
    })
}

// ---------------------------------------------------------------------------
// Two-leaders decomposition on the lower-bound family
// ---------------------------------------------------------------------------

/// All scalar coefficients of the `(S, Z)` dynamics on the lower-bound
/// instance family, each with a direct cross-computation where one exists.
///
/// `S = theta_0 + theta_1`, `Z = theta_0 - theta_1`, `pibar` is the mass on
/// arms `2..k`, and the clock rate is `C = eta pibar (1 - pibar)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerSdeCoefficients {
    pub clock_rate: f64,
    /// `[1 - pi_1 delta2 / (1 - pibar)] C`.
    pub drift_s: f64,
    /// The same via `eta (pi_0 R + pi_1 (R - delta2))`.
    pub drift_s_direct: f64,
    /// `sqrt(eta pibar C)`.
    pub diff_s: f64,
    /// The same by aggregating the two driving noises: `eta pibar sqrt(pi_0 + pi_1)`.
    pub diff_s_direct: f64,
    /// `pi_1 (1 + pi_0 - pi_1) / (pibar (1 - pibar))`.
    pub alpha: f64,
    /// `1 + 4 pi_0 pi_1 / (pibar(1-pibar)) - (1-pibar) ((pi_0-pi_1)/(pi_0+pi_1))^2`.
    pub sigma2: f64,
    /// Mass ratio `G = (1/m) exp((S+Z)/2 + S/m)` with `m = k - 2`.
    pub mass_ratio: f64,
    /// The same ratio read off the policy: `pi_0 / pibar`.
    pub mass_ratio_direct: f64,
    /// `(pi_0 - pi_1)/(pi_0 + pi_1)`, which must equal `tanh(Z/2)`.
    pub pi_contrast: f64,
    pub tanh_half_z: f64,
    /// Gap drift in massaged form `[alpha delta2 + tanh(Z/2)] C`.
    pub drift_z: f64,
    /// Gap diffusion in massaged form `sqrt(eta sigma2 C)`.
    pub diff_z: f64,
    /// The same by aggregating noises:
    /// `eta sqrt(pi_0 (1 - pi_0 + pi_1)^2 + pi_1 (1 + pi_0 - pi_1)^2)`.
    pub diff_z_direct: f64,
}

/// Evaluate the two-leaders coefficients. Requires the lower-bound family
/// (`mu = (1, 1-delta2, 0, ..)`, `sigma = (1, 1, 0, ..)`, `k >= 3`) and a
/// state whose tail mass is strictly inside `(0, 1)`.
pub fn lower_sde_coefficients(
    state: &PolicyState,
    inst: &BanditInstance,
    eta: f64,
) -> Result<LowerSdeCoefficients> {
    let k = inst.k();
    if k < 3 {
        return Err(Error::invalid("two-leaders decomposition needs k >= 3"));
    }
    if state.k() != k {
        return Err(Error::invalid("state/instance arm count mismatch"));
    }
    if !is_lower_bound_family(inst) {
        return Err(Error::invalid(
            "instance is not of the lower-bound family (mu = (1, 1-delta2, 0, ..), sigma = (1, 1, 0, ..))",
        ));
    }
    let pi = &state.pi;
    let pibar: f64 = pi[2..].iter().sum();
    if !(pibar > 0.0 && pibar < 1.0) || pibar * (1.0 - pibar) < 1e-300 {
        return Err(Error::DegenerateState(format!(
            "tail mass pibar = {pibar} has collapsed"
        )));
    }
    let delta2 = inst.mu()[0] - inst.mu()[1];
    let m = (k - 2) as f64;
    let s = state.s_sum();
    let z = state.z_gap(1);
    let regret = instant_regret(pi, inst)?;

    let clock_rate = eta * pibar * (1.0 - pibar);
    let drift_s = (1.0 - pi[1] * delta2 / (1.0 - pibar)) * clock_rate;
    let drift_s_direct = eta * (pi[0] * regret + pi[1] * (regret - delta2));
    let diff_s = (eta * pibar * clock_rate).sqrt();
    let diff_s_direct = eta * pibar * (pi[0] + pi[1]).sqrt();
    let alpha = pi[1] * (1.0 + pi[0] - pi[1]) / (pibar * (1.0 - pibar));
    let pi_contrast = (pi[0] - pi[1]) / (pi[0] + pi[1]);
    let sigma2 = 1.0 + 4.0 * pi[0] * pi[1] / (pibar * (1.0 - pibar))
        - (1.0 - pibar) * pi_contrast * pi_contrast;
    let mass_ratio = ((s + z) / 2.0 + s / m).exp() / m;
    let mass_ratio_direct = pi[0] / pibar;
    let tanh_half_z = (z / 2.0).tanh();
    let drift_z = (alpha * delta2 + tanh_half_z) * clock_rate;
    let diff_z = (eta * sigma2 * clock_rate).sqrt();
    let d = pi[0] - pi[1];
    let diff_z_direct =
        eta * (pi[0] * (1.0 - d) * (1.0 - d) + pi[1] * (1.0 + d) * (1.0 + d)).sqrt();

    Ok(LowerSdeCoefficients {
        clock_rate,
        drift_s,
        drift_s_direct,
        diff_s,
        diff_s_direct,
        alpha,
        sigma2,
        mass_ratio,
        mass_ratio_direct,
        pi_contrast,
        tanh_half_z,
        drift_z,
        diff_z,
        diff_z_direct,
    })
}

/// Does the instance match the lower-bound pattern
/// `mu = (1, 1-delta2, 0, .., 0)`, `sigma = (1, 1, 0, .., 0)`?
pub fn is_lower_bound_family(inst: &BanditInstance) -> bool {
    let (mu, sigma) = (inst.mu(), inst.sigma());
    inst.k() >= 3
        && mu[0] == 1.0
        && mu[1] < 1.0
        && mu[1] > 0.0
        && mu[2..].iter().all(|&m| m == 0.0)
        && sigma[0] == 1.0
        && sigma[1] == 1.0
        && sigma[2..].iter().all(|&s| s == 0.0)
}

// ---------------------------------------------------------------------------
// Stopping conditions on (S, Z, s)
// ---------------------------------------------------------------------------

/// Watches one trajectory of the lower-bound dynamics for the first time
/// any stopping condition holds on the step grid:
///
/// 1. `S` leaves the window `((1 - delta2)s - 1, s + 1)`;
/// 2. `Z` reaches the arcsinh envelope [`bounds::z_threshold`];
/// 3. the clock reaches `s_max`.
///
/// Conditions are evaluated at grid points; no interpolation between steps.
/// Whenever no condition has fired the gap must also satisfy the log
/// relaxation; failures of that redundant implication are counted in
/// `relaxation_violations` (any nonzero count indicates an implementation
/// bug in the envelope).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundMonitor {
    pub m: usize,
    /// `2/m`.
    pub eps: f64,
    pub eta: f64,
    pub horizon: f64,
    pub delta2: f64,
    pub s_max: f64,
    pub first_fire: Option<StopEvent>,
    pub relaxation_violations: u64,
}

impl LowerBoundMonitor {
    pub fn new(k: usize, eta: f64, horizon: f64, delta2: f64) -> Result<Self> {
        if k < 3 {
            return Err(Error::invalid("monitor needs k >= 3"));
        }
        if !(eta > 0.0 && horizon > 0.0) {
            return Err(Error::invalid("eta and horizon must be positive"));
        }
        if !(delta2 > 0.0 && delta2 < 1.0) {
            return Err(Error::invalid("delta2 must lie in (0, 1)"));
        }
        let m = k - 2;
        let eps = 2.0 / m as f64;
        Ok(Self {
            m,
            eps,
            eta,
            horizon,
            delta2,
            s_max: bounds::s_max(eta, horizon, eps),
            first_fire: None,
            relaxation_violations: 0,
        })
    }

    /// Check the conditions at one grid point, recording the first firing.
    /// Returns the condition that holds at this point, if any.
    pub fn observe(&mut self, time: f64, s_sum: f64, z: f64, clock: f64) -> Option<ConditionId> {
        let fired = stop_condition(s_sum, z, clock, self, self.eta, self.delta2);
        match fired {
            Some(condition) => {
                if self.first_fire.is_none() {
                    self.first_fire = Some(StopEvent {
                        condition,
                        time,
                        s_value: clock,
                    });
                }
            }
            None => {
                if z > bounds::z_relaxation(clock, self.eta, self.eps) + 1e-12 {
                    self.relaxation_violations += 1;
                }
            }
        }
        fired
    }
}

/// The first stopping condition holding at `(S, Z, s)`, if any.
pub fn stop_condition(
    s_sum: f64,
    z: f64,
    clock: f64,
    monitor: &LowerBoundMonitor,
    eta: f64,
    delta2: f64,
) -> Option<ConditionId> {
    let lo = (1.0 - delta2) * clock - 1.0;
    let hi = clock + 1.0;
    if s_sum <= lo || s_sum >= hi {
        return Some(ConditionId::SWindow);
    }
    if z >= bounds::z_threshold(clock, eta, monitor.eps).threshold {
        return Some(ConditionId::ZThreshold);
    }
    if clock >= monitor.s_max {
        return Some(ConditionId::SMax);
    }
    None
}

// ---------------------------------------------------------------------------
// Concave potential of theta_0 and the 1/pi_0 bound
// ---------------------------------------------------------------------------

/// Parameters of the concave potential: arm count `k`, horizon `n`, and a
/// confidence level `delta`. Writing `L = log(n/delta)`, the potential is
///
/// `phi(u) = 6 k L log((u + 1 + L)/(1 + L))`, `phi(0) = 0`,
///
/// with derivative `phi'(u) = 6 k L / (u + 1 + L)` on `u > -(1 + L)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialParams {
    pub k: usize,
    pub n: f64,
    pub delta: f64,
}

impl PotentialParams {
    pub fn new(k: usize, n: f64, delta: f64) -> Result<Self> {
        if k < 2 {
            return Err(Error::invalid("need k >= 2"));
        }
        if !(n >= 3.0) {
            return Err(Error::invalid("need n >= 3"));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::invalid("delta must lie in (0, 1)"));
        }
        Ok(Self { k, n, delta })
    }

    /// `L = log(n/delta)`.
    pub fn log_ratio(&self) -> f64 {
        (self.n / self.delta).ln()
    }

    fn guard(&self, u: f64) -> Result<f64> {
        let shift = u + 1.0 + self.log_ratio();
        if shift <= 0.0 {
            return Err(Error::Domain(format!(
                "u = {u} is at or below the singularity at {}",
                -(1.0 + self.log_ratio())
            )));
        }
        Ok(shift)
    }
}

/// The potential `phi(u)`.
pub fn potential(u: f64, p: &PotentialParams) -> Result<f64> {
    let shift = p.guard(u)?;
    let l = p.log_ratio();
    Ok(6.0 * p.k as f64 * l * (shift / (1.0 + l)).ln())
}

/// Its derivative `phi'(u) = 6 k L / (u + 1 + L)`.
pub fn potential_derivative(u: f64, p: &PotentialParams) -> Result<f64> {
    let shift = p.guard(u)?;
    Ok(6.0 * p.k as f64 * p.log_ratio() / shift)
}

/// Its second derivative `phi''(u) = -6 k L / (u + 1 + L)^2`, which
/// satisfies `phi'' >= -phi'` for `u >= -L`.
pub fn potential_second_derivative(u: f64, p: &PotentialParams) -> Result<f64> {
    let shift = p.guard(u)?;
    Ok(-6.0 * p.k as f64 * p.log_ratio() / (shift * shift))
}

/// Outcome of testing the inverse-probability bound at one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pi1BoundCheck {
    /// Whether the preconditions hold: zero-sum `theta` inside the box
    /// `[-L, kL]` with `theta_0 >= max theta - 1`.
    pub applicable: bool,
    /// Whether `1/pi_0 <= 6 k L / (theta_0 + 1 + L)`.
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
}

/// Check `1/pi_0 <= 6 k L / (theta_0 + 1 + L)` and whether its
/// preconditions hold at `theta`. Must never report `applicable && !holds`.
pub fn check_pi1_bound(theta: &[f64], p: &PotentialParams) -> Pi1BoundCheck {
    let l = p.log_ratio();
    let kf = p.k as f64;
    let not_applicable = |lhs: f64, rhs: f64| Pi1BoundCheck {
        applicable: false,
        holds: lhs <= rhs,
        lhs,
        rhs,
    };
    if theta.len() != p.k || theta.iter().any(|x| !x.is_finite()) {
        return not_applicable(f64::NAN, f64::NAN);
    }
    let pi = match softmax(theta) {
        Ok(pi) => pi,
        Err(_) => return not_applicable(f64::NAN, f64::NAN),
    };
    let lhs = 1.0 / pi[0];
    let rhs = 6.0 * kf * l / (theta[0] + 1.0 + l);
    let max_theta = theta.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let zero_sum = theta.iter().sum::<f64>().abs() <= 1e-8;
    let in_box = theta.iter().all(|&x| x >= -l && x <= kf * l);
    let leader_near_top = theta[0] >= max_theta - 1.0;
    Pi1BoundCheck {
        applicable: zero_sum && in_box && leader_near_top,
        holds: lhs <= rhs,
        lhs,
        rhs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::lower_bound_instance;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    fn rel_close(a: f64, b: f64, tol: f64) {
        let scale = a.abs().max(b.abs()).max(1.0);
        assert!((a - b).abs() <= tol * scale, "{a} vs {b}");
    }

    #[test]
    fn z_coefficients_uniform_two_arm() {
        let inst = BanditInstance::new(vec![1.0, 0.0], vec![1.0, 1.0]).unwrap();
        let state = PolicyState::initial(2);
        let c = z_coefficients(&state, &inst, 1.0, 1).unwrap();
        // both routes: pi_1·gap + 0 = 0.5, and <e0-e1, grad> = 0.25+0.25
        close(c.drift, 0.5, 1e-15);
        close(c.drift_direct, 0.5, 1e-14);
        close(c.diffusion, 1.0, 1e-15);
    }

    #[test]
    fn z_coefficients_equal_masses_drift_is_gap_term() {
        let inst = BanditInstance::new(vec![1.0, 0.4, 0.4], vec![1.0; 3]).unwrap();
        // theta with pi_0 = pi_1
        let state = PolicyState::from_theta(vec![0.7, 0.7, -1.4]).unwrap();
        let c = z_coefficients(&state, &inst, 0.3, 1).unwrap();
        close(c.drift, 0.3 * state.pi[1] * 0.6, 1e-15);
        assert!(c.drift >= 0.0);
        rel_close(c.drift, c.drift_direct, 1e-12);
    }

    #[test]
    fn z_coefficients_constant_rewards_zero_drift() {
        let inst = BanditInstance::permissive(vec![0.3; 4], vec![1.0; 4]).unwrap();
        let state = PolicyState::from_theta(vec![0.5, -0.5, 0.25, -0.25]).unwrap();
        let c = z_coefficients(&state, &inst, 1.0, 2).unwrap();
        close(c.drift, 0.0, 1e-15);
        close(c.drift_direct, 0.0, 1e-14);
    }

    #[test]
    fn z_coefficients_rejects_reference_arm() {
        let inst = BanditInstance::new(vec![1.0, 0.0], vec![1.0, 1.0]).unwrap();
        let state = PolicyState::initial(2);
        assert!(z_coefficients(&state, &inst, 1.0, 0).is_err());
        assert!(z_coefficients(&state, &inst, 1.0, 2).is_err());
    }

    #[test]
    fn lower_sde_uniform_k4_reference_values() {
        let inst = lower_bound_instance(4, 0.002).unwrap();
        let state = PolicyState::initial(4);
        let eta = 1.0;
        let c = lower_sde_coefficients(&state, &inst, eta).unwrap();
        close(c.clock_rate, eta / 4.0, 1e-15);
        close(c.mass_ratio, 0.5, 1e-15); // (1/m) e^0 with m = 2
        close(c.mass_ratio_direct, 0.5, 1e-15);
        close(c.alpha, 1.0, 1e-15);
        close(c.sigma2, 2.0, 1e-15);
        close(c.tanh_half_z, 0.0, 0.0);
        close(c.pi_contrast, 0.0, 0.0);
        // sandwich at Z = 0: 1 <= sigma2 <= 1 + 4G
        assert!(1.0 <= c.sigma2 && c.sigma2 <= 1.0 + 4.0 * c.mass_ratio);
        rel_close(c.drift_s, c.drift_s_direct, 1e-12);
        rel_close(c.diff_s, c.diff_s_direct, 1e-12);
        rel_close(c.diff_z, c.diff_z_direct, 1e-12);
    }

    #[test]
    fn lower_sde_cross_checks_random_states() {
        use rand::Rng;
        let mut rng = crate::rng::rng_for_seed(99);
        for _ in 0..1000 {
            let k = [3usize, 4, 5, 8, 12, 20][rng.gen_range(0..6)];
            let delta2 = rng.gen_range(0.001..0.5);
            let inst = lower_bound_instance(k, delta2).unwrap();
            let m = (k - 2) as f64;
            let s: f64 = rng.gen_range(-4.0..8.0);
            let z: f64 = rng.gen_range(-6.0..6.0);
            let mut theta = vec![-s / m; k];
            theta[0] = (s + z) / 2.0;
            theta[1] = (s - z) / 2.0;
            let state = PolicyState::from_theta(theta).unwrap();
            let eta = 10f64.powf(rng.gen_range(-3.0..-0.3));
            let c = lower_sde_coefficients(&state, &inst, eta).unwrap();
            rel_close(c.drift_s, c.drift_s_direct, 1e-12);
            rel_close(c.diff_s, c.diff_s_direct, 1e-12);
            rel_close(c.pi_contrast, c.tanh_half_z, 1e-12);
            rel_close(c.mass_ratio, c.mass_ratio_direct, 1e-12);
            assert!(c.alpha <= 1.0 + 2.0 * c.mass_ratio);
            assert!(1.0 - c.tanh_half_z * c.tanh_half_z <= c.sigma2);
            assert!(c.sigma2 <= 1.0 + 4.0 * c.mass_ratio);
        }
    }

    #[test]
    fn lower_sde_rejects_bad_inputs() {
        let inst = lower_bound_instance(4, 0.002).unwrap();
        // collapsed tail
        let state = PolicyState::from_theta(vec![400.0, 390.0, -395.0, -395.0]).unwrap();
        assert!(matches!(
            lower_sde_coefficients(&state, &inst, 0.1),
            Err(Error::DegenerateState(_))
        ));
        // wrong family
        let generic = BanditInstance::new(vec![1.0, 0.5, 0.0], vec![1.0; 3]).unwrap();
        let state = PolicyState::initial(3);
        assert!(lower_sde_coefficients(&state, &generic, 0.1).is_err());
    }

    #[test]
    fn monitor_initial_state_quiet() {
        let mut mon = LowerBoundMonitor::new(20, 0.05, 1e4, 0.002).unwrap();
        assert_eq!(mon.observe(0.0, 0.0, 0.0, 0.0), None);
        assert!(mon.first_fire.is_none());
        assert_eq!(mon.relaxation_violations, 0);
    }

    #[test]
    fn monitor_s_window_boundary_fires() {
        let mut mon = LowerBoundMonitor::new(20, 0.05, 1e4, 0.002).unwrap();
        let s = 0.5;
        assert_eq!(
            mon.observe(1.0, s + 1.0 + 1e-9, 0.0, s),
            Some(ConditionId::SWindow)
        );
        let ev = mon.first_fire.unwrap();
        assert_eq!(ev.condition, ConditionId::SWindow);
        close(ev.s_value, s, 0.0);
    }

    #[test]
    fn monitor_z_and_clock_conditions() {
        let mut mon = LowerBoundMonitor::new(20, 0.05, 1e4, 0.002).unwrap();
        // huge gap fires the envelope
        assert_eq!(mon.observe(1.0, 0.5, 5.0, 0.2), Some(ConditionId::ZThreshold));
        let mut mon = LowerBoundMonitor::new(20, 0.05, 1e4, 0.002).unwrap();
        let smax = mon.s_max;
        close(smax, bounds::s_max(0.05, 1e4, 2.0 / 18.0), 1e-12);
        assert_eq!(
            mon.observe(9.0, smax * (1.0 - 0.001), -40.0, smax),
            Some(ConditionId::SMax)
        );
    }

    #[test]
    fn monitor_first_fire_sticks() {
        let mut mon = LowerBoundMonitor::new(20, 0.05, 1e4, 0.002).unwrap();
        mon.observe(3.0, 10.0, 0.0, 0.5); // S window
        mon.observe(4.0, 0.0, 9.0, 0.5); // Z threshold, later
        assert_eq!(mon.first_fire.unwrap().condition, ConditionId::SWindow);
        close(mon.first_fire.unwrap().time, 3.0, 0.0);
    }

    #[test]
    fn potential_reference_values() {
        let p = PotentialParams::new(5, 1e4, 1e-4).unwrap();
        close(potential(0.0, &p).unwrap(), 0.0, 0.0);
        // increasing, derivative decreasing
        let a = potential(1.0, &p).unwrap();
        let b = potential(2.0, &p).unwrap();
        assert!(b > a && a > 0.0);
        assert!(potential_derivative(2.0, &p).unwrap() < potential_derivative(1.0, &p).unwrap());
        // domain error at the singularity
        let l = p.log_ratio();
        assert!(potential(-(1.0 + l) - 1e-9, &p).is_err());
        assert!(potential(-(1.0 + l), &p).is_err());
    }

    #[test]
    fn potential_cap_inequality_grid() {
        // phi(kL) <= 6 k L log(1 + k)
        for k in 2..=50 {
            for &n in &[10.0, 1e4] {
                for &delta in &[1.0 / n, 0.1] {
                    let p = PotentialParams::new(k, n, delta).unwrap();
                    let l = p.log_ratio();
                    let cap = 6.0 * k as f64 * l * (1.0 + k as f64).ln();
                    let v = potential(k as f64 * l, &p).unwrap();
                    assert!(v <= cap, "k={k} n={n} delta={delta}: {v} > {cap}");
                }
            }
        }
    }

    #[test]
    fn potential_second_derivative_grid() {
        let p = PotentialParams::new(7, 1e3, 0.05).unwrap();
        let l = p.log_ratio();
        // the curvature floor holds for u > -L (equality in the limit)
        let mut u = -l + 1e-6;
        while u <= p.k as f64 * l {
            // step scaled to the distance from the singularity balances
            // truncation against cancellation
            let h = (u + 1.0 + l) * 1e-4;
            let closed = potential_second_derivative(u, &p).unwrap();
            let fd = (potential(u + h, &p).unwrap() - 2.0 * potential(u, &p).unwrap()
                + potential(u - h, &p).unwrap())
                / (h * h);
            rel_close(closed, fd, 1e-6);
            // concavity floor: phi'' >= -phi' for u >= -L
            assert!(closed >= -potential_derivative(u, &p).unwrap());
            u += l / 4.0;
        }
    }

    #[test]
    fn pi1_bound_uniform_state() {
        let p = PotentialParams::new(4, 100.0, 0.1).unwrap();
        let check = check_pi1_bound(&[0.0; 4], &p);
        assert!(check.applicable);
        assert!(check.holds);
        close(check.lhs, 4.0, 1e-12);
        let l = p.log_ratio();
        close(check.rhs, 24.0 * l / (1.0 + l), 1e-12);
    }

    #[test]
    fn pi1_bound_inapplicable_when_leader_lags() {
        let p = PotentialParams::new(3, 100.0, 0.1).unwrap();
        // theta_0 = max - 2, zero-sum
        let check = check_pi1_bound(&[0.0, 2.0, -2.0], &p);
        assert!(!check.applicable);
    }

    #[test]
    fn pi1_bound_inapplicable_outside_box_or_sum() {
        let p = PotentialParams::new(3, 100.0, 0.1).unwrap();
        let l = p.log_ratio();
        let check = check_pi1_bound(&[2.0 * l, -l - 1.0, -l + 1.0], &p);
        assert!(!check.applicable); // below -L
        let check = check_pi1_bound(&[0.5, 0.0, 0.0], &p);
        assert!(!check.applicable); // not zero-sum
        let check = check_pi1_bound(&[0.0, 0.0], &p);
        assert!(!check.applicable); // wrong arity
    }
}
