//! Euler–Maruyama integration of the continuous-time policy gradient
//! dynamics, plus the two scalar hitting-time SDEs.
//!
//! The preference process solves
//!
//! `d theta = eta (Id - pi 1^T) dX`,
//! `dX = diag(pi) mu dt + diag(sqrt(pi)) diag(sigma) dB`,
//!
//! driven by a k-dimensional Brownian motion. One Euler step draws `k`
//! independent standard Gaussians, forms the increment
//! `dX = diag(pi) mu h + diag(sqrt(pi)) diag(sigma) sqrt(h) xi`, and
//! projects: the projection annihilates the all-ones direction, so
//! `sum(theta)` is conserved in exact arithmetic. Drift, diffusion, regret
//! and clock integrals all use left-endpoint evaluation, giving a
//! consistent O(h) bias.
//!
//! We always sample the full k-dimensional driving noise and project,
//! rather than sampling the (k-1)-dimensional projected noise directly, so
//! scalar reductions of the dynamics can be tested against the same
//! Brownian increments.

use crate::bandit::{instant_regret, BanditInstance, PolicyState};
use crate::diagnostics::LowerBoundMonitor;
use crate::error::{Error, Result};
use crate::rng::{rng_for_seed, standard_normal, SimRng};
use crate::trajectory::{RunSummary, Trajectory};

/// Step size, horizon, and recording controls for the integrator.
#[derive(Debug, Clone, PartialEq)]
pub struct SdeConfig {
    pub h: f64,
    pub horizon: f64,
    pub record_stride: usize,
    /// Floor applied to `pi` only under the square root in the diffusion
    /// coefficient; never used in the simplex normalization.
    pub clamp_floor: f64,
}

impl SdeConfig {
    pub fn new(h: f64, horizon: f64) -> Result<Self> {
        let cfg = Self {
            h,
            horizon,
            record_stride: 1,
            clamp_floor: 0.0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride.max(1);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0) {
            return Err(Error::invalid("step size h must be positive"));
        }
        if !(self.horizon > 0.0) {
            return Err(Error::invalid("horizon must be positive"));
        }
        if self.h > self.horizon {
            return Err(Error::invalid("step size h must not exceed the horizon"));
        }
        if self.record_stride < 1 {
            return Err(Error::invalid("record_stride must be at least 1"));
        }
        if !(self.clamp_floor >= 0.0) {
            return Err(Error::invalid("clamp_floor must be non-negative"));
        }
        Ok(())
    }

    /// Default step size for a learning rate: `min(0.01, (0.05/eta)^2)`,
    /// which keeps the per-step parameter noise scale `eta sqrt(h)` at or
    /// below 0.05 while never exceeding 0.01.
    pub fn default_step(eta: f64) -> f64 {
        let cap = (0.05 / eta) * (0.05 / eta);
        cap.min(0.01)
    }

    pub fn num_steps(&self) -> u64 {
        (self.horizon / self.h).round().max(1.0) as u64
    }
}

/// One Euler–Maruyama step. Draws `k` Gaussians in arm order. Returns
/// `false` if the update produced a non-finite preference (the caller
/// should stop and flag divergence); the state is left at its last finite
/// value in that case.
pub fn step_euler(
    state: &mut PolicyState,
    inst: &BanditInstance,
    eta: f64,
    h: f64,
    rng: &mut SimRng,
) -> Result<bool> {
    step_euler_clamped(state, inst, eta, h, 0.0, rng)
}

/// [`step_euler`] with an explicit floor for `pi` under the square root.
pub fn step_euler_clamped(
    state: &mut PolicyState,
    inst: &BanditInstance,
    eta: f64,
    h: f64,
    clamp_floor: f64,
    rng: &mut SimRng,
) -> Result<bool> {
    if !(h > 0.0) {
        return Err(Error::invalid("step size h must be positive"));
    }
    if !(eta > 0.0) {
        return Err(Error::invalid("eta must be positive"));
    }
    let k = inst.k();
    if state.k() != k {
        return Err(Error::invalid("state/instance arm count mismatch"));
    }
    let sqrt_h = h.sqrt();
    let mu = inst.mu();
    let sigma = inst.sigma();

    // dX = diag(pi) mu h + diag(sqrt(pi)) diag(sigma) sqrt(h) xi
    let mut sum_dx = 0.0;
    let mut dx = vec![0.0; k];
    for a in 0..k {
        let xi = standard_normal(rng);
        let p = state.pi[a];
        let p_root = p.max(clamp_floor).max(0.0).sqrt();
        let d = p * mu[a] * h + p_root * sigma[a] * sqrt_h * xi;
        dx[a] = d;
        sum_dx += d;
    }
    // theta' = theta + eta (dX - pi <1, dX>)
    let mut finite = true;
    for a in 0..k {
        let next = state.theta[a] + eta * (dx[a] - state.pi[a] * sum_dx);
        if !next.is_finite() {
            finite = false;
        }
        dx[a] = next; // reuse as the candidate preferences
    }
    if !finite {
        return Ok(false);
    }
    state.theta.copy_from_slice(&dx);
    state.refresh_pi()?;
    state.t += h;
    Ok(true)
}

/// Optional per-trajectory monitors evaluated at every grid point.
#[derive(Debug, Clone, Default)]
pub struct MonitorSet {
    pub lower_bound: Option<LowerBoundMonitor>,
    /// Stop integrating at the first fired condition instead of recording
    /// it and continuing.
    pub halt_on_fire: bool,
}

impl MonitorSet {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn with_lower_bound(monitor: LowerBoundMonitor) -> Self {
        Self {
            lower_bound: Some(monitor),
            halt_on_fire: false,
        }
    }
}

/// Integrate the dynamics from the uniform initialization.
///
/// Regret accumulates as `R_t h` and the clock as `C_t h`, both at the left
/// endpoint of each step. Monitors see every grid point; the first firing
/// is recorded (and halts the run only if the monitor set says so).
/// Deterministic given `(inst, eta, cfg, seed)`.
pub fn run_continuous(
    inst: &BanditInstance,
    eta: f64,
    cfg: &SdeConfig,
    seed: u64,
    mut monitors: MonitorSet,
) -> Result<(Trajectory, RunSummary)> {
    cfg.validate()?;
    if !(eta >= 0.0) {
        return Err(Error::invalid("eta must be non-negative"));
    }
    let k = inst.k();
    let n_steps = cfg.num_steps();
    let stride = cfg.record_stride as u64;
    let mut rng = rng_for_seed(seed);
    let mut state = PolicyState::initial(k);
    let mut traj = Trajectory::with_capacity((n_steps / stride + 2) as usize);

    let mut min_z = state.min_z_gap();
    let mut min_theta = 0.0f64;
    let mut diverged = false;

    for step in 0..n_steps {
        state.t = step as f64 * cfg.h;
        if step % stride == 0 {
            traj.push(&state);
        }
        if let Some(mon) = monitors.lower_bound.as_mut() {
            let fired = mon.observe(state.t, state.s_sum(), state.z_gap(1), state.clock_s);
            if fired.is_some() && monitors.halt_on_fire {
                break;
            }
        }
        // left-endpoint integrals over [t, t+h)
        let r = instant_regret(&state.pi, inst)?;
        state.cum_regret += r * cfg.h;
        if k >= 3 {
            let tail = state.tail_mass();
            state.clock_s += eta * tail * (1.0 - tail) * cfg.h;
        }
        if eta > 0.0 {
            let ok = step_euler_clamped(&mut state, inst, eta, cfg.h, cfg.clamp_floor, &mut rng)?;
            if !ok {
                diverged = true;
                break;
            }
        } else {
            state.t += cfg.h;
        }
        min_z = min_z.min(state.min_z_gap());
        min_theta = min_theta.min(state.theta.iter().cloned().fold(f64::INFINITY, f64::min));
    }
    if !diverged {
        state.t = n_steps as f64 * cfg.h;
        if let Some(mon) = monitors.lower_bound.as_mut() {
            mon.observe(state.t, state.s_sum(), state.z_gap(1), state.clock_s);
        }
    }
    if traj.times.last() != Some(&state.t) {
        traj.push(&state);
    }
    if let Some(mon) = monitors.lower_bound.as_ref() {
        if let Some(fire) = mon.first_fire {
            traj.stop_events.push(fire);
        }
    }

    let fire = monitors.lower_bound.as_ref().and_then(|m| m.first_fire);
    let summary = RunSummary {
        seed,
        eta,
        final_pi1: state.pi[0],
        regret: state.cum_regret,
        // the realized and policy-path regrets coincide in continuous time
        pseudo_regret: state.cum_regret,
        diverged,
        tau_condition: fire.map(|f| f.condition),
        tau_time: fire.map(|f| f.time),
        tau_s: fire.map(|f| f.s_value),
        min_z,
        min_theta,
    };
    Ok((traj, summary))
}

// ---------------------------------------------------------------------------
// Scalar hitting-time SDEs
// ---------------------------------------------------------------------------

/// Euler path of `dX = a dt + dB` from `X_0 = 0`. Returns the minimum over
/// the step grid (excluding the initial point) and whether it reached
/// `-eps`. Uses its own single Gaussian stream.
pub fn simulate_drifted_bm(a: f64, eps: f64, horizon: f64, h: f64, seed: u64) -> (f64, bool) {
    simulate_scalar(seed, horizon, h, eps, |_x| a)
}

/// Euler path of `dX = a/(e^X + 1) dt + dB` from `X_0 = 0`, drift evaluated
/// at the left endpoint. At `X = 0` the drift is exactly `a/2`.
pub fn simulate_sigmoid_drift_sde(
    a: f64,
    eps: f64,
    horizon: f64,
    h: f64,
    seed: u64,
) -> (f64, bool) {
    simulate_scalar(seed, horizon, h, eps, move |x: f64| a / (x.exp() + 1.0))
}

fn simulate_scalar(
    seed: u64,
    horizon: f64,
    h: f64,
    eps: f64,
    drift: impl Fn(f64) -> f64,
) -> (f64, bool) {
    let n_steps = (horizon / h).round().max(1.0) as u64;
    let sqrt_h = h.sqrt();
    let mut rng = rng_for_seed(seed);
    let mut x = 0.0f64;
    let mut min = f64::INFINITY;
    for _ in 0..n_steps {
        x += drift(x) * h + sqrt_h * standard_normal(&mut rng);
        if x < min {
            min = x;
        }
    }
    (min, min <= -eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bandit::policy_gradient;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    fn two_arm() -> BanditInstance {
        BanditInstance::new(vec![1.0, 0.0], vec![1.0, 1.0]).unwrap()
    }

    #[test]
    fn pure_drift_step_matches_gradient_flow() {
        // sigma = 0: one step is exactly eta·grad·h
        let inst = BanditInstance::with_mode(
            vec![1.0, 0.0],
            vec![0.0, 0.0],
            crate::bandit::ValidationMode::PaperStandard,
        )
        .unwrap();
        let mut state = PolicyState::initial(2);
        let mut rng = rng_for_seed(0);
        step_euler(&mut state, &inst, 1.0, 0.01, &mut rng).unwrap();
        close(state.theta[0], 0.0025, 1e-15);
        close(state.theta[1], -0.0025, 1e-15);
        let g = policy_gradient(&[0.0, 0.0], &inst).unwrap();
        close(state.theta[0], g[0] * 0.01, 1e-15);
    }

    #[test]
    fn zero_drift_mean_preserved() {
        // mu = 0, sigma = 1: E[theta'] = theta over one-step replications
        let inst = BanditInstance::permissive(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let n = 100_000;
        let (mut s0, mut s1) = (0.0, 0.0);
        let h = 0.01;
        let mut rng = rng_for_seed(5);
        for _ in 0..n {
            let mut state = PolicyState::from_theta(vec![0.4, -0.4]).unwrap();
            step_euler(&mut state, &inst, 1.0, h, &mut rng).unwrap();
            s0 += state.theta[0] - 0.4;
            s1 += state.theta[1] + 0.4;
        }
        // per-step std of theta_a is about eta sqrt(pi_a) sqrt(h)
        let se = (h.sqrt()) / (n as f64).sqrt() * 3.0;
        assert!((s0 / n as f64).abs() < se, "{}", s0 / n as f64);
        assert!((s1 / n as f64).abs() < se, "{}", s1 / n as f64);
    }

    #[test]
    fn sum_theta_conserved() {
        let inst = BanditInstance::new(vec![1.0, 0.6, 0.2], vec![1.0, 0.5, 1.0]).unwrap();
        let mut state = PolicyState::initial(3);
        let mut rng = rng_for_seed(9);
        for _ in 0..10_000 {
            step_euler(&mut state, &inst, 0.3, 0.01, &mut rng).unwrap();
        }
        assert!(state.theta.iter().sum::<f64>().abs() <= 1e-10);
    }

    #[test]
    fn frozen_eta_zero_regret_is_linear() {
        let inst = two_arm();
        let cfg = SdeConfig::new(0.01, 50.0).unwrap().with_stride(1000);
        let (_, summary) = run_continuous(&inst, 0.0, &cfg, 3, MonitorSet::none()).unwrap();
        // uniform policy forever: R = 0.5, Reg = horizon·0.5
        close(summary.regret, 25.0, 1e-9);
        close(summary.final_pi1, 0.5, 0.0);
    }

    #[test]
    fn same_seed_same_trajectory() {
        let inst = two_arm();
        let cfg = SdeConfig::new(0.01, 10.0).unwrap().with_stride(10);
        let (ta, sa) = run_continuous(&inst, 0.05, &cfg, 42, MonitorSet::none()).unwrap();
        let (tb, sb) = run_continuous(&inst, 0.05, &cfg, 42, MonitorSet::none()).unwrap();
        assert_eq!(ta, tb);
        assert_eq!(sa, sb);
    }

    #[test]
    fn euler_matches_ode_at_first_order() {
        // sigma = 0 reduces to the ODE; halving h should halve the error
        let inst = BanditInstance::with_mode(
            vec![1.0, 0.5, 0.0],
            vec![0.0; 3],
            crate::bandit::ValidationMode::PaperStandard,
        )
        .unwrap();
        let run = |h: f64| {
            let cfg = SdeConfig::new(h, 5.0).unwrap().with_stride(usize::MAX);
            let (traj, _) = run_continuous(&inst, 1.0, &cfg, 0, MonitorSet::none()).unwrap();
            traj.pi1.last().copied().unwrap()
        };
        let reference = run(0.0005);
        let e1 = (run(0.05) - reference).abs();
        let e2 = (run(0.025) - reference).abs();
        let ratio = e1 / e2;
        assert!((1.7..=2.3).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn one_step_noise_covariance() {
        // empirical covariance of dtheta/sqrt(h) against
        // eta^2 (Id - pi 1^T) diag(pi sigma^2) (Id - 1 pi^T)
        let inst =
            BanditInstance::permissive(vec![0.0, 0.0, 0.0], vec![1.0, 0.5, 0.8]).unwrap();
        let theta0 = vec![0.3, -0.1, -0.2];
        let base = PolicyState::from_theta(theta0.clone()).unwrap();
        let pi = base.pi.clone();
        let (eta, h) = (0.7, 1e-3);
        let k = 3;

        // theoretical covariance
        let mut cov = vec![vec![0.0; k]; k];
        let dvar: Vec<f64> =
            (0..k).map(|a| pi[a] * inst.sigma()[a] * inst.sigma()[a]).collect();
        for i in 0..k {
            for j in 0..k {
                let mut v = 0.0;
                for a in 0..k {
                    let pi_ia = if i == a { 1.0 } else { 0.0 } - pi[i];
                    let pj_a = if j == a { 1.0 } else { 0.0 } - pi[j];
                    v += pi_ia * dvar[a] * pj_a;
                }
                cov[i][j] = eta * eta * v;
            }
        }

        let n = 100_000;
        let mut rng = rng_for_seed(17);
        let mut sums = vec![vec![0.0; k]; k];
        let mut means = vec![0.0; k];
        let mut draws = Vec::with_capacity(n);
        for _ in 0..n {
            let mut state = base.clone();
            step_euler(&mut state, &inst, eta, h, &mut rng).unwrap();
            let d: Vec<f64> = (0..k).map(|a| state.theta[a] - theta0[a]).collect();
            for a in 0..k {
                means[a] += d[a];
            }
            draws.push(d);
        }
        for m in &mut means {
            *m /= n as f64;
        }
        for d in &draws {
            for i in 0..k {
                for j in 0..k {
                    sums[i][j] += (d[i] - means[i]) * (d[j] - means[j]);
                }
            }
        }
        for i in 0..k {
            for j in 0..k {
                let emp = sums[i][j] / (n as f64 * h);
                let se = ((cov[i][i] * cov[j][j] + cov[i][j] * cov[i][j]) / n as f64).sqrt();
                assert!(
                    (emp - cov[i][j]).abs() <= 5.0 * se,
                    "cov[{i}][{j}]: emp {emp} vs theory {} (se {se})",
                    cov[i][j]
                );
            }
        }
    }

    #[test]
    fn drifted_bm_single_step_definition() {
        // h = horizon: min is the single Euler increment
        let (min, hit) = simulate_drifted_bm(1.0, 0.5, 4.0, 4.0, 123);
        let mut rng = rng_for_seed(123);
        let expected = 1.0 * 4.0 + 2.0 * standard_normal(&mut rng);
        close(min, expected, 1e-12);
        assert_eq!(hit, min <= -0.5);
    }

    #[test]
    fn drifted_bm_strong_drift_never_hits() {
        for seed in 0..50 {
            let (_, hit) = simulate_drifted_bm(10.0, 5.0, 10.0, 0.01, seed);
            assert!(!hit);
        }
    }

    #[test]
    fn sigmoid_drift_at_origin_is_half() {
        let a = 3.0;
        let drift = a / (0.0f64.exp() + 1.0);
        close(drift, a / 2.0, 0.0);
    }

    #[test]
    fn config_validation() {
        assert!(SdeConfig::new(0.0, 1.0).is_err());
        assert!(SdeConfig::new(-0.1, 1.0).is_err());
        assert!(SdeConfig::new(2.0, 1.0).is_err());
        assert!(SdeConfig::new(0.01, 0.0).is_err());
        let cfg = SdeConfig::new(0.01, 1.0).unwrap();
        assert_eq!(cfg.num_steps(), 100);
        // default step keeps eta sqrt(h) <= 0.05
        for &eta in &[1e-3, 0.05, 0.5, 2.0, 10.0] {
            let h = SdeConfig::default_step(eta);
            assert!(h <= 0.01 + 1e-15);
            assert!(eta * h.sqrt() <= 0.05 + 1e-12, "eta {eta}");
        }
    }
}
