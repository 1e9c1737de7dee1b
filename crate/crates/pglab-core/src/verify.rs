//! Named verification checks over the whole crate: algebraic identities at
//! float precision, Monte Carlo tests of the probabilistic statements, and
//! reproducibility checks. The CLI `verify` subcommand and the acceptance
//! test suite both run these.
//!
//! Every check is deterministic: all Monte Carlo uses fixed seeds.

use std::time::Instant;

use rayon::prelude::*;

use crate::bandit::{
    instant_regret, policy_gradient, softmax, value, BanditInstance, PolicyState,
};
use crate::bounds;
use crate::diagnostics::{
    check_pi1_bound, lower_sde_coefficients, potential, potential_derivative,
    potential_second_derivative, z_coefficients, LowerBoundMonitor, PotentialParams,
};
use crate::discrete::{run_discrete, sample_action};
use crate::experiments::{
    discrete_continuous_consistency, estimate_hitting_prob, lower_bound_instance,
    two_arm_instance, uniform_gap_instance, ScalarSdeKind,
};
use crate::rng::{rng_for_seed, uniform01};
use crate::sde::{run_continuous, step_euler, MonitorSet, SdeConfig};
use rand::Rng;

/// How much work the Monte Carlo checks do.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    /// Scaled-down smoke run; thresholds are unchanged, so marginal checks
    /// may flip. Use for quick iteration only.
    Quick,
    /// The full pinned parameters.
    Full,
}

impl Budget {
    fn scale(&self, n: u64) -> u64 {
        match self {
            Budget::Quick => (n / 10).max(20),
            Budget::Full => n,
        }
    }
}

/// Result of one named check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// Headline measured value (meaning depends on the check).
    pub measured: f64,
    /// The threshold the measurement is compared against.
    pub threshold: f64,
    /// Human-readable comparison direction, e.g. "<=".
    pub cmp: &'static str,
    pub detail: String,
    pub runtime_ms: u128,
}

impl CheckOutcome {
    fn build(
        name: &'static str,
        passed: bool,
        measured: f64,
        threshold: f64,
        cmp: &'static str,
        detail: String,
        started: Instant,
    ) -> Self {
        Self {
            name,
            passed,
            measured,
            threshold,
            cmp,
            detail,
            runtime_ms: started.elapsed().as_millis(),
        }
    }
}

impl std::fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {:<34} measured {:.6e} {} {:.6e} ({} ms){}{}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.cmp,
            self.threshold,
            self.runtime_ms,
            if self.detail.is_empty() { "" } else { " — " },
            self.detail
        )
    }
}

/// Named check suites, mirroring the CLI `--suite` flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Identities,
    Lemmas,
    Hitting,
    All,
}

/// Run a suite. `seeds_override` replaces the Monte Carlo path count of the
/// hitting-probability checks.
pub fn run_suite(suite: Suite, budget: Budget, seeds_override: Option<u64>) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    if matches!(suite, Suite::Identities | Suite::All) {
        out.push(check_softmax_policy_basics());
        out.push(check_gradient_finite_difference());
        out.push(check_identity_suite(budget));
        out.push(check_potential_grids());
        out.push(check_pi1_bound_sweep(budget));
        out.push(check_z_threshold_relaxation_grid());
        out.push(check_bound_monotonicity());
        out.push(check_action_sampling());
        out.push(check_euler_ode_refinement());
        out.push(check_step_noise_covariance(budget));
        out.push(check_run_determinism());
        out.push(check_stop_rule_consistency());
    }
    if matches!(suite, Suite::Lemmas | Suite::All) {
        out.push(check_zero_sum_conservation(budget));
        out.push(check_theta_floor_probability(budget));
        out.push(check_z_floor_probability(budget));
        out.push(check_two_arm_regret_bound(budget));
        out.push(check_small_eta_regime(budget));
        out.push(check_winner_picking(budget));
        out.push(check_engine_consistency(budget));
    }
    if matches!(suite, Suite::Hitting | Suite::All) {
        let seeds = seeds_override.unwrap_or(10_000);
        out.push(check_drifted_bm_hitting(seeds));
        out.push(check_plain_bm_reflection(seeds));
        out.push(check_sigmoid_strong_drift(seeds));
    }
    out
}

// ---------------------------------------------------------------------------
// Small shared helpers
// ---------------------------------------------------------------------------

/// Central finite differences of `value()`; the independent oracle for the
/// closed-form gradient.
pub fn finite_difference_gradient(theta: &[f64], inst: &BanditInstance, h: f64) -> Vec<f64> {
    let mut grad = Vec::with_capacity(theta.len());
    let mut probe = theta.to_vec();
    for i in 0..theta.len() {
        probe[i] = theta[i] + h;
        let up = value(&probe, inst).unwrap();
        probe[i] = theta[i] - h;
        let down = value(&probe, inst).unwrap();
        probe[i] = theta[i];
        grad.push((up - down) / (2.0 * h));
    }
    grad
}

/// Composite Simpson quadrature on `[0, u]` (signed).
fn simpson<F: Fn(f64) -> f64>(f: F, u: f64, panels: usize) -> f64 {
    let n = panels * 2;
    let h = u / n as f64;
    let mut acc = f(0.0) + f(u);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(i as f64 * h);
    }
    acc * h / 3.0
}

fn binomial_bound(p: f64, seeds: u64) -> f64 {
    p + 3.0 * (p * (1.0 - p) / seeds as f64).sqrt()
}

// ---------------------------------------------------------------------------
// Identities suite
// ---------------------------------------------------------------------------

/// Softmax simplex/shift-invariance and regret non-negativity spot checks.
pub fn check_softmax_policy_basics() -> CheckOutcome {
    let started = Instant::now();
    let mut rng = rng_for_seed(0x50f7);
    let mut worst = 0.0f64;
    let mut regret_ok = true;
    for _ in 0..2000 {
        let k = rng.gen_range(2..=10);
        let theta: Vec<f64> = (0..k).map(|_| rng.gen_range(-8.0..8.0)).collect();
        let pi = softmax(&theta).unwrap();
        worst = worst.max((pi.iter().sum::<f64>() - 1.0).abs());
        assert!(pi.iter().all(|&p| p >= 0.0));
        let c = rng.gen_range(-100.0..100.0);
        let shifted: Vec<f64> = theta.iter().map(|x| x + c).collect();
        let pi_shift = softmax(&shifted).unwrap();
        for (p, q) in pi.iter().zip(&pi_shift) {
            worst = worst.max((p - q).abs());
        }
        let mut mu: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..1.0)).collect();
        mu.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let inst = BanditInstance::permissive(mu, vec![1.0; k]).unwrap();
        if instant_regret(&pi, &inst).unwrap() < -1e-12 {
            regret_ok = false;
        }
    }
    CheckOutcome::build(
        "softmax-policy-basics",
        worst <= 1e-12 && regret_ok,
        worst,
        1e-12,
        "<=",
        "max simplex/shift deviation over 2000 random states; regret >= 0".into(),
        started,
    )
}

/// Closed-form gradient vs central finite differences of the value.
pub fn check_gradient_finite_difference() -> CheckOutcome {
    let started = Instant::now();
    let mut rng = rng_for_seed(0x9fad);
    let ks = [2usize, 3, 5, 10];
    let mut worst = 0.0f64;
    let mut worst_orth = 0.0f64;
    for trial in 0..1000 {
        let k = ks[trial % ks.len()];
        let theta: Vec<f64> = (0..k).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let mu: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..1.0)).collect();
        let inst = BanditInstance::permissive(mu, vec![1.0; k]).unwrap();
        let grad = policy_gradient(&theta, &inst).unwrap();
        let fd = finite_difference_gradient(&theta, &inst, 1e-5);
        let scale = grad
            .iter()
            .map(|g| g.abs())
            .fold(0.0f64, f64::max)
            .max(1e-12);
        let err = grad
            .iter()
            .zip(&fd)
            .map(|(g, f)| (g - f).abs())
            .fold(0.0f64, f64::max)
            / scale;
        worst = worst.max(err);
        worst_orth = worst_orth.max(grad.iter().sum::<f64>().abs());
    }
    CheckOutcome::build(
        "gradient-finite-difference",
        worst <= 1e-6 && worst_orth <= 1e-12,
        worst,
        1e-6,
        "<=",
        format!("1000 random (theta, mu), k in {{2,3,5,10}}; max <1,grad> = {worst_orth:.2e}"),
        started,
    )
}

/// Dual-route identities: gap drift both ways, the two-leaders
/// coefficients, the tanh contrast, and the alpha/sigma^2 envelopes.
pub fn check_identity_suite(budget: Budget) -> CheckOutcome {
    let started = Instant::now();
    let states = budget.scale(10_000);
    let mut rng = rng_for_seed(0x1d5);
    let tol = 1e-12;
    let mut worst = 0.0f64;
    let mut inequality_failures = 0u64;

    // generic-instance gap coefficients
    for _ in 0..states {
        let k = [2usize, 3, 5, 10][rng.gen_range(0..4)];
        let theta: Vec<f64> = (0..k).map(|_| rng.gen_range(-6.0..6.0)).collect();
        let mu: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..1.0)).collect();
        let inst = BanditInstance::permissive(mu, vec![1.0; k]).unwrap();
        let state = PolicyState::from_theta(theta).unwrap();
        let eta = 10f64.powf(rng.gen_range(-3.0..0.0));
        let arm = rng.gen_range(1..k);
        let c = z_coefficients(&state, &inst, eta, arm).unwrap();
        let err = (c.drift - c.drift_direct).abs() / c.drift.abs().max(c.drift_direct.abs()).max(1.0);
        worst = worst.max(err);
    }

    // lower-bound family two-leaders decomposition
    for _ in 0..states {
        let k = [3usize, 4, 5, 8, 12, 20, 32][rng.gen_range(0..7)];
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
        let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1.0);
        worst = worst.max(rel(c.drift_s, c.drift_s_direct));
        worst = worst.max(rel(c.diff_s, c.diff_s_direct));
        worst = worst.max(rel(c.pi_contrast, c.tanh_half_z));
        worst = worst.max(rel(c.mass_ratio, c.mass_ratio_direct));
        worst = worst.max(rel(c.diff_z, c.diff_z_direct));
        // massaged gap drift vs the generic-route drift
        let zc = z_coefficients(&state, &inst, eta, 1).unwrap();
        worst = worst.max(rel(c.drift_z, zc.drift));
        // envelopes are exact inequalities
        if !(c.alpha <= 1.0 + 2.0 * c.mass_ratio) {
            inequality_failures += 1;
        }
        if !(1.0 - c.tanh_half_z * c.tanh_half_z <= c.sigma2
            && c.sigma2 <= 1.0 + 4.0 * c.mass_ratio)
        {
            inequality_failures += 1;
        }
    }

    CheckOutcome::build(
        "algebraic-identity-suite",
        worst <= tol && inequality_failures == 0,
        worst,
        tol,
        "<=",
        format!("{states} generic + {states} two-leader states; inequality failures {inequality_failures}"),
        started,
    )
}

/// Potential-function grids: the cap inequality, the curvature floor with a
/// finite-difference cross-check, and quadrature self-consistency.
pub fn check_potential_grids() -> CheckOutcome {
    let started = Instant::now();
    let mut worst_cap = f64::NEG_INFINITY;
    let mut worst_fd = 0.0f64;
    let mut worst_quad = 0.0f64;
    let mut floor_failures = 0u64;
    for k in 2..=50 {
        for &n in &[10.0, 1e4] {
            for &delta in &[1.0 / n, 0.1] {
                let p = PotentialParams::new(k, n, delta).unwrap();
                let l = p.log_ratio();
                let cap = 6.0 * k as f64 * l * (1.0 + k as f64).ln();
                let v = potential(k as f64 * l, &p).unwrap();
                worst_cap = worst_cap.max(v - cap);
            }
        }
    }
    for &(k, n, delta) in &[(2usize, 10.0, 0.1), (7, 1e3, 0.05), (20, 1e4, 1e-4)] {
        let p = PotentialParams::new(k, n, delta).unwrap();
        let l = p.log_ratio();
        let steps = 40;
        for i in 0..=steps {
            // the curvature floor holds for u > -L (equality in the limit)
            let u = -l + 1e-6 + (k as f64 * l + l) * i as f64 / steps as f64;
            // step scaled to the distance from the singularity balances
            // truncation against cancellation
            let h = (u + 1.0 + l) * 1e-4;
            let closed = potential_second_derivative(u, &p).unwrap();
            let fd = (potential(u + h, &p).unwrap() - 2.0 * potential(u, &p).unwrap()
                + potential(u - h, &p).unwrap())
                / (h * h);
            let rel = (closed - fd).abs() / closed.abs().max(1.0);
            worst_fd = worst_fd.max(rel);
            if closed < -potential_derivative(u, &p).unwrap() {
                floor_failures += 1;
            }
        }
        // quadrature of the derivative reproduces the potential
        for &frac in &[-0.9, -0.5, 0.1, 1.0, k as f64] {
            let u = frac * l;
            let quad = simpson(|v| potential_derivative(v, &p).unwrap(), u, 1 << 12);
            worst_quad = worst_quad.max((quad - potential(u, &p).unwrap()).abs());
        }
    }
    let passed = worst_cap <= 0.0 && worst_fd <= 1e-6 && worst_quad <= 1e-8 && floor_failures == 0;
    CheckOutcome::build(
        "potential-grids",
        passed,
        worst_fd,
        1e-6,
        "<=",
        format!(
            "cap slack {worst_cap:.2e} (<= 0), quadrature gap {worst_quad:.2e} (<= 1e-8), curvature floor failures {floor_failures}"
        ),
        started,
    )
}

/// Rejection-sample preference vectors satisfying the preconditions of the
/// inverse-probability bound; count violations.
pub fn check_pi1_bound_sweep(budget: Budget) -> CheckOutcome {
    let started = Instant::now();
    let samples = budget.scale(100_000);
    let mut rng = rng_for_seed(0xb0b);
    let mut accepted = 0u64;
    let mut violations = 0u64;
    while accepted < samples {
        let k = rng.gen_range(2..=20usize);
        let n = [3.0, 10.0, 100.0, 1e4][rng.gen_range(0..4)];
        let delta = rng.gen_range(0.001..0.999);
        let p = PotentialParams::new(k, n, delta).unwrap();
        let l = p.log_ratio();
        let mut theta: Vec<f64> = (0..k).map(|_| rng.gen_range(-l..k as f64 * l)).collect();
        let mean = theta.iter().sum::<f64>() / k as f64;
        for x in &mut theta {
            *x -= mean;
        }
        let check = check_pi1_bound(&theta, &p);
        if check.applicable {
            accepted += 1;
            if !check.holds {
                violations += 1;
            }
        }
    }
    CheckOutcome::build(
        "pi1-inverse-bound-sweep",
        violations == 0,
        violations as f64,
        0.0,
        "==",
        format!("{samples} precondition-satisfying states"),
        started,
    )
}

/// The arcsinh stopping envelope stays below its log relaxation wherever
/// the envelope argument is negative.
pub fn check_z_threshold_relaxation_grid() -> CheckOutcome {
    let started = Instant::now();
    let mut worst = f64::NEG_INFINITY;
    for &eta in &[1e-4, 1e-3, 0.01, 0.05, 0.2, 1.0, 4.0] {
        for &eps in &[0.0, 0.05, 0.1, 0.25] {
            let mut s = 1.4f64;
            while s <= 60.0 {
                if (-s).exp() / 4.0 - 1.0 / 16.0 < 0.0 {
                    let z = bounds::z_threshold(s, eta, eps);
                    worst = worst.max(z.threshold - z.relaxation);
                }
                s += 0.02;
            }
        }
    }
    CheckOutcome::build(
        "z-threshold-relaxation-grid",
        worst <= 1e-12,
        worst,
        1e-12,
        "<=",
        "max (threshold - relaxation) over the (s, eta, eps) grid".into(),
        started,
    )
}

/// Directional monotonicity of every closed-form bound.
pub fn check_bound_monotonicity() -> CheckOutcome {
    let started = Instant::now();
    let mut ok = true;
    let mut detail = String::new();
    let mut expect = |cond: bool, what: &str| {
        if !cond {
            ok = false;
            detail.push_str(what);
            detail.push_str("; ");
        }
    };
    let mut prev = 0.0;
    for &n in &[1.0, 10.0, 100.0, 1e4, 1e6, 1e8] {
        let v = bounds::two_arm_regret_bound(0.1, 0.05, n).value;
        expect(v >= prev, "two-arm bound not nondecreasing in n");
        prev = v;
    }
    for gaps in [[0.05, 0.1], [0.1, 0.2], [0.2, 0.4]] {
        expect(
            bounds::upper_bound_threshold(gaps[1], 1e4) > bounds::upper_bound_threshold(gaps[0], 1e4),
            "threshold not increasing in delta2",
        );
    }
    for ns in [[3.0, 10.0], [10.0, 1e3], [1e3, 1e6]] {
        expect(
            bounds::upper_bound_threshold(0.5, ns[1]) < bounds::upper_bound_threshold(0.5, ns[0]),
            "threshold not decreasing in n",
        );
    }
    expect(
        bounds::bm_drift_bound(2.0, 1.0) < bounds::bm_drift_bound(1.0, 1.0)
            && bounds::bm_drift_bound(1.0, 2.0) < bounds::bm_drift_bound(1.0, 1.0),
        "drifted-BM bound not decreasing in a/eps",
    );
    expect(
        bounds::bm_less_drift_bound(2.0, 1.0, 4.0) < bounds::bm_less_drift_bound(1.0, 1.0, 4.0)
            && bounds::bm_less_drift_bound(1.0, 1.0, 9.0) > bounds::bm_less_drift_bound(1.0, 1.0, 4.0),
        "sigmoid-drift bound direction wrong",
    );
    expect(
        bounds::s_max(0.05, 1e5, 0.1) > bounds::s_max(0.05, 1e4, 0.1)
            && bounds::s_max(0.1, 1e4, 0.1) < bounds::s_max(0.05, 1e4, 0.1),
        "clock cap direction wrong",
    );
    for k in [2usize, 5, 20] {
        expect(
            bounds::upper_bound_regret(k, 0.01, 1e4).value
                < bounds::upper_bound_regret(k, 0.005, 1e4).value,
            "regret bound not decreasing in eta",
        );
    }
    CheckOutcome::build(
        "bound-monotonicity-grid",
        ok,
        if ok { 0.0 } else { 1.0 },
        0.0,
        "==",
        detail,
        started,
    )
}

/// Inverse-CDF action sampling matches the policy to binomial noise.
pub fn check_action_sampling() -> CheckOutcome {
    let started = Instant::now();
    let pi = softmax(&[0.5, 0.0, -0.5, 1.0]).unwrap();
    let n = 100_000u64;
    let mut rng = rng_for_seed(0xac7);
    let mut counts = vec![0u64; pi.len()];
    for _ in 0..n {
        counts[sample_action(&pi, uniform01(&mut rng))] += 1;
    }
    let mut worst_sds = 0.0f64;
    for (a, &p) in pi.iter().enumerate() {
        let se = (p * (1.0 - p) / n as f64).sqrt();
        let freq = counts[a] as f64 / n as f64;
        worst_sds = worst_sds.max((freq - p).abs() / se);
    }
    CheckOutcome::build(
        "action-sampling-frequencies",
        worst_sds <= 3.0,
        worst_sds,
        3.0,
        "<=",
        format!("{n} draws from a fixed 4-arm policy; worst deviation in binomial SDs"),
        started,
    )
}

/// With zero noise the Euler path converges to the gradient flow at first
/// order: halving the step roughly halves the terminal error.
pub fn check_euler_ode_refinement() -> CheckOutcome {
    let started = Instant::now();
    let inst = BanditInstance::with_mode(
        vec![1.0, 0.5, 0.0],
        vec![0.0; 3],
        crate::bandit::ValidationMode::PaperStandard,
    )
    .unwrap();
    let run = |h: f64| {
        let cfg = SdeConfig::new(h, 5.0).unwrap().with_stride(usize::MAX);
        let (traj, _) = run_continuous(&inst, 1.0, &cfg, 0, MonitorSet::none()).unwrap();
        *traj.pi1.last().unwrap()
    };
    let reference = run(0.0005);
    let e1 = (run(0.05) - reference).abs();
    let e2 = (run(0.025) - reference).abs();
    let ratio = e1 / e2;
    CheckOutcome::build(
        "euler-ode-refinement",
        (1.7..=2.3).contains(&ratio),
        ratio,
        2.0,
        "in [1.7, 2.3] around",
        format!("terminal errors {e1:.3e} (h=0.05) vs {e2:.3e} (h=0.025)"),
        started,
    )
}

/// One-step noise covariance against
/// `eta^2 (Id - pi 1^T) diag(pi sigma^2) (Id - 1 pi^T)`.
pub fn check_step_noise_covariance(budget: Budget) -> CheckOutcome {
    let started = Instant::now();
    let n = budget.scale(100_000) as usize;
    let inst = BanditInstance::permissive(vec![0.0, 0.0, 0.0], vec![1.0, 0.5, 0.8]).unwrap();
    let theta0 = vec![0.3, -0.1, -0.2];
    let base = PolicyState::from_theta(theta0.clone()).unwrap();
    let pi = base.pi.clone();
    let (eta, h) = (0.7, 1e-3);
    let k = 3;
    let mut cov = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..k {
            let mut v = 0.0;
            for a in 0..k {
                let li = (if i == a { 1.0 } else { 0.0 }) - pi[i];
                let lj = (if j == a { 1.0 } else { 0.0 }) - pi[j];
                v += li * pi[a] * inst.sigma()[a] * inst.sigma()[a] * lj;
            }
            cov[i][j] = eta * eta * v;
        }
    }
    let mut rng = rng_for_seed(0xc0f1);
    let mut draws = Vec::with_capacity(n);
    let mut means = vec![0.0; k];
    for _ in 0..n {
        let mut st = base.clone();
        step_euler(&mut st, &inst, eta, h, &mut rng).unwrap();
        let d: Vec<f64> = (0..k).map(|a| st.theta[a] - theta0[a]).collect();
        for a in 0..k {
            means[a] += d[a];
        }
        draws.push(d);
    }
    for m in &mut means {
        *m /= n as f64;
    }
    let mut worst_ses = 0.0f64;
    for i in 0..k {
        for j in 0..k {
            let emp: f64 = draws
                .iter()
                .map(|d| (d[i] - means[i]) * (d[j] - means[j]))
                .sum::<f64>()
                / (n as f64 * h);
            let se = ((cov[i][i] * cov[j][j] + cov[i][j] * cov[i][j]) / n as f64).sqrt();
            worst_ses = worst_ses.max((emp - cov[i][j]).abs() / se);
        }
    }
    CheckOutcome::build(
        "step-noise-covariance",
        worst_ses <= 5.0,
        worst_ses,
        5.0,
        "<=",
        format!("{n} one-step replications, worst entry deviation in SEs"),
        started,
    )
}

/// Reruns with the same seed are byte-identical for both engines.
pub fn check_run_determinism() -> CheckOutcome {
    let started = Instant::now();
    let inst = uniform_gap_instance(3, 0.5).unwrap();
    let (ta, sa) = run_discrete(&inst, 0.2, 2000, 42, 100).unwrap();
    let (tb, sb) = run_discrete(&inst, 0.2, 2000, 42, 100).unwrap();
    let cfg = SdeConfig::new(0.01, 20.0).unwrap().with_stride(100);
    let (ca, xa) = run_continuous(&inst, 0.2, &cfg, 42, MonitorSet::none()).unwrap();
    let (cb, xb) = run_continuous(&inst, 0.2, &cfg, 42, MonitorSet::none()).unwrap();
    let bytes_equal = serde_json::to_vec(&(&ta, &sa)).unwrap() == serde_json::to_vec(&(&tb, &sb)).unwrap()
        && serde_json::to_vec(&(&ca, &xa)).unwrap() == serde_json::to_vec(&(&cb, &xb)).unwrap();
    CheckOutcome::build(
        "run-determinism",
        bytes_equal,
        bytes_equal as u64 as f64,
        1.0,
        "==",
        "serialized discrete and continuous runs, same seed twice".into(),
        started,
    )
}

/// The redundant log relaxation never trips while no stopping condition has
/// fired, along monitored lower-bound trajectories.
pub fn check_stop_rule_consistency() -> CheckOutcome {
    let started = Instant::now();
    let (k, eta, horizon, delta2, h) = (20usize, 0.05, 1000.0, 0.002, 0.01);
    let inst = lower_bound_instance(k, delta2).unwrap();
    let steps = (horizon / h) as u64;
    let mut violations = 0u64;
    let mut fires = 0u64;
    for seed in 0..5 {
        let mut mon = LowerBoundMonitor::new(k, eta, horizon, delta2).unwrap();
        let mut rng = rng_for_seed(seed);
        let mut state = PolicyState::initial(k);
        for step in 0..=steps {
            state.t = step as f64 * h;
            mon.observe(state.t, state.s_sum(), state.z_gap(1), state.clock_s);
            if step == steps {
                break;
            }
            let tail = state.tail_mass();
            state.clock_s += eta * tail * (1.0 - tail) * h;
            step_euler(&mut state, &inst, eta, h, &mut rng).unwrap();
        }
        violations += mon.relaxation_violations;
        fires += mon.first_fire.is_some() as u64;
    }
    CheckOutcome::build(
        "stop-rule-consistency",
        violations == 0,
        violations as f64,
        0.0,
        "==",
        format!("relaxation violations over 5 monitored runs of {steps} steps; {fires} runs fired a condition"),
        started,
    )
}

// ---------------------------------------------------------------------------
// Lemmas suite
// ---------------------------------------------------------------------------

/// `sum(theta)` stays within 1e-8 of zero after a million steps of each
/// engine.
pub fn check_zero_sum_conservation(budget: Budget) -> CheckOutcome {
    let started = Instant::now();
    let steps = budget.scale(1_000_000);
    let inst = uniform_gap_instance(5, 0.5).unwrap();
    let worst_discrete: f64 = (0..10u64)
        .into_par_iter()
        .map(|seed| {
            let mut rng = rng_for_seed(seed);
            let mut state = PolicyState::initial(5);
            for _ in 0..steps {
                crate::discrete::step_discrete(&mut state, &inst, 0.1, &mut rng).unwrap();
            }
            state.theta.iter().sum::<f64>().abs()
        })
        .reduce(|| 0.0, f64::max);
    let h = 0.01;
    let worst_continuous: f64 = (0..10u64)
        .into_par_iter()
        .map(|seed| {
            let mut rng = rng_for_seed(1000 + seed);
            let mut state = PolicyState::initial(5);
            for _ in 0..steps {
                step_euler(&mut state, &inst, 0.1, h, &mut rng).unwrap();
            }
            state.theta.iter().sum::<f64>().abs()
        })
        .reduce(|| 0.0, f64::max);
    let worst = worst_discrete.max(worst_continuous);
    CheckOutcome::build(
        "zero-sum-conservation",
        worst <= 1e-8,
        worst,
        1e-8,
        "<=",
        format!(
            "{steps} steps x 10 seeds per engine; discrete {worst_discrete:.2e}, continuous {worst_continuous:.2e}"
        ),
        started,
    )
}

/// Preferences rarely dip below `-log(n/delta)` when `eta <= 1`.
pub fn check_theta_floor_probability(budget: Budget) -> CheckOutcome {
    let started = Instant::now();
    let seeds = budget.scale(500);
    let (k, n, delta, eta, h) = (5usize, 100.0f64, 0.2, 0.5, 0.01);
    let floor = -(n / delta).ln();
    let inst = uniform_gap_instance(k, 0.5).unwrap();
    let steps = (n / h) as u64;
    let counts: Vec<u64> = (0..seeds)
        .into_par_iter()
        .map(|seed| {
            let mut rng = rng_for_seed(seed);
            let mut state = PolicyState::initial(k);
            let mut hit = vec![false; k];
            for _ in 0..steps {
                step_euler(&mut state, &inst, eta, h, &mut rng).unwrap();
                for a in 0..k {
                    if state.theta[a] <= floor {
                        hit[a] = true;
                    }
                }
            }
            hit.iter()
                .enumerate()
                .map(|(a, &h)| (h as u64) << a)
                .sum::<u64>()
        })
        .collect();
    let mut worst_freq = 0.0f64;
    for a in 0..k {
        let freq =
            counts.iter().filter(|&&mask| mask >> a & 1 == 1).count() as f64 / seeds as f64;
        worst_freq = worst_freq.max(freq);
    }
    let bound = binomial_bound(delta, seeds);
    CheckOutcome::build(
        "theta-floor-probability",
        worst_freq <= bound,
        worst_freq,
        bound,
        "<=",
        format!(
            "per-arm frequency of inf theta_a <= {floor:.3}; eta {eta}, k {k}, n {n}, {seeds} seeds"
        ),
        started,
    )
}

/// The preference gap rarely dips below `-delta2/2` when
/// `eta <= delta2^2 / (8 log(2n/delta))`.
pub fn check_z_floor_probability(budget: Budget) -> CheckOutcome {
    let started = Instant::now();
    let seeds = budget.scale(500);
    let (k, n, delta, delta2, h) = (5usize, 100.0f64, 0.1, 0.5, 0.01);
    let eta = delta2 * delta2 / (8.0 * (2.0 * n / delta).ln());
    let inst = uniform_gap_instance(k, delta2).unwrap();
    let steps = (n / h) as u64;
    let counts: Vec<u64> = (0..seeds)
        .into_par_iter()
        .map(|seed| {
            let mut rng = rng_for_seed(seed);
            let mut state = PolicyState::initial(k);
            let mut hit = vec![false; k];
            for _ in 0..steps {
                step_euler(&mut state, &inst, eta, h, &mut rng).unwrap();
                for a in 1..k {
                    if state.z_gap(a) <= -delta2 / 2.0 {
                        hit[a] = true;
                    }
                }
            }
            hit.iter()
                .enumerate()
                .map(|(a, &h)| (h as u64) << a)
                .sum::<u64>()
        })
        .collect();
    let mut worst_freq = 0.0f64;
    for a in 1..k {
        let freq =
            counts.iter().filter(|&&mask| mask >> a & 1 == 1).count() as f64 / seeds as f64;
        worst_freq = worst_freq.max(freq);
    }
    let bound = binomial_bound(delta, seeds);
    CheckOutcome::build(
        "z-floor-probability",
        worst_freq <= bound,
        worst_freq,
        bound,
        "<=",
        format!(
            "per-arm frequency of inf Z_a <= -{:.2}; eta {eta:.4e}, k {k}, n {n}, {seeds} seeds",
            delta2 / 2.0
        ),
        started,
    )
}

/// Two-arm mean regret stays below the closed-form bound.
pub fn check_two_arm_regret_bound(budget: Budget) -> CheckOutcome {
    let started = Instant::now();
    // per-seed regret has sd ~ 48, so 2000 seeds put 2·SE near 2
    let seeds = budget.scale(2000);
    let (delta2, eta, n, h) = (0.1, 0.05, 1e4, 0.01);
    let bound = bounds::two_arm_regret_bound(delta2, eta, n).value;
    let inst = two_arm_instance(delta2).unwrap();
    let cfg = SdeConfig {
        h,
        horizon: n,
        record_stride: usize::MAX,
        clamp_floor: 0.0,
    };
    let regrets: Vec<f64> = (0..seeds)
        .into_par_iter()
        .map(|seed| {
            run_continuous(&inst, eta, &cfg, seed, MonitorSet::none())
                .unwrap()
                .1
                .regret
        })
        .collect();
    let mean = regrets.iter().sum::<f64>() / seeds as f64;
    let var = regrets.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (seeds - 1) as f64;
    let se = (var / seeds as f64).sqrt();
    let measured = mean + 2.0 * se;
    CheckOutcome::build(
        "two-arm-regret-bound-mc",
        measured <= 70.2,
        measured,
        70.2,
        "<=",
        format!(
            "mean {mean:.2} + 2·SE {:.2} over {seeds} seeds vs bound {bound:.4}",
            2.0 * se
        ),
        started,
    )
}

/// Small-learning-rate regime: pseudo-regret slope should flatten and the
/// preference gaps should never collapse.
pub fn check_small_eta_regime(budget: Budget) -> CheckOutcome {
    let started = Instant::now();
    let seeds = budget.scale(200);
    let (k, delta2, n, h) = (5usize, 0.5, 100.0, 0.01);
    let eta = bounds::upper_bound_threshold(delta2, n);
    let inst = uniform_gap_instance(k, delta2).unwrap();
    let steps = (n / h) as u64;
    let quarter = steps / 4;
    let results: Vec<(f64, f64, bool)> = (0..seeds)
        .into_par_iter()
        .map(|seed| {
            let mut rng = rng_for_seed(seed);
            let mut state = PolicyState::initial(k);
            let mut pseudo = 0.0;
            let mut pr_q1 = 0.0;
            let mut pr_q3 = 0.0;
            let mut collapsed = false;
            for step in 0..steps {
                pseudo += instant_regret(&state.pi, &inst).unwrap() * h;
                step_euler(&mut state, &inst, eta, h, &mut rng).unwrap();
                if state.min_z_gap() <= -delta2 / 2.0 {
                    collapsed = true;
                }
                if step + 1 == quarter {
                    pr_q1 = pseudo;
                }
                if step + 1 == 3 * quarter {
                    pr_q3 = pseudo;
                }
            }
            let quarter_span = quarter as f64 * h;
            let slope_first = pr_q1 / quarter_span;
            let slope_last = (pseudo - pr_q3) / quarter_span;
            (slope_first, slope_last, collapsed)
        })
        .collect();
    let mean_first = results.iter().map(|r| r.0).sum::<f64>() / seeds as f64;
    let mean_last = results.iter().map(|r| r.1).sum::<f64>() / seeds as f64;
    let no_collapse_frac =
        results.iter().filter(|r| !r.2).count() as f64 / seeds as f64;
    let slope_ratio = mean_last / mean_first;
    let passed = slope_ratio < 0.5 && no_collapse_frac >= 0.85;
    CheckOutcome::build(
        "small-eta-regime",
        passed,
        slope_ratio,
        0.5,
        "<",
        format!(
            "eta {eta:.4e}, k {k}, n {n}: last/first quarter slope {mean_last:.4}/{mean_first:.4}; no-collapse fraction {no_collapse_frac:.3} (needs >= 0.85)"
        ),
        started,
    )
}

/// Winner-picking on the hard instance: a sizable fraction of discrete runs
/// ends with arm 0 holding less than half the probability.
pub fn check_winner_picking(budget: Budget) -> CheckOutcome {
    let started = Instant::now();
    let seeds = budget.scale(100);
    let (k, delta2, n) = (20usize, 0.002, 200_000u64);
    let inst = lower_bound_instance(k, delta2).unwrap();
    let fraction_below = |eta: f64, seeds: u64| -> f64 {
        let wrong: u64 = (0..seeds)
            .into_par_iter()
            .map(|seed| {
                let (_, s) = run_discrete(&inst, eta, n, seed, n).unwrap();
                (s.final_pi1 < 0.5) as u64
            })
            .sum();
        wrong as f64 / seeds as f64
    };
    let headline = fraction_below(0.05, seeds);
    let grid = [0.2, 0.1, 0.05, 0.02, 0.01, 0.005];
    let grid_seeds = budget.scale(40);
    let fractions: Vec<f64> = grid.iter().map(|&eta| fraction_below(eta, grid_seeds)).collect();
    let monotone_dec = fractions.windows(2).all(|w| w[0] >= w[1]);
    let monotone_inc = fractions.windows(2).all(|w| w[0] <= w[1]);
    let trend = if monotone_dec {
        "monotone decreasing in eta order 0.2->0.005"
    } else if monotone_inc {
        "monotone increasing in eta order 0.2->0.005"
    } else {
        "not monotone"
    };
    let grid_str: Vec<String> = grid
        .iter()
        .zip(&fractions)
        .map(|(e, f)| format!("{e}->{f:.2}"))
        .collect();
    CheckOutcome::build(
        "winner-picking-fraction",
        headline >= 0.2,
        headline,
        0.2,
        ">=",
        format!(
            "final pi1 < 1/2 at eta 0.05 over {seeds} seeds; grid ({} seeds each): {} [{trend}]",
            grid_seeds,
            grid_str.join(", ")
        ),
        started,
    )
}

/// Informational: KS distance between the engines' final `pi_0` samples at
/// a small learning rate.
pub fn check_engine_consistency(budget: Budget) -> CheckOutcome {
    let started = Instant::now();
    let seeds = budget.scale(500);
    let inst = two_arm_instance(0.1).unwrap();
    let report = discrete_continuous_consistency(&inst, 0.005, 1e4, 0.1, seeds, 2024).unwrap();
    CheckOutcome::build(
        "engine-consistency-ks",
        true, // informational: no proven rate to assert
        report.ks,
        0.15,
        "~<",
        format!(
            "final pi1 means: discrete {:.4}, continuous {:.4} over {seeds} seeds/engine (informational)",
            report.mean_final_pi1_discrete, report.mean_final_pi1_continuous
        ),
        started,
    )
}

// ---------------------------------------------------------------------------
// Hitting suite
// ---------------------------------------------------------------------------

/// Drifted Brownian motion hits `-1` at close to the exact rate `e^{-2}`.
pub fn check_drifted_bm_hitting(seeds: u64) -> CheckOutcome {
    let started = Instant::now();
    let est = estimate_hitting_prob(ScalarSdeKind::DriftedBm, 1.0, 1.0, 20.0, 1e-3, seeds, 77);
    let ok = (0.105..=0.150).contains(&est.p_hat);
    CheckOutcome::build(
        "drifted-bm-hitting",
        ok,
        est.p_hat,
        0.1353,
        "in [0.105, 0.150] around",
        format!(
            "a=1, eps=1, horizon 20, h=1e-3, {} paths (se {:.4}); exact infinite-horizon rate e^-2",
            est.num_seeds, est.se
        ),
        started,
    )
}

/// With zero drift the sigmoid SDE is plain Brownian motion; its hitting
/// rate matches the reflection principle.
pub fn check_plain_bm_reflection(seeds: u64) -> CheckOutcome {
    let started = Instant::now();
    let est =
        estimate_hitting_prob(ScalarSdeKind::SigmoidDrift, 0.0, 1.0, 1.0, 1e-4, seeds, 123);
    let target = 0.31731050786291415; // 2·Phi(-1)
    let err = (est.p_hat - target).abs();
    CheckOutcome::build(
        "plain-bm-reflection",
        err <= 0.015,
        est.p_hat,
        target,
        "within 0.015 of",
        format!(
            "a=0, eps=1, horizon 1, h=1e-4, {} paths (se {:.4})",
            est.num_seeds, est.se
        ),
        started,
    )
}

/// Strong sigmoid drift keeps the path away from `-1` entirely.
pub fn check_sigmoid_strong_drift(seeds: u64) -> CheckOutcome {
    let started = Instant::now();
    let est =
        estimate_hitting_prob(ScalarSdeKind::SigmoidDrift, 50.0, 1.0, 100.0, 1e-3, seeds, 55);
    let bound = bounds::bm_less_drift_bound(50.0, 1.0, 100.0);
    CheckOutcome::build(
        "sigmoid-strong-drift",
        est.hits == 0,
        est.hits as f64,
        0.0,
        "==",
        format!(
            "a=50, eps=1, horizon 100, h=1e-3, {} paths; closed-form bound {bound:.2e}",
            est.num_seeds
        ),
        started,
    )
}
