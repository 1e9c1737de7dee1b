//! Time-sampled trajectory records and per-run summaries.

use serde::{Deserialize, Serialize};

/// Which stopping condition fired (see [`crate::diagnostics::LowerBoundMonitor`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConditionId {
    /// `S` left the window `((1-delta2)·s - 1, s + 1)`.
    #[serde(rename = "s_window")]
    SWindow,
    /// `Z` reached the arcsinh envelope.
    #[serde(rename = "z_threshold")]
    ZThreshold,
    /// The clock `s(t)` reached its cap.
    #[serde(rename = "s_max")]
    SMax,
}

impl ConditionId {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConditionId::SWindow => "s_window",
            ConditionId::ZThreshold => "z_threshold",
            ConditionId::SMax => "s_max",
        }
    }
}

/// First time a monitored stopping condition held, on the step grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopEvent {
    pub condition: ConditionId,
    pub time: f64,
    /// Clock value `s(t)` at the firing time.
    pub s_value: f64,
}

/// Subsampled path of one simulation run.
///
/// Row `i` describes the state at `times[i]`: the probability of arm 0,
/// the preference gaps `z[i][a-1] = theta_0 - theta_a` for `a >= 1`, the
/// leading-pair sum `S = theta_0 + theta_1`, the clock `s(t)`, and the
/// accumulated regret. Summary statistics are computed from every step,
/// not just the recorded ones.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub pi1: Vec<f64>,
    pub z: Vec<Vec<f64>>,
    pub s_sum: Vec<f64>,
    pub clock_s: Vec<f64>,
    pub regret: Vec<f64>,
    pub stop_events: Vec<StopEvent>,
}

impl Trajectory {
    pub fn with_capacity(n: usize) -> Self {
        Self {
            times: Vec::with_capacity(n),
            pi1: Vec::with_capacity(n),
            z: Vec::with_capacity(n),
            s_sum: Vec::with_capacity(n),
            clock_s: Vec::with_capacity(n),
            regret: Vec::with_capacity(n),
            stop_events: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub(crate) fn push(&mut self, state: &crate::bandit::PolicyState) {
        self.times.push(state.t);
        self.pi1.push(state.pi[0]);
        self.z
            .push(state.theta[1..].iter().map(|&th| state.theta[0] - th).collect());
        self.s_sum.push(state.s_sum());
        self.clock_s.push(state.clock_s);
        self.regret.push(state.cum_regret);
    }

    /// Smallest preference gap at recorded row `i`.
    pub fn z_min(&self, i: usize) -> f64 {
        self.z[i].iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Write the trajectory as CSV with header `t,pi1,Z_min,S,s,regret`.
    pub fn write_csv<W: std::io::Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "t,pi1,Z_min,S,s,regret")?;
        for i in 0..self.len() {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                self.times[i],
                self.pi1[i],
                self.z_min(i),
                self.s_sum[i],
                self.clock_s[i],
                self.regret[i]
            )?;
        }
        Ok(())
    }
}

/// Terminal statistics of one run.
///
/// `regret` is the realized regret (sum of drawn-arm gaps in discrete time,
/// integrated instantaneous regret in continuous time); `pseudo_regret`
/// accumulates `<pi_t, gaps>` along the policy path. The two coincide for
/// the continuous engine. The `tau_*` fields are present iff a monitored
/// stopping condition fired.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub eta: f64,
    pub final_pi1: f64,
    pub regret: f64,
    pub pseudo_regret: f64,
    pub diverged: bool,
    pub tau_condition: Option<ConditionId>,
    pub tau_time: Option<f64>,
    pub tau_s: Option<f64>,
    #[serde(rename = "min_Z")]
    pub min_z: f64,
    pub min_theta: f64,
}
