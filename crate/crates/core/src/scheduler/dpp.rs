use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::mfg::{MfgParams, MfgSolution};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchedulerParams {
    /// Drift-plus-penalty tradeoff. The decision subtracts `V·∇f`, so a
    /// negative value rewards UEs with a small scheduling share.
    pub v: f64,
    /// Floor on the running average inside the fairness gradient.
    pub floor_eps: f64,
}

impl Default for SchedulerParams {
    fn default() -> Self {
        Self {
            v: -1.0,
            floor_eps: 1e-3,
        }
    }
}

impl SchedulerParams {
    pub fn validate(&self) -> Result<()> {
        ensure(self.v.is_finite(), "v", || {
            format!("must be finite, got {}", self.v)
        })?;
        ensure(
            self.floor_eps > 0.0 && self.floor_eps <= 1.0,
            "floor_eps",
            || format!("must lie in (0, 1], got {}", self.floor_eps),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleDecision {
    /// Scheduling indicator, a standard unit vector.
    pub lambda: Vec<f64>,
    /// Auxiliary variables, a vertex of the unit simplex.
    pub upsilon_chosen: Vec<f64>,
    pub scores: Vec<f64>,
    scheduled: usize,
    auxiliary: usize,
}

impl ScheduleDecision {
    /// Index of the scheduled UE.
    pub fn scheduled(&self) -> usize {
        self.scheduled
    }

    /// Index of the auxiliary vertex.
    pub fn auxiliary(&self) -> usize {
        self.auxiliary
    }
}

/// Scheduler state of one SBS.
#[derive(Debug, Clone, PartialEq)]
pub struct SchedulerState {
    pub upsilon: Vec<f64>,
    pub lambda_avg: Vec<f64>,
    pub v: f64,
    pub slot_index: u64,
}

impl SchedulerState {
    pub fn new(n_ues: usize, v: f64) -> Self {
        Self {
            upsilon: vec![0.0; n_ues],
            lambda_avg: vec![0.0; n_ues],
            v,
            slot_index: 0,
        }
    }

    /// Decides one slot and advances the virtual queues and running averages.
    pub fn step(&mut self, queues: &[f64], r_hat: f64, floor_eps: f64) -> ScheduleDecision {
        let decision = schedule(
            queues,
            &self.upsilon,
            r_hat,
            &self.lambda_avg,
            self.v,
            floor_eps,
        );
        for (m, u) in self.upsilon.iter_mut().enumerate() {
            *u = virtual_queue_update(*u, decision.upsilon_chosen[m], decision.lambda[m]);
        }
        self.lambda_avg = update_averages(&self.lambda_avg, &decision.lambda, self.slot_index);
        self.slot_index += 1;
        decision
    }
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (m, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = m;
        }
    }
    best
}

pub fn unit_vector(len: usize, index: usize) -> Vec<f64> {
    let mut e = vec![0.0; len];
    e[index] = 1.0;
    e
}

/// `Υ(t+1) = Υ(t) + υ(t) − λ(t)`.
#[inline]
pub fn virtual_queue_update(upsilon: f64, upsilon_chosen: f64, lambda: f64) -> f64 {
    upsilon + upsilon_chosen - lambda
}

/// Minimizer of `Υᵀν` over the unit simplex: the vertex at `argmin Υ`.
pub fn choose_auxiliary(upsilon: &[f64]) -> Vec<f64> {
    unit_vector(upsilon.len(), argmin_lowest(upsilon))
}

fn argmin_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (m, v) in values.iter().enumerate().skip(1) {
        if *v < values[best] {
            best = m;
        }
    }
    best
}

/// Gradient of `Σ log λ_avg` with the averages floored at `floor_eps`.
pub fn pf_gradient(lambda_avg: &[f64], floor_eps: f64) -> Vec<f64> {
    lambda_avg.iter().map(|a| 1.0 / a.max(floor_eps)).collect()
}

/// Drift-plus-penalty decision for one slot.
pub fn schedule(
    queues: &[f64],
    upsilon: &[f64],
    r_hat: f64,
    lambda_avg: &[f64],
    v: f64,
    floor_eps: f64,
) -> ScheduleDecision {
    let m = queues.len();
    assert!(m >= 1, "an SBS needs at least one UE");
    assert_eq!(upsilon.len(), m, "virtual queue length");
    assert_eq!(lambda_avg.len(), m, "running average length");
    let grad = pf_gradient(lambda_avg, floor_eps);
    let scores: Vec<f64> = (0..m)
        .map(|k| queues[k] * r_hat + upsilon[k] - v * grad[k])
        .collect();
    let scheduled = argmax_lowest(&scores);
    let auxiliary = argmin_lowest(upsilon);
    ScheduleDecision {
        lambda: unit_vector(m, scheduled),
        upsilon_chosen: unit_vector(m, auxiliary),
        scores,
        scheduled,
        auxiliary,
    }
}

/// `(n·avg + λ) / (n + 1)`.
pub fn update_averages(lambda_avg: &[f64], lambda: &[f64], slot_index: u64) -> Vec<f64> {
    let n = slot_index as f64;
    lambda_avg
        .iter()
        .zip(lambda)
        .map(|(a, l)| (n * a + l) / (n + 1.0))
        .collect()
}

/// Per-UE rate estimate `ω·log2(1 + P̄/(I + σ²))` from the equilibrium at the
/// time node preceding `slot_t`, where `P̄ = ∫ p*·ρ* dq`. `slot_t = 0` reads
/// node 0.
pub fn estimate_rate(solution: &MfgSolution, slot_t: usize, params: &MfgParams) -> f64 {
    let j = slot_t.saturating_sub(1).min(solution.grid.n_t - 1);
    let mean_power = solution.mean_power(j);
    params.omega
        * (mean_power / (solution.interference[j] + params.sigma2)).ln_1p()
        * std::f64::consts::LOG2_E
}
