use std::io::Write;

use rand_distr::{Distribution, Poisson};

use super::metrics::EpisodeMetrics;
use super::{pf_schedule, stream_rng, ChannelGains, Topology, STREAM_ARRIVALS};
use crate::error::{ensure, Error, Result};
use crate::mfg::{data_rate, MfgParams, MfgSolution};
use crate::scheduler::{
    estimate_rate, queue_update, SchedulerParams, SchedulerState, UeQueueState,
};

/// Which power/scheduling pair the SBSs run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolicyKind {
    /// Equilibrium power lookup plus drift-plus-penalty scheduling.
    Proposed(SchedulerParams),
    /// Constant power plus proportional-fair scheduling.
    Baseline { fixed_power: f64, pf_smoothing: f64 },
}

impl PolicyKind {
    pub fn baseline() -> Self {
        PolicyKind::Baseline {
            fixed_power: 10.0,
            pf_smoothing: 0.1,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            PolicyKind::Proposed(_) => "proposed",
            PolicyKind::Baseline { .. } => "baseline",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeConfig {
    /// Measured slots.
    pub n_slots: usize,
    /// Slots run before measurement starts.
    pub warmup_slots: usize,
    pub updates_per_slot: usize,
    /// Slot duration `T`.
    pub slot_length: f64,
    pub queue_capacity: f64,
    /// Bits carried by one Poisson arrival event.
    pub arrival_unit: f64,
    pub record_trace: bool,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        Self {
            n_slots: 200,
            warmup_slots: 20,
            updates_per_slot: 100,
            slot_length: 1.0,
            queue_capacity: 1.0,
            arrival_unit: 0.01,
            record_trace: false,
        }
    }
}

impl EpisodeConfig {
    pub fn validate(&self) -> Result<()> {
        ensure(self.n_slots >= 1, "n_slots", || "must be >= 1".into())?;
        ensure(self.updates_per_slot >= 1, "updates_per_slot", || {
            "must be >= 1".into()
        })?;
        ensure(
            self.slot_length > 0.0 && self.slot_length.is_finite(),
            "slot_length",
            || format!("must be > 0, got {}", self.slot_length),
        )?;
        ensure(
            self.queue_capacity > 0.0 && self.queue_capacity.is_finite(),
            "queue_capacity",
            || format!("must be > 0, got {}", self.queue_capacity),
        )?;
        ensure(
            self.arrival_unit > 0.0 && self.arrival_unit.is_finite(),
            "arrival_unit",
            || format!("must be > 0, got {}", self.arrival_unit),
        )
    }

    pub fn step_length(&self) -> f64 {
        self.slot_length / self.updates_per_slot as f64
    }
}

/// One scheduling decision of one SBS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionRecord {
    pub slot: usize,
    pub sbs: usize,
    pub ue: usize,
    pub score: f64,
    pub q: f64,
    pub upsilon: f64,
    pub r_hat: f64,
}

/// Applied powers and decisions of the measured slots.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EpisodeTrace {
    /// `powers[step * n_sbs + b]`.
    pub powers: Vec<f64>,
    pub n_sbs: usize,
    pub step_length: f64,
    pub decisions: Vec<DecisionRecord>,
}

impl EpisodeTrace {
    /// Recomputes `Σ_steps Σ_b (p_b + p0)·Δt` from the recorded powers.
    pub fn replay_energy(&self, p0: f64) -> f64 {
        self.powers
            .iter()
            .map(|p| (p + p0) * self.step_length)
            .sum()
    }

    pub fn write_decision_log<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "slot,sbs_id,ue_id,score,q,upsilon,r_hat")?;
        for d in &self.decisions {
            writeln!(
                out,
                "{},{},{},{:?},{:?},{:?},{:?}",
                d.slot, d.sbs, d.ue, d.score, d.q, d.upsilon, d.r_hat
            )?;
        }
        Ok(())
    }
}

enum CellScheduler {
    Dpp {
        state: SchedulerState,
        floor_eps: f64,
    },
    Pf {
        avg: Vec<f64>,
        r_hat: Vec<f64>,
        smoothing: f64,
    },
}

/// Runs `warmup_slots + n_slots` slots of `updates_per_slot` fast steps.
///
/// At the start of each slot every SBS picks one UE; during the slot it
/// transmits to that UE only, at a power that depends on the policy. All
/// queues receive Poisson arrivals every step. Only measured slots enter the
/// returned metrics; the backlog left by the warm-up is reported as
/// `initial_backlog`.
pub fn run_episode(
    topology: &Topology,
    gains: &ChannelGains,
    policy: PolicyKind,
    mfg: Option<&MfgSolution>,
    config: &EpisodeConfig,
    params: &MfgParams,
    seed: u64,
) -> Result<EpisodeMetrics> {
    config.validate()?;
    params.validate()?;
    let n_b = topology.n_sbs();
    let n_m = topology.n_ues();
    ensure(
        gains.n_sbs() == n_b && gains.n_ues() == n_m,
        "gains",
        || {
            format!(
                "shape {}x{} does not match topology {n_b}x{n_m}",
                gains.n_sbs(),
                gains.n_ues()
            )
        },
    )?;

    let (mfg, r_hat_first, r_hat_later) = match policy {
        PolicyKind::Proposed(sched) => {
            sched.validate()?;
            let sol = mfg.ok_or(Error::MissingSolution)?;
            let r0 = estimate_rate(sol, 0, params);
            let r1 = estimate_rate(sol, sol.grid.n_t, params);
            (Some(sol), r0, r1)
        }
        PolicyKind::Baseline {
            fixed_power,
            pf_smoothing,
        } => {
            ensure(
                (0.0..=params.p_max).contains(&fixed_power),
                "fixed_power",
                || format!("must lie in [0, {}], got {fixed_power}", params.p_max),
            )?;
            ensure(
                (0.0..=1.0).contains(&pf_smoothing) && pf_smoothing > 0.0,
                "pf_smoothing",
                || format!("must lie in (0, 1], got {pf_smoothing}"),
            )?;
            (None, 0.0, 0.0)
        }
    };

    let mut cells: Vec<CellScheduler> = topology
        .association
        .iter()
        .enumerate()
        .map(|(b, served)| match policy {
            PolicyKind::Proposed(sched) => CellScheduler::Dpp {
                state: SchedulerState::new(served.len(), sched.v),
                floor_eps: sched.floor_eps,
            },
            PolicyKind::Baseline {
                fixed_power,
                pf_smoothing,
            } => {
                // Rate each UE would see with every SBS at the fixed power.
                let powers = vec![fixed_power; n_b];
                let r_hat = served
                    .iter()
                    .map(|&m| {
                        let i = gains.interference_at(m, b, &powers);
                        data_rate(fixed_power, gains.gain(b, m), i, true, params)
                    })
                    .collect();
                CellScheduler::Pf {
                    avg: vec![0.0; served.len()],
                    r_hat,
                    smoothing: pf_smoothing,
                }
            }
        })
        .collect();

    let dt = config.step_length();
    let arrival_rate = params.a_bar * dt / config.arrival_unit;
    let poisson = if arrival_rate > 0.0 {
        Some(
            Poisson::new(arrival_rate).map_err(|e| Error::InvalidParameter {
                name: "a_bar",
                reason: e.to_string(),
            })?,
        )
    } else {
        None
    };
    let mut rng = stream_rng(seed, STREAM_ARRIVALS);

    let mut queues = vec![UeQueueState::empty(config.queue_capacity); n_m];
    let mut metrics = EpisodeMetrics::new(n_b, n_m);
    let mut trace = config.record_trace.then(|| EpisodeTrace {
        n_sbs: n_b,
        step_length: dt,
        ..Default::default()
    });
    let mut scheduled = vec![0usize; n_b];
    let mut powers = vec![0.0; n_b];
    let mut slot_rate = vec![0.0; n_b];

    let q_scale = mfg.map_or(1.0, |s| s.grid.q_max / config.queue_capacity);
    let t_scale = mfg.map_or(1.0, |s| s.grid.horizon / config.updates_per_slot as f64);

    for slot in 0..config.warmup_slots + config.n_slots {
        let measured = slot >= config.warmup_slots;
        if measured && slot == config.warmup_slots {
            metrics.initial_backlog = queues.iter().map(|s| s.q).sum();
        }

        let r_hat_dpp = if slot == 0 { r_hat_first } else { r_hat_later };
        for (b, cell) in cells.iter_mut().enumerate() {
            let served = &topology.association[b];
            let local_q: Vec<f64> = served.iter().map(|&m| queues[m].q).collect();
            let (local, score, upsilon, r_hat) = match cell {
                CellScheduler::Dpp { state, floor_eps } => {
                    let upsilon_before = state.upsilon.clone();
                    let d = state.step(&local_q, r_hat_dpp, *floor_eps);
                    let u = d.scheduled();
                    (u, d.scores[u], upsilon_before[u], r_hat_dpp)
                }
                CellScheduler::Pf { avg, r_hat, .. } => {
                    let u = pf_schedule(avg, r_hat);
                    (u, r_hat[u] / avg[u].max(1e-3), 0.0, r_hat[u])
                }
            };
            scheduled[b] = served[local];
            if let (true, Some(tr)) = (measured, trace.as_mut()) {
                tr.decisions.push(DecisionRecord {
                    slot: slot - config.warmup_slots,
                    sbs: b,
                    ue: served[local],
                    score,
                    q: local_q[local],
                    upsilon,
                    r_hat,
                });
            }
        }

        slot_rate.fill(0.0);
        for step in 0..config.updates_per_slot {
            for b in 0..n_b {
                powers[b] = match (policy, mfg) {
                    (PolicyKind::Baseline { fixed_power, .. }, _) => fixed_power,
                    (PolicyKind::Proposed(_), Some(sol)) => {
                        sol.power_at(step as f64 * t_scale, queues[scheduled[b]].q * q_scale)
                    }
                    (PolicyKind::Proposed(_), None) => unreachable!("checked above"),
                };
            }

            // Arrivals for every UE in a fixed order, independent of policy.
            let arrivals: Vec<f64> = match &poisson {
                Some(dist) => (0..n_m)
                    .map(|_| dist.sample(&mut rng) * config.arrival_unit)
                    .collect(),
                None => vec![0.0; n_m],
            };

            for a in &arrivals {
                metrics.arrival_checksum =
                    (metrics.arrival_checksum ^ a.to_bits()).wrapping_mul(0x0100_0000_01b3);
            }

            let mut served_bits = vec![0.0; n_m];
            for b in 0..n_b {
                let m = scheduled[b];
                let interference = gains.interference_at(m, b, &powers);
                let rate = data_rate(powers[b], gains.gain(b, m), interference, true, params);
                served_bits[m] = rate * dt;
                slot_rate[b] += rate / config.updates_per_slot as f64;
                if measured {
                    metrics.interference_sum += interference;
                    metrics.interference_samples += 1;
                }
            }

            for m in 0..n_m {
                let stepped = queue_update(queues[m], arrivals[m], served_bits[m]);
                queues[m] = stepped.state;
                if measured {
                    let b = topology.serving[m];
                    metrics.bits_arrived += arrivals[m];
                    metrics.bits_transmitted += stepped.transmitted;
                    metrics.bits_dropped += stepped.dropped;
                    metrics.ue_arrived[m] += arrivals[m];
                    metrics.ue_dropped[m] += stepped.dropped;
                    metrics.ue_bits[m] += stepped.transmitted;
                    metrics.sbs_bits[b] += stepped.transmitted;
                }
            }

            if measured {
                for b in 0..n_b {
                    let e = (powers[b] + params.p0) * dt;
                    metrics.energy_consumed += e;
                    metrics.sbs_energy[b] += e;
                    metrics.power_sum += powers[b];
                }
                metrics.power_samples += n_b as u64;
                if let Some(tr) = trace.as_mut() {
                    tr.powers.extend_from_slice(&powers);
                }
            }
        }

        // PF tracks the mean link rate of the slot, not the backlog-limited
        // throughput.
        for (b, cell) in cells.iter_mut().enumerate() {
            if let CellScheduler::Pf { avg, smoothing, .. } = cell {
                let chosen = scheduled[b];
                for (local, &m) in topology.association[b].iter().enumerate() {
                    let achieved = if m == chosen { slot_rate[b] } else { 0.0 };
                    avg[local] = (1.0 - *smoothing) * avg[local] + *smoothing * achieved;
                }
            }
        }
    }

    metrics.final_backlog = queues.iter().map(|s| s.q).sum();
    metrics.trace = trace;
    Ok(metrics)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mfg::{point_mass, solve_mfg, PicardConfig, SolverGrid};
    use crate::sim::{compute_gains, generate_topology};

    fn single_cell() -> (Topology, ChannelGains) {
        let topo = Topology {
            sbs_positions: vec![[0.0, 0.0]],
            ue_positions: vec![[0.5, 0.0]],
            association: vec![vec![0]],
            serving: vec![0],
            isd: 2.0,
            load_k: 1,
            area_side: 2.0,
        };
        (topo, ChannelGains::from_matrix(vec![vec![1.0]]))
    }

    fn short() -> EpisodeConfig {
        EpisodeConfig {
            n_slots: 3,
            warmup_slots: 0,
            record_trace: true,
            ..Default::default()
        }
    }

    #[test]
    fn single_sbs_baseline_rate() {
        let (topo, gains) = single_cell();
        // Keep the queue saturated so service is rate-limited.
        let params = MfgParams {
            a_bar: 500.0,
            ..Default::default()
        };
        let m = run_episode(
            &topo,
            &gains,
            PolicyKind::baseline(),
            None,
            &short(),
            &params,
            1,
        )
        .unwrap();
        let per_unit_time = m.bits_transmitted / 3.0;
        assert!(
            (per_unit_time - 11f64.log2()).abs() < 0.05,
            "{per_unit_time}"
        );
        assert!(m.trace.unwrap().powers.iter().all(|p| *p == 10.0));
    }

    #[test]
    fn empty_system_under_proposed() {
        let params = MfgParams {
            a_bar: 0.0,
            ..Default::default()
        };
        let grid = SolverGrid::new(21, 21).unwrap();
        let rho0 = point_mass(&grid, 0.0);
        let sol = solve_mfg(&grid, &params, &PicardConfig::default(), &rho0).unwrap();
        let topo = generate_topology(4, 3.0, 2, 5).unwrap();
        let gains = compute_gains(&topo, &params, 3.0, 5);
        let policy = PolicyKind::Proposed(SchedulerParams::default());
        let m = run_episode(&topo, &gains, policy, Some(&sol), &short(), &params, 5).unwrap();
        assert_eq!(m.bits_transmitted, 0.0);
        assert_eq!(m.bits_arrived, 0.0);
        assert_eq!(m.outage(), 0.0);
    }

    #[test]
    fn proposed_without_solution_is_rejected() {
        let (topo, gains) = single_cell();
        let policy = PolicyKind::Proposed(SchedulerParams::default());
        let err = run_episode(
            &topo,
            &gains,
            policy,
            None,
            &short(),
            &MfgParams::default(),
            0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::MissingSolution));
    }

    #[test]
    fn baseline_power_outside_range_is_rejected() {
        let (topo, gains) = single_cell();
        let policy = PolicyKind::Baseline {
            fixed_power: 25.0,
            pf_smoothing: 0.1,
        };
        assert!(run_episode(
            &topo,
            &gains,
            policy,
            None,
            &short(),
            &MfgParams::default(),
            0
        )
        .is_err());
    }

    #[test]
    fn accounting_closes() {
        let params = MfgParams::default();
        let topo = generate_topology(9, 3.5, 3, 11).unwrap();
        let gains = compute_gains(&topo, &params, 3.0, 11);
        let cfg = EpisodeConfig {
            n_slots: 10,
            warmup_slots: 2,
            record_trace: true,
            ..Default::default()
        };
        let m = run_episode(
            &topo,
            &gains,
            PolicyKind::baseline(),
            None,
            &cfg,
            &params,
            11,
        )
        .unwrap();
        let lhs = m.bits_arrived + m.initial_backlog;
        let rhs = m.bits_transmitted + m.bits_dropped + m.final_backlog;
        assert!((lhs - rhs).abs() <= 1e-9 * lhs.max(1.0));
        let replay = m.trace.as_ref().unwrap().replay_energy(params.p0);
        assert!((replay - m.energy_consumed).abs() <= 1e-9 * replay);
        assert_eq!(m.trace.as_ref().unwrap().decisions.len(), 10 * 9);
    }
}
