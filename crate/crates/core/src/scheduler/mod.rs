//! Per-SBS UE scheduling by Lyapunov drift-plus-penalty.
//!
//! Each slot an SBS picks auxiliary variables minimizing `Υᵀν` over the unit
//! simplex and schedules the UE maximizing `q_m·r̂ + Υ_m − V·∂f/∂λ_m`. The
//! virtual queues `Υ` enforce that auxiliaries and schedules share the same
//! time average.

mod dpp;
mod queue;

pub use dpp::{
    argmax_lowest, choose_auxiliary, estimate_rate, pf_gradient, schedule, unit_vector,
    update_averages, virtual_queue_update, ScheduleDecision, SchedulerParams, SchedulerState,
};
pub use queue::{queue_update, QueueStep, UeQueueState};
