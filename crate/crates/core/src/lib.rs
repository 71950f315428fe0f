//! Energy-efficient power control and user scheduling for ultra-dense
//! small-cell downlinks.
//!
//! The crate has three layers:
//!
//! * [`mfg`] solves the queue-state mean-field game: a backward
//!   Hamilton-Jacobi-Bellman sweep yields the value function and the
//!   transmit-power policy, a forward Fokker-Planck sweep transports the
//!   queue density, and a damped Picard loop couples the two through the
//!   mean-field interference.
//! * [`scheduler`] is the per-SBS Lyapunov drift-plus-penalty scheduler that
//!   consumes the rate estimate derived from the equilibrium.
//! * [`sim`] generates random dense deployments and runs episodes of the
//!   proposed policy against a fixed-power, proportional-fair baseline.

pub mod error;
pub mod mfg;
pub mod quadrature;
pub mod scheduler;
pub mod sim;

pub use error::{Error, Result};
pub use mfg::{
    default_initial_density, solve_mfg, MfgParams, MfgSolution, PicardConfig, SolverGrid, Surface,
};
pub use scheduler::{ScheduleDecision, SchedulerParams, SchedulerState, UeQueueState};
pub use sim::{
    aggregate_metrics, compute_gains, generate_topology, run_episode, ChannelGains, EpisodeConfig,
    EpisodeMetrics, PolicyKind, Summary, Topology,
};
