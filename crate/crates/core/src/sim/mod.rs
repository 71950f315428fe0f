//! Monte-Carlo simulation of a dense small-cell downlink.
//!
//! Every randomized ingredient draws from its own ChaCha stream derived from
//! the run seed, so SBS layout, UE placement, shadowing and arrivals are
//! shared between policies (and, in normalized form, across ISD values) for
//! the same seed.

mod channel;
mod episode;
mod metrics;
mod pf;
mod topology;

pub use channel::{compute_gains, compute_gains_with, path_gain, ChannelGains};
pub use episode::{run_episode, DecisionRecord, EpisodeConfig, EpisodeTrace, PolicyKind};
pub use metrics::{
    aggregate_metrics, relative_ee_gain, relative_outage_reduction, sign_test_p_value,
    EpisodeMetrics, Summary,
};
pub use pf::pf_schedule;
pub use topology::{generate_topology, generate_topology_with, Topology, MIN_ISD};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) const STREAM_SBS: u64 = 1;
pub(crate) const STREAM_UE: u64 = 2;
pub(crate) const STREAM_SHADOWING: u64 = 3;
pub(crate) const STREAM_ARRIVALS: u64 = 4;

pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
