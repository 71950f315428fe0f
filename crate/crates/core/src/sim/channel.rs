use rand_distr::{Distribution, Normal};
use sha2::{Digest, Sha256};

use super::{stream_rng, Topology, STREAM_SHADOWING};
use crate::mfg::MfgParams;

const DISTANCE_FLOOR: f64 = 0.1;

/// Static channel power gains, `|B| × |M|`, including the `η/|B|`
/// normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelGains {
    gain: Vec<f64>,
    n_ues: usize,
}

/// `max(d, 0.1)^(−α)`.
#[inline]
pub fn path_gain(distance: f64, exponent: f64) -> f64 {
    distance.max(DISTANCE_FLOOR).powf(-exponent)
}

/// Gains with 4 dB log-normal shadowing.
pub fn compute_gains(
    topology: &Topology,
    params: &MfgParams,
    pathloss_exponent: f64,
    seed: u64,
) -> ChannelGains {
    compute_gains_with(topology, params, pathloss_exponent, 4.0, seed)
}

/// `g[b][m] = (η/|B|)·max(d, 0.1)^(−α)·s` with `s` log-normal of standard
/// deviation `shadowing_db`, drawn once per link.
pub fn compute_gains_with(
    topology: &Topology,
    params: &MfgParams,
    pathloss_exponent: f64,
    shadowing_db: f64,
    seed: u64,
) -> ChannelGains {
    let n_b = topology.n_sbs();
    let n_m = topology.n_ues();
    let scale = params.eta / n_b as f64;
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut rng = stream_rng(seed, STREAM_SHADOWING);
    let mut gain = Vec::with_capacity(n_b * n_m);
    for b in 0..n_b {
        for m in 0..n_m {
            let z: f64 = normal.sample(&mut rng);
            let shadow = 10f64.powf(shadowing_db * z / 10.0);
            gain.push(scale * path_gain(topology.distance(b, m), pathloss_exponent) * shadow);
        }
    }
    ChannelGains { gain, n_ues: n_m }
}

impl ChannelGains {
    pub fn from_matrix(rows: Vec<Vec<f64>>) -> Self {
        let n_ues = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == n_ues), "ragged gain matrix");
        Self {
            gain: rows.into_iter().flatten().collect(),
            n_ues,
        }
    }

    pub fn n_sbs(&self) -> usize {
        self.gain.len() / self.n_ues.max(1)
    }

    pub fn n_ues(&self) -> usize {
        self.n_ues
    }

    #[inline]
    pub fn gain(&self, sbs: usize, ue: usize) -> f64 {
        self.gain[sbs * self.n_ues + ue]
    }

    /// Interference at `ue`, served by `serving`, when SBS `b` transmits at
    /// `powers[b]`.
    #[inline]
    pub fn interference_at(&self, ue: usize, serving: usize, powers: &[f64]) -> f64 {
        powers
            .iter()
            .enumerate()
            .filter(|(b, _)| *b != serving)
            .map(|(b, p)| p * self.gain(b, ue))
            .sum()
    }

    /// Short hex digest of the gain matrix.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        for g in &self.gain {
            h.update(g.to_le_bytes());
        }
        h.finalize()
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// Mean interference over all UEs when every SBS transmits at `power`.
    pub fn mean_interference(&self, topology: &Topology, power: f64) -> f64 {
        let powers = vec![power; self.n_sbs()];
        let total: f64 = (0..self.n_ues)
            .map(|m| self.interference_at(m, topology.serving[m], &powers))
            .sum();
        total / self.n_ues as f64
    }

    /// Fraction of UEs whose serving gain is at least the median of their
    /// cross-link gains.
    pub fn serving_dominance(&self, topology: &Topology) -> f64 {
        let n_b = self.n_sbs();
        if n_b < 2 {
            return 1.0;
        }
        let dominant = (0..self.n_ues)
            .filter(|&m| {
                let own = topology.serving[m];
                let mut cross: Vec<f64> = (0..n_b)
                    .filter(|b| *b != own)
                    .map(|b| self.gain(b, m))
                    .collect();
                cross.sort_by(f64::total_cmp);
                self.gain(own, m) >= cross[cross.len() / 2]
            })
            .count();
        dominant as f64 / self.n_ues as f64
    }
}
