use rand::Rng;
use sha2::{Digest, Sha256};

use super::{stream_rng, STREAM_SBS, STREAM_UE};
use crate::error::{ensure, Error, Result};

/// Minimum distance between two SBSs, in normalized length units.
pub const MIN_ISD: f64 = 2.0;
const MAX_ATTEMPTS: usize = 100_000;
/// Consecutive rejections after which a partial layout is discarded.
const RESTART_AFTER: usize = 1_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub sbs_positions: Vec<[f64; 2]>,
    pub ue_positions: Vec<[f64; 2]>,
    /// Served UE indices of each SBS.
    pub association: Vec<Vec<usize>>,
    /// Serving SBS of each UE.
    pub serving: Vec<usize>,
    pub isd: f64,
    pub load_k: usize,
    pub area_side: f64,
}

impl Topology {
    pub fn n_sbs(&self) -> usize {
        self.sbs_positions.len()
    }

    pub fn n_ues(&self) -> usize {
        self.ue_positions.len()
    }

    pub fn distance(&self, sbs: usize, ue: usize) -> f64 {
        let [x0, y0] = self.sbs_positions[sbs];
        let [x1, y1] = self.ue_positions[ue];
        (x1 - x0).hypot(y1 - y0)
    }

    pub fn min_sbs_distance(&self) -> f64 {
        let p = &self.sbs_positions;
        let mut best = f64::INFINITY;
        for a in 0..p.len() {
            for b in a + 1..p.len() {
                best = best.min((p[a][0] - p[b][0]).hypot(p[a][1] - p[b][1]));
            }
        }
        best
    }

    /// Short hex digest of the geometry.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        for p in self.sbs_positions.iter().chain(&self.ue_positions) {
            h.update(p[0].to_le_bytes());
            h.update(p[1].to_le_bytes());
        }
        for s in &self.serving {
            h.update((*s as u64).to_le_bytes());
        }
        h.finalize()
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Random deployment with UEs inside a disk of radius `MIN_ISD / 2` around
/// their SBS.
pub fn generate_topology(n_sbs: usize, isd: f64, load_k: usize, seed: u64) -> Result<Topology> {
    generate_topology_with(n_sbs, isd, load_k, 0.5 * MIN_ISD, seed)
}

/// SBSs are drawn uniformly in a square of side `isd·√n_sbs`, rejecting any
/// candidate closer than [`MIN_ISD`] to an accepted one (a jammed partial
/// layout is restarted); `load_k` UEs are
/// placed uniformly in the disk of radius `ue_radius` around each SBS.
///
/// Candidates are drawn in unit coordinates and scaled by the side, so the
/// same seed yields a geometrically similar layout at every ISD.
pub fn generate_topology_with(
    n_sbs: usize,
    isd: f64,
    load_k: usize,
    ue_radius: f64,
    seed: u64,
) -> Result<Topology> {
    ensure(n_sbs >= 1, "n_sbs", || "must be >= 1".into())?;
    ensure(isd >= MIN_ISD && isd.is_finite(), "isd", || {
        format!("must be >= {MIN_ISD}, got {isd}")
    })?;
    ensure(load_k >= 1, "k", || "must be >= 1".into())?;
    ensure(
        ue_radius > 0.0 && ue_radius.is_finite(),
        "ue_radius",
        || format!("must be > 0, got {ue_radius}"),
    )?;

    let side = isd * (n_sbs as f64).sqrt();
    let mut rng = stream_rng(seed, STREAM_SBS);
    let mut sbs: Vec<[f64; 2]> = Vec::with_capacity(n_sbs);
    let mut attempts = 0;
    let mut rejected = 0;
    while sbs.len() < n_sbs {
        if attempts == MAX_ATTEMPTS {
            return Err(Error::InfeasibleTopology {
                n_sbs,
                isd,
                min_distance: MIN_ISD,
                attempts,
            });
        }
        attempts += 1;
        let c = [side * rng.random::<f64>(), side * rng.random::<f64>()];
        if sbs
            .iter()
            .all(|p| (p[0] - c[0]).hypot(p[1] - c[1]) >= MIN_ISD)
        {
            sbs.push(c);
            rejected = 0;
        } else {
            rejected += 1;
            if rejected == RESTART_AFTER {
                sbs.clear();
                rejected = 0;
            }
        }
    }

    let mut rng = stream_rng(seed, STREAM_UE);
    let mut ue_positions = Vec::with_capacity(n_sbs * load_k);
    let mut association = Vec::with_capacity(n_sbs);
    let mut serving = Vec::with_capacity(n_sbs * load_k);
    for (b, centre) in sbs.iter().enumerate() {
        let mut served = Vec::with_capacity(load_k);
        for _ in 0..load_k {
            let r = ue_radius * rng.random::<f64>().sqrt();
            let theta = std::f64::consts::TAU * rng.random::<f64>();
            served.push(ue_positions.len());
            serving.push(b);
            ue_positions.push([centre[0] + r * theta.cos(), centre[1] + r * theta.sin()]);
        }
        association.push(served);
    }

    Ok(Topology {
        sbs_positions: sbs,
        ue_positions,
        association,
        serving,
        isd,
        load_k,
        area_side: side,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cell() {
        let t = generate_topology(1, 4.0, 3, 7).unwrap();
        assert_eq!(t.n_sbs(), 1);
        assert_eq!(t.n_ues(), 3);
        assert_eq!(t.association, vec![vec![0, 1, 2]]);
        assert!(t.serving.iter().all(|b| *b == 0));
    }

    #[test]
    fn dense_layout_respects_min_distance() {
        let t = generate_topology(16, 2.0, 2, 1).unwrap();
        assert!(t.min_sbs_distance() >= MIN_ISD);
    }

    #[test]
    fn counts_ues() {
        let t = generate_topology(16, 5.75, 5, 42).unwrap();
        assert_eq!(t.n_ues(), 80);
        assert!(t.association.iter().all(|s| s.len() == 5));
    }

    #[test]
    fn ues_are_nearest_to_their_sbs() {
        let t = generate_topology(16, 2.5, 5, 3).unwrap();
        for m in 0..t.n_ues() {
            let own = t.distance(t.serving[m], m);
            assert!((0..t.n_sbs()).all(|b| t.distance(b, m) >= own - 1e-12));
        }
    }

    #[test]
    fn infeasible_packing_is_rejected() {
        let err = generate_topology_with(400, 2.0, 1, 1.0, 0).unwrap_err();
        assert!(matches!(err, Error::InfeasibleTopology { .. }));
    }

    #[test]
    fn invalid_inputs() {
        assert!(generate_topology(0, 3.0, 1, 0).is_err());
        assert!(generate_topology(4, 1.5, 1, 0).is_err());
        assert!(generate_topology(4, 3.0, 0, 0).is_err());
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let a = generate_topology(16, 3.5, 2, 9).unwrap();
        let b = generate_topology(16, 3.5, 2, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.fingerprint(), b.fingerprint());
        assert_ne!(
            a.fingerprint(),
            generate_topology(16, 3.5, 2, 10).unwrap().fingerprint()
        );
    }
}
