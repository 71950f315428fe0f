use super::EpisodeTrace;

/// Accumulated counters of one episode's measured slots.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeMetrics {
    pub bits_transmitted: f64,
    /// Transmit plus circuit energy, `Σ (p_b + p0)·Δt`.
    pub energy_consumed: f64,
    pub bits_arrived: f64,
    pub bits_dropped: f64,
    /// Total backlog when measurement started.
    pub initial_backlog: f64,
    pub final_backlog: f64,
    pub sbs_bits: Vec<f64>,
    pub sbs_energy: Vec<f64>,
    pub ue_arrived: Vec<f64>,
    pub ue_dropped: Vec<f64>,
    pub ue_bits: Vec<f64>,
    pub interference_sum: f64,
    pub interference_samples: u64,
    pub power_sum: f64,
    pub power_samples: u64,
    /// Order-sensitive hash of every arrival draw, warm-up included.
    pub arrival_checksum: u64,
    pub trace: Option<EpisodeTrace>,
}

impl EpisodeMetrics {
    pub fn new(n_sbs: usize, n_ues: usize) -> Self {
        Self {
            bits_transmitted: 0.0,
            energy_consumed: 0.0,
            bits_arrived: 0.0,
            bits_dropped: 0.0,
            initial_backlog: 0.0,
            final_backlog: 0.0,
            sbs_bits: vec![0.0; n_sbs],
            sbs_energy: vec![0.0; n_sbs],
            ue_arrived: vec![0.0; n_ues],
            ue_dropped: vec![0.0; n_ues],
            ue_bits: vec![0.0; n_ues],
            interference_sum: 0.0,
            interference_samples: 0,
            power_sum: 0.0,
            power_samples: 0,
            arrival_checksum: 0xcbf2_9ce4_8422_2325,
            trace: None,
        }
    }

    /// Bits per unit energy; 0 when nothing was spent.
    pub fn ee(&self) -> f64 {
        ratio_or_zero(self.bits_transmitted, self.energy_consumed)
    }

    /// Dropped fraction of arrived bits, with 0/0 → 0.
    pub fn outage(&self) -> f64 {
        ratio_or_zero(self.bits_dropped, self.bits_arrived).min(1.0)
    }

    pub fn sbs_ee(&self) -> Vec<f64> {
        self.sbs_bits
            .iter()
            .zip(&self.sbs_energy)
            .map(|(b, e)| ratio_or_zero(*b, *e))
            .collect()
    }

    /// Fraction of UEs that lost at least one bit.
    pub fn ue_outage_fraction(&self) -> f64 {
        if self.ue_dropped.is_empty() {
            return 0.0;
        }
        self.ue_dropped.iter().filter(|d| **d > 0.0).count() as f64 / self.ue_dropped.len() as f64
    }

    /// Mean interference seen by scheduled UEs.
    pub fn mean_interference(&self) -> f64 {
        ratio_or_zero(self.interference_sum, self.interference_samples as f64)
    }

    pub fn mean_power(&self) -> f64 {
        ratio_or_zero(self.power_sum, self.power_samples as f64)
    }
}

fn ratio_or_zero(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub runs: usize,
    pub ee_mean: f64,
    pub ee_std: f64,
    pub outage_mean: f64,
    pub outage_std: f64,
    pub ue_outage_mean: f64,
    pub interference_mean: f64,
    pub power_mean: f64,
}

impl Summary {
    /// `(EE_self − EE_base) / EE_base`.
    pub fn ee_gain_over(&self, baseline: &Summary) -> f64 {
        relative_ee_gain(baseline.ee_mean, self.ee_mean)
    }

    /// `(out_base − out_self) / out_base`.
    pub fn outage_reduction_vs(&self, baseline: &Summary) -> f64 {
        relative_outage_reduction(baseline.outage_mean, self.outage_mean)
    }
}

pub fn relative_ee_gain(baseline: f64, proposed: f64) -> f64 {
    (proposed - baseline) / baseline
}

pub fn relative_outage_reduction(baseline: f64, proposed: f64) -> f64 {
    (baseline - proposed) / baseline
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Mean and sample standard deviation across runs.
///
/// # Panics
/// On an empty slice.
pub fn aggregate_metrics(runs: &[EpisodeMetrics]) -> Summary {
    assert!(!runs.is_empty(), "aggregate_metrics needs at least one run");
    let (ee_mean, ee_std) = mean_std(runs.iter().map(EpisodeMetrics::ee));
    let (outage_mean, outage_std) = mean_std(runs.iter().map(EpisodeMetrics::outage));
    let n = runs.len() as f64;
    Summary {
        runs: runs.len(),
        ee_mean,
        ee_std,
        outage_mean,
        outage_std,
        ue_outage_mean: runs
            .iter()
            .map(EpisodeMetrics::ue_outage_fraction)
            .sum::<f64>()
            / n,
        interference_mean: runs
            .iter()
            .map(EpisodeMetrics::mean_interference)
            .sum::<f64>()
            / n,
        power_mean: runs.iter().map(EpisodeMetrics::mean_power).sum::<f64>() / n,
    }
}

/// One-sided sign-test p-value `P(X ≥ wins)` for `X ~ Bin(trials, 1/2)`.
pub fn sign_test_p_value(wins: usize, trials: usize) -> f64 {
    assert!(wins <= trials);
    let mut coeff = 1.0f64;
    let mut tail = 0.0;
    for k in 0..=trials {
        if k >= wins {
            tail += coeff;
        }
        coeff = coeff * (trials - k) as f64 / (k + 1) as f64;
    }
    tail / 2f64.powi(trials as i32)
}
