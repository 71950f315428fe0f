use crate::scheduler::argmax_lowest;

const AVG_FLOOR: f64 = 1e-3;

/// Proportional-fair choice `argmax r̂_m / max(avg_m, 10⁻³)`, ties to the
/// lowest index.
pub fn pf_schedule(rate_history_avg: &[f64], r_hat: &[f64]) -> usize {
    assert_eq!(
        rate_history_avg.len(),
        r_hat.len(),
        "PF inputs differ in length"
    );
    let metric: Vec<f64> = r_hat
        .iter()
        .zip(rate_history_avg)
        .map(|(r, a)| r / a.max(AVG_FLOOR))
        .collect();
    argmax_lowest(&metric)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(pf_schedule(&[1.0, 1.0], &[2.0, 1.0]), 0);
        assert_eq!(pf_schedule(&[2.0, 1.0], &[2.0, 2.0]), 1);
        assert_eq!(pf_schedule(&[0.0, 0.0], &[1.0, 1.0]), 0);
    }
}
