/// Backlog of one UE at its serving SBS, in normalized bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UeQueueState {
    pub q: f64,
    pub capacity: f64,
    pub dropped_total: f64,
    pub arrived_total: f64,
}

impl UeQueueState {
    pub fn empty(capacity: f64) -> Self {
        Self {
            q: 0.0,
            capacity,
            dropped_total: 0.0,
            arrived_total: 0.0,
        }
    }
}

impl Default for UeQueueState {
    fn default() -> Self {
        Self::empty(1.0)
    }
}

/// What one queue update moved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueueStep {
    pub state: UeQueueState,
    pub transmitted: f64,
    pub dropped: f64,
}

/// `q' = min(cap, max(0, q + a − s))`; the overflow is dropped and the
/// transmitted amount is `min(q + a, s)`.
pub fn queue_update(state: UeQueueState, arrivals: f64, served: f64) -> QueueStep {
    debug_assert!(arrivals >= 0.0 && served >= 0.0);
    let offered = state.q + arrivals;
    let after = (offered - served).max(0.0);
    let dropped = (after - state.capacity).max(0.0);
    QueueStep {
        state: UeQueueState {
            q: after.min(state.capacity),
            capacity: state.capacity,
            dropped_total: state.dropped_total + dropped,
            arrived_total: state.arrived_total + arrivals,
        },
        transmitted: offered - after,
        dropped,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(q: f64) -> UeQueueState {
        UeQueueState {
            q,
            ..Default::default()
        }
    }

    #[test]
    fn plain_arithmetic() {
        let s = queue_update(at(0.5), 0.2, 0.3);
        assert!((s.state.q - 0.4).abs() < 1e-15);
        assert_eq!(s.dropped, 0.0);
        assert!((s.transmitted - 0.3).abs() < 1e-15);
    }

    #[test]
    fn clamps_at_zero() {
        let s = queue_update(at(0.1), 0.0, 0.5);
        assert_eq!(s.state.q, 0.0);
        assert_eq!(s.dropped, 0.0);
        assert!((s.transmitted - 0.1).abs() < 1e-15);
    }

    #[test]
    fn overflow_is_dropped() {
        let s = queue_update(at(0.9), 0.3, 0.1);
        assert_eq!(s.state.q, 1.0);
        assert!((s.dropped - 0.1).abs() < 1e-12);
        assert!((s.state.dropped_total - 0.1).abs() < 1e-12);
        assert!((s.state.arrived_total - 0.3).abs() < 1e-15);
    }
}
