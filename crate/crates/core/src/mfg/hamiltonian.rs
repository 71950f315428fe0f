//! Pointwise maximization of the HJB Hamiltonian over transmit power.

use super::MfgParams;

const SCAN_POINTS: usize = 64;
const GOLDEN_REL_TOL: f64 = 1e-11;

/// Instantaneous rate `ω·λ·log2(1 + p·gain / (I + σ²))` of a UE.
#[inline]
pub fn data_rate(p: f64, gain: f64, interference: f64, scheduled: bool, params: &MfgParams) -> f64 {
    if !scheduled || p == 0.0 {
        return 0.0;
    }
    params.omega * (p * gain / (interference + params.sigma2)).ln_1p() * std::f64::consts::LOG2_E
}

/// Energy efficiency `rate / (p + p0)`.
#[inline]
pub fn ee_utility(rate: f64, p: f64, params: &MfgParams) -> f64 {
    rate / (p + params.p0)
}

/// Maximizes `f` over `[lo, hi]`: a 64-point scan locates the best bracket,
/// golden-section search refines it. Ties go to the smaller argument.
pub fn maximize_scalar(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    if hi <= lo {
        return (lo, f(lo));
    }
    let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let node = |k: usize| {
        if k + 1 == SCAN_POINTS {
            hi
        } else {
            lo + k as f64 * step
        }
    };

    let mut best_k = 0;
    let mut best = f(lo);
    for k in 1..SCAN_POINTS {
        let v = f(node(k));
        if v > best {
            best = v;
            best_k = k;
        }
    }

    let a = node(best_k.saturating_sub(1));
    let b = node((best_k + 1).min(SCAN_POINTS - 1));
    let (gx, gv) = golden_section(&mut f, a, b, GOLDEN_REL_TOL * (hi - lo));
    if gv > best {
        (gx, gv)
    } else {
        (node(best_k), best)
    }
}

fn golden_section(f: &mut impl FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// One-sided value gradients around a queue node. A missing side marks a
/// boundary: `backward == None` at `q = 0`, `forward == None` at `q_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stencil {
    pub forward: Option<f64>,
    pub backward: Option<f64>,
}

impl Stencil {
    pub fn interior(forward: f64, backward: f64) -> Self {
        Self {
            forward: Some(forward),
            backward: Some(backward),
        }
    }

    /// Same gradient on both sides.
    pub fn uniform(gradient: f64) -> Self {
        Self::interior(gradient, gradient)
    }

    /// Stencil of node `i` of `values` with spacing `dq`.
    pub fn at(values: &[f64], i: usize, dq: f64) -> Self {
        let n = values.len();
        Self {
            forward: (i + 1 < n).then(|| (values[i + 1] - values[i]) / dq),
            backward: (i > 0).then(|| (values[i] - values[i - 1]) / dq),
        }
    }
}

/// Maximizer of the Hamiltonian at one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Control {
    pub power: f64,
    /// Hamiltonian value at `power`.
    pub value: f64,
    /// Effective queue drift under `power`.
    pub drift: f64,
}

pub trait Hamiltonian {
    fn maximize(&self, stencil: Stencil, interference: f64) -> Control;

    /// Upper bound on `|drift|` over every admissible control.
    fn drift_bound(&self, interference: f64) -> f64;
}

/// The energy-efficiency Hamiltonian
/// `H(p) = (Ā − r(p))·∂Γ/∂q + r(p)/(p + p0)`, upwinded per candidate power:
/// the forward gradient is used where the drift is positive and the backward
/// one where it is negative.
///
/// At `q = 0` the queue is empty, so the served rate is capped at the arrival
/// rate and the drift cannot point outward. At `q_max` arrivals beyond
/// capacity are dropped and the drift cannot point outward either.
#[derive(Debug, Clone, Copy)]
pub struct EnergyEfficiency {
    params: MfgParams,
}

impl EnergyEfficiency {
    pub fn new(params: &MfgParams) -> Self {
        Self { params: *params }
    }

    /// `(H(p), drift)` for a candidate power.
    #[inline]
    pub fn evaluate(&self, p: f64, stencil: Stencil, interference: f64) -> (f64, f64) {
        let prm = &self.params;
        let a = prm.a_bar;
        let r = prm.generic_rate(p, interference);
        let cost = p + prm.p0;
        match (stencil.forward, stencil.backward) {
            (Some(fwd), Some(bwd)) => {
                let d = a - r;
                let g = if d > 0.0 { fwd } else { bwd };
                (d * g + r / cost, d)
            }
            (Some(fwd), None) => {
                let served = r.min(a);
                let d = a - served;
                (d * fwd + served / cost, d)
            }
            (None, Some(bwd)) => {
                let d = (a - r).min(0.0);
                (d * bwd + r / cost, d)
            }
            (None, None) => (r / cost, 0.0),
        }
    }
}

impl Hamiltonian for EnergyEfficiency {
    fn maximize(&self, stencil: Stencil, interference: f64) -> Control {
        let (power, value) = maximize_scalar(
            |p| self.evaluate(p, stencil, interference).0,
            0.0,
            self.params.p_max,
        );
        let (_, drift) = self.evaluate(power, stencil, interference);
        Control {
            power,
            value,
            drift,
        }
    }

    fn drift_bound(&self, interference: f64) -> f64 {
        let a = self.params.a_bar;
        let r_max = self.params.generic_rate(self.params.p_max, interference);
        a.max(r_max - a)
    }
}

/// Maximizer over `p ∈ [0, p_max]` of `(Ā − r(p))·dΓ/dq + r(p)/(p + p0)`.
/// Returns `(p_opt, H(p_opt))`.
pub fn hamiltonian_maximize(dgamma_dq: f64, interference: f64, params: &MfgParams) -> (f64, f64) {
    let c = EnergyEfficiency::new(params).maximize(Stencil::uniform(dgamma_dq), interference);
    (c.power, c.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_params() -> MfgParams {
        MfgParams {
            omega: 1.0,
            sigma2: 1.0,
            mean_gain: 1.0,
            p0: 1.0,
            p_max: 20.0,
            ..Default::default()
        }
    }

    #[test]
    fn rate_examples() {
        let p = unit_params();
        assert_eq!(data_rate(1.0, 1.0, 0.0, true, &p), 1.0);
        assert_eq!(data_rate(3.0, 1.0, 0.0, false, &p), 0.0);
        let wide = MfgParams { omega: 10.0, ..p };
        assert!((data_rate(3.0, 1.0, 2.0, true, &wide) - 10.0).abs() < 1e-12);
        assert_eq!(data_rate(0.0, 1.0, 0.0, true, &p), 0.0);
    }

    #[test]
    fn utility_examples() {
        let p = unit_params();
        assert_eq!(ee_utility(2.0, 1.0, &p), 1.0);
        assert_eq!(ee_utility(0.0, 0.0, &p), 0.0);
        let e = std::f64::consts::E;
        let v = ee_utility(std::f64::consts::LOG2_E, e - 1.0, &p);
        assert!((v - std::f64::consts::LOG2_E / e).abs() < 1e-15);
        assert!((v - 0.5307).abs() < 1e-4);
    }

    #[test]
    fn pure_efficiency_optimum_is_e_minus_one() {
        let (p, h) = hamiltonian_maximize(0.0, 0.0, &unit_params());
        let e = std::f64::consts::E;
        assert!((p - (e - 1.0)).abs() < 1e-6, "p = {p}");
        assert!((h - std::f64::consts::LOG2_E / e).abs() < 1e-12);
    }

    #[test]
    fn zero_ceiling_forces_zero_power() {
        let prm = MfgParams {
            p_max: 0.0,
            ..unit_params()
        };
        for g in [-50.0, 0.0, 3.0] {
            assert_eq!(hamiltonian_maximize(g, 1.0, &prm).0, 0.0);
        }
    }

    #[test]
    fn steep_negative_gradient_saturates() {
        let (p, _) = hamiltonian_maximize(-100.0, 0.0, &unit_params());
        assert_eq!(p, 20.0);
    }

    #[test]
    fn empty_queue_without_arrivals_stays_silent() {
        let prm = MfgParams {
            a_bar: 0.0,
            ..unit_params()
        };
        let h = EnergyEfficiency::new(&prm);
        let c = h.maximize(
            Stencil {
                forward: Some(-4.0),
                backward: None,
            },
            3.0,
        );
        assert_eq!(c.power, 0.0);
        assert_eq!(c.drift, 0.0);
    }

    #[test]
    fn empty_queue_serves_exactly_the_arrivals() {
        let prm = unit_params();
        let h = EnergyEfficiency::new(&prm);
        let interference = 2.0;
        let c = h.maximize(
            Stencil {
                forward: Some(-4.0),
                backward: None,
            },
            interference,
        );
        let expected = (2f64.powf(prm.a_bar) - 1.0) * (interference + prm.sigma2);
        assert!(
            (c.power - expected).abs() < 1e-6,
            "{} vs {expected}",
            c.power
        );
    }

    #[test]
    fn scalar_maximizer_prefers_smaller_argument_on_ties() {
        let (x, v) = maximize_scalar(|_| 1.0, 0.0, 5.0);
        assert_eq!((x, v), (0.0, 1.0));
    }
}
