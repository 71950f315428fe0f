use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

/// Physical and game parameters of the generic SBS.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MfgParams {
    /// Bandwidth, in rate units per `log2` factor.
    pub omega: f64,
    /// Noise power.
    pub sigma2: f64,
    /// SBS density factor of the `η/|B|` channel normalization.
    pub eta: f64,
    /// Transmit power ceiling.
    pub p_max: f64,
    /// Fixed circuit power per SBS.
    pub p0: f64,
    /// Mean arrival rate per UE, normalized bits per unit time.
    pub a_bar: f64,
    /// Scale of the terminal penalty `−c·exp(q)`.
    pub terminal_coeff: f64,
    /// `E[|h̃|²]` of the generic serving link.
    pub mean_gain: f64,
    /// Artificial diffusion added to both PDEs.
    pub viscosity_eps: f64,
}

impl Default for MfgParams {
    fn default() -> Self {
        Self {
            omega: 1.0,
            sigma2: 1.0,
            eta: 1.0,
            p_max: 20.0,
            p0: 1.0,
            a_bar: 0.2,
            terminal_coeff: 4.0,
            mean_gain: 1.0,
            viscosity_eps: 1e-3,
        }
    }
}

impl MfgParams {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        let nonneg = |v: f64| v.is_finite() && v >= 0.0;
        ensure(positive(self.omega), "omega", || {
            format!("must be > 0, got {}", self.omega)
        })?;
        ensure(positive(self.sigma2), "sigma2", || {
            format!("must be > 0, got {}", self.sigma2)
        })?;
        ensure(positive(self.eta), "eta", || {
            format!("must be > 0, got {}", self.eta)
        })?;
        ensure(positive(self.p_max), "p_max", || {
            format!("must be > 0, got {}", self.p_max)
        })?;
        ensure(positive(self.p0), "p0", || {
            format!("must be > 0, got {}", self.p0)
        })?;
        ensure(nonneg(self.a_bar), "a_bar", || {
            format!("must be >= 0, got {}", self.a_bar)
        })?;
        ensure(self.terminal_coeff.is_finite(), "terminal_coeff", || {
            format!("must be finite, got {}", self.terminal_coeff)
        })?;
        ensure(nonneg(self.mean_gain), "mean_gain", || {
            format!("must be >= 0, got {}", self.mean_gain)
        })?;
        ensure(nonneg(self.viscosity_eps), "viscosity_eps", || {
            format!("must be >= 0, got {}", self.viscosity_eps)
        })
    }

    /// Rate of the generic scheduled link at power `p` under interference `i`.
    #[inline]
    pub fn generic_rate(&self, p: f64, interference: f64) -> f64 {
        self.omega
            * (p * self.mean_gain / (interference + self.sigma2)).ln_1p()
            * std::f64::consts::LOG2_E
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Error;

    #[test]
    fn defaults_are_valid() {
        MfgParams::default().validate().unwrap();
    }

    #[test]
    fn rejects_negative_power_ceiling() {
        let p = MfgParams {
            p_max: -1.0,
            ..Default::default()
        };
        match p.validate() {
            Err(Error::InvalidParameter { name, .. }) => assert_eq!(name, "p_max"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
