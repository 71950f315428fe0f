//! Forward conservative finite-volume sweep of the FPK equation.

use super::{MfgParams, SolverGrid, Surface};
use crate::error::{Error, Result};
use crate::quadrature::{trapezoid, trapezoid_weights};

const MASS_TOL: f64 = 1e-6;

/// Queue drift `Ā − r(p, I)` at each node of a policy row. The end nodes keep
/// only the inward-pointing part: an empty queue cannot drain and a full one
/// cannot grow.
pub fn node_drift(policy_row: &[f64], interference: f64, params: &MfgParams) -> Vec<f64> {
    let n = policy_row.len();
    let mut drift: Vec<f64> = policy_row
        .iter()
        .map(|&p| params.a_bar - params.generic_rate(p, interference))
        .collect();
    drift[0] = drift[0].max(0.0);
    drift[n - 1] = drift[n - 1].min(0.0);
    drift
}

/// Transports `rho0` forward under the drift induced by `policy`.
///
/// Nodes are the centers of dual cells whose widths are the trapezoid weights,
/// so the trapezoidal mass is conserved exactly by the flux form. Interface
/// fluxes are upwinded by node drift, with zero flux through both ends.
/// Row `j` of `policy` and entry `j` of `interference` drive the step from
/// `t_j` to `t_{j+1}`.
pub fn fpk_forward_sweep(
    policy: &Surface,
    interference: &[f64],
    rho0: &[f64],
    grid: &SolverGrid,
    params: &MfgParams,
) -> Result<Surface> {
    let (n_t, n_q) = (grid.n_t, grid.n_q);
    assert_eq!(policy.n_t(), n_t, "policy rows");
    assert_eq!(policy.n_q(), n_q, "policy columns");
    assert_eq!(interference.len(), n_t, "interference trajectory length");
    let dq = grid.dq();
    let dt = grid.dt();
    let eps = params.viscosity_eps;
    let mass0 = validate_density(rho0, n_q, dq)?;

    let w = trapezoid_weights(n_q, dq);
    let mut rho = Surface::zeros(n_t, n_q);
    rho.row_mut(0).copy_from_slice(rho0);
    let mut cur = rho0.to_vec();
    let mut flux = vec![0.0; n_q - 1];

    for j in 0..n_t - 1 {
        let drift = node_drift(policy.row(j), interference[j], params);
        let rate = (0..n_q)
            .map(|i| {
                let neighbours = if i == 0 || i + 1 == n_q { 1.0 } else { 2.0 };
                (drift[i].abs() + neighbours * eps / dq) / w[i]
            })
            .fold(0.0, f64::max);
        let ratio = dt * rate;
        let substeps = super::hjb::required_substeps(ratio);
        if substeps > grid.max_substeps {
            return Err(Error::Cfl {
                sweep: "FPK",
                ratio,
                node: j,
                required: substeps,
                limit: grid.max_substeps,
            });
        }
        let h = dt / substeps as f64;
        for _ in 0..substeps {
            for (i, f) in flux.iter_mut().enumerate() {
                *f = drift[i].max(0.0) * cur[i] + drift[i + 1].min(0.0) * cur[i + 1]
                    - eps * (cur[i + 1] - cur[i]) / dq;
            }
            for i in 0..n_q {
                let right = if i + 1 < n_q { flux[i] } else { 0.0 };
                let left = if i > 0 { flux[i - 1] } else { 0.0 };
                cur[i] -= h * (right - left) / w[i];
            }
            if cur.iter().any(|v| *v < 0.0) {
                for v in cur.iter_mut() {
                    *v = v.max(0.0);
                }
                let m = trapezoid(&cur, dq);
                for v in cur.iter_mut() {
                    *v *= mass0 / m;
                }
            }
        }
        rho.row_mut(j + 1).copy_from_slice(&cur);
    }
    Ok(rho)
}

pub(crate) fn validate_density(rho: &[f64], n_q: usize, dq: f64) -> Result<f64> {
    if rho.len() != n_q {
        return Err(Error::InvalidDensity(format!(
            "expected {n_q} nodes, got {}",
            rho.len()
        )));
    }
    if let Some(v) = rho.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return Err(Error::InvalidDensity(format!(
            "value {v} is negative or not finite"
        )));
    }
    let mass = trapezoid(rho, dq);
    if (mass - 1.0).abs() > MASS_TOL {
        return Err(Error::InvalidDensity(format!("mass {mass} differs from 1")));
    }
    Ok(mass)
}
