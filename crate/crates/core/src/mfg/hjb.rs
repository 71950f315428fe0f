//! Backward explicit upwind sweep of the HJB equation.

use super::hamiltonian::{EnergyEfficiency, Hamiltonian, Stencil};
use super::{MfgParams, SolverGrid, Surface};
use crate::error::{Error, Result};

/// Value function and maximizing power on the full grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HjbSolution {
    pub gamma: Surface,
    pub policy: Surface,
}

/// Terminal penalty `Γ(T, q_i) = −c·exp(q_i)`.
pub fn terminal_values(grid: &SolverGrid, params: &MfgParams) -> Vec<f64> {
    grid.q_nodes()
        .into_iter()
        .map(|q| -params.terminal_coeff * q.exp())
        .collect()
}

/// Integrates the HJB equation from `t = T` back to `t = 0` against the given
/// interference trajectory, using the energy-efficiency Hamiltonian.
pub fn hjb_backward_sweep(
    interference: &[f64],
    grid: &SolverGrid,
    params: &MfgParams,
) -> Result<HjbSolution> {
    hjb_backward_sweep_with(
        &EnergyEfficiency::new(params),
        interference,
        grid,
        &terminal_values(grid, params),
        params.viscosity_eps,
    )
}

/// Generic backward sweep.
///
/// Each interval `[t_j, t_{j+1}]` is covered by the fewest explicit sub-steps
/// that keep `h·(max|D|/dq + 2ε/dq²) ≤ 1`; with a single sub-step the update
/// is `Γ_j = Γ_{j+1} + dt·(H*(Γ_{j+1}) + ε·δ²Γ_{j+1}/dq²)`. The policy at
/// `t_j` is the maximizer of the last sub-step, and the row at `t = T` holds
/// the maximizer against the terminal gradient.
pub fn hjb_backward_sweep_with<H: Hamiltonian>(
    hamiltonian: &H,
    interference: &[f64],
    grid: &SolverGrid,
    terminal: &[f64],
    viscosity: f64,
) -> Result<HjbSolution> {
    let (n_t, n_q) = (grid.n_t, grid.n_q);
    assert_eq!(interference.len(), n_t, "interference trajectory length");
    assert_eq!(terminal.len(), n_q, "terminal row length");
    if let Some(bad) = interference
        .iter()
        .find(|v| !(**v >= 0.0) || !v.is_finite())
    {
        return Err(Error::InvalidParameter {
            name: "interference",
            reason: format!("must be finite and nonnegative, got {bad}"),
        });
    }

    let dq = grid.dq();
    let dt = grid.dt();
    let mut gamma = Surface::zeros(n_t, n_q);
    let mut policy = Surface::zeros(n_t, n_q);

    gamma.row_mut(n_t - 1).copy_from_slice(terminal);
    for i in 0..n_q {
        policy[(n_t - 1, i)] = hamiltonian
            .maximize(Stencil::at(terminal, i, dq), interference[n_t - 1])
            .power;
    }

    let mut cur = terminal.to_vec();
    let mut next = vec![0.0; n_q];
    for j in (0..n_t - 1).rev() {
        let bound = hamiltonian
            .drift_bound(interference[j])
            .max(hamiltonian.drift_bound(interference[j + 1]));
        let ratio = dt * (bound / dq + 2.0 * viscosity / (dq * dq));
        let substeps = required_substeps(ratio);
        if substeps > grid.max_substeps {
            return Err(Error::Cfl {
                sweep: "HJB",
                ratio,
                node: j,
                required: substeps,
                limit: grid.max_substeps,
            });
        }
        let h = dt / substeps as f64;
        for s in 0..substeps {
            let w = s as f64 / substeps as f64;
            let i_now = (1.0 - w) * interference[j + 1] + w * interference[j];
            let last = s + 1 == substeps;
            for i in 0..n_q {
                let control = hamiltonian.maximize(Stencil::at(&cur, i, dq), i_now);
                let diffusion = if i > 0 && i + 1 < n_q {
                    viscosity * (cur[i + 1] - 2.0 * cur[i] + cur[i - 1]) / (dq * dq)
                } else {
                    0.0
                };
                next[i] = cur[i] + h * (control.value + diffusion);
                if last {
                    policy[(j, i)] = control.power;
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
        gamma.row_mut(j).copy_from_slice(&cur);
    }

    Ok(HjbSolution { gamma, policy })
}

pub(crate) fn required_substeps(ratio: f64) -> usize {
    if ratio <= 1.0 {
        1
    } else {
        ratio.ceil() as usize
    }
}
