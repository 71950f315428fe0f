//! Damped Picard iteration coupling the HJB and FPK sweeps.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::fpk::validate_density;
use super::{
    fpk_forward_sweep, hjb_backward_sweep, write_surface_csv, MfgParams, SolverGrid, Surface,
};
use crate::error::{ensure, Result};
use crate::quadrature::{trapezoid, trapezoid_product};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PicardConfig {
    /// Sup-norm threshold on the change of `ρ` between iterates.
    pub tol: f64,
    pub max_iter: usize,
    /// Relaxation weight `β` of the candidate density.
    pub damping: f64,
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self {
            tol: 1e-5,
            max_iter: 200,
            damping: 0.5,
        }
    }
}

impl PicardConfig {
    pub fn validate(&self) -> Result<()> {
        ensure(self.tol.is_finite() && self.tol > 0.0, "tol", || {
            format!("must be > 0, got {}", self.tol)
        })?;
        ensure(self.max_iter >= 1, "max_iter", || {
            "must be >= 1".to_string()
        })?;
        ensure(self.damping > 0.0 && self.damping <= 1.0, "damping", || {
            format!("must lie in (0, 1], got {}", self.damping)
        })
    }
}

/// Mean-field interference `η ∫ p(q)·E|h̃|²·ρ(q) dq` of one time row.
pub fn mf_interference(
    rho_row: &[f64],
    policy_row: &[f64],
    grid: &SolverGrid,
    params: &MfgParams,
) -> f64 {
    assert_eq!(
        rho_row.len(),
        policy_row.len(),
        "density and policy rows differ in length"
    );
    params.eta * params.mean_gain * trapezoid_product(policy_row, rho_row, grid.dq())
}

/// Interference at every time node.
pub fn interference_trajectory(
    rho: &Surface,
    policy: &Surface,
    grid: &SolverGrid,
    params: &MfgParams,
) -> Vec<f64> {
    (0..grid.n_t)
        .map(|j| mf_interference(rho.row(j), policy.row(j), grid, params))
        .collect()
}

/// Policy that seeds the first interference evaluation: `p ≡ p_max / 2`.
pub fn initial_policy(grid: &SolverGrid, params: &MfgParams) -> Surface {
    Surface::filled(grid.n_t, grid.n_q, 0.5 * params.p_max)
}

/// Output of a single Picard step.
#[derive(Debug, Clone, PartialEq)]
pub struct PicardIterate {
    pub gamma: Surface,
    pub policy: Surface,
    /// Relaxed density.
    pub rho: Surface,
    /// Interference the HJB sweep was solved against.
    pub interference: Vec<f64>,
    /// Sup-norm change of the density.
    pub residual: f64,
}

/// One damped fixed-point step from the current `(ρ, p)` pair.
pub fn picard_iteration(
    rho: &Surface,
    policy: &Surface,
    rho0: &[f64],
    grid: &SolverGrid,
    params: &MfgParams,
    damping: f64,
) -> Result<PicardIterate> {
    let interference = interference_trajectory(rho, policy, grid, params);
    let hjb = hjb_backward_sweep(&interference, grid, params)?;
    let candidate = fpk_forward_sweep(&hjb.policy, &interference, rho0, grid, params)?;
    let mut relaxed = rho.clone();
    relaxed.relax_toward(&candidate, damping);
    let residual = relaxed.sup_distance(rho);
    Ok(PicardIterate {
        gamma: hjb.gamma,
        policy: hjb.policy,
        rho: relaxed,
        interference,
        residual,
    })
}

/// Mean-field equilibrium, or the last iterate if the loop hit its cap.
#[derive(Debug, Clone, PartialEq)]
pub struct MfgSolution {
    pub grid: SolverGrid,
    pub params: MfgParams,
    pub gamma: Surface,
    pub rho: Surface,
    pub policy: Surface,
    pub interference: Vec<f64>,
    pub iterations_used: usize,
    pub final_residual: f64,
    /// Residual after each iteration.
    pub residuals: Vec<f64>,
    pub tol: f64,
}

impl MfgSolution {
    pub fn converged(&self) -> bool {
        self.final_residual <= self.tol
    }

    /// Trapezoidal mass of the density at time node `j`.
    pub fn mass(&self, j: usize) -> f64 {
        trapezoid(self.rho.row(j), self.grid.dq())
    }

    /// Equilibrium power at `(t, q)`, bilinear in both coordinates with
    /// clamping to the grid.
    pub fn power_at(&self, t: f64, q: f64) -> f64 {
        self.policy
            .interpolate(&self.grid, t, q)
            .clamp(0.0, self.params.p_max)
    }

    /// Average transmit power `∫ p*(t_j, q) ρ*(t_j, q) dq`.
    pub fn mean_power(&self, j: usize) -> f64 {
        trapezoid_product(self.policy.row(j), self.rho.row(j), self.grid.dq())
    }

    /// Writes `gamma.csv`, `rho.csv` and `policy.csv` into `dir` and returns
    /// their paths.
    pub fn write_csv(&self, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::with_capacity(3);
        for (name, surface) in [
            ("gamma.csv", &self.gamma),
            ("rho.csv", &self.rho),
            ("policy.csv", &self.policy),
        ] {
            let path = dir.join(name);
            let file = std::io::BufWriter::new(std::fs::File::create(&path)?);
            write_surface_csv(file, surface, &self.grid)?;
            written.push(path);
        }
        Ok(written)
    }

    /// Writes the `iteration,residual` log.
    pub fn write_convergence_log<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "iteration,residual")?;
        for (k, r) in self.residuals.iter().enumerate() {
            writeln!(out, "{},{r:?}", k + 1)?;
        }
        out.flush()
    }
}

/// Solves the coupled HJB/FPK system by damped Picard iteration on `ρ`.
///
/// Starting from `ρ(t, ·) = ρ0` and `p ≡ p_max/2`, each iteration evaluates the
/// interference trajectory, sweeps HJB backward, sweeps FPK forward and
/// relaxes the density. The loop stops once the sup-norm change falls to
/// `tol`; otherwise the last iterate is returned with its residual.
pub fn solve_mfg(
    grid: &SolverGrid,
    params: &MfgParams,
    picard: &PicardConfig,
    rho0: &[f64],
) -> Result<MfgSolution> {
    grid.validate()?;
    params.validate()?;
    picard.validate()?;
    validate_density(rho0, grid.n_q, grid.dq())?;

    let mut rho = Surface::from_row(grid.n_t, rho0);
    let mut policy = initial_policy(grid, params);
    let mut residuals = Vec::new();
    let mut last = None;
    for _ in 0..picard.max_iter {
        let it = picard_iteration(&rho, &policy, rho0, grid, params, picard.damping)?;
        residuals.push(it.residual);
        rho = it.rho.clone();
        policy = it.policy.clone();
        let done = it.residual <= picard.tol;
        last = Some(it);
        if done {
            break;
        }
    }
    let it = last.expect("max_iter >= 1");
    Ok(MfgSolution {
        grid: *grid,
        params: *params,
        gamma: it.gamma,
        rho: it.rho,
        policy: it.policy,
        interference: it.interference,
        iterations_used: residuals.len(),
        final_residual: it.residual,
        residuals,
        tol: picard.tol,
    })
}
