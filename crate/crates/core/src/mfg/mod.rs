//! Queue-state mean-field game solver.
//!
//! The state of a generic SBS is the normalized backlog `q` of its scheduled
//! UE. Channels are static, so the channel drift and diffusion terms of the
//! general model vanish and the coupled system reduces to one dimension:
//!
//! ```text
//! ∂Γ/∂t + max_p [ (Ā − r(p, I(t))) ∂Γ/∂q + r(p, I(t)) / (p + p0) ] + ε ∂²Γ/∂q² = 0,
//! ∂ρ/∂t + ∂/∂q [ (Ā − r(p*, I(t))) ρ ] − ε ∂²ρ/∂q² = 0,
//! I(t) = η ∫ p*(t, q) E|h̃|² ρ(t, q) dq,
//! ```
//!
//! with `Γ(T, q) = −c·exp(q)`. The HJB equation is integrated backward with an
//! explicit upwind scheme, the FPK equation forward with a conservative
//! finite-volume upwind scheme, and a damped Picard iteration on `ρ` finds the
//! fixed point.

mod density;
mod fpk;
mod grid;
mod hamiltonian;
mod hjb;
mod io;
mod params;
mod solver;

pub use density::{default_initial_density, point_mass, truncated_gaussian_mixture};
pub use fpk::{fpk_forward_sweep, node_drift};
pub use grid::{SolverGrid, Surface};
pub use hamiltonian::{
    data_rate, ee_utility, hamiltonian_maximize, maximize_scalar, Control, EnergyEfficiency,
    Hamiltonian, Stencil,
};
pub use hjb::{hjb_backward_sweep, hjb_backward_sweep_with, terminal_values, HjbSolution};
pub use io::write_surface_csv;
pub use params::MfgParams;
pub use solver::{
    initial_policy, interference_trajectory, mf_interference, picard_iteration, solve_mfg,
    MfgSolution, PicardConfig, PicardIterate,
};
