use super::SolverGrid;
use crate::quadrature::{trapezoid, trapezoid_weights};

/// Equal-weight mixture of Gaussians with means 0.4 and 0.75 and variance 0.1,
/// truncated to `[0, q_max]` and normalized to unit trapezoidal mass.
pub fn default_initial_density(grid: &SolverGrid) -> Vec<f64> {
    truncated_gaussian_mixture(grid, &[(0.5, 0.4, 0.1), (0.5, 0.75, 0.1)])
}

/// Mixture of `(weight, mean, variance)` Gaussian components evaluated at the
/// queue nodes and renormalized to unit mass on the grid.
pub fn truncated_gaussian_mixture(grid: &SolverGrid, components: &[(f64, f64, f64)]) -> Vec<f64> {
    let mut rho: Vec<f64> = grid
        .q_nodes()
        .into_iter()
        .map(|q| {
            components
                .iter()
                .map(|&(w, mean, var)| {
                    w * (-(q - mean).powi(2) / (2.0 * var)).exp()
                        / (2.0 * std::f64::consts::PI * var).sqrt()
                })
                .sum()
        })
        .collect();
    let mass = trapezoid(&rho, grid.dq());
    for v in &mut rho {
        *v /= mass;
    }
    rho
}

/// Unit mass concentrated on the node nearest to `q`.
pub fn point_mass(grid: &SolverGrid, q: f64) -> Vec<f64> {
    let i = ((q / grid.dq()).round().max(0.0) as usize).min(grid.n_q - 1);
    let w = trapezoid_weights(grid.n_q, grid.dq());
    let mut rho = vec![0.0; grid.n_q];
    rho[i] = 1.0 / w[i];
    rho
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_mass() {
        for n in [3, 11, 101, 257] {
            let grid = SolverGrid::new(n, 5).unwrap();
            let rho = default_initial_density(&grid);
            assert!((trapezoid(&rho, grid.dq()) - 1.0).abs() < 1e-12);
            assert!((trapezoid(&point_mass(&grid, 0.0), grid.dq()) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mode_dominates_low_queue() {
        let grid = SolverGrid::new(101, 5).unwrap();
        let rho = default_initial_density(&grid);
        // Unnormalized mixture at q = 0.4 and q = 0.1.
        let mix = |q: f64| {
            [0.4, 0.75]
                .iter()
                .map(|m: &f64| (-(q - m).powi(2) / 0.2).exp())
                .sum::<f64>()
        };
        assert!(mix(0.4) > mix(0.1));
        assert!(rho[40] > rho[10]);
    }

    #[test]
    fn coincident_means_collapse_to_single_component() {
        let grid = SolverGrid::new(101, 5).unwrap();
        let double = truncated_gaussian_mixture(&grid, &[(0.5, 0.6, 0.1), (0.5, 0.6, 0.1)]);
        let single = truncated_gaussian_mixture(&grid, &[(1.0, 0.6, 0.1)]);
        for (a, b) in double.iter().zip(&single) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
