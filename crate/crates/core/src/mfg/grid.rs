use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

/// Uniform grid over normalized queue `q ∈ [0, q_max]` and time `t ∈ [0, T]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverGrid {
    pub n_q: usize,
    pub n_t: usize,
    pub q_max: f64,
    pub horizon: f64,
    /// Upper limit on explicit sub-steps per time interval. A sweep whose
    /// stability condition needs more sub-steps than this is rejected.
    pub max_substeps: usize,
}

impl Default for SolverGrid {
    fn default() -> Self {
        Self {
            n_q: 101,
            n_t: 101,
            q_max: 1.0,
            horizon: 1.0,
            max_substeps: 64,
        }
    }
}

impl SolverGrid {
    pub fn new(n_q: usize, n_t: usize) -> Result<Self> {
        let grid = Self {
            n_q,
            n_t,
            ..Default::default()
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.n_q >= 3, "n_q", || {
            format!("must be >= 3, got {}", self.n_q)
        })?;
        ensure(self.n_t >= 3, "n_t", || {
            format!("must be >= 3, got {}", self.n_t)
        })?;
        ensure(self.q_max.is_finite() && self.q_max > 0.0, "q_max", || {
            format!("must be > 0, got {}", self.q_max)
        })?;
        ensure(
            self.horizon.is_finite() && self.horizon > 0.0,
            "horizon",
            || format!("must be > 0, got {}", self.horizon),
        )?;
        ensure(self.max_substeps >= 1, "max_substeps", || {
            "must be >= 1".to_string()
        })
    }

    #[inline]
    pub fn dq(&self) -> f64 {
        self.q_max / (self.n_q - 1) as f64
    }

    #[inline]
    pub fn dt(&self) -> f64 {
        self.horizon / (self.n_t - 1) as f64
    }

    /// Queue node `i`; the last node is exactly `q_max`.
    #[inline]
    pub fn q(&self, i: usize) -> f64 {
        if i + 1 == self.n_q {
            self.q_max
        } else {
            i as f64 * self.dq()
        }
    }

    /// Time node `j`; the last node is exactly `T`.
    #[inline]
    pub fn t(&self, j: usize) -> f64 {
        if j + 1 == self.n_t {
            self.horizon
        } else {
            j as f64 * self.dt()
        }
    }

    pub fn q_nodes(&self) -> Vec<f64> {
        (0..self.n_q).map(|i| self.q(i)).collect()
    }

    pub fn t_nodes(&self) -> Vec<f64> {
        (0..self.n_t).map(|j| self.t(j)).collect()
    }
}

/// Values on the `n_t × n_q` grid, stored row-major in time.
#[derive(Debug, Clone, PartialEq)]
pub struct Surface {
    n_t: usize,
    n_q: usize,
    data: Vec<f64>,
}

impl Surface {
    pub fn zeros(n_t: usize, n_q: usize) -> Self {
        Self::filled(n_t, n_q, 0.0)
    }

    pub fn filled(n_t: usize, n_q: usize, value: f64) -> Self {
        Self {
            n_t,
            n_q,
            data: vec![value; n_t * n_q],
        }
    }

    /// Every time row equal to `row`.
    pub fn from_row(n_t: usize, row: &[f64]) -> Self {
        let n_q = row.len();
        let mut data = Vec::with_capacity(n_t * n_q);
        for _ in 0..n_t {
            data.extend_from_slice(row);
        }
        Self { n_t, n_q, data }
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn n_q(&self) -> usize {
        self.n_q
    }

    #[inline]
    pub fn row(&self, j: usize) -> &[f64] {
        &self.data[j * self.n_q..(j + 1) * self.n_q]
    }

    #[inline]
    pub fn row_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.n_q..(j + 1) * self.n_q]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n_q)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Largest absolute pointwise difference.
    pub fn sup_distance(&self, other: &Surface) -> f64 {
        assert_eq!(self.data.len(), other.data.len(), "surface shapes differ");
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }

    /// `(1 − β)·self + β·other`, in place.
    pub fn relax_toward(&mut self, other: &Surface, beta: f64) {
        assert_eq!(self.data.len(), other.data.len(), "surface shapes differ");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = (1.0 - beta) * *a + beta * b;
        }
    }

    /// Bilinear interpolation at `(t, q)`, clamping both coordinates to the grid.
    pub fn interpolate(&self, grid: &SolverGrid, t: f64, q: f64) -> f64 {
        let (j0, j1, wt) = bracket(t, grid.dt(), self.n_t);
        let (i0, i1, wq) = bracket(q, grid.dq(), self.n_q);
        let at = |j: usize, i: usize| self.data[j * self.n_q + i];
        let lo = (1.0 - wq) * at(j0, i0) + wq * at(j0, i1);
        let hi = (1.0 - wq) * at(j1, i0) + wq * at(j1, i1);
        (1.0 - wt) * lo + wt * hi
    }
}

impl std::ops::Index<(usize, usize)> for Surface {
    type Output = f64;

    fn index(&self, (j, i): (usize, usize)) -> &f64 {
        &self.data[j * self.n_q + i]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Surface {
    fn index_mut(&mut self, (j, i): (usize, usize)) -> &mut f64 {
        &mut self.data[j * self.n_q + i]
    }
}

fn bracket(x: f64, h: f64, n: usize) -> (usize, usize, f64) {
    let s = (x / h).clamp(0.0, (n - 1) as f64);
    let lo = (s.floor() as usize).min(n - 2);
    (lo, lo + 1, s - lo as f64)
}
