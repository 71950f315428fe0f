use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use udn_core::MfgSolution;

use crate::config::ExperimentConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub iterations_used: usize,
    pub final_residual: f64,
    pub tol: f64,
    pub converged: bool,
}

impl From<&MfgSolution> for SolverReport {
    fn from(sol: &MfgSolution) -> Self {
        Self {
            iterations_used: sol.iterations_used,
            final_residual: sol.final_residual,
            tol: sol.tol,
            converged: sol.converged(),
        }
    }
}

/// What a command did: its configuration, every file it wrote (relative to
/// the output directory), timing and the solver outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub wall_clock_seconds: f64,
    pub files: Vec<String>,
    pub solver: SolverReport,
    pub config: ExperimentConfig,
}

impl RunManifest {
    pub const FILE_NAME: &'static str = "manifest.toml";

    pub fn write(&self, dir: &Path) -> std::io::Result<PathBuf> {
        let path = dir.join(Self::FILE_NAME);
        let text = toml::to_string(self).map_err(std::io::Error::other)?;
        std::fs::write(&path, text)?;
        Ok(path)
    }

    pub fn read(dir: &Path) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(dir.join(Self::FILE_NAME))?;
        toml::from_str(&text).map_err(std::io::Error::other)
    }
}
