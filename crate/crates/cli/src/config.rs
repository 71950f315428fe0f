//! Experiment configuration.
//!
//! The file is TOML with one table per section. Every key is optional and
//! falls back to the documented default; unknown keys are rejected. Inline
//! overrides use dotted keys with TOML values, e.g. `mfg.p_max=15` or
//! `sim.isd=[2.5, 3.5]`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};
use udn_core::{MfgParams, PicardConfig, SchedulerParams, SolverGrid};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub n_sbs: usize,
    pub isd: Vec<f64>,
    pub k: Vec<usize>,
    pub n_slots: usize,
    pub warmup_slots: usize,
    pub updates_per_slot: usize,
    pub pathloss_exponent: f64,
    pub shadowing_db: f64,
    pub n_seeds: usize,
    pub base_seed: u64,
    pub queue_capacity: f64,
    /// Bits per Poisson arrival event.
    pub arrival_unit: f64,
    /// UE placement radius around the serving SBS.
    pub ue_radius: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_sbs: 16,
            isd: vec![3.5, 5.75],
            k: vec![2, 5],
            n_slots: 200,
            warmup_slots: 20,
            updates_per_slot: 100,
            pathloss_exponent: 3.0,
            shadowing_db: 4.0,
            n_seeds: 20,
            base_seed: 0,
            queue_capacity: 1.0,
            arrival_unit: 0.01,
            ue_radius: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineConfig {
    pub fixed_power: f64,
    pub pf_smoothing: f64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            fixed_power: 10.0,
            pf_smoothing: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: String,
    /// Write one scheduling-decision log per run.
    pub decision_logs: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: "out".into(),
            decision_logs: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mfg: MfgParams,
    pub grid: SolverGrid,
    pub picard: PicardConfig,
    pub scheduler: SchedulerParams,
    pub sim: SimConfig,
    pub baseline: BaselineConfig,
    pub output: OutputConfig,
}

fn config_err(key: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("`{key}`: {reason}"))
}

fn prefixed(section: &str, r: udn_core::Result<()>) -> Result<(), CliError> {
    r.map_err(|e| match e {
        udn_core::Error::InvalidParameter { name, reason } => {
            config_err(&format!("{section}.{name}"), reason)
        }
        other => CliError::Config(other.to_string()),
    })
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        prefixed("mfg", self.mfg.validate())?;
        prefixed("grid", self.grid.validate())?;
        prefixed("picard", self.picard.validate())?;
        prefixed("scheduler", self.scheduler.validate())?;

        let s = &self.sim;
        if s.n_sbs < 1 {
            return Err(config_err("sim.n_sbs", "must be >= 1"));
        }
        if s.isd.is_empty() {
            return Err(config_err("sim.isd", "needs at least one value"));
        }
        if let Some(bad) = s
            .isd
            .iter()
            .find(|v| !(v.is_finite() && **v >= udn_core::sim::MIN_ISD))
        {
            return Err(config_err(
                "sim.isd",
                format!("entries must be >= {}, got {bad}", udn_core::sim::MIN_ISD),
            ));
        }
        if s.k.is_empty() || s.k.contains(&0) {
            return Err(config_err("sim.k", "needs at least one value, all >= 1"));
        }
        for (key, ok) in [
            ("sim.n_slots", s.n_slots >= 1),
            ("sim.updates_per_slot", s.updates_per_slot >= 1),
            ("sim.n_seeds", s.n_seeds >= 1),
        ] {
            if !ok {
                return Err(config_err(key, "must be >= 1"));
            }
        }
        for (key, v) in [
            ("sim.pathloss_exponent", s.pathloss_exponent),
            ("sim.queue_capacity", s.queue_capacity),
            ("sim.arrival_unit", s.arrival_unit),
            ("sim.ue_radius", s.ue_radius),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(config_err(key, format!("must be > 0, got {v}")));
            }
        }
        if !(s.shadowing_db.is_finite() && s.shadowing_db >= 0.0) {
            return Err(config_err(
                "sim.shadowing_db",
                format!("must be >= 0, got {}", s.shadowing_db),
            ));
        }
        if s.base_seed > i64::MAX as u64 {
            return Err(config_err(
                "sim.base_seed",
                "must fit in a signed 64-bit integer",
            ));
        }

        let b = &self.baseline;
        if !(0.0..=self.mfg.p_max).contains(&b.fixed_power) {
            return Err(config_err(
                "baseline.fixed_power",
                format!(
                    "must lie in [0, mfg.p_max = {}], got {}",
                    self.mfg.p_max, b.fixed_power
                ),
            ));
        }
        if !(b.pf_smoothing > 0.0 && b.pf_smoothing <= 1.0) {
            return Err(config_err(
                "baseline.pf_smoothing",
                format!("must lie in (0, 1], got {}", b.pf_smoothing),
            ));
        }
        if self.output.dir.is_empty() {
            return Err(config_err("output.dir", "must not be empty"));
        }
        Ok(())
    }

    /// `(isd, k)` pairs in row-major order over the two lists.
    pub fn cells(&self) -> Vec<(f64, usize)> {
        self.sim
            .isd
            .iter()
            .flat_map(|&isd| self.sim.k.iter().map(move |&k| (isd, k)))
            .collect()
    }

    pub fn seeds(&self) -> Vec<u64> {
        (0..self.sim.n_seeds as u64)
            .map(|i| self.sim.base_seed + i)
            .collect()
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }
}

/// Rejects keys that do not exist in the default configuration, naming the
/// full dotted path.
fn check_keys(user: &Table, reference: &Table, prefix: &str) -> Result<(), CliError> {
    for (key, value) in user {
        let path = if prefix.is_empty() {
            key.clone()
        } else {
            format!("{prefix}.{key}")
        };
        match reference.get(key) {
            None => return Err(config_err(&path, "unknown key")),
            Some(Value::Table(inner)) => match value {
                Value::Table(user_inner) => check_keys(user_inner, inner, &path)?,
                _ => return Err(config_err(&path, "expected a table")),
            },
            Some(_) => {}
        }
    }
    Ok(())
}

fn parse_value(raw: &str) -> Value {
    match format!("v = {raw}").parse::<Table>() {
        Ok(mut t) => t.remove("v").expect("key just inserted"),
        Err(_) => Value::String(raw.to_string()),
    }
}

fn apply_override(table: &mut Table, assignment: &str) -> Result<(), CliError> {
    let (key, raw) = assignment.split_once('=').ok_or_else(|| {
        CliError::Config(format!(
            "override `{assignment}` is not of the form key=value"
        ))
    })?;
    let key = key.trim();
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(config_err(key, "malformed key"));
    }
    let mut node = table;
    for part in &parts[..parts.len() - 1] {
        let entry = node
            .entry(part.to_string())
            .or_insert_with(|| Value::Table(Table::new()));
        node = match entry {
            Value::Table(t) => t,
            _ => return Err(config_err(key, format!("`{part}` is not a table"))),
        };
    }
    node.insert(parts[parts.len() - 1].to_string(), parse_value(raw.trim()));
    Ok(())
}

/// Parses TOML text, applies `key=value` overrides and validates.
pub fn parse_config_str(text: &str, overrides: &[String]) -> Result<ExperimentConfig, CliError> {
    let mut table: Table = text
        .parse()
        .map_err(|e| CliError::Config(format!("malformed config: {e}")))?;
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    let reference: Table = ExperimentConfig::default()
        .to_toml_string()
        .parse()
        .expect("default config parses");
    check_keys(&table, &reference, "")?;
    // Deserialize from text so type errors point at the offending line; with
    // overrides that text is the merged table.
    let merged;
    let source = if overrides.is_empty() {
        text
    } else {
        merged = toml::to_string(&table).map_err(|e| CliError::Config(e.to_string()))?;
        &merged
    };
    let cfg: ExperimentConfig =
        toml::from_str(source).map_err(|e| CliError::Config(format!("invalid value: {e}")))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Reads `path` (or starts from defaults when `None`) and applies overrides.
pub fn parse_config(
    path: Option<&Path>,
    overrides: &[String],
) -> Result<ExperimentConfig, CliError> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", p.display())))?,
        None => String::new(),
    };
    parse_config_str(&text, overrides)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_default() {
        assert_eq!(
            parse_config_str("", &[]).unwrap(),
            ExperimentConfig::default()
        );
    }

    #[test]
    fn negative_power_cap_names_the_key() {
        let err = parse_config_str("[mfg]\np_max = -1.0\n", &[]).unwrap_err();
        assert!(err.to_string().contains("mfg.p_max"), "{err}");
        let err = parse_config_str("", &["mfg.p_max=-1".into()]).unwrap_err();
        assert!(err.to_string().contains("mfg.p_max"), "{err}");
    }

    #[test]
    fn four_cells() {
        let cfg = parse_config_str("[sim]\nisd = [3.5, 5.75]\nk = [2, 5]\n", &[]).unwrap();
        assert_eq!(cfg.cells(), vec![(3.5, 2), (3.5, 5), (5.75, 2), (5.75, 5)]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse_config_str("[mfg]\nbogus = 1\n", &[]).unwrap_err();
        assert!(err.to_string().contains("mfg.bogus"), "{err}");
        let err = parse_config_str("[nothing]\n", &[]).unwrap_err();
        assert!(err.to_string().contains("nothing"), "{err}");
    }

    #[test]
    fn overrides_take_toml_values() {
        let cfg =
            parse_config_str("", &["sim.isd=[2.5, 4.5]".into(), "output.dir=runs".into()]).unwrap();
        assert_eq!(cfg.sim.isd, vec![2.5, 4.5]);
        assert_eq!(cfg.output.dir, "runs");
    }

    #[test]
    fn integer_literal_for_float_field() {
        let cfg = parse_config_str("", &["mfg.p_max=15".into()]).unwrap();
        assert_eq!(cfg.mfg.p_max, 15.0);
    }

    #[test]
    fn type_errors_are_config_errors() {
        let err = parse_config_str("[grid]\nn_q = \"many\"\n", &[]).unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
        assert!(err.to_string().contains("n_q"), "{err}");
    }

    #[test]
    fn domain_checks() {
        for (o, key) in [
            ("sim.isd=[1.0]", "sim.isd"),
            ("sim.n_seeds=0", "sim.n_seeds"),
            ("baseline.fixed_power=30", "baseline.fixed_power"),
            ("grid.n_q=2", "grid.n_q"),
            ("picard.damping=0", "picard.damping"),
        ] {
            let err = parse_config_str("", &[o.into()]).unwrap_err();
            assert!(err.to_string().contains(key), "{o}: {err}");
        }
    }

    #[test]
    fn round_trip() {
        let cfg = parse_config_str(
            "",
            &["mfg.viscosity_eps=0.00037".into(), "sim.k=[1, 3, 7]".into()],
        )
        .unwrap();
        let again = parse_config_str(&cfg.to_toml_string(), &[]).unwrap();
        assert_eq!(cfg, again);
    }
}
