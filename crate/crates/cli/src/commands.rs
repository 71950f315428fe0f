use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use udn_core::sim::{
    aggregate_metrics, compute_gains_with, generate_topology_with, run_episode, sign_test_p_value,
    EpisodeConfig, EpisodeMetrics, PolicyKind, Summary,
};
use udn_core::{default_initial_density, solve_mfg, MfgSolution};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::manifest::{RunManifest, SolverReport};

/// Sweep axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Isd,
    K,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Isd => "isd",
            Axis::K => "k",
        }
    }
}

impl std::str::FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "isd" => Ok(Axis::Isd),
            "k" => Ok(Axis::K),
            other => Err(format!("unknown axis `{other}`, expected `isd` or `k`")),
        }
    }
}

/// Files written so far, relative to the output directory.
struct Artifacts {
    root: PathBuf,
    files: Vec<String>,
}

impl Artifacts {
    fn new(root: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(root)?;
        Ok(Self {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn create(&mut self, rel: &str) -> Result<BufWriter<File>, CliError> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        self.files.push(rel.to_string());
        Ok(BufWriter::new(File::create(path)?))
    }

    fn record(&mut self, path: &Path) {
        let rel = path.strip_prefix(&self.root).unwrap_or(path);
        self.files.push(rel.to_string_lossy().into_owned());
    }

    fn finish(
        mut self,
        command: &str,
        cfg: &ExperimentConfig,
        sol: &MfgSolution,
        started: Instant,
    ) -> Result<RunManifest, CliError> {
        let mut config = self.create("config.toml")?;
        config.write_all(cfg.to_toml_string().as_bytes())?;
        config.flush()?;
        self.files.push(RunManifest::FILE_NAME.to_string());
        let manifest = RunManifest {
            command: command.to_string(),
            wall_clock_seconds: started.elapsed().as_secs_f64(),
            files: self.files,
            solver: SolverReport::from(sol),
            config: cfg.clone(),
        };
        manifest.write(&self.root)?;
        Ok(manifest)
    }
}

fn output_dir(cfg: &ExperimentConfig) -> PathBuf {
    PathBuf::from(&cfg.output.dir)
}

fn solve(cfg: &ExperimentConfig) -> Result<MfgSolution, CliError> {
    let rho0 = default_initial_density(&cfg.grid);
    Ok(solve_mfg(&cfg.grid, &cfg.mfg, &cfg.picard, &rho0)?)
}

fn write_solution(sol: &MfgSolution, art: &mut Artifacts, prefix: &str) -> Result<(), CliError> {
    let dir = art.root.join(prefix);
    for path in sol.write_csv(&dir)? {
        art.record(&path);
    }
    let mut log = art.create(&format!("{prefix}convergence.csv"))?;
    sol.write_convergence_log(&mut log)?;
    log.flush()?;
    let mut out = art.create(&format!("{prefix}interference.csv"))?;
    writeln!(out, "t,value")?;
    for (j, v) in sol.interference.iter().enumerate() {
        writeln!(out, "{:?},{:?}", sol.grid.t(j), v)?;
    }
    out.flush()?;
    Ok(())
}

/// Solves the mean-field game and writes `gamma.csv`, `rho.csv`,
/// `policy.csv`, `convergence.csv` and `interference.csv`.
pub fn cmd_solve_mfg(cfg: &ExperimentConfig) -> Result<RunManifest, CliError> {
    let started = Instant::now();
    let mut art = Artifacts::new(&output_dir(cfg))?;
    let sol = solve(cfg)?;
    write_solution(&sol, &mut art, "")?;
    art.finish("solve-mfg", cfg, &sol, started)
}

/// Both policies on one `(isd, k, seed)` realization.
struct PairedRun {
    isd: f64,
    k: usize,
    seed: u64,
    topology_hash: String,
    gains_hash: String,
    proposed: EpisodeMetrics,
    baseline: EpisodeMetrics,
}

fn policies(cfg: &ExperimentConfig) -> (PolicyKind, PolicyKind) {
    (
        PolicyKind::Proposed(cfg.scheduler),
        PolicyKind::Baseline {
            fixed_power: cfg.baseline.fixed_power,
            pf_smoothing: cfg.baseline.pf_smoothing,
        },
    )
}

fn run_pair(
    cfg: &ExperimentConfig,
    sol: &MfgSolution,
    isd: f64,
    k: usize,
    seed: u64,
) -> Result<PairedRun, CliError> {
    let s = &cfg.sim;
    let topo = generate_topology_with(s.n_sbs, isd, k, s.ue_radius, seed)?;
    let gains = compute_gains_with(&topo, &cfg.mfg, s.pathloss_exponent, s.shadowing_db, seed);
    let episode = EpisodeConfig {
        n_slots: s.n_slots,
        warmup_slots: s.warmup_slots,
        updates_per_slot: s.updates_per_slot,
        slot_length: cfg.grid.horizon,
        queue_capacity: s.queue_capacity,
        arrival_unit: s.arrival_unit,
        record_trace: cfg.output.decision_logs,
    };
    let (proposed, baseline) = policies(cfg);
    Ok(PairedRun {
        isd,
        k,
        seed,
        topology_hash: topo.fingerprint(),
        gains_hash: gains.fingerprint(),
        proposed: run_episode(&topo, &gains, proposed, Some(sol), &episode, &cfg.mfg, seed)?,
        baseline: run_episode(&topo, &gains, baseline, None, &episode, &cfg.mfg, seed)?,
    })
}

fn simulate(
    cfg: &ExperimentConfig,
    sol: &MfgSolution,
    cells: &[(f64, usize)],
    jobs: usize,
) -> Result<Vec<PairedRun>, CliError> {
    let tasks: Vec<(f64, usize, u64)> = cells
        .iter()
        .flat_map(|&(isd, k)| cfg.seeds().into_iter().map(move |seed| (isd, k, seed)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Config(format!("`--jobs`: {e}")))?;
    pool.install(|| {
        tasks
            .par_iter()
            .map(|&(isd, k, seed)| run_pair(cfg, sol, isd, k, seed))
            .collect()
    })
}

fn summary_header() -> &'static str {
    "policy,isd,k,runs,ee_mean,ee_std,outage_mean,outage_std,ue_outage_mean,interference_mean,power_mean"
}

fn summary_row(
    out: &mut impl Write,
    policy: &str,
    isd: f64,
    k: usize,
    s: &Summary,
) -> std::io::Result<()> {
    writeln!(
        out,
        "{policy},{isd:?},{k},{},{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
        s.runs,
        s.ee_mean,
        s.ee_std,
        s.outage_mean,
        s.outage_std,
        s.ue_outage_mean,
        s.interference_mean,
        s.power_mean
    )
}

fn write_runs(runs: &[PairedRun], art: &mut Artifacts) -> Result<(), CliError> {
    let mut out = art.create("runs.csv")?;
    writeln!(
        out,
        "seed,policy,isd,k,ee,outage,bits_tx,energy,bits_arrived,bits_dropped"
    )?;
    for r in runs {
        for (label, m) in [("proposed", &r.proposed), ("baseline", &r.baseline)] {
            writeln!(
                out,
                "{},{label},{:?},{},{:?},{:?},{:?},{:?},{:?},{:?}",
                r.seed,
                r.isd,
                r.k,
                m.ee(),
                m.outage(),
                m.bits_transmitted,
                m.energy_consumed,
                m.bits_arrived,
                m.bits_dropped
            )?;
        }
    }
    out.flush()?;

    let mut crn = art.create("crn.csv")?;
    writeln!(
        crn,
        "seed,isd,k,policy,topology_hash,gains_hash,arrival_checksum"
    )?;
    for r in runs {
        for (label, m) in [("proposed", &r.proposed), ("baseline", &r.baseline)] {
            writeln!(
                crn,
                "{},{:?},{},{label},{},{},{:016x}",
                r.seed, r.isd, r.k, r.topology_hash, r.gains_hash, m.arrival_checksum
            )?;
        }
    }
    crn.flush()?;
    Ok(())
}

fn write_decision_logs(runs: &[PairedRun], art: &mut Artifacts) -> Result<(), CliError> {
    for r in runs {
        for (label, m) in [("proposed", &r.proposed), ("baseline", &r.baseline)] {
            if let Some(trace) = &m.trace {
                let name = format!(
                    "decisions/{label}_isd{:?}_k{}_seed{}.csv",
                    r.isd, r.k, r.seed
                );
                let mut out = art.create(&name)?;
                trace.write_decision_log(&mut out)?;
                out.flush()?;
            }
        }
    }
    Ok(())
}

/// Writes the per-cell summary (to `summary_name`) and relative gains, in the
/// order of `cells`.
fn write_summaries(
    runs: &[PairedRun],
    cells: &[(f64, usize)],
    art: &mut Artifacts,
    summary_name: &str,
) -> Result<(), CliError> {
    let mut summary = art.create(summary_name)?;
    writeln!(summary, "{}", summary_header())?;
    let mut gains = art.create("gains.csv")?;
    writeln!(
        gains,
        "isd,k,ee_gain,outage_reduction,outage_wins,runs,sign_test_p"
    )?;
    for &(isd, k) in cells {
        let cell: Vec<&PairedRun> = runs.iter().filter(|r| r.isd == isd && r.k == k).collect();
        let proposed: Vec<EpisodeMetrics> = cell.iter().map(|r| r.proposed.clone()).collect();
        let baseline: Vec<EpisodeMetrics> = cell.iter().map(|r| r.baseline.clone()).collect();
        let sp = aggregate_metrics(&proposed);
        let sb = aggregate_metrics(&baseline);
        summary_row(&mut summary, "proposed", isd, k, &sp)?;
        summary_row(&mut summary, "baseline", isd, k, &sb)?;
        let wins = cell
            .iter()
            .filter(|r| r.proposed.outage() < r.baseline.outage())
            .count();
        writeln!(
            gains,
            "{isd:?},{k},{:?},{:?},{wins},{},{:?}",
            sp.ee_gain_over(&sb),
            sp.outage_reduction_vs(&sb),
            cell.len(),
            sign_test_p_value(wins, cell.len())
        )?;
    }
    summary.flush()?;
    gains.flush()?;
    Ok(())
}

fn compare_cells(
    command: &str,
    cfg: &ExperimentConfig,
    cells: &[(f64, usize)],
    summary_name: &str,
    jobs: usize,
) -> Result<RunManifest, CliError> {
    let started = Instant::now();
    let mut art = Artifacts::new(&output_dir(cfg))?;
    let sol = solve(cfg)?;
    write_solution(&sol, &mut art, "mfg/")?;
    let runs = simulate(cfg, &sol, cells, jobs)?;
    write_runs(&runs, &mut art)?;
    write_summaries(&runs, cells, &mut art, summary_name)?;
    write_decision_logs(&runs, &mut art)?;
    art.finish(command, cfg, &sol, started)
}

/// Runs both policies on every `(isd, k)` cell and seed with common random
/// numbers. `jobs = 0` uses all cores.
pub fn cmd_compare(cfg: &ExperimentConfig, jobs: usize) -> Result<RunManifest, CliError> {
    compare_cells("compare", cfg, &cfg.cells(), "summary.csv", jobs)
}

/// Compares along one axis with the other held at its first configured value.
pub fn cmd_sweep(cfg: &ExperimentConfig, axis: Axis, jobs: usize) -> Result<RunManifest, CliError> {
    let cells: Vec<(f64, usize)> = match axis {
        Axis::Isd => cfg.sim.isd.iter().map(|&isd| (isd, cfg.sim.k[0])).collect(),
        Axis::K => cfg.sim.k.iter().map(|&k| (cfg.sim.isd[0], k)).collect(),
    };
    if cells.len() < 2 {
        return Err(CliError::Config(format!(
            "`sim.{}`: a sweep needs at least two values",
            axis.name()
        )));
    }
    let mut sorted = cells;
    sorted.sort_by(|a, b| match axis {
        Axis::Isd => a.0.total_cmp(&b.0),
        Axis::K => a.1.cmp(&b.1),
    });
    sorted.dedup();
    compare_cells(
        &format!("sweep {}", axis.name()),
        cfg,
        &sorted,
        &format!("sweep_{}.csv", axis.name()),
        jobs,
    )
}
