use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use udn_core::mfg::{
    fpk_forward_sweep, hamiltonian_maximize, hjb_backward_sweep, MfgParams, PicardConfig,
    SolverGrid, Surface,
};
use udn_core::scheduler::{schedule, SchedulerParams};
use udn_core::sim::{compute_gains, generate_topology, run_episode, EpisodeConfig, PolicyKind};
use udn_core::{default_initial_density, solve_mfg};

fn hamiltonian(c: &mut Criterion) {
    let params = MfgParams::default();
    c.bench_function("hamiltonian_maximize", |b| {
        b.iter(|| hamiltonian_maximize(black_box(-3.0), black_box(2.5), &params))
    });
}

fn sweeps(c: &mut Criterion) {
    let grid = SolverGrid::default();
    let params = MfgParams::default();
    let interference = vec![2.5; grid.n_t];
    c.bench_function("hjb_sweep_101", |b| {
        b.iter(|| hjb_backward_sweep(black_box(&interference), &grid, &params))
    });

    let policy = Surface::filled(grid.n_t, grid.n_q, 3.0);
    let rho0 = default_initial_density(&grid);
    c.bench_function("fpk_sweep_101", |b| {
        b.iter(|| fpk_forward_sweep(&policy, black_box(&interference), &rho0, &grid, &params))
    });
}

fn solve(c: &mut Criterion) {
    let grid = SolverGrid::new(41, 41).unwrap();
    let params = MfgParams::default();
    let rho0 = default_initial_density(&grid);
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    group.bench_function("solve_mfg_41", |b| {
        b.iter(|| solve_mfg(&grid, &params, &PicardConfig::default(), &rho0))
    });
    group.finish();
}

fn scheduler(c: &mut Criterion) {
    let q: Vec<f64> = (0..16).map(|m| (m as f64 * 0.37).fract()).collect();
    let ups: Vec<f64> = (0..16).map(|m| (m as f64 * 0.61).fract() - 0.5).collect();
    let avg = vec![1.0 / 16.0; 16];
    c.bench_function("schedule_16", |b| {
        b.iter(|| schedule(black_box(&q), &ups, 0.8, &avg, -1.0, 1e-3))
    });
}

fn episode(c: &mut Criterion) {
    let grid = SolverGrid::new(41, 41).unwrap();
    let params = MfgParams::default();
    let sol = solve_mfg(
        &grid,
        &params,
        &PicardConfig::default(),
        &default_initial_density(&grid),
    )
    .unwrap();
    let topo = generate_topology(16, 3.5, 5, 1).unwrap();
    let gains = compute_gains(&topo, &params, 3.0, 1);
    let cfg = EpisodeConfig {
        n_slots: 20,
        warmup_slots: 0,
        ..Default::default()
    };
    let mut group = c.benchmark_group("episode");
    group.sample_size(10);
    group.bench_function("proposed_20_slots", |b| {
        b.iter(|| {
            run_episode(
                &topo,
                &gains,
                PolicyKind::Proposed(SchedulerParams::default()),
                Some(&sol),
                &cfg,
                &params,
                1,
            )
        })
    });
    group.bench_function("baseline_20_slots", |b| {
        b.iter(|| {
            run_episode(
                &topo,
                &gains,
                PolicyKind::baseline(),
                None,
                &cfg,
                &params,
                1,
            )
        })
    });
    group.finish();
}

criterion_group!(benches, hamiltonian, sweeps, solve, scheduler, episode);
criterion_main!(benches);
