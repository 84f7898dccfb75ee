//! Experiment orchestration: builds the core runs a configuration asks for,
//! writes the artifacts and summarizes the outcome.

use std::f64::consts::PI;

use anyhow::{bail, Context};
use flavors_core::bench::{self, CompareOptions, ComparisonReport, SweepSetup};
use flavors_core::fd_conslaw::{self, ConsLawConfig, Sampling};
use flavors_core::msi_wave::{self, WaveConfig};
use flavors_core::spectral::{self, SpectralConfig, SpectralRun, SpectralState};
use flavors_core::{build_mesh, step_diagnostics, Mode, RunStatus, SpaceTimeField, UniformMesh};
use serde_json::{json, Value};

use crate::config::{Experiment, RunConfig, RunMode};
use crate::{io, sweep};

/// What an invocation produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    /// Contents of `report.json`.
    pub report: Value,
    /// Earliest failure time of any integration that went unstable.
    pub unstable_at: Option<f64>,
}

impl Outcome {
    fn new(report: Value, statuses: &[RunStatus]) -> Self {
        let unstable_at = statuses
            .iter()
            .filter_map(|s| match s {
                RunStatus::Unstable { time } => Some(*time),
                RunStatus::Completed => None,
            })
            .reduce(f64::min);
        Self { report, unstable_at }
    }
}

fn status_json(s: RunStatus) -> Value {
    match s {
        RunStatus::Completed => json!({ "state": "completed" }),
        RunStatus::Unstable { time } => json!({ "state": "unstable", "time": time }),
    }
}

fn comparison_json(r: &ComparisonReport) -> Value {
    json!({ "error": r.error, "node_count": r.node_count, "speedup": r.speedup })
}

/// `round(a / b)` when the quotient is integral.
fn ratio(a: f64, b: f64) -> Option<usize> {
    let r = a / b;
    let n = r.round();
    (n >= 1.0 && (r - n).abs() <= 1e-9 * n).then_some(n as usize)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn flavor_mode(cfg: &RunConfig) -> Mode {
    let space_step = match cfg.experiment {
        Experiment::SpectralThreeField => cfg.length / cfg.modes as f64,
        _ => cfg.space_step,
    };
    Mode::Flavor { space_step, micro_step: cfg.micro_step, macro_step: cfg.macro_step }
}

fn bench_mode(cfg: &RunConfig) -> Mode {
    let space_step = match cfg.experiment {
        Experiment::SpectralThreeField => cfg.length / cfg.modes as f64,
        _ => cfg.bench_space_step,
    };
    Mode::SingleScale { space_step, time_step: cfg.bench_time_step }
}

/// FLAVOR-over-benchmark acceleration for this configuration.
pub fn speedup_of(cfg: &RunConfig) -> f64 {
    match cfg.experiment {
        Experiment::SpectralThreeField => bench::speedup_time(cfg.macro_step, cfg.bench_time_step),
        _ => bench::speedup(cfg.macro_step, cfg.space_step, cfg.bench_time_step, cfg.bench_space_step),
    }
}

fn gl_config(cfg: &RunConfig) -> ConsLawConfig {
    ConsLawConfig { eps: cfg.stiffness, length: cfg.length, final_time: cfg.final_time, ..Default::default() }
}

/// Benchmark storage thinned to the FLAVOR grid where the grids nest.
fn gl_bench_sampling(cfg: &RunConfig, macro_steps: &[f64]) -> Sampling {
    let space_stride = ratio(cfg.space_step, cfg.bench_space_step).unwrap_or(1);
    let time_stride =
        macro_steps.iter().map(|&big| ratio(big, cfg.bench_time_step).unwrap_or(1)).reduce(gcd).unwrap_or(1);
    Sampling { space_stride, time_stride }
}

/// Runs the benchmark, falling back to full storage when the grids do not nest.
fn gl_benchmark(cfg: &RunConfig, macro_steps: &[f64]) -> anyhow::Result<SpaceTimeField> {
    let core = gl_config(cfg);
    let sampling = gl_bench_sampling(cfg, macro_steps);
    let mode = bench_mode(cfg);
    match fd_conslaw::run_fd_sampled(&core, mode, sampling) {
        Err(flavors_core::Error::InvalidParameter(_)) => Ok(fd_conslaw::run_fd(&core, mode)?),
        other => Ok(other?),
    }
}

fn wave_config(cfg: &RunConfig, omega: f64) -> WaveConfig {
    WaveConfig { length: cfg.length, ..WaveConfig::sine_gordon(omega, cfg.final_time) }
}

fn wave_nodes(cfg: &RunConfig, mode: Mode) -> anyhow::Result<usize> {
    Ok(match mode {
        Mode::SingleScale { space_step, time_step } => {
            UniformMesh::new(cfg.length, cfg.final_time, space_step, time_step)?.n_space
        }
        Mode::Flavor { space_step, micro_step, macro_step } => {
            build_mesh(cfg.length, cfg.final_time, space_step, micro_step, macro_step)?.n_space
        }
    })
}

/// Sine-Gordon run with `u(x, 0) = sin(2 pi x / L)`, `u_t(x, 0) = 0`.
fn run_wave(cfg: &RunConfig, omega: f64, mode: Mode) -> anyhow::Result<SpaceTimeField> {
    let n = wave_nodes(cfg, mode)?;
    let u0: Vec<f64> = (0..n).map(|i| (2.0 * PI * i as f64 / n as f64).sin()).collect();
    Ok(msi_wave::run_msi_from(&wave_config(cfg, omega), mode, &u0, &vec![0.0; n])?)
}

/// Three-field run with `u = q = cos(2 pi x / L)`, `p = 0`.
fn run_three_field(cfg: &RunConfig, mode: Mode) -> anyhow::Result<SpectralRun> {
    let core = SpectralConfig {
        omega: cfg.stiffness,
        length: cfg.length,
        final_time: cfg.final_time,
        n: cfg.modes,
        ..Default::default()
    };
    let n = cfg.modes;
    let c: Vec<f64> = (0..n).map(|j| (2.0 * PI * j as f64 / n as f64).cos()).collect();
    let initial = SpectralState { u: c.clone(), q: c, p: vec![0.0; n] };
    let stride = match mode {
        Mode::SingleScale { .. } => ratio(cfg.macro_step, cfg.bench_time_step).unwrap_or(1),
        Mode::Flavor { .. } => 1,
    };
    Ok(spectral::run_spectral_from(&core, mode, &initial, stride)?)
}

/// The named fields of one run.
fn run_fields(cfg: &RunConfig, mode: Mode) -> anyhow::Result<Vec<(&'static str, SpaceTimeField)>> {
    Ok(match cfg.experiment {
        Experiment::GlFd => {
            let field = match mode {
                Mode::SingleScale { .. } => gl_benchmark(cfg, &[cfg.macro_step])?,
                Mode::Flavor { .. } => fd_conslaw::run_fd(&gl_config(cfg), mode)?,
            };
            vec![("u", field)]
        }
        Experiment::SineGordonMsi => vec![("u", run_wave(cfg, cfg.stiffness, mode)?)],
        Experiment::SpectralThreeField => {
            let run = run_three_field(cfg, mode)?;
            vec![("u", run.u), ("q", run.q), ("p", run.p)]
        }
    })
}

fn diagnostics_json(cfg: &RunConfig) -> Value {
    // the stiff time scale is eps for the conservation law, 1/omega otherwise
    let eps = match cfg.experiment {
        Experiment::GlFd => cfg.stiffness,
        _ => 1.0 / cfg.stiffness,
    };
    let d = step_diagnostics(cfg.micro_step, eps, cfg.macro_step, flavors_core::mesh::DEFAULT_REGIME_THRESHOLD);
    json!({
        "fast_ratio": d.fast_ratio,
        "lower": d.lower,
        "upper": d.upper,
        "within_regime": d.within_regime,
    })
}

/// `run` with mode `single_scale` or `flavor`: one integration, field CSVs.
fn run_single(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let flavor = cfg.mode == RunMode::Flavor;
    let mode = if flavor { flavor_mode(cfg) } else { bench_mode(cfg) };
    let fields = run_fields(cfg, mode)?;
    for (name, field) in &fields {
        io::write_field_csv(&cfg.out_dir.join(format!("field_{name}.csv")), field)?;
    }
    let status = fields[0].1.status;
    let mut report = json!({
        "experiment": cfg.experiment,
        "mode": cfg.mode,
        "status": status_json(status),
        "columns": fields[0].1.n_columns(),
        "rows": fields[0].1.rows(),
    });
    if flavor {
        report["speedup"] = json!(speedup_of(cfg));
        report["diagnostics"] = diagnostics_json(cfg);
    }
    Ok(Outcome::new(report, &[status]))
}

/// FLAVOR against benchmark on the common mesh.
pub fn compare(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let flavor = run_fields(cfg, flavor_mode(cfg))?;
    let bench = run_fields(cfg, bench_mode(cfg))?;
    let statuses: Vec<RunStatus> = flavor.iter().chain(&bench).map(|(_, f)| f.status).collect();
    let mut report = json!({
        "experiment": cfg.experiment,
        "flavor_status": status_json(flavor[0].1.status),
        "benchmark_status": status_json(bench[0].1.status),
        "speedup": speedup_of(cfg),
        "diagnostics": diagnostics_json(cfg),
    });
    if statuses.iter().all(RunStatus::is_stable) {
        let opts = CompareOptions { low_pass: cfg.low_pass };
        let mut per_field = serde_json::Map::new();
        for ((name, f), (_, b)) in flavor.iter().zip(&bench) {
            let r = bench::compare_with(f, b, opts)?.with_speedup(speedup_of(cfg));
            per_field.insert((*name).to_string(), comparison_json(&r));
        }
        report["comparison"] = Value::Object(per_field);
    }
    Ok(Outcome::new(report, &statuses))
}

/// Averaged-stiffness control for the wave experiment.
pub fn control(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let omega_tilde = msi_wave::averaged_stiffness(cfg.stiffness, cfg.micro_step, cfg.macro_step);
    let flavor = run_wave(cfg, cfg.stiffness, flavor_mode(cfg))?;
    let bench = run_wave(cfg, cfg.stiffness, bench_mode(cfg))?;
    let ctrl = run_wave(cfg, omega_tilde, bench_mode(cfg))?;
    let statuses = [flavor.status, bench.status, ctrl.status];
    let mut report = json!({
        "experiment": cfg.experiment,
        "omega_tilde": omega_tilde,
        "flavor_status": status_json(flavor.status),
        "benchmark_status": status_json(bench.status),
        "control_status": status_json(ctrl.status),
        "low_pass": cfg.low_pass,
    });
    if statuses.iter().all(RunStatus::is_stable) {
        let opts = CompareOptions { low_pass: cfg.low_pass };
        let to_bench = bench::compare_with(&flavor, &bench, opts)?;
        let to_ctrl = bench::compare_with(&flavor, &ctrl, opts)?;
        report["distance_benchmark"] = json!(to_bench.error);
        report["distance_control"] = json!(to_ctrl.error);
        report["ratio"] = json!(to_ctrl.error / to_bench.error);
    }
    for (name, f) in [("flavor_u", &flavor), ("control_u", &ctrl)] {
        io::write_field_csv(&cfg.out_dir.join(format!("field_{name}.csv")), f)?;
    }
    Ok(Outcome::new(report, &statuses))
}

/// Error surface over the configured `(H, h)` lists.
pub fn sweep(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    if cfg.experiment != Experiment::GlFd {
        bail!("sweep is only defined for the gl_fd experiment");
    }
    let bench = gl_benchmark(cfg, &cfg.sweep_macro_steps).context("benchmark run")?;
    if let RunStatus::Unstable { time } = bench.status {
        let report = json!({ "benchmark_status": status_json(bench.status) });
        return Ok(Outcome { report, unstable_at: Some(time) });
    }
    let setup = SweepSetup { cfg: gl_config(cfg), space_step: cfg.space_step };
    let threads = cfg.resolved_threads();
    let surface = sweep::parallel_sweep(&setup, &cfg.sweep_macro_steps, &cfg.sweep_micro_steps, &bench, threads)?;
    io::write_surface_csv(&cfg.out_dir.join("surface.csv"), &surface)?;

    let stable = surface.cells().iter().filter(|c| c.is_stable()).count();
    let argmin = surface.argmin().map(
        |(e, a, b)| json!({ "error": e, "macro_step": surface.macro_steps[a], "micro_step": surface.micro_steps[b] }),
    );
    let speedups: Vec<f64> = cfg
        .sweep_macro_steps
        .iter()
        .map(|&big| bench::speedup(big, cfg.space_step, cfg.bench_time_step, cfg.bench_space_step))
        .collect();
    let report = json!({
        "experiment": cfg.experiment,
        "cells": surface.cells().len(),
        "stable_cells": stable,
        "masked_cells": surface.cells().len() - stable,
        "min": argmin,
        "speedup_by_macro_step": speedups,
    });
    Ok(Outcome::new(report, &[]))
}

/// Dispatches on `cfg.mode`, then writes `report.json` and `config.json`.
pub fn execute(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    cfg.validate()?;
    let outcome = match cfg.mode {
        RunMode::SingleScale | RunMode::Flavor => run_single(cfg)?,
        RunMode::Sweep => sweep(cfg)?,
        RunMode::Control => control(cfg)?,
    };
    write_sidecars(cfg, &outcome)?;
    Ok(outcome)
}

/// As [`execute`] for the `compare` subcommand, which ignores `cfg.mode`.
pub fn execute_compare(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    cfg.validate()?;
    let outcome = compare(cfg)?;
    write_sidecars(cfg, &outcome)?;
    Ok(outcome)
}

fn write_sidecars(cfg: &RunConfig, outcome: &Outcome) -> anyhow::Result<()> {
    io::write_json(&cfg.out_dir.join("report.json"), &outcome.report)?;
    io::write_json(&cfg.out_dir.join("config.json"), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_speedups() {
        assert!((speedup_of(&RunConfig::paper_gl()) - 312.5).abs() < 1e-9);
        assert!((speedup_of(&RunConfig::paper_sg()) - 50.0).abs() < 1e-9);
        assert!((speedup_of(&RunConfig::paper_spectral()) - 50.0).abs() < 1e-9);
    }

    #[test]
    fn bench_sampling_follows_grids() {
        let cfg = RunConfig::paper_gl();
        assert_eq!(gl_bench_sampling(&cfg, &[0.005]), Sampling { space_stride: 25, time_stride: 25 });
        assert_eq!(gl_bench_sampling(&cfg, &cfg.sweep_macro_steps), Sampling { space_stride: 25, time_stride: 1 });
    }

    #[test]
    fn short_gl_compare_is_small() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig { final_time: 0.1, out_dir: dir.path().into(), ..RunConfig::paper_gl() };
        let out = execute_compare(&cfg).unwrap();
        assert!(out.unstable_at.is_none());
        let e = out.report["comparison"]["u"]["error"].as_f64().unwrap();
        assert!(e.is_finite() && e < 1.0, "{e}");
    }
}
