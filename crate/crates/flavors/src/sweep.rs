//! Parallel `(H, h)` error sweep.

use anyhow::Context;
use flavors_core::bench::{sweep_cell, ErrorSurface, SweepSetup};
use flavors_core::SpaceTimeField;
use rayon::prelude::*;

/// Runs every cell on a pool of `threads` workers.
///
/// Cells are pure, and each result lands in the slot of its `(H, h)` index,
/// so the surface does not depend on the thread count or schedule.
pub fn parallel_sweep(
    setup: &SweepSetup,
    macro_steps: &[f64],
    micro_steps: &[f64],
    benchmark: &SpaceTimeField,
    threads: usize,
) -> anyhow::Result<ErrorSurface> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .context("building the sweep thread pool")?;
    let width = micro_steps.len();
    let cells = pool.install(|| {
        (0..macro_steps.len() * width)
            .into_par_iter()
            .map(|idx| sweep_cell(setup, macro_steps[idx / width], micro_steps[idx % width], benchmark))
            .collect()
    });
    Ok(ErrorSurface::from_cells(macro_steps.to_vec(), micro_steps.to_vec(), cells)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use flavors_core::bench::error_sweep;
    use flavors_core::fd_conslaw::{run_fd_sampled, ConsLawConfig, Sampling};
    use flavors_core::Mode;

    #[test]
    fn matches_sequential_sweep() {
        let cfg = ConsLawConfig { final_time: 0.02, ..Default::default() };
        let bench = run_fd_sampled(
            &cfg,
            Mode::SingleScale { space_step: 0.0004, time_step: 0.0002 },
            Sampling { space_stride: 25, time_stride: 1 },
        )
        .unwrap();
        let setup = SweepSetup { cfg, space_step: 0.01 };
        let big = [0.0004, 0.002, 0.005];
        let small = [1e-4, 2e-4, 1e-3, 6e-3];
        let seq = error_sweep(&setup, &big, &small, &bench);
        for threads in [1, 3] {
            assert_eq!(parallel_sweep(&setup, &big, &small, &bench, threads).unwrap(), seq);
        }
    }
}
