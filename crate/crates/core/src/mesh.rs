//! Two-scale space-time mesh.
//!
//! Space is uniform with a mesoscopic step `K`. Time alternates a
//! microscopic gap `h` (stiffness on) and a mesoscopic gap `H - h`
//! (stiffness off), so node `2m` sits at `mH` and node `2m + 1` at `mH + h`.

use alloc::vec::Vec;

use crate::{integral_ratio, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeMesh {
    pub length: f64,
    pub final_time: f64,
    pub space_step: f64,
    pub micro_step: f64,
    pub macro_step: f64,
    /// Spatial node count, `L / K`.
    pub n_space: usize,
    /// Macro step count, `T / H`.
    pub n_macro: usize,
    time_nodes: Vec<f64>,
}

impl SpaceTimeMesh {
    /// `{0, h, H, H + h, ..., (M-1)H + h, MH}`; `2M + 1` entries.
    pub fn time_nodes(&self) -> &[f64] {
        &self.time_nodes
    }

    /// Time of macro node `m`, i.e. `mH`, with the last one pinned to `T`.
    pub fn macro_time(&self, m: usize) -> f64 {
        self.final_time * (m as f64) / (self.n_macro as f64)
    }

    /// Spatial node positions `iK`, `i = 0..N`.
    pub fn space_nodes(&self) -> Vec<f64> {
        (0..self.n_space).map(|i| self.length * i as f64 / self.n_space as f64).collect()
    }

    /// Whether time node `j` is a macro node (`t = mH`).
    pub fn is_macro_node(j: usize) -> bool {
        j.is_multiple_of(2)
    }
}

/// Builds the FLAVOR mesh for `[0, L] x [0, T]`.
pub fn build_mesh(
    length: f64,
    final_time: f64,
    space_step: f64,
    micro_step: f64,
    macro_step: f64,
) -> Result<SpaceTimeMesh> {
    for (v, name) in [
        (length, "L must be positive and finite"),
        (final_time, "T must be positive and finite"),
        (space_step, "K must be positive and finite"),
        (micro_step, "h must be positive and finite"),
        (macro_step, "H must be positive and finite"),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidParameter(name));
        }
    }
    if micro_step >= macro_step {
        return Err(Error::DegenerateSteps { micro: micro_step, macro_step });
    }
    let n_space = integral_ratio(length, space_step)
        .ok_or(Error::NonDivisible { quantity: "L/K", ratio: length / space_step })?;
    let n_macro = integral_ratio(final_time, macro_step)
        .ok_or(Error::NonDivisible { quantity: "T/H", ratio: final_time / macro_step })?;

    let mut time_nodes = Vec::with_capacity(2 * n_macro + 1);
    for m in 0..n_macro {
        let t = final_time * (m as f64) / (n_macro as f64);
        time_nodes.push(t);
        time_nodes.push(t + micro_step);
    }
    time_nodes.push(final_time);

    Ok(SpaceTimeMesh { length, final_time, space_step, micro_step, macro_step, n_space, n_macro, time_nodes })
}

/// Uniform single-scale mesh used by the benchmark integrations.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformMesh {
    pub length: f64,
    pub final_time: f64,
    pub space_step: f64,
    pub time_step: f64,
    pub n_space: usize,
    pub n_steps: usize,
}

impl UniformMesh {
    pub fn new(length: f64, final_time: f64, space_step: f64, time_step: f64) -> Result<Self> {
        for (v, name) in [
            (length, "L must be positive and finite"),
            (final_time, "T must be positive and finite"),
            (space_step, "k must be positive and finite"),
            (time_step, "h must be positive and finite"),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(name));
            }
        }
        let n_space = integral_ratio(length, space_step)
            .ok_or(Error::NonDivisible { quantity: "L/k", ratio: length / space_step })?;
        let n_steps = integral_ratio(final_time, time_step)
            .ok_or(Error::NonDivisible { quantity: "T/h", ratio: final_time / time_step })?;
        Ok(Self { length, final_time, space_step, time_step, n_space, n_steps })
    }

    pub fn time(&self, j: usize) -> f64 {
        self.final_time * (j as f64) / (self.n_steps as f64)
    }
}

/// Default regime threshold for [`step_diagnostics`].
pub const DEFAULT_REGIME_THRESHOLD: f64 = 0.5;

/// Ratios behind the tuning condition `(h/eps)^2 << H << h/eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    /// `h / eps`.
    pub fast_ratio: f64,
    /// `(h / eps)^2 / H`.
    pub lower: f64,
    /// `eps H / h`.
    pub upper: f64,
    pub within_regime: bool,
}

/// Reports how well `(h, eps, H)` satisfy the tuning condition. Never rejects.
pub fn step_diagnostics(micro_step: f64, eps: f64, macro_step: f64, threshold: f64) -> StepDiagnostics {
    let fast_ratio = micro_step / eps;
    let lower = fast_ratio * fast_ratio / macro_step;
    let upper = eps * macro_step / micro_step;
    StepDiagnostics { fast_ratio, lower, upper, within_regime: lower < threshold && upper < threshold }
}
