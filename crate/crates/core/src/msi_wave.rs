//! Variational multisymplectic integrator for `u_tt - u_xx = V'(u)` with
//! periodic boundaries, and its FLAVORization.
//!
//! The discrete Lagrangian on cell `(i, j)` is
//!
//! ```text
//! L_ij = h_j k [ 1/2 ((u_{i,j+1} - u_ij) / h_j)^2 - 1/2 ((u_{i+1,j} - u_ij) / k)^2 + V_j(u_ij) ]
//! ```
//!
//! and each new time row solves `dS_d / du_ij = 0` explicitly. In the
//! FLAVOR grid, rows alternate a micro step `h` with the stiff potential and
//! a meso step `H - h` with the stiff part removed.
//!
//! Rows are indexed from zero here: row 0 is the initial displacement, and
//! even rows carry the micro step (the 1-based odd rows of the usual
//! notation).

use alloc::vec;
use alloc::vec::Vec;

use crate::field::{RunStatus, SpaceTimeField};
use crate::mesh::{build_mesh, UniformMesh};
use crate::ode_flavor::BlowupGuard;
use crate::{Error, Mode, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    /// `V = 0`.
    Zero,
    /// `V(u) = -cos u` (Sine-Gordon).
    Cosine,
    /// `V(u) = -cos(omega u) - cos u`.
    StiffCosine { omega: f64 },
}

impl Potential {
    pub fn value(&self, u: f64) -> f64 {
        match *self {
            Potential::Zero => 0.0,
            Potential::Cosine => -libm::cos(u),
            Potential::StiffCosine { omega } => -libm::cos(omega * u) - libm::cos(u),
        }
    }

    pub fn derivative(&self, u: f64) -> f64 {
        match *self {
            Potential::Zero => 0.0,
            Potential::Cosine => libm::sin(u),
            Potential::StiffCosine { omega } => omega * libm::sin(omega * u) + libm::sin(u),
        }
    }
}

fn sin_pi_x(x: f64) -> f64 {
    // sin(2 pi x / L) for the default L = 2
    libm::sin(core::f64::consts::PI * x)
}

fn zero(_x: f64) -> f64 {
    0.0
}

#[derive(Debug, Clone, Copy)]
pub struct WaveConfig {
    /// Potential on rows with stiffness on.
    pub stiff: Potential,
    /// Potential on rows with stiffness off.
    pub soft: Potential,
    pub length: f64,
    pub final_time: f64,
    /// Initial displacement.
    pub displacement: fn(f64) -> f64,
    /// Initial velocity.
    pub velocity: fn(f64) -> f64,
}

impl WaveConfig {
    /// Stiff Sine-Gordon, `V = -cos(omega u) - cos u`, on `L = 2` with
    /// `u(x, 0) = sin(2 pi x / L)`, `u_t(x, 0) = 0`.
    pub fn sine_gordon(omega: f64, final_time: f64) -> Self {
        Self {
            stiff: Potential::StiffCosine { omega },
            soft: Potential::Cosine,
            length: 2.0,
            final_time,
            displacement: sin_pi_x,
            velocity: zero,
        }
    }

    /// Linear wave equation, `V = 0`.
    pub fn free_wave(length: f64, final_time: f64, displacement: fn(f64) -> f64) -> Self {
        Self { stiff: Potential::Zero, soft: Potential::Zero, length, final_time, displacement, velocity: zero }
    }
}

/// Per-row time steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RowSteps {
    /// Single-scale: every row has step `h`, stiffness always on.
    Uniform { step: f64 },
    /// FLAVOR grid: even rows `h` (stiff), odd rows `H - h` (soft).
    Flavor { micro_step: f64, macro_step: f64 },
}

impl RowSteps {
    pub fn step(&self, row: usize) -> f64 {
        match *self {
            RowSteps::Uniform { step } => step,
            RowSteps::Flavor { micro_step, macro_step } => {
                if row.is_multiple_of(2) {
                    micro_step
                } else {
                    macro_step - micro_step
                }
            }
        }
    }

    pub fn is_stiff(&self, row: usize) -> bool {
        match self {
            RowSteps::Uniform { .. } => true,
            RowSteps::Flavor { .. } => row.is_multiple_of(2),
        }
    }

    pub fn potential(&self, row: usize, cfg: &WaveConfig) -> Potential {
        if self.is_stiff(row) {
            cfg.stiff
        } else {
            cfg.soft
        }
    }
}

/// `omega h / H`, the stiffness a naive splitting argument would assign.
pub fn averaged_stiffness(omega: f64, micro_step: f64, macro_step: f64) -> f64 {
    omega * micro_step / macro_step
}

/// Discrete Lagrangian of one space-time cell.
pub fn discrete_lagrangian(u_ij: f64, u_i_next_t: f64, u_next_i: f64, h: f64, k: f64, v: &Potential) -> f64 {
    let ut = (u_i_next_t - u_ij) / h;
    let ux = (u_next_i - u_ij) / k;
    h * k * (0.5 * ut * ut - 0.5 * ux * ux + v.value(u_ij))
}

/// Solves the discrete Euler-Lagrange equation at row `j` for row `j + 1`.
///
/// `h_prev` and `h_curr` are the steps of rows `j - 1` and `j`; `k` is the
/// uniform space step.
pub fn del_update_with(
    prev: &[f64],
    curr: &[f64],
    h_prev: f64,
    h_curr: f64,
    k: f64,
    v: &Potential,
) -> Result<Vec<f64>> {
    let n = curr.len();
    if prev.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: prev.len() });
    }
    let mut next = vec![0.0; n];
    del_update_into(prev, curr, h_prev, h_curr, k, v, &mut next);
    if next.iter().all(|x| x.is_finite()) {
        Ok(next)
    } else {
        Err(Error::NonFinite { time: f64::NAN })
    }
}

fn del_update_into(prev: &[f64], curr: &[f64], h_prev: f64, h_curr: f64, k: f64, v: &Potential, next: &mut [f64]) {
    let n = curr.len();
    for i in 0..n {
        let u = curr[i];
        let right = curr[(i + 1) % n];
        let left = curr[(i + n - 1) % n];
        // every term of dS_d/du_ij except k (u_ij - u_{i,j+1}) / h_j
        let rest = -h_curr * (u - right) / k + h_curr * k * v.derivative(u) + k * (u - prev[i]) / h_prev
            - h_curr * (u - left) / k;
        next[i] = u + h_curr / k * rest;
    }
}

/// Row update selecting the step sizes and potential from the grid.
pub fn del_update(
    prev: &[f64],
    curr: &[f64],
    row: usize,
    steps: &RowSteps,
    k: f64,
    cfg: &WaveConfig,
) -> Result<Vec<f64>> {
    if row == 0 {
        return Err(Error::InvalidParameter("row 0 has no predecessor"));
    }
    del_update_with(prev, curr, steps.step(row - 1), steps.step(row), k, &steps.potential(row, cfg))
}

/// Runs the integrator over `[0, L] x [0, T]`.
///
/// Row 0 is `f(x_i)`, row 1 is `f(x_i) + h g(x_i)` at the same nodes.
pub fn run_msi(cfg: &WaveConfig, mode: Mode) -> Result<SpaceTimeField> {
    let (n, ..) = layout(cfg, mode)?;
    let x: Vec<f64> = (0..n).map(|i| cfg.length * i as f64 / n as f64).collect();
    let displacement: Vec<f64> = x.iter().map(|&x| (cfg.displacement)(x)).collect();
    let velocity: Vec<f64> = x.iter().map(|&x| (cfg.velocity)(x)).collect();
    run_msi_from(cfg, mode, &displacement, &velocity)
}

type Layout = (usize, RowSteps, Vec<f64>, Vec<bool>);

fn layout(cfg: &WaveConfig, mode: Mode) -> Result<Layout> {
    Ok(match mode {
        Mode::SingleScale { space_step, time_step } => {
            let mesh = UniformMesh::new(cfg.length, cfg.final_time, space_step, time_step)?;
            let times = (0..=mesh.n_steps).map(|j| mesh.time(j)).collect::<Vec<_>>();
            let flags = vec![true; times.len()];
            (mesh.n_space, RowSteps::Uniform { step: time_step }, times, flags)
        }
        Mode::Flavor { space_step, micro_step, macro_step } => {
            let mesh = build_mesh(cfg.length, cfg.final_time, space_step, micro_step, macro_step)?;
            let times = mesh.time_nodes().to_vec();
            let flags = (0..times.len()).map(|j| j % 2 == 0).collect();
            (mesh.n_space, RowSteps::Flavor { micro_step, macro_step }, times, flags)
        }
    })
}

/// Runs from explicit initial displacement and velocity samples.
pub fn run_msi_from(cfg: &WaveConfig, mode: Mode, displacement: &[f64], velocity: &[f64]) -> Result<SpaceTimeField> {
    let (n, steps, times, macro_flags) = layout(cfg, mode)?;
    let k = match mode {
        Mode::SingleScale { space_step, .. } | Mode::Flavor { space_step, .. } => space_step,
    };
    for v in [displacement, velocity] {
        if v.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: v.len() });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("initial data must be finite"));
        }
    }
    let guard = BlowupGuard::default();
    let mut field = SpaceTimeField::new(cfg.length, n);
    let mut prev = displacement.to_vec();
    let h0 = steps.step(0);
    let mut curr: Vec<f64> = prev.iter().zip(velocity).map(|(u, g)| u + h0 * g).collect();
    field.push_column(times[0], macro_flags[0], &prev)?;
    field.push_column(times[1], macro_flags[1], &curr)?;
    let mut next = vec![0.0; n];
    for row in 1..times.len() - 1 {
        let v = steps.potential(row, cfg);
        del_update_into(&prev, &curr, steps.step(row - 1), steps.step(row), k, &v, &mut next);
        if guard.is_blown_up(&next) {
            field.status = RunStatus::Unstable { time: times[row + 1] };
            return Ok(field);
        }
        field.push_column(times[row + 1], macro_flags[row + 1], &next)?;
        core::mem::swap(&mut prev, &mut curr);
        core::mem::swap(&mut curr, &mut next);
    }
    Ok(field)
}

/// Total discrete action over all cells whose upper row is stored.
pub fn discrete_action(field: &SpaceTimeField, steps: &RowSteps, k: f64, cfg: &WaveConfig) -> f64 {
    let n = field.rows();
    let mut s = 0.0;
    for r in 0..field.n_columns().saturating_sub(1) {
        let v = steps.potential(r, cfg);
        for i in 0..n {
            s += discrete_lagrangian(
                field.value(i, r),
                field.value(i, r + 1),
                field.value((i + 1) % n, r),
                steps.step(r),
                k,
                &v,
            );
        }
    }
    s
}

/// Central-difference gradient of the discrete action with respect to every
/// interior node `u_{i,r}`, `1 <= r <= rows - 2`.
///
/// Only the three cells touching `u_{i,r}` depend on it, so the difference is
/// taken on their sum. Returns one vector per interior row.
pub fn action_gradient(
    field: &SpaceTimeField,
    steps: &RowSteps,
    k: f64,
    cfg: &WaveConfig,
    delta: f64,
) -> Vec<Vec<f64>> {
    let n = field.rows();
    let cols = field.n_columns();
    let mut out = Vec::with_capacity(cols.saturating_sub(2));
    for r in 1..cols.saturating_sub(1) {
        let v_here = steps.potential(r, cfg);
        let v_below = steps.potential(r - 1, cfg);
        let (h_here, h_below) = (steps.step(r), steps.step(r - 1));
        let mut row = Vec::with_capacity(n);
        for i in 0..n {
            let ip = (i + 1) % n;
            let im = (i + n - 1) % n;
            let local = |u: f64| {
                discrete_lagrangian(u, field.value(i, r + 1), field.value(ip, r), h_here, k, &v_here)
                    + discrete_lagrangian(field.value(i, r - 1), u, field.value(ip, r - 1), h_below, k, &v_below)
                    + discrete_lagrangian(field.value(im, r), field.value(im, r + 1), u, h_here, k, &v_here)
            };
            let u = field.value(i, r);
            row.push((local(u + delta) - local(u - delta)) / (2.0 * delta));
        }
        out.push(row);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn lagrangian_examples() {
        assert_eq!(discrete_lagrangian(0.3, 0.3, 0.3, 0.1, 0.2, &Potential::Zero), 0.0);
        assert!((discrete_lagrangian(0.0, 0.0, 0.0, 1.0, 1.0, &Potential::Cosine) + 1.0).abs() < 1e-15);
        // 0.5 * 0.25 * [1/2 (1/0.5)^2 - 1/2 (2/0.25)^2] = 0.125 * (2 - 32)
        let l = discrete_lagrangian(0.0, 1.0, 2.0, 0.5, 0.25, &Potential::Zero);
        assert!((l - (-3.75)).abs() < 1e-14, "{l}");
    }

    #[test]
    fn averaged_stiffness_values() {
        assert!((averaged_stiffness(20.0, 0.1, 1.0) - 2.0).abs() < 1e-14);
        assert!((averaged_stiffness(7.0, 0.3, 0.3) - 7.0).abs() < 1e-14);
        assert!((averaged_stiffness(1000.0, 1e-6, 1e-2) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn constant_rows_stay_constant() {
        let row = vec![0.8; 10];
        let next = del_update_with(&row, &row, 0.01, 0.02, 0.1, &Potential::Zero).unwrap();
        assert!(next.iter().all(|v| (v - 0.8).abs() < 1e-15));
    }

    #[test]
    fn uniform_mesh_reduces_to_leapfrog() {
        let n = 17;
        let prev: Vec<f64> = (0..n).map(|i| (0.3 * i as f64).sin()).collect();
        let curr: Vec<f64> = (0..n).map(|i| (0.3 * i as f64 + 0.1).cos()).collect();
        let h = 0.01;
        let next = del_update_with(&prev, &curr, h, h, h, &Potential::Zero).unwrap();
        for i in 0..n {
            let want = curr[(i + 1) % n] + curr[(i + n - 1) % n] - prev[i];
            assert!((next[i] - want).abs() < 1e-12);
        }
        let back = del_update_with(&next, &curr, h, h, h, &Potential::Zero).unwrap();
        for i in 0..n {
            assert!((back[i] - prev[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn del_update_rejects_row_zero() {
        let cfg = WaveConfig::sine_gordon(20.0, 1.0);
        let steps = RowSteps::Uniform { step: 0.01 };
        assert!(del_update(&[0.0], &[0.0], 0, &steps, 0.1, &cfg).is_err());
    }

    #[test]
    fn row_parity() {
        let steps = RowSteps::Flavor { micro_step: 0.0025, macro_step: 0.025 };
        assert_eq!(steps.step(0), 0.0025);
        assert!((steps.step(1) - 0.0225).abs() < 1e-17);
        assert!(steps.is_stiff(0) && !steps.is_stiff(1) && steps.is_stiff(2));
        let cfg = WaveConfig::sine_gordon(20.0, 1.0);
        assert_eq!(steps.potential(3, &cfg), Potential::Cosine);
        assert_eq!(steps.potential(4, &cfg), Potential::StiffCosine { omega: 20.0 });
    }

    #[test]
    fn zero_data_is_equilibrium() {
        let mut cfg = WaveConfig::sine_gordon(20.0, 0.5);
        cfg.displacement = zero;
        for mode in [
            Mode::SingleScale { space_step: 0.005, time_step: 0.0025 },
            Mode::Flavor { space_step: 0.05, micro_step: 0.0025, macro_step: 0.025 },
        ] {
            let f = run_msi(&cfg, mode).unwrap();
            assert!(f.columns().all(|c| c.iter().all(|v| *v == 0.0)));
        }
    }

    #[test]
    fn flavor_rows_follow_mesh() {
        let cfg = WaveConfig::sine_gordon(20.0, 0.5);
        let f = run_msi(&cfg, Mode::Flavor { space_step: 0.05, micro_step: 0.0025, macro_step: 0.025 }).unwrap();
        assert_eq!(f.n_columns(), 41);
        assert_eq!(f.rows(), 40);
        assert!((f.times()[1] - 0.0025).abs() < 1e-15 && (f.times()[2] - 0.025).abs() < 1e-15);
    }

    #[test]
    fn dalembert_standing_wave() {
        // u = sin(2 pi x / L) cos(2 pi t / L); at t = L/2 it is -sin(2 pi x / L)
        let l = 2.0;
        let mut errs = Vec::new();
        for (k, h) in [(0.02, 0.01), (0.01, 0.005)] {
            let cfg = WaveConfig::free_wave(l, l / 2.0, sin_pi_x);
            let f = run_msi(&cfg, Mode::SingleScale { space_step: k, time_step: h }).unwrap();
            let last = f.last_column().unwrap();
            let err =
                f.space_nodes().iter().zip(last).map(|(x, u)| (u + (2.0 * PI * x / l).sin()).abs()).fold(0.0, f64::max);
            assert!(err < k + h, "k = {k}: error {err}");
            errs.push(err);
        }
        assert!(errs[1] < errs[0]);
    }

    #[test]
    fn computed_field_is_stationary() {
        let cfg = WaveConfig::sine_gordon(20.0, 0.25);
        let steps = RowSteps::Flavor { micro_step: 0.0025, macro_step: 0.025 };
        let f = run_msi(&cfg, Mode::Flavor { space_step: 0.05, micro_step: 0.0025, macro_step: 0.025 }).unwrap();
        let g = action_gradient(&f, &steps, 0.05, &cfg, 1e-5);
        assert_eq!(g.len(), f.n_columns() - 2);
        let worst = g.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(worst < 1e-9, "{worst}");
    }

    #[test]
    fn perturbed_field_is_not_stationary() {
        let cfg = WaveConfig::sine_gordon(20.0, 0.25);
        let steps = RowSteps::Uniform { step: 0.0025 };
        let mode = Mode::SingleScale { space_step: 0.005, time_step: 0.0025 };
        let f = run_msi(&cfg, mode).unwrap();
        let mut g = SpaceTimeField::new(f.length(), f.rows());
        for j in 0..f.n_columns() {
            let mut c = f.column(j).to_vec();
            if j == 5 {
                c[3] += 1e-3;
            }
            g.push_column(f.times()[j], true, &c).unwrap();
        }
        let grad = action_gradient(&g, &steps, 0.005, &cfg, 1e-5);
        assert!(grad.iter().flatten().any(|v| v.abs() > 1e-6));
        let s0 = discrete_action(&f, &steps, 0.005, &cfg);
        assert!(s0.is_finite());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(16))]
            #[test]
            fn translation_equivariance(shift in 0usize..40, seed in proptest::collection::vec(-1.0f64..1.0, 40)) {
                let cfg = WaveConfig::sine_gordon(20.0, 0.1);
                let zeros = vec![0.0; 40];
                let shifted: Vec<f64> = (0..40).map(|i| seed[(i + 40 - shift) % 40]).collect();
                for mode in [
                    Mode::SingleScale { space_step: 0.05, time_step: 0.0025 },
                    Mode::Flavor { space_step: 0.05, micro_step: 0.0025, macro_step: 0.025 },
                ] {
                    let a = run_msi_from(&cfg, mode, &seed, &zeros).unwrap();
                    let b = run_msi_from(&cfg, mode, &shifted, &zeros).unwrap();
                    let (ca, cb) = (a.last_column().unwrap(), b.last_column().unwrap());
                    for i in 0..40 {
                        prop_assert!((cb[i] - ca[(i + 40 - shift) % 40]).abs() <= 1e-12);
                    }
                }
            }
        }
    }
}
