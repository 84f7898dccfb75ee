//! Lax-Friedrichs for `u_t + f(u)_x = eps^-1 u (1 - u^2)` on a periodic
//! domain, and its FLAVORization.
//!
//! The stencil is written in centered form: the new `u_i` is computed from
//! `u_{i-1}` and `u_{i+1}` (the textbook scheme shifted by one index).

use alloc::vec;
use alloc::vec::Vec;

use crate::field::{RunStatus, SpaceTimeField};
use crate::mesh::{build_mesh, UniformMesh};
use crate::ode_flavor::{self, BlowupGuard, SwitchedFlow};
use crate::{Error, Mode, Result};

/// Flux function `f` with its analytic derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Flux {
    /// `f(u) = sin u`.
    Sine,
    /// `f(u) = c u`.
    Linear(f64),
}

impl Flux {
    pub fn value(&self, u: f64) -> f64 {
        match *self {
            Flux::Sine => libm::sin(u),
            Flux::Linear(c) => c * u,
        }
    }

    pub fn derivative(&self, u: f64) -> f64 {
        match *self {
            Flux::Sine => libm::cos(u),
            Flux::Linear(c) => c,
        }
    }
}

fn sin_pi_x(x: f64) -> f64 {
    libm::sin(core::f64::consts::PI * x)
}

#[derive(Debug, Clone, Copy)]
pub struct ConsLawConfig {
    pub eps: f64,
    pub length: f64,
    pub final_time: f64,
    pub flux: Flux,
    pub initial: fn(f64) -> f64,
}

impl Default for ConsLawConfig {
    /// `eps = 2e-3`, `L = T = 2`, `f = sin`, `u(x, 0) = sin(pi x)`.
    fn default() -> Self {
        Self { eps: 2e-3, length: 2.0, final_time: 2.0, flux: Flux::Sine, initial: sin_pi_x }
    }
}

impl ConsLawConfig {
    pub fn eps_inv(&self) -> f64 {
        1.0 / self.eps
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(Error::InvalidParameter("eps must be positive"));
        }
        Ok(())
    }

    /// Initial condition sampled at `x_i = i L / n`.
    pub fn sample_initial(&self, n: usize) -> Vec<f64> {
        (0..n).map(|i| (self.initial)(self.length * i as f64 / n as f64)).collect()
    }
}

/// One Lax-Friedrichs step with stiffness `alpha`, written into `out`.
pub fn lf_step_into(u: &[f64], space_step: f64, tau: f64, alpha: f64, flux: Flux, out: &mut [f64]) {
    let n = u.len();
    debug_assert_eq!(out.len(), n);
    if n == 0 {
        return;
    }
    let inv_2k = 1.0 / (2.0 * space_step);
    for i in 0..n {
        let left = u[(i + n - 1) % n];
        let right = u[(i + 1) % n];
        let avg = 0.5 * (left + right);
        let transport = flux.derivative(avg) * (right - left) * inv_2k;
        // source enters with the sign of the PDE, so u is driven toward +-1
        let source = alpha * avg * (1.0 - avg * avg);
        out[i] = avg - tau * transport + tau * source;
    }
}

/// One Lax-Friedrichs step; `NonFinite` if any entry overflows.
pub fn lf_step(u: &[f64], space_step: f64, tau: f64, alpha: f64, flux: Flux) -> Result<Vec<f64>> {
    let mut out = vec![0.0; u.len()];
    lf_step_into(u, space_step, tau, alpha, flux, &mut out);
    if out.iter().all(|v| v.is_finite()) {
        Ok(out)
    } else {
        Err(Error::NonFinite { time: tau })
    }
}

/// Lax-Friedrichs as a switched legacy flow on `n` periodic nodes.
#[derive(Debug, Clone, Copy)]
pub struct LaxFriedrichsFlow {
    pub n: usize,
    pub space_step: f64,
    pub flux: Flux,
}

impl SwitchedFlow for LaxFriedrichsFlow {
    fn dim(&self) -> usize {
        self.n
    }

    fn step(&self, state: &[f64], _t: f64, tau: f64, alpha: f64, out: &mut [f64]) {
        lf_step_into(state, self.space_step, tau, alpha, self.flux, out);
    }
}

/// One FLAVOR macro step: returns `(u at t + H, u~ at t + h)`.
pub fn lf_flavor_macro_step(
    u: &[f64],
    space_step: f64,
    micro_step: f64,
    macro_step: f64,
    cfg: &ConsLawConfig,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let flow = LaxFriedrichsFlow { n: u.len(), space_step, flux: cfg.flux };
    ode_flavor::flavor_macro_step(&flow, u, 0.0, micro_step, macro_step, cfg.eps_inv())
}

/// Storage subsampling for single-scale runs; flavor runs store every node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sampling {
    /// Keep every `space_stride`-th spatial node.
    pub space_stride: usize,
    /// Keep every `time_stride`-th time step (the final step is always kept).
    pub time_stride: usize,
}

impl Default for Sampling {
    fn default() -> Self {
        Self { space_stride: 1, time_stride: 1 }
    }
}

/// Runs the scheme with the configured initial condition and full storage.
pub fn run_fd(cfg: &ConsLawConfig, mode: Mode) -> Result<SpaceTimeField> {
    run_fd_sampled(cfg, mode, Sampling::default())
}

pub fn run_fd_sampled(cfg: &ConsLawConfig, mode: Mode, sampling: Sampling) -> Result<SpaceTimeField> {
    let n = match mode {
        Mode::SingleScale { space_step, time_step } => {
            UniformMesh::new(cfg.length, cfg.final_time, space_step, time_step)?.n_space
        }
        Mode::Flavor { space_step, micro_step, macro_step } => {
            build_mesh(cfg.length, cfg.final_time, space_step, micro_step, macro_step)?.n_space
        }
    };
    run_fd_from(cfg, mode, &cfg.sample_initial(n), sampling)
}

/// Runs the scheme from explicit initial nodal values.
pub fn run_fd_from(cfg: &ConsLawConfig, mode: Mode, initial: &[f64], sampling: Sampling) -> Result<SpaceTimeField> {
    cfg.validate()?;
    if sampling.space_stride == 0 || sampling.time_stride == 0 {
        return Err(Error::InvalidParameter("sampling strides must be positive"));
    }
    let guard = BlowupGuard::default();
    match mode {
        Mode::SingleScale { space_step, time_step } => {
            let mesh = UniformMesh::new(cfg.length, cfg.final_time, space_step, time_step)?;
            check_initial(initial, mesh.n_space)?;
            if mesh.n_space % sampling.space_stride != 0 {
                return Err(Error::InvalidParameter("space stride must divide the node count"));
            }
            let stride = sampling.space_stride;
            let mut field = SpaceTimeField::new(cfg.length, mesh.n_space / stride);
            let mut u = initial.to_vec();
            let mut next = vec![0.0; u.len()];
            field.push_strided(0.0, true, &u, stride);
            for j in 1..=mesh.n_steps {
                lf_step_into(&u, space_step, time_step, cfg.eps_inv(), cfg.flux, &mut next);
                core::mem::swap(&mut u, &mut next);
                let t = mesh.time(j);
                if guard.is_blown_up(&u) {
                    field.status = RunStatus::Unstable { time: t };
                    break;
                }
                if j % sampling.time_stride == 0 || j == mesh.n_steps {
                    field.push_strided(t, true, &u, stride);
                }
            }
            Ok(field)
        }
        Mode::Flavor { space_step, micro_step, macro_step } => {
            let mesh = build_mesh(cfg.length, cfg.final_time, space_step, micro_step, macro_step)?;
            check_initial(initial, mesh.n_space)?;
            let flow = LaxFriedrichsFlow { n: mesh.n_space, space_step, flux: cfg.flux };
            let traj = ode_flavor::integrate_with(&flow, initial, &mesh, cfg.eps_inv(), guard)?;
            let mut field = SpaceTimeField::new(cfg.length, mesh.n_space);
            for (j, (t, s)) in traj.times.iter().zip(&traj.states).enumerate() {
                field.push_column(*t, j % 2 == 0, s)?;
            }
            if let Some(time) = traj.failure {
                field.status = RunStatus::Unstable { time };
            }
            Ok(field)
        }
    }
}

fn check_initial(initial: &[f64], n: usize) -> Result<()> {
    if initial.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: initial.len() });
    }
    if initial.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("initial condition must be finite"));
    }
    Ok(())
}

/// Zero crossings of a periodic nodal profile on `[0, length)`, by linear
/// interpolation between nodes of opposite sign (zero counts as positive).
pub fn zero_crossings(u: &[f64], length: f64) -> Vec<f64> {
    let n = u.len();
    let dx = length / n as f64;
    let mut out = Vec::new();
    for i in 0..n {
        let (a, b) = (u[i], u[(i + 1) % n]);
        if (a >= 0.0) != (b >= 0.0) {
            let x = dx * (i as f64 + a / (a - b));
            out.push(if x >= length { x - length } else { x });
        }
    }
    out
}
