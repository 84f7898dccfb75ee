//! Generic FLAVOR composition over a legacy one-step flow.
//!
//! A macro step over `[t, t + H]` is
//! `Phi^0_{t+h, t+H} o Phi^{1/eps}_{t, t+h}`: the legacy flow with the stiff
//! coefficient on for `h`, then the same flow with it off for `H - h`.

use alloc::vec;
use alloc::vec::Vec;

use crate::bench::normalized_l1;
use crate::mesh::SpaceTimeMesh;
use crate::{Error, Result};

/// A legacy single-step integrator whose stiff coefficient can be replaced.
///
/// `alpha` stands in for `1/eps`: the FLAVOR driver passes either the stiff
/// value or `0`. Implementations must be deterministic.
pub trait SwitchedFlow {
    fn dim(&self) -> usize;

    /// Advances `state` from `t` to `t + tau` with stiffness `alpha`, writing into `out`.
    fn step(&self, state: &[f64], t: f64, tau: f64, alpha: f64, out: &mut [f64]);
}

impl<F: SwitchedFlow + ?Sized> SwitchedFlow for &F {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn step(&self, state: &[f64], t: f64, tau: f64, alpha: f64, out: &mut [f64]) {
        (**self).step(state, t, tau, alpha, out)
    }
}

/// Forward Euler over a right-hand side `rhs(state, t, alpha, deriv)`.
pub struct ForwardEuler<F> {
    dim: usize,
    rhs: F,
}

impl<F> ForwardEuler<F>
where
    F: Fn(&[f64], f64, f64, &mut [f64]),
{
    pub fn new(dim: usize, rhs: F) -> Self {
        Self { dim, rhs }
    }
}

impl<F> SwitchedFlow for ForwardEuler<F>
where
    F: Fn(&[f64], f64, f64, &mut [f64]),
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn step(&self, state: &[f64], t: f64, tau: f64, alpha: f64, out: &mut [f64]) {
        (self.rhs)(state, t, alpha, out);
        for (o, s) in out.iter_mut().zip(state) {
            *o = s + tau * *o;
        }
    }
}

/// Blow-up detection used while integrating.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowupGuard {
    /// States whose normalized L1 norm exceeds this are treated as unstable.
    pub max_norm: f64,
}

impl Default for BlowupGuard {
    fn default() -> Self {
        Self { max_norm: 1e6 }
    }
}

impl BlowupGuard {
    pub fn is_blown_up(&self, state: &[f64]) -> bool {
        if state.iter().any(|v| !v.is_finite()) {
            return true;
        }
        normalized_l1(state).is_ok_and(|n| n > self.max_norm)
    }
}

fn ensure_finite(state: &[f64], time: f64) -> Result<()> {
    if state.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { time })
    }
}

/// One FLAVOR macro step from `t`.
///
/// Returns `(state at t + H, state at t + h)`.
pub fn flavor_macro_step<F: SwitchedFlow>(
    flow: &F,
    state: &[f64],
    t: f64,
    micro_step: f64,
    macro_step: f64,
    eps_inv: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(micro_step > 0.0 && micro_step < macro_step) {
        return Err(Error::DegenerateSteps { micro: micro_step, macro_step });
    }
    if state.len() != flow.dim() {
        return Err(Error::DimensionMismatch { expected: flow.dim(), found: state.len() });
    }
    let mut mid = vec![0.0; state.len()];
    let mut end = vec![0.0; state.len()];
    flow.step(state, t, micro_step, eps_inv, &mut mid);
    ensure_finite(&mid, t + micro_step)?;
    flow.step(&mid, t + micro_step, macro_step - micro_step, 0.0, &mut end);
    ensure_finite(&end, t + macro_step)?;
    Ok((end, mid))
}

/// States sampled on every node of a FLAVOR mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Time at which the run went unstable; `times`/`states` stop before it.
    pub failure: Option<f64>,
}

impl Trajectory {
    pub fn is_stable(&self) -> bool {
        self.failure.is_none()
    }

    pub fn last_state(&self) -> &[f64] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Integrates over every macro step of `mesh` with the default blow-up guard.
pub fn integrate<F: SwitchedFlow>(flow: &F, state0: &[f64], mesh: &SpaceTimeMesh, eps_inv: f64) -> Result<Trajectory> {
    integrate_with(flow, state0, mesh, eps_inv, BlowupGuard::default())
}

pub fn integrate_with<F: SwitchedFlow>(
    flow: &F,
    state0: &[f64],
    mesh: &SpaceTimeMesh,
    eps_inv: f64,
    guard: BlowupGuard,
) -> Result<Trajectory> {
    if state0.len() != flow.dim() {
        return Err(Error::DimensionMismatch { expected: flow.dim(), found: state0.len() });
    }
    if state0.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("initial state must be finite"));
    }
    let nodes = mesh.time_nodes();
    let h = mesh.micro_step;
    let mut times = Vec::with_capacity(nodes.len());
    let mut states = Vec::with_capacity(nodes.len());
    times.push(nodes[0]);
    states.push(state0.to_vec());

    let mut mid = vec![0.0; state0.len()];
    let mut end = vec![0.0; state0.len()];
    for m in 0..mesh.n_macro {
        let t0 = nodes[2 * m];
        let t1 = nodes[2 * m + 1];
        let t2 = nodes[2 * m + 2];
        let current = states.last().expect("trajectory holds the initial state");
        flow.step(current, t0, h, eps_inv, &mut mid);
        if guard.is_blown_up(&mid) {
            return Ok(Trajectory { times, states, failure: Some(t1) });
        }
        // H - h measured on the mesh so that the nodes close up exactly
        flow.step(&mid, t1, t2 - t1, 0.0, &mut end);
        times.push(t1);
        states.push(mid.clone());
        if guard.is_blown_up(&end) {
            return Ok(Trajectory { times, states, failure: Some(t2) });
        }
        times.push(t2);
        states.push(end.clone());
    }
    Ok(Trajectory { times, states, failure: None })
}
