//! Fourier collocation for the three-field system
//!
//! ```text
//! u_t + u_x - q^2       = 0
//! q_t + q_x - p         = 0
//! p_t + p_x + omega^2 q = 0
//! ```
//!
//! on a periodic interval, advanced by classical RK4 and FLAVORized as
//! `phi^0_{H-h} o phi^{omega^2}_h`.
//!
//! States are stored as physical values at the collocation points
//! `y_j = L j / N`. The map to Fourier coefficients is linear, so RK4 on the
//! nodal values is the same flow as RK4 on the coefficients.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::field::{RunStatus, SpaceTimeField};
use crate::mesh::{build_mesh, UniformMesh};
use crate::ode_flavor::{self, BlowupGuard, SwitchedFlow};
use crate::{integral_ratio, Error, Mode, Result};

/// Dense discrete Fourier transform of a fixed length.
///
/// `O(N^2)`, which is fine for the handful of modes collocation uses here.
#[derive(Debug, Clone)]
pub struct Dft {
    n: usize,
    twiddles: Vec<Complex64>,
}

impl Dft {
    pub fn new(n: usize) -> Self {
        let twiddles = (0..n)
            .map(|k| {
                let a = -2.0 * PI * k as f64 / n as f64;
                Complex64::new(libm::cos(a), libm::sin(a))
            })
            .collect();
        Self { n, twiddles }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Signed wavenumber of coefficient slot `k`: `0, 1, ..., N/2, -(N/2 - 1), ..., -1`.
    pub fn wavenumber(&self, k: usize) -> i64 {
        if k <= self.n / 2 {
            k as i64
        } else {
            k as i64 - self.n as i64
        }
    }

    /// `a_k = (1/N) sum_j x_j e^{-2 pi i k j / N}`.
    pub fn forward(&self, x: &[f64]) -> Vec<Complex64> {
        let n = self.n;
        let scale = 1.0 / n as f64;
        (0..n)
            .map(|k| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, &v) in x.iter().enumerate() {
                    acc += self.twiddles[(k * j) % n] * v;
                }
                acc * scale
            })
            .collect()
    }

    /// Real part of `sum_k a_k e^{2 pi i k j / N}`.
    pub fn inverse_real(&self, a: &[Complex64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.inverse_real_into(a, &mut out);
        out
    }

    pub fn inverse_real_into(&self, a: &[Complex64], out: &mut [f64]) {
        let n = self.n;
        for (j, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (k, c) in a.iter().enumerate() {
                // conj(twiddle) = e^{+2 pi i k j / N}
                let w = self.twiddles[(k * j) % n].conj();
                acc += c.re * w.re - c.im * w.im;
            }
            *o = acc;
        }
    }
}

/// Collocation derivative of periodic samples on `[0, length)`.
///
/// Mode `n` is multiplied by `i 2 pi n / L`; the Nyquist mode is dropped.
pub fn spectral_derivative(values: &[f64], length: f64) -> Vec<f64> {
    let dft = Dft::new(values.len());
    let mut out = vec![0.0; values.len()];
    derivative_into(&dft, values, length, &mut out);
    out
}

fn derivative_into(dft: &Dft, values: &[f64], length: f64, out: &mut [f64]) {
    let n = dft.len();
    let mut a = dft.forward(values);
    for (k, c) in a.iter_mut().enumerate() {
        let wn = dft.wavenumber(k);
        if n.is_multiple_of(2) && k == n / 2 {
            *c = Complex64::new(0.0, 0.0);
        } else {
            *c *= Complex64::new(0.0, 2.0 * PI * wn as f64 / length);
        }
    }
    dft.inverse_real_into(&a, out);
}

/// Keeps Fourier modes with `|n| <= max_mode` and drops the rest.
pub fn low_pass(values: &[f64], max_mode: usize) -> Vec<f64> {
    let dft = Dft::new(values.len());
    let mut a = dft.forward(values);
    for (k, c) in a.iter_mut().enumerate() {
        if dft.wavenumber(k).unsigned_abs() as usize > max_mode {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    dft.inverse_real(&a)
}

fn cos_2pi_x_over_2(x: f64) -> f64 {
    // default period L = 2
    libm::cos(PI * x)
}

fn zero(_x: f64) -> f64 {
    0.0
}

#[derive(Debug, Clone, Copy)]
pub struct SpectralConfig {
    pub omega: f64,
    pub length: f64,
    pub final_time: f64,
    pub n: usize,
    pub init_u: fn(f64) -> f64,
    pub init_q: fn(f64) -> f64,
    pub init_p: fn(f64) -> f64,
}

impl Default for SpectralConfig {
    /// `omega = 1000`, `L = 2`, `T = 10`, `N = 20`, `u = q = cos(2 pi x / L)`, `p = 0`.
    fn default() -> Self {
        Self {
            omega: 1000.0,
            length: 2.0,
            final_time: 10.0,
            n: 20,
            init_u: cos_2pi_x_over_2,
            init_q: cos_2pi_x_over_2,
            init_p: zero,
        }
    }
}

impl SpectralConfig {
    /// Stiff coefficient `omega^2`.
    pub fn stiffness(&self) -> f64 {
        self.omega * self.omega
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 4 || !self.n.is_multiple_of(2) {
            return Err(Error::InvalidParameter("N must be even and at least 4"));
        }
        if !(self.omega.is_finite() && self.omega >= 0.0) {
            return Err(Error::InvalidParameter("omega must be finite and nonnegative"));
        }
        if !(self.length > 0.0 && self.final_time > 0.0) {
            return Err(Error::InvalidParameter("L and T must be positive"));
        }
        Ok(())
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.length * j as f64 / self.n as f64).collect()
    }

    pub fn initial_state(&self) -> SpectralState {
        let x = self.nodes();
        SpectralState {
            u: x.iter().map(|&x| (self.init_u)(x)).collect(),
            q: x.iter().map(|&x| (self.init_q)(x)).collect(),
            p: x.iter().map(|&x| (self.init_p)(x)).collect(),
        }
    }
}

/// The three fields at the collocation points.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralState {
    pub u: Vec<f64>,
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

impl SpectralState {
    pub fn zeros(n: usize) -> Self {
        Self { u: vec![0.0; n], q: vec![0.0; n], p: vec![0.0; n] }
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    /// Concatenated `[u, q, p]`.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(3 * self.n());
        v.extend_from_slice(&self.u);
        v.extend_from_slice(&self.q);
        v.extend_from_slice(&self.p);
        v
    }

    pub fn from_flat(flat: &[f64]) -> Self {
        let n = flat.len() / 3;
        Self { u: flat[..n].to_vec(), q: flat[n..2 * n].to_vec(), p: flat[2 * n..].to_vec() }
    }

    /// Fourier coefficients `a_n` of each field, slot order as in [`Dft`].
    pub fn coefficients(&self) -> [Vec<Complex64>; 3] {
        let dft = Dft::new(self.n());
        [dft.forward(&self.u), dft.forward(&self.q), dft.forward(&self.p)]
    }
}

/// Right-hand side of the collocated system with stiffness `alpha`.
///
/// Operates on the flat `[u, q, p]` layout. No dealiasing of `q^2`.
#[derive(Debug, Clone)]
pub struct ThreeFieldRhs {
    dft: Dft,
    length: f64,
}

impl ThreeFieldRhs {
    pub fn new(n: usize, length: f64) -> Self {
        Self { dft: Dft::new(n), length }
    }

    pub fn n(&self) -> usize {
        self.dft.len()
    }

    pub fn eval_into(&self, state: &[f64], alpha: f64, out: &mut [f64]) {
        let n = self.n();
        let (u, rest) = state.split_at(n);
        let (q, p) = rest.split_at(n);
        let (du, rest) = out.split_at_mut(n);
        let (dq, dp) = rest.split_at_mut(n);
        derivative_into(&self.dft, u, self.length, du);
        derivative_into(&self.dft, q, self.length, dq);
        derivative_into(&self.dft, p, self.length, dp);
        for j in 0..n {
            du[j] = -du[j] + q[j] * q[j];
            dq[j] = -dq[j] + p[j];
            dp[j] = -dp[j] - alpha * q[j];
        }
    }
}

/// Time derivative of `state` with stiffness `alpha`.
pub fn rhs(state: &SpectralState, length: f64, alpha: f64) -> SpectralState {
    let f = ThreeFieldRhs::new(state.n(), length);
    let mut out = vec![0.0; 3 * state.n()];
    f.eval_into(&state.to_flat(), alpha, &mut out);
    SpectralState::from_flat(&out)
}

/// Classical four-stage Runge-Kutta step of `y' = f(t, y)`.
pub fn rk4_step<F>(f: F, y: &[f64], t: f64, tau: f64) -> Vec<f64>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let mut out = vec![0.0; y.len()];
    let mut scratch = Rk4Scratch::new(y.len());
    rk4_step_into(&f, y, t, tau, &mut scratch, &mut out);
    out
}

struct Rk4Scratch {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4Scratch {
    fn new(n: usize) -> Self {
        Self { k1: vec![0.0; n], k2: vec![0.0; n], k3: vec![0.0; n], k4: vec![0.0; n], tmp: vec![0.0; n] }
    }
}

fn rk4_step_into<F>(f: &F, y: &[f64], t: f64, tau: f64, s: &mut Rk4Scratch, out: &mut [f64])
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let half = 0.5 * tau;
    f(t, y, &mut s.k1);
    axpy(&mut s.tmp, y, half, &s.k1);
    f(t + half, &s.tmp, &mut s.k2);
    axpy(&mut s.tmp, y, half, &s.k2);
    f(t + half, &s.tmp, &mut s.k3);
    axpy(&mut s.tmp, y, tau, &s.k3);
    f(t + tau, &s.tmp, &mut s.k4);
    let sixth = tau / 6.0;
    for (i, o) in out.iter_mut().enumerate() {
        *o = y[i] + sixth * (s.k1[i] + 2.0 * s.k2[i] + 2.0 * s.k3[i] + s.k4[i]);
    }
}

/// `out = y + a k`.
fn axpy(out: &mut [f64], y: &[f64], a: f64, k: &[f64]) {
    for ((o, y), k) in out.iter_mut().zip(y).zip(k) {
        *o = y + a * k;
    }
}

/// RK4 on the collocated system as a switched flow.
#[derive(Debug, Clone)]
pub struct SpectralFlow {
    rhs: ThreeFieldRhs,
}

impl SpectralFlow {
    pub fn new(n: usize, length: f64) -> Self {
        Self { rhs: ThreeFieldRhs::new(n, length) }
    }
}

impl SwitchedFlow for SpectralFlow {
    fn dim(&self) -> usize {
        3 * self.rhs.n()
    }

    fn step(&self, state: &[f64], t: f64, tau: f64, alpha: f64, out: &mut [f64]) {
        let mut scratch = Rk4Scratch::new(state.len());
        let f = |_t: f64, y: &[f64], dy: &mut [f64]| self.rhs.eval_into(y, alpha, dy);
        rk4_step_into(&f, state, t, tau, &mut scratch, out);
    }
}

/// One FLAVOR macro step: RK4 with `alpha = omega^2` over `h`, then RK4 with
/// `alpha = 0` over `H - h`.
pub fn flavor_spectral_step(
    state: &SpectralState,
    t: f64,
    micro_step: f64,
    macro_step: f64,
    cfg: &SpectralConfig,
) -> Result<SpectralState> {
    let flow = SpectralFlow::new(state.n(), cfg.length);
    let (end, _) = ode_flavor::flavor_macro_step(&flow, &state.to_flat(), t, micro_step, macro_step, cfg.stiffness())?;
    Ok(SpectralState::from_flat(&end))
}

/// Physical values of the three fields over time.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralRun {
    pub u: SpaceTimeField,
    pub q: SpaceTimeField,
    pub p: SpaceTimeField,
}

impl SpectralRun {
    fn new(length: f64, n: usize) -> Self {
        Self { u: SpaceTimeField::new(length, n), q: SpaceTimeField::new(length, n), p: SpaceTimeField::new(length, n) }
    }

    fn push(&mut self, t: f64, is_macro: bool, flat: &[f64]) -> Result<()> {
        let n = self.u.rows();
        self.u.push_column(t, is_macro, &flat[..n])?;
        self.q.push_column(t, is_macro, &flat[n..2 * n])?;
        self.p.push_column(t, is_macro, &flat[2 * n..])
    }

    fn mark_unstable(&mut self, time: f64) {
        for f in [&mut self.u, &mut self.q, &mut self.p] {
            f.status = RunStatus::Unstable { time };
        }
    }

    pub fn status(&self) -> RunStatus {
        self.u.status
    }

    pub fn fields(&self) -> [(&'static str, &SpaceTimeField); 3] {
        [("u", &self.u), ("q", &self.q), ("p", &self.p)]
    }
}

/// Runs the collocated system.
///
/// Single-scale mode stores every `time_stride`-th step (the last is always
/// kept); its `space_step` must equal `L / N`. Flavor mode stores every mesh
/// node and ignores `time_stride`; its `space_step` is likewise `L / N`.
pub fn run_spectral(cfg: &SpectralConfig, mode: Mode, time_stride: usize) -> Result<SpectralRun> {
    run_spectral_from(cfg, mode, &cfg.initial_state(), time_stride)
}

/// As [`run_spectral`], starting from explicit nodal values instead of the
/// config's initial functions.
pub fn run_spectral_from(
    cfg: &SpectralConfig,
    mode: Mode,
    initial: &SpectralState,
    time_stride: usize,
) -> Result<SpectralRun> {
    cfg.validate()?;
    if initial.n() != cfg.n || initial.q.len() != cfg.n || initial.p.len() != cfg.n {
        return Err(Error::DimensionMismatch { expected: cfg.n, found: initial.n() });
    }
    if time_stride == 0 {
        return Err(Error::InvalidParameter("time stride must be positive"));
    }
    let check_space = |k: f64| match integral_ratio(cfg.length, k) {
        Some(n) if n == cfg.n => Ok(()),
        _ => Err(Error::InvalidParameter("space step must equal L / N for collocation")),
    };
    let flow = SpectralFlow::new(cfg.n, cfg.length);
    let y0 = initial.to_flat();
    let guard = BlowupGuard::default();
    let mut run = SpectralRun::new(cfg.length, cfg.n);
    match mode {
        Mode::SingleScale { space_step, time_step } => {
            check_space(space_step)?;
            let mesh = UniformMesh::new(cfg.length, cfg.final_time, space_step, time_step)?;
            let mut y = y0;
            let mut next = vec![0.0; y.len()];
            run.push(0.0, true, &y)?;
            for j in 1..=mesh.n_steps {
                flow.step(&y, mesh.time(j - 1), time_step, cfg.stiffness(), &mut next);
                core::mem::swap(&mut y, &mut next);
                let t = mesh.time(j);
                if guard.is_blown_up(&y) {
                    run.mark_unstable(t);
                    break;
                }
                if j % time_stride == 0 || j == mesh.n_steps {
                    run.push(t, true, &y)?;
                }
            }
        }
        Mode::Flavor { space_step, micro_step, macro_step } => {
            check_space(space_step)?;
            let mesh = build_mesh(cfg.length, cfg.final_time, space_step, micro_step, macro_step)?;
            let traj = ode_flavor::integrate_with(&flow, &y0, &mesh, cfg.stiffness(), guard)?;
            for (j, (t, s)) in traj.times.iter().zip(&traj.states).enumerate() {
                run.push(*t, j % 2 == 0, s)?;
            }
            if let Some(time) = traj.failure {
                run.mark_unstable(time);
            }
        }
    }
    Ok(run)
}

/// Per-window maximum of `|q|` at each spatial node.
///
/// Windows are `[w W, (w + 1) W)` over the stored columns; the result is one
/// vector of length `rows` per window that contains at least one column.
pub fn amplitude_envelope(field: &SpaceTimeField, window: f64, macro_only: bool) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut current: Option<(i64, Vec<f64>)> = None;
    for j in 0..field.n_columns() {
        if macro_only && !field.is_macro(j) {
            continue;
        }
        // nodes sitting on a boundary belong to the later window
        let w = libm::floor(field.times()[j] / window + 1e-9) as i64;
        let col = field.column(j);
        match &mut current {
            Some((cw, acc)) if *cw == w => {
                for (a, v) in acc.iter_mut().zip(col) {
                    *a = a.max(libm::fabs(*v));
                }
            }
            _ => {
                if let Some((_, acc)) = current.take() {
                    out.push(acc);
                }
                current = Some((w, col.iter().map(|v| libm::fabs(*v)).collect()));
            }
        }
    }
    if let Some((_, acc)) = current {
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trig_poly(x: f64, l: f64, coeffs: &[(f64, f64)]) -> (f64, f64) {
        // sum_m a_m cos(2 pi m x / L) + b_m sin(2 pi m x / L), m starting at 0
        let mut v = 0.0;
        let mut dv = 0.0;
        for (m, &(a, b)) in coeffs.iter().enumerate() {
            let w = 2.0 * PI * m as f64 / l;
            v += a * (w * x).cos() + b * (w * x).sin();
            dv += -a * w * (w * x).sin() + b * w * (w * x).cos();
        }
        (v, dv)
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        let d = spectral_derivative(&[3.5; 12], 2.0);
        assert!(d.iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn derivative_of_sine_is_exact() {
        let (n, l) = (20, 2.0);
        let x: Vec<f64> = (0..n).map(|j| l * j as f64 / n as f64).collect();
        let v: Vec<f64> = x.iter().map(|x| (2.0 * PI * x / l).sin()).collect();
        let d = spectral_derivative(&v, l);
        for (xi, di) in x.iter().zip(&d) {
            assert!((di - 2.0 * PI / l * (2.0 * PI * xi / l).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn nyquist_mode_is_dropped() {
        let v: Vec<f64> = (0..8).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert!(spectral_derivative(&v, 1.0).iter().all(|d| d.abs() < 1e-12));
    }

    #[test]
    fn constant_rhs_example() {
        let n = 8;
        let c = 0.7;
        let omega2 = 1e6;
        let s = SpectralState { u: vec![0.0; n], q: vec![c; n], p: vec![0.0; n] };
        let d = rhs(&s, 2.0, omega2);
        for j in 0..n {
            assert!((d.u[j] - c * c).abs() < 1e-12);
            assert!(d.q[j].abs() < 1e-12);
            assert!((d.p[j] + omega2 * c).abs() < 1e-6);
        }
        let z = rhs(&SpectralState::zeros(n), 2.0, omega2);
        assert!(z.to_flat().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn paper_initial_rhs_by_hand() {
        let cfg = SpectralConfig::default();
        let s = cfg.initial_state();
        let d = rhs(&s, cfg.length, 0.0);
        for (j, x) in cfg.nodes().into_iter().enumerate() {
            // u = q = cos(pi x), p = 0
            let c = (PI * x).cos();
            let dx = -PI * (PI * x).sin();
            assert!((d.u[j] - (-dx + c * c)).abs() < 1e-12);
            assert!((d.q[j] - (-dx)).abs() < 1e-12);
            assert!(d.p[j].abs() < 1e-12);
        }
    }

    #[test]
    fn rk4_zero_rhs_is_identity() {
        let y = [1.0, -2.0];
        assert_eq!(rk4_step(|_t, _y, dy| dy.fill(0.0), &y, 0.0, 0.3), y);
    }

    #[test]
    fn rk4_linear_reproduces_taylor_polynomial() {
        for (lambda, tau) in [(-2.0, 0.1), (0.5, 0.3), (-50.0, 0.01)] {
            let y = rk4_step(|_t, y: &[f64], dy: &mut [f64]| dy[0] = lambda * y[0], &[1.5], 0.0, tau);
            let z: f64 = lambda * tau;
            let want = 1.5 * (1.0 + z + z * z / 2.0 + z.powi(3) / 6.0 + z.powi(4) / 24.0);
            assert!((y[0] - want).abs() < 1e-14 * want.abs().max(1.0));
        }
    }

    #[test]
    fn flavor_with_zero_omega_is_two_plain_rk4_steps() {
        let cfg = SpectralConfig { omega: 0.0, n: 8, ..Default::default() };
        let s = cfg.initial_state();
        let got = flavor_spectral_step(&s, 0.0, 0.003, 0.01, &cfg).unwrap();
        let f = ThreeFieldRhs::new(8, cfg.length);
        let g = |_t: f64, y: &[f64], dy: &mut [f64]| f.eval_into(y, 0.0, dy);
        let a = rk4_step(g, &s.to_flat(), 0.0, 0.003);
        let b = rk4_step(g, &a, 0.003, 0.007);
        assert_eq!(got.to_flat(), b);
    }

    #[test]
    fn zero_initial_data_stays_zero() {
        let cfg = SpectralConfig { init_u: zero, init_q: zero, init_p: zero, final_time: 0.1, ..Default::default() };
        let run = run_spectral(&cfg, Mode::Flavor { space_step: 0.1, micro_step: 1e-6, macro_step: 0.01 }, 1).unwrap();
        for (_, f) in run.fields() {
            assert!(f.columns().all(|c| c.iter().all(|v| *v == 0.0)));
        }
    }

    #[test]
    fn config_validation() {
        let bad = SpectralConfig { n: 7, ..Default::default() };
        assert!(bad.validate().is_err());
        let cfg = SpectralConfig { final_time: 0.01, ..Default::default() };
        assert!(run_spectral(&cfg, Mode::SingleScale { space_step: 0.2, time_step: 1e-4 }, 1).is_err());
    }

    #[test]
    fn envelope_windows() {
        let mut f = SpaceTimeField::new(1.0, 2);
        for (t, c) in [(0.0, [1.0, -3.0]), (0.4, [-2.0, 0.5]), (1.0, [0.1, 0.2]), (1.5, [-0.3, 0.0])] {
            f.push_column(t, true, &c).unwrap();
        }
        let env = amplitude_envelope(&f, 1.0, true);
        assert_eq!(env, vec![vec![2.0, 3.0], vec![0.3, 0.2]]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            #[test]
            fn band_limited_derivative(coeffs in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..10), l in 0.5f64..5.0) {
                // degree < N/2 with N = 20
                let n = 20;
                let x: Vec<f64> = (0..n).map(|j| l * j as f64 / n as f64).collect();
                let (v, dv): (Vec<f64>, Vec<f64>) = x.iter().map(|&x| trig_poly(x, l, &coeffs)).unzip();
                let d = spectral_derivative(&v, l);
                for (a, b) in d.iter().zip(&dv) {
                    prop_assert!((a - b).abs() < 1e-10);
                }
            }

            #[test]
            fn shift_invariance(v in proptest::collection::vec(-1.0f64..1.0, 16), c in -10.0f64..10.0) {
                let shifted: Vec<f64> = v.iter().map(|x| x + c).collect();
                let a = spectral_derivative(&v, 2.0);
                let b = spectral_derivative(&shifted, 2.0);
                for (x, y) in a.iter().zip(&b) {
                    prop_assert!((x - y).abs() < 1e-12);
                }
            }

            #[test]
            fn coefficients_are_conjugate_symmetric(v in proptest::collection::vec(-1.0f64..1.0, 20)) {
                let s = SpectralState { u: v.clone(), q: v.clone(), p: v };
                let [a, _, _] = s.coefficients();
                for k in 1..20 {
                    prop_assert!((a[k] - a[20 - k].conj()).l1_norm() < 1e-12);
                }
            }
        }
    }
}
