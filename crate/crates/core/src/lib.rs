//! Flow-averaging integrators (FLAVORS) for stiff PDEs.
//!
//! A legacy single-step scheme is made multiscale by alternating a
//! microscopic step `h` with the stiff coefficient switched on and a
//! mesoscopic step `H - h` with it switched off. This crate carries the
//! schemes and the comparison machinery; it needs `alloc` but not `std`.
//!
//! * [`mesh`]: the two-scale space-time mesh and step-tuning diagnostics.
//! * [`ode_flavor`]: the generic switched-flow composition.
//! * [`fd_conslaw`]: Lax-Friedrichs for a conservation law with a
//!   Ginzburg-Landau source.
//! * [`msi_wave`]: a variational multisymplectic integrator for nonlinear
//!   waves (stiff Sine-Gordon).
//! * [`spectral`]: Fourier collocation with an RK4 legacy flow.
//! * [`bench`]: error norms, mesh-intersection comparison and sweeps.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bench;
pub mod error;
pub mod fd_conslaw;
pub mod field;
pub mod mesh;
pub mod msi_wave;
pub mod ode_flavor;
pub mod spectral;

pub use error::{Error, Result};
pub use field::{RunStatus, SpaceTimeField};
pub use mesh::{build_mesh, step_diagnostics, SpaceTimeMesh, StepDiagnostics, UniformMesh};

/// Scheme selector shared by the three experiment families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    /// Uniform steps, stiffness always on.
    SingleScale { space_step: f64, time_step: f64 },
    /// Two-scale mesh: coarse space step, micro step `h`, macro step `H`.
    Flavor { space_step: f64, micro_step: f64, macro_step: f64 },
}

/// Values within this many ulps-ish of an integer count as integral.
pub(crate) const DIVISIBILITY_TOL: f64 = 1e-9;

/// Returns `round(a / b)` if `a / b` is integral within [`DIVISIBILITY_TOL`].
pub(crate) fn integral_ratio(a: f64, b: f64) -> Option<usize> {
    let r = a / b;
    let n = libm::round(r);
    if n >= 1.0 && libm::fabs(r - n) <= DIVISIBILITY_TOL * n {
        Some(n as usize)
    } else {
        None
    }
}
