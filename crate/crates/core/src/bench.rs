//! Error norms, mesh-intersection comparison, `(H, h)` error sweeps and
//! speedup bookkeeping.

use alloc::vec::Vec;

use crate::fd_conslaw::{self, ConsLawConfig};
use crate::field::SpaceTimeField;
use crate::msi_wave::{self, Potential, WaveConfig};
use crate::spectral::low_pass;
use crate::{Error, Mode, Result};

/// `(1/N) sum |v_i|`.
pub fn normalized_l1(v: &[f64]) -> Result<f64> {
    if v.is_empty() {
        return Err(Error::EmptyVector);
    }
    Ok(v.iter().map(|x| libm::fabs(*x)).sum::<f64>() / v.len() as f64)
}

/// Acceleration of a FLAVOR run over a single-scale run, `HK / (2hk)`.
pub fn speedup(macro_step: f64, coarse_space: f64, micro_step: f64, fine_space: f64) -> f64 {
    macro_step * coarse_space / (2.0 * micro_step * fine_space)
}

/// Time-only acceleration `H / (2h)`, for schemes without a spatial mesh gain.
pub fn speedup_time(macro_step: f64, bench_step: f64) -> f64 {
    macro_step / (2.0 * bench_step)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonReport {
    /// Normalized L1 distance over the common nodes.
    pub error: f64,
    pub node_count: usize,
    pub speedup: Option<f64>,
}

impl ComparisonReport {
    pub fn with_speedup(mut self, speedup: f64) -> Self {
        self.speedup = Some(speedup);
        self
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompareOptions {
    /// Low-pass each common-node column to Fourier modes `|n| <= cutoff`
    /// before differencing.
    pub low_pass: Option<usize>,
}

/// Compares a FLAVOR field against a benchmark on their common nodes.
pub fn compare_on_intersection(flavor: &SpaceTimeField, benchmark: &SpaceTimeField) -> Result<ComparisonReport> {
    compare_with(flavor, benchmark, CompareOptions::default())
}

/// As [`compare_on_intersection`], with options.
///
/// The common nodes are the FLAVOR macro time nodes crossed with the FLAVOR
/// spatial nodes; both must be present in the benchmark.
pub fn compare_with(
    flavor: &SpaceTimeField,
    benchmark: &SpaceTimeField,
    opts: CompareOptions,
) -> Result<ComparisonReport> {
    for f in [flavor, benchmark] {
        if let crate::RunStatus::Unstable { time } = f.status {
            return Err(Error::IncompleteField { failure_time: time });
        }
    }
    let l = flavor.length();
    if libm::fabs(l - benchmark.length()) > 1e-12 * l {
        return Err(Error::MeshMismatch("domain lengths differ"));
    }
    if flavor.rows() == 0 || !benchmark.rows().is_multiple_of(flavor.rows()) {
        return Err(Error::MeshMismatch("flavor spatial nodes are not a subset of the benchmark nodes"));
    }
    let stride = benchmark.rows() / flavor.rows();
    let t_end = flavor.times().last().copied().unwrap_or(0.0);
    let tol = 1e-9 * t_end.max(1e-300);

    let mut sum = 0.0;
    let mut count = 0usize;
    let mut restricted = Vec::with_capacity(flavor.rows());
    for j in (0..flavor.n_columns()).filter(|&j| flavor.is_macro(j)) {
        let t = flavor.times()[j];
        let jb = benchmark
            .find_time(t, tol)
            .ok_or(Error::MeshMismatch("flavor macro time node missing from the benchmark"))?;
        restricted.clear();
        restricted.extend(benchmark.column(jb).iter().step_by(stride).copied());
        let (a, b) = match opts.low_pass {
            Some(cut) => (low_pass(flavor.column(j), cut), low_pass(&restricted, cut)),
            None => (flavor.column(j).to_vec(), restricted.clone()),
        };
        for (x, y) in a.iter().zip(&b) {
            sum += libm::fabs(x - y);
        }
        count += a.len();
    }
    if count == 0 {
        return Err(Error::MeshMismatch("no common nodes"));
    }
    Ok(ComparisonReport { error: sum / count as f64, node_count: count, speedup: None })
}

/// Mask threshold: errors above this indicate an unstable integration.
pub const UNSTABLE_ERROR: f64 = 1.0;

/// One cell of an error surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Stable(f64),
    /// The run blew up or its error exceeded [`UNSTABLE_ERROR`].
    Unstable,
    /// No valid run: `h >= H`, a non-divisible mesh or a non-nested grid.
    Invalid,
}

impl Cell {
    pub fn error(&self) -> Option<f64> {
        match self {
            Cell::Stable(e) => Some(*e),
            _ => None,
        }
    }

    pub fn is_stable(&self) -> bool {
        matches!(self, Cell::Stable(_))
    }
}

/// Errors indexed by `(H, h)`, row-major in `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSurface {
    pub macro_steps: Vec<f64>,
    pub micro_steps: Vec<f64>,
    cells: Vec<Cell>,
}

impl ErrorSurface {
    pub fn from_cells(macro_steps: Vec<f64>, micro_steps: Vec<f64>, cells: Vec<Cell>) -> Result<Self> {
        if cells.len() != macro_steps.len() * micro_steps.len() {
            return Err(Error::DimensionMismatch {
                expected: macro_steps.len() * micro_steps.len(),
                found: cells.len(),
            });
        }
        Ok(Self { macro_steps, micro_steps, cells })
    }

    pub fn cell(&self, i_macro: usize, i_micro: usize) -> Cell {
        self.cells[i_macro * self.micro_steps.len() + i_micro]
    }

    pub fn error(&self, i_macro: usize, i_micro: usize) -> Option<f64> {
        self.cell(i_macro, i_micro).error()
    }

    pub fn stable(&self, i_macro: usize, i_micro: usize) -> bool {
        self.cell(i_macro, i_micro).is_stable()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// Smallest stable error and its `(H index, h index)`.
    pub fn argmin(&self) -> Option<(f64, usize, usize)> {
        let w = self.micro_steps.len();
        self.cells.iter().enumerate().filter_map(|(idx, c)| c.error().map(|e| (e, idx / w, idx % w))).fold(
            None,
            |best, cur| match best {
                Some(b) if b.0 <= cur.0 => Some(b),
                _ => Some(cur),
            },
        )
    }
}

/// Shared inputs of a Lax-Friedrichs error sweep.
#[derive(Debug, Clone, Copy)]
pub struct SweepSetup {
    pub cfg: ConsLawConfig,
    /// Mesoscopic space step `K` used by every FLAVOR run.
    pub space_step: f64,
}

/// Runs one FLAVOR integration and scores it against the benchmark.
pub fn sweep_cell(setup: &SweepSetup, macro_step: f64, micro_step: f64, benchmark: &SpaceTimeField) -> Cell {
    let mode = Mode::Flavor { space_step: setup.space_step, micro_step, macro_step };
    let field = match fd_conslaw::run_fd(&setup.cfg, mode) {
        Ok(f) => f,
        Err(_) => return Cell::Invalid,
    };
    if !field.status.is_stable() {
        return Cell::Unstable;
    }
    match compare_on_intersection(&field, benchmark) {
        Ok(r) if r.error.is_finite() && r.error <= UNSTABLE_ERROR => Cell::Stable(r.error),
        Ok(_) => Cell::Unstable,
        Err(_) => Cell::Invalid,
    }
}

/// Sequential `(H, h)` sweep; see the `flavors` crate for a parallel one.
pub fn error_sweep(
    setup: &SweepSetup,
    macro_steps: &[f64],
    micro_steps: &[f64],
    benchmark: &SpaceTimeField,
) -> ErrorSurface {
    let cells = macro_steps
        .iter()
        .flat_map(|&big| micro_steps.iter().map(move |&h| (big, h)))
        .map(|(big, h)| sweep_cell(setup, big, h, benchmark))
        .collect();
    ErrorSurface { macro_steps: macro_steps.to_vec(), micro_steps: micro_steps.to_vec(), cells }
}

/// Distance between a FLAVOR wave field and a single-scale run whose stiff
/// frequency is replaced by `omega_tilde`.
///
/// `cfg` describes the FLAVOR problem; its stiff potential must be
/// [`Potential::StiffCosine`]. The control run uses the benchmark mesh
/// `(space_step, time_step)`.
pub fn splitting_control(
    cfg: &WaveConfig,
    flavor: &SpaceTimeField,
    space_step: f64,
    time_step: f64,
    omega_tilde: f64,
    opts: CompareOptions,
) -> Result<(ComparisonReport, SpaceTimeField)> {
    if !matches!(cfg.stiff, Potential::StiffCosine { .. }) {
        return Err(Error::InvalidParameter("control run needs a stiff cosine potential"));
    }
    let control_cfg = WaveConfig { stiff: Potential::StiffCosine { omega: omega_tilde }, ..*cfg };
    let control = msi_wave::run_msi(&control_cfg, Mode::SingleScale { space_step, time_step })?;
    let report = compare_with(flavor, &control, opts)?;
    Ok((report, control))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(rows: usize, times: &[f64], value: impl Fn(usize, usize) -> f64) -> SpaceTimeField {
        let mut f = SpaceTimeField::new(2.0, rows);
        for (j, t) in times.iter().enumerate() {
            let c: Vec<f64> = (0..rows).map(|i| value(i, j)).collect();
            f.push_column(*t, true, &c).unwrap();
        }
        f
    }

    #[test]
    fn norm_examples() {
        assert_eq!(normalized_l1(&[1.0; 7]).unwrap(), 1.0);
        assert_eq!(normalized_l1(&[0.0; 3]).unwrap(), 0.0);
        assert_eq!(normalized_l1(&[1.0, -1.0, 2.0, 0.0]).unwrap(), 1.0);
        assert_eq!(normalized_l1(&[]), Err(Error::EmptyVector));
    }

    #[test]
    fn speedups() {
        assert!((speedup(0.005, 0.01, 0.0002, 0.0004) - 312.5).abs() < 1e-12);
        assert!((speedup(0.2, 0.3, 0.1, 0.3) - 1.0).abs() < 1e-15);
        let k = 2.0 / 400.0;
        let big_k = 2.0 / 40.0;
        assert!((speedup(big_k / 2.0, big_k, k / 2.0, k) - 50.0).abs() < 1e-12);
        assert!((speedup_time(0.01, 1e-4) - 50.0).abs() < 1e-12);
    }

    #[test]
    fn identical_and_shifted_fields() {
        let times = [0.0, 0.5, 1.0];
        let a = field(8, &times, |i, j| (i * j) as f64 * 0.1);
        let r = compare_on_intersection(&a, &a).unwrap();
        assert_eq!(r.error, 0.0);
        assert_eq!(r.node_count, 24);
        let b = field(8, &times, |i, j| (i * j) as f64 * 0.1 + 0.25);
        assert!((compare_on_intersection(&a, &b).unwrap().error - 0.25).abs() < 1e-15);
    }

    #[test]
    fn subset_alignment() {
        // flavor: 4 nodes at t = 0, 1 (macro) and 0.1 (micro); bench: 8 nodes every 0.5
        let mut flavor = SpaceTimeField::new(2.0, 4);
        flavor.push_column(0.0, true, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        flavor.push_column(0.1, false, &[9.0; 4]).unwrap();
        flavor.push_column(1.0, true, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let bench = field(8, &[0.0, 0.5, 1.0], |i, _| if i % 2 == 0 { (i / 2 + 1) as f64 } else { 100.0 });
        let r = compare_on_intersection(&flavor, &bench).unwrap();
        assert_eq!(r.error, 0.0);
        assert_eq!(r.node_count, 8);
    }

    #[test]
    fn mismatched_meshes() {
        let a = field(6, &[0.0, 1.0], |_, _| 0.0);
        let b = field(8, &[0.0, 1.0], |_, _| 0.0);
        assert!(matches!(compare_on_intersection(&a, &b), Err(Error::MeshMismatch(_))));
        let c = field(8, &[0.0, 0.7], |_, _| 0.0);
        let d = field(8, &[0.0, 1.0], |_, _| 0.0);
        assert!(matches!(compare_on_intersection(&d, &c), Err(Error::MeshMismatch(_))));
        let mut e = d.clone();
        e.status = crate::RunStatus::Unstable { time: 0.5 };
        assert!(matches!(compare_on_intersection(&e, &d), Err(Error::IncompleteField { .. })));
    }

    #[test]
    fn low_pass_comparison_ignores_high_modes() {
        let times = [0.0, 1.0];
        let a = field(16, &times, |i, _| (core::f64::consts::PI * i as f64 / 8.0).sin());
        let b = field(16, &times, |i, j| a.value(i, j) + 0.3 * (core::f64::consts::PI * 6.0 * i as f64 / 8.0).cos());
        let raw = compare_on_intersection(&a, &b).unwrap().error;
        let filtered = compare_with(&a, &b, CompareOptions { low_pass: Some(4) }).unwrap().error;
        assert!(raw > 0.1);
        assert!(filtered < 1e-13);
    }

    #[test]
    fn self_comparison_sweep_cell() {
        // a flavor run scored against itself is exact
        let cfg = ConsLawConfig { final_time: 0.02, ..Default::default() };
        let setup = SweepSetup { cfg, space_step: 0.01 };
        let flavor =
            fd_conslaw::run_fd(&cfg, Mode::Flavor { space_step: 0.01, micro_step: 0.0002, macro_step: 0.0004 })
                .unwrap();
        let surface = error_sweep(&setup, &[0.0004], &[0.0002], &flavor);
        assert_eq!(surface.error(0, 0), Some(0.0));
        // h >= H is invalid, not silently run
        let s2 = error_sweep(&setup, &[0.0004], &[0.0004], &flavor);
        assert_eq!(s2.cell(0, 0), Cell::Invalid);
    }

    #[test]
    fn surface_argmin() {
        let s = ErrorSurface::from_cells(
            alloc::vec![1.0, 2.0],
            alloc::vec![0.1, 0.2],
            alloc::vec![Cell::Stable(0.3), Cell::Unstable, Cell::Stable(0.1), Cell::Invalid],
        )
        .unwrap();
        assert_eq!(s.argmin(), Some((0.1, 1, 0)));
        assert!(!s.stable(0, 1));
        assert!(ErrorSurface::from_cells(alloc::vec![1.0], alloc::vec![1.0], alloc::vec![]).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn norm_axioms(
                a in proptest::collection::vec(-1e3f64..1e3, 1..50),
                shift in proptest::collection::vec(-1e3f64..1e3, 50),
                c in -100.0f64..100.0,
            ) {
                let b: Vec<f64> = a.iter().zip(&shift).map(|(_, s)| *s).collect();
                let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
                let scaled: Vec<f64> = a.iter().map(|x| c * x).collect();
                let (na, nb) = (normalized_l1(&a).unwrap(), normalized_l1(&b).unwrap());
                prop_assert!(normalized_l1(&sum).unwrap() <= na + nb + 1e-12 * (na + nb));
                prop_assert!((normalized_l1(&scaled).unwrap() - c.abs() * na).abs() <= 1e-12 * (1.0 + c.abs() * na));
                prop_assert!(na >= 0.0);
            }
        }
    }
}
