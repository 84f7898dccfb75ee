//! Run configuration, JSON round-tripping and the published parameter sets.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    /// Lax-Friedrichs on the conservation law with Ginzburg-Landau source.
    GlFd,
    /// Multisymplectic integrator on stiff Sine-Gordon.
    SineGordonMsi,
    /// Fourier collocation on the three-field system.
    SpectralThreeField,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum RunMode {
    SingleScale,
    Flavor,
    Sweep,
    Control,
}

/// Fully resolved parameters of one invocation.
///
/// `stiffness` is `eps` for [`Experiment::GlFd`] and `omega` otherwise.
/// Steps without a meaning for the experiment are ignored (the spectral
/// space step is always `L / N`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub mode: RunMode,
    pub stiffness: f64,
    pub length: f64,
    pub final_time: f64,
    /// FLAVOR space step `K`.
    pub space_step: f64,
    /// FLAVOR micro step `h`.
    pub micro_step: f64,
    /// FLAVOR macro step `H`.
    pub macro_step: f64,
    /// Benchmark space step `k`.
    pub bench_space_step: f64,
    /// Benchmark time step.
    pub bench_time_step: f64,
    /// Collocation points (spectral only).
    pub modes: usize,
    /// `H` values of an error sweep.
    #[serde(default)]
    pub sweep_macro_steps: Vec<f64>,
    /// `h` values of an error sweep.
    #[serde(default)]
    pub sweep_micro_steps: Vec<f64>,
    /// Fourier cutoff applied before differencing, if any.
    #[serde(default)]
    pub low_pass: Option<usize>,
    pub out_dir: PathBuf,
    #[serde(default)]
    pub threads: Option<usize>,
}

impl RunConfig {
    /// Conservation law, `eps = 2e-3`, `L = T = 2`; FLAVOR `K = 0.01`,
    /// `h = 0.1 eps`, `H = 0.005`; benchmark `k = 0.2 eps`, `h = 0.1 eps`.
    pub fn paper_gl() -> Self {
        let eps = 2e-3;
        let unit = 0.1 * eps;
        Self {
            experiment: Experiment::GlFd,
            mode: RunMode::Flavor,
            stiffness: eps,
            length: 2.0,
            final_time: 2.0,
            space_step: 0.01,
            micro_step: unit,
            macro_step: 0.005,
            bench_space_step: 0.2 * eps,
            bench_time_step: unit,
            modes: 0,
            sweep_macro_steps: [2.0, 10.0, 25.0, 50.0].iter().map(|m| m * unit).collect(),
            sweep_micro_steps: [0.05, 0.1, 0.5, 1.5, 3.0].iter().map(|m| m * eps).collect(),
            low_pass: None,
            out_dir: PathBuf::from("out"),
            threads: None,
        }
    }

    /// Stiff Sine-Gordon, `omega = 20`, `L = 2`; benchmark `k = L/20/omega`,
    /// `h = k/2`; FLAVOR `K = L/40`, `H = K/2`, micro step equal to the
    /// benchmark step.
    pub fn paper_sg() -> Self {
        let (omega, length) = (20.0, 2.0);
        let k = length / 20.0 / omega;
        let big_k = length / 40.0;
        Self {
            experiment: Experiment::SineGordonMsi,
            mode: RunMode::Flavor,
            stiffness: omega,
            length,
            final_time: 2.0,
            space_step: big_k,
            micro_step: k / 2.0,
            macro_step: big_k / 2.0,
            bench_space_step: k,
            bench_time_step: k / 2.0,
            modes: 0,
            sweep_macro_steps: Vec::new(),
            sweep_micro_steps: Vec::new(),
            low_pass: Some(4),
            out_dir: PathBuf::from("out"),
            threads: None,
        }
    }

    /// Three-field system, `omega = 1000`, `L = 2`, `T = 10`, `N = 20`;
    /// benchmark step `0.1/omega`; FLAVOR `h = 1/omega^2`, `H = 0.01`.
    pub fn paper_spectral() -> Self {
        let omega: f64 = 1000.0;
        let (length, n) = (2.0, 20);
        Self {
            experiment: Experiment::SpectralThreeField,
            mode: RunMode::Flavor,
            stiffness: omega,
            length,
            final_time: 10.0,
            space_step: length / n as f64,
            micro_step: 1.0 / (omega * omega),
            macro_step: 0.01,
            bench_space_step: length / n as f64,
            bench_time_step: 0.1 / omega,
            modes: n,
            sweep_macro_steps: Vec::new(),
            sweep_micro_steps: Vec::new(),
            low_pass: None,
            out_dir: PathBuf::from("out"),
            threads: None,
        }
    }

    pub fn preset(experiment: Experiment) -> Self {
        match experiment {
            Experiment::GlFd => Self::paper_gl(),
            Experiment::SineGordonMsi => Self::paper_sg(),
            Experiment::SpectralThreeField => Self::paper_spectral(),
        }
    }

    pub fn from_json_file(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks the cross-field preconditions that the integrators do not.
    pub fn validate(&self) -> anyhow::Result<()> {
        let positive = [
            ("stiffness", self.stiffness),
            ("length", self.length),
            ("final_time", self.final_time),
            ("space_step", self.space_step),
            ("micro_step", self.micro_step),
            ("macro_step", self.macro_step),
            ("bench_space_step", self.bench_space_step),
            ("bench_time_step", self.bench_time_step),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                bail!("invalid parameter: {name} must be positive and finite, got {v}");
            }
        }
        if self.experiment == Experiment::SpectralThreeField && (self.modes < 4 || !self.modes.is_multiple_of(2)) {
            bail!("invalid parameter: modes must be even and at least 4, got {}", self.modes);
        }
        if self.mode == RunMode::Sweep {
            if self.experiment != Experiment::GlFd {
                bail!("sweep mode is only defined for the gl_fd experiment");
            }
            if self.sweep_macro_steps.is_empty() || self.sweep_micro_steps.is_empty() {
                bail!("sweep mode needs nonempty sweep_macro_steps and sweep_micro_steps");
            }
        }
        if self.mode == RunMode::Control && self.experiment != Experiment::SineGordonMsi {
            bail!("control mode is only defined for the sine_gordon_msi experiment");
        }
        if self.threads == Some(0) {
            bail!("invalid parameter: threads must be at least 1");
        }
        Ok(())
    }

    /// Thread count: explicit value, then `FLAVOR_THREADS`, then all cores.
    pub fn resolved_threads(&self) -> usize {
        self.threads
            .or_else(|| std::env::var("FLAVOR_THREADS").ok().and_then(|v| v.trim().parse().ok()))
            .filter(|&n| n > 0)
            .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_round_trip() {
        for cfg in [RunConfig::paper_gl(), RunConfig::paper_sg(), RunConfig::paper_spectral()] {
            cfg.validate().unwrap();
            let back: RunConfig = serde_json::from_str(&cfg.to_json()).unwrap();
            assert_eq!(back, cfg);
        }
    }

    #[test]
    fn gl_preset_values() {
        let c = RunConfig::paper_gl();
        assert_eq!((c.stiffness, c.space_step, c.macro_step), (2e-3, 0.01, 0.005));
        assert!((c.micro_step - 0.0002).abs() < 1e-18);
        assert!((c.bench_space_step - 0.0004).abs() < 1e-18);
    }

    #[test]
    fn sg_preset_values() {
        let c = RunConfig::paper_sg();
        assert!((c.bench_space_step - 0.005).abs() < 1e-15);
        assert!((c.bench_time_step - 0.0025).abs() < 1e-15);
        assert!((c.space_step - 0.05).abs() < 1e-15);
        assert!((c.macro_step - 0.025).abs() < 1e-15);
    }

    #[test]
    fn unknown_fields_rejected() {
        let mut v: serde_json::Value = serde_json::from_str(&RunConfig::paper_gl().to_json()).unwrap();
        v["bogus"] = 1.into();
        assert!(serde_json::from_value::<RunConfig>(v).is_err());
    }

    #[test]
    fn validation_catches_bad_mode() {
        let mut c = RunConfig::paper_sg();
        c.mode = RunMode::Sweep;
        assert!(c.validate().is_err());
        let mut c = RunConfig::paper_gl();
        c.micro_step = -1.0;
        assert!(c.validate().is_err());
    }
}
