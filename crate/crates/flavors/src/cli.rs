//! Argument parsing and exit-code policy for the `flavors` binary.
//!
//! Exit codes: 0 on success, 1 on usage or validation errors, 2 when an
//! integration went unstable.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use flavors_core::mesh::DEFAULT_REGIME_THRESHOLD;
use flavors_core::step_diagnostics;

use crate::app::{self, Outcome};
use crate::config::{Experiment, RunConfig, RunMode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_UNSTABLE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "flavors", version, about = "Flow-averaging integrators for stiff PDEs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate one experiment (mode single_scale, flavor, sweep or control).
    Run(RunArgs),
    /// Error surface over (H, h) for the conservation law.
    Sweep(RunArgs),
    /// Run FLAVOR and the benchmark and compare them on the common mesh.
    Compare(RunArgs),
    /// Averaged-stiffness control for the Sine-Gordon experiment.
    Control(RunArgs),
    /// Report the step-tuning ratios h/eps, (h/eps)^2/H and eps H/h.
    Diagnose(DiagnoseArgs),
}

#[derive(Debug, Args)]
#[group(id = "preset", multiple = false)]
struct Presets {
    /// Conservation law with Ginzburg-Landau source, published parameters.
    #[arg(long)]
    paper_gl: bool,
    /// Stiff Sine-Gordon, published parameters.
    #[arg(long)]
    paper_sg: bool,
    /// Three-field spectral system, published parameters.
    #[arg(long)]
    paper_spectral: bool,
}

impl Presets {
    fn experiment(&self) -> Option<Experiment> {
        if self.paper_gl {
            Some(Experiment::GlFd)
        } else if self.paper_sg {
            Some(Experiment::SineGordonMsi)
        } else if self.paper_spectral {
            Some(Experiment::SpectralThreeField)
        } else {
            None
        }
    }
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    presets: Presets,
    /// JSON configuration; flags override its values.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: Option<RunMode>,
    /// Stiffness scale of the conservation law.
    #[arg(long)]
    eps: Option<f64>,
    /// Stiff frequency of the wave and spectral experiments.
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long = "L")]
    length: Option<f64>,
    #[arg(long = "T")]
    final_time: Option<f64>,
    /// FLAVOR space step.
    #[arg(long = "K")]
    space_step: Option<f64>,
    /// FLAVOR micro step.
    #[arg(long = "h")]
    micro_step: Option<f64>,
    /// FLAVOR macro step.
    #[arg(long = "H")]
    macro_step: Option<f64>,
    /// Benchmark space step.
    #[arg(long = "k")]
    bench_space_step: Option<f64>,
    /// Benchmark time step.
    #[arg(long = "bench-h")]
    bench_time_step: Option<f64>,
    /// Collocation points.
    #[arg(long = "N")]
    modes: Option<usize>,
    /// Comma-separated H values for a sweep.
    #[arg(long = "sweep-H", value_delimiter = ',')]
    sweep_macro_steps: Option<Vec<f64>>,
    /// Comma-separated h values for a sweep.
    #[arg(long = "sweep-h", value_delimiter = ',')]
    sweep_micro_steps: Option<Vec<f64>>,
    /// Fourier cutoff for comparisons (0 disables).
    #[arg(long)]
    low_pass: Option<usize>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct DiagnoseArgs {
    #[arg(long = "h")]
    micro_step: f64,
    #[arg(long)]
    eps: f64,
    #[arg(long = "H")]
    macro_step: f64,
    #[arg(long, default_value_t = DEFAULT_REGIME_THRESHOLD)]
    threshold: f64,
}

impl RunArgs {
    /// Preset or config file, then flag overrides.
    fn resolve(&self, forced_mode: Option<RunMode>) -> anyhow::Result<RunConfig> {
        let mut cfg = match (&self.config, self.presets.experiment()) {
            (Some(_), Some(_)) => anyhow::bail!("--config cannot be combined with a --paper-* preset"),
            (Some(path), None) => RunConfig::from_json_file(path)?,
            (None, Some(e)) => RunConfig::preset(e),
            (None, None) => anyhow::bail!("one of --config, --paper-gl, --paper-sg, --paper-spectral is required"),
        };
        if let Some(m) = forced_mode.or(self.mode) {
            cfg.mode = m;
        }
        match (self.eps, self.omega, cfg.experiment) {
            (Some(_), _, Experiment::SineGordonMsi | Experiment::SpectralThreeField) => {
                anyhow::bail!("--eps applies to the conservation law; use --omega")
            }
            (_, Some(_), Experiment::GlFd) => {
                anyhow::bail!("--omega does not apply to the conservation law; use --eps")
            }
            (Some(v), _, _) | (_, Some(v), _) => cfg.stiffness = v,
            _ => {}
        }
        let set = |dst: &mut f64, src: Option<f64>| {
            if let Some(v) = src {
                *dst = v;
            }
        };
        set(&mut cfg.length, self.length);
        set(&mut cfg.final_time, self.final_time);
        set(&mut cfg.space_step, self.space_step);
        set(&mut cfg.micro_step, self.micro_step);
        set(&mut cfg.macro_step, self.macro_step);
        set(&mut cfg.bench_space_step, self.bench_space_step);
        set(&mut cfg.bench_time_step, self.bench_time_step);
        if let Some(n) = self.modes {
            cfg.modes = n;
        }
        if let Some(v) = &self.sweep_macro_steps {
            cfg.sweep_macro_steps = v.clone();
        }
        if let Some(v) = &self.sweep_micro_steps {
            cfg.sweep_micro_steps = v.clone();
        }
        if let Some(c) = self.low_pass {
            cfg.low_pass = (c > 0).then_some(c);
        }
        if let Some(dir) = &self.out {
            cfg.out_dir = dir.clone();
        }
        if self.threads.is_some() {
            cfg.threads = self.threads;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Rounds away representation noise for display (0.09999999999999999 -> 0.1).
fn tidy(v: f64) -> String {
    let s = format!("{v:.12}");
    let s = s.trim_end_matches('0');
    match s.strip_suffix('.') {
        Some(int) => format!("{int}.0"),
        None => s.to_string(),
    }
}

fn diagnose(args: &DiagnoseArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    for (name, v) in [("h", args.micro_step), ("eps", args.eps), ("H", args.macro_step)] {
        if !(v.is_finite() && v > 0.0) {
            anyhow::bail!("invalid parameter: {name} must be positive and finite, got {v}");
        }
    }
    let d = step_diagnostics(args.micro_step, args.eps, args.macro_step, args.threshold);
    writeln!(out, "h/eps          {}", tidy(d.fast_ratio))?;
    writeln!(out, "(h/eps)^2/H    {}", tidy(d.lower))?;
    writeln!(out, "eps*H/h        {}", tidy(d.upper))?;
    writeln!(out, "within_regime  {} (threshold {})", d.within_regime, args.threshold)?;
    Ok(())
}

fn report(outcome: &Outcome, out: &mut dyn Write) -> i32 {
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(&outcome.report).unwrap_or_default());
    match outcome.unstable_at {
        Some(t) => {
            eprintln!("error: integration went unstable at t = {t}");
            EXIT_UNSTABLE
        }
        None => EXIT_OK,
    }
}

fn exit_code_for(err: &anyhow::Error) -> i32 {
    use flavors_core::Error;
    match err.downcast_ref::<Error>() {
        Some(Error::NonFinite { .. } | Error::IncompleteField { .. }) => EXIT_UNSTABLE,
        _ => EXIT_INVALID,
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Diagnose(args) => diagnose(args, out).map(|_| EXIT_OK),
        Command::Run(args) => args.resolve(None).and_then(|c| app::execute(&c)).map(|o| report(&o, out)),
        Command::Sweep(args) => {
            args.resolve(Some(RunMode::Sweep)).and_then(|c| app::execute(&c)).map(|o| report(&o, out))
        }
        Command::Control(args) => {
            args.resolve(Some(RunMode::Control)).and_then(|c| app::execute(&c)).map(|o| report(&o, out))
        }
        Command::Compare(args) => args.resolve(None).and_then(|c| app::execute_compare(&c)).map(|o| report(&o, out)),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        exit_code_for(&e)
    })
}
