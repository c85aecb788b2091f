// Copyright 2026 The detune Authors
// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use detune::config::{read_raw_config, RunConfig};
use detune::ensemble::{resolve_workers, run_parallel};
use detune::plot::{write_plot_script, Overlay};
use detune::{read_curve_csv, write_curve_csv, RunManifest};
use detune_core::analysis::{fit_auto, fit_decay_with, model_curve, FitOptions, FitResult};
use detune_core::magnetometry::{
    expected_coupling, extract_signal, magnetometry_config, suggested_duration, DetuningSign, Protocol,
};
use detune_core::{DecayCurve, DecayModel, ExperimentConfig, SchemeKind, SignalAxis};

/// Monte Carlo coherence of continuously driven two-level systems.
///
/// All frequencies are angular, in rad/us, and all times in us. Set
/// `frequency_convention = cyclic` in a config file to give frequencies in
/// cycles/us instead; they are multiplied by 2 pi on input.
#[derive(Debug, Parser)]
#[command(name = "detune", version)]
struct Cli {
    /// Worker threads for ensembles [default: $DETUNE_WORKERS, else all cores].
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a decay ensemble and write its mean curve.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Write the resolved configuration and run metadata here.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Write a gnuplot script for the curve here.
        #[arg(long)]
        emit_plot: Option<PathBuf>,
    },
    /// Fit a coherence time to a curve file and print it as JSON.
    Fit {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = ModelArg::Auto)]
        model: ModelArg,
        /// Also fit the asymptote instead of fixing it at 1/2.
        #[arg(long)]
        fit_floor: bool,
        #[arg(long)]
        emit_plot: Option<PathBuf>,
    },
    /// Run a sensing protocol with the detuned drive and extract the signal.
    Magnetometry {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        approach: AxisArg,
        #[arg(long, value_enum)]
        protocol: ProtocolArg,
        /// Side of the resonance the signal frequency is placed on.
        #[arg(long, value_enum, default_value_t = SignArg::Minus)]
        sign: SignArg,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        emit_plot: Option<PathBuf>,
    },
    /// Write an analytic decay curve.
    Analytic {
        #[arg(long, value_enum)]
        model: FixedModelArg,
        #[arg(long)]
        t2: f64,
        #[arg(long)]
        duration: f64,
        #[arg(long)]
        dt: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        emit_plot: Option<PathBuf>,
    },
    /// Repeat simulate and fit over values of one config key.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        key: String,
        /// Comma-separated values, in the units of the config file.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = ModelArg::Auto)]
        model: ModelArg,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    Gaussian,
    Exponential,
    Auto,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FixedModelArg {
    Gaussian,
    Exponential,
}

impl FixedModelArg {
    fn model(self) -> DecayModel {
        match self {
            FixedModelArg::Gaussian => DecayModel::Gaussian,
            FixedModelArg::Exponential => DecayModel::Exponential,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AxisArg {
    Z,
    X,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProtocolArg {
    Rabi,
    Ramsey,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SignArg {
    Minus,
    Plus,
}

/// Signal amplitude used by `magnetometry` when the config sets none, rad/us.
const DEFAULT_SIGNAL_G: f64 = 0.05;

/// Oscillation periods recorded by `magnetometry` when the config sets no duration.
const SENSING_PERIODS: f64 = 4.0;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let msg = e.to_string();
            eprintln!("{}", msg.lines().next().unwrap_or("invalid arguments"));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("detune: {}", format!("{e:#}").replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Simulate { config, out, manifest, emit_plot } => {
            let run = load(&config)?;
            let workers = resolve_workers(cli.workers)?;
            let started = Instant::now();
            let curve = run_parallel(&run.experiment, workers)?;
            write_curve_csv(&curve, &out)?;
            let overlay = (run.experiment.scheme.kind == SchemeKind::Free).then_some(Overlay {
                model: DecayModel::Gaussian,
                t2: run.experiment.noise.t2_star,
                floor: 0.5,
            });
            finish_run(
                "simulate",
                &run,
                &run.experiment,
                started,
                &out,
                manifest.as_deref(),
                emit_plot.as_deref(),
                overlay,
            )
        }
        Command::Fit { input, model, fit_floor, emit_plot } => {
            let curve = read_curve_csv(&input)?;
            let opts = FitOptions { fit_floor, ..FitOptions::default() };
            let fit = fit_curve(&curve, model, &opts).with_context(|| format!("fitting {}", input.display()))?;
            println!(
                "{}",
                json!({
                    "model": fit.model.name(),
                    "t2_us": fit.t2,
                    "residual_rms": fit.residual_rms,
                    "fit_uncertainty_us": fit.fit_uncertainty,
                    "floor": fit.floor,
                })
            );
            if let Some(plot) = emit_plot {
                let overlay = Overlay { model: fit.model, t2: fit.t2, floor: fit.floor };
                write_plot_script(&plot, &input, "fit", Some(&overlay))?;
            }
            Ok(())
        }
        Command::Magnetometry { config, approach, protocol, sign, out, manifest, emit_plot } => {
            let run = load(&config)?;
            let axis = match approach {
                AxisArg::Z => SignalAxis::Z,
                AxisArg::X => SignalAxis::X,
            };
            let protocol = match protocol {
                ProtocolArg::Rabi => Protocol::Rabi,
                ProtocolArg::Ramsey => Protocol::Ramsey,
            };
            let sign = match sign {
                SignArg::Minus => DetuningSign::Minus,
                SignArg::Plus => DetuningSign::Plus,
            };
            if let Some(a) = run.signal_axis {
                if a != axis {
                    bail!("config sets signal_axis = {} but --approach is {}", a.name(), axis.name());
                }
            }
            let g = run.signal_g.unwrap_or(DEFAULT_SIGNAL_G);
            let mut base = run.experiment;
            if !run.duration_given {
                base.duration = suggested_duration(axis, protocol, g, SENSING_PERIODS);
                if !run.stride_given {
                    base = base.with_duration(base.duration, 200);
                }
            }
            let cfg = magnetometry_config(&base, axis, protocol, sign, g)?;
            let workers = resolve_workers(cli.workers)?;
            let started = Instant::now();
            let curve = run_parallel(&cfg, workers)?;
            write_curve_csv(&curve, &out)?;
            let fit = extract_signal(&curve).context("extracting the signal")?;
            println!(
                "{}",
                json!({
                    "approach": axis.name(),
                    "protocol": protocol.name(),
                    "g": g,
                    "omega_d": cfg.signal.map(|s| s.omega_d),
                    "frequency": fit.frequency,
                    "coupling": fit.coupling(),
                    "expected_coupling": expected_coupling(axis, protocol, g),
                    "amplitude": fit.amplitude,
                    "offset": fit.offset,
                })
            );
            finish_run("magnetometry", &run, &cfg, started, &out, manifest.as_deref(), emit_plot.as_deref(), None)
        }
        Command::Analytic { model, t2, duration, dt, out, emit_plot } => {
            if !(t2 > 0.0 && duration > 0.0 && dt > 0.0) {
                bail!("t2, duration and dt must be positive");
            }
            let steps = duration / dt;
            if (steps - steps.round()).abs() > 1e-6 * steps {
                bail!("duration must be an integer multiple of dt");
            }
            let times: Vec<f64> = (0..=steps.round() as usize).map(|i| i as f64 * dt).collect();
            let curve = model_curve(model.model(), t2, &times);
            write_curve_csv(&curve, &out)?;
            if let Some(plot) = emit_plot {
                let overlay = Overlay { model: model.model(), t2, floor: 0.5 };
                write_plot_script(&plot, &out, "analytic", Some(&overlay))?;
            }
            Ok(())
        }
        Command::Sweep { config, key, values, out, model } => {
            let raw = read_raw_config(&config)?;
            let workers = resolve_workers(cli.workers)?;
            let mut table =
                String::from("value,t2_us,fit_uncertainty_us,residual_rms,model,mean_fidelity,final_mean,final_sem\n");
            for value in &values {
                let value = value.trim();
                let mut raw = raw.clone();
                raw.set(&key, value)?;
                let run = raw.resolve().with_context(|| format!("{} with {key} = {value}", config.display()))?;
                warn_hierarchy(&run);
                let curve = run_parallel(&run.experiment, workers)?;
                let fit = fit_curve(&curve, model, &FitOptions::default());
                let n = curve.len().max(1) as f64;
                let mean_fidelity = curve.mean.iter().sum::<f64>() / n;
                let (t2, unc, rms, name) = match &fit {
                    Ok(f) => (f.t2, f.fit_uncertainty, f.residual_rms, f.model.name()),
                    Err(_) => (f64::NAN, f64::NAN, f64::NAN, "unfittable"),
                };
                writeln!(
                    table,
                    "{value},{t2:.8e},{unc:.8e},{rms:.8e},{name},{mean_fidelity:.8e},{:.8e},{:.8e}",
                    curve.mean.last().copied().unwrap_or(f64::NAN),
                    curve.sem.last().copied().unwrap_or(f64::NAN),
                )
                .unwrap();
            }
            std::fs::write(&out, table).with_context(|| format!("cannot write {}", out.display()))
        }
    }
}

fn load(path: &Path) -> anyhow::Result<RunConfig> {
    let raw = read_raw_config(path)?;
    let run = raw.resolve().with_context(|| format!("{}", path.display()))?;
    warn_hierarchy(&run);
    Ok(run)
}

fn warn_hierarchy(run: &RunConfig) {
    if let Some(w) = run.experiment.scheme.hierarchy_warning() {
        eprintln!("detune: warning: {w}");
    }
}

fn fit_curve(curve: &DecayCurve, model: ModelArg, opts: &FitOptions) -> detune_core::Result<FitResult> {
    match model {
        ModelArg::Gaussian => fit_decay_with(curve, DecayModel::Gaussian, opts),
        ModelArg::Exponential => fit_decay_with(curve, DecayModel::Exponential, opts),
        ModelArg::Auto => fit_auto(curve, opts),
    }
}

#[allow(clippy::too_many_arguments)]
fn finish_run(
    command: &str,
    run: &RunConfig,
    cfg: &ExperimentConfig,
    started: Instant,
    out: &Path,
    manifest: Option<&Path>,
    plot: Option<&Path>,
    overlay: Option<Overlay>,
) -> anyhow::Result<()> {
    if let Some(plot) = plot {
        write_plot_script(plot, out, &format!("{command} {}", cfg.scheme.kind.name()), overlay.as_ref())?;
    }
    if let Some(path) = manifest {
        RunManifest {
            command: command.to_string(),
            config: *cfg,
            input_convention: run.convention,
            runtime_s: started.elapsed().as_secs_f64(),
            output: out.to_path_buf(),
            plot: plot.map(Path::to_path_buf),
        }
        .write(path)?;
    }
    Ok(())
}
