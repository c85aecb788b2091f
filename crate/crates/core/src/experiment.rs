// Copyright 2026 The detune Authors
// SPDX-License-Identifier: Apache-2.0

//! Trajectory ensembles and their reduction to decay curves.
//!
//! Every trajectory co-evolves a noisy state against the noiseless evolution
//! of the same scheme and records the overlap fidelity between the two. The
//! noiseless reference is identical for all trajectories, so it is computed
//! once per [`Simulation`] together with the per-step Hamiltonian table.

use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::noise::{drive_noise_params, magnetic_noise_params, Channel, OuParams, OuPath, RngStream};
use crate::scheme::{
    fastest_frequency, hamiltonian_terms, NoiseSample, NoiseToggles, SchemeKind, SchemeSpec, SignalSpec,
};
use crate::spin::{evolve_step, fidelity, PauliCoeffs, SpinState};

/// Largest admissible phase advance per step of the fastest frequency, in rad.
pub const MAX_PHASE_PER_STEP: f64 = 0.05;

/// Starting state of both the noisy and the reference evolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialState {
    Ground,
    Excited,
    PlusX,
    MinusX,
    PlusY,
}

impl InitialState {
    pub fn state(self) -> SpinState {
        match self {
            InitialState::Ground => SpinState::ground(),
            InitialState::Excited => SpinState::excited(),
            InitialState::PlusX => SpinState::plus_x(),
            InitialState::MinusX => SpinState::minus_x(),
            InitialState::PlusY => SpinState::plus_y(),
        }
    }

    /// Default starting state of a decay experiment.
    ///
    /// Each default is an equal superposition of the eigenstates of the
    /// outermost protecting gap, so its decay measures the dephasing of
    /// that gap: `|+x>` for free evolution, `|0>` for the single drive
    /// (dressed states are `|+-x>`), and `|+x>` for the two-gap schemes
    /// (double-dressed states are `|0>` and `|1>`).
    pub fn default_for(kind: SchemeKind) -> Self {
        match kind {
            SchemeKind::Free => InitialState::PlusX,
            SchemeKind::Single => InitialState::Ground,
            SchemeKind::Double | SchemeKind::Tdd => InitialState::PlusX,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            InitialState::Ground => "ground",
            InitialState::Excited => "excited",
            InitialState::PlusX => "plus_x",
            InitialState::MinusX => "minus_x",
            InitialState::PlusY => "plus_y",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ground" | "0" => Some(InitialState::Ground),
            "excited" | "1" => Some(InitialState::Excited),
            "plus_x" | "+x" => Some(InitialState::PlusX),
            "minus_x" | "-x" => Some(InitialState::MinusX),
            "plus_y" | "+y" => Some(InitialState::PlusY),
            _ => None,
        }
    }
}

/// Physical noise parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseConfig {
    /// Pure dephasing time of the free qubit, us.
    pub t2_star: f64,
    /// Magnetic noise correlation time, us.
    pub tau_b: f64,
    /// Relative drive-amplitude error (stationary standard deviation).
    pub delta_omega: f64,
    /// Drive noise correlation time, us.
    pub tau_omega: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self { t2_star: 3.0, tau_b: 25.0, delta_omega: 0.005, tau_omega: 500.0 }
    }
}

impl NoiseConfig {
    pub fn magnetic(&self) -> Result<OuParams> {
        magnetic_noise_params(self.t2_star, self.tau_b)
    }

    pub fn drive(&self) -> Result<OuParams> {
        drive_noise_params(self.delta_omega, self.tau_omega)
    }
}

/// A fully specified ensemble run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentConfig {
    pub scheme: SchemeSpec,
    pub signal: Option<SignalSpec>,
    /// Total evolution time, us.
    pub duration: f64,
    /// Integration step, us.
    pub dt: f64,
    /// Integration steps between recorded points.
    pub sample_stride: usize,
    pub n_traj: usize,
    pub master_seed: u64,
    pub noise: NoiseConfig,
    /// Overrides [`InitialState::default_for`].
    pub initial_state: Option<InitialState>,
    /// Whether the noiseless reference also carries the signal. Magnetometry
    /// runs compare against the unsensed evolution and clear this.
    pub signal_in_reference: bool,
}

/// Default duration per scheme, roughly three expected coherence times.
pub fn default_duration(kind: SchemeKind) -> f64 {
    match kind {
        SchemeKind::Free => 10.0,
        SchemeKind::Single => 200.0,
        SchemeKind::Double => 1500.0,
        SchemeKind::Tdd => 3000.0,
    }
}

/// Step size at the phase-per-step limit for the fastest frequency.
pub fn default_dt(scheme: &SchemeSpec, signal: Option<&SignalSpec>) -> f64 {
    let w = fastest_frequency(scheme, signal);
    if w > 0.0 {
        MAX_PHASE_PER_STEP / w
    } else {
        MAX_PHASE_PER_STEP
    }
}

/// Largest step not above `dt` that divides `duration` into whole steps.
pub fn snap_dt(duration: f64, dt: f64) -> f64 {
    duration / libm::ceil(duration / dt - 1e-9).max(1.0)
}

/// Largest divisor of `steps` that leaves at least `points` intervals.
pub fn default_stride(steps: usize, points: usize) -> usize {
    let mut stride = (steps / points.max(1)).max(1);
    while !steps.is_multiple_of(stride) {
        stride -= 1;
    }
    stride
}

impl ExperimentConfig {
    /// Default duration, step and about 200 recorded intervals for `scheme`.
    pub fn new(scheme: SchemeSpec) -> Self {
        let duration = default_duration(scheme.kind);
        let dt = snap_dt(duration, default_dt(&scheme, None));
        let steps = libm::round(duration / dt) as usize;
        Self {
            scheme,
            signal: None,
            duration,
            dt,
            sample_stride: default_stride(steps, 200),
            n_traj: 1000,
            master_seed: 1,
            noise: NoiseConfig::default(),
            initial_state: None,
            signal_in_reference: true,
        }
    }

    /// Sets a new duration, shrinking the step to divide it, and re-derives the
    /// stride for about `points` intervals.
    pub fn with_duration(mut self, duration: f64, points: usize) -> Self {
        self.duration = duration;
        self.dt = snap_dt(duration, self.dt);
        self.sample_stride = default_stride(self.steps(), points);
        self
    }

    /// Sets a new step and re-derives the stride for about `points` intervals.
    pub fn with_dt(mut self, dt: f64, points: usize) -> Self {
        self.dt = dt;
        self.sample_stride = default_stride(self.steps(), points);
        self
    }

    pub fn steps(&self) -> usize {
        libm::round(self.duration / self.dt) as usize
    }

    pub fn n_samples(&self) -> usize {
        self.steps() / self.sample_stride + 1
    }

    pub fn times(&self) -> Vec<f64> {
        let stride = self.sample_stride as f64;
        (0..self.n_samples()).map(|i| i as f64 * stride * self.dt).collect()
    }

    pub fn initial(&self) -> InitialState {
        self.initial_state.unwrap_or_else(|| InitialState::default_for(self.scheme.kind))
    }

    pub fn validate(&self) -> Result<()> {
        self.scheme.validate()?;
        if let Some(sig) = &self.signal {
            sig.validate()?;
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(invalid("duration", "must be positive"));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(invalid("dt", "must be positive"));
        }
        let ratio = self.duration / self.dt;
        if (ratio - libm::round(ratio)).abs() > 1e-6 * ratio.max(1.0) {
            return Err(invalid("dt", "duration must be an integer multiple of dt"));
        }
        let w = fastest_frequency(&self.scheme, self.signal.as_ref());
        if w * self.dt > MAX_PHASE_PER_STEP * (1.0 + 1e-9) {
            return Err(invalid(
                "dt",
                alloc::format!(
                    "fastest frequency {w} rad/us advances {} rad per step (limit {MAX_PHASE_PER_STEP})",
                    w * self.dt
                ),
            ));
        }
        if self.sample_stride == 0 {
            return Err(invalid("stride", "must be at least 1"));
        }
        if !self.steps().is_multiple_of(self.sample_stride) {
            return Err(invalid("stride", "must divide duration / dt"));
        }
        if self.n_traj == 0 {
            return Err(invalid("trajectories", "must be at least 1"));
        }
        self.noise.magnetic()?;
        self.noise.drive()?;
        Ok(())
    }
}

/// Ensemble-averaged fidelity against time.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DecayCurve {
    /// Sample times, us.
    pub times: Vec<f64>,
    pub mean: Vec<f64>,
    /// Standard error of the mean.
    pub sem: Vec<f64>,
}

impl DecayCurve {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Averages per-trajectory series, accumulating in the order given.
    pub fn from_trajectories<'a, I>(times: Vec<f64>, series: I) -> Self
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let mut acc = EnsembleAccumulator::new(times.len());
        for s in series {
            acc.push(s);
        }
        acc.finish(times)
    }
}

/// Running mean and variance per sample (Welford), fed in trajectory order.
#[derive(Debug, Clone)]
pub struct EnsembleAccumulator {
    count: usize,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl EnsembleAccumulator {
    pub fn new(n_samples: usize) -> Self {
        Self { count: 0, mean: alloc::vec![0.0; n_samples], m2: alloc::vec![0.0; n_samples] }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn push(&mut self, series: &[f64]) {
        assert_eq!(series.len(), self.mean.len(), "series length mismatch");
        self.count += 1;
        let n = self.count as f64;
        for ((m, m2), &x) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(series) {
            let delta = x - *m;
            *m += delta / n;
            *m2 += delta * (x - *m);
        }
    }

    pub fn finish(self, times: Vec<f64>) -> DecayCurve {
        let n = self.count as f64;
        let sem = self
            .m2
            .iter()
            .map(|&m2| if self.count > 1 { libm::sqrt((m2 / (n - 1.0)).max(0.0) / n) } else { 0.0 })
            .collect();
        DecayCurve { times, mean: self.mean, sem }
    }
}

/// Noise-dependent part of the Hamiltonian at one step midpoint.
#[derive(Debug, Clone, Copy)]
struct StepTerms {
    base: PauliCoeffs,
    d1_x: f64,
    d1_y: f64,
    d1_z: f64,
    d2_z: f64,
}

/// A validated configuration with its Hamiltonian table and noiseless reference.
#[derive(Debug, Clone)]
pub struct Simulation {
    cfg: ExperimentConfig,
    noise: NoiseToggles,
    magnetic: OuParams,
    drive: OuParams,
    table: Vec<StepTerms>,
    reference: Vec<SpinState>,
}

impl Simulation {
    pub fn new(cfg: ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let steps = cfg.steps();
        let stride = cfg.sample_stride;
        let dt = cfg.dt;
        let signal = cfg.signal.as_ref();

        let mut table = Vec::with_capacity(steps);
        let mut reference = Vec::with_capacity(cfg.n_samples());
        let mut ideal = cfg.initial().state();
        reference.push(ideal);
        for k in 0..steps {
            let t_mid = (k as f64 + 0.5) * dt;
            let terms = hamiltonian_terms(t_mid, &cfg.scheme, signal)?;
            let noiseless = NoiseSample::default();
            let h_noisy = terms.combine(&noiseless, true);
            let h_ideal = if cfg.signal_in_reference { h_noisy } else { terms.combine(&noiseless, false) };
            table.push(StepTerms {
                base: h_noisy,
                d1_x: terms.per_d1.hx,
                d1_y: terms.per_d1.hy,
                d1_z: terms.per_d1.hz,
                d2_z: terms.per_d2.hz,
            });
            ideal = evolve_step(&ideal, &h_ideal, dt);
            if (k + 1) % stride == 0 {
                reference.push(ideal);
            }
        }

        Ok(Self {
            noise: cfg.scheme.effective_noise(),
            magnetic: cfg.noise.magnetic()?,
            drive: cfg.noise.drive()?,
            cfg,
            table,
            reference,
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.cfg
    }

    pub fn times(&self) -> Vec<f64> {
        self.cfg.times()
    }

    /// The noiseless reference at each recorded time.
    pub fn reference(&self) -> &[SpinState] {
        &self.reference
    }

    /// Fidelity series of trajectory `index`; a pure function of the config and index.
    pub fn trajectory(&self, index: u64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.reference.len());
        out.push(1.0);
        self.propagate(index, |k, state| {
            out.push(fidelity(&self.reference[k], state).clamp(0.0, 1.0));
        });
        out
    }

    /// Noisy states of trajectory `index` at every sample time, starting with the initial state.
    pub fn trajectory_states(&self, index: u64) -> Vec<SpinState> {
        let mut out = Vec::with_capacity(self.reference.len());
        out.push(self.cfg.initial().state());
        self.propagate(index, |_, state| out.push(*state));
        out
    }

    /// Evolves trajectory `index`, handing each sample index `k >= 1` and its state to `record`.
    fn propagate(&self, index: u64, mut record: impl FnMut(usize, &SpinState)) {
        let seed = self.cfg.master_seed;
        let dt = self.cfg.dt;
        let stride = self.cfg.sample_stride;
        let path = |on: bool, params: &OuParams, ch: Channel| {
            on.then(|| OuPath::new(params, dt, RngStream::for_channel(seed, index, ch)))
        };
        let mut magnetic = path(self.noise.magnetic, &self.magnetic, Channel::Magnetic);
        let mut drive1 = path(self.noise.drive1, &self.drive, Channel::Drive1);
        let mut drive2 = path(self.noise.drive2, &self.drive, Channel::Drive2);

        let mut state = self.cfg.initial().state();
        for (k, chunk) in self.table.chunks_exact(stride).enumerate() {
            for terms in chunk {
                let b = magnetic.as_ref().map_or(0.0, OuPath::value);
                let d1 = drive1.as_ref().map_or(0.0, OuPath::value);
                let d2 = drive2.as_ref().map_or(0.0, OuPath::value);
                let h = PauliCoeffs::new(
                    terms.base.hx + d1 * terms.d1_x,
                    terms.base.hy + d1 * terms.d1_y,
                    terms.base.hz + d1 * terms.d1_z + d2 * terms.d2_z + b / 2.0,
                );
                state = evolve_step(&state, &h, dt);
                if let Some(p) = magnetic.as_mut() {
                    p.advance();
                }
                if let Some(p) = drive1.as_mut() {
                    p.advance();
                }
                if let Some(p) = drive2.as_mut() {
                    p.advance();
                }
            }
            record(k + 1, &state);
        }
    }

    /// Runs all trajectories in index order on the calling thread.
    pub fn run_serial(&self) -> DecayCurve {
        let mut acc = EnsembleAccumulator::new(self.reference.len());
        for i in 0..self.cfg.n_traj as u64 {
            acc.push(&self.trajectory(i));
        }
        acc.finish(self.times())
    }
}

/// Fidelity series of a single trajectory.
pub fn run_trajectory(cfg: &ExperimentConfig, index: u64) -> Result<Vec<f64>> {
    Ok(Simulation::new(*cfg)?.trajectory(index))
}

/// Mean and standard error over trajectories `0..n_traj`.
pub fn run_ensemble(cfg: &ExperimentConfig) -> Result<DecayCurve> {
    Ok(Simulation::new(*cfg)?.run_serial())
}
