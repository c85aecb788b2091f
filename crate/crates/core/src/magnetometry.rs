// Copyright 2026 The detune Authors
// SPDX-License-Identifier: Apache-2.0

//! Sensing a weak oscillating field with the time-dependently detuned drive.
//!
//! The signal frequency is placed on one of the double-dressed resonances and
//! the run compares against the unsensed evolution, so the fidelity oscillates
//! at a rate set by the signal amplitude `g`:
//!
//! | approach | protocol | `omega_d`           | effective term |
//! |----------|----------|---------------------|----------------|
//! | z        | ramsey   | `Omega1`            | shift `g/2`    |
//! | z        | rabi     | `Omega1 -/+ Omega2` | `g/4`          |
//! | x        | rabi     | `omega0 -/+ Omega2` | `g/4`          |
//! | x        | ramsey   | `omega0 -/+ Omega1` | `+/- g/4`      |

use alloc::format;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::experiment::{run_ensemble, DecayCurve, ExperimentConfig, InitialState};
use crate::scheme::{SchemeKind, SignalAxis, SignalSpec};

/// Bare splitting assumed for the x approach when none is configured, in units of `Omega1`.
pub const DEFAULT_OMEGA0_RATIO: f64 = 100.0;

/// Largest admissible `g / Omega2`.
pub const MAX_G_RATIO: f64 = 0.2;

const OVERSAMPLE: f64 = 8.0;
const FREQ_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protocol {
    Rabi,
    Ramsey,
}

impl Protocol {
    pub fn name(self) -> &'static str {
        match self {
            Protocol::Rabi => "rabi",
            Protocol::Ramsey => "ramsey",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "rabi" => Some(Protocol::Rabi),
            "ramsey" => Some(Protocol::Ramsey),
            _ => None,
        }
    }

    /// Rabi starts in a double-dressed eigenstate, Ramsey in their equal superposition.
    pub fn initial_state(self) -> InitialState {
        match self {
            Protocol::Rabi => InitialState::Ground,
            Protocol::Ramsey => InitialState::PlusX,
        }
    }
}

/// Which side of the resonance the signal sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DetuningSign {
    /// `omega_d` below the carrier.
    #[default]
    Minus,
    Plus,
}

impl DetuningSign {
    pub fn name(self) -> &'static str {
        match self {
            DetuningSign::Minus => "minus",
            DetuningSign::Plus => "plus",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "minus" | "-" => Some(DetuningSign::Minus),
            "plus" | "+" => Some(DetuningSign::Plus),
            _ => None,
        }
    }

    fn factor(self) -> f64 {
        match self {
            DetuningSign::Minus => -1.0,
            DetuningSign::Plus => 1.0,
        }
    }
}

/// Signal frequency for the chosen resonance. `omega0` is only read by the x approach.
pub fn signal_frequency(
    axis: SignalAxis,
    protocol: Protocol,
    sign: DetuningSign,
    omega0: f64,
    omega1: f64,
    omega2: f64,
) -> f64 {
    let s = sign.factor();
    match (axis, protocol) {
        (SignalAxis::Z, Protocol::Ramsey) => omega1,
        (SignalAxis::Z, Protocol::Rabi) => omega1 + s * omega2,
        (SignalAxis::X, Protocol::Rabi) => omega0 + s * omega2,
        (SignalAxis::X, Protocol::Ramsey) => omega0 + s * omega1,
    }
}

/// Magnitude of the effective double-dressed coupling the protocol should measure.
pub fn expected_coupling(axis: SignalAxis, protocol: Protocol, g: f64) -> f64 {
    match (axis, protocol) {
        (SignalAxis::Z, Protocol::Ramsey) => g / 2.0,
        _ => g / 4.0,
    }
}

/// Copy of `base` set up for a sensing run: signal, initial state and reference.
///
/// `base.scheme` must be the tdd scheme. Noise settings and timing are kept.
pub fn magnetometry_config(
    base: &ExperimentConfig,
    axis: SignalAxis,
    protocol: Protocol,
    sign: DetuningSign,
    g: f64,
) -> Result<ExperimentConfig> {
    let spec = &base.scheme;
    if spec.kind != SchemeKind::Tdd {
        return Err(Error::ProtocolValidity(format!("magnetometry requires the tdd scheme, got {}", spec.kind.name())));
    }
    if !(g.is_finite() && g >= 0.0) {
        return Err(invalid("signal_g", "must be finite and non-negative"));
    }
    if g >= MAX_G_RATIO * spec.omega2 {
        return Err(Error::ProtocolValidity(format!(
            "signal_g = {g} is not small against omega2 = {} (need g < {})",
            spec.omega2,
            MAX_G_RATIO * spec.omega2
        )));
    }
    let mut cfg = *base;
    let omega0 = match (axis, spec.omega0) {
        (SignalAxis::X, None) => {
            let w0 = DEFAULT_OMEGA0_RATIO * spec.omega1;
            cfg.scheme.omega0 = Some(w0);
            w0
        }
        (_, w0) => w0.unwrap_or(0.0),
    };
    let omega_d = signal_frequency(axis, protocol, sign, omega0, spec.omega1, spec.omega2);
    cfg.signal = Some(SignalSpec { axis, g, omega_d });
    cfg.signal_in_reference = false;
    cfg.initial_state = Some(protocol.initial_state());
    Ok(cfg)
}

/// Duration covering about `periods` oscillations of the expected fidelity signal,
/// rounded up to a whole number of `dt`-multiples of 10 us.
pub fn suggested_duration(axis: SignalAxis, protocol: Protocol, g: f64, periods: f64) -> f64 {
    let coupling = expected_coupling(axis, protocol, g);
    if !(coupling > 0.0) {
        return 1000.0;
    }
    let period = core::f64::consts::PI / coupling;
    libm::ceil(periods * period / 10.0) * 10.0
}

/// Builds the sensing configuration and runs it.
pub fn magnetometry_run(
    base: &ExperimentConfig,
    axis: SignalAxis,
    protocol: Protocol,
    sign: DetuningSign,
    g: f64,
) -> Result<DecayCurve> {
    let cfg = magnetometry_config(base, axis, protocol, sign, g)?;
    run_ensemble(&cfg)
}

/// Sinusoid `offset + amplitude * cos(frequency * t + phase)` fitted to a curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalFit {
    /// Angular frequency of the fidelity oscillation, rad/us.
    pub frequency: f64,
    pub amplitude: f64,
    pub offset: f64,
    pub phase: f64,
    pub residual_rms: f64,
}

impl SignalFit {
    /// Effective coupling that produces this oscillation. A population
    /// `cos^2(k t)` oscillates at `2k`, so this is half the fitted frequency.
    pub fn coupling(&self) -> f64 {
        self.frequency / 2.0
    }
}

/// Linear least squares for `a + b cos(w t) + c sin(w t)`; returns `(a, b, c, sse)`.
fn fit_at(w: f64, t: &[f64], y: &[f64]) -> Option<(f64, f64, f64, f64)> {
    // Normal equations of the 3-parameter linear model.
    let mut m = [[0.0f64; 3]; 3];
    let mut r = [0.0f64; 3];
    for (&ti, &yi) in t.iter().zip(y) {
        let (s, c) = libm::sincos(w * ti);
        let basis = [1.0, c, s];
        for i in 0..3 {
            r[i] += basis[i] * yi;
            for j in 0..3 {
                m[i][j] += basis[i] * basis[j];
            }
        }
    }
    let sol = solve3(m, r)?;
    let sse = t
        .iter()
        .zip(y)
        .map(|(&ti, &yi)| {
            let (s, c) = libm::sincos(w * ti);
            let e = yi - (sol[0] + sol[1] * c + sol[2] * s);
            e * e
        })
        .sum();
    Some((sol[0], sol[1], sol[2], sse))
}

/// Gaussian elimination with partial pivoting.
fn solve3(mut m: [[f64; 3]; 3], mut r: [f64; 3]) -> Option<[f64; 3]> {
    let scale = m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    for col in 0..3 {
        let pivot = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if !(m[pivot][col].abs() > 1e-12 * scale) {
            return None;
        }
        m.swap(col, pivot);
        r.swap(col, pivot);
        for row in col + 1..3 {
            let (lead, f) = (m[col], m[row][col] / m[col][col]);
            for (v, l) in m[row].iter_mut().zip(lead).skip(col) {
                *v -= f * l;
            }
            r[row] -= f * r[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut acc = r[row];
        for k in row + 1..3 {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    Some(x)
}

/// Fits a single sinusoid to the mean of `curve`.
///
/// Scans angular frequencies from one period per record up to the sampling
/// limit, then refines the best one by golden-section search.
pub fn extract_signal(curve: &DecayCurve) -> Result<SignalFit> {
    let (t, y) = (&curve.times, &curve.mean);
    let n = t.len();
    if n < 8 {
        return Err(Error::FitFailure(format!("only {n} samples")));
    }
    let span = t[n - 1] - t[0];
    if !(span > 0.0) {
        return Err(Error::FitFailure("curve spans no time".into()));
    }
    let mean = y.iter().sum::<f64>() / n as f64;
    let sst: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    if !(sst > 1e-20 * n as f64) {
        return Err(Error::FitFailure("curve does not oscillate".into()));
    }

    let two_pi = 2.0 * core::f64::consts::PI;
    let w_min = two_pi / span;
    let w_max = core::f64::consts::PI * (n - 1) as f64 / span;
    let step = w_min / OVERSAMPLE;
    let sse = |w: f64| fit_at(w, t, y).map_or(f64::INFINITY, |f| f.3);

    let grid: Vec<f64> = (0..).map(|k| w_min + step * k as f64).take_while(|&w| w <= w_max).collect();
    let (best, _) = grid
        .iter()
        .enumerate()
        .map(|(i, &w)| (i, sse(w)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::FitFailure("empty frequency grid".into()))?;

    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(grid.len() - 1)];
    let inv_phi = (libm::sqrt(5.0) - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (sse(c), sse(d));
    while (b - a) > FREQ_TOL * b {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = sse(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = sse(d);
        }
    }
    let w = 0.5 * (a + b);
    let (offset, bc, bs, sse_w) = fit_at(w, t, y).ok_or_else(|| Error::FitFailure("singular sinusoid fit".into()))?;
    let amplitude = libm::hypot(bc, bs);
    // An oscillation must explain most of the variance.
    if sse_w > 0.5 * sst {
        return Err(Error::FitFailure(format!(
            "best sinusoid explains only {:.1}% of the variance",
            100.0 * (1.0 - sse_w / sst)
        )));
    }
    Ok(SignalFit {
        frequency: w,
        amplitude,
        offset,
        phase: libm::atan2(-bs, bc),
        residual_rms: libm::sqrt(sse_w / n as f64),
    })
}
