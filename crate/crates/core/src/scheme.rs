// Copyright 2026 The detune Authors
// SPDX-License-Identifier: Apache-2.0

//! Rotating-frame Hamiltonians of the four protection schemes.
//!
//! All coefficients live in the frame `U = exp(-i omega0 t sigma_z / 2)`.
//! A lab-frame drive `A sigma_x cos(omega0 t + phi)` maps to
//! `(A / 2) (cos(phi) sigma_x + sin(phi) sigma_y)` plus terms at `2 omega0`,
//! which are kept only in [`RwaMode::CounterRotating`].

use alloc::format;

use crate::error::{invalid, Error, Result};
use crate::spin::PauliCoeffs;

/// Which protection is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    /// No drive.
    Free,
    /// One resonant drive along x.
    Single,
    /// Resonant x drive plus a sigma_z drive at `second_drive_freq`.
    Double,
    /// One drive whose phase carries the time-dependent detuning.
    Tdd,
}

impl SchemeKind {
    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Free => "free",
            SchemeKind::Single => "single",
            SchemeKind::Double => "double",
            SchemeKind::Tdd => "tdd",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "free" => Some(SchemeKind::Free),
            "single" => Some(SchemeKind::Single),
            "double" => Some(SchemeKind::Double),
            "tdd" => Some(SchemeKind::Tdd),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RwaMode {
    /// Terms oscillating at `2 omega0` (and `omega0 + omega_d`) are dropped.
    #[default]
    Rwa,
    /// Every rotating-frame term is kept; requires a finite `omega0`.
    CounterRotating,
}

impl RwaMode {
    pub fn name(self) -> &'static str {
        match self {
            RwaMode::Rwa => "rwa",
            RwaMode::CounterRotating => "counter-rotating",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "rwa" => Some(RwaMode::Rwa),
            "counter-rotating" | "counter_rotating" | "crt" => Some(RwaMode::CounterRotating),
            _ => None,
        }
    }
}

/// Per-channel switches for the stochastic fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoiseToggles {
    pub magnetic: bool,
    pub drive1: bool,
    pub drive2: bool,
}

impl NoiseToggles {
    pub const ALL: NoiseToggles = NoiseToggles { magnetic: true, drive1: true, drive2: true };
    pub const NONE: NoiseToggles = NoiseToggles { magnetic: false, drive1: false, drive2: false };

    pub fn any(&self) -> bool {
        self.magnetic || self.drive1 || self.drive2
    }
}

impl Default for NoiseToggles {
    fn default() -> Self {
        NoiseToggles::ALL
    }
}

/// Scheme parameters. All frequencies are angular, in rad/us.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeSpec {
    pub kind: SchemeKind,
    /// Bare splitting; only needed for counter-rotating terms and x-polarized signals.
    pub omega0: Option<f64>,
    pub omega1: f64,
    pub omega2: f64,
    /// Angular frequency of the sigma_z drive of the double scheme.
    pub second_drive_freq: f64,
    pub noise: NoiseToggles,
    pub rwa_mode: RwaMode,
}

impl SchemeSpec {
    /// A scheme with `omega1 = 10`, `omega2 = 1`, the second drive at `omega1` and all noise on.
    pub fn new(kind: SchemeKind) -> Self {
        Self {
            kind,
            omega0: None,
            omega1: 10.0,
            omega2: 1.0,
            second_drive_freq: 10.0,
            noise: NoiseToggles::ALL,
            rwa_mode: RwaMode::Rwa,
        }
    }

    /// Noise toggles as actually applied: channels the scheme has no use for are off.
    pub fn effective_noise(&self) -> NoiseToggles {
        let mut n = self.noise;
        match self.kind {
            SchemeKind::Free => {
                n.drive1 = false;
                n.drive2 = false;
            }
            SchemeKind::Single | SchemeKind::Tdd => n.drive2 = false,
            SchemeKind::Double => {}
        }
        n
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = |name: &'static str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(invalid(name, "must be finite and non-negative"))
            }
        };
        nonneg("omega1", self.omega1)?;
        nonneg("omega2", self.omega2)?;
        nonneg("second_drive_freq", self.second_drive_freq)?;
        if let Some(w0) = self.omega0 {
            if !(w0.is_finite() && w0 > 0.0) {
                return Err(invalid("omega0", "must be finite and positive"));
            }
        }
        if matches!(self.kind, SchemeKind::Double | SchemeKind::Tdd) {
            if self.kind == SchemeKind::Tdd && !(self.omega1 > 0.0) {
                return Err(invalid("omega1", "the detuned drive needs omega1 > 0"));
            }
            if self.omega2 >= self.omega1 && self.omega2 > 0.0 {
                return Err(invalid("omega2", "must be smaller than omega1"));
            }
        }
        if self.rwa_mode == RwaMode::CounterRotating && self.omega0.is_none() {
            return Err(Error::InvalidScheme("counter-rotating mode needs a finite omega0".into()));
        }
        Ok(())
    }

    /// Set when `omega2 > omega1 / 5` for a two-gap scheme; the nested RWA
    /// becomes questionable there.
    pub fn hierarchy_warning(&self) -> Option<alloc::string::String> {
        if matches!(self.kind, SchemeKind::Double | SchemeKind::Tdd) && self.omega2 > self.omega1 / 5.0 {
            Some(format!(
                "omega2 = {} exceeds omega1 / 5 = {}; the double-dressed gap is not well separated",
                self.omega2,
                self.omega1 / 5.0
            ))
        } else {
            None
        }
    }
}

/// Polarization of a sensed field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalAxis {
    Z,
    X,
}

impl SignalAxis {
    pub fn name(self) -> &'static str {
        match self {
            SignalAxis::Z => "z",
            SignalAxis::X => "x",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "z" => Some(SignalAxis::Z),
            "x" => Some(SignalAxis::X),
            _ => None,
        }
    }
}

/// A sensed field `g sigma_axis cos(omega_d t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalSpec {
    pub axis: SignalAxis,
    pub g: f64,
    pub omega_d: f64,
}

impl SignalSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.g.is_finite() && self.g >= 0.0) {
            return Err(invalid("signal_g", "must be finite and non-negative"));
        }
        if !self.omega_d.is_finite() {
            return Err(invalid("signal_omega_d", "must be finite"));
        }
        Ok(())
    }
}

/// Instantaneous noise values for one integration step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseSample {
    /// Magnetic noise, rad/us; enters as `(b / 2) sigma_z`.
    pub b: f64,
    /// Relative amplitude error of the first drive.
    pub d1: f64,
    /// Relative amplitude error of the second drive.
    pub d2: f64,
}

/// Time-dependent detuning phase `2 (omega2 / omega1) sin(omega1 t)`.
pub fn phase_phi(t: f64, omega1: f64, omega2: f64) -> Result<f64> {
    if omega1 == 0.0 {
        return Err(invalid("omega1", "phase modulation needs omega1 != 0"));
    }
    Ok(phi_unchecked(t, omega1, omega2))
}

#[inline]
fn phi_unchecked(t: f64, omega1: f64, omega2: f64) -> f64 {
    2.0 * (omega2 / omega1) * libm::sin(omega1 * t)
}

/// Accumulated detuning phase `int_0^t 2 omega2 cos(omega1 t') dt' = 2 omega2 t sinc(omega1 t)`.
pub fn u0_phase(t: f64, omega1: f64, omega2: f64) -> Result<f64> {
    if omega1 == 0.0 {
        return Err(invalid("omega1", "phase modulation needs omega1 != 0"));
    }
    Ok(2.0 * omega2 * t * sinc(omega1 * t))
}

/// `sin(x) / x`, with `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        // Taylor series; relative error below 1e-17 in this range
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        libm::sin(x) / x
    }
}

/// Hamiltonian split into its deterministic part and the coefficients
/// multiplying each noise channel.
///
/// The full Hamiltonian is
/// `drive + signal + d1 * per_d1 + d2 * per_d2 + (b / 2) sigma_z`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HamiltonianTerms {
    pub drive: PauliCoeffs,
    pub signal: PauliCoeffs,
    pub per_d1: PauliCoeffs,
    pub per_d2: PauliCoeffs,
}

impl HamiltonianTerms {
    #[inline]
    pub fn combine(&self, noise: &NoiseSample, with_signal: bool) -> PauliCoeffs {
        let mut h = self.drive;
        if with_signal {
            h = h + self.signal;
        }
        PauliCoeffs::new(
            h.hx + noise.d1 * self.per_d1.hx + noise.d2 * self.per_d2.hx,
            h.hy + noise.d1 * self.per_d1.hy + noise.d2 * self.per_d2.hy,
            h.hz + noise.d1 * self.per_d1.hz + noise.d2 * self.per_d2.hz + noise.b / 2.0,
        )
    }
}

/// Decomposed rotating-frame Hamiltonian at time `t`.
///
/// Expects a scheme that passed [`SchemeSpec::validate`].
pub fn hamiltonian_terms(t: f64, spec: &SchemeSpec, signal: Option<&SignalSpec>) -> Result<HamiltonianTerms> {
    let counter_rotating = spec.rwa_mode == RwaMode::CounterRotating;
    let omega0 = match (counter_rotating, spec.omega0) {
        (true, None) => return Err(Error::InvalidScheme("counter-rotating mode needs a finite omega0".into())),
        (_, w) => w,
    };

    let mut terms = HamiltonianTerms::default();

    // x drive: A sigma_x cos(omega0 t + phi)
    let phi = match spec.kind {
        SchemeKind::Free => None,
        SchemeKind::Single | SchemeKind::Double => Some(0.0),
        SchemeKind::Tdd => Some(phi_unchecked(t, spec.omega1, spec.omega2)),
    };
    if let Some(phi) = phi {
        let half = spec.omega1 / 2.0;
        let (s, c) = libm::sincos(phi);
        let mut v = PauliCoeffs::new(half * c, half * s, 0.0);
        if let (true, Some(w0)) = (counter_rotating, omega0) {
            let (s2, c2) = libm::sincos(2.0 * w0 * t + phi);
            v.hx += half * c2;
            v.hy -= half * s2;
        }
        terms.drive = v;
        terms.per_d1 = v;
    }

    if spec.kind == SchemeKind::Double {
        // sigma_z drive commutes with the frame rotation
        let z = spec.omega2 * libm::cos(spec.second_drive_freq * t);
        terms.drive.hz += z;
        terms.per_d2 = PauliCoeffs::new(0.0, 0.0, z);
    }

    if let Some(sig) = signal {
        terms.signal = match sig.axis {
            SignalAxis::Z => PauliCoeffs::new(0.0, 0.0, sig.g * libm::cos(sig.omega_d * t)),
            SignalAxis::X => {
                let w0 = omega0.ok_or_else(|| Error::InvalidScheme("an x-polarized signal needs omega0".into()))?;
                let half = sig.g / 2.0;
                let (sd, cd) = libm::sincos((w0 - sig.omega_d) * t);
                let mut v = PauliCoeffs::new(half * cd, -half * sd, 0.0);
                if counter_rotating {
                    let (ss, cs) = libm::sincos((w0 + sig.omega_d) * t);
                    v.hx += half * cs;
                    v.hy -= half * ss;
                }
                v
            }
        };
    }

    Ok(terms)
}

/// Rotating-frame Hamiltonian at time `t` for the given noise values.
pub fn hamiltonian_at(
    t: f64,
    spec: &SchemeSpec,
    signal: Option<&SignalSpec>,
    noise: &NoiseSample,
) -> Result<PauliCoeffs> {
    if spec.kind == SchemeKind::Tdd && noise.d2 != 0.0 {
        return Err(Error::InvalidScheme(
            "the detuned drive has no second-drive amplitude noise (d2 must be 0)".into(),
        ));
    }
    Ok(hamiltonian_terms(t, spec, signal)?.combine(noise, true))
}

/// Fastest angular frequency present in the rotating-frame Hamiltonian.
pub fn fastest_frequency(spec: &SchemeSpec, signal: Option<&SignalSpec>) -> f64 {
    let mut w = spec.omega1;
    if spec.kind == SchemeKind::Double {
        w = w.max(spec.second_drive_freq);
    }
    if let Some(sig) = signal {
        match sig.axis {
            SignalAxis::Z => w = w.max(sig.omega_d.abs()),
            SignalAxis::X => {
                if let Some(w0) = spec.omega0 {
                    w = w.max((w0 - sig.omega_d).abs());
                }
            }
        }
    }
    if spec.rwa_mode == RwaMode::CounterRotating {
        if let Some(w0) = spec.omega0 {
            w = w.max(2.0 * w0);
            if let Some(sig) = signal {
                if sig.axis == SignalAxis::X {
                    w = w.max((w0 + sig.omega_d).abs());
                }
            }
        }
    }
    w
}
