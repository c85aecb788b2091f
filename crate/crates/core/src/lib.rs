// Copyright 2026 The detune Authors
// SPDX-License-Identifier: Apache-2.0

//! Monte Carlo kernel for a two-level system protected by continuous
//! dynamical decoupling.
//!
//! The crate is `no_std` (it needs `alloc`). Elementary functions come from
//! `libm`, so results are bit-identical across platforms.
//!
//! - [`noise`]: exact Ornstein-Uhlenbeck paths and addressable random streams.
//! - [`spin`]: states and the exact SU(2) step propagator.
//! - [`scheme`]: rotating-frame Hamiltonians for free evolution, a single
//!   drive, the concatenated double drive and the time-dependently detuned drive.
//! - [`experiment`]: trajectory ensembles and decay curves.
//! - [`magnetometry`]: the sensing protocols and sinusoid extraction.
//! - [`analysis`]: decay-model fits and analytic reference curves.

#![no_std]
// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod error;
pub mod experiment;
pub mod magnetometry;
pub mod noise;
pub mod scheme;
pub mod spin;

pub use analysis::{DecayModel, FitOptions, FitResult};
pub use error::{Error, Result};
pub use experiment::{DecayCurve, ExperimentConfig, InitialState, NoiseConfig, Simulation};
pub use magnetometry::{DetuningSign, Protocol, SignalFit};
pub use noise::{OuParams, RngStream};
pub use scheme::{NoiseToggles, RwaMode, SchemeKind, SchemeSpec, SignalAxis, SignalSpec};
pub use spin::{PauliCoeffs, SpinState};
