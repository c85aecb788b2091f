// Copyright 2026 The detune Authors
// SPDX-License-Identifier: Apache-2.0

//! Two-level states and their exact propagation under piecewise-constant
//! Hamiltonians.
//!
//! Pauli matrices act on `(amp0, amp1)` in the standard representation, so
//! `sigma_z |0> = |0>` and `sigma_z |1> = -|1>`.

use num_complex::Complex64;

const FRAC_1_SQRT_2: f64 = core::f64::consts::FRAC_1_SQRT_2;

/// A normalized two-component state vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinState {
    pub amp0: Complex64,
    pub amp1: Complex64,
}

impl SpinState {
    /// Normalizes the given amplitudes. Returns `None` for the zero vector.
    pub fn new(amp0: Complex64, amp1: Complex64) -> Option<Self> {
        let norm = libm::sqrt(amp0.norm_sqr() + amp1.norm_sqr());
        if !(norm > 0.0) || !norm.is_finite() {
            return None;
        }
        Some(Self { amp0: amp0 / norm, amp1: amp1 / norm })
    }

    pub const fn ground() -> Self {
        Self { amp0: Complex64::new(1.0, 0.0), amp1: Complex64::new(0.0, 0.0) }
    }

    pub const fn excited() -> Self {
        Self { amp0: Complex64::new(0.0, 0.0), amp1: Complex64::new(1.0, 0.0) }
    }

    /// `(|0> + |1>) / sqrt(2)`
    pub const fn plus_x() -> Self {
        Self { amp0: Complex64::new(FRAC_1_SQRT_2, 0.0), amp1: Complex64::new(FRAC_1_SQRT_2, 0.0) }
    }

    /// `(|0> - |1>) / sqrt(2)`
    pub const fn minus_x() -> Self {
        Self { amp0: Complex64::new(FRAC_1_SQRT_2, 0.0), amp1: Complex64::new(-FRAC_1_SQRT_2, 0.0) }
    }

    /// `(|0> + i|1>) / sqrt(2)`
    pub const fn plus_y() -> Self {
        Self { amp0: Complex64::new(FRAC_1_SQRT_2, 0.0), amp1: Complex64::new(0.0, FRAC_1_SQRT_2) }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp0.norm_sqr() + self.amp1.norm_sqr()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &SpinState) -> Complex64 {
        self.amp0.conj() * other.amp0 + self.amp1.conj() * other.amp1
    }

    /// Bloch vector `(<sigma_x>, <sigma_y>, <sigma_z>)`.
    pub fn bloch(&self) -> [f64; 3] {
        let coherence = self.amp0.conj() * self.amp1;
        [2.0 * coherence.re, 2.0 * coherence.im, self.amp0.norm_sqr() - self.amp1.norm_sqr()]
    }

    /// Propagates by `dt` under the constant Hamiltonian `h`.
    #[inline]
    pub fn evolve(&self, h: &PauliCoeffs, dt: f64) -> SpinState {
        evolve_step(self, h, dt)
    }
}

/// Real coefficients of the traceless Hamiltonian `hx sx + hy sy + hz sz`, in rad/us.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PauliCoeffs {
    pub hx: f64,
    pub hy: f64,
    pub hz: f64,
}

impl PauliCoeffs {
    pub const ZERO: PauliCoeffs = PauliCoeffs::new(0.0, 0.0, 0.0);

    pub const fn new(hx: f64, hy: f64, hz: f64) -> Self {
        Self { hx, hy, hz }
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.hx * self.hx + self.hy * self.hy + self.hz * self.hz)
    }

    pub fn is_finite(&self) -> bool {
        self.hx.is_finite() && self.hy.is_finite() && self.hz.is_finite()
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self::new(k * self.hx, k * self.hy, k * self.hz)
    }
}

impl core::ops::Add for PauliCoeffs {
    type Output = PauliCoeffs;

    fn add(self, rhs: PauliCoeffs) -> PauliCoeffs {
        PauliCoeffs::new(self.hx + rhs.hx, self.hy + rhs.hy, self.hz + rhs.hz)
    }
}

/// Applies `exp(-i h.sigma dt) = cos(theta) I - i sin(theta) n.sigma`, theta = |h| dt.
#[inline]
pub fn evolve_step(s: &SpinState, h: &PauliCoeffs, dt: f64) -> SpinState {
    let norm = h.norm();
    let theta = norm * dt;
    if theta == 0.0 {
        return *s;
    }
    let (sin, cos) = libm::sincos(theta);
    let k = sin / norm;
    let (sx, sy, sz) = (k * h.hx, k * h.hy, k * h.hz);

    // U = [[c - i sz, -sy - i sx], [sy - i sx, c + i sz]]
    let u00 = Complex64::new(cos, -sz);
    let u01 = Complex64::new(-sy, -sx);
    let u10 = Complex64::new(sy, -sx);
    let u11 = Complex64::new(cos, sz);
    SpinState { amp0: u00 * s.amp0 + u01 * s.amp1, amp1: u10 * s.amp0 + u11 * s.amp1 }
}

/// `|<a|b>|^2`
#[inline]
pub fn fidelity(a: &SpinState, b: &SpinState) -> f64 {
    a.inner(b).norm_sqr()
}
