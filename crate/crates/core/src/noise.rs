// Copyright 2026 The detune Authors
// SPDX-License-Identifier: Apache-2.0

//! Exact Ornstein-Uhlenbeck noise with reproducible per-trajectory streams.
//!
//! The process has zero mean and autocorrelation
//! `<x(t) x(t')> = (c * tau / 2) * exp(-|t - t'| / tau)`. Paths are generated
//! with the exact discrete update
//!
//! ```text
//! x(t + dt) = x(t) * exp(-dt / tau) + n * sigma * sqrt(1 - exp(-2 dt / tau))
//! ```
//!
//! which holds for any `dt`, so there is no small-step requirement.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};

/// Stationary parameters of an Ornstein-Uhlenbeck process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuParams {
    tau: f64,
    sigma: f64,
}

impl OuParams {
    /// Builds a process from its correlation time and stationary standard deviation.
    pub fn new(tau: f64, sigma: f64) -> Result<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(invalid("tau", "correlation time must be positive and finite"));
        }
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(invalid("sigma", "standard deviation must be non-negative and finite"));
        }
        Ok(Self { tau, sigma })
    }

    /// Builds a process from its diffusion constant `c` and correlation time.
    pub fn from_diffusion(c: f64, tau: f64) -> Result<Self> {
        if !(c >= 0.0) || !c.is_finite() {
            return Err(invalid("c", "diffusion constant must be non-negative and finite"));
        }
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(invalid("tau", "correlation time must be positive and finite"));
        }
        Self::new(tau, libm::sqrt(c * tau / 2.0))
    }

    /// A process that is identically zero.
    pub const fn zero() -> Self {
        Self { tau: 1.0, sigma: 0.0 }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Mean-reversion rate, `1 / tau`.
    pub fn gamma(&self) -> f64 {
        1.0 / self.tau
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn variance(&self) -> f64 {
        self.sigma * self.sigma
    }

    /// Diffusion constant `c = 2 sigma^2 / tau`.
    pub fn diffusion(&self) -> f64 {
        2.0 * self.sigma * self.sigma / self.tau
    }

    /// Decay and innovation factors of the exact update over `dt`.
    pub fn step_factors(&self, dt: f64) -> (f64, f64) {
        let decay = libm::exp(-dt / self.tau);
        let innovation = self.sigma * libm::sqrt(1.0 - libm::exp(-2.0 * dt / self.tau));
        (decay, innovation)
    }
}

/// Magnetic dephasing noise producing a Gaussian free decay with time `t2_star`.
///
/// The diffusion constant is `c = 4 / (t2_star^2 * tau)`, which gives
/// `sigma = sqrt(2) / t2_star`.
pub fn magnetic_noise_params(t2_star: f64, tau: f64) -> Result<OuParams> {
    if !(t2_star > 0.0) {
        return Err(invalid("t2_star", "pure dephasing time must be positive"));
    }
    if !(tau > 0.0) {
        return Err(invalid("tau_b", "correlation time must be positive"));
    }
    OuParams::from_diffusion(4.0 / (t2_star * t2_star * tau), tau)
}

/// Relative drive-amplitude noise whose stationary standard deviation is `delta_rel`.
pub fn drive_noise_params(delta_rel: f64, tau_drive: f64) -> Result<OuParams> {
    if !(delta_rel >= 0.0) {
        return Err(invalid("delta_omega", "relative amplitude error must be non-negative"));
    }
    if !(tau_drive > 0.0) {
        return Err(invalid("tau_omega", "correlation time must be positive"));
    }
    OuParams::new(tau_drive, delta_rel)
}

/// The independent noise channels of one trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    /// Magnetic field noise `B(t)`.
    Magnetic = 0,
    /// Relative amplitude noise of the first drive.
    Drive1 = 1,
    /// Relative amplitude noise of the second drive.
    Drive2 = 2,
    /// Reserved for per-trajectory auxiliary draws.
    Aux = 3,
}

const CHANNELS_PER_TRAJECTORY: u64 = 4;

impl Channel {
    /// Sub-stream index of this channel for trajectory `trajectory`.
    pub fn stream_index(self, trajectory: u64) -> u64 {
        trajectory.wrapping_mul(CHANNELS_PER_TRAJECTORY).wrapping_add(self as u64)
    }
}

/// A counter-based random stream addressed by `(seed, index)`.
///
/// Streams with different indices under the same seed are disjoint ChaCha
/// key streams, so they can be handed out to trajectory workers in any order.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    index: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Self { seed, index, rng }
    }

    /// The stream feeding noise channel `channel` of trajectory `trajectory`.
    pub fn for_channel(seed: u64, trajectory: u64, channel: Channel) -> Self {
        Self::new(seed, channel.stream_index(trajectory))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// Number of 32-bit words consumed so far.
    pub fn word_pos(&self) -> u128 {
        self.rng.get_word_pos()
    }

    /// One draw from N(0, 1).
    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// One draw from U[0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform index in `0..n`.
    #[inline]
    pub fn index_below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }
}

/// Advances an OU value by `dt` with the exact update.
#[inline]
pub fn ou_step(x: f64, dt: f64, params: &OuParams, rng: &mut RngStream) -> f64 {
    let (decay, innovation) = params.step_factors(dt);
    x * decay + rng.standard_normal() * innovation
}

/// Draws a starting value from the stationary law N(0, sigma^2).
#[inline]
pub fn ou_init(params: &OuParams, rng: &mut RngStream) -> f64 {
    rng.standard_normal() * params.sigma
}

/// An OU path on a fixed time grid, with the update factors precomputed.
#[derive(Debug, Clone)]
pub struct OuPath {
    decay: f64,
    innovation: f64,
    value: f64,
    rng: RngStream,
}

impl OuPath {
    /// Starts a stationary path sampled every `dt`.
    pub fn new(params: &OuParams, dt: f64, mut rng: RngStream) -> Self {
        let (decay, innovation) = params.step_factors(dt);
        let value = ou_init(params, &mut rng);
        Self { decay, innovation, value, rng }
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.value
    }

    /// Advances by one grid step and returns the new value.
    #[inline]
    pub fn advance(&mut self) -> f64 {
        self.value = self.value * self.decay + self.rng.standard_normal() * self.innovation;
        self.value
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn mean_var(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        (mean, var)
    }

    #[test]
    fn zero_step_is_identity() {
        let p = OuParams::new(25.0, 0.4714).unwrap();
        let mut rng = RngStream::new(7, 0);
        for &x in &[0.0, 1.5, -3.25, 1e6] {
            assert_eq!(ou_step(x, 0.0, &p, &mut rng), x);
        }
    }

    #[test]
    fn noiseless_mean_reversion() {
        let p = OuParams::new(25.0, 0.0).unwrap();
        let mut rng = RngStream::new(1, 2);
        let dt = 3.0;
        assert_eq!(ou_step(5.0, dt, &p, &mut rng), 5.0 * libm::exp(-dt / 25.0));
        assert_eq!(ou_init(&p, &mut rng), 0.0);
    }

    #[test]
    fn magnetic_params_from_pure_dephasing_time() {
        let p = magnetic_noise_params(3.0, 25.0).unwrap();
        assert!((p.diffusion() - 4.0 / 225.0).abs() < 1e-15);
        assert!((p.sigma() - libm::sqrt(2.0) / 3.0).abs() < 1e-15);
        assert!((p.sigma() - 0.47140).abs() < 1e-5);
        assert!(magnetic_noise_params(1e12, 25.0).unwrap().sigma() < 1e-11);
        assert!(magnetic_noise_params(0.0, 25.0).is_err());
        assert!(magnetic_noise_params(3.0, -1.0).is_err());
    }

    #[test]
    fn quasi_static_envelope_matches_gaussian_free_decay() {
        // exp(-sigma^2 t^2 / 2) == exp(-t^2 / T2*^2) == exp(-g^2 t^2 / 2) with g^2 = 2 / T2*^2
        let t2 = 3.0;
        let p = magnetic_noise_params(t2, 25.0).unwrap();
        let g2 = 2.0 / (t2 * t2);
        for &t in &[1.0, 3.0, 6.0] {
            let from_sigma = libm::exp(-p.variance() * t * t / 2.0);
            assert!((from_sigma - libm::exp(-t * t / (t2 * t2))).abs() < 1e-14);
            assert!((from_sigma - libm::exp(-g2 * t * t / 2.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn drive_params() {
        let p = drive_noise_params(0.005, 500.0).unwrap();
        assert_eq!(p.sigma(), 0.005);
        assert!((p.diffusion() - 1.0e-7).abs() < 1e-20);
        assert_eq!(drive_noise_params(0.0, 500.0).unwrap().sigma(), 0.0);
        assert!(drive_noise_params(0.005, 0.0).is_err());
        assert!(drive_noise_params(-0.1, 10.0).is_err());
    }

    #[test]
    fn diffusion_round_trip() {
        let p = OuParams::new(25.0, 0.3).unwrap();
        assert!((p.diffusion() * p.tau() / 2.0 - p.variance()).abs() < 1e-16);
        let q = OuParams::from_diffusion(p.diffusion(), p.tau()).unwrap();
        assert!((q.sigma() - p.sigma()).abs() < 1e-15);
        assert!((p.gamma() - 0.04).abs() < 1e-16);
    }

    #[test]
    fn stationary_init_statistics() {
        let p = OuParams::new(25.0, 0.7).unwrap();
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|i| ou_init(&p, &mut RngStream::new(11, i))).collect();
        let (mean, var) = mean_var(&xs);
        let sigma2 = p.variance();
        assert!(mean.abs() < 3.0 * libm::sqrt(sigma2 / n as f64), "mean {mean}");
        // SE of the sample variance of a Gaussian is sigma^2 sqrt(2 / (n - 1))
        let se_var = sigma2 * libm::sqrt(2.0 / (n as f64 - 1.0));
        assert!((var - sigma2).abs() < 3.0 * se_var, "var {var}");
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let mut a = RngStream::new(42, 3);
        let mut b = RngStream::new(42, 3);
        let mut c = RngStream::new(42, 4);
        let mut d = RngStream::new(43, 3);
        let xa: Vec<f64> = (0..64).map(|_| a.standard_normal()).collect();
        let xb: Vec<f64> = (0..64).map(|_| b.standard_normal()).collect();
        let xc: Vec<f64> = (0..64).map(|_| c.standard_normal()).collect();
        let xd: Vec<f64> = (0..64).map(|_| d.standard_normal()).collect();
        assert_eq!(xa, xb);
        assert_ne!(xa, xc);
        assert_ne!(xa, xd);
        assert!(a.word_pos() > 0);
        assert_eq!((a.seed(), a.index()), (42, 3));
    }

    #[test]
    fn channel_streams_do_not_collide() {
        let mut seen = alloc::collections::BTreeSet::new();
        for traj in 0..100 {
            for ch in [Channel::Magnetic, Channel::Drive1, Channel::Drive2, Channel::Aux] {
                assert!(seen.insert(ch.stream_index(traj)));
            }
        }
    }

    #[test]
    fn path_matches_free_function() {
        let p = OuParams::new(25.0, 0.47).unwrap();
        let dt = 0.01;
        let mut path = OuPath::new(&p, dt, RngStream::new(5, 9));
        let mut rng = RngStream::new(5, 9);
        let mut x = ou_init(&p, &mut rng);
        assert_eq!(path.value(), x);
        for _ in 0..1000 {
            x = ou_step(x, dt, &p, &mut rng);
            assert_eq!(path.advance(), x);
        }
    }

    #[test]
    fn rejects_bad_params() {
        assert!(OuParams::new(0.0, 1.0).is_err());
        assert!(OuParams::new(1.0, -1.0).is_err());
        assert!(OuParams::new(f64::NAN, 1.0).is_err());
        assert!(OuParams::from_diffusion(-1.0, 1.0).is_err());
    }
}
