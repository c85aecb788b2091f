// Copyright 2026 The detune Authors
// SPDX-License-Identifier: Apache-2.0

use detune_core::noise::{drive_noise_params, ou_step, OuParams, OuPath, RngStream};
use proptest::prelude::*;

fn long_path(params: &OuParams, dt: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut path = OuPath::new(params, dt, RngStream::new(seed, 0));
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(path.value());
        path.advance();
    }
    out
}

fn autocorrelation(xs: &[f64], lag: usize) -> f64 {
    let n = xs.len() - lag;
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64;
    let cov = (0..n).map(|i| (xs[i] - mean) * (xs[i + lag] - mean)).sum::<f64>() / n as f64;
    cov / var
}

#[test]
fn stationary_variance_and_autocorrelation() {
    // tau = 25 us sampled at 0.5 us: 1e6 steps cover 2e4 correlation times.
    let params = OuParams::new(25.0, 0.4714).unwrap();
    let dt = 0.5;
    let xs = long_path(&params, dt, 1_000_000, 11);
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    // Effective sample count is about n * dt / (2 tau) = 1e4.
    assert!(mean.abs() < 5.0 * params.sigma() / 100.0, "mean {mean}");
    assert!((var / params.variance() - 1.0).abs() < 0.05, "var {var}");
    for lag in [1usize, 10, 50, 100] {
        let expected = (-(lag as f64) * dt / params.tau()).exp();
        let got = autocorrelation(&xs, lag);
        assert!((got - expected).abs() < 0.03, "lag {lag}: {got} vs {expected}");
    }
}

#[test]
fn drive_amplitude_stays_within_five_sigma() {
    let params = drive_noise_params(0.005, 500.0).unwrap();
    let omega1 = 10.0;
    let xs = long_path(&params, 0.1, 1_000_000, 5);
    let sigma = params.sigma();
    let inside = xs.iter().filter(|&&d| (omega1 * (1.0 + d) - omega1).abs() <= 5.0 * sigma * omega1).count();
    assert!(inside as f64 / xs.len() as f64 >= 0.9999);
}

#[test]
fn halving_dt_keeps_the_stationary_law() {
    let params = OuParams::new(3.0, 1.5).unwrap();
    let coarse = long_path(&params, 0.2, 400_000, 21);
    let fine: Vec<f64> = long_path(&params, 0.1, 800_000, 22).into_iter().step_by(2).collect();
    for xs in [&coarse, &fine] {
        let var = xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64;
        assert!((var / params.variance() - 1.0).abs() < 0.05);
        let expected = (-0.2f64 / 3.0).exp();
        assert!((autocorrelation(xs, 1) - expected).abs() < 0.02);
    }
}

proptest! {
    #[test]
    fn step_factors_compose(tau in 0.1f64..1e3, sigma in 1e-4f64..10.0, a in 1e-4f64..50.0, b in 1e-4f64..50.0) {
        let p = OuParams::new(tau, sigma).unwrap();
        let (da, ia) = p.step_factors(a);
        let (db, ib) = p.step_factors(b);
        let (dab, iab) = p.step_factors(a + b);
        prop_assert!((da * db - dab).abs() <= 1e-12);
        // Variance added over a then b equals the variance added over a + b.
        let composed = ia * ia * db * db + ib * ib;
        prop_assert!((composed - iab * iab).abs() <= 1e-12 * sigma * sigma);
    }

    #[test]
    fn diffusion_round_trip(tau in 0.1f64..1e3, sigma in 1e-4f64..10.0) {
        let p = OuParams::new(tau, sigma).unwrap();
        let q = OuParams::from_diffusion(p.diffusion(), tau).unwrap();
        prop_assert!((q.sigma() / sigma - 1.0).abs() < 1e-12);
    }

    #[test]
    fn same_stream_same_path(seed in any::<u64>(), index in 0u64..1 << 40, x0 in -3.0f64..3.0) {
        let p = OuParams::new(25.0, 0.5).unwrap();
        let mut r1 = RngStream::new(seed, index);
        let mut r2 = RngStream::new(seed, index);
        let (mut a, mut b) = (x0, x0);
        for _ in 0..32 {
            a = ou_step(a, 0.01, &p, &mut r1);
            b = ou_step(b, 0.01, &p, &mut r2);
        }
        prop_assert_eq!(a.to_bits(), b.to_bits());
    }
}
