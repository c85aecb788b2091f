// Copyright 2026 The detune Authors
// SPDX-License-Identifier: Apache-2.0

//! Coherence-time fits and analytic reference curves.
//!
//! Both decay models relax from 1 to a floor of 1/2:
//!
//! - gaussian: `(1 + exp(-t^2 / T2^2)) / 2`
//! - exponential: `(1 + exp(-t / T2)) / 2`
//!
//! `T2` is found by minimizing the SEM-weighted squared residual with a
//! logarithmic grid scan followed by golden-section refinement. The fit is
//! deterministic, including its bootstrap uncertainty.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::experiment::DecayCurve;
use crate::noise::RngStream;

const GRID_POINTS: usize = 60;
const REL_TOL: f64 = 1e-4;
const MIN_POINTS: usize = 10;
const BOOTSTRAP_SEED: u64 = 0x5eed_b007;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayModel {
    Gaussian,
    Exponential,
}

impl DecayModel {
    pub fn name(self) -> &'static str {
        match self {
            DecayModel::Gaussian => "gaussian",
            DecayModel::Exponential => "exponential",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "gaussian" => Some(DecayModel::Gaussian),
            "exponential" => Some(DecayModel::Exponential),
            _ => None,
        }
    }

    /// Coherence envelope, decaying from 1 to 0.
    #[inline]
    pub fn envelope(self, t: f64, t2: f64) -> f64 {
        match self {
            DecayModel::Gaussian => libm::exp(-(t / t2) * (t / t2)),
            DecayModel::Exponential => libm::exp(-t / t2),
        }
    }

    /// Fidelity with the given asymptote.
    #[inline]
    pub fn eval(self, t: f64, t2: f64, floor: f64) -> f64 {
        floor + (1.0 - floor) * self.envelope(t, t2)
    }
}

/// Free-evolution decay `(1 + exp(-t^2 / T2*^2)) / 2` under quasi-static Gaussian noise.
pub fn analytic_free_decay(t: f64, t2_star: f64) -> f64 {
    DecayModel::Gaussian.eval(t, t2_star, 0.5)
}

/// `(1 + exp(-t / T2)) / 2`
pub fn analytic_exponential_decay(t: f64, t2: f64) -> f64 {
    DecayModel::Exponential.eval(t, t2, 0.5)
}

/// Samples a model curve on `times` with zero standard error.
pub fn model_curve(model: DecayModel, t2: f64, times: &[f64]) -> DecayCurve {
    DecayCurve {
        times: times.to_vec(),
        mean: times.iter().map(|&t| model.eval(t, t2, 0.5)).collect(),
        sem: alloc::vec![0.0; times.len()],
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Fit the asymptote instead of fixing it at 1/2.
    pub fit_floor: bool,
    /// Residual-bootstrap resamples for the uncertainty; 0 disables it.
    pub bootstrap: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { fit_floor: false, bootstrap: 100 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub model: DecayModel,
    /// Fitted coherence time, us.
    pub t2: f64,
    /// Asymptote; 1/2 unless fitted.
    pub floor: f64,
    /// RMS of the unweighted residuals over the fitted points.
    pub residual_rms: f64,
    /// Bootstrap standard deviation of `t2`, us.
    pub fit_uncertainty: f64,
}

/// Points entering the objective, with their weights.
struct FitData {
    t: Vec<f64>,
    y: Vec<f64>,
    w: Vec<f64>,
    sem: Vec<f64>,
    t_min: f64,
    t_max: f64,
}

impl FitData {
    fn new(curve: &DecayCurve) -> Result<Self> {
        let n = curve.len();
        if n < MIN_POINTS || curve.mean.len() != n || curve.sem.len() != n {
            return Err(Error::Unfittable(format!("need at least {MIN_POINTS} consistent points, got {n}")));
        }
        if curve.mean.iter().chain(&curve.times).any(|x| !x.is_finite()) {
            return Err(Error::Unfittable("non-finite values".into()));
        }
        if (curve.mean[0] - 1.0).abs() > 0.05 {
            return Err(Error::Unfittable(format!("curve starts at {} instead of 1", curve.mean[0])));
        }
        if curve.mean.iter().all(|&m| m >= 0.99) {
            return Err(Error::Unfittable("no decay: every point is at or above 0.99".into()));
        }
        check_monotone(curve)?;

        let weighted = curve.sem.iter().any(|&s| s > 0.0);
        let (mut t, mut y, mut w, mut sem) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for i in 0..n {
            let s = curve.sem[i];
            if weighted && !(s > 0.0) {
                continue;
            }
            t.push(curve.times[i]);
            y.push(curve.mean[i]);
            w.push(if weighted { 1.0 / (s * s) } else { 1.0 });
            sem.push(s);
        }
        let t_min = curve.times.iter().copied().filter(|&x| x > 0.0).fold(f64::INFINITY, f64::min);
        let t_max = curve.times.iter().copied().fold(0.0, f64::max);
        if !(t_min.is_finite() && t_max > 0.0) {
            return Err(Error::Unfittable("time axis has no positive samples".into()));
        }
        Ok(Self { t, y, w, sem, t_min, t_max })
    }
}

/// Rejects curves that come back up by more than half of their drop, beyond noise.
fn check_monotone(curve: &DecayCurve) -> Result<()> {
    // Revivals count against the full depth of the curve, so ripples near
    // the start do not disqualify an otherwise decaying curve.
    let depth = 1.0 - curve.mean.iter().copied().fold(f64::INFINITY, f64::min);
    let mut min = curve.mean[0];
    let mut min_sem = curve.sem[0];
    for i in 1..curve.len() {
        let (m, s) = (curve.mean[i], curve.sem[i]);
        if m < min {
            min = m;
            min_sem = s;
            continue;
        }
        let rise = m - min;
        let noise = 5.0 * libm::sqrt(s * s + min_sem * min_sem);
        if rise > 0.5 * depth && rise > noise {
            return Err(Error::Unfittable(format!(
                "not a decay: rises from {min:.4} back to {m:.4} at t = {}",
                curve.times[i]
            )));
        }
    }
    Ok(())
}

/// Best floor for fixed `t2`, clamped to `[0, 1]`.
fn best_floor(model: DecayModel, t2: f64, t: &[f64], y: &[f64], w: &[f64]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..t.len() {
        let e = model.envelope(t[i], t2);
        num += w[i] * (y[i] - e) * (1.0 - e);
        den += w[i] * (1.0 - e) * (1.0 - e);
    }
    if den > 0.0 {
        (num / den).clamp(0.0, 1.0)
    } else {
        0.5
    }
}

fn objective(model: DecayModel, t2: f64, fit_floor: bool, t: &[f64], y: &[f64], w: &[f64]) -> (f64, f64) {
    let floor = if fit_floor { best_floor(model, t2, t, y, w) } else { 0.5 };
    let chi2 = t
        .iter()
        .zip(y)
        .zip(w)
        .map(|((&ti, &yi), &wi)| {
            let r = yi - model.eval(ti, t2, floor);
            wi * r * r
        })
        .sum();
    (chi2, floor)
}

/// Grid scan in log(T2) over `[lo, hi]`, then golden-section refinement.
fn minimize_t2(model: DecayModel, fit_floor: bool, lo: f64, hi: f64, t: &[f64], y: &[f64], w: &[f64]) -> f64 {
    let (ln_lo, ln_hi) = (libm::log(lo), libm::log(hi));
    let step = (ln_hi - ln_lo) / (GRID_POINTS - 1) as f64;
    let f = |ln_t2: f64| objective(model, libm::exp(ln_t2), fit_floor, t, y, w).0;

    let mut best = 0;
    let mut best_val = f64::INFINITY;
    for i in 0..GRID_POINTS {
        let v = f(ln_lo + step * i as f64);
        if v < best_val {
            best_val = v;
            best = i;
        }
    }
    let mut a = ln_lo + step * best.saturating_sub(1) as f64;
    let mut b = ln_lo + step * (best + 1).min(GRID_POINTS - 1) as f64;

    let inv_phi = (libm::sqrt(5.0) - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    // width in ln(T2) translates to relative width in T2
    while b - a > REL_TOL {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    libm::exp((a + b) / 2.0)
}

/// Fits `model` with default options (fixed floor, 100 bootstrap resamples).
pub fn fit_decay(curve: &DecayCurve, model: DecayModel) -> Result<FitResult> {
    fit_decay_with(curve, model, &FitOptions::default())
}

pub fn fit_decay_with(curve: &DecayCurve, model: DecayModel, opts: &FitOptions) -> Result<FitResult> {
    let data = FitData::new(curve)?;
    let lo = data.t_min;
    let hi = 100.0 * data.t_max;
    let t2 = minimize_t2(model, opts.fit_floor, lo, hi, &data.t, &data.y, &data.w);
    let (_, floor) = objective(model, t2, opts.fit_floor, &data.t, &data.y, &data.w);

    let fitted: Vec<f64> = data.t.iter().map(|&t| model.eval(t, t2, floor)).collect();
    let residuals: Vec<f64> = data.y.iter().zip(&fitted).map(|(y, m)| y - m).collect();
    let residual_rms = libm::sqrt(residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64);

    let fit_uncertainty =
        if opts.bootstrap > 1 { bootstrap(model, opts, &data, &fitted, &residuals, lo, hi) } else { 0.0 };

    Ok(FitResult { model, t2, floor, residual_rms, fit_uncertainty })
}

/// Standard deviation of `t2` over residual-bootstrap refits.
///
/// Residuals are resampled in units of their standard error, so each point
/// keeps its own noise scale.
fn bootstrap(
    model: DecayModel,
    opts: &FitOptions,
    data: &FitData,
    fitted: &[f64],
    residuals: &[f64],
    lo: f64,
    hi: f64,
) -> f64 {
    let n = data.t.len();
    let scaled: Vec<f64> = residuals.iter().zip(&data.sem).map(|(&r, &s)| if s > 0.0 { r / s } else { r }).collect();
    let mut rng = RngStream::new(BOOTSTRAP_SEED, 0);
    let mut y = alloc::vec![0.0; n];
    let mut samples = Vec::with_capacity(opts.bootstrap);
    for _ in 0..opts.bootstrap {
        for i in 0..n {
            let z = scaled[rng.index_below(n)];
            let s = data.sem[i];
            y[i] = fitted[i] + if s > 0.0 { z * s } else { z };
        }
        samples.push(libm::log(minimize_t2(model, opts.fit_floor, lo, hi, &data.t, &y, &data.w)));
    }
    let m = samples.iter().sum::<f64>() / samples.len() as f64;
    let var = samples.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (samples.len() - 1) as f64;
    // spread in ln(T2) converted to an absolute spread around the best fit
    libm::sqrt(var) * libm::exp(m)
}

/// Fits both models and keeps the one with the lower residual RMS; within 1% the exponential wins.
pub fn model_select(curve: &DecayCurve) -> Result<DecayModel> {
    let opts = FitOptions { bootstrap: 0, ..FitOptions::default() };
    let g = fit_decay_with(curve, DecayModel::Gaussian, &opts)?;
    let e = fit_decay_with(curve, DecayModel::Exponential, &opts)?;
    Ok(if g.residual_rms < 0.99 * e.residual_rms { DecayModel::Gaussian } else { DecayModel::Exponential })
}

/// [`model_select`] followed by a full fit of the selected model.
pub fn fit_auto(curve: &DecayCurve, opts: &FitOptions) -> Result<FitResult> {
    let model = model_select(curve)?;
    fit_decay_with(curve, model, opts)
}
