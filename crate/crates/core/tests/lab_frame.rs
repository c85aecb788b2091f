// Copyright 2026 The detune Authors
// SPDX-License-Identifier: Apache-2.0

//! Rotating-frame Hamiltonians checked against a direct lab-frame integration.

use detune_core::scheme::{hamiltonian_at, NoiseSample, SchemeKind, SchemeSpec, SignalAxis, SignalSpec};
use detune_core::spin::{evolve_step, fidelity, PauliCoeffs, SpinState};
use detune_core::RwaMode;
use num_complex::Complex64;

const OMEGA0: f64 = 1000.0;

/// Lab-frame Hamiltonian written out independently of the library.
fn lab_h(t: f64, spec: &SchemeSpec, sig: Option<&SignalSpec>, n: &NoiseSample) -> PauliCoeffs {
    let mut h = PauliCoeffs::new(0.0, 0.0, (OMEGA0 + n.b) / 2.0);
    let phase = match spec.kind {
        SchemeKind::Free => None,
        SchemeKind::Single | SchemeKind::Double => Some(OMEGA0 * t),
        SchemeKind::Tdd => Some(OMEGA0 * t + 2.0 * spec.omega2 / spec.omega1 * (spec.omega1 * t).sin()),
    };
    if let Some(p) = phase {
        h.hx += spec.omega1 * (1.0 + n.d1) * p.cos();
    }
    if spec.kind == SchemeKind::Double {
        h.hz += spec.omega2 * (1.0 + n.d2) * (spec.second_drive_freq * t).cos();
    }
    if let Some(s) = sig {
        let v = s.g * (s.omega_d * t).cos();
        match s.axis {
            SignalAxis::Z => h.hz += v,
            SignalAxis::X => h.hx += v,
        }
    }
    h
}

/// Maps a lab state into the frame rotating at OMEGA0: `psi_rot = exp(+i OMEGA0 t sigma_z / 2) psi_lab`.
fn to_rotating(s: &SpinState, t: f64) -> SpinState {
    let half = OMEGA0 * t / 2.0;
    SpinState {
        amp0: s.amp0 * Complex64::new(half.cos(), half.sin()),
        amp1: s.amp1 * Complex64::new(half.cos(), -half.sin()),
    }
}

fn integrate(
    duration: f64,
    dt: f64,
    init: SpinState,
    mut h_at: impl FnMut(f64) -> PauliCoeffs,
) -> Vec<(f64, SpinState)> {
    let steps = (duration / dt).round() as usize;
    let every = steps / 20;
    let mut s = init;
    let mut out = Vec::new();
    for k in 0..steps {
        s = evolve_step(&s, &h_at((k as f64 + 0.5) * dt), dt);
        if (k + 1) % every == 0 {
            out.push(((k + 1) as f64 * dt, s));
        }
    }
    out
}

fn compare(spec: SchemeSpec, sig: Option<SignalSpec>, noise: NoiseSample, init: SpinState) -> (f64, f64) {
    let (duration, dt) = (4.0, 2e-5);
    let lab = integrate(duration, dt, init, |t| lab_h(t, &spec, sig.as_ref(), &noise));
    let mut rwa = spec;
    rwa.rwa_mode = RwaMode::Rwa;
    let mut cr = spec;
    cr.omega0 = Some(OMEGA0);
    cr.rwa_mode = RwaMode::CounterRotating;
    let run = |s: SchemeSpec| integrate(duration, dt, init, |t| hamiltonian_at(t, &s, sig.as_ref(), &noise).unwrap());
    let (rwa_states, cr_states) = (run(rwa), run(cr));
    let mut worst_rwa = 0.0f64;
    let mut worst_cr = 0.0f64;
    for ((t, l), ((_, r), (_, c))) in lab.iter().zip(rwa_states.iter().zip(&cr_states)) {
        let l = to_rotating(l, *t);
        worst_rwa = worst_rwa.max(1.0 - fidelity(&l, r));
        worst_cr = worst_cr.max(1.0 - fidelity(&l, c));
    }
    (worst_rwa, worst_cr)
}

fn omega0_spec(kind: SchemeKind) -> SchemeSpec {
    let mut s = SchemeSpec::new(kind);
    s.omega0 = Some(OMEGA0);
    s
}

const NOISE: NoiseSample = NoiseSample { b: 0.4, d1: 0.01, d2: -0.02 };

#[test]
fn every_scheme_matches_the_lab_frame() {
    for kind in [SchemeKind::Free, SchemeKind::Single, SchemeKind::Double, SchemeKind::Tdd] {
        let noise = NoiseSample { d2: if kind == SchemeKind::Tdd { 0.0 } else { NOISE.d2 }, ..NOISE };
        for init in [SpinState::ground(), SpinState::plus_x(), SpinState::plus_y()] {
            let (rwa, cr) = compare(omega0_spec(kind), None, noise, init);
            // The counter-rotating image is exact up to step error; RWA leaves O(Omega1 / omega0).
            assert!(cr < 1e-6, "{kind:?} counter-rotating infidelity {cr}");
            assert!(rwa < 1e-3, "{kind:?} rwa infidelity {rwa}");
        }
    }
}

#[test]
fn signals_match_the_lab_frame() {
    let spec = omega0_spec(SchemeKind::Tdd);
    for (axis, omega_d) in [(SignalAxis::Z, 9.0), (SignalAxis::X, OMEGA0 - 1.0), (SignalAxis::X, OMEGA0 - 10.0)] {
        // A strong signal makes sign errors visible within the short window.
        let sig = SignalSpec { axis, g: 0.8, omega_d };
        for init in [SpinState::ground(), SpinState::plus_x()] {
            let (rwa, cr) = compare(spec, Some(sig), NoiseSample::default(), init);
            assert!(cr < 1e-6, "{axis:?} counter-rotating infidelity {cr}");
            assert!(rwa < 1e-3, "{axis:?} rwa infidelity {rwa}");
        }
    }
}
