// Copyright 2026 The detune Authors
// SPDX-License-Identifier: Apache-2.0

use detune_core::scheme::{hamiltonian_at, phase_phi, u0_phase, NoiseSample, SchemeKind, SchemeSpec};
use detune_core::PauliCoeffs;
use proptest::prelude::*;

fn close(a: &PauliCoeffs, b: &PauliCoeffs) -> bool {
    (a.hx - b.hx).abs() < 1e-14 && (a.hy - b.hy).abs() < 1e-14 && (a.hz - b.hz).abs() < 1e-14
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn phase_equals_accumulated_detuning(t in 0.0f64..5000.0, w1 in 0.5f64..50.0, w2 in 0.0f64..5.0) {
        let phi = phase_phi(t, w1, w2).unwrap();
        let u0 = u0_phase(t, w1, w2).unwrap();
        prop_assert!((phi - u0).abs() <= 1e-12 * (1.0 + w2 * t), "{} vs {}", phi, u0);
    }
}

proptest! {
    #[test]
    fn instantaneous_frequency(t in 0.0f64..500.0, w0 in 100.0f64..2000.0) {
        let (w1, w2) = (10.0, 1.0);
        let total = |t: f64| w0 * t + phase_phi(t, w1, w2).unwrap();
        let h = 1e-5;
        let numeric = (total(t + h) - total(t - h)) / (2.0 * h);
        let exact = w0 + 2.0 * w2 * (w1 * t).cos();
        prop_assert!((numeric / exact - 1.0).abs() < 1e-6);
    }

    #[test]
    fn schemes_nest(t in 0.0f64..1000.0, b in -2.0f64..2.0, d1 in -0.05f64..0.05, d2 in -0.05f64..0.05) {
        let noise = NoiseSample { b, d1, d2 };
        let clean = NoiseSample { d2: 0.0, ..noise };
        let at = |kind, w1, w2| {
            let mut s = SchemeSpec::new(kind);
            s.omega1 = w1;
            s.omega2 = w2;
            let n = if kind == SchemeKind::Tdd { clean } else { noise };
            hamiltonian_at(t, &s, None, &n).unwrap()
        };
        let single = at(SchemeKind::Single, 10.0, 1.0);
        prop_assert!(close(&at(SchemeKind::Double, 10.0, 0.0), &single));
        prop_assert!(close(&at(SchemeKind::Tdd, 10.0, 0.0), &single));
        prop_assert!(close(&at(SchemeKind::Single, 0.0, 1.0), &at(SchemeKind::Free, 10.0, 1.0)));
    }

    #[test]
    fn tdd_drive_magnitude_is_constant(t in 0.0f64..1000.0, d1 in -0.05f64..0.05) {
        let s = SchemeSpec::new(SchemeKind::Tdd);
        let h = hamiltonian_at(t, &s, None, &NoiseSample { b: 0.0, d1, d2: 0.0 }).unwrap();
        prop_assert!((h.norm() - 5.0 * (1.0 + d1)).abs() < 1e-12);
    }
}
