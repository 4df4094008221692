//! Endpoint contracts of the STE and STA builders.

use qcarnot::dynamics::{propagate_open, propagate_unitary};
use qcarnot::protocols::{
    build_sta_protocol, build_ste_nonthermal_protocol, build_ste_protocol, sta_expectation_values,
};
use qcarnot::thermo::stroke_work;
use qcarnot::units::thermal_observable_vector;
use qcarnot::{BathSpec, ObservableVector};

fn assert_thermal(v: &ObservableVector, omega: f64, temperature: f64, what: &str) {
    let th = thermal_observable_vector(omega, temperature).unwrap();
    assert!(
        (v.h - th.h).abs() < 1e-3 * th.h,
        "{what}: h {} vs {}",
        v.h,
        th.h
    );
    assert!(
        v.l.abs() < 1e-3 * th.h && v.c.abs() < 1e-3 * th.h,
        "{what}: l {} c {}",
        v.l,
        v.c
    );
}

const STE_CASES: [(f64, f64, f64); 4] = [
    (10.0, 8.0, 8.0),
    (5.0, 6.25, 5.0),
    (8.0, 6.5, 6.0),
    (6.0, 9.0, 4.5),
];

#[test]
fn ste_strokes_end_thermal() {
    for (wi, wf, t) in STE_CASES {
        let bath = BathSpec::new(t, 0.05).unwrap();
        // the 1.5x compression still carries l ~ 1e-3 h at t_f = 8
        for tf in [16.0, 32.0, 64.0] {
            let (p, sol) = build_ste_protocol(wi, wf, tf, bath).unwrap();
            assert!((p.omega(tf) - wf).abs() < 1e-3 * wf);
            let traj =
                propagate_open(&thermal_observable_vector(wi, t).unwrap(), &p, &bath).unwrap();
            assert_thermal(traj.last(), wf, t, &format!("{wi}->{wf} at T={t}, tf={tf}"));
            // β(t_f) = −ħω_f/k_BT
            assert!((sol.beta.last().unwrap() + wf / t).abs() < 1e-9);
        }
    }
}

#[test]
fn reference_ste_stroke_is_thermal_at_eight() {
    let bath = BathSpec::new(8.0, 0.05).unwrap();
    let (p, _) = build_ste_protocol(10.0, 8.0, 8.0, bath).unwrap();
    let traj = propagate_open(&thermal_observable_vector(10.0, 8.0).unwrap(), &p, &bath).unwrap();
    assert_thermal(traj.last(), 8.0, 8.0, "10->8 at T=8");
}

#[test]
fn nonthermal_ste_keeps_the_internal_temperature() {
    // corner states at 8 while the bath sits at 7.75
    let bath = BathSpec::new(7.75, 0.05).unwrap();
    for tf in [10.0, 40.0] {
        let (p, _) = build_ste_nonthermal_protocol(10.0, 8.0, tf, 8.0, bath).unwrap();
        let traj =
            propagate_open(&thermal_observable_vector(10.0, 8.0).unwrap(), &p, &bath).unwrap();
        assert_thermal(traj.last(), 8.0, 8.0, &format!("tf={tf}"));
    }
}

#[test]
fn ste_excess_work_falls_as_inverse_duration() {
    for (wi, wf, t) in STE_CASES {
        let bath = BathSpec::new(t, 0.05).unwrap();
        let free_energy = |w: f64| t * (2.0 * (w / (2.0 * t)).sinh()).ln();
        let quasi_static = free_energy(wf) - free_energy(wi);
        let pts: Vec<(f64, f64)> = [8.0, 16.0, 32.0, 64.0, 128.0]
            .iter()
            .map(|&tf| {
                let (p, _) = build_ste_protocol(wi, wf, tf, bath).unwrap();
                let traj =
                    propagate_open(&thermal_observable_vector(wi, t).unwrap(), &p, &bath).unwrap();
                let excess = stroke_work(&traj).unwrap() - quasi_static;
                assert!(excess > 0.0);
                (tf.ln(), excess.ln())
            })
            .collect();
        let n = pts.len() as f64;
        let (mx, my) = (
            pts.iter().map(|p| p.0).sum::<f64>() / n,
            pts.iter().map(|p| p.1).sum::<f64>() / n,
        );
        let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        assert!((slope + 1.0).abs() < 0.15, "{wi}->{wf}: slope {slope}");
    }
}

#[test]
fn sta_strokes_transfer_populations_exactly() {
    for (wi, wf, tf, t) in [
        (8.0, 5.0, 5.0, 8.0),
        (6.25, 10.0, 5.0, 5.0),
        (6.5625, 9.6875, 3.0, 5.25),
        (10.0, 5.0, 1.0, 8.0),
    ] {
        let (p, e) = build_sta_protocol(wi, wf, tf).unwrap();
        let v0 = thermal_observable_vector(wi, t).unwrap();
        let traj = propagate_unitary(&v0, &p).unwrap();
        let vf = traj.last();
        // adiabatic target: same occupation, energy scaled by ω_f/ω_i
        assert!(
            (vf.h - v0.h * wf / wi).abs() < 1e-8 * vf.h,
            "{wi}->{wf}: h {}",
            vf.h
        );
        assert!(
            vf.l.abs() < 1e-6 * vf.h && vf.c.abs() < 1e-6 * vf.h,
            "{wi}->{wf}: l {} c {}",
            vf.l,
            vf.c
        );
        assert!((vf.symplectic_excitation(wf) - v0.symplectic_excitation(wi)).abs() < 1e-10);
        // the ODE and the closed-form invariant solution agree along the way
        for (tt, v) in traj.times.iter().zip(&traj.vectors).step_by(97) {
            let exact = sta_expectation_values(&e, wi, t, *tt).unwrap();
            assert!(v.max_abs_diff(&exact) < 1e-7 * exact.h);
        }
    }
}
