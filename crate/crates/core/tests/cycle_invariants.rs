//! Conservation laws and qualitative properties of converged limit cycles.

use qcarnot::config::preset;
use qcarnot::cycle::{run_to_limit_cycle, CycleKind, LimitCycleOptions};
use qcarnot::thermo::{coherence, evaluate_cycle, OperationalMode};
use qcarnot::ObservableVector;

#[test]
fn conservation_laws_hold_for_every_preset() {
    let opts = LimitCycleOptions::default();
    for name in [
        "carnot-shortcut",
        "endo-shortcut",
        "endo-global",
        "table1-literal",
    ] {
        for tau in [17.5, 40.0, 250.0] {
            let spec = preset(name).unwrap().with_cycle_time(tau);
            let (res, l) = evaluate_cycle(&spec, &opts).unwrap();
            let what = format!("{name} at {tau}");
            assert!(res.converged, "{what}");
            assert!(
                l.periodicity_residual < 1e-9,
                "{what}: periodicity {}",
                l.periodicity_residual
            );
            assert!(
                l.first_law_residual < 1e-8,
                "{what}: first law {}",
                l.first_law_residual
            );
            for r in l.stroke_first_law_residual {
                assert!(r < 1e-8, "{what}: stroke first law {r}");
            }
            assert!(
                l.adiabat_casimir_drift < 1e-8,
                "{what}: Casimir {}",
                l.adiabat_casimir_drift
            );
            assert!(
                l.bath_entropy_production >= 0.0,
                "{what}: entropy {}",
                l.bath_entropy_production
            );
            if l.operational_mode == OperationalMode::Engine {
                assert!(
                    l.efficiency > 0.0 && l.efficiency < l.carnot_efficiency,
                    "{what}: eta {}",
                    l.efficiency
                );
            }
            // the adiabats conserve the von Neumann entropy
            assert!(
                (l.corner_entropy[1] - l.corner_entropy[2]).abs() < 1e-8,
                "{what}"
            );
            assert!(
                (l.corner_entropy[3] - l.corner_entropy[0]).abs() < 1e-8,
                "{what}"
            );
        }
    }
}

#[test]
fn long_shortcut_cycles_have_coherence_free_corners() {
    let (_, l) = evaluate_cycle(
        &preset("carnot-shortcut").unwrap(),
        &LimitCycleOptions::default(),
    )
    .unwrap();
    for r in l.corner_relative_coherence {
        assert!(r < 1e-6, "{r}");
    }
}

#[test]
fn fast_global_cycle_keeps_coherence_and_produces_power() {
    let spec = preset("endo-global").unwrap().with_cycle_time(8.0);
    let (res, l) = evaluate_cycle(&spec, &LimitCycleOptions::default()).unwrap();
    assert!(l.power > 0.0);
    assert!(l.min_coherence > 0.0);
    for s in &res.strokes {
        for (v, w) in s.trajectory.vectors.iter().zip(&s.trajectory.omegas) {
            assert!(coherence(v, *w) > 0.0);
        }
    }
}

#[test]
fn limit_cycle_does_not_depend_on_the_seed() {
    let spec = preset("endo-global").unwrap().with_cycle_time(17.5);
    let opts = LimitCycleOptions::default();
    let a = run_to_limit_cycle(&spec, &spec.initial_state().unwrap(), &opts).unwrap();
    // squeezed and hot, far from the Gibbs corner
    let seed = ObservableVector::new(30.0, 12.0, -9.0);
    let b = run_to_limit_cycle(&spec, &seed, &opts).unwrap();
    for (x, y) in a.corners.iter().zip(&b.corners) {
        assert!(x.max_abs_diff(y) < 1e-7 * x.h, "{x:?} vs {y:?}");
    }
}

#[test]
fn dephasing_lowers_the_fast_global_cycle() {
    let opts = LimitCycleOptions::default();
    let base = preset("endo-global").unwrap().with_cycle_time(8.0);
    let mut last = f64::INFINITY;
    for gd in [0.0, 1e-3, 1e-2] {
        let spec = base.with_dephasing(gd);
        assert_eq!(spec.kind, CycleKind::EndoGlobal);
        let (_, l) = evaluate_cycle(&spec, &opts).unwrap();
        assert!(
            l.efficiency <= last + 1e-12,
            "gamma_d {gd}: {} after {last}",
            l.efficiency
        );
        last = l.efficiency;
    }
}

#[test]
fn export_writes_strokes_and_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = preset("carnot-shortcut").unwrap().with_cycle_time(40.0);
    let (res, _) = evaluate_cycle(&spec, &LimitCycleOptions::default()).unwrap();
    let files = res.export(tmp.path()).unwrap();
    assert_eq!(files.len(), 5);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["converged"], true);
    assert_eq!(summary["strokes"].as_array().unwrap().len(), 4);
    let first = std::fs::read_to_string(&files[0]).unwrap();
    assert!(first.starts_with("t,omega,h,l,c,coherence\n"));
}
