//! Sweeps over cycle time and the friction-action analysis.

use qcarnot::config::preset;
use qcarnot::cycle::LimitCycleOptions;
use qcarnot::thermo::{friction_action_fit, ideal_carnot_work, sweep, SweepAxis};

#[test]
fn rows_keep_input_order_and_failures() {
    let spec = preset("carnot-shortcut").unwrap();
    let values = [250.0, 7.0, 40.0];
    let rows = sweep(
        &spec,
        SweepAxis::CycleTime,
        &values,
        &LimitCycleOptions::default(),
        Some(2),
    )
    .unwrap();
    assert_eq!(rows.iter().map(|r| r.value).collect::<Vec<_>>(), values);
    assert!(rows[0].ledger.is_some() && rows[2].ledger.is_some());
    assert_eq!(rows[1].error_kind.as_deref(), Some("ConfigError"));
}

#[test]
fn carnot_cycle_turns_into_a_dissipator_once() {
    let spec = preset("carnot-shortcut").unwrap();
    let taus: Vec<f64> = (0..=10).map(|k| 15.0 + 4.5 * k as f64).collect();
    let rows = sweep(
        &spec,
        SweepAxis::CycleTime,
        &taus,
        &LimitCycleOptions::default(),
        None,
    )
    .unwrap();
    let eff: Vec<f64> = rows
        .iter()
        .map(|r| r.ledger.as_ref().unwrap().efficiency)
        .collect();
    let crossings = eff
        .windows(2)
        .filter(|w| w[0].signum() != w[1].signum())
        .count();
    assert_eq!(crossings, 1, "{eff:?}");
    assert!(eff[0] < 0.0 && *eff.last().unwrap() > 0.0);
}

#[test]
fn long_cycles_follow_the_friction_law() {
    let spec = preset("carnot-shortcut").unwrap();
    let taus = [100.0, 150.0, 200.0, 300.0, 400.0];
    let rows = sweep(
        &spec,
        SweepAxis::CycleTime,
        &taus,
        &LimitCycleOptions::default(),
        None,
    )
    .unwrap();
    let samples: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.value, r.ledger.as_ref().unwrap().total_work))
        .collect();
    let fit = friction_action_fit(&samples).unwrap();
    let ideal = ideal_carnot_work(spec.geometry.omega, spec.cold_bath, spec.hot_bath).unwrap();
    assert!(fit.friction_action > 0.0);
    assert!(
        (fit.w_infinity - ideal).abs() < 0.02 * ideal.abs(),
        "{} vs {ideal}",
        fit.w_infinity
    );
}

#[test]
fn compression_ratio_axis_rebuilds_the_geometry() {
    let spec = preset("carnot-shortcut").unwrap().with_cycle_time(80.0);
    let rows = sweep(
        &spec,
        SweepAxis::CompressionRatio,
        &[1.5, 2.0, 2.5],
        &LimitCycleOptions::default(),
        None,
    )
    .unwrap();
    assert_eq!(rows[0].error_kind.as_deref(), Some("ConfigError"));
    let w2 = rows[1].ledger.as_ref().unwrap().total_work;
    let w25 = rows[2].ledger.as_ref().unwrap().total_work;
    // a wider cycle does more work per cycle
    assert!(w25 < w2 && w2 < 0.0);
}
