mod common;

use common::{compare_with_oracle, oracle_instance};
use qcarnot::fock_oracle::{integrate_lindblad, FockState, JumpFrame, OracleOptions};
use qcarnot::ode::Tolerances;
use qcarnot::protocols::build_ste_protocol;
use qcarnot::BathSpec;

#[test]
fn twenty_random_strokes_match_the_fock_oracle() {
    let start = std::time::Instant::now();
    let mut worst = 0.0f64;
    for seed in 0..20 {
        let inst = oracle_instance(seed);
        let c = compare_with_oracle(&inst);
        assert!(
            c.initial_excitation > 0.0,
            "{}: state was not squeezed",
            inst.label
        );
        assert!(
            c.h_rel < 1e-4,
            "{}: h differs by {:.3e}",
            inst.label,
            c.h_rel
        );
        assert!(
            c.lc_rel < 1e-4,
            "{}: l/c differ by {:.3e}",
            inst.label,
            c.lc_rel
        );
        worst = worst.max(c.h_rel);
    }
    eprintln!(
        "worst relative h error {worst:.3e} in {:.1?}",
        start.elapsed()
    );
    assert!(start.elapsed().as_secs() < 600);
}

#[test]
fn frozen_jump_operators_are_detectably_wrong_on_ste_strokes() {
    // μ sweeps through a wide range on a fast STE, so freezing the jump
    // operators at t = 0 must leave a visible trace in h
    let bath = BathSpec::new(5.0, 0.15).unwrap();
    let (p, _) = build_ste_protocol(8.0, 6.0, 6.0, bath).unwrap();
    let rho0 = FockState::thermal(24, 8.0, 5.0 * 8.0 / 6.0).unwrap();
    let run = |frame| {
        let opts = OracleOptions {
            frame,
            samples: 21,
            tolerances: Tolerances {
                atol: 1e-9,
                rtol: 1e-7,
            },
            ..OracleOptions::default()
        };
        integrate_lindblad(&rho0, &p, Some(&bath), None, &opts).unwrap()
    };
    let inst = run(JumpFrame::Instantaneous);
    let frozen = run(JumpFrame::FrozenInitial);
    let gap = inst
        .vectors
        .iter()
        .zip(&frozen.vectors)
        .map(|(a, b)| (a.h - b.h).abs() / a.h)
        .fold(0.0, f64::max);
    eprintln!("frozen frame gap {gap:.3e}");
    assert!(gap > 1e-3, "frozen frame gap only {gap:.3e}");
}

#[test]
fn doubling_the_truncation_does_not_move_the_moments() {
    let inst = oracle_instance(3);
    let opts = OracleOptions {
        samples: 11,
        ..OracleOptions::default()
    };
    let a = integrate_lindblad(
        &inst.rho0,
        &inst.protocol,
        inst.bath.as_ref(),
        inst.gamma_d,
        &opts,
    )
    .unwrap();
    let wide = inst.rho0.embed(2 * inst.rho0.dimension());
    let b = integrate_lindblad(
        &wide,
        &inst.protocol,
        inst.bath.as_ref(),
        inst.gamma_d,
        &opts,
    )
    .unwrap();
    for (x, y) in a.vectors.iter().zip(&b.vectors) {
        assert!((x.h - y.h).abs() < 1e-8 * x.h);
    }
}
