//! Shared fixtures for the integration and acceptance tests.
#![allow(dead_code)]

use qcarnot::dynamics::{propagate, Generator, PropagationOptions, Sampling};
use qcarnot::fock_oracle::{
    integrate_lindblad, integrate_lindblad_converged, FockState, OracleOptions,
};
use qcarnot::protocols::{build_constant_mu_protocol, build_sta_protocol, build_ste_protocol};
use qcarnot::{BathSpec, FrequencyProtocol, ObservableVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const ORACLE_DIMENSION: usize = 60;
pub const ORACLE_SAMPLES: usize = 41;

#[derive(Debug, Clone)]
pub struct OracleInstance {
    pub label: String,
    pub protocol: FrequencyProtocol,
    pub bath: Option<BathSpec>,
    pub gamma_d: Option<f64>,
    pub rho0: FockState,
}

/// Deterministic random stroke: STE, constant-μ or constant-ω with a bath, or
/// an STA/constant-μ adiabat with dephasing (sometimes with a bath as well).
/// The initial state is a Gibbs state squeezed by a short frequency quench,
/// so l and c start non-zero.
pub fn oracle_instance(seed: u64) -> OracleInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let wi: f64 = rng.gen_range(5.0..10.0);
        let mut wf: f64 = rng.gen_range(5.0..10.0);
        if (wf - wi).abs() < 0.5 {
            wf = if wi > 7.5 { wi - 1.5 } else { wi + 1.5 };
        }
        let temp = rng.gen_range(4.0..8.0);
        let bath = BathSpec::new(temp, rng.gen_range(0.03..0.2)).unwrap();
        let kind = seed % 5;
        let built = match kind {
            0 => build_ste_protocol(wi, wf, rng.gen_range(6.0..10.0), bath)
                .map(|(p, _)| (p, Some(bath), None, "ste")),
            1 => {
                let mu = rng.gen_range(0.01..0.05) * (wf - wi).signum();
                build_constant_mu_protocol(wi, wf, mu)
                    .map(|p| (p, Some(bath), None, "constant-mu open"))
            }
            2 => FrequencyProtocol::constant(wi, rng.gen_range(3.0..8.0))
                .map(|p| (p, Some(bath), None, "constant open")),
            3 => build_sta_protocol(wi, wf, rng.gen_range(3.0..6.0)).map(|(p, _)| {
                (
                    p,
                    None,
                    Some(10f64.powf(rng.gen_range(-4.0..-2.0))),
                    "sta dephasing",
                )
            }),
            _ => {
                let mu = rng.gen_range(0.02..0.08) * (wf - wi).signum();
                let gd = 10f64.powf(rng.gen_range(-4.0..-2.0));
                build_constant_mu_protocol(wi, wf, mu)
                    .map(|p| (p, Some(bath), Some(gd), "constant-mu open dephasing"))
            }
        };
        let Ok((protocol, bath, gamma_d, name)) = built else {
            continue;
        };
        let t_prep = rng.gen_range(3.0..9.0);
        let quench =
            FrequencyProtocol::constant(wi * rng.gen_range(0.75..1.35), rng.gen_range(0.05..0.4))
                .unwrap();
        let thermal = FockState::thermal(ORACLE_DIMENSION, wi, t_prep).unwrap();
        let rho0 = integrate_lindblad(&thermal, &quench, None, None, &OracleOptions::default())
            .unwrap()
            .final_state;
        return OracleInstance {
            label: format!(
                "#{seed} {name}: w {wi:.3} -> {wf:.3}, T_bath {temp:.2}, T_prep {t_prep:.2}"
            ),
            protocol,
            bath,
            gamma_d,
            rho0,
        };
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OracleComparison {
    /// max |Δh|/h over the samples
    pub h_rel: f64,
    /// max |Δl|, |Δc| relative to h
    pub lc_rel: f64,
    pub dimension: usize,
    pub initial_excitation: f64,
}

pub fn compare_with_oracle(inst: &OracleInstance) -> OracleComparison {
    let opts = OracleOptions {
        samples: ORACLE_SAMPLES,
        ..OracleOptions::default()
    };
    let oracle = integrate_lindblad_converged(
        &inst.rho0,
        &inst.protocol,
        inst.bath.as_ref(),
        inst.gamma_d,
        &opts,
    )
    .unwrap();
    let v0 = oracle.vectors[0];
    let generator = match (inst.bath, inst.gamma_d) {
        (Some(b), None) => Generator::Open(b),
        (bath, Some(gamma_d)) => Generator::Dephasing { gamma_d, bath },
        (None, None) => Generator::Unitary,
    };
    let popts = PropagationOptions {
        sampling: Sampling::Uniform {
            samples: ORACLE_SAMPLES,
        },
        ..PropagationOptions::default()
    };
    let moments = propagate(&v0, &inst.protocol, &generator, &popts).unwrap();
    let mut h_rel = 0.0f64;
    let mut lc_rel = 0.0f64;
    for (a, b) in moments.vectors.iter().zip(&oracle.vectors) {
        h_rel = h_rel.max((a.h - b.h).abs() / b.h);
        lc_rel = lc_rel.max((a.l - b.l).abs().max((a.c - b.c).abs()) / b.h);
    }
    OracleComparison {
        h_rel,
        lc_rel,
        dimension: oracle.dimension,
        initial_excitation: v0.symplectic_excitation(inst.protocol.omega_initial()) - 0.5,
    }
}

pub fn excitation(v: &ObservableVector, omega: f64) -> f64 {
    v.h / omega - 0.5
}
