use std::f64::consts::PI;

use nalgebra::Vector4;

use super::generators::{
    dephasing_generator, dissipative_generator, free_propagator, open_generator, unitary_generator,
};
use super::rates::name_rates;
use super::trajectory::{Provenance, Trajectory};
use crate::error::{Error, Result};
use crate::ode::{integrate, Settings, Tolerances};
use crate::protocol::{grid_time, FrequencyProtocol};
use crate::protocols::SteSolution;
use crate::state::{BathSpec, ObservableVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Generator {
    Unitary,
    Open(BathSpec),
    Dephasing {
        gamma_d: f64,
        bath: Option<BathSpec>,
    },
}

impl Generator {
    fn provenance(&self) -> Provenance {
        match self {
            Generator::Unitary => Provenance::Unitary,
            Generator::Open(_) => Provenance::Open,
            Generator::Dephasing { .. } => Provenance::Dephasing,
        }
    }

    fn is_unitary(&self) -> bool {
        matches!(
            self,
            Generator::Unitary
                | Generator::Dephasing {
                    gamma_d: 0.0,
                    bath: None
                }
        )
    }

    fn matrix(&self, omega: f64, omega_dot: f64) -> Result<nalgebra::Matrix4<f64>> {
        match self {
            Generator::Unitary => Ok(omega * unitary_generator(omega_dot / (omega * omega))),
            Generator::Open(bath) => open_generator(omega, omega_dot, bath),
            Generator::Dephasing { gamma_d, bath } => {
                let mut g = dephasing_generator(omega, omega_dot, *gamma_d);
                if let Some(b) = bath {
                    g += dissipative_generator(&name_rates(omega, omega_dot, b)?, omega);
                }
                Ok(g)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sampling {
    /// Only the initial and final states.
    Endpoints,
    /// `per_period` samples per period of 2ω_max, at least `min_samples`;
    /// the count is rounded up to 8k + 1 for the work quadrature.
    Dense {
        per_period: usize,
        min_samples: usize,
    },
    /// Exactly `samples` uniform points.
    Uniform { samples: usize },
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling::Dense {
            per_period: 64,
            min_samples: 2001,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationOptions {
    pub tolerances: Tolerances,
    pub sampling: Sampling,
    /// Allowed relative drift of (h² − l² − c²)/ω² on unitary strokes.
    pub casimir_tol: f64,
    /// Tolerance tightenings (×1/100 each) tried when the Casimir check fails.
    pub max_refinements: usize,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        Self {
            tolerances: Tolerances::default(),
            sampling: Sampling::default(),
            casimir_tol: 1e-8,
            max_refinements: 3,
        }
    }
}

/// Sample times for a stroke under the given sampling rule.
pub fn sample_times(protocol: &FrequencyProtocol, sampling: Sampling) -> Vec<f64> {
    let t = protocol.duration();
    if t == 0.0 {
        return vec![0.0];
    }
    match sampling {
        Sampling::Endpoints => vec![0.0, t],
        Sampling::Dense {
            per_period,
            min_samples,
        } => {
            let period = PI / protocol.max_omega();
            let want = ((t / period) * per_period as f64).ceil() as usize + 1;
            let k = (want.max(min_samples).max(9) - 1).div_ceil(8);
            let n = 8 * k + 1;
            (0..n).map(|i| grid_time(t, i, n)).collect()
        }
        Sampling::Uniform { samples } => {
            let n = samples.max(2);
            (0..n).map(|i| grid_time(t, i, n)).collect()
        }
    }
}

/// Propagates `v0` along `protocol` with the chosen generator.
///
/// Constant-μ unitary strokes use the exact propagator; everything else is
/// integrated with Dormand–Prince. On unitary strokes the Casimir invariant
/// is checked and the tolerances are tightened until it holds.
pub fn propagate(
    v0: &ObservableVector,
    protocol: &FrequencyProtocol,
    generator: &Generator,
    options: &PropagationOptions,
) -> Result<Trajectory> {
    if let Generator::Dephasing { gamma_d, .. } = generator {
        if !(*gamma_d >= 0.0 && gamma_d.is_finite()) {
            return Err(Error::domain("gamma_d", *gamma_d, "must be non-negative"));
        }
    }
    let times = sample_times(protocol, options.sampling);
    let mut omegas = Vec::with_capacity(times.len());
    let mut omega_dots = Vec::with_capacity(times.len());
    for &t in &times {
        let (w, wd) = protocol.eval(t);
        omegas.push(w);
        omega_dots.push(wd);
    }
    let provenance = generator.provenance();
    let build = |vectors: Vec<ObservableVector>| Trajectory {
        times: times.clone(),
        omegas: omegas.clone(),
        omega_dots: omega_dots.clone(),
        vectors,
        provenance,
    };

    if protocol.duration() == 0.0 {
        return Ok(build(vec![*v0]));
    }

    if generator.is_unitary() {
        if let Some((w0, mu)) = protocol.constant_mu_parameters() {
            let x0 = v0.to_vector();
            let vectors = times
                .iter()
                .map(|&t| {
                    free_propagator(w0, mu, t).map(|p| ObservableVector::from_vector(&(p * x0)))
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(build(vectors));
        }
    }

    let mut tolerances = options.tolerances;
    let mut attempt = 0;
    loop {
        let settings = Settings {
            tolerances,
            ..Settings::default()
        };
        let sol = integrate(
            |t, y: &Vector4<f64>| {
                let (w, wd) = protocol.eval(t);
                Ok(generator.matrix(w, wd)? * y)
            },
            0.0,
            protocol.duration(),
            v0.to_vector(),
            &times,
            &settings,
        )?;
        let traj = build(
            sol.samples
                .iter()
                .map(ObservableVector::from_vector)
                .collect(),
        );
        if !generator.is_unitary() {
            return Ok(traj);
        }
        let drift = traj.max_casimir_drift();
        if drift <= options.casimir_tol {
            return Ok(traj);
        }
        if attempt >= options.max_refinements {
            return Err(Error::Integration {
                t: protocol.duration(),
                reason: format!(
                    "Casimir drift {drift:.3e} exceeds {:.1e} after {attempt} tolerance refinements",
                    options.casimir_tol
                ),
            });
        }
        attempt += 1;
        tolerances = tolerances.tightened(1e-2);
    }
}

pub fn propagate_unitary(
    v0: &ObservableVector,
    protocol: &FrequencyProtocol,
) -> Result<Trajectory> {
    propagate(
        v0,
        protocol,
        &Generator::Unitary,
        &PropagationOptions::default(),
    )
}

pub fn propagate_open(
    v0: &ObservableVector,
    protocol: &FrequencyProtocol,
    bath: &BathSpec,
) -> Result<Trajectory> {
    propagate(
        v0,
        protocol,
        &Generator::Open(*bath),
        &PropagationOptions::default(),
    )
}

pub fn propagate_dephasing(
    v0: &ObservableVector,
    protocol: &FrequencyProtocol,
    gamma_d: f64,
    bath: Option<&BathSpec>,
) -> Result<Trajectory> {
    propagate(
        v0,
        protocol,
        &Generator::Dephasing {
            gamma_d,
            bath: bath.copied(),
        },
        &PropagationOptions::default(),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct BetaTrace {
    pub times: Vec<f64>,
    pub beta: Vec<f64>,
}

/// Integrates β̇ = k↓(e^β − 1) + k↑(e^{−β} − 1) along an STE stroke,
/// reporting β on the protocol grid.
pub fn propagate_ste_beta(beta0: f64, ste: &SteSolution, bath: &BathSpec) -> Result<BetaTrace> {
    if !(beta0 < 0.0) {
        return Err(Error::domain("beta0", beta0, "must be negative"));
    }
    let protocol = &ste.protocol;
    let settings = Settings {
        tolerances: Tolerances {
            atol: 1e-12,
            rtol: 1e-10,
        },
        ..Settings::default()
    };
    let sol = integrate(
        |t, b: &f64| {
            let (w, wd) = protocol.eval(t);
            Ok(name_rates(w, wd, bath)?.beta_dot(*b))
        },
        0.0,
        protocol.duration(),
        beta0,
        &ste.times,
        &settings,
    )?;
    Ok(BetaTrace {
        times: ste.times.clone(),
        beta: sol.samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::{
        build_constant_mu_protocol, build_sta_protocol, build_ste_protocol, sta_expectation_values,
    };
    use crate::units::thermal_observable_vector;
    use approx::assert_relative_eq;

    #[test]
    fn sample_counts_are_8k_plus_1() {
        let p = FrequencyProtocol::constant(10.0, 137.0).unwrap();
        let ts = sample_times(&p, Sampling::default());
        assert_eq!((ts.len() - 1) % 8, 0);
        assert!(ts.len() >= (137.0 * 10.0 / PI * 64.0) as usize);
        assert_eq!(*ts.last().unwrap(), 137.0);
        assert_eq!(sample_times(&p, Sampling::Endpoints), vec![0.0, 137.0]);
    }

    #[test]
    fn constant_frequency_thermal_state_is_stationary() {
        let p = FrequencyProtocol::constant(5.0, 3.0).unwrap();
        let v = thermal_observable_vector(5.0, 5.0).unwrap();
        let tr = propagate_unitary(&v, &p).unwrap();
        assert!(tr
            .vectors
            .iter()
            .all(|x| (x.h - v.h).abs() < 1e-14 && x.l.abs() < 1e-14 && x.c.abs() < 1e-14));
        tr.validate().unwrap();
    }

    #[test]
    fn sta_contract() {
        let (p, e) = build_sta_protocol(5.0, 10.0, 5.0).unwrap();
        let v0 = thermal_observable_vector(5.0, 5.0).unwrap();
        let tr = propagate_unitary(&v0, &p).unwrap();
        let end = tr.last();
        assert_relative_eq!(end.h, 2.0 * v0.h, max_relative = 1e-7);
        assert!(end.l.abs() < 1e-6 * end.h && end.c.abs() < 1e-6 * end.h);
        assert!(tr.max_casimir_drift() < 1e-8);
        for (i, &t) in tr.times.iter().enumerate().step_by(97) {
            let exact = sta_expectation_values(&e, 5.0, 5.0, t).unwrap();
            let got = tr.vectors[i];
            assert!(
                got.max_abs_diff(&exact) < 1e-8 * exact.h,
                "t = {t}: {got:?} vs {exact:?}"
            );
        }
    }

    #[test]
    fn constant_mu_integrated_matches_closed_form() {
        let p = build_constant_mu_protocol(5.25, 6.5625, 0.05).unwrap();
        let v0 = ObservableVector::new(6.0, 0.7, -0.4);
        let exact = propagate_unitary(&v0, &p).unwrap();
        let opts = PropagationOptions {
            tolerances: Tolerances {
                atol: 1e-13,
                rtol: 1e-12,
            },
            ..PropagationOptions::default()
        };
        let grid = crate::protocols::read_protocol_csv({
            let mut buf = Vec::new();
            crate::protocols::write_protocol_csv(&p, 4001, &mut buf).unwrap();
            std::io::Cursor::new(buf)
        })
        .unwrap();
        let num = propagate(&v0, &grid, &Generator::Unitary, &opts).unwrap();
        assert!(num.last().max_abs_diff(exact.last()) < 1e-10 * v0.h);
    }

    #[test]
    fn open_relaxation_reaches_bath() {
        let b = BathSpec::new(5.0, 0.05).unwrap();
        let p = FrequencyProtocol::constant(6.0, 200.0).unwrap();
        let tr = propagate_open(&ObservableVector::new(9.0, 1.0, -2.0), &p, &b).unwrap();
        let th = thermal_observable_vector(6.0, 5.0).unwrap();
        assert!(tr.last().max_abs_diff(&th) < 1e-6);
    }

    #[test]
    fn dephasing_conserves_h_at_constant_omega() {
        let p = FrequencyProtocol::constant(5.0, 10.0).unwrap();
        let v0 = ObservableVector::new(6.0, 1.0, 0.5);
        let tr = propagate_dephasing(&v0, &p, 0.5, None).unwrap();
        assert!(tr.vectors.iter().all(|v| (v.h - 6.0).abs() < 1e-10));
        assert!(tr.last().l.abs() < 1e-10 && tr.last().c.abs() < 1e-10);
    }

    #[test]
    fn zero_dephasing_equals_unitary() {
        let (p, _) = build_sta_protocol(8.0, 5.0, 5.0).unwrap();
        let v0 = thermal_observable_vector(8.0, 8.0).unwrap();
        let a = propagate_unitary(&v0, &p).unwrap();
        let b = propagate_dephasing(&v0, &p, 0.0, None).unwrap();
        for (x, y) in a.vectors.iter().zip(&b.vectors) {
            assert!(x.max_abs_diff(y) < 1e-10);
        }
    }

    #[test]
    fn beta_follows_the_target_polynomial() {
        let b = BathSpec::new(8.0, 0.05).unwrap();
        let (_, s) = build_ste_protocol(10.0, 8.0, 20.0, b).unwrap();
        let tr = propagate_ste_beta(-1.25, &s, &b).unwrap();
        for (t, beta) in tr.times.iter().zip(&tr.beta) {
            assert!((beta - s.target_beta(*t)).abs() < 1e-6, "t = {t}");
        }
        assert!((tr.beta.last().unwrap() + 1.0).abs() < 1e-6);
    }

    #[test]
    fn beta_is_stationary_at_constant_frequency() {
        let b = BathSpec::new(5.0, 0.05).unwrap();
        let (_, s) = build_ste_protocol(5.0, 5.0, 10.0, b).unwrap();
        let tr = propagate_ste_beta(-1.0, &s, &b).unwrap();
        assert!(tr.beta.iter().all(|x| (x + 1.0).abs() < 1e-12));
    }
}
