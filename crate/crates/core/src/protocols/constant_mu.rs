//! Drives with a constant adiabatic parameter μ = ω̇/ω².

use crate::error::{Error, Result};
use crate::protocol::FrequencyProtocol;
use crate::units::check_positive;

/// ω(t) = ω_i/(1 − μω_i t) on [0, τ] with τ = (ω_f − ω_i)/(μω_fω_i).
///
/// μ must carry the sign of ω_f − ω_i; a zero frequency change gives an
/// empty (zero-duration) stroke.
pub fn build_constant_mu_protocol(
    omega_initial: f64,
    omega_final: f64,
    mu: f64,
) -> Result<FrequencyProtocol> {
    check_positive("omega_initial", omega_initial)?;
    check_positive("omega_final", omega_final)?;
    if omega_initial == omega_final {
        return FrequencyProtocol::constant(omega_initial, 0.0);
    }
    if !(mu != 0.0 && mu.is_finite()) {
        return Err(Error::domain("mu", mu, "must be non-zero and finite"));
    }
    if !(mu.abs() < 2.0) {
        return Err(Error::domain("mu", mu, "|mu| must be below 2"));
    }
    let duration = stroke_duration(omega_initial, omega_final, mu);
    if !(duration > 0.0) {
        return Err(Error::domain(
            "mu",
            mu,
            "sign must match the frequency change; otherwise the pole 1 - mu*omega_i*t = 0 lies on the path",
        ));
    }
    Ok(FrequencyProtocol::constant_mu(
        omega_initial,
        omega_final,
        mu,
        duration,
    ))
}

/// τ = (ω_f − ω_i)/(μω_fω_i)
pub fn stroke_duration(omega_initial: f64, omega_final: f64, mu: f64) -> f64 {
    (omega_final - omega_initial) / (mu * omega_final * omega_initial)
}

/// |μ| for which a closed chain of constant-μ legs takes `total_time`:
/// Σ|1/ω_i − 1/ω_f| / total_time.
pub fn mu_for_total_time(legs: &[(f64, f64)], total_time: f64) -> f64 {
    legs.iter()
        .map(|(a, b)| (1.0 / a - 1.0 / b).abs())
        .sum::<f64>()
        / total_time
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::to_atomic_time;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn equal_frequencies_give_an_empty_stroke() {
        let p = build_constant_mu_protocol(7.0, 7.0, 0.1).unwrap();
        assert_eq!(p.duration(), 0.0);
    }

    #[test]
    fn wrong_sign_is_rejected() {
        assert!(build_constant_mu_protocol(9.6875, 7.75, 0.02).is_err());
        assert!(build_constant_mu_protocol(5.0, 6.0, -0.02).is_err());
        assert!(build_constant_mu_protocol(5.0, 6.0, 0.0).is_err());
    }

    #[test]
    fn endo_global_expansion_leg() {
        // |μ| chosen so that this single leg lasts 2 reporting units
        let tau = to_atomic_time(2.0);
        let mu = -mu_for_total_time(&[(9.6875, 7.75)], tau);
        let p = build_constant_mu_protocol(9.6875, 7.75, mu).unwrap();
        assert_relative_eq!(p.duration(), tau, max_relative = 1e-14);
        assert_eq!(p.omega(p.duration()), 7.75);
        assert_eq!(p.omega(0.0), 9.6875);
        assert!(p.check_consistency(1e-6).is_ok());
    }

    #[test]
    fn halving_mu_doubles_duration() {
        let a = build_constant_mu_protocol(5.25, 6.5625, 0.03).unwrap();
        let b = build_constant_mu_protocol(5.25, 6.5625, 0.015).unwrap();
        assert_relative_eq!(b.duration(), 2.0 * a.duration(), max_relative = 1e-14);
    }

    proptest! {
        #[test]
        fn mu_is_constant(wi in 1.0f64..20.0, wf in 1.0f64..20.0, m in 1e-3f64..1.5, s in proptest::collection::vec(0.0f64..1.0, 100)) {
            prop_assume!((wi - wf).abs() > 1e-3);
            let mu = m * (wf - wi).signum();
            let p = build_constant_mu_protocol(wi, wf, mu).unwrap();
            for x in s {
                let t = x * p.duration();
                prop_assert!((p.mu(t) - mu).abs() <= 1e-12 * mu.abs());
                // analytic derivative of the closed form
                let w = wi / (1.0 - mu * wi * t);
                prop_assert!((p.omega_dot(t) - mu * w * w).abs() <= 1e-12 * (mu * w * w).abs());
            }
            prop_assert!((p.omega(p.duration()) - wf).abs() == 0.0);
        }
    }
}
