//! Atomic units and equilibrium helpers.
//!
//! Everything in the crate works with ħ = k_B = 1. The oscillator mass only
//! rescales intermediate length-like quantities (the Ermakov scaling and the
//! Fock-space quadratures); moment dynamics do not depend on it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::ObservableVector;

pub const HBAR: f64 = 1.0;
pub const K_B: f64 = 1.0;

/// Reference frequency that fixes the reporting unit of cycle times.
pub const OMEGA_MIN_REFERENCE: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    mass: f64,
}

impl UnitSystem {
    pub fn new(mass: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::domain("mass", mass, "must be positive and finite"));
        }
        Ok(Self { mass })
    }

    pub fn atomic() -> Self {
        Self { mass: 1.0 }
    }

    pub fn hbar(&self) -> f64 {
        HBAR
    }

    pub fn k_boltzmann(&self) -> f64 {
        K_B
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self::atomic()
    }
}

/// One reporting unit of cycle time, 2π/ω_min, in atomic time.
pub fn cycle_time_unit() -> f64 {
    2.0 * std::f64::consts::PI / OMEGA_MIN_REFERENCE
}

pub fn to_atomic_time(tau_units: f64) -> f64 {
    tau_units * cycle_time_unit()
}

pub fn from_atomic_time(t: f64) -> f64 {
    t / cycle_time_unit()
}

pub(crate) fn check_positive(quantity: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(
            quantity,
            value,
            "must be positive and finite",
        ))
    }
}

/// Bose occupation 1/(e^x − 1) for x = ħω/k_BT > 0.
pub(crate) fn bose(x: f64) -> f64 {
    1.0 / x.exp_m1()
}

/// Bose–Einstein occupation n = 1/(e^{ħω/k_BT} − 1).
pub fn thermal_population(omega: f64, temperature: f64) -> Result<f64> {
    check_positive("omega", omega)?;
    check_positive("temperature", temperature)?;
    Ok(bose(HBAR * omega / (K_B * temperature)))
}

/// Moments of the Gibbs state: h = ħω(n + ½), l = c = 0.
pub fn thermal_observable_vector(omega: f64, temperature: f64) -> Result<ObservableVector> {
    let n = thermal_population(omega, temperature)?;
    Ok(ObservableVector::new(HBAR * omega * (n + 0.5), 0.0, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn population_at_unit_ratio() {
        let expected = 1.0 / (std::f64::consts::E - 1.0);
        assert_relative_eq!(
            thermal_population(5.0, 5.0).unwrap(),
            expected,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            thermal_population(8.0, 8.0).unwrap(),
            expected,
            max_relative = 1e-15
        );
        assert_relative_eq!(expected, 0.58198, epsilon = 1e-5);
    }

    #[test]
    fn frozen_oscillator_is_empty() {
        assert_eq!(thermal_population(1e4, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn rejects_non_positive_inputs() {
        assert!(thermal_population(0.0, 1.0).is_err());
        assert!(thermal_population(1.0, -2.0).is_err());
        assert!(thermal_population(f64::NAN, 1.0).is_err());
        assert!(thermal_observable_vector(-1.0, 1.0).is_err());
    }

    #[test]
    fn thermal_vectors() {
        let v = thermal_observable_vector(5.0, 5.0).unwrap();
        assert_relative_eq!(v.h, 5.409_883_534_6, epsilon = 1e-9);
        assert_eq!((v.l, v.c, v.id), (0.0, 0.0, 1.0));

        // independent evaluation: 10 * (1/(e^1.25 - 1) + 1/2)
        let n = 1.0 / (1.25_f64.exp() - 1.0);
        let v = thermal_observable_vector(10.0, 8.0).unwrap();
        assert_relative_eq!(v.h, 10.0 * (n + 0.5), max_relative = 1e-14);
        assert_relative_eq!(v.h, 9.0155, epsilon = 1e-4);

        let cold = thermal_observable_vector(3.0, 1e-3).unwrap();
        assert_eq!(cold.h, 1.5);
    }

    #[test]
    fn mass_must_be_positive() {
        assert!(UnitSystem::new(0.0).is_err());
        let u = UnitSystem::new(2.5).unwrap();
        assert_eq!((u.hbar(), u.k_boltzmann(), u.mass()), (1.0, 1.0, 2.5));
    }

    #[test]
    fn reporting_unit() {
        assert_relative_eq!(to_atomic_time(1.0), 1.256_637_061_4, epsilon = 1e-10);
        assert_relative_eq!(
            from_atomic_time(to_atomic_time(250.0)),
            250.0,
            max_relative = 1e-15
        );
    }
}
