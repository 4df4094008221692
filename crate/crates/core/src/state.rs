//! Moment-space state, baths and the generalized Gibbs family.

use nalgebra::Vector4;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{bose, check_positive, HBAR, K_B};

/// Expectation values (⟨H⟩, ⟨L⟩, ⟨C⟩, ⟨I⟩) of a harmonic working medium.
///
/// With H = P²/2m + mω²Q²/2, L = P²/2m − mω²Q²/2 and C = (ω/2)(QP + PQ)
/// these four numbers close under every generator used in the cycles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservableVector {
    pub h: f64,
    pub l: f64,
    pub c: f64,
    pub id: f64,
}

impl ObservableVector {
    pub fn new(h: f64, l: f64, c: f64) -> Self {
        Self { h, l, c, id: 1.0 }
    }

    pub fn to_vector(&self) -> Vector4<f64> {
        Vector4::new(self.h, self.l, self.c, self.id)
    }

    /// Rebuilds from a propagated column; the identity component is reset to 1.
    pub fn from_vector(v: &Vector4<f64>) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    /// h² − l² − c²; conserved up to ω² scaling by unitary strokes.
    pub fn casimir(&self) -> f64 {
        self.h * self.h - self.l * self.l - self.c * self.c
    }

    /// Symplectic excitation √(h² − l² − c²)/ħω = n_eff + ½.
    pub fn symplectic_excitation(&self, omega: f64) -> f64 {
        self.casimir().max(0.0).sqrt() / (HBAR * omega)
    }

    /// Physicality at frequency `omega` with slack `tol` (relative to h²).
    pub fn check_physical(&self, omega: f64, tol: f64) -> Result<()> {
        check_positive("omega", omega)?;
        if !(self.h.is_finite() && self.l.is_finite() && self.c.is_finite()) {
            return Err(Error::Unphysical(format!("non-finite moments {self:?}")));
        }
        let slack = tol * self.h * self.h;
        let ground = 0.25 * (HBAR * omega).powi(2);
        if self.h < 0.0 || self.casimir() < ground - slack {
            return Err(Error::Unphysical(format!(
                "h^2 - l^2 - c^2 = {:.6e} below (hbar omega/2)^2 = {:.6e}",
                self.casimir(),
                ground
            )));
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.h - other.h)
            .abs()
            .max((self.l - other.l).abs())
            .max((self.c - other.c).abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    pub temperature: f64,
    /// Dimensionless system–bath coupling |d|²/(4πε₀ħc).
    pub coupling: f64,
}

impl BathSpec {
    pub fn new(temperature: f64, coupling: f64) -> Result<Self> {
        check_positive("temperature", temperature)?;
        check_positive("coupling", coupling)?;
        Ok(Self {
            temperature,
            coupling,
        })
    }
}

/// ρ ∝ exp(β b†b) with b the inertial ladder operator at (μ, ω).
///
/// `beta` is the dimensionless exponent, so y = e^β is the ratio of
/// successive level populations and β = −ħω/k_BT for an equilibrium state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedGibbsState {
    pub beta: f64,
    pub mu: f64,
    pub omega: f64,
}

impl GeneralizedGibbsState {
    pub fn new(beta: f64, mu: f64, omega: f64) -> Result<Self> {
        if !(beta < 0.0 && beta.is_finite()) {
            return Err(Error::domain("beta", beta, "must be negative"));
        }
        if !(mu.abs() < 2.0) {
            return Err(Error::domain("mu", mu, "|mu| must be below 2"));
        }
        check_positive("omega", omega)?;
        Ok(Self { beta, mu, omega })
    }

    pub fn thermal(omega: f64, temperature: f64) -> Result<Self> {
        check_positive("temperature", temperature)?;
        Self::new(-HBAR * omega / (K_B * temperature), 0.0, omega)
    }

    /// Mean quantum number ⟨b†b⟩ = 1/(e^{−β} − 1).
    pub fn occupation(&self) -> f64 {
        bose(-self.beta)
    }

    /// h = (2ħω/κ)(n + ½), l = 0, c = −μh/2.
    pub fn to_observables(&self) -> ObservableVector {
        let kappa = (4.0 - self.mu * self.mu).sqrt();
        let h = 2.0 * HBAR * self.omega / kappa * (self.occupation() + 0.5);
        ObservableVector::new(h, 0.0, -0.5 * self.mu * h)
    }

    /// Inverse of [`to_observables`]; requires l ≈ 0 (within `tol`·h).
    pub fn from_observables(v: &ObservableVector, omega: f64, tol: f64) -> Result<Self> {
        check_positive("omega", omega)?;
        if !(v.h > 0.0) || v.l.abs() > tol * v.h {
            return Err(Error::Unphysical(format!(
                "moments {v:?} are not of generalized Gibbs form"
            )));
        }
        let mu = -2.0 * v.c / v.h;
        let x = v.symplectic_excitation(omega);
        if !(x > 0.5) {
            return Err(Error::Unphysical(format!(
                "symplectic excitation {x} does not exceed 1/2"
            )));
        }
        // n + ½ = x  ⇒  e^{−β} = (n + 1)/n
        let n = x - 0.5;
        let beta = -(1.0 / n).ln_1p();
        Self::new(beta, mu, omega)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::thermal_observable_vector;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn thermal_gibbs_matches_thermal_vector() {
        let g = GeneralizedGibbsState::thermal(10.0, 8.0).unwrap();
        let v = g.to_observables();
        let t = thermal_observable_vector(10.0, 8.0).unwrap();
        assert_relative_eq!(v.h, t.h, max_relative = 1e-14);
        assert_eq!((v.l, v.c), (0.0, 0.0));
    }

    #[test]
    fn ground_state_casimir_is_tight() {
        let v = ObservableVector::new(2.5, 0.0, 0.0);
        assert!(v.check_physical(5.0, 1e-12).is_ok());
        assert!(ObservableVector::new(2.4, 0.0, 0.0)
            .check_physical(5.0, 1e-12)
            .is_err());
        assert!(ObservableVector::new(3.0, 2.0, 0.0)
            .check_physical(5.0, 1e-12)
            .is_err());
    }

    #[test]
    fn invalid_constructors() {
        assert!(BathSpec::new(0.0, 0.05).is_err());
        assert!(BathSpec::new(1.0, 0.0).is_err());
        assert!(GeneralizedGibbsState::new(0.1, 0.0, 1.0).is_err());
        assert!(GeneralizedGibbsState::new(-0.1, 2.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn thermal_vector_casimir(omega in 0.1f64..50.0, t in 0.05f64..100.0) {
            let v = thermal_observable_vector(omega, t).unwrap();
            let n = crate::units::thermal_population(omega, t).unwrap();
            prop_assert!((v.casimir() - (omega * (n + 0.5)).powi(2)).abs() <= 1e-12 * v.casimir());
            prop_assert!(v.casimir() >= 0.25 * omega * omega * (1.0 - 1e-15));
        }

        #[test]
        fn gibbs_round_trip_at_zero_mu(beta in -10.0f64..-1e-3, omega in 0.5f64..20.0) {
            let g = GeneralizedGibbsState::new(beta, 0.0, omega).unwrap();
            let back = GeneralizedGibbsState::from_observables(&g.to_observables(), omega, 1e-12).unwrap();
            prop_assert!((back.beta - beta).abs() <= 1e-12 * beta.abs());
            prop_assert_eq!(back.mu, 0.0);
        }

        #[test]
        fn gibbs_round_trip_with_mu(beta in -5.0f64..-0.05, mu in -1.9f64..1.9, omega in 0.5f64..20.0) {
            let g = GeneralizedGibbsState::new(beta, mu, omega).unwrap();
            let v = g.to_observables();
            prop_assert!(v.check_physical(omega, 1e-12).is_ok());
            let back = GeneralizedGibbsState::from_observables(&v, omega, 1e-12).unwrap();
            prop_assert!((back.beta - beta).abs() <= 1e-10 * beta.abs());
            prop_assert!((back.mu - mu).abs() <= 1e-12);
        }
    }
}
