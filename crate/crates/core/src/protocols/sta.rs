//! Unitary shortcuts built from a polynomial Ermakov scaling ρ(t).

use super::quintic::QuinticHermite;
use crate::error::{Error, Result};
use crate::protocol::{grid_time, FrequencyProtocol};
use crate::state::ObservableVector;
use crate::units::{bose, check_positive, UnitSystem, HBAR, K_B};

/// Scaling solution ρ(t) of the Ermakov equation ρ̈ + ω²ρ = 1/(m²ρ³).
///
/// ρ is the quintic with ρ(0) = 1/√(mω_i), ρ(t_f) = 1/√(mω_f) and vanishing
/// first and second derivatives at both ends, so the Lewis–Riesenfeld
/// invariant commutes with the Hamiltonian at the stroke boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct ErmakovSolution {
    pub t_f: f64,
    pub omega_initial: f64,
    pub omega_final: f64,
    pub mass: f64,
    rho: QuinticHermite,
}

impl ErmakovSolution {
    fn new(units: &UnitSystem, omega_initial: f64, omega_final: f64, t_f: f64) -> Self {
        let m = units.mass();
        let r0 = 1.0 / (m * omega_initial).sqrt();
        let r1 = 1.0 / (m * omega_final).sqrt();
        Self {
            t_f,
            omega_initial,
            omega_final,
            mass: m,
            rho: QuinticHermite::flat(t_f, r0, r1),
        }
    }

    /// (ρ, ρ̇, ρ̈, ρ⃛)
    pub fn rho_derivatives(&self, t: f64) -> [f64; 4] {
        self.rho.eval(t)
    }

    pub fn rho(&self, t: f64) -> f64 {
        self.rho.value(t)
    }

    pub fn rho_dot(&self, t: f64) -> f64 {
        self.rho.eval(t)[1]
    }

    pub fn rho_ddot(&self, t: f64) -> f64 {
        self.rho.eval(t)[2]
    }

    /// ω² = 1/(m²ρ⁴) − ρ̈/ρ
    pub fn omega_squared(&self, t: f64) -> f64 {
        let [r, _, rdd, _] = self.rho.eval(t);
        1.0 / (self.mass * self.mass * r.powi(4)) - rdd / r
    }

    pub fn omega(&self, t: f64) -> f64 {
        if t == 0.0 {
            return self.omega_initial;
        }
        if t == self.t_f {
            return self.omega_final;
        }
        self.omega_squared(t).sqrt()
    }

    /// Differentiates ω² in closed form: 2ωω̇ = −4ρ̇/(m²ρ⁵) − (ρ⃛ρ − ρ̈ρ̇)/ρ².
    pub fn omega_dot(&self, t: f64) -> f64 {
        let [r, rd, rdd, rddd] = self.rho.eval(t);
        let m2 = self.mass * self.mass;
        let d_w2 = -4.0 * rd / (m2 * r.powi(5)) - (rddd * r - rdd * rd) / (r * r);
        d_w2 / (2.0 * self.omega(t))
    }
}

/// Unitary shortcut ω_i → ω_f in time t_f (atomic units).
pub fn build_sta_protocol(
    omega_initial: f64,
    omega_final: f64,
    t_f: f64,
) -> Result<(FrequencyProtocol, ErmakovSolution)> {
    build_sta_protocol_with_units(&UnitSystem::atomic(), omega_initial, omega_final, t_f)
}

pub fn build_sta_protocol_with_units(
    units: &UnitSystem,
    omega_initial: f64,
    omega_final: f64,
    t_f: f64,
) -> Result<(FrequencyProtocol, ErmakovSolution)> {
    check_positive("omega_initial", omega_initial)?;
    check_positive("omega_final", omega_final)?;
    check_positive("t_f", t_f)?;
    let e = ErmakovSolution::new(units, omega_initial, omega_final, t_f);
    let n = 8001;
    for i in 0..n {
        let t = grid_time(t_f, i, n);
        let w2 = e.omega_squared(t);
        if !(w2 > 0.0) {
            return Err(Error::InvalidProtocol { t });
        }
    }
    Ok((FrequencyProtocol::ermakov(e.clone()), e))
}

/// Closed-form moments along the shortcut for an initially thermal state.
///
/// Each Lewis–Riesenfeld eigenstate contributes in proportion to λ + ½, so
/// the thermal sum multiplies the ground-state values by ½coth(ħω(0)/2k_BT).
pub fn sta_expectation_values(
    ermakov: &ErmakovSolution,
    omega_start: f64,
    temperature: f64,
    t: f64,
) -> Result<ObservableVector> {
    check_positive("omega_start", omega_start)?;
    check_positive("temperature", temperature)?;
    if (omega_start - ermakov.omega_initial).abs() > 1e-12 * ermakov.omega_initial {
        return Err(Error::domain(
            "omega_start",
            omega_start,
            "must equal the frequency the shortcut starts from",
        ));
    }
    let slack = 1e-12 * ermakov.t_f;
    if !(t >= -slack && t <= ermakov.t_f + slack) {
        return Err(Error::domain("t", t, "outside the stroke"));
    }
    let t = t.clamp(0.0, ermakov.t_f);
    let k = bose(HBAR * omega_start / (K_B * temperature)) + 0.5;
    let m = ermakov.mass;
    let [r, rd, _, _] = ermakov.rho_derivatives(t);
    let w = ermakov.omega(t);
    let kin = m * rd * rd + 1.0 / (m * r * r);
    let pot = m * w * w * r * r;
    Ok(ObservableVector::new(
        0.5 * HBAR * (kin + pot) * k,
        0.5 * HBAR * (kin - pot) * k,
        HBAR * w * m * r * rd * k,
    ))
}
