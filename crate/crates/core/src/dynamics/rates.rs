//! Rates of the non-adiabatic master equation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::BathSpec;
use crate::units::{bose, check_positive, HBAR, K_B};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NameRates {
    pub k_down: f64,
    pub k_up: f64,
    /// Modified transition frequency α = ωκ/2.
    pub alpha: f64,
    /// κ = √(4 − μ²)
    pub kappa: f64,
    pub mu: f64,
}

impl NameRates {
    /// Net relaxation rate Γ = k↓ − k↑.
    pub fn gamma(&self) -> f64 {
        self.k_down - self.k_up
    }

    pub fn sigma(&self) -> f64 {
        self.k_down + self.k_up
    }

    /// β̇ = k↓(e^β − 1) + k↑(e^{−β} − 1)
    pub fn beta_dot(&self, beta: f64) -> f64 {
        self.k_down * beta.exp_m1() + self.k_up * (-beta).exp_m1()
    }
}

/// k↓ = (αγ/κ)(1 + N(α)), k↑ = k↓e^{−ħα/k_BT}, with α = ω√(1 − μ²/4).
pub fn name_rates(omega: f64, omega_dot: f64, bath: &BathSpec) -> Result<NameRates> {
    check_positive("omega", omega)?;
    let mu = omega_dot / (omega * omega);
    if !(mu.abs() < 2.0) {
        return Err(Error::domain(
            "mu",
            mu,
            "|omega_dot/omega^2| must stay below 2",
        ));
    }
    let kappa = (4.0 - mu * mu).sqrt();
    let alpha = 0.5 * omega * kappa;
    let n = bose(HBAR * alpha / (K_B * bath.temperature));
    let pre = alpha * bath.coupling / kappa;
    Ok(NameRates {
        k_down: pre * (1.0 + n),
        k_up: pre * n,
        alpha,
        kappa,
        mu,
    })
}

/// β̇ of a Gibbs state at frequency ω under the static rates (ω̇ = 0).
pub fn static_beta_dot(omega: f64, beta: f64, bath: &BathSpec) -> Result<f64> {
    Ok(name_rates(omega, 0.0, bath)?.beta_dot(beta))
}
