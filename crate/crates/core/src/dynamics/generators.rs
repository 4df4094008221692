//! Generators and propagators on the (⟨H⟩, ⟨L⟩, ⟨C⟩, ⟨I⟩) basis.
//!
//! The Heisenberg equations close on this basis:
//!
//!   ḣ = ω(μh − μl)
//!   l̇ = ω(−μh + μl − 2c)
//!   ċ = ω(2l + μc)
//!
//! The dissipator follows from the adjoint Lindblad form with jump operator
//! b = √(ω/κ)((κ + iμ)/2)(Q + ((μ + iκ)/2ω)P). For J = xQ + yP the adjoint
//! acts on quadratures as D†[Q²] = −2gQ² + |y|², D†[P²] = −2gP² + |x|²,
//! D†[QP + PQ] = −2g(QP + PQ) − 2Re(x*y) with g = Im(x*y). For b this gives
//! g = ½, |x|² = ω/κ, |y|² = 1/ωκ and x*y = (μ + iκ)/2κ, hence
//!
//!   ḣ ⊇ −Γh + Σω/κ,  l̇ ⊇ −Γl,  ċ ⊇ −Γc − Σωμ/2κ,
//!
//! with Γ = k↓ − k↑ and Σ = k↓ + k↑.

use nalgebra::{Matrix3, Matrix4};

use super::rates::{name_rates, NameRates};
use crate::error::{Error, Result};
use crate::state::BathSpec;

/// G_unitary(μ); the Heisenberg generator is ω·G_unitary(μ).
pub fn unitary_generator(mu: f64) -> Matrix4<f64> {
    Matrix4::new(
        mu, -mu, 0.0, 0.0, //
        -mu, mu, -2.0, 0.0, //
        0.0, 2.0, mu, 0.0, //
        0.0, 0.0, 0.0, 0.0,
    )
}

pub fn dissipative_generator(rates: &NameRates, omega: f64) -> Matrix4<f64> {
    let (g, s, k, mu) = (rates.gamma(), rates.sigma(), rates.kappa, rates.mu);
    Matrix4::new(
        -g,
        0.0,
        0.0,
        s * omega / k, //
        0.0,
        -g,
        0.0,
        0.0, //
        0.0,
        0.0,
        -g,
        -s * omega * mu / (2.0 * k), //
        0.0,
        0.0,
        0.0,
        0.0,
    )
}

/// Full open-system generator ω·G_unitary(μ) + G_dissipative.
pub fn open_generator(omega: f64, omega_dot: f64, bath: &BathSpec) -> Result<Matrix4<f64>> {
    let rates = name_rates(omega, omega_dot, bath)?;
    Ok(omega * unitary_generator(rates.mu) + dissipative_generator(&rates, omega))
}

/// Energy-basis dephasing −γ_d[H, [H, ·]]: damps l and c at 4γ_dω².
pub fn dephasing_generator(omega: f64, omega_dot: f64, gamma_d: f64) -> Matrix4<f64> {
    let mu = omega_dot / (omega * omega);
    let damp = 4.0 * gamma_d * omega * omega;
    let mut g = omega * unitary_generator(mu);
    g[(1, 1)] -= damp;
    g[(2, 2)] -= damp;
    g
}

/// Exact propagator of a constant-μ stroke from ω_i over time t.
///
/// With θ = ∫ω dt = −ln(1 − μω_i t)/μ and M₀ = G_unitary(μ) − μI, which
/// satisfies M₀³ = −κ²M₀, the 3×3 block is
/// (ω(t)/ω_i)·(I + (sin κθ/κ)M₀ + ((1 − cos κθ)/κ²)M₀²).
pub fn free_propagator(omega_initial: f64, mu: f64, t: f64) -> Result<Matrix4<f64>> {
    crate::units::check_positive("omega_initial", omega_initial)?;
    if !(mu.abs() < 2.0) {
        return Err(Error::domain("mu", mu, "|mu| must be below 2"));
    }
    let x = mu * omega_initial * t;
    if !(x < 1.0) {
        return Err(Error::domain(
            "t",
            t,
            "the constant-mu frequency diverges before t",
        ));
    }
    let theta = if mu == 0.0 {
        omega_initial * t
    } else {
        -(-x).ln_1p() / mu
    };
    let ratio = 1.0 / (1.0 - x);
    let kappa = (4.0 - mu * mu).sqrt();
    let m0 = Matrix3::new(
        0.0, -mu, 0.0, //
        -mu, 0.0, -2.0, //
        0.0, 2.0, 0.0,
    );
    let (s, c) = (kappa * theta).sin_cos();
    let rot = Matrix3::identity() + (s / kappa) * m0 + ((1.0 - c) / (kappa * kappa)) * (m0 * m0);
    let mut out = Matrix4::zeros();
    out.fixed_view_mut::<3, 3>(0, 0).copy_from(&(ratio * rot));
    out[(3, 3)] = 1.0;
    Ok(out)
}
