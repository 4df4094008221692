use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{check_positive, thermal_population};

/// Corner frequencies (ω₁, ω₂, ω₃, ω₄) of a four-stroke cycle.
///
/// Stroke order: ω₁ → ω₂ open expansion (hot), ω₂ → ω₃ adiabatic expansion,
/// ω₃ → ω₄ open compression (cold), ω₄ → ω₁ adiabatic compression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CornerGeometry {
    pub omega: [f64; 4],
}

impl CornerGeometry {
    pub fn new(omega: [f64; 4]) -> Result<Self> {
        for w in omega {
            check_positive("omega", w)?;
        }
        let [w1, w2, w3, w4] = omega;
        if !(w1 > w2 && w2 > w3 && w3 < w4 && w4 < w1) {
            return Err(Error::Config(format!(
                "corner frequencies {omega:?} must satisfy w1 > w2 > w3 < w4 < w1"
            )));
        }
        Ok(Self { omega })
    }

    pub fn omega_max(&self) -> f64 {
        self.omega[0]
    }

    pub fn omega_min(&self) -> f64 {
        self.omega[2]
    }

    /// 𝒞 = ω₁/ω₃
    pub fn compression_ratio(&self) -> f64 {
        self.omega[0] / self.omega[2]
    }

    /// Thermal occupations n₁…n₄, with corners 1, 2 at `t_hot` and 3, 4 at `t_cold`.
    pub fn populations(&self, t_cold: f64, t_hot: f64) -> Result<[f64; 4]> {
        let [w1, w2, w3, w4] = self.omega;
        Ok([
            thermal_population(w1, t_hot)?,
            thermal_population(w2, t_hot)?,
            thermal_population(w3, t_cold)?,
            thermal_population(w4, t_cold)?,
        ])
    }

    /// Violations of the Carnot conditions ω₂/ω₃ = ω₁/ω₄ = T_h/T_c, which make
    /// the adiabats connect equal-population corners. Empty when consistent.
    pub fn carnot_violations(&self, t_cold: f64, t_hot: f64) -> Vec<String> {
        let [w1, w2, w3, w4] = self.omega;
        let r = t_hot / t_cold;
        let mut out = Vec::new();
        if ((w2 / w3) / r - 1.0).abs() > 1e-12 {
            out.push(format!(
                "w2/w3 = {} differs from T_h/T_c = {r} (populations at corners 2 and 3 differ)",
                w2 / w3
            ));
        }
        if ((w1 / w4) / r - 1.0).abs() > 1e-12 {
            out.push(format!(
                "w1/w4 = {} differs from T_h/T_c = {r} (populations at corners 1 and 4 differ)",
                w1 / w4
            ));
        }
        out
    }
}

/// Carnot geometry from ω_min = ω₃, the compression ratio and the bath
/// temperatures: ω₁ = 𝒞ω₃, ω₂ = ω₃T_h/T_c, ω₄ = ω₁T_c/T_h.
pub fn carnot_corner_frequencies(
    omega3: f64,
    compression_ratio: f64,
    t_cold: f64,
    t_hot: f64,
) -> Result<CornerGeometry> {
    check_positive("omega3", omega3)?;
    check_positive("t_cold", t_cold)?;
    check_positive("t_hot", t_hot)?;
    if !(t_hot > t_cold) {
        return Err(Error::Config(format!(
            "hot temperature {t_hot} must exceed cold temperature {t_cold}"
        )));
    }
    let bound = t_hot / t_cold;
    if !(compression_ratio > bound) {
        return Err(Error::Config(format!(
            "compression ratio {compression_ratio} must exceed T_h/T_c = {bound}; \
             at or below this lower bound the open expansion cannot lower the frequency"
        )));
    }
    let w1 = compression_ratio * omega3;
    CornerGeometry::new([w1, omega3 * t_hot / t_cold, omega3, w1 * t_cold / t_hot])
}

/// Corners of the endoreversible global-coherence cycle:
/// ω₁ᵍ = T_hᵍω₁/T_h, ω₃ᵍ = T_cᵍω₃/T_c, ω₂ᵍ = ω₃ᵍT_hᵍ/T_cᵍ, ω₄ᵍ = ω₁ᵍT_cᵍ/T_hᵍ.
pub fn endo_global_corner_frequencies(
    base: &CornerGeometry,
    t_cold_g: f64,
    t_hot_g: f64,
    t_cold: f64,
    t_hot: f64,
) -> Result<CornerGeometry> {
    for (q, v) in [
        ("t_cold_g", t_cold_g),
        ("t_hot_g", t_hot_g),
        ("t_cold", t_cold),
        ("t_hot", t_hot),
    ] {
        check_positive(q, v)?;
    }
    let w1 = t_hot_g * base.omega[0] / t_hot;
    let w3 = t_cold_g * base.omega[2] / t_cold;
    CornerGeometry::new([w1, w3 * t_hot_g / t_cold_g, w3, w1 * t_cold_g / t_hot_g])
}
