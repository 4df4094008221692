use serde::{Deserialize, Serialize};

use super::{
    carnot_efficiency, coherence, dissipated_heat, stroke_heat, stroke_work_with_error,
    von_neumann_entropy,
};
use crate::cycle::{run_to_limit_cycle, CycleResult, CycleSpec, LimitCycleOptions};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperationalMode {
    /// W < 0 and Q_h > 0.
    Engine,
    /// W > 0 and Q_c < 0.
    Dissipator,
    Other,
}

impl OperationalMode {
    pub fn classify(total_work: f64, q_hot: f64, q_cold: f64) -> Self {
        if total_work < 0.0 && q_hot > 0.0 {
            OperationalMode::Engine
        } else if total_work > 0.0 && q_cold < 0.0 {
            OperationalMode::Dissipator
        } else {
            OperationalMode::Other
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            OperationalMode::Engine => "engine",
            OperationalMode::Dissipator => "dissipator",
            OperationalMode::Other => "other",
        }
    }
}

/// Thermodynamic balance of a limit cycle. Outgoing energy is negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleLedger {
    pub work_per_stroke: [f64; 4],
    pub heat_per_stroke: [f64; 4],
    pub total_work: f64,
    pub q_hot: f64,
    pub q_cold: f64,
    /// 𝒫 = −W/τ in atomic units.
    pub power: f64,
    /// −W/Q_h; negative in the dissipator regime.
    pub efficiency: f64,
    pub carnot_efficiency: f64,
    /// Cycle time in units of 2π/ω_min.
    pub cycle_time: f64,
    pub cycle_time_atomic: f64,
    pub operational_mode: OperationalMode,
    /// −(Q_h/T_h + Q_c/T_c), non-negative by the second law.
    pub bath_entropy_production: f64,
    /// Coh at the four corners.
    pub corner_coherence: [f64; 4],
    /// Coh/(h/ħω) at the four corners.
    pub corner_relative_coherence: [f64; 4],
    pub corner_entropy: [f64; 4],
    /// Smallest Coh anywhere on the sampled cycle.
    pub min_coherence: f64,
    /// Largest Casimir drift over the adiabats (zero dephasing only).
    pub adiabat_casimir_drift: f64,
    /// |ΣW + ΣQ − ΔE| over the cycle, relative to the largest corner energy.
    pub first_law_residual: f64,
    /// Per stroke |W + Q − ΔE| relative to the corner energy scale, with Q
    /// integrated independently from the dissipative flux (zero on adiabats).
    pub stroke_first_law_residual: [f64; 4],
    /// Largest work quadrature error estimate relative to the corner energy scale.
    pub work_quadrature_error: f64,
    pub iterations: usize,
    pub periodicity_residual: f64,
}

/// Work, heat and derived figures of merit of a converged limit cycle.
pub fn analyze_cycle(result: &CycleResult) -> Result<CycleLedger> {
    if !result.converged || result.strokes.len() != 4 {
        return Err(Error::Analysis(
            "cycle analysis needs a converged four-stroke limit cycle".into(),
        ));
    }
    let spec = &result.spec;
    let mut work = [0.0; 4];
    let mut heat = [0.0; 4];
    let mut quad_err = 0.0f64;
    let mut min_coh = f64::INFINITY;
    let mut drift = 0.0f64;
    for (k, s) in result.strokes.iter().enumerate() {
        let (w, e) = stroke_work_with_error(&s.trajectory)?;
        work[k] = w;
        heat[k] = if s.kind.is_open() {
            stroke_heat(&s.trajectory, w)
        } else {
            0.0
        };
        quad_err = quad_err.max(e);
        for (v, om) in s.trajectory.vectors.iter().zip(&s.trajectory.omegas) {
            min_coh = min_coh.min(coherence(v, *om));
        }
        if !s.kind.is_open() && spec.dephasing == 0.0 {
            drift = drift.max(s.trajectory.max_casimir_drift());
        }
    }
    // adiabats exchange no heat; their energy change is the work, and any
    // quadrature mismatch stays visible through the first-law residual
    let scale = result.corners.iter().fold(0.0f64, |a, v| a.max(v.h.abs()));
    let delta_e: f64 = result
        .strokes
        .iter()
        .map(|s| s.trajectory.last().h - s.trajectory.first().h)
        .sum();
    let total_work: f64 = work.iter().sum();
    let total_heat: f64 = heat.iter().sum();
    let first_law = (total_work + total_heat - delta_e).abs() / scale;
    let mut stroke_first_law = [0.0; 4];
    for (k, s) in result.strokes.iter().enumerate() {
        let q = match k {
            0 => dissipated_heat(&s.trajectory, &spec.hot_bath_spec()?)?,
            2 => dissipated_heat(&s.trajectory, &spec.cold_bath_spec()?)?,
            _ => 0.0,
        };
        let de = s.trajectory.last().h - s.trajectory.first().h;
        stroke_first_law[k] = (work[k] + q - de).abs() / scale;
    }

    let (q_hot, q_cold) = (heat[0], heat[2]);
    let tau = spec.cycle_time_atomic();
    let omegas = spec.geometry.omega;
    let mut coh = [0.0; 4];
    let mut rel = [0.0; 4];
    let mut ent = [0.0; 4];
    for k in 0..4 {
        let v = &result.corners[k];
        coh[k] = coherence(v, omegas[k]);
        rel[k] = coh[k] / (v.h / omegas[k]);
        ent[k] = von_neumann_entropy(v, omegas[k])?;
    }
    Ok(CycleLedger {
        work_per_stroke: work,
        heat_per_stroke: heat,
        total_work,
        q_hot,
        q_cold,
        power: -total_work / tau,
        efficiency: -total_work / q_hot,
        carnot_efficiency: carnot_efficiency(spec.cold_bath, spec.hot_bath),
        cycle_time: spec.cycle_time,
        cycle_time_atomic: tau,
        operational_mode: OperationalMode::classify(total_work, q_hot, q_cold),
        bath_entropy_production: -(q_hot / spec.hot_bath + q_cold / spec.cold_bath),
        corner_coherence: coh,
        corner_relative_coherence: rel,
        corner_entropy: ent,
        min_coherence: min_coh,
        adiabat_casimir_drift: drift,
        first_law_residual: first_law,
        stroke_first_law_residual: stroke_first_law,
        work_quadrature_error: quad_err / scale,
        iterations: result.iterations,
        periodicity_residual: result.periodicity_residual,
    })
}

/// Runs `spec` from its Gibbs corner state to the limit cycle and analyzes it.
pub fn evaluate_cycle(
    spec: &CycleSpec,
    options: &LimitCycleOptions,
) -> Result<(CycleResult, CycleLedger)> {
    let result = run_to_limit_cycle(spec, &spec.initial_state()?, options)?;
    let ledger = analyze_cycle(&result)?;
    Ok((result, ledger))
}
