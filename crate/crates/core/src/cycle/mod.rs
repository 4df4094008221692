//! Stroke assembly and limit-cycle iteration for the three cycle kinds.

mod export;
mod geometry;

pub use export::{CycleSummary, StrokeSummary};
pub use geometry::{carnot_corner_frequencies, endo_global_corner_frequencies, CornerGeometry};

use serde::{Deserialize, Serialize};

use crate::dynamics::{propagate, Generator, PropagationOptions, Sampling, Trajectory};
use crate::error::{Error, Result};
use crate::protocol::FrequencyProtocol;
use crate::protocols::{
    build_constant_mu_protocol, build_sta_protocol, build_ste_nonthermal_protocol,
    build_ste_protocol, mu_for_total_time,
};
use crate::state::{BathSpec, ObservableVector};
use crate::units::{check_positive, thermal_observable_vector, to_atomic_time};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CycleKind {
    /// Thermal STE open strokes and STA adiabats.
    CarnotShortcut,
    /// Non-thermal STE strokes between Gibbs states at internal temperatures.
    EndoShortcut,
    /// Four constant-|μ| strokes; coherence survives the corners.
    EndoGlobal,
}

impl CycleKind {
    pub fn name(&self) -> &'static str {
        match self {
            CycleKind::CarnotShortcut => "carnot-shortcut",
            CycleKind::EndoShortcut => "endo-shortcut",
            CycleKind::EndoGlobal => "endo-global",
        }
    }

    pub fn is_shortcut(&self) -> bool {
        !matches!(self, CycleKind::EndoGlobal)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrokeKind {
    OpenExpansion,
    AdiabaticExpansion,
    OpenCompression,
    AdiabaticCompression,
}

impl StrokeKind {
    pub const ALL: [StrokeKind; 4] = [
        StrokeKind::OpenExpansion,
        StrokeKind::AdiabaticExpansion,
        StrokeKind::OpenCompression,
        StrokeKind::AdiabaticCompression,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            StrokeKind::OpenExpansion => "open_expansion",
            StrokeKind::AdiabaticExpansion => "adiabatic_expansion",
            StrokeKind::OpenCompression => "open_compression",
            StrokeKind::AdiabaticCompression => "adiabatic_compression",
        }
    }

    pub fn is_open(&self) -> bool {
        matches!(
            self,
            StrokeKind::OpenExpansion | StrokeKind::OpenCompression
        )
    }
}

/// Full description of one cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleSpec {
    pub kind: CycleKind,
    pub geometry: CornerGeometry,
    pub hot_bath: f64,
    pub cold_bath: f64,
    /// Temperatures of the Gibbs corner states. Equal to the baths for the
    /// Carnot-shortcut cycle; the T^g pair that generated the corners for the
    /// global cycle (used only for its initial state and reporting).
    pub hot_internal: f64,
    pub cold_internal: f64,
    pub coupling: f64,
    /// Cycle time in units of 2π/ω_min (ω_min = 5).
    pub cycle_time: f64,
    /// Duration of each shortcut adiabat in atomic time.
    pub adiabat_duration: f64,
    /// Energy-basis dephasing strength on the adiabats.
    pub dephasing: f64,
}

impl CycleSpec {
    pub fn with_cycle_time(&self, cycle_time: f64) -> Self {
        Self {
            cycle_time,
            ..self.clone()
        }
    }

    pub fn with_dephasing(&self, dephasing: f64) -> Self {
        Self {
            dephasing,
            ..self.clone()
        }
    }

    pub fn cycle_time_atomic(&self) -> f64 {
        to_atomic_time(self.cycle_time)
    }

    pub fn hot_bath_spec(&self) -> Result<BathSpec> {
        BathSpec::new(self.hot_bath, self.coupling)
    }

    pub fn cold_bath_spec(&self) -> Result<BathSpec> {
        BathSpec::new(self.cold_bath, self.coupling)
    }

    /// Duration of each open stroke of a shortcut cycle:
    /// (τ − 2·adiabat_duration)/2.
    pub fn open_stroke_duration(&self) -> f64 {
        0.5 * (self.cycle_time_atomic() - 2.0 * self.adiabat_duration)
    }

    /// |μ| of the global cycle's constant-speed strokes.
    pub fn constant_mu_magnitude(&self) -> f64 {
        mu_for_total_time(&self.legs(), self.cycle_time_atomic())
    }

    fn legs(&self) -> [(f64, f64); 4] {
        let [w1, w2, w3, w4] = self.geometry.omega;
        [(w1, w2), (w2, w3), (w3, w4), (w4, w1)]
    }

    /// Checks every field; returns advisory warnings for consistent-but-unusual
    /// settings (a geometry that breaks the Carnot corner conditions).
    pub fn validate(&self) -> Result<Vec<String>> {
        let g = CornerGeometry::new(self.geometry.omega)?;
        let pos = |q: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "{q} must be positive and finite (got {v})"
                )))
            }
        };
        pos("hot_bath", self.hot_bath)?;
        pos("cold_bath", self.cold_bath)?;
        pos("hot_internal", self.hot_internal)?;
        pos("cold_internal", self.cold_internal)?;
        pos("coupling", self.coupling)?;
        pos("cycle_time", self.cycle_time)?;
        if !(self.dephasing >= 0.0 && self.dephasing.is_finite()) {
            return Err(Error::Config(format!(
                "dephasing must be non-negative (got {})",
                self.dephasing
            )));
        }
        if self.hot_bath <= self.cold_bath {
            return Err(Error::Config(
                "hot bath must be hotter than the cold bath".into(),
            ));
        }
        let mut warnings = Vec::new();
        match self.kind {
            CycleKind::CarnotShortcut | CycleKind::EndoShortcut => {
                pos("adiabat_duration", self.adiabat_duration)?;
                if self.kind == CycleKind::CarnotShortcut
                    && (self.hot_internal != self.hot_bath || self.cold_internal != self.cold_bath)
                {
                    return Err(Error::Config(
                        "carnot-shortcut corners are thermal: internal temperatures must equal the bath temperatures"
                            .into(),
                    ));
                }
                let bound = self.hot_internal / self.cold_internal;
                if !(g.compression_ratio() > bound) {
                    return Err(Error::Config(format!(
                        "compression ratio {} must exceed T_h/T_c = {bound}",
                        g.compression_ratio()
                    )));
                }
                for v in g.carnot_violations(self.cold_internal, self.hot_internal) {
                    warnings.push(format!("Carnot corner condition violated: {v}"));
                }
                if self.open_stroke_duration() <= 0.0 {
                    return Err(Error::Config(format!(
                        "cycle time {} (atomic {:.6}) leaves no time for the open strokes after two adiabats of {}",
                        self.cycle_time,
                        self.cycle_time_atomic(),
                        self.adiabat_duration
                    )));
                }
            }
            CycleKind::EndoGlobal => {}
        }
        Ok(warnings)
    }

    /// Gibbs state at corner 1.
    pub fn initial_state(&self) -> Result<ObservableVector> {
        thermal_observable_vector(self.geometry.omega[0], self.hot_internal)
    }
}

/// One assembled stroke.
#[derive(Debug, Clone)]
pub struct StrokeDescriptor {
    pub kind: StrokeKind,
    pub protocol: FrequencyProtocol,
    pub generator: Generator,
}

/// Builds the four strokes in cycle order.
pub fn assemble_cycle(spec: &CycleSpec) -> Result<Vec<StrokeDescriptor>> {
    spec.validate()?;
    let [w1, w2, w3, w4] = spec.geometry.omega;
    let hot = spec.hot_bath_spec()?;
    let cold = spec.cold_bath_spec()?;
    let adiabat = if spec.dephasing > 0.0 {
        Generator::Dephasing {
            gamma_d: spec.dephasing,
            bath: None,
        }
    } else {
        Generator::Unitary
    };
    let legs = [(w1, w2), (w2, w3), (w3, w4), (w4, w1)];
    let mut strokes = Vec::with_capacity(4);
    for (k, (kind, (a, b))) in StrokeKind::ALL.into_iter().zip(legs).enumerate() {
        let bath = match kind {
            StrokeKind::OpenExpansion => Some(hot),
            StrokeKind::OpenCompression => Some(cold),
            _ => None,
        };
        let internal = if k == 0 {
            spec.hot_internal
        } else {
            spec.cold_internal
        };
        let build = || -> Result<StrokeDescriptor> {
            let protocol = match (spec.kind, bath) {
                (CycleKind::CarnotShortcut, Some(bath)) => {
                    build_ste_protocol(a, b, spec.open_stroke_duration(), bath)?.0
                }
                (CycleKind::EndoShortcut, Some(bath)) => {
                    build_ste_nonthermal_protocol(
                        a,
                        b,
                        spec.open_stroke_duration(),
                        internal,
                        bath,
                    )?
                    .0
                }
                (CycleKind::CarnotShortcut | CycleKind::EndoShortcut, None) => {
                    build_sta_protocol(a, b, spec.adiabat_duration)?.0
                }
                (CycleKind::EndoGlobal, _) => {
                    let mu = spec.constant_mu_magnitude() * (b - a).signum();
                    build_constant_mu_protocol(a, b, mu)?
                }
            };
            let generator = match bath {
                Some(bath) => Generator::Open(bath),
                None => adiabat,
            };
            Ok(StrokeDescriptor {
                kind,
                protocol,
                generator,
            })
        };
        strokes.push(build().map_err(|e| e.in_stroke(kind.name()))?);
    }
    Ok(strokes)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitCycleOptions {
    /// Relative corner-1 change per cycle below which the cycle is converged.
    pub tol: f64,
    pub max_cycles: usize,
    pub propagation: PropagationOptions,
}

impl Default for LimitCycleOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_cycles: 500,
            propagation: PropagationOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct StrokeRun {
    pub kind: StrokeKind,
    pub protocol: FrequencyProtocol,
    pub trajectory: Trajectory,
}

#[derive(Debug, Clone)]
pub struct CycleResult {
    pub spec: CycleSpec,
    pub strokes: Vec<StrokeRun>,
    /// State at the start of each stroke on the limit cycle.
    pub corners: [ObservableVector; 4],
    /// Cycles applied before convergence was declared.
    pub iterations: usize,
    pub converged: bool,
    pub residual_history: Vec<f64>,
    /// Relative change of corner 1 across the final, densely sampled cycle.
    pub periodicity_residual: f64,
}

/// Corner-1 change relative to h, component-wise.
fn cycle_residual(new: &ObservableVector, old: &ObservableVector) -> f64 {
    let scale = new.h.abs().max(old.h.abs());
    new.max_abs_diff(old) / scale
}

fn apply_cycle(
    strokes: &[StrokeDescriptor],
    v0: &ObservableVector,
    options: &PropagationOptions,
) -> Result<(ObservableVector, Vec<Trajectory>)> {
    let mut v = *v0;
    let mut trajs = Vec::with_capacity(strokes.len());
    for s in strokes {
        let tr = propagate(&v, &s.protocol, &s.generator, options)
            .map_err(|e| e.in_stroke(s.kind.name()))?;
        v = *tr.last();
        trajs.push(tr);
    }
    Ok((v, trajs))
}

/// Cycles `v0` through the four strokes until corner 1 repeats within `tol`.
///
/// Iterations only sample stroke endpoints; the integrator's step sequence is
/// independent of the sampling, so the final densely sampled pass reproduces
/// the same corners.
pub fn run_to_limit_cycle(
    spec: &CycleSpec,
    v0: &ObservableVector,
    options: &LimitCycleOptions,
) -> Result<CycleResult> {
    check_positive("tol", options.tol)?;
    let strokes = assemble_cycle(spec)?;
    let fast = PropagationOptions {
        sampling: Sampling::Endpoints,
        ..options.propagation
    };
    let mut v = *v0;
    let mut history = Vec::new();
    let mut converged = false;
    while history.len() < options.max_cycles {
        let (next, _) = apply_cycle(&strokes, &v, &fast)?;
        let r = cycle_residual(&next, &v);
        history.push(r);
        v = next;
        if r < options.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence { history });
    }
    log::debug!(
        "{} converged after {} cycles",
        spec.kind.name(),
        history.len()
    );
    let (end, trajs) = apply_cycle(&strokes, &v, &options.propagation)?;
    let mut corners = [v; 4];
    for (k, tr) in trajs.iter().enumerate() {
        corners[k] = *tr.first();
    }
    let strokes = strokes
        .into_iter()
        .zip(trajs)
        .map(|(s, trajectory)| StrokeRun {
            kind: s.kind,
            protocol: s.protocol,
            trajectory,
        })
        .collect();
    Ok(CycleResult {
        spec: spec.clone(),
        strokes,
        corners,
        iterations: history.len(),
        converged,
        periodicity_residual: cycle_residual(&end, &v),
        residual_history: history,
    })
}
