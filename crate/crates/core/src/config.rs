//! Run configuration: embedded presets, TOML/JSON files, overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cycle::{CornerGeometry, CycleKind, CycleSpec, LimitCycleOptions};
use crate::error::{Error, Result};
use crate::ode::Tolerances;
use crate::thermo::SweepAxis;

/// Names accepted by [`preset`]. `eq6-consistent` is an alias of
/// `carnot-shortcut`.
pub const PRESETS: [&str; 5] = [
    "carnot-shortcut",
    "endo-shortcut",
    "endo-global",
    "table1-literal",
    "eq6-consistent",
];

const DEFAULT_CYCLE_TIME: f64 = 250.0;

/// Embedded cycle description by name.
pub fn preset(name: &str) -> Result<CycleSpec> {
    let base = CycleSpec {
        kind: CycleKind::CarnotShortcut,
        geometry: CornerGeometry::new([10.0, 8.0, 5.0, 6.25])?,
        hot_bath: 8.0,
        cold_bath: 5.0,
        hot_internal: 8.0,
        cold_internal: 5.0,
        coupling: 0.05,
        cycle_time: DEFAULT_CYCLE_TIME,
        adiabat_duration: 5.0,
        dephasing: 0.0,
    };
    Ok(match name {
        "carnot-shortcut" | "eq6-consistent" => base,
        // literal table corners: w2 and w4 break the Carnot conditions
        "table1-literal" => CycleSpec {
            geometry: CornerGeometry::new([10.0, 6.25, 5.0, 7.5])?,
            ..base
        },
        // same frequencies and corner states, baths moved inwards
        "endo-shortcut" => CycleSpec {
            kind: CycleKind::EndoShortcut,
            hot_bath: 7.75,
            cold_bath: 5.25,
            ..base
        },
        "endo-global" => CycleSpec {
            kind: CycleKind::EndoGlobal,
            geometry: CornerGeometry::new([9.6875, 7.75, 5.25, 6.5625])?,
            hot_internal: 7.75,
            cold_internal: 5.25,
            ..base
        },
        other => {
            return Err(Error::Config(format!(
                "unknown preset '{other}' (available: {})",
                PRESETS.join(", ")
            )))
        }
    })
}

/// Cycle fields; each one present overrides the preset.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CycleOverrides {
    pub kind: Option<CycleKind>,
    pub omega: Option<[f64; 4]>,
    pub hot_bath: Option<f64>,
    pub cold_bath: Option<f64>,
    pub hot_internal: Option<f64>,
    pub cold_internal: Option<f64>,
    pub coupling: Option<f64>,
    pub cycle_time: Option<f64>,
    pub adiabat_duration: Option<f64>,
    pub dephasing: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub atol: Option<f64>,
    pub rtol: Option<f64>,
    /// Limit-cycle convergence tolerance.
    pub cycle: Option<f64>,
    pub max_cycles: Option<usize>,
}

/// Contents of a configuration file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub preset: Option<String>,
    #[serde(default)]
    pub cycle: CycleOverrides,
    pub sweep: Option<SweepConfig>,
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: ToleranceOverrides,
}

/// A validated configuration, ready to run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedConfig {
    pub name: String,
    pub spec: CycleSpec,
    pub sweep: Option<(SweepAxis, Vec<f64>)>,
    pub output: Option<PathBuf>,
    pub tolerances: Tolerances,
    pub cycle_tol: f64,
    pub max_cycles: usize,
    #[serde(skip)]
    pub warnings: Vec<String>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("invalid TOML config: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid JSON config: {e}")))
    }

    /// Reads a file; `.json` is parsed as JSON, anything else as TOML.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        if path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"))
        {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        }
    }

    pub fn from_preset(name: &str) -> Self {
        Self {
            preset: Some(name.to_string()),
            ..Self::default()
        }
    }

    /// Applies the overrides to the preset (or to nothing, in which case every
    /// cycle field must be given) and validates the result.
    pub fn resolve(&self) -> Result<ResolvedConfig> {
        let c = &self.cycle;
        let spec = match &self.preset {
            Some(p) => {
                let mut s = preset(p)?;
                if let Some(k) = c.kind {
                    s.kind = k;
                }
                if let Some(w) = c.omega {
                    s.geometry = CornerGeometry::new(w)?;
                }
                let fields = [
                    (&mut s.hot_bath, c.hot_bath),
                    (&mut s.cold_bath, c.cold_bath),
                    (&mut s.hot_internal, c.hot_internal),
                    (&mut s.cold_internal, c.cold_internal),
                    (&mut s.coupling, c.coupling),
                    (&mut s.cycle_time, c.cycle_time),
                    (&mut s.adiabat_duration, c.adiabat_duration),
                    (&mut s.dephasing, c.dephasing),
                ];
                for (slot, v) in fields {
                    if let Some(v) = v {
                        *slot = v;
                    }
                }
                s
            }
            None => {
                let need = |q: &str, v: Option<f64>| {
                    v.ok_or_else(|| {
                        Error::Config(format!("cycle.{q} is required when no preset is given"))
                    })
                };
                let kind = c.kind.ok_or_else(|| {
                    Error::Config("cycle.kind is required when no preset is given".into())
                })?;
                let omega = c.omega.ok_or_else(|| {
                    Error::Config("cycle.omega is required when no preset is given".into())
                })?;
                let hot_bath = need("hot_bath", c.hot_bath)?;
                let cold_bath = need("cold_bath", c.cold_bath)?;
                CycleSpec {
                    kind,
                    geometry: CornerGeometry::new(omega)?,
                    hot_bath,
                    cold_bath,
                    hot_internal: c.hot_internal.unwrap_or(hot_bath),
                    cold_internal: c.cold_internal.unwrap_or(cold_bath),
                    coupling: need("coupling", c.coupling)?,
                    cycle_time: need("cycle_time", c.cycle_time)?,
                    adiabat_duration: c.adiabat_duration.unwrap_or(5.0),
                    dephasing: c.dephasing.unwrap_or(0.0),
                }
            }
        };
        let warnings = spec.validate()?;

        let sweep = match &self.sweep {
            Some(s) => {
                let axis: SweepAxis = s.axis.parse()?;
                if s.values.is_empty() {
                    return Err(Error::Config("sweep.values must not be empty".into()));
                }
                for &v in &s.values {
                    axis.apply(&spec, v).map_err(|e| {
                        Error::Config(format!("sweep value {v} on {}: {e}", axis.name()))
                    })?;
                }
                Some((axis, s.values.clone()))
            }
            None => None,
        };

        let defaults = LimitCycleOptions::default();
        let t = &self.tolerances;
        let tolerances = Tolerances {
            atol: t.atol.unwrap_or(defaults.propagation.tolerances.atol),
            rtol: t.rtol.unwrap_or(defaults.propagation.tolerances.rtol),
        };
        let cycle_tol = t.cycle.unwrap_or(defaults.tol);
        for (q, v) in [
            ("atol", tolerances.atol),
            ("rtol", tolerances.rtol),
            ("cycle", cycle_tol),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Config(format!(
                    "tolerances.{q} must lie in (0, 1) (got {v})"
                )));
            }
        }
        let max_cycles = t.max_cycles.unwrap_or(defaults.max_cycles);
        if max_cycles == 0 {
            return Err(Error::Config(
                "tolerances.max_cycles must be at least 1".into(),
            ));
        }

        Ok(ResolvedConfig {
            name: self.preset.clone().unwrap_or_else(|| "custom".into()),
            spec,
            sweep,
            output: self.output.clone(),
            tolerances,
            cycle_tol,
            max_cycles,
            warnings,
        })
    }
}

impl ResolvedConfig {
    pub fn limit_cycle_options(&self) -> LimitCycleOptions {
        let mut o = LimitCycleOptions {
            tol: self.cycle_tol,
            max_cycles: self.max_cycles,
            ..LimitCycleOptions::default()
        };
        o.propagation.tolerances = self.tolerances;
        o
    }

    /// Git-style SHA-256 of the canonical JSON form ("blob <len>\0<json>").
    pub fn content_hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let mut h = Sha256::new();
        h.update(format!("blob {}\0", json.len()));
        h.update(json.as_bytes());
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}
