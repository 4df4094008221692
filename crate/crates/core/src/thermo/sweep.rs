use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ledger::{evaluate_cycle, CycleLedger};
use crate::cycle::{
    carnot_corner_frequencies, endo_global_corner_frequencies, CycleKind, CycleSpec,
    LimitCycleOptions,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    CycleTime,
    Dephasing,
    CompressionRatio,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::CycleTime => "cycle_time",
            SweepAxis::Dephasing => "dephasing",
            SweepAxis::CompressionRatio => "compression_ratio",
        }
    }

    /// `template` with the axis set to `value`.
    pub fn apply(&self, template: &CycleSpec, value: f64) -> Result<CycleSpec> {
        let mut spec = template.clone();
        match self {
            SweepAxis::CycleTime => spec.cycle_time = value,
            SweepAxis::Dephasing => spec.dephasing = value,
            SweepAxis::CompressionRatio => {
                spec.geometry = match template.kind {
                    CycleKind::CarnotShortcut | CycleKind::EndoShortcut => {
                        carnot_corner_frequencies(
                            template.geometry.omega_min(),
                            value,
                            template.cold_internal,
                            template.hot_internal,
                        )?
                    }
                    CycleKind::EndoGlobal => {
                        // rebuild the Carnot base at the bath temperatures, then map it
                        let w3 = template.geometry.omega_min() * template.cold_bath
                            / template.cold_internal;
                        let base = carnot_corner_frequencies(
                            w3,
                            value,
                            template.cold_bath,
                            template.hot_bath,
                        )?;
                        endo_global_corner_frequencies(
                            &base,
                            template.cold_internal,
                            template.hot_internal,
                            template.cold_bath,
                            template.hot_bath,
                        )?
                    }
                }
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "cycle_time" | "tau" => Ok(SweepAxis::CycleTime),
            "dephasing" | "gamma_d" => Ok(SweepAxis::Dephasing),
            "compression_ratio" => Ok(SweepAxis::CompressionRatio),
            other => Err(Error::Config(format!(
                "unknown sweep axis '{other}' (expected cycle_time, dephasing or compression_ratio)"
            ))),
        }
    }
}

/// One sweep point; failures are kept in the row instead of aborting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub ledger: Option<CycleLedger>,
    pub error: Option<String>,
    pub error_kind: Option<String>,
}

/// Evaluates the template at each value, in parallel on up to `jobs` threads
/// (all cores when `None`). Rows come back in input order.
pub fn sweep(
    template: &CycleSpec,
    axis: SweepAxis,
    values: &[f64],
    options: &LimitCycleOptions,
    jobs: Option<usize>,
) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    let point = |&value: &f64| {
        let out = axis
            .apply(template, value)
            .and_then(|spec| evaluate_cycle(&spec, options).map(|(_, l)| l));
        match out {
            Ok(l) => SweepRow {
                value,
                ledger: Some(l),
                error: None,
                error_kind: None,
            },
            Err(e) => SweepRow {
                value,
                ledger: None,
                error: Some(e.to_string()),
                error_kind: Some(e.name().to_string()),
            },
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| values.par_iter().map(point).collect()))
}
