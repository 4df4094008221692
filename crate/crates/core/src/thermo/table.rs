//! Plot-ready CSV tables of ledgers. Every number goes through the same
//! 17-digit formatter, so equal inputs give byte-identical files.

use std::io::Write;

use super::{CycleLedger, SweepAxis, SweepRow};
use crate::error::Result;
use crate::protocols::io_fmt17 as f;

/// Ledger columns shared by sweep and comparison tables.
pub const LEDGER_COLUMNS: [&str; 20] = [
    "mode",
    "cycle_time",
    "cycle_time_atomic",
    "total_work",
    "q_hot",
    "q_cold",
    "power",
    "power_normalized",
    "efficiency",
    "efficiency_over_carnot",
    "bath_entropy_production",
    "min_coherence",
    "max_corner_relative_coherence",
    "corner1_entropy",
    "first_law_residual",
    "max_stroke_first_law_residual",
    "adiabat_casimir_drift",
    "work_quadrature_error",
    "iterations",
    "periodicity_residual",
];

fn ledger_fields(l: &CycleLedger, p_max: f64) -> Vec<String> {
    let max_rel = l
        .corner_relative_coherence
        .iter()
        .copied()
        .fold(0.0, f64::max);
    vec![
        l.operational_mode.name().to_string(),
        f(l.cycle_time),
        f(l.cycle_time_atomic),
        f(l.total_work),
        f(l.q_hot),
        f(l.q_cold),
        f(l.power),
        f(l.power / p_max),
        f(l.efficiency),
        f(l.efficiency / l.carnot_efficiency),
        f(l.bath_entropy_production),
        f(l.min_coherence),
        f(max_rel),
        f(l.corner_entropy[0]),
        f(l.first_law_residual),
        f(l.stroke_first_law_residual
            .iter()
            .copied()
            .fold(0.0, f64::max)),
        f(l.adiabat_casimir_drift),
        f(l.work_quadrature_error),
        l.iterations.to_string(),
        f(l.periodicity_residual),
    ]
}

/// Largest power among the given ledgers; used to normalize each table by
/// its own maximum.
fn max_power<'a>(ledgers: impl Iterator<Item = &'a CycleLedger>) -> f64 {
    ledgers.map(|l| l.power).fold(f64::NEG_INFINITY, f64::max)
}

/// One row per sweep point. Failed points keep their row with empty ledger
/// fields and the error name.
pub fn write_sweep_csv<W: Write>(axis: SweepAxis, rows: &[SweepRow], out: W) -> Result<()> {
    let p_max = max_power(rows.iter().filter_map(|r| r.ledger.as_ref()));
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["axis", "value", "status", "error"];
    header.extend(LEDGER_COLUMNS);
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![axis.name().to_string(), f(r.value)];
        match &r.ledger {
            Some(l) => {
                rec.extend(["ok".to_string(), String::new()]);
                rec.extend(ledger_fields(l, p_max));
            }
            None => {
                rec.push("failed".into());
                rec.push(r.error_kind.clone().unwrap_or_default());
                rec.extend(LEDGER_COLUMNS.iter().map(|_| String::new()));
            }
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// One row per labelled ledger (e.g. the three cycle kinds at one τ).
pub fn write_comparison_csv<W: Write>(rows: &[(String, CycleLedger)], out: W) -> Result<()> {
    let p_max = max_power(rows.iter().map(|(_, l)| l));
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["label"];
    header.extend(LEDGER_COLUMNS);
    w.write_record(&header)?;
    for (label, l) in rows {
        let mut rec = vec![label.clone()];
        rec.extend(ledger_fields(l, p_max));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
