use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{CycleResult, CycleSpec, StrokeKind};
use crate::error::Result;
use crate::state::ObservableVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrokeSummary {
    pub kind: StrokeKind,
    pub file: String,
    pub duration: f64,
    pub omega_initial: f64,
    pub omega_final: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleSummary {
    pub spec: CycleSpec,
    pub converged: bool,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub periodicity_residual: f64,
    pub corners: [ObservableVector; 4],
    pub strokes: Vec<StrokeSummary>,
}

impl CycleResult {
    pub fn summary(&self) -> CycleSummary {
        CycleSummary {
            spec: self.spec.clone(),
            converged: self.converged,
            iterations: self.iterations,
            residual_history: self.residual_history.clone(),
            periodicity_residual: self.periodicity_residual,
            corners: self.corners,
            strokes: self
                .strokes
                .iter()
                .enumerate()
                .map(|(k, s)| StrokeSummary {
                    kind: s.kind,
                    file: stroke_file_name(k, s.kind),
                    duration: s.protocol.duration(),
                    omega_initial: s.protocol.omega_initial(),
                    omega_final: s.protocol.omega_final(),
                    samples: s.trajectory.len(),
                })
                .collect(),
        }
    }

    /// Writes `stroke{k}_{kind}.csv` for each stroke and `summary.json` into
    /// `dir`, returning the paths written.
    pub fn export(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for (k, s) in self.strokes.iter().enumerate() {
            let path = dir.join(stroke_file_name(k, s.kind));
            let mut buf = Vec::new();
            s.trajectory.write_csv(&mut buf)?;
            fs::write(&path, buf)?;
            written.push(path);
        }
        let path = dir.join("summary.json");
        fs::write(&path, serde_json::to_string_pretty(&self.summary())? + "\n")?;
        written.push(path);
        Ok(written)
    }
}

fn stroke_file_name(k: usize, kind: StrokeKind) -> String {
    format!("stroke{}_{}.csv", k + 1, kind.name())
}
