use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocols::io_fmt17;
use crate::state::ObservableVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Unitary,
    Open,
    Dephasing,
    SteBeta,
}

/// Sampled moments along one stroke.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub omegas: Vec<f64>,
    pub omega_dots: Vec<f64>,
    pub vectors: Vec<ObservableVector>,
    pub provenance: Provenance,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn first(&self) -> &ObservableVector {
        &self.vectors[0]
    }

    pub fn last(&self) -> &ObservableVector {
        self.vectors
            .last()
            .expect("trajectory has at least one sample")
    }

    pub fn duration(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0) - self.times.first().copied().unwrap_or(0.0)
    }

    /// Checks the structural invariants: matching lengths, increasing times, ⟨I⟩ = 1.
    pub fn validate(&self) -> Result<()> {
        let n = self.times.len();
        if n == 0 || self.omegas.len() != n || self.omega_dots.len() != n || self.vectors.len() != n
        {
            return Err(Error::Analysis(
                "trajectory arrays have mismatched lengths".into(),
            ));
        }
        if self.times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Analysis(
                "trajectory times are not strictly increasing".into(),
            ));
        }
        if self.vectors.iter().any(|v| v.id != 1.0) {
            return Err(Error::Analysis("identity component drifted from 1".into()));
        }
        Ok(())
    }

    /// Largest relative change of (h² − l² − c²)/ω² from its initial value.
    pub fn max_casimir_drift(&self) -> f64 {
        let inv = |i: usize| self.vectors[i].casimir() / (self.omegas[i] * self.omegas[i]);
        let c0 = inv(0);
        (0..self.len())
            .map(|i| ((inv(i) - c0) / c0).abs())
            .fold(0.0, f64::max)
    }

    /// Columns t, omega, h, l, c, coherence at 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["t", "omega", "h", "l", "c", "coherence"])?;
        for i in 0..self.len() {
            let v = &self.vectors[i];
            let w = self.omegas[i];
            wtr.write_record([
                io_fmt17(self.times[i]),
                io_fmt17(w),
                io_fmt17(v.h),
                io_fmt17(v.l),
                io_fmt17(v.c),
                io_fmt17(crate::thermo::coherence(v, w)),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}
