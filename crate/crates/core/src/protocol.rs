//! The control knob: ω(t) and ω̇(t) over one stroke.

use crate::error::{Error, Result};
use crate::protocols::ErmakovSolution;

/// Uniform grid of (ω, ω̇) nodes with piecewise cubic Hermite interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct GridProtocol {
    omega: Vec<f64>,
    omega_dot: Vec<f64>,
}

impl GridProtocol {
    pub fn omega_nodes(&self) -> &[f64] {
        &self.omega
    }

    pub fn omega_dot_nodes(&self) -> &[f64] {
        &self.omega_dot
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    fn eval(&self, duration: f64, t: f64) -> (f64, f64) {
        let n = self.omega.len();
        let dt = duration / (n - 1) as f64;
        let x = (t / dt).clamp(0.0, (n - 1) as f64);
        let i = (x.floor() as usize).min(n - 2);
        let s = x - i as f64;
        let (w0, w1) = (self.omega[i], self.omega[i + 1]);
        let (d0, d1) = (self.omega_dot[i] * dt, self.omega_dot[i + 1] * dt);
        let s2 = s * s;
        let s3 = s2 * s;
        let w = (2.0 * s3 - 3.0 * s2 + 1.0) * w0
            + (s3 - 2.0 * s2 + s) * d0
            + (-2.0 * s3 + 3.0 * s2) * w1
            + (s3 - s2) * d1;
        let wd = ((6.0 * s2 - 6.0 * s) * w0
            + (3.0 * s2 - 4.0 * s + 1.0) * d0
            + (-6.0 * s2 + 6.0 * s) * w1
            + (3.0 * s2 - 2.0 * s) * d1)
            / dt;
        (w, wd)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Representation {
    Constant {
        omega: f64,
    },
    /// ω(t) = ω_i/(1 − μω_i t); μ = ω̇/ω² is constant.
    ConstantMu {
        omega_initial: f64,
        omega_final: f64,
        mu: f64,
    },
    /// Closed form from a polynomial Ermakov scaling.
    Ermakov(ErmakovSolution),
    Grid(GridProtocol),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyProtocol {
    duration: f64,
    repr: Representation,
}

/// Node time i·T/(n−1), written so the last node is exactly T.
pub fn grid_time(duration: f64, i: usize, n: usize) -> f64 {
    (i as f64 / (n - 1) as f64) * duration
}

impl FrequencyProtocol {
    pub fn constant(omega: f64, duration: f64) -> Result<Self> {
        crate::units::check_positive("omega", omega)?;
        if !(duration >= 0.0 && duration.is_finite()) {
            return Err(Error::domain("duration", duration, "must be non-negative"));
        }
        Ok(Self {
            duration,
            repr: Representation::Constant { omega },
        })
    }

    pub(crate) fn constant_mu(
        omega_initial: f64,
        omega_final: f64,
        mu: f64,
        duration: f64,
    ) -> Self {
        Self {
            duration,
            repr: Representation::ConstantMu {
                omega_initial,
                omega_final,
                mu,
            },
        }
    }

    pub(crate) fn ermakov(solution: ErmakovSolution) -> Self {
        Self {
            duration: solution.t_f,
            repr: Representation::Ermakov(solution),
        }
    }

    /// Builds a grid protocol from node values at t_i = i·T/(n−1).
    pub fn from_grid(duration: f64, omega: Vec<f64>, omega_dot: Vec<f64>) -> Result<Self> {
        if omega.len() < 2 || omega.len() != omega_dot.len() {
            return Err(Error::Config(format!(
                "grid protocol needs matching node arrays of length >= 2 (got {} and {})",
                omega.len(),
                omega_dot.len()
            )));
        }
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::domain(
                "duration",
                duration,
                "grid protocols need a positive duration",
            ));
        }
        if let Some(i) = omega.iter().position(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::domain(
                "omega",
                omega[i],
                "grid node must be positive",
            ));
        }
        if let Some(i) = omega_dot.iter().position(|w| !w.is_finite()) {
            return Err(Error::domain(
                "omega_dot",
                omega_dot[i],
                "grid node must be finite",
            ));
        }
        Ok(Self {
            duration,
            repr: Representation::Grid(GridProtocol { omega, omega_dot }),
        })
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn is_closed_form(&self) -> bool {
        !matches!(self.repr, Representation::Grid(_))
    }

    /// Constant-frequency or constant-μ protocols, which have exact propagators.
    pub fn constant_mu_parameters(&self) -> Option<(f64, f64)> {
        match self.repr {
            Representation::Constant { omega } => Some((omega, 0.0)),
            Representation::ConstantMu {
                omega_initial, mu, ..
            } => Some((omega_initial, mu)),
            _ => None,
        }
    }

    pub fn omega(&self, t: f64) -> f64 {
        self.eval(t).0
    }

    pub fn omega_dot(&self, t: f64) -> f64 {
        self.eval(t).1
    }

    /// Adiabatic parameter μ = ω̇/ω².
    pub fn mu(&self, t: f64) -> f64 {
        let (w, wd) = self.eval(t);
        wd / (w * w)
    }

    /// (ω, ω̇) at t, clamped to the stroke.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let t = t.clamp(0.0, self.duration);
        match &self.repr {
            Representation::Constant { omega } => (*omega, 0.0),
            Representation::ConstantMu {
                omega_initial,
                omega_final,
                mu,
            } => {
                if t == self.duration {
                    return (*omega_final, mu * omega_final * omega_final);
                }
                let w = omega_initial / (1.0 - mu * omega_initial * t);
                (w, mu * w * w)
            }
            Representation::Ermakov(e) => (e.omega(t), e.omega_dot(t)),
            Representation::Grid(g) => g.eval(self.duration, t),
        }
    }

    pub fn omega_initial(&self) -> f64 {
        self.omega(0.0)
    }

    pub fn omega_final(&self) -> f64 {
        self.omega(self.duration)
    }

    /// Nodes of a grid protocol, or `n` uniform samples of a closed form.
    pub fn samples(&self, n: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = match &self.repr {
            Representation::Grid(g) => g.len(),
            _ => n.max(2),
        };
        let mut ts = Vec::with_capacity(n);
        let mut ws = Vec::with_capacity(n);
        let mut wds = Vec::with_capacity(n);
        for i in 0..n {
            let t = grid_time(self.duration, i, n);
            let (w, wd) = match &self.repr {
                Representation::Grid(g) => (g.omega[i], g.omega_dot[i]),
                _ => self.eval(t),
            };
            ts.push(t);
            ws.push(w);
            wds.push(wd);
        }
        (ts, ws, wds)
    }

    /// Largest frequency reached (sampled for closed forms without a bound).
    pub fn max_omega(&self) -> f64 {
        match &self.repr {
            Representation::Constant { omega } => *omega,
            Representation::ConstantMu {
                omega_initial,
                omega_final,
                ..
            } => omega_initial.max(*omega_final),
            Representation::Grid(g) => g.omega.iter().cloned().fold(0.0, f64::max),
            Representation::Ermakov(_) => self.samples(4001).1.into_iter().fold(0.0, f64::max),
        }
    }

    /// Largest |μ| over the stroke.
    pub fn max_abs_mu(&self) -> f64 {
        let (_, w, wd) = self.samples(4001);
        w.iter()
            .zip(&wd)
            .map(|(w, wd)| (wd / (w * w)).abs())
            .fold(0.0, f64::max)
    }

    /// Checks ω > 0, finite μ, and that ω̇ agrees with a finite-difference
    /// derivative of ω to `rel_tol` (relative to the largest |ω̇|).
    pub fn check_consistency(&self, rel_tol: f64) -> Result<()> {
        if self.duration == 0.0 {
            return Ok(());
        }
        let (ts, ws, wds) = self.samples(2001);
        if let Some(i) = ws.iter().position(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::domain(
                "omega",
                ws[i],
                "protocol frequency must stay positive",
            ));
        }
        if let Some(i) = ws
            .iter()
            .zip(&wds)
            .position(|(w, wd)| !(wd / (w * w)).is_finite())
        {
            return Err(Error::domain(
                "mu",
                wds[i] / ws[i].powi(2),
                "adiabatic parameter must be finite",
            ));
        }
        let w_max = ws.iter().cloned().fold(0.0, f64::max);
        let scale = wds
            .iter()
            .fold(0.0f64, |a, v| a.max(v.abs()))
            .max(1e-12 * w_max / self.duration);
        let delta = 1e-3 * self.duration / ts.len() as f64;
        for (i, &t) in ts.iter().enumerate() {
            let fd = if t - delta < 0.0 {
                (-3.0 * self.omega(t) + 4.0 * self.omega(t + delta) - self.omega(t + 2.0 * delta))
                    / (2.0 * delta)
            } else if t + delta > self.duration {
                (3.0 * self.omega(t) - 4.0 * self.omega(t - delta) + self.omega(t - 2.0 * delta))
                    / (2.0 * delta)
            } else {
                (self.omega(t + delta) - self.omega(t - delta)) / (2.0 * delta)
            };
            if (fd - wds[i]).abs() > rel_tol * scale {
                return Err(Error::ProtocolInversionFailure(format!(
                    "omega_dot inconsistent with omega at t = {t}: stored {}, finite difference {fd}",
                    wds[i]
                )));
            }
        }
        Ok(())
    }
}
