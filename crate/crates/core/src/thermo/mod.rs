//! Work, heat, coherence and entropy bookkeeping, plus the sweep analyses.

mod ledger;
mod sweep;
mod table;

pub use ledger::{analyze_cycle, evaluate_cycle, CycleLedger, OperationalMode};
pub use sweep::{sweep, SweepAxis, SweepRow};
pub use table::{write_comparison_csv, write_sweep_csv, LEDGER_COLUMNS};

use crate::dynamics::{dissipative_generator, name_rates, Trajectory};
use crate::error::{Error, Result};
use crate::state::{BathSpec, ObservableVector};
use crate::units::{check_positive, thermal_population, HBAR, K_B};

/// Work delivered to the oscillator along a stroke, W = ∫(ω̇/ω)(h − l)dt.
///
/// Uses ∂Ĥ/∂t = (ω̇/ω)(Ĥ − L̂). The trajectory grid is integrated with Boole's
/// rule when it has 4k + 1 points (Simpson or trapezoid otherwise).
pub fn stroke_work(traj: &Trajectory) -> Result<f64> {
    Ok(stroke_work_with_error(traj)?.0)
}

/// Like [`stroke_work`], also returning |Boole − Simpson| as an error estimate.
pub fn stroke_work_with_error(traj: &Trajectory) -> Result<(f64, f64)> {
    let f: Vec<f64> = (0..traj.len())
        .map(|i| traj.omega_dots[i] / traj.omegas[i] * (traj.vectors[i].h - traj.vectors[i].l))
        .collect();
    integrate_samples(traj, &f)
}

/// Heat drawn from `bath` along an open stroke, integrated from the
/// dissipative energy flux −Γh + σω/κ rather than from the first law.
pub fn dissipated_heat(traj: &Trajectory, bath: &BathSpec) -> Result<f64> {
    let mut f = Vec::with_capacity(traj.len());
    for i in 0..traj.len() {
        let r = name_rates(traj.omegas[i], traj.omega_dots[i], bath)?;
        let d = dissipative_generator(&r, traj.omegas[i]);
        f.push(d[(0, 0)] * traj.vectors[i].h + d[(0, 3)]);
    }
    Ok(integrate_samples(traj, &f)?.0)
}

/// Integral of samples taken on the trajectory's uniform grid, with an error
/// estimate from the next lower-order rule.
fn integrate_samples(traj: &Trajectory, f: &[f64]) -> Result<(f64, f64)> {
    traj.validate()?;
    let n = traj.len();
    if n == 1 {
        return Ok((0.0, 0.0));
    }
    let dt = traj.duration() / (n - 1) as f64;
    let uniform = traj
        .times
        .windows(2)
        .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt);
    if !uniform {
        return Err(Error::Analysis(
            "stroke quadrature needs a uniform time grid".into(),
        ));
    }
    let m = n - 1;
    let trap = dt * (f.iter().sum::<f64>() - 0.5 * (f[0] + f[m]));
    if m % 2 != 0 {
        return Ok((trap, f64::INFINITY));
    }
    let simpson = dt / 3.0
        * (0..m / 2)
            .map(|k| f[2 * k] + 4.0 * f[2 * k + 1] + f[2 * k + 2])
            .sum::<f64>();
    if m % 4 != 0 {
        return Ok((simpson, (simpson - trap).abs()));
    }
    let boole = 2.0 * dt / 45.0
        * (0..m / 4)
            .map(|k| {
                let i = 4 * k;
                7.0 * f[i] + 32.0 * f[i + 1] + 12.0 * f[i + 2] + 32.0 * f[i + 3] + 7.0 * f[i + 4]
            })
            .sum::<f64>();
    Ok((boole, (boole - simpson).abs()))
}

/// Heat from the first law, Q = ΔE − W.
pub fn stroke_heat(traj: &Trajectory, work: f64) -> f64 {
    traj.last().h - traj.first().h - work
}

/// Coh = √(l² + c²)/(ħω)
pub fn coherence(v: &ObservableVector, omega: f64) -> f64 {
    v.l.hypot(v.c) / (HBAR * omega)
}

/// Gaussian-state entropy from the symplectic excitation x = √(h² − l² − c²)/(ħω).
pub fn von_neumann_entropy(v: &ObservableVector, omega: f64) -> Result<f64> {
    check_positive("omega", omega)?;
    let x = v.symplectic_excitation(omega);
    if !(x >= 0.5 - 1e-9) {
        return Err(Error::Unphysical(format!(
            "symplectic excitation {x} is below the ground-state value 1/2"
        )));
    }
    let n = (x - 0.5).max(0.0);
    let s = if n == 0.0 {
        0.0
    } else {
        (n + 1.0) * (n + 1.0).ln() - n * n.ln()
    };
    Ok(s)
}

/// Ideal quasi-static work of the Carnot geometry:
/// ħΔω₃₂(n₂+1) + ħΔω₁₄(n₁+1) + k_B(T_h − T_c)ln(n₁/n₂).
pub fn ideal_carnot_work(omega: [f64; 4], t_cold: f64, t_hot: f64) -> Result<f64> {
    for w in omega {
        check_positive("omega", w)?;
    }
    check_positive("t_cold", t_cold)?;
    check_positive("t_hot", t_hot)?;
    if t_hot == t_cold {
        log::warn!(
            "ideal Carnot work requested for equal bath temperatures; the cycle is degenerate"
        );
    }
    let [w1, w2, w3, w4] = omega;
    let n1 = thermal_population(w1, t_hot)?;
    let n2 = thermal_population(w2, t_hot)?;
    Ok(HBAR * (w3 - w2) * (n2 + 1.0)
        + HBAR * (w1 - w4) * (n1 + 1.0)
        + K_B * (t_hot - t_cold) * (n1 / n2).ln())
}

pub fn carnot_efficiency(t_cold: f64, t_hot: f64) -> f64 {
    1.0 - t_cold / t_hot
}

pub fn curzon_ahlborn_efficiency(t_cold: f64, t_hot: f64) -> f64 {
    1.0 - (t_cold / t_hot).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrictionFit {
    /// Intercept of W against 1/τ.
    pub w_infinity: f64,
    /// Slope of W against 1/τ.
    pub friction_action: f64,
    /// RMS residual of the fit.
    pub residual: f64,
}

impl FrictionFit {
    /// Cycle time of maximum power for W = W∞ + F/τ, τ* = 2F/|W∞|.
    pub fn max_power_time(&self) -> f64 {
        2.0 * self.friction_action / self.w_infinity.abs()
    }
}

/// Least-squares fit of W = W∞ + F/τ to (τ, W) samples.
pub fn friction_action_fit(samples: &[(f64, f64)]) -> Result<FrictionFit> {
    if samples.len() < 3 {
        return Err(Error::Analysis(format!(
            "friction-action fit needs at least 3 samples (got {})",
            samples.len()
        )));
    }
    if let Some(&(t, _)) = samples
        .iter()
        .find(|(t, w)| !(*t > 0.0 && t.is_finite() && w.is_finite()))
    {
        return Err(Error::Analysis(format!("invalid sample at cycle time {t}")));
    }
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), (t, _)| {
            (lo.min(*t), hi.max(*t))
        });
    if hi < 4.0 * lo {
        return Err(Error::Analysis(format!(
            "cycle times must span a factor 4 (got [{lo}, {hi}])"
        )));
    }
    let n = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|(t, _)| 1.0 / t).collect();
    let xm = xs.iter().sum::<f64>() / n;
    let ym = samples.iter().map(|(_, w)| w).sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
    if !(sxx > 1e-14 * xm * xm * n) {
        return Err(Error::Analysis(
            "friction-action fit is rank deficient".into(),
        ));
    }
    let sxy: f64 = xs
        .iter()
        .zip(samples)
        .map(|(x, (_, w))| (x - xm) * (w - ym))
        .sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let residual = (xs
        .iter()
        .zip(samples)
        .map(|(x, (_, w))| (w - intercept - slope * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(FrictionFit {
        w_infinity: intercept,
        friction_action: slope,
        residual,
    })
}
