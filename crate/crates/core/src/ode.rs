//! Adaptive Dormand–Prince 5(4) integrator with continuous output.

use nalgebra::{DMatrix, SVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub atol: f64,
    pub rtol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            atol: 1e-10,
            rtol: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn tightened(&self, factor: f64) -> Self {
        Self {
            atol: self.atol * factor,
            rtol: self.rtol * factor,
        }
    }
}

/// Minimal vector-space interface needed by the stepper.
pub trait OdeState: Clone {
    /// self += a·x
    fn axpy(&mut self, a: f64, x: &Self);
    fn scale(&mut self, a: f64);
    /// RMS of err_i / (atol + rtol·max(|y0_i|, |y1_i|)).
    fn error_norm(err: &Self, y0: &Self, y1: &Self, tol: &Tolerances) -> f64;
}

impl OdeState for f64 {
    fn axpy(&mut self, a: f64, x: &Self) {
        *self += a * x;
    }
    fn scale(&mut self, a: f64) {
        *self *= a;
    }
    fn error_norm(err: &Self, y0: &Self, y1: &Self, tol: &Tolerances) -> f64 {
        err.abs() / (tol.atol + tol.rtol * y0.abs().max(y1.abs()))
    }
}

impl<const D: usize> OdeState for SVector<f64, D> {
    fn axpy(&mut self, a: f64, x: &Self) {
        self.axpy(a, x, 1.0);
    }
    fn scale(&mut self, a: f64) {
        *self *= a;
    }
    fn error_norm(err: &Self, y0: &Self, y1: &Self, tol: &Tolerances) -> f64 {
        let mut acc = 0.0;
        for i in 0..D {
            let sc = tol.atol + tol.rtol * y0[i].abs().max(y1[i].abs());
            acc += (err[i] / sc).powi(2);
        }
        (acc / D as f64).sqrt()
    }
}

impl OdeState for DMatrix<Complex64> {
    fn axpy(&mut self, a: f64, x: &Self) {
        for (s, v) in self.iter_mut().zip(x.iter()) {
            *s += v * a;
        }
    }
    fn scale(&mut self, a: f64) {
        for s in self.iter_mut() {
            *s *= a;
        }
    }
    /// Max norm: most entries of a density matrix are tiny, and an RMS over
    /// them would let the few large ones carry errors far above atol.
    fn error_norm(err: &Self, y0: &Self, y1: &Self, tol: &Tolerances) -> f64 {
        let mut m = 0.0f64;
        for ((e, a), b) in err.iter().zip(y0.iter()).zip(y1.iter()) {
            let sc = tol.atol + tol.rtol * a.norm().max(b.norm());
            m = m.max(e.norm() / sc);
        }
        m
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub tolerances: Tolerances,
    /// Initial step; `None` uses the interval length / 4096.
    pub initial_step: Option<f64>,
    /// Upper bound on the step size, for problems whose stability limit the
    /// error estimate does not see (tiny components of stiff modes).
    pub max_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            tolerances: Tolerances::default(),
            initial_step: None,
            max_step: None,
            max_steps: 20_000_000,
        }
    }
}

pub struct Solution<S> {
    pub end: S,
    /// States at the requested output times, in order.
    pub samples: Vec<S>,
    pub stats: Stats,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn combo<S: OdeState>(y: &S, h: f64, terms: &[(f64, &S)]) -> S {
    let mut out = y.clone();
    for &(a, k) in terms {
        if a != 0.0 {
            out.axpy(h * a, k);
        }
    }
    out
}

/// Integrates y' = f(t, y) from `t0` to `t1`, returning the state at each
/// time in `outputs` (sorted, inside [t0, t1]) via the continuous extension.
///
/// The accepted step sequence does not depend on `outputs`, so sampling
/// never perturbs the endpoint.
pub fn integrate<S, F>(
    mut f: F,
    t0: f64,
    t1: f64,
    y0: S,
    outputs: &[f64],
    settings: &Settings,
) -> Result<Solution<S>>
where
    S: OdeState,
    F: FnMut(f64, &S) -> Result<S>,
{
    let mut stats = Stats::default();
    let mut samples = Vec::with_capacity(outputs.len());
    let mut next_out = 0;
    let span = t1 - t0;
    if !(span >= 0.0) {
        return Err(Error::Integration {
            t: t0,
            reason: format!("invalid interval [{t0}, {t1}]"),
        });
    }
    while next_out < outputs.len() && outputs[next_out] <= t0 {
        samples.push(y0.clone());
        next_out += 1;
    }
    if span == 0.0 {
        while next_out < outputs.len() {
            samples.push(y0.clone());
            next_out += 1;
        }
        return Ok(Solution {
            end: y0,
            samples,
            stats,
        });
    }

    let tol = settings.tolerances;
    let h_max = settings.max_step.unwrap_or(f64::INFINITY).min(span);
    let mut h = settings.initial_step.unwrap_or(span / 4096.0).min(h_max);
    let h_min = span * 1e-14;
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y)?;
    stats.evaluations += 1;

    while t < t1 {
        if stats.accepted + stats.rejected >= settings.max_steps {
            return Err(Error::Integration {
                t,
                reason: format!("step budget of {} exhausted", settings.max_steps),
            });
        }
        let last = t + h >= t1 - 1e-14 * span.max(t1.abs());
        if last {
            h = t1 - t;
        }

        let y2 = combo(&y, h, &[(A21, &k1)]);
        let k2 = f(t + C2 * h, &y2)?;
        let y3 = combo(&y, h, &[(A31, &k1), (A32, &k2)]);
        let k3 = f(t + C3 * h, &y3)?;
        let y4 = combo(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        let k4 = f(t + C4 * h, &y4)?;
        let y5 = combo(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        let k5 = f(t + C5 * h, &y5)?;
        let y6 = combo(
            &y,
            h,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        );
        let k6 = f(if last { t1 } else { t + h }, &y6)?;
        let y_new = combo(
            &y,
            h,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let t_new = if last { t1 } else { t + h };
        let k7 = f(t_new, &y_new)?;
        stats.evaluations += 6;

        let mut err = k1.clone();
        err.scale(h * E1);
        err.axpy(h * E3, &k3);
        err.axpy(h * E4, &k4);
        err.axpy(h * E5, &k5);
        err.axpy(h * E6, &k6);
        err.axpy(h * E7, &k7);
        let en = S::error_norm(&err, &y, &y_new, &tol);
        if !en.is_finite() {
            return Err(Error::Integration {
                t,
                reason: "non-finite error estimate".into(),
            });
        }

        if en <= 1.0 {
            stats.accepted += 1;
            if next_out < outputs.len() && outputs[next_out] <= t_new {
                // continuous extension coefficients
                let mut ydiff = y_new.clone();
                ydiff.axpy(-1.0, &y);
                let mut bspl = k1.clone();
                bspl.scale(h);
                bspl.axpy(-1.0, &ydiff);
                let mut r4 = ydiff.clone();
                r4.axpy(-h, &k7);
                r4.axpy(-1.0, &bspl);
                let mut r5 = k1.clone();
                r5.scale(h * D1);
                r5.axpy(h * D3, &k3);
                r5.axpy(h * D4, &k4);
                r5.axpy(h * D5, &k5);
                r5.axpy(h * D6, &k6);
                r5.axpy(h * D7, &k7);
                while next_out < outputs.len() && outputs[next_out] <= t_new {
                    let to = outputs[next_out];
                    if to == t_new {
                        samples.push(y_new.clone());
                    } else {
                        let th = (to - t) / h;
                        let th1 = 1.0 - th;
                        // y + θ(ydiff + θ₁(bspl + θ(r4 + θ₁ r5)))
                        let mut acc = r5.clone();
                        acc.scale(th1);
                        acc.axpy(1.0, &r4);
                        acc.scale(th);
                        acc.axpy(1.0, &bspl);
                        acc.scale(th1);
                        acc.axpy(1.0, &ydiff);
                        acc.scale(th);
                        acc.axpy(1.0, &y);
                        samples.push(acc);
                    }
                    next_out += 1;
                }
            }
            t = t_new;
            y = y_new;
            k1 = k7;
            if last {
                break;
            }
            let fac = if en == 0.0 {
                5.0
            } else {
                (0.9 * en.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = (h * fac).min(h_max);
        } else {
            stats.rejected += 1;
            h *= (0.9 * en.powf(-0.2)).clamp(0.1, 0.9);
            if h < h_min {
                return Err(Error::Integration {
                    t,
                    reason: format!("step size underflow (h = {h:.3e})"),
                });
            }
        }
    }
    while next_out < outputs.len() {
        samples.push(y.clone());
        next_out += 1;
    }
    Ok(Solution {
        end: y,
        samples,
        stats,
    })
}
