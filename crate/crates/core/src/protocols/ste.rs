//! Shortcuts to equilibrium: open-system protocols steering β(t).
//!
//! The target population ratio y(t) = e^{β(t)} is a quintic fixed by its
//! boundary values, slopes and vanishing curvature. Along the stroke the
//! state obeys β̇ = k↓(e^β − 1) + k↑(e^{−β} − 1); since k↓ = (γω/2)(1 + N(α))
//! and k↑ = (γω/2)N(α), the rate needed at each time has the closed form
//!
//!   N_req = (1 + r)·y/(1 − y),  r = 2ẏ/(γωy(1 − y)),  α = T·ln(1 + 1/N_req),
//!
//! and ω(t) must satisfy ω√(1 − μ²/4) = α with μ = ω̇/ω². That relation is
//! collocated on a uniform grid (fourth-order differences) and solved for all
//! nodes at once by Newton's method.

use super::quintic::QuinticHermite;
use crate::dynamics::{name_rates, static_beta_dot};
use crate::error::{Error, Result};
use crate::linalg::BandMatrix;
use crate::protocol::{grid_time, FrequencyProtocol};
use crate::state::BathSpec;
use crate::units::{check_positive, HBAR, K_B};

/// Grid size for synthesized protocols.
pub const STE_GRID_POINTS: usize = 4001;
const MAX_NEWTON: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct SteSolution {
    pub times: Vec<f64>,
    pub y: Vec<f64>,
    pub y_dot: Vec<f64>,
    pub beta: Vec<f64>,
    pub alpha: Vec<f64>,
    pub protocol: FrequencyProtocol,
    pub bath: BathSpec,
    /// Temperature labelling the boundary states (the bath's for thermal strokes).
    pub internal_temperature: f64,
    pub newton_iterations: usize,
    target: QuinticHermite,
}

impl SteSolution {
    /// Target y(t) from the boundary polynomial.
    pub fn target_y(&self, t: f64) -> f64 {
        self.target.value(t)
    }

    pub fn target_beta(&self, t: f64) -> f64 {
        self.target.value(t).ln()
    }
}

/// STE between Gibbs states at the bath temperature.
pub fn build_ste_protocol(
    omega_initial: f64,
    omega_final: f64,
    t_f: f64,
    bath: BathSpec,
) -> Result<(FrequencyProtocol, SteSolution)> {
    build(
        omega_initial,
        omega_final,
        t_f,
        bath.temperature,
        bath,
        false,
    )
}

/// STE between Gibbs states at `internal_temperature`, in contact with `bath`.
///
/// The boundary slopes of y are those the static rates (ω̇ = 0, α = ω) impose
/// on the corner states, so ω̇ vanishes at both ends.
pub fn build_ste_nonthermal_protocol(
    omega_initial: f64,
    omega_final: f64,
    t_f: f64,
    internal_temperature: f64,
    bath: BathSpec,
) -> Result<(FrequencyProtocol, SteSolution)> {
    build(
        omega_initial,
        omega_final,
        t_f,
        internal_temperature,
        bath,
        true,
    )
}

fn build(
    omega_initial: f64,
    omega_final: f64,
    t_f: f64,
    internal_temperature: f64,
    bath: BathSpec,
    driven_ends: bool,
) -> Result<(FrequencyProtocol, SteSolution)> {
    check_positive("omega_initial", omega_initial)?;
    check_positive("omega_final", omega_final)?;
    check_positive("t_f", t_f)?;
    check_positive("internal_temperature", internal_temperature)?;
    let bath = BathSpec::new(bath.temperature, bath.coupling)?;

    let beta0 = -HBAR * omega_initial / (K_B * internal_temperature);
    let beta1 = -HBAR * omega_final / (K_B * internal_temperature);
    let (y0, y1) = (beta0.exp(), beta1.exp());
    let (yd0, yd1) = if driven_ends {
        (
            static_beta_dot(omega_initial, beta0, &bath)? * y0,
            static_beta_dot(omega_final, beta1, &bath)? * y1,
        )
    } else {
        (0.0, 0.0)
    };
    let target = QuinticHermite::new(t_f, (y0, yd0, 0.0), (y1, yd1, 0.0));

    let n = STE_GRID_POINTS;
    let times: Vec<f64> = (0..n).map(|i| grid_time(t_f, i, n)).collect();
    let mut y = Vec::with_capacity(n);
    let mut y_dot = Vec::with_capacity(n);
    for &t in &times {
        let [v, d, _, _] = target.eval(t);
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::InfeasibleStroke {
                t,
                reason: format!("target population ratio y = {v} leaves (0, 1)"),
            });
        }
        y.push(v);
        y_dot.push(d);
    }

    let req = Requirement {
        y: &y,
        y_dot: &y_dot,
        temperature: bath.temperature,
        coupling: bath.coupling,
    };
    let scale = omega_initial.max(omega_final);
    let mut w = Vec::with_capacity(n);
    for i in 0..n {
        w.push(req.quasi_static_root(i, scale, times[i])?);
    }
    let d = Fd4::new(n, t_f / (n - 1) as f64);

    let mut iterations = 0;
    let mut converged = false;
    for it in 0..MAX_NEWTON {
        iterations = it + 1;
        let state = req
            .evaluate(&w, &d)
            .map_err(|(i, reason)| Error::InfeasibleStroke {
                t: times[i],
                reason,
            })?;
        let mut jac = BandMatrix::zeros(n, 4, 4);
        for i in 0..n {
            let (mu, q) = (state.mu[i], state.q[i]);
            jac.add(i, i, q + mu * mu / (2.0 * q) - state.dalpha_dw[i]);
            let off = -mu / (4.0 * q * w[i]);
            for (j, c) in d.row(i) {
                jac.add(i, j, off * c);
            }
            if let Some(i0) = penalty_start(i, n) {
                for (k, c) in FOURTH_DIFF.iter().enumerate() {
                    jac.add(i, i0 + k, *c);
                }
            }
        }
        let rhs: Vec<f64> = state.residual.iter().map(|f| -f).collect();
        let step = jac
            .solve(&rhs)
            .map_err(|e| Error::ProtocolInversionFailure(e.to_string()))?;

        // damp until the update stays inside the feasible region
        let mut lambda = 1.0;
        let trial = loop {
            let trial: Vec<f64> = w.iter().zip(&step).map(|(a, s)| a + lambda * s).collect();
            match req.evaluate(&trial, &d) {
                Ok(_) => break trial,
                Err((i, reason)) => {
                    lambda *= 0.5;
                    if lambda < 1e-8 {
                        return Err(Error::InfeasibleStroke {
                            t: times[i],
                            reason: format!("no feasible Newton update: {reason}"),
                        });
                    }
                }
            }
        };
        let change = step.iter().fold(0.0f64, |a, s| a.max((lambda * s).abs()));
        w = trial;
        if change < 1e-12 * scale && lambda == 1.0 {
            converged = true;
            break;
        }
    }
    let state = req
        .evaluate(&w, &d)
        .map_err(|(i, reason)| Error::InfeasibleStroke {
            t: times[i],
            reason,
        })?;
    let residual = state.residual.iter().fold(0.0f64, |a, f| a.max(f.abs()));
    if !converged || residual > 1e-8 * scale {
        return Err(Error::ProtocolInversionFailure(format!(
            "Newton iteration stalled after {iterations} steps (max residual {residual:.3e})"
        )));
    }
    let mismatch = (w[n - 1] - omega_final).abs() / omega_final;
    if mismatch >= 1e-3 || (w[0] - omega_initial).abs() / omega_initial >= 1e-3 {
        return Err(Error::ProtocolInversionFailure(format!(
            "endpoint frequency mismatch {mismatch:.3e}"
        )));
    }

    let omega_dot = d.apply(&w);
    let protocol = FrequencyProtocol::from_grid(t_f, w.clone(), omega_dot)?;
    let solution = SteSolution {
        beta: y.iter().map(|v| v.ln()).collect(),
        alpha: state.alpha,
        times,
        y,
        y_dot,
        protocol: protocol.clone(),
        bath,
        internal_temperature,
        newton_iterations: iterations,
        target,
    };
    Ok((protocol, solution))
}

struct Requirement<'a> {
    y: &'a [f64],
    y_dot: &'a [f64],
    temperature: f64,
    coupling: f64,
}

struct Collocation {
    mu: Vec<f64>,
    q: Vec<f64>,
    alpha: Vec<f64>,
    dalpha_dw: Vec<f64>,
    residual: Vec<f64>,
}

impl Requirement<'_> {
    /// (α_req, dα_req/dω) at node i for frequency w; `None` when no positive
    /// occupation can supply the demanded rate.
    fn alpha(&self, i: usize, w: f64) -> Option<(f64, f64)> {
        let (y, yd) = (self.y[i], self.y_dot[i]);
        let r = 2.0 * yd / (self.coupling * w * y * (1.0 - y));
        let n_req = (1.0 + r) * y / (1.0 - y);
        if !(n_req > 0.0 && n_req.is_finite()) {
            return None;
        }
        let t = self.temperature;
        let alpha = t * (1.0 / n_req).ln_1p();
        let dn_dw = -r / w * y / (1.0 - y);
        let da_dn = -t / (n_req * (n_req + 1.0));
        Some((alpha, da_dn * dn_dw))
    }

    /// Root of ω = α_req(ω), ignoring the ω̇ correction, by bisection.
    fn quasi_static_root(&self, i: usize, scale: f64, t: f64) -> Result<f64> {
        let g = |w: f64| self.alpha(i, w).map(|(a, _)| w - a);
        let (y, yd) = (self.y[i], self.y_dot[i]);
        let w_crit = if yd < 0.0 {
            -2.0 * yd / (self.coupling * y * (1.0 - y))
        } else {
            0.0
        };
        let mut lo = (w_crit * (1.0 + 1e-12)).max(1e-9 * scale);
        let mut nudges = 0;
        while g(lo).is_none() && nudges < 100 {
            lo *= 1.0 + 1e-9;
            nudges += 1;
        }
        if g(lo).map_or(true, |v| v >= 0.0) {
            return Err(Error::InfeasibleStroke {
                t,
                reason: "demanded heating rate exceeds what the bath can supply at any frequency"
                    .into(),
            });
        }
        let mut hi = 50.0 * scale.max(lo);
        let mut grow = 0;
        while g(hi).map_or(true, |v| v <= 0.0) {
            hi *= 2.0;
            grow += 1;
            if grow > 60 {
                return Err(Error::InfeasibleStroke {
                    t,
                    reason: "no frequency supplies the demanded rate".into(),
                });
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            match g(mid) {
                Some(v) if v > 0.0 => hi = mid,
                _ => lo = mid,
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    fn evaluate(&self, w: &[f64], d: &Fd4) -> std::result::Result<Collocation, (usize, String)> {
        let n = w.len();
        let wd = d.apply(w);
        let mut out = Collocation {
            mu: vec![0.0; n],
            q: vec![0.0; n],
            alpha: vec![0.0; n],
            dalpha_dw: vec![0.0; n],
            residual: vec![0.0; n],
        };
        for i in 0..n {
            if !(w[i] > 0.0) {
                return Err((i, format!("frequency {} not positive", w[i])));
            }
            let mu = wd[i] / (w[i] * w[i]);
            if !(mu.abs() < 2.0) {
                return Err((i, format!("|mu| = {} reaches 2", mu.abs())));
            }
            let q = (1.0 - 0.25 * mu * mu).sqrt();
            let (alpha, da) = self
                .alpha(i, w[i])
                .ok_or_else(|| (i, "required occupation is not positive".to_string()))?;
            out.mu[i] = mu;
            out.q[i] = q;
            out.alpha[i] = alpha;
            out.dalpha_dw[i] = da;
            out.residual[i] = w[i] * q - alpha;
            if let Some(i0) = penalty_start(i, n) {
                out.residual[i] += FOURTH_DIFF
                    .iter()
                    .zip(&w[i0..i0 + 5])
                    .map(|(c, x)| c * x)
                    .sum::<f64>();
            }
        }
        Ok(out)
    }
}

// Residual term Δ⁴ω at interior nodes. It is O(h⁴) on smooth protocols but
// pins the odd-even grid mode, which the centered derivative cannot see and
// which the two roots of ωq(μ) = α(ω) otherwise let Newton settle into.
const FOURTH_DIFF: [f64; 5] = [1.0, -4.0, 6.0, -4.0, 1.0];

fn penalty_start(i: usize, n: usize) -> Option<usize> {
    (i >= 2 && i + 2 < n).then(|| i - 2)
}

/// Fourth-order first-derivative stencils on a uniform grid.
struct Fd4 {
    n: usize,
    h: f64,
}

const EDGE0: [f64; 5] = [-25.0, 48.0, -36.0, 16.0, -3.0];
const EDGE1: [f64; 5] = [-3.0, -10.0, 18.0, -6.0, 1.0];
const CENTER: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];

impl Fd4 {
    fn new(n: usize, h: f64) -> Self {
        assert!(n >= 5);
        Self { n, h }
    }

    fn row(&self, i: usize) -> Vec<(usize, f64)> {
        let s = 1.0 / (12.0 * self.h);
        let n = self.n;
        match i {
            0 => (0..5).map(|j| (j, EDGE0[j] * s)).collect(),
            1 => (0..5).map(|j| (j, EDGE1[j] * s)).collect(),
            _ if i == n - 1 => (0..5).map(|j| (n - 1 - j, -EDGE0[j] * s)).collect(),
            _ if i == n - 2 => (0..5).map(|j| (n - 1 - j, -EDGE1[j] * s)).collect(),
            _ => (0..5)
                .map(|j| (i + j - 2, CENTER[j] * s))
                .filter(|(_, c)| *c != 0.0)
                .collect(),
        }
    }

    fn apply(&self, w: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).into_iter().map(|(j, c)| c * w[j]).sum())
            .collect()
    }
}

/// β̇ the stroke's rates produce along the protocol, for diagnostics.
pub fn realized_beta_dot(solution: &SteSolution, t: f64, beta: f64) -> Result<f64> {
    let (w, wd) = solution.protocol.eval(t);
    let r = name_rates(w, wd, &solution.bath)?;
    Ok(r.beta_dot(beta))
}
