//! Steady-state Kalman filter of a sampled state space model, truncated
//! innovations over an observation window and the localized quasi maximum
//! likelihood estimator built on them.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{kernel_weights, KernelKind};
use crate::optimize::{de_minimize, DeConfig, DeResult};
use crate::simulate::Window;
use crate::statespace::{check_assumptions, spectral_radius, AssumptionReport, ModelFamily, SampledModel};

const PLAIN_ITERATIONS: usize = 1_000;
const MAX_ITERATIONS: usize = 100_000;
const TOL: f64 = 1e-13;

/// Steady-state solution `(Ω, K, V)` of the filter Riccati equation.
#[derive(Debug, Clone, PartialEq)]
pub struct KalmanSteady {
    pub omega: DMatrix<f64>,
    pub k: DVector<f64>,
    pub v: f64,
    /// Closed-loop map `Φ - K B'`.
    pub phi_closed: DMatrix<f64>,
    /// Frobenius norm of the Riccati residual at `Ω`.
    pub residual: f64,
    pub iterations: usize,
}

fn riccati_rhs(phi: &DMatrix<f64>, q: &DMatrix<f64>, b: &DVector<f64>, omega: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let v = (b.transpose() * omega * b)[(0, 0)];
    if !(v > 0.0) {
        return Err(Error::Degenerate(v));
    }
    let g = phi * omega * b;
    Ok(phi * omega * phi.transpose() + q - &g * g.transpose() / v)
}

/// Solves `X = L X L' + Q` by doubling: `X = Σ_j L^j Q L'^j`.
fn stein_doubling(l: &DMatrix<f64>, q: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let mut x = q.clone();
    let mut a = l.clone();
    for _ in 0..64 {
        x = &x + &a * &x * a.transpose();
        a = &a * &a;
        if a.abs().max() < 1e-18 {
            return Some(x);
        }
        if !a.iter().all(|v| v.is_finite()) {
            return None;
        }
    }
    None
}

/// Solves `Ω = ΦΩΦ' + Q - (ΦΩB)(B'ΩB)^{-1}(ΦΩB)'` by fixed-point iteration from
/// `Ω_0 = Q`. If the plain iteration has not converged after 10³ steps, it
/// switches to Newton steps whose linear (Stein) equations are solved by
/// squaring the closed-loop map.
pub fn solve_riccati(phi: &DMatrix<f64>, qn: &DMatrix<f64>, b: &DVector<f64>) -> Result<KalmanSteady> {
    let mut omega = qn.clone();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < PLAIN_ITERATIONS {
        let next = riccati_rhs(phi, qn, b, &omega)?;
        iterations += 1;
        let step = (&next - &omega).norm();
        let scale = 1.0 + omega.norm();
        omega = next;
        if step <= TOL * scale {
            converged = true;
            break;
        }
    }
    if !converged {
        // Newton (Hewer) refinement, falling back to plain iteration when the
        // current gain does not stabilize the closed loop
        while iterations < MAX_ITERATIONS {
            let v = (b.transpose() * &omega * b)[(0, 0)];
            if !(v > 0.0) {
                return Err(Error::Degenerate(v));
            }
            let k = phi * &omega * b / v;
            let l = phi - &k * b.transpose();
            let next = if spectral_radius(&l) < 1.0 {
                stein_doubling(&l, qn).ok_or_else(|| Error::Numeric("doubling step diverged".into()))?
            } else {
                riccati_rhs(phi, qn, b, &omega)?
            };
            iterations += 1;
            let step = (&next - &omega).norm();
            let scale = 1.0 + omega.norm();
            omega = next;
            if step <= TOL * scale {
                converged = true;
                break;
            }
        }
    }
    omega = (&omega + omega.transpose()) * 0.5;
    let residual = (riccati_rhs(phi, qn, b, &omega)? - &omega).norm();
    if !converged {
        return Err(Error::Numeric(format!(
            "Riccati iteration did not converge in {iterations} steps (residual {residual:e})"
        )));
    }
    let v = (b.transpose() * &omega * b)[(0, 0)];
    if !(v > 0.0) {
        return Err(Error::Degenerate(v));
    }
    let k = phi * &omega * b / v;
    let phi_closed = phi - &k * b.transpose();
    let rho = spectral_radius(&phi_closed);
    if !(rho < 1.0) {
        return Err(Error::Numeric(format!("closed-loop map is not stable (spectral radius {rho})")));
    }
    Ok(KalmanSteady {
        omega,
        k,
        v,
        phi_closed,
        residual,
        iterations,
    })
}

impl KalmanSteady {
    pub fn for_model(model: &SampledModel) -> Result<Self> {
        solve_riccati(&model.phi, &model.qn, &model.b)
    }
}

/// Linear innovations `ε̃_i = y_{i+1} - B' X̃_{i+1}`, `i = -m..m-1`, with the
/// predictor `X̃_{j+1} = (Φ - K B') X̃_j + K y_j` started at 0 on the left edge
/// of the window (or of its history, if the window carries one).
pub fn truncated_innovations(window: &Window, model: &SampledModel, ks: &KalmanSteady) -> Vec<f64> {
    let p = model.dim();
    let mut out = Vec::with_capacity(window.values.len().saturating_sub(1));
    let mut x = vec![0.0; p];
    let mut tmp = vec![0.0; p];
    let step = |x: &mut Vec<f64>, tmp: &mut Vec<f64>, y: f64| {
        for i in 0..p {
            let mut s = ks.k[i] * y;
            for j in 0..p {
                s += ks.phi_closed[(i, j)] * x[j];
            }
            tmp[i] = s;
        }
        std::mem::swap(x, tmp);
    };
    if let Some(h) = &window.history {
        for &y in h {
            step(&mut x, &mut tmp, y);
        }
    }
    let y = &window.values;
    for k in 0..y.len().saturating_sub(1) {
        step(&mut x, &mut tmp, y[k]);
        let pred: f64 = (0..p).map(|i| model.b[i] * x[i]).sum();
        out.push(y[k + 1] - pred);
    }
    out
}

/// Innovations from the explicit truncated sum
/// `ε̃_i = y_{i+1} - B' Σ_{n=1}^{m+i+1} (Φ - K B')^{n-1} K y_{i+1-n}`.
pub fn truncated_innovations_sum(window: &Window, model: &SampledModel, ks: &KalmanSteady) -> Vec<f64> {
    let y = &window.values;
    let len = y.len();
    // c_n = B' L^{n-1} K
    let mut coef = Vec::with_capacity(len);
    let mut lk = ks.k.clone();
    for _ in 0..len {
        coef.push(model.b.dot(&lk));
        lk = &ks.phi_closed * lk;
    }
    (0..len - 1)
        .map(|k| {
            let pred: f64 = (1..=k + 1).map(|n| coef[n - 1] * y[k + 1 - n]).sum();
            y[k + 1] - pred
        })
        .collect()
}

/// Everything the objective needs at one parameter value.
struct Evaluated {
    model: SampledModel,
    ks: KalmanSteady,
}

fn evaluate_at(family: &dyn ModelFamily, theta: &[f64], delta: f64) -> Result<Evaluated> {
    let model = SampledModel::from_family(family, theta, delta)?;
    let ks = KalmanSteady::for_model(&model)?;
    Ok(Evaluated { model, ks })
}

fn objective_from(window: &Window, weights: &[f64], ev: &Evaluated) -> f64 {
    let eps = truncated_innovations(window, &ev.model, &ev.ks);
    let c = (2.0 * std::f64::consts::PI).ln() + ev.ks.v.ln();
    let inv_v = 1.0 / ev.ks.v;
    eps.iter().zip(weights).map(|(e, w)| w * (c + e * e * inv_v)).sum()
}

/// `Σ_{i=-m}^{m-1} w_i (log 2π + log V_ϑ + ε̃_i² / V_ϑ)`, or `+∞` when the
/// sampled model or its Riccati equation cannot be solved at `theta`.
pub fn qmle_objective(window: &Window, weights: &[f64], family: &dyn ModelFamily, theta: &[f64], delta: f64) -> f64 {
    match evaluate_at(family, theta, delta) {
        Ok(ev) => {
            debug_assert!(ev.ks.residual <= 1e-10 * (1.0 + ev.ks.omega.norm()));
            objective_from(window, weights, &ev)
        }
        Err(_) => f64::INFINITY,
    }
}

/// Result of a state space estimator at one estimation point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSpaceEstimate {
    pub theta_hat: Vec<f64>,
    /// Minimized objective value.
    pub objective: f64,
    /// Riccati residual at `theta_hat`.
    pub riccati_residual: f64,
    pub generations: usize,
    pub evaluations: usize,
    pub infeasible: usize,
    pub converged: bool,
}

pub(crate) fn require_unit_lag(window: &Window, what: &str) -> Result<()> {
    if !window.grid.is_unit_lag_o1() {
        return Err(Error::Config(format!(
            "{what} needs an O1 grid with N * delta_N = Delta; consistency is only established there"
        )));
    }
    Ok(())
}

pub(crate) fn diagnostics(family: &dyn ModelFamily, res: &DeResult, delta: f64) -> Result<StateSpaceEstimate> {
    let ev = evaluate_at(family, &res.x, delta)?;
    Ok(StateSpaceEstimate {
        theta_hat: res.x.clone(),
        objective: res.value,
        riccati_residual: ev.ks.residual,
        generations: res.generations,
        evaluations: res.evaluations,
        infeasible: res.infeasible,
        converged: res.converged,
    })
}

/// Localized truncated QMLE: minimizes [`qmle_objective`] over the family's box.
pub fn qmle_estimate(window: &Window, kind: KernelKind, family: &dyn ModelFamily, de: &DeConfig) -> Result<StateSpaceEstimate> {
    require_unit_lag(window, "the QML estimator")?;
    if window.is_all_zero() {
        return Err(Error::Estimation("degenerate window: all observations are zero".into()));
    }
    let weights = kernel_weights(kind, &window.grid);
    let delta = window.grid.lag();
    let res = de_minimize(|th| qmle_objective(window, &weights, family, th, delta), family.theta_box(), de)
        .map_err(|e| Error::Estimation(format!("no feasible parameter: {e}")))?;
    diagnostics(family, &res, delta)
}

/// Assumption report at a single parameter value (a degenerate box).
pub fn assumptions_at(family: &dyn ModelFamily, theta: &[f64], delta: f64) -> Result<AssumptionReport> {
    let point = crate::optimize::ParamBox::new(theta.to_vec(), theta.to_vec())?;
    Ok(check_assumptions(family, &point, delta, 1))
}
