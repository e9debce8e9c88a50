//! Localized least-squares estimation of the coefficient `a(u)` of a
//! time-varying Ornstein–Uhlenbeck process.
//!
//! The contrast pairs each observation with the one `Δ` later in process
//! time, `M(ϑ) = Σ_i w_i (y_{i+L} - e^{-Δϑ} y_i)²`, whose minimizer has the
//! closed form `-log(r)/Δ` with `r = Σ w_i y_{i+L} y_i / Σ w_i y_i²`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{kernel_weights, KernelKind};
use crate::optimize::{de_minimize, DeConfig, ParamBox};
use crate::simulate::{SamplingGrid, Scheme, Window};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LseEstimate {
    pub a_hat: f64,
    /// Plug-in asymptotic variance `Σ(â)`.
    pub sigma_u_hat: f64,
    /// Set by [`LseEstimate::with_truth`].
    pub std_error: Option<f64>,
    pub theta_box: (f64, f64),
    /// The estimate sits on a box edge because `-log(r)/Δ` fell outside the box.
    pub clamped: bool,
    /// Autoregression ratio `r`.
    pub ratio: f64,
}

impl LseEstimate {
    pub fn with_truth(mut self, a_true: f64, grid: &SamplingGrid) -> Self {
        self.std_error = Some(lse_standardized_error(&self, a_true, grid));
        self
    }
}

/// Number of grid steps between paired observations and the resulting
/// process-time gap. Under `O1` with `N δ_N = Δ` this is one step of length
/// `Δ`; otherwise the grid point nearest to `Δ` is used.
pub fn pair_lag(grid: &SamplingGrid) -> (usize, f64) {
    if grid.is_unit_lag_o1() {
        return (1, grid.lag());
    }
    let step = grid.process_spacing();
    let l = ((grid.lag() / step).round() as usize).max(1);
    (l, l as f64 * step)
}

/// Least-squares contrast `Σ_i w_i (y_{i+L} - e^{-Δϑ} y_i)²`; the last `L`
/// weights have no partner and are skipped.
pub fn lse_contrast(window: &Window, weights: &[f64], theta: f64) -> f64 {
    let (l, gap) = pair_lag(&window.grid);
    let phi = (-gap * theta).exp();
    let y = &window.values;
    (0..y.len().saturating_sub(l))
        .map(|k| {
            let e = y[k + l] - phi * y[k];
            weights[k] * e * e
        })
        .sum()
}

/// Closed-form minimizer of [`lse_contrast`] over `theta_box = (lo, hi)`.
pub fn lse_estimate(window: &Window, kind: KernelKind, theta_box: (f64, f64)) -> Result<LseEstimate> {
    let (lo, hi) = theta_box;
    if !(lo > 0.0 && lo < hi && hi.is_finite()) {
        return Err(Error::Config(format!("LSE box must satisfy 0 < lo < hi, got [{lo}, {hi}]")));
    }
    let grid = &window.grid;
    let w = kernel_weights(kind, grid);
    let (l, gap) = pair_lag(grid);
    let y = &window.values;
    let (mut num, mut den) = (0.0, 0.0);
    for k in 0..y.len().saturating_sub(l) {
        num += w[k] * y[k + l] * y[k];
        den += w[k] * y[k] * y[k];
    }
    if !(den > 0.0) {
        return Err(Error::Estimation("degenerate window: weighted sum of squares is zero".into()));
    }
    let r = num / den;
    let (a_hat, clamped) = if r >= (-gap * lo).exp() {
        (lo, true)
    } else if r <= (-gap * hi).exp() {
        (hi, true)
    } else {
        ((-r.ln() / gap).clamp(lo, hi), false)
    };
    let sigma_u_hat = lse_asymp_variance(a_hat, gap, grid.process_spacing(), grid.scheme())?;
    Ok(LseEstimate {
        a_hat,
        sigma_u_hat,
        std_error: None,
        theta_box,
        clamped,
        ratio: r,
    })
}

/// Minimizes [`lse_contrast`] numerically; used to cross-check the closed form.
pub fn lse_estimate_numeric(window: &Window, kind: KernelKind, theta_box: (f64, f64), de: &DeConfig) -> Result<f64> {
    let w = kernel_weights(kind, &window.grid);
    let bounds = ParamBox::new(vec![theta_box.0], vec![theta_box.1])?;
    let res = de_minimize(|th| lse_contrast(window, &w, th[0]), &bounds, de)?;
    Ok(res.x[0])
}

/// Asymptotic variance `Σ(u)` of the estimator at coefficient value `a`, for
/// contrast step `delta_lag` (`Δ`) and observation spacing `delta` (`δ = N δ_N`).
pub fn lse_asymp_variance(a: f64, delta_lag: f64, delta: f64, scheme: Scheme) -> Result<f64> {
    for (name, v) in [("a", a), ("Delta", delta_lag), ("delta", delta)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Domain(format!("{name} must be positive, got {v}")));
        }
    }
    let d = delta_lag;
    let e2 = (2.0 * a * d).exp();
    let value = match scheme {
        Scheme::O2 => (e2 - 1.0) / (2.0 * d * d),
        Scheme::O1 => {
            let c = (d / delta - 1e-9).ceil().max(1.0);
            let q = (-2.0 * a * delta).exp();
            let geom = if c > 1.0 { q * (1.0 - q.powf(c - 1.0)) / (1.0 - q) } else { 0.0 };
            (e2 + 2.0 * e2 * geom - 2.0 * c + 1.0) / (2.0 * d * d)
        }
    };
    Ok(value)
}

/// `√(b_N/δ_N) (â - a) / √Σ(â)`.
pub fn lse_standardized_error(estimate: &LseEstimate, a_true: f64, grid: &SamplingGrid) -> f64 {
    (grid.bandwidth() / grid.delta_n()).sqrt() * (estimate.a_hat - a_true) / estimate.sigma_u_hat.sqrt()
}
