//! Localized autocovariances, localized periodogram and the localized
//! Whittle estimator.
//!
//! With `z_j = √K(jδ_N/b_N) y_j` the periodogram is
//! `I(ω) = (δ_N/(2π b_N)) |Σ_j z_j e^{-ijω}|²`, evaluated on the
//! `M = 4m + 2` frequencies `ω_j = πj/(2m+1)`, `j = -2m..=2m+1`. These are
//! exactly the DFT frequencies of length `M`, so one FFT gives all of them.

use std::f64::consts::PI;

use rustfft::{num_complex::Complex, FftPlanner};

use crate::error::{Error, Result};
use crate::kalman::{diagnostics, require_unit_lag, StateSpaceEstimate};
use crate::kernels::{kernel_values, KernelKind};
use crate::optimize::{de_minimize, DeConfig};
use crate::simulate::Window;
use crate::statespace::{ModelFamily, RationalSpectrum, SampledModel};

fn sqrt_kernel(window: &Window, kind: KernelKind) -> Result<Vec<f64>> {
    kernel_values(kind, &window.grid)
        .into_iter()
        .map(|k| {
            if k < 0.0 {
                Err(Error::Kernel(format!("negative kernel value {k}; only nonnegative kernels are admitted")))
            } else {
                Ok(k.sqrt())
            }
        })
        .collect()
}

fn tapered(window: &Window, kind: KernelKind) -> Result<Vec<f64>> {
    Ok(sqrt_kernel(window, kind)?.iter().zip(&window.values).map(|(s, y)| s * y).collect())
}

/// `Γ̂(h) = (δ_N/b_N) Σ_j √(K_j K_{j+h}) y_j y_{j+h}`; zero for `h > 2m`.
pub fn local_autocov(window: &Window, kind: KernelKind, h: usize) -> Result<f64> {
    let z = tapered(window, kind)?;
    let scale = window.grid.delta_n() / window.grid.bandwidth();
    if h >= z.len() {
        return Ok(0.0);
    }
    Ok(scale * (0..z.len() - h).map(|j| z[j] * z[j + h]).sum::<f64>())
}

/// Product form `(δ_N/(2π b_N)) |Σ_j √K_j y_j e^{-ijω}|²`, `j = -m..=m`.
pub fn local_periodogram(window: &Window, kind: KernelKind, omega: f64) -> Result<f64> {
    let z = tapered(window, kind)?;
    let m = window.grid.m() as i64;
    let (mut re, mut im) = (0.0, 0.0);
    for (k, zk) in z.iter().enumerate() {
        let a = -((k as i64 - m) as f64) * omega;
        re += zk * a.cos();
        im += zk * a.sin();
    }
    let scale = window.grid.delta_n() / (2.0 * PI * window.grid.bandwidth());
    Ok(scale * (re * re + im * im))
}

/// Cosine form `(1/2π) Σ_{|h| ≤ 2m} Γ̂(h) e^{-ihω}` from autocovariances `Γ̂(0..=2m)`.
pub fn periodogram_from_autocov(autocov: &[f64], omega: f64) -> f64 {
    let mut s = autocov.first().copied().unwrap_or(0.0);
    for (h, g) in autocov.iter().enumerate().skip(1) {
        s += 2.0 * g * (h as f64 * omega).cos();
    }
    s / (2.0 * PI)
}

/// The Whittle frequency grid `ω_j = πj/(2m+1)`, `j = -2m..=2m+1`.
pub fn whittle_frequencies(m: usize) -> Vec<f64> {
    let m = m as i64;
    (-2 * m..=2 * m + 1).map(|j| PI * j as f64 / (2 * m + 1) as f64).collect()
}

/// Periodogram on the Whittle grid together with the autocovariances.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalSpectrum {
    pub m: usize,
    pub frequencies: Vec<f64>,
    /// `I(ω_j)` aligned with `frequencies`.
    pub periodogram: Vec<f64>,
    /// `Γ̂(h)`, `h = 0..=2m`.
    pub autocov: Vec<f64>,
}

impl LocalSpectrum {
    /// Computes everything with one forward and one inverse FFT of length `4m + 2`.
    pub fn new(window: &Window, kind: KernelKind) -> Result<Self> {
        let z = tapered(window, kind)?;
        let m = window.grid.m();
        let big_m = 4 * m + 2;
        let ratio = window.grid.delta_n() / window.grid.bandwidth();
        let mut buf: Vec<Complex<f64>> = z.iter().map(|&v| Complex::new(v, 0.0)).collect();
        buf.resize(big_m, Complex::new(0.0, 0.0));
        let mut planner = FftPlanner::new();
        planner.plan_fft_forward(big_m).process(&mut buf);
        let power: Vec<f64> = buf.iter().map(|c| c.norm_sqr()).collect();

        // bin j mod M holds Σ_k z_k e^{-2πi jk/M}; the shift to j = -m..m only changes the phase
        let frequencies = whittle_frequencies(m);
        let mm = m as i64;
        let periodogram = (-2 * mm..=2 * mm + 1)
            .map(|j| ratio / (2.0 * PI) * power[j.rem_euclid(big_m as i64) as usize])
            .collect();

        // |Z|² transforms back to the circular autocorrelation; M > 2(2m+1) - 2 rules out wrap-around
        let mut ac: Vec<Complex<f64>> = power.iter().map(|&p| Complex::new(p, 0.0)).collect();
        planner.plan_fft_inverse(big_m).process(&mut ac);
        let autocov = ac[..=2 * m].iter().map(|c| ratio * c.re / big_m as f64).collect();

        Ok(Self {
            m,
            frequencies,
            periodogram,
            autocov,
        })
    }
}

/// Precomputed data for repeated Whittle objective evaluations on one window.
///
/// Both the periodogram and any spectral density are even in `ω`, so the
/// grid is folded onto `ω_0..ω_{2m+1}` with multiplicities 1, 2, …, 2, 1.
#[derive(Debug, Clone)]
pub struct WhittleProblem {
    spectrum: LocalSpectrum,
    half_periodogram: Vec<f64>,
    multiplicity: Vec<f64>,
    /// `cos(d ω_j)` for `d = 0..order`, row-major by `j`.
    cos: Vec<f64>,
    order: usize,
    delta: f64,
}

impl WhittleProblem {
    pub fn new(window: &Window, kind: KernelKind, state_dim: usize) -> Result<Self> {
        let spectrum = LocalSpectrum::new(window, kind)?;
        let m = spectrum.m;
        let half_periodogram: Vec<f64> = spectrum.periodogram[2 * m..].to_vec();
        let mut multiplicity = vec![2.0; half_periodogram.len()];
        multiplicity[0] = 1.0;
        *multiplicity.last_mut().unwrap() = 1.0;
        let order = state_dim + 1;
        let mut cos = Vec::with_capacity(order * half_periodogram.len());
        for w in &spectrum.frequencies[2 * m..] {
            for d in 0..order {
                cos.push((d as f64 * w).cos());
            }
        }
        Ok(Self {
            spectrum,
            half_periodogram,
            multiplicity,
            cos,
            order,
            delta: window.grid.lag(),
        })
    }

    pub fn spectrum(&self) -> &LocalSpectrum {
        &self.spectrum
    }

    /// `W(ϑ)` for the sampled model at `theta`.
    pub fn objective(&self, family: &dyn ModelFamily, theta: &[f64]) -> Result<f64> {
        let model = SampledModel::from_family(family, theta, self.delta)?;
        self.objective_for(&model)
    }

    pub fn objective_for(&self, model: &SampledModel) -> Result<f64> {
        let rs = RationalSpectrum::new(model);
        if rs.order() != self.order {
            return Err(Error::Config(format!(
                "problem prepared for state dimension {}, model has {}",
                self.order - 1,
                rs.order() - 1
            )));
        }
        let mut total = 0.0;
        for (j, (&i_j, &mult)) in self.half_periodogram.iter().zip(&self.multiplicity).enumerate() {
            let f = rs.eval_cos(&self.cos[j * self.order..(j + 1) * self.order]);
            if !(f > 0.0 && f.is_finite()) {
                return Err(Error::Numeric(format!(
                    "spectral density {f} is not positive at omega = {}",
                    self.spectrum.frequencies[2 * self.spectrum.m + j]
                )));
            }
            total += mult * (i_j / f + f.ln());
        }
        Ok(total / self.spectrum.periodogram.len() as f64)
    }
}

/// `W(ϑ) = (1/(4m+2)) Σ_j (I(ω_j)/f(ω_j, ϑ) + log f(ω_j, ϑ))`, evaluating `f`
/// directly at every grid frequency.
pub fn whittle_objective(window: &Window, kind: KernelKind, family: &dyn ModelFamily, theta: &[f64], delta: f64) -> Result<f64> {
    let spec = LocalSpectrum::new(window, kind)?;
    let model = SampledModel::from_family(family, theta, delta)?;
    let mut total = 0.0;
    for (w, i_j) in spec.frequencies.iter().zip(&spec.periodogram) {
        let f = model.spectral_density(*w)?;
        if !(f > 0.0) {
            return Err(Error::Numeric(format!("spectral density {f} is not positive at omega = {w}")));
        }
        total += i_j / f + f.ln();
    }
    Ok(total / spec.frequencies.len() as f64)
}

/// Whittle estimate together with the optimizer diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct WhittleEstimate {
    pub estimate: StateSpaceEstimate,
    /// Minimized Whittle objective (equal to `estimate.objective`).
    pub whittle_value: f64,
}

/// Localized Whittle estimator: minimizes `W` over the family's box.
pub fn whittle_estimate(window: &Window, kind: KernelKind, family: &dyn ModelFamily, de: &DeConfig) -> Result<WhittleEstimate> {
    require_unit_lag(window, "the Whittle estimator")?;
    if window.is_all_zero() {
        return Err(Error::Estimation("degenerate window: all observations are zero".into()));
    }
    let problem = WhittleProblem::new(window, kind, family.state_dim())?;
    let res = de_minimize(
        |th| problem.objective(family, th).unwrap_or(f64::INFINITY),
        family.theta_box(),
        de,
    )
    .map_err(|e| Error::Estimation(format!("no feasible parameter: {e}")))?;
    let estimate = diagnostics(family, &res, window.grid.lag())?;
    Ok(WhittleEstimate {
        whittle_value: res.value,
        estimate,
    })
}
