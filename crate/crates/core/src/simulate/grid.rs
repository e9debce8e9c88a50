use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Asymptotic regime of the observation spacing.
///
/// Under `O1` the spacing in the process' own time scale is fixed,
/// `N δ_N = δ`; under `O2` it diverges, `N δ_N → ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    O1,
    O2,
}

/// Equidistant observation grid `τ_i = u + i δ_N`, `i = -m_N..=m_N`,
/// around the estimation point `u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingGrid {
    n: u32,
    delta_n: f64,
    bandwidth: f64,
    u: f64,
    lag: f64,
    scheme: Scheme,
    m: usize,
}

impl SamplingGrid {
    /// * `n` - rescaling parameter `N`
    /// * `delta_n` - observation spacing `δ_N` (rescaled time)
    /// * `bandwidth` - `b_N`
    /// * `u` - estimation point
    /// * `lag` - contrast step size `Δ` (process time)
    pub fn new(
        n: u32,
        delta_n: f64,
        bandwidth: f64,
        u: f64,
        lag: f64,
        scheme: Scheme,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("N must be a positive integer".into()));
        }
        for (name, v) in [("delta_N", delta_n), ("b_N", bandwidth), ("u", u), ("Delta", lag)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        let ratio = bandwidth / delta_n;
        // tolerate representation error when b_N is an exact multiple of δ_N
        let m = (ratio * (1.0 + 1e-12)).floor();
        if m < 1.0 {
            return Err(Error::Config(format!(
                "window holds no neighbours: b_N / delta_N = {ratio} < 1"
            )));
        }
        if scheme == Scheme::O1 {
            let spacing = n as f64 * delta_n;
            if (spacing - lag).abs() > 1e-12 * lag.max(1.0) {
                return Err(Error::Config(format!(
                    "scheme O1 requires N * delta_N = Delta, got {spacing} vs {lag}"
                )));
            }
        }
        Ok(Self {
            n,
            delta_n,
            bandwidth,
            u,
            lag,
            scheme,
            m: m as usize,
        })
    }

    /// Grid of the simulation study: `δ_N = 1/N`, `b_N = 400/√N`, `Δ = 1`,
    /// hence `m_N = ⌊400 √N⌋`.
    pub fn study_o1(n: u32, u: f64) -> Result<Self> {
        let nf = n as f64;
        Self::new(n, 1.0 / nf, 400.0 / nf.sqrt(), u, 1.0, Scheme::O1)
    }

    /// An `O2` grid with `δ_N = N^{-1/2}` and `b_N = 400/√N`.
    pub fn study_o2(n: u32, u: f64, lag: f64) -> Result<Self> {
        let nf = n as f64;
        Self::new(n, nf.powf(-0.5), 400.0 / nf.sqrt(), u, lag, Scheme::O2)
    }

    /// Same grid shifted to a new estimation point.
    pub fn at(&self, u: f64) -> Result<Self> {
        Self::new(self.n, self.delta_n, self.bandwidth, u, self.lag, self.scheme)
    }

    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn delta_n(&self) -> f64 {
        self.delta_n
    }
    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }
    pub fn u(&self) -> f64 {
        self.u
    }
    /// Contrast step `Δ`.
    pub fn lag(&self) -> f64 {
        self.lag
    }
    pub fn scheme(&self) -> Scheme {
        self.scheme
    }
    /// `m_N = ⌊b_N / δ_N⌋`.
    pub fn m(&self) -> usize {
        self.m
    }
    /// Number of observations `2 m_N + 1`.
    pub fn len(&self) -> usize {
        2 * self.m + 1
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    /// Observation spacing in process time, `δ = N δ_N`.
    pub fn process_spacing(&self) -> f64 {
        self.n as f64 * self.delta_n
    }

    /// `true` when the grid satisfies `O1` with `N δ_N = Δ`, i.e. consecutive
    /// observations are exactly one contrast step apart.
    pub fn is_unit_lag_o1(&self) -> bool {
        self.scheme == Scheme::O1
            && (self.process_spacing() - self.lag).abs() <= 1e-12 * self.lag.max(1.0)
    }

    /// Observation time `τ_i` for `i = -m_N..=m_N`.
    pub fn time(&self, i: i64) -> f64 {
        self.u + i as f64 * self.delta_n
    }

    /// All observation times, left to right.
    pub fn times(&self) -> Vec<f64> {
        let m = self.m as i64;
        (-m..=m).map(|i| self.time(i)).collect()
    }
}
