//! Driving Lévy noise: Gaussian (Brownian) and normal inverse Gaussian.
//!
//! Increments over a time step `dt` follow from infinite divisibility: a
//! Gaussian increment is `N(0, σ² dt)` and an NIG increment is
//! `NIG(α, β, δ dt, μ dt)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Law of `L(1)` for the driving Lévy process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LevySpec {
    #[serde(alias = "gauss")]
    Gaussian { sigma2: f64 },
    Nig {
        alpha: f64,
        beta: f64,
        delta: f64,
        mu: f64,
    },
}

impl LevySpec {
    pub fn gaussian(sigma2: f64) -> Result<Self> {
        let spec = LevySpec::Gaussian { sigma2 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn nig(alpha: f64, beta: f64, delta: f64, mu: f64) -> Result<Self> {
        let spec = LevySpec::Nig {
            alpha,
            beta,
            delta,
            mu,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// NIG law centered by choosing `μ = -δβ/κ`.
    pub fn centered_nig(alpha: f64, beta: f64, delta: f64) -> Result<Self> {
        let kappa = (alpha * alpha - beta * beta).sqrt();
        Self::nig(alpha, beta, delta, -delta * beta / kappa)
    }

    /// Gaussian noise with `σ² = 0.2`.
    pub fn default_gaussian() -> Self {
        LevySpec::Gaussian { sigma2: 0.2 }
    }

    /// NIG noise with `α = 3, β = 1, δ = 2, μ = -2/√8`, mean zero and
    /// variance `9√2/16`.
    pub fn default_nig() -> Self {
        LevySpec::Nig {
            alpha: 3.0,
            beta: 1.0,
            delta: 2.0,
            mu: -2.0 / 8f64.sqrt(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            LevySpec::Gaussian { sigma2 } => {
                if !(sigma2 > 0.0 && sigma2.is_finite()) {
                    return Err(Error::Parameter(format!(
                        "Gaussian variance must be positive and finite, got {sigma2}"
                    )));
                }
            }
            LevySpec::Nig {
                alpha,
                beta,
                delta,
                mu,
            } => {
                if ![alpha, beta, delta, mu].iter().all(|v| v.is_finite()) {
                    return Err(Error::Parameter("NIG parameters must be finite".into()));
                }
                if !(alpha >= 0.0 && alpha * alpha > beta * beta) {
                    return Err(Error::Parameter(format!(
                        "NIG requires alpha^2 > beta^2 with alpha >= 0, got alpha={alpha}, beta={beta}"
                    )));
                }
                if !(delta > 0.0) {
                    return Err(Error::Parameter(format!(
                        "NIG scale delta must be positive, got {delta}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn kappa(alpha: f64, beta: f64) -> f64 {
        (alpha * alpha - beta * beta).sqrt()
    }

    /// Mean and variance `Σ_L` of `L(1)`.
    pub fn moments(&self) -> Result<(f64, f64)> {
        self.validate()?;
        Ok(match *self {
            LevySpec::Gaussian { sigma2 } => (0.0, sigma2),
            LevySpec::Nig {
                alpha,
                beta,
                delta,
                mu,
            } => {
                let kappa = Self::kappa(alpha, beta);
                (mu + delta * beta / kappa, delta * alpha * alpha / kappa.powi(3))
            }
        })
    }

    /// Variance `Σ_L` of `L(1)`.
    pub fn variance(&self) -> Result<f64> {
        Ok(self.moments()?.1)
    }

    /// Third and fourth cumulants of `L(1)`.
    pub fn higher_cumulants(&self) -> Result<(f64, f64)> {
        self.validate()?;
        Ok(match *self {
            LevySpec::Gaussian { .. } => (0.0, 0.0),
            LevySpec::Nig {
                alpha, beta, delta, ..
            } => {
                let kappa = Self::kappa(alpha, beta);
                let a2 = alpha * alpha;
                (
                    3.0 * delta * a2 * beta / kappa.powi(5),
                    3.0 * delta * a2 * (a2 + 4.0 * beta * beta) / kappa.powi(7),
                )
            }
        })
    }

    /// `true` when `E[L(1)] = 0` to within `1e-12`.
    pub fn is_centered(&self) -> bool {
        self.moments().map(|(m, _)| m.abs() <= 1e-12).unwrap_or(false)
    }

    /// Precomputes the constants needed to draw increments over a fixed `dt`.
    pub fn increment_sampler(&self, dt: f64) -> Result<IncrementSampler> {
        self.validate()?;
        if !(dt >= 0.0) || !dt.is_finite() {
            return Err(Error::Domain(format!("increment length {dt} must be >= 0")));
        }
        Ok(match *self {
            LevySpec::Gaussian { sigma2 } => IncrementSampler::Gaussian {
                sd: (sigma2 * dt).sqrt(),
            },
            LevySpec::Nig {
                alpha,
                beta,
                delta,
                mu,
            } => {
                let kappa = Self::kappa(alpha, beta);
                let scale = delta * dt;
                IncrementSampler::Nig {
                    beta,
                    shift: mu * dt,
                    ig_mean: scale / kappa,
                    ig_shape: scale * scale,
                }
            }
        })
    }

    /// One increment `L(t + dt) - L(t)`.
    pub fn sample_increment(&self, dt: f64, rng: &mut RngStream) -> Result<f64> {
        Ok(self.increment_sampler(dt)?.sample(rng))
    }
}

/// Increment generator for a fixed step size.
#[derive(Debug, Clone, Copy)]
pub enum IncrementSampler {
    Gaussian {
        sd: f64,
    },
    /// Normal variance-mean mixture `μ dt + β Z + √Z ξ` with `Z ~ IG(ig_mean, ig_shape)`.
    Nig {
        beta: f64,
        shift: f64,
        ig_mean: f64,
        ig_shape: f64,
    },
}

impl IncrementSampler {
    #[inline]
    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        match *self {
            IncrementSampler::Gaussian { sd } => {
                if sd == 0.0 {
                    0.0
                } else {
                    sd * rng.standard_normal()
                }
            }
            IncrementSampler::Nig {
                beta,
                shift,
                ig_mean,
                ig_shape,
            } => {
                if ig_mean == 0.0 {
                    return 0.0;
                }
                let z = inverse_gaussian(ig_mean, ig_shape, rng);
                shift + beta * z + z.sqrt() * rng.standard_normal()
            }
        }
    }
}

/// Inverse Gaussian draw by the Michael–Schucany–Haas transformation.
///
/// The root is written as `m · 4mλy / (s + my)²` with `s = √(my(4λ + my))`,
/// which avoids the cancellation of the textbook form when `my/λ` is large
/// (small time steps make the mixing law extremely skewed).
#[inline]
pub fn inverse_gaussian(mean: f64, shape: f64, rng: &mut RngStream) -> f64 {
    let nu = rng.standard_normal();
    let y = nu * nu;
    let x = if y == 0.0 {
        mean
    } else {
        let my = mean * y;
        let s = (my * (4.0 * shape + my)).sqrt();
        let d = s + my;
        mean * 4.0 * shape * my / (d * d)
    };
    let u = rng.uniform();
    if u * (mean + x) <= mean {
        x
    } else {
        mean * mean / x
    }
}
