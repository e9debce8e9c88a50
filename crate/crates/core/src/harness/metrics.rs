use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::simulate::CoefficientCurve;

/// Spacing of a uniform estimation grid.
pub fn grid_spacing(u: &[f64]) -> Result<f64> {
    if u.len() < 2 {
        return Err(Error::Config("MISE needs at least two estimation points".into()));
    }
    let du = u[1] - u[0];
    if !(du > 0.0) || u.windows(2).any(|w| ((w[1] - w[0]) - du).abs() > 1e-9 * du.max(1.0)) {
        return Err(Error::Config("estimation points must be equidistant and increasing".into()));
    }
    Ok(du)
}

/// `mean_r Σ_i (θ̂_r(u_i) - θ(u_i))² Δu` for estimates indexed `[replication][point]`.
pub fn mise(u: &[f64], estimates: &[Vec<f64>], truth: &CoefficientCurve) -> Result<f64> {
    let du = grid_spacing(u)?;
    if estimates.is_empty() {
        return Err(Error::Config("no replications".into()));
    }
    let t: Vec<f64> = u.iter().map(|&x| truth.eval(x)).collect();
    let mut total = 0.0;
    for rep in estimates {
        if rep.len() != u.len() {
            return Err(Error::Config(format!("replication has {} estimates for {} points", rep.len(), u.len())));
        }
        total += rep.iter().zip(&t).map(|(e, x)| (e - x) * (e - x)).sum::<f64>() * du;
    }
    Ok(total / estimates.len() as f64)
}

/// Mean squared error of a set of estimates of one value.
pub fn mse(estimates: &[f64], truth: f64) -> f64 {
    if estimates.is_empty() {
        return f64::NAN;
    }
    estimates.iter().map(|e| (e - truth) * (e - truth)).sum::<f64>() / estimates.len() as f64
}

/// Unbiased sample variance.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return f64::NAN;
    }
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
}

pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// `(theoretical N(0,1) quantile, sample quantile)` pairs with plotting
/// positions `(k - 0.5)/n`.
pub fn qq_export(samples: &[f64]) -> Result<Vec<(f64, f64)>> {
    if samples.len() < 10 {
        return Err(Error::Config(format!("Q-Q export needs at least 10 samples, got {}", samples.len())));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("Q-Q samples must be finite".into()));
    }
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len() as f64;
    Ok(sorted
        .into_iter()
        .enumerate()
        .map(|(k, s)| (normal.inverse_cdf((k as f64 + 0.5) / n), s))
        .collect())
}

/// Largest `|sample - theoretical|` over the Q-Q pairs.
pub fn max_qq_deviation(pairs: &[(f64, f64)]) -> f64 {
    pairs.iter().map(|(t, s)| (s - t).abs()).fold(0.0, f64::max)
}
