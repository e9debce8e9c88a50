use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix, DVector};

use super::{lyapunov_continuous, matrix_exp, ModelFamily, SampledModel, SystemMatrices};
use crate::error::{Error, Result};

fn complexify(m: &DMatrix<f64>) -> DMatrix<Complex<f64>> {
    m.map(|v| Complex::new(v, 0.0))
}

fn check_resolvent(eigs: &[Complex<f64>], z: Complex<f64>) -> Result<()> {
    if let Some(l) = eigs.iter().find(|l| (z - **l).norm() < 1e-12) {
        return Err(Error::Numeric(format!("resolvent is singular: eigenvalue {l} at {z}")));
    }
    Ok(())
}

impl SampledModel {
    /// `f(ω) = (1/2π) B'(e^{iω} I - Φ)^{-1} Q (e^{-iω} I - Φ')^{-1} B`.
    pub fn spectral_density(&self, omega: f64) -> Result<f64> {
        let p = self.dim();
        let z = Complex::new(omega.cos(), omega.sin());
        let eigs: Vec<_> = self.phi.complex_eigenvalues().iter().cloned().collect();
        check_resolvent(&eigs, z)?;
        // v = (e^{iω} I - Φ')^{-1} B, so the left factor is v' and the right one conj(v)
        let m = DMatrix::<Complex<f64>>::identity(p, p) * z - complexify(&self.phi.transpose());
        let v = m
            .lu()
            .solve(&self.b.map(|x| Complex::new(x, 0.0)))
            .ok_or_else(|| Error::Numeric(format!("singular resolvent at omega = {omega}")))?;
        let mut acc = Complex::new(0.0, 0.0);
        for i in 0..p {
            for j in 0..p {
                acc += v[i] * self.qn[(i, j)] * v[j].conj();
            }
        }
        Ok(acc.re.max(0.0) / (2.0 * PI))
    }
}

/// Spectral density of the model sampled at spacing `delta`, at `omega ∈ [-π, π]`.
pub fn spectral_density_sampled(family: &dyn ModelFamily, theta: &[f64], omega: f64, delta: f64) -> Result<f64> {
    SampledModel::from_family(family, theta, delta)?.spectral_density(omega)
}

/// Spectral density `(1/2π) |H(iω)|² Σ` of the continuous-time output with
/// transfer function `H(x) = B'(x I - A)^{-1} C`.
pub fn spectral_density_continuous(family: &dyn ModelFamily, theta: &[f64], omega: f64) -> Result<f64> {
    let sys = family.matrices(theta)?;
    continuous_density(&sys, omega)
}

pub(crate) fn continuous_density(sys: &SystemMatrices, omega: f64) -> Result<f64> {
    let p = sys.dim();
    let x = Complex::new(0.0, omega);
    let eigs: Vec<_> = sys.a.complex_eigenvalues().iter().cloned().collect();
    check_resolvent(&eigs, x)?;
    let m = DMatrix::<Complex<f64>>::identity(p, p) * x - complexify(&sys.a);
    let w = m
        .lu()
        .solve(&sys.c.map(|v| Complex::new(v, 0.0)))
        .ok_or_else(|| Error::Numeric(format!("singular transfer function at omega = {omega}")))?;
    let h: Complex<f64> = (0..p).map(|i| w[i] * sys.b[i]).sum();
    Ok(h.norm_sqr() * sys.sigma / (2.0 * PI))
}

/// Autocovariance `Γ(h) = B' e^{AΔ|h|} Π B` of the output sampled at spacing `delta`.
pub fn autocovariance_sampled(sys: &SystemMatrices, delta: f64, h: i64) -> Result<f64> {
    let pi = lyapunov_continuous(&sys.a, &sys.c, sys.sigma)?;
    let e = matrix_exp(&sys.a, delta * h.unsigned_abs() as f64);
    Ok((sys.b.transpose() * e * pi * &sys.b)[(0, 0)])
}

/// Sampled spectral density written as a ratio of cosine polynomials,
/// `f(ω) = (1/2π) Σ_d n_d cos(dω) / Σ_d e_d cos(dω)`.
///
/// The coefficients follow from `adj(zI - Φ)` (Faddeev–LeVerrier) and the
/// characteristic polynomial of `Φ`; evaluating `f` then costs `O(p)` per
/// frequency, which the Whittle objective needs on thousands of frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalSpectrum {
    /// `n_0..n_{p-1}`.
    pub num: Vec<f64>,
    /// `e_0..e_p`.
    pub den: Vec<f64>,
}

impl RationalSpectrum {
    pub fn new(model: &SampledModel) -> Self {
        let p = model.dim();
        let phi = &model.phi;
        // adj(zI - Φ) = Σ_k M_k z^{p-1-k}, χ(z) = z^p + c_{p-1} z^{p-1} + ... + c_0
        let mut mats = Vec::with_capacity(p);
        let mut chi = vec![0.0; p + 1];
        chi[p] = 1.0;
        let mut mk = DMatrix::<f64>::identity(p, p);
        for k in 1..=p {
            let pm = phi * &mk;
            let ck = -pm.trace() / k as f64;
            chi[p - k] = ck;
            mats.push(mk);
            mk = pm + DMatrix::identity(p, p) * ck;
        }
        // r(z) = B' adj(zI - Φ) = Σ_j r_j z^j, with r_j = B' M_{p-1-j}
        let rows: Vec<DVector<f64>> = (0..p).map(|j| mats[p - 1 - j].transpose() * &model.b).collect();
        let g = |k: usize, l: usize| (rows[k].transpose() * &model.qn * &rows[l])[(0, 0)];
        let mut num = vec![0.0; p];
        for k in 0..p {
            num[0] += g(k, k);
            for d in 1..p - k {
                num[d] += 2.0 * g(k + d, k);
            }
        }
        let mut den = vec![0.0; p + 1];
        for d in 0..=p {
            let s: f64 = (0..=p - d).map(|k| chi[k] * chi[k + d]).sum();
            den[d] = if d == 0 { s } else { 2.0 * s };
        }
        Self { num, den }
    }

    /// `f` at a frequency whose cosines `cos(dω)`, `d = 0..=p`, are given.
    #[inline]
    pub fn eval_cos(&self, cos: &[f64]) -> f64 {
        let mut n = 0.0;
        for (c, x) in self.num.iter().zip(cos) {
            n += c * x;
        }
        let mut d = 0.0;
        for (c, x) in self.den.iter().zip(cos) {
            d += c * x;
        }
        n / (2.0 * PI * d)
    }

    pub fn eval(&self, omega: f64) -> f64 {
        let cos: Vec<f64> = (0..self.den.len()).map(|d| (d as f64 * omega).cos()).collect();
        self.eval_cos(&cos)
    }

    /// Number of cosine terms needed by [`RationalSpectrum::eval_cos`].
    pub fn order(&self) -> usize {
        self.den.len()
    }
}
