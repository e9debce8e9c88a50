//! Linear state space models `dX = A X dt + C dL`, `Y = B' X`, their sampled
//! counterparts and spectral densities.

mod assumptions;
mod family;
mod spectral;

pub use assumptions::{check_assumptions, AssumptionCheck, AssumptionReport};
pub use family::{Car1Family, ExampleFamily, FamilyId};
pub use spectral::{
    autocovariance_sampled, spectral_density_continuous, spectral_density_sampled, RationalSpectrum,
};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::optimize::ParamBox;

/// `(A, B, C, Σ)` of a state space model with `p`-dimensional state.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemMatrices {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: DVector<f64>,
    /// Variance `Σ` scaling the driving noise.
    pub sigma: f64,
}

impl SystemMatrices {
    pub fn zeros(p: usize) -> Self {
        Self {
            a: DMatrix::zeros(p, p),
            b: DVector::zeros(p),
            c: DVector::zeros(p),
            sigma: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }
}

/// Parametric map `ϑ ↦ (A_ϑ, B_ϑ, C_ϑ, Σ_ϑ)` over a compact box.
pub trait ModelFamily: Send + Sync + std::fmt::Debug {
    fn name(&self) -> &str;
    /// State dimension `p`.
    fn state_dim(&self) -> usize;
    /// Parameter dimension `d`.
    fn param_dim(&self) -> usize;
    fn theta_box(&self) -> &ParamBox;
    /// Writes the system matrices at `theta` into `out` (already sized `p`).
    fn fill(&self, theta: &[f64], out: &mut SystemMatrices) -> Result<()>;

    fn matrices(&self, theta: &[f64]) -> Result<SystemMatrices> {
        if theta.len() != self.param_dim() {
            return Err(Error::Parameter(format!(
                "family {} takes {} parameters, got {}",
                self.name(),
                self.param_dim(),
                theta.len()
            )));
        }
        let mut m = SystemMatrices::zeros(self.state_dim());
        self.fill(theta, &mut m)?;
        Ok(m)
    }
}

/// `e^{M t}`.
pub fn matrix_exp(m: &DMatrix<f64>, t: f64) -> DMatrix<f64> {
    (m * t).exp()
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    m.complex_eigenvalues().iter().map(|l| l.norm()).fold(0.0, f64::max)
}

/// Numerical rank from singular values with tolerance `p ε σ_max`.
pub fn numerical_rank(m: &DMatrix<f64>) -> usize {
    let sv = m.singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let tol = m.nrows().max(m.ncols()) as f64 * f64::EPSILON * smax;
    sv.iter().filter(|&&s| s > tol).count()
}

/// `Σ ∫_0^Δ e^{A s} C C' e^{A' s} ds`, from the exponential of the block
/// matrix `[[A, Σ C C'], [0, -A']] Δ`.
pub fn sampled_noise_cov(a: &DMatrix<f64>, c: &DVector<f64>, sigma: f64, delta: f64) -> Result<DMatrix<f64>> {
    if !(delta >= 0.0) {
        return Err(Error::Domain(format!("sampling step must be nonnegative, got {delta}")));
    }
    let p = a.nrows();
    if delta == 0.0 {
        return Ok(DMatrix::zeros(p, p));
    }
    let mut block = DMatrix::zeros(2 * p, 2 * p);
    block.view_mut((0, 0), (p, p)).copy_from(a);
    block.view_mut((0, p), (p, p)).copy_from(&(c * c.transpose() * sigma));
    block.view_mut((p, p), (p, p)).copy_from(&(-a.transpose()));
    let e = matrix_exp(&block, delta);
    let f = e.view((0, 0), (p, p)).into_owned();
    let g = e.view((0, p), (p, p)).into_owned();
    let q = g * f.transpose();
    Ok((&q + q.transpose()) * 0.5)
}

/// Stationary state covariance `Π` solving `A Π + Π A' + Σ C C' = 0`.
pub fn lyapunov_continuous(a: &DMatrix<f64>, c: &DVector<f64>, sigma: f64) -> Result<DMatrix<f64>> {
    let p = a.nrows();
    let eye = DMatrix::<f64>::identity(p, p);
    // column-major vec: vec(AΠ) = (I ⊗ A) vec Π, vec(ΠA') = (A ⊗ I) vec Π
    let op = eye.kronecker(a) + a.kronecker(&eye);
    let rhs = -(c * c.transpose() * sigma);
    let rhs = DVector::from_column_slice(rhs.as_slice());
    let sol = op
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numeric("Lyapunov operator is singular".into()))?;
    let pi = DMatrix::from_column_slice(p, p, sol.as_slice());
    Ok((&pi + pi.transpose()) * 0.5)
}

/// The model sampled at spacing `Δ`: `X_{k+1} = Φ X_k + Z_k`, `Y_k = B' X_k`
/// with `Φ = e^{ΔA}` and `Cov(Z_k) = Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledModel {
    pub phi: DMatrix<f64>,
    pub qn: DMatrix<f64>,
    pub b: DVector<f64>,
    pub delta: f64,
}

impl SampledModel {
    pub fn new(sys: &SystemMatrices, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::Domain(format!("sampling step must be positive, got {delta}")));
        }
        let phi = matrix_exp(&sys.a, delta);
        let rho = spectral_radius(&phi);
        if !(rho < 1.0) {
            return Err(Error::Parameter(format!(
                "sampled transition matrix is not stable (spectral radius {rho})"
            )));
        }
        let qn = sampled_noise_cov(&sys.a, &sys.c, sys.sigma, delta)?;
        Ok(Self {
            phi,
            qn,
            b: sys.b.clone(),
            delta,
        })
    }

    pub fn from_family(family: &dyn ModelFamily, theta: &[f64], delta: f64) -> Result<Self> {
        Self::new(&family.matrices(theta)?, delta)
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }
}
