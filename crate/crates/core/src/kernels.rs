//! Localizing kernels and the kernel weight sequence shared by all localized
//! estimators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulate::SamplingGrid;

/// Built-in localizing kernels, both supported on `[-1, 1]` with unit mass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    #[serde(alias = "rect")]
    Rectangular,
    #[serde(alias = "epan")]
    Epanechnikov,
}

impl KernelKind {
    /// Kernel value `K(x)`, zero outside `[-1, 1]`.
    pub fn eval(self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::Domain(format!("kernel argument {x} is not finite")));
        }
        Ok(self.eval_unchecked(x))
    }

    #[inline]
    pub(crate) fn eval_unchecked(self, x: f64) -> f64 {
        let ax = x.abs();
        if ax > 1.0 {
            return 0.0;
        }
        match self {
            KernelKind::Rectangular => 0.5,
            KernelKind::Epanechnikov => 0.75 * (1.0 - ax * ax),
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            KernelKind::Rectangular => "rect",
            KernelKind::Epanechnikov => "epan",
        }
    }
}

impl std::str::FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rect" | "rectangular" => Ok(KernelKind::Rectangular),
            "epan" | "epanechnikov" => Ok(KernelKind::Epanechnikov),
            other => Err(Error::Config(format!(
                "unknown kernel '{other}', expected 'rect' or 'epan'"
            ))),
        }
    }
}

/// Raw kernel values `K(i δ_N / b_N)` for `i = -m_N..=m_N`.
pub fn kernel_values(kind: KernelKind, grid: &SamplingGrid) -> Vec<f64> {
    let m = grid.m() as i64;
    let ratio = grid.delta_n() / grid.bandwidth();
    (-m..=m)
        .map(|i| kind.eval_unchecked(i as f64 * ratio))
        .collect()
}

/// Kernel weights `w_i = (δ_N / b_N) K(i δ_N / b_N)` for `i = -m_N..=m_N`.
///
/// Index `k` of the returned vector corresponds to `i = k - m_N`.
pub fn kernel_weights(kind: KernelKind, grid: &SamplingGrid) -> Vec<f64> {
    let ratio = grid.delta_n() / grid.bandwidth();
    let mut w = kernel_values(kind, grid);
    w.iter_mut().for_each(|v| *v *= ratio);
    w
}

/// Checks that a user supplied function behaves like a localizing kernel:
/// bounded, vanishing outside `[-1, 1]` and integrating to one.
///
/// Only the two built-in kernels are used by the estimators; this check exists
/// so that external callers can validate their own kernels the same way.
pub fn check_localizing_kernel<F: Fn(f64) -> f64>(kernel: F) -> Result<()> {
    // support: sample outside [-1, 1]
    for k in 1..=200 {
        let x = 1.0 + k as f64 * 0.05;
        for v in [kernel(x), kernel(-x)] {
            if v != 0.0 {
                return Err(Error::Kernel(format!(
                    "kernel is nonzero ({v}) outside [-1, 1] at |x| = {x}"
                )));
            }
        }
    }
    // composite Simpson on [-1, 1]
    let n = 20_000;
    let h = 2.0 / n as f64;
    let mut sum = 0.0;
    for k in 0..=n {
        let x = -1.0 + k as f64 * h;
        let v = kernel(x);
        if !v.is_finite() {
            return Err(Error::Kernel(format!("kernel is not finite at x = {x}")));
        }
        let c = if k == 0 || k == n {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        sum += c * v;
    }
    let integral = sum * h / 3.0;
    if (integral - 1.0).abs() > 1e-3 {
        return Err(Error::Kernel(format!(
            "kernel integrates to {integral}, expected 1"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::Scheme;

    fn grid_with(m_ratio: f64, delta: f64) -> SamplingGrid {
        // b_N = m * δ_N, Nδ_N = Δ = 1
        let n = (1.0 / delta).round() as u32;
        SamplingGrid::new(n, delta, m_ratio * delta, 100.0, 1.0, Scheme::O1).unwrap()
    }

    #[test]
    fn values_at_origin_and_outside() {
        assert_eq!(KernelKind::Rectangular.eval(0.0).unwrap(), 0.5);
        assert_eq!(KernelKind::Epanechnikov.eval(0.0).unwrap(), 0.75);
        assert_eq!(KernelKind::Epanechnikov.eval(1.0).unwrap(), 0.0);
        assert_eq!(KernelKind::Rectangular.eval(2.0).unwrap(), 0.0);
        assert_eq!(KernelKind::Rectangular.eval(1.0).unwrap(), 0.5);
    }

    #[test]
    fn non_finite_argument_is_a_domain_error() {
        assert!(matches!(
            KernelKind::Rectangular.eval(f64::NAN),
            Err(Error::Domain(_))
        ));
        assert!(KernelKind::Epanechnikov.eval(f64::INFINITY).is_err());
    }

    #[test]
    fn kernels_are_even_nonnegative_and_unit_mass() {
        for kind in [KernelKind::Rectangular, KernelKind::Epanechnikov] {
            for k in 0..=400 {
                let x = -2.0 + k as f64 * 0.01;
                let v = kind.eval(x).unwrap();
                assert!(v >= 0.0);
                assert_eq!(v, kind.eval(-x).unwrap());
            }
            check_localizing_kernel(|x| kind.eval_unchecked(x)).unwrap();
        }
    }

    #[test]
    fn user_kernel_validation_rejects_bad_kernels() {
        assert!(check_localizing_kernel(|x: f64| if x.abs() <= 2.0 { 0.25 } else { 0.0 }).is_err());
        assert!(check_localizing_kernel(|x: f64| if x.abs() <= 1.0 { 1.0 } else { 0.0 }).is_err());
        // triangular kernel is fine
        check_localizing_kernel(|x: f64| (1.0 - x.abs()).max(0.0)).unwrap();
    }

    #[test]
    fn rectangular_weights_m100() {
        let grid = grid_with(100.0, 0.01);
        assert_eq!(grid.m(), 100);
        let w = kernel_weights(KernelKind::Rectangular, &grid);
        assert_eq!(w.len(), 201);
        for &v in &w {
            assert!((v - 0.005).abs() < 1e-15);
        }
        let total: f64 = w.iter().sum();
        assert!((total - 1.005).abs() < 1e-12);
    }

    #[test]
    fn rectangular_weights_m1() {
        let grid = grid_with(1.0, 1.0);
        assert_eq!(grid.m(), 1);
        let w = kernel_weights(KernelKind::Rectangular, &grid);
        assert_eq!(w, vec![0.5, 0.5, 0.5]);
    }

    #[test]
    fn epanechnikov_weight_vanishes_at_boundary() {
        let grid = grid_with(50.0, 0.02);
        let w = kernel_weights(KernelKind::Epanechnikov, &grid);
        assert!(w[0].abs() < 1e-15);
        assert!(w[w.len() - 1].abs() < 1e-15);
    }

    #[test]
    fn weight_sums_are_within_riemann_band() {
        for kind in [KernelKind::Rectangular, KernelKind::Epanechnikov] {
            for &(m, d) in &[(1.0, 1.0), (3.0, 0.5), (17.0, 0.1), (400.0, 1.0 / 16.0)] {
                let grid = grid_with(m, d);
                let ratio = grid.delta_n() / grid.bandwidth();
                let s: f64 = kernel_weights(kind, &grid).iter().sum();
                assert!(
                    (s - 1.0).abs() <= 3.0 * ratio + 1e-12,
                    "{kind:?} m={m}: sum {s}"
                );
            }
        }
    }

    #[test]
    fn parse_kernel_names() {
        assert_eq!("rect".parse::<KernelKind>().unwrap(), KernelKind::Rectangular);
        assert_eq!("epan".parse::<KernelKind>().unwrap(), KernelKind::Epanechnikov);
        assert!("gauss".parse::<KernelKind>().is_err());
    }
}
