use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;

use super::{numerical_rank, ModelFamily, RationalSpectrum, SampledModel, SystemMatrices};
use crate::optimize::ParamBox;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionCheck {
    pub name: String,
    pub passed: bool,
    /// Parameter at which the check is closest to failing (or fails).
    pub worst_theta: Option<Vec<f64>>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub checks: Vec<AssumptionCheck>,
}

impl AssumptionReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&AssumptionCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl std::fmt::Display for AssumptionReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {}: {}", c.name, if c.passed { "pass" } else { "FAIL" }, c.detail)?;
        }
        Ok(())
    }
}

fn check(name: &str, passed: bool, worst: Option<Vec<f64>>, detail: String) -> AssumptionCheck {
    AssumptionCheck {
        name: name.to_string(),
        passed,
        worst_theta: worst,
        detail,
    }
}

fn max_abs_diff(x: &SystemMatrices, y: &SystemMatrices) -> f64 {
    let a = (&x.a - &y.a).abs().max();
    let b = (&x.b - &y.b).abs().max();
    let c = (&x.c - &y.c).abs().max();
    a.max(b).max(c).max((x.sigma - y.sigma).abs())
}

/// Evaluates the model assumptions on a uniform grid with `grid_density`
/// points per coordinate of `theta_box`.
///
/// Checked: compactness of the box (C1), stability of `A` (C2), continuity
/// and `B ≠ 0` (C4), minimality (C5), pairwise distinct sampled spectral
/// densities at 32 frequencies (C6) and `|Im λ| < π/Δ` (C7). Report only,
/// nothing fails hard.
pub fn check_assumptions(
    family: &dyn ModelFamily,
    theta_box: &ParamBox,
    delta: f64,
    grid_density: usize,
) -> AssumptionReport {
    let p = family.state_dim();
    let grid = theta_box.grid(grid_density.max(1));
    let mut checks = Vec::new();

    checks.push(check(
        "C1",
        theta_box.lo().iter().chain(theta_box.hi()).all(|v| v.is_finite()),
        None,
        format!("box {:?} x {:?}", theta_box.lo(), theta_box.hi()),
    ));

    // evaluate the family once per grid point
    let mut systems: Vec<(Vec<f64>, SystemMatrices)> = Vec::new();
    let mut undefined: Option<(Vec<f64>, String)> = None;
    for th in &grid {
        match family.matrices(th) {
            Ok(s) => systems.push((th.clone(), s)),
            Err(e) => {
                if undefined.is_none() {
                    undefined = Some((th.clone(), e.to_string()));
                }
            }
        }
    }

    // C2
    let mut worst_re = f64::NEG_INFINITY;
    let mut worst_th = None;
    let mut worst_im = 0.0f64;
    let mut worst_im_th = None;
    for (th, s) in &systems {
        for l in s.a.complex_eigenvalues().iter() {
            if l.re > worst_re {
                worst_re = l.re;
                worst_th = Some(th.clone());
            }
            if l.im.abs() >= worst_im {
                worst_im = l.im.abs();
                worst_im_th = Some(th.clone());
            }
        }
    }
    checks.push(check(
        "C2",
        !systems.is_empty() && worst_re < 0.0,
        worst_th,
        format!("largest real part of an eigenvalue of A: {worst_re}"),
    ));

    // C4
    let mut c4_ok = undefined.is_none();
    let mut c4_worst = undefined.as_ref().map(|u| u.0.clone());
    let mut c4_detail = match &undefined {
        Some((th, e)) => format!("family undefined at {th:?}: {e}"),
        None => String::new(),
    };
    let mut worst_jump = 0.0f64;
    for (th, s) in &systems {
        if s.b.iter().all(|&v| v == 0.0) {
            if c4_ok {
                c4_detail = format!("B vanishes at {th:?}");
                c4_worst = Some(th.clone());
            }
            c4_ok = false;
        }
        for k in 0..th.len() {
            let width = theta_box.hi()[k] - theta_box.lo()[k];
            if width == 0.0 {
                continue;
            }
            let h = 1e-7 * width;
            let mut moved = th.clone();
            moved[k] = if th[k] + h <= theta_box.hi()[k] { th[k] + h } else { th[k] - h };
            if let Ok(s2) = family.matrices(&moved) {
                let jump = max_abs_diff(s, &s2) / (1.0 + s.a.abs().max());
                if jump > worst_jump {
                    worst_jump = jump;
                    if c4_ok && jump > 1e-4 {
                        c4_worst = Some(th.clone());
                    }
                }
            }
        }
    }
    if worst_jump > 1e-4 {
        c4_ok = false;
    }
    if c4_detail.is_empty() {
        c4_detail = format!("largest relative change under a 1e-7 box-width step: {worst_jump:e}");
    }
    checks.push(check("C4", c4_ok && !systems.is_empty(), c4_worst, c4_detail));

    // C5
    let mut c5_ok = !systems.is_empty();
    let mut c5_worst = None;
    let mut c5_detail = format!("controllable and observable with McMillan degree {p} at all grid points");
    for (th, s) in &systems {
        let mut ctrl = DMatrix::zeros(p, p);
        let mut obs = DMatrix::zeros(p, p);
        let mut cv = s.c.clone();
        let mut bv = s.b.clone();
        for j in 0..p {
            ctrl.set_column(j, &cv);
            obs.set_column(j, &bv);
            cv = &s.a * cv;
            bv = s.a.transpose() * bv;
        }
        let (rc, ro) = (numerical_rank(&ctrl), numerical_rank(&obs));
        if rc < p || ro < p {
            c5_ok = false;
            c5_worst = Some(th.clone());
            c5_detail = format!("controllability rank {rc}, observability rank {ro} at {th:?}");
            break;
        }
    }
    checks.push(check("C5", c5_ok, c5_worst, c5_detail));

    // C6
    let freqs: Vec<f64> = (0..32).map(|k| PI * (k as f64 + 0.5) / 32.0).collect();
    let mut dens: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    for (th, s) in &systems {
        if let Ok(sm) = SampledModel::new(s, delta) {
            let rs = RationalSpectrum::new(&sm);
            dens.push((th.clone(), freqs.iter().map(|&w| rs.eval(w)).collect()));
        }
    }
    let mut c6_ok = dens.len() == systems.len() && !dens.is_empty();
    let mut c6_worst = None;
    let mut min_sep = f64::INFINITY;
    for i in 0..dens.len() {
        for j in i + 1..dens.len() {
            let scale = dens[i].1.iter().chain(&dens[j].1).fold(0.0f64, |m, v| m.max(v.abs()));
            let sep = dens[i].1.iter().zip(&dens[j].1).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
                / scale.max(f64::MIN_POSITIVE);
            if sep < min_sep {
                min_sep = sep;
                if sep <= 1e-8 {
                    c6_ok = false;
                    c6_worst = Some(dens[i].0.clone());
                }
            }
        }
    }
    let c6_detail = match &c6_worst {
        Some(th) => format!("spectral densities coincide (relative gap {min_sep:e}) near {th:?}"),
        None => format!("smallest relative gap between grid densities: {min_sep:e}"),
    };
    checks.push(check("C6", c6_ok, c6_worst, c6_detail));

    // C7
    checks.push(check(
        "C7",
        !systems.is_empty() && worst_im < PI / delta,
        worst_im_th,
        format!("largest |Im(lambda)| = {worst_im}, bound pi/Delta = {}", PI / delta),
    ));

    AssumptionReport { checks }
}
