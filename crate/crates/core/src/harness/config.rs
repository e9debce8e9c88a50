use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelKind;
use crate::levy::LevySpec;
use crate::optimize::{DeConfig, ParamBox};
use crate::simulate::{BuiltinCurve, CoefficientCurve, SamplingGrid, Scheme};
use crate::statespace::{FamilyId, ModelFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    Lse,
    Qmle,
    Whittle,
}

impl EstimatorKind {
    pub fn is_state_space(self) -> bool {
        !matches!(self, EstimatorKind::Lse)
    }
}

impl std::str::FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lse" => Ok(EstimatorKind::Lse),
            "qmle" => Ok(EstimatorKind::Qmle),
            "whittle" => Ok(EstimatorKind::Whittle),
            other => Err(Error::Config(format!("unknown estimator '{other}'"))),
        }
    }
}

/// Monte Carlo study description. Every field has a default, so a config
/// file only needs the entries that differ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudyConfig {
    pub estimator: EstimatorKind,
    /// True OU coefficient `a(·)` (least squares studies).
    pub curve: CoefficientCurve,
    /// State space family and true parameter curves `ϑ*(·)`.
    pub family: FamilyId,
    pub theta_curves: Vec<CoefficientCurve>,
    /// Overrides the family's default parameter box.
    pub theta_box: Option<ParamBox>,
    /// Box `[lo, hi]` for the least squares estimate.
    pub lse_box: (f64, f64),
    pub noise: LevySpec,
    pub n_values: Vec<u32>,
    pub replications: usize,
    pub kernel: KernelKind,
    /// Simulated horizon `[0, T]`.
    pub horizon: f64,
    /// Number of equidistant estimation points on `[0.2 T, 0.8 T]`.
    pub points: usize,
    /// Explicit estimation points, overriding `points`.
    pub u_points: Option<Vec<f64>>,
    /// Bandwidth `b_N = bandwidth_constant / √N`; observations at `δ_N = 1/N`.
    pub bandwidth_constant: f64,
    pub seed: u64,
    pub sim_ratio: u32,
    pub de: DeConfig,
    pub output_dir: Option<PathBuf>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            estimator: EstimatorKind::Lse,
            curve: CoefficientCurve::Builtin(BuiltinCurve::A2),
            family: FamilyId::Example2d,
            theta_curves: vec![
                CoefficientCurve::Builtin(BuiltinCurve::Theta1),
                CoefficientCurve::Builtin(BuiltinCurve::Theta2),
                CoefficientCurve::Constant(0.2),
            ],
            theta_box: None,
            lse_box: (1e-3, 10.0),
            noise: LevySpec::default_nig(),
            n_values: vec![1, 4, 16, 64],
            replications: 100,
            kernel: KernelKind::Rectangular,
            horizon: 2000.0,
            points: 21,
            u_points: None,
            bandwidth_constant: 400.0,
            seed: 1,
            sim_ratio: 1000,
            de: DeConfig::default(),
            output_dir: None,
        }
    }
}

impl StudyConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Full-size study: 400 replications, 101 points, N up to 256.
    pub fn full_scale(mut self) -> Self {
        self.replications = 400;
        self.points = 101;
        self.u_points = None;
        self.n_values = vec![1, 4, 16, 64, 256];
        self
    }

    pub fn u_grid(&self) -> Vec<f64> {
        if let Some(u) = &self.u_points {
            return u.clone();
        }
        let (lo, hi) = (0.2 * self.horizon, 0.8 * self.horizon);
        match self.points {
            0 => Vec::new(),
            1 => vec![0.5 * self.horizon],
            p => (0..p).map(|i| lo + (hi - lo) * i as f64 / (p - 1) as f64).collect(),
        }
    }

    /// Observation grid at `u` for rescaling parameter `n`.
    pub fn grid(&self, n: u32, u: f64) -> Result<SamplingGrid> {
        let nf = n as f64;
        SamplingGrid::new(n, 1.0 / nf, self.bandwidth_constant / nf.sqrt(), u, 1.0, Scheme::O1)
    }

    pub fn build_family(&self) -> Result<Box<dyn ModelFamily>> {
        self.family.build(self.theta_box.clone())
    }

    /// Number of estimated components.
    pub fn dim(&self) -> usize {
        if self.estimator.is_state_space() {
            self.family.param_dim()
        } else {
            1
        }
    }

    /// True parameter at `u`.
    pub fn truth(&self, u: f64) -> Vec<f64> {
        if self.estimator.is_state_space() {
            self.theta_curves.iter().map(|c| c.eval(u)).collect()
        } else {
            vec![self.curve.eval(u)]
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if self.n_values.is_empty() || self.n_values.contains(&0) {
            return Err(Error::Config("n_values must be a nonempty list of positive integers".into()));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::Config(format!("horizon must be positive, got {}", self.horizon)));
        }
        if !(self.bandwidth_constant > 0.0) {
            return Err(Error::Config("bandwidth_constant must be positive".into()));
        }
        if self.sim_ratio == 0 {
            return Err(Error::Config("sim_ratio must be at least 1".into()));
        }
        self.noise.validate()?;
        if !self.noise.is_centered() {
            return Err(Error::Config("driving noise must be centered".into()));
        }
        let u = self.u_grid();
        if u.is_empty() {
            return Err(Error::Config("no estimation points".into()));
        }
        let (lo, hi) = (0.2 * self.horizon, 0.8 * self.horizon);
        let slack = 1e-9 * self.horizon;
        if let Some(bad) = u.iter().find(|&&x| x < lo - slack || x > hi + slack) {
            return Err(Error::Config(format!(
                "estimation point {bad} lies outside [{lo}, {hi}] = [0.2 T, 0.8 T]"
            )));
        }
        for &n in &self.n_values {
            for &x in &u {
                let g = self.grid(n, x)?;
                let m = g.m() as f64;
                if g.time(-(g.m() as i64)) < -slack || x + m * g.delta_n() > self.horizon + slack {
                    return Err(Error::Config(format!(
                        "window of half-width {} around u = {x} leaves [0, {}] for N = {n}",
                        m * g.delta_n(),
                        self.horizon
                    )));
                }
            }
        }
        if self.estimator.is_state_space() {
            let family = self.build_family()?;
            if self.theta_curves.len() != family.param_dim() {
                return Err(Error::Config(format!(
                    "family {} needs {} theta curves, got {}",
                    family.name(),
                    family.param_dim(),
                    self.theta_curves.len()
                )));
            }
            self.de.validate(family.param_dim())?;
            for &x in &u {
                let th = self.truth(x);
                if !family.theta_box().contains(&th) {
                    return Err(Error::Config(format!("true parameter {th:?} at u = {x} lies outside the box")));
                }
            }
        } else {
            self.curve.check_positive(0.0, self.horizon)?;
            let (l, h) = self.lse_box;
            if !(l > 0.0 && l < h) {
                return Err(Error::Config(format!("lse_box must satisfy 0 < lo < hi, got ({l}, {h})")));
            }
        }
        Ok(())
    }
}
