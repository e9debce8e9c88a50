use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{EstimatorKind, StudyConfig};
use super::metrics::{grid_spacing, mse};
use crate::error::{Error, Result};
use crate::kalman::{qmle_estimate, qmle_objective};
use crate::kernels::{kernel_weights, KernelKind};
use crate::ou_lse::lse_estimate;
use crate::rng::RngStream;
use crate::simulate::{extract_window, simulate_tv_ou, simulate_tv_statespace, SampledPath, SimSettings};
use crate::statespace::{check_assumptions, AssumptionReport, ModelFamily};
use crate::whittle::whittle_estimate;

/// One estimate at one `(N, u, replication)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub n: u32,
    pub u: f64,
    pub replication: usize,
    pub truth: Vec<f64>,
    /// Empty when the estimator failed.
    pub estimate: Vec<f64>,
    pub sigma_hat: Option<f64>,
    pub std_err: Option<f64>,
    pub objective: Option<f64>,
    pub riccati_residual: Option<f64>,
    pub whittle_value: Option<f64>,
    pub error: Option<String>,
}

impl EstimateRecord {
    fn failed(n: u32, u: f64, replication: usize, truth: Vec<f64>, e: &Error) -> Self {
        Self {
            n,
            u,
            replication,
            truth,
            estimate: Vec::new(),
            sigma_hat: None,
            std_err: None,
            objective: None,
            riccati_residual: None,
            whittle_value: None,
            error: Some(e.to_string()),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

/// Aggregates for one value of `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NSummary {
    pub n: u32,
    /// Per component: `Σ_i MSE(u_i) Δu`, `None` with fewer than two points.
    pub mise: Vec<Option<f64>>,
    /// `[point][component]` mean squared errors over successful replications.
    pub mse: Vec<Vec<f64>>,
    /// Successful replications per point.
    pub valid: Vec<usize>,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyResult {
    pub config: StudyConfig,
    pub u: Vec<f64>,
    pub records: Vec<EstimateRecord>,
    pub summaries: Vec<NSummary>,
    pub assumptions: Option<AssumptionReport>,
}

impl StudyResult {
    pub fn summary(&self, n: u32) -> Option<&NSummary> {
        self.summaries.iter().find(|s| s.n == n)
    }

    /// Standardized least squares errors for `N = n`, in record order.
    pub fn std_errors(&self, n: u32) -> Vec<f64> {
        self.records.iter().filter(|r| r.n == n).filter_map(|r| r.std_err).collect()
    }

    pub fn records_for(&self, n: u32) -> impl Iterator<Item = &EstimateRecord> {
        self.records.iter().filter(move |r| r.n == n)
    }
}

/// Seed of the replication streams for rescaling parameter `n`.
fn seed_for(seed: u64, n: u32) -> u64 {
    seed.wrapping_add((n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn simulate_path(config: &StudyConfig, family: Option<&dyn ModelFamily>, n: u32, rng: &mut RngStream) -> Result<SampledPath> {
    let settings = SimSettings::new(n, 1.0 / n as f64, config.sim_ratio, 0.0, config.horizon);
    match family {
        None => simulate_tv_ou(&config.curve, &config.noise, &settings, rng),
        Some(f) => simulate_tv_statespace(f, &config.theta_curves, &config.noise, &settings, false, rng),
    }
}

fn estimate_cell(
    config: &StudyConfig,
    family: Option<&dyn ModelFamily>,
    path: &SampledPath,
    n: u32,
    u: f64,
    replication: usize,
    de_seed: u64,
) -> EstimateRecord {
    let truth = config.truth(u);
    let run = || -> Result<EstimateRecord> {
        let grid = config.grid(n, u)?;
        let window = extract_window(path, &grid)?;
        let mut rec = EstimateRecord {
            n,
            u,
            replication,
            truth: truth.clone(),
            estimate: Vec::new(),
            sigma_hat: None,
            std_err: None,
            objective: None,
            riccati_residual: None,
            whittle_value: None,
            error: None,
        };
        let de = crate::optimize::DeConfig { seed: de_seed ^ config.de.seed, ..config.de.clone() };
        match (config.estimator, family) {
            (EstimatorKind::Lse, _) => {
                let est = lse_estimate(&window, config.kernel, config.lse_box)?;
                let est = est.with_truth(truth[0], &grid);
                rec.estimate = vec![est.a_hat];
                rec.sigma_hat = Some(est.sigma_u_hat);
                // the asymptotic variance holds for the rectangular kernel only
                if config.kernel == KernelKind::Rectangular {
                    rec.std_err = est.std_error;
                }
            }
            (EstimatorKind::Qmle, Some(f)) => {
                let est = qmle_estimate(&window, config.kernel, f, &de)?;
                rec.estimate = est.theta_hat;
                rec.objective = Some(est.objective);
                rec.riccati_residual = Some(est.riccati_residual);
            }
            (EstimatorKind::Whittle, Some(f)) => {
                let est = whittle_estimate(&window, config.kernel, f, &de)?;
                let weights = kernel_weights(config.kernel, &grid);
                rec.objective = Some(qmle_objective(&window, &weights, f, &est.estimate.theta_hat, grid.lag()));
                rec.estimate = est.estimate.theta_hat;
                rec.riccati_residual = Some(est.estimate.riccati_residual);
                rec.whittle_value = Some(est.whittle_value);
            }
            _ => return Err(Error::Config("state space estimator without a family".into())),
        }
        Ok(rec)
    };
    run().unwrap_or_else(|e| EstimateRecord::failed(n, u, replication, truth.clone(), &e))
}

fn run_replication(
    config: &StudyConfig,
    family: Option<&dyn ModelFamily>,
    u: &[f64],
    n: u32,
    replication: usize,
) -> Vec<EstimateRecord> {
    let mut rng = RngStream::new(seed_for(config.seed, n), replication as u64);
    let mut de_rng = rng.split();
    let path = match simulate_path(config, family, n, &mut rng) {
        Ok(p) => p,
        Err(e) => {
            return u
                .iter()
                .map(|&x| EstimateRecord::failed(n, x, replication, config.truth(x), &e))
                .collect()
        }
    };
    u.iter()
        .map(|&x| {
            let de_seed = de_rng.next_u64();
            estimate_cell(config, family, &path, n, x, replication, de_seed)
        })
        .collect()
}

fn summarize(config: &StudyConfig, u: &[f64], n: u32, records: &[EstimateRecord]) -> NSummary {
    let d = config.dim();
    let du = grid_spacing(u).ok();
    let mut mse_table = Vec::with_capacity(u.len());
    let mut valid = Vec::with_capacity(u.len());
    for &x in u {
        let cell: Vec<&EstimateRecord> = records.iter().filter(|r| r.n == n && r.u == x && r.is_ok()).collect();
        valid.push(cell.len());
        let truth = config.truth(x);
        mse_table.push(
            (0..d)
                .map(|k| {
                    let vals: Vec<f64> = cell.iter().map(|r| r.estimate[k]).collect();
                    mse(&vals, truth[k])
                })
                .collect::<Vec<f64>>(),
        );
    }
    let mise = (0..d)
        .map(|k| du.map(|du| mse_table.iter().map(|row| row[k]).sum::<f64>() * du))
        .collect();
    NSummary {
        n,
        mise,
        mse: mse_table,
        valid,
        failures: records.iter().filter(|r| r.n == n && !r.is_ok()).count(),
    }
}

/// Runs the Monte Carlo study: for each `N` and replication one path over
/// `[0, T]` is simulated and the estimator is applied at every estimation
/// point. Failed cells are recorded with their error and left out of the
/// aggregates.
pub fn run_study(config: &StudyConfig) -> Result<StudyResult> {
    config.validate()?;
    let u = config.u_grid();
    let family = if config.estimator.is_state_space() {
        Some(config.build_family()?)
    } else {
        None
    };
    let assumptions = match &family {
        Some(f) => {
            let report = check_assumptions(f.as_ref(), f.theta_box(), 1.0, 3);
            if !report.all_passed() {
                return Err(Error::Config(format!("model assumptions fail on the parameter box:\n{report}")));
            }
            Some(report)
        }
        None => None,
    };
    let fam_ref = family.as_deref();

    let mut records = Vec::new();
    for &n in &config.n_values {
        let per_rep: Vec<Vec<EstimateRecord>> = (0..config.replications)
            .into_par_iter()
            .map(|r| run_replication(config, fam_ref, &u, n, r))
            .collect();
        records.extend(per_rep.into_iter().flatten());
    }
    let summaries = config.n_values.iter().map(|&n| summarize(config, &u, n, &records)).collect();
    Ok(StudyResult {
        config: config.clone(),
        u,
        records,
        summaries,
        assumptions,
    })
}
