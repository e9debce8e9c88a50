//! Box-constrained global minimization by differential evolution
//! (DE/rand/1/bin).
//!
//! Random numbers are consumed in a fixed order (all trial vectors of a
//! generation are generated before any of them is evaluated), so results do
//! not depend on whether evaluations run in parallel.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Axis-aligned box `[lo_k, hi_k]` in parameter space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl ParamBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::Config(format!(
                "box bounds must be nonempty and of equal length, got {} and {}",
                lo.len(),
                hi.len()
            )));
        }
        for (k, (&l, &h)) in lo.iter().zip(&hi).enumerate() {
            if !(l.is_finite() && h.is_finite() && l <= h) {
                return Err(Error::Config(format!("empty or unbounded box in coordinate {k}: [{l}, {h}]")));
            }
        }
        Ok(Self { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }
    pub fn lo(&self) -> &[f64] {
        &self.lo
    }
    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().zip(&self.lo).zip(&self.hi).all(|((v, l), h)| v >= l && v <= h)
    }

    /// Uniform grid with `points` values per coordinate (the midpoint if `points == 1`).
    pub fn grid(&self, points: usize) -> Vec<Vec<f64>> {
        let axes: Vec<Vec<f64>> = (0..self.dim())
            .map(|k| {
                if points <= 1 {
                    vec![0.5 * (self.lo[k] + self.hi[k])]
                } else {
                    (0..points)
                        .map(|i| self.lo[k] + (self.hi[k] - self.lo[k]) * i as f64 / (points - 1) as f64)
                        .collect()
                }
            })
            .collect();
        let mut out = vec![Vec::new()];
        for axis in &axes {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    axis.iter().map(move |&v| {
                        let mut p = prefix.clone();
                        p.push(v);
                        p
                    })
                })
                .collect();
        }
        out
    }

    /// Reflects a coordinate into `[lo, hi]`, clamping if one reflection is not enough.
    fn reflect(&self, k: usize, v: f64) -> f64 {
        let (l, h) = (self.lo[k], self.hi[k]);
        let r = if v < l {
            l + (l - v)
        } else if v > h {
            h - (v - h)
        } else {
            v
        };
        r.clamp(l, h)
    }
}

/// Differential evolution hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DeConfig {
    /// Population size; `None` means `15 d`.
    pub population: Option<usize>,
    pub f: f64,
    pub cr: f64,
    pub max_gens: usize,
    pub tol: f64,
    pub seed: u64,
    /// Evaluate the trial vectors of a generation on the rayon pool.
    pub parallel: bool,
}

impl Default for DeConfig {
    fn default() -> Self {
        Self {
            population: None,
            f: 0.8,
            cr: 0.9,
            max_gens: 300,
            tol: 1e-8,
            seed: 0,
            parallel: true,
        }
    }
}

impl DeConfig {
    pub fn population_for(&self, dim: usize) -> usize {
        self.population.unwrap_or(15 * dim)
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let np = self.population_for(dim);
        if np < 4 {
            return Err(Error::Config(format!("DE population must be at least 4, got {np}")));
        }
        if !(self.f > 0.0 && self.f <= 2.0) {
            return Err(Error::Config(format!("DE weight F must lie in (0, 2], got {}", self.f)));
        }
        if !(0.0..=1.0).contains(&self.cr) {
            return Err(Error::Config(format!("DE crossover CR must lie in [0, 1], got {}", self.cr)));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::Config(format!("DE tolerance must be nonnegative, got {}", self.tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub generations: usize,
    pub evaluations: usize,
    /// Best objective value after initialization and after every generation.
    pub best_trace: Vec<f64>,
    /// Number of evaluations that returned `+∞` or NaN.
    pub infeasible: usize,
    /// `true` if the spread criterion stopped the run before `max_gens`.
    pub converged: bool,
}

fn evaluate<F>(objective: &F, points: &[Vec<f64>], parallel: bool) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let clean = |v: f64| if v.is_nan() { f64::INFINITY } else { v };
    if parallel {
        points.par_iter().map(|x| clean(objective(x))).collect()
    } else {
        points.iter().map(|x| clean(objective(x))).collect()
    }
}

/// Latin hypercube sample of `np` points in the box.
fn latin_hypercube(bounds: &ParamBox, np: usize, rng: &mut RngStream) -> Vec<Vec<f64>> {
    let d = bounds.dim();
    let mut pop = vec![vec![0.0; d]; np];
    for k in 0..d {
        let mut strata: Vec<usize> = (0..np).collect();
        // Fisher-Yates
        for i in (1..np).rev() {
            let j = rng.below(i + 1);
            strata.swap(i, j);
        }
        let (l, h) = (bounds.lo[k], bounds.hi[k]);
        for (i, s) in strata.into_iter().enumerate() {
            let t = (s as f64 + rng.uniform()) / np as f64;
            pop[i][k] = l + (h - l) * t;
        }
    }
    pop
}

/// Minimizes `objective` over `bounds`. `+∞` (and NaN) values mark infeasible points.
pub fn de_minimize<F>(objective: F, bounds: &ParamBox, config: &DeConfig) -> Result<DeResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let d = bounds.dim();
    config.validate(d)?;
    let np = config.population_for(d);
    let mut rng = RngStream::new(config.seed, 0);

    let mut pop = latin_hypercube(bounds, np, &mut rng);
    let mut fit = evaluate(&objective, &pop, config.parallel);
    let mut evaluations = np;
    let mut infeasible = fit.iter().filter(|v| v.is_infinite()).count();
    let best_of = |fit: &[f64]| {
        let mut b = 0;
        for i in 1..fit.len() {
            if fit[i] < fit[b] {
                b = i;
            }
        }
        b
    };
    let mut best_trace = vec![fit[best_of(&fit)]];
    let mut generations = 0;
    let mut converged = false;

    let spread_ok = |fit: &[f64]| {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &v in fit {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        hi.is_finite() && hi - lo < config.tol
    };

    while generations < config.max_gens {
        if spread_ok(&fit) {
            converged = true;
            break;
        }
        let mut trials = Vec::with_capacity(np);
        for i in 0..np {
            let pick = |rng: &mut RngStream, taken: &[usize]| loop {
                let r = rng.below(np);
                if !taken.contains(&r) {
                    break r;
                }
            };
            let r1 = pick(&mut rng, &[i]);
            let r2 = pick(&mut rng, &[i, r1]);
            let r3 = pick(&mut rng, &[i, r1, r2]);
            let jrand = rng.below(d);
            let mut trial = pop[i].clone();
            for (k, t) in trial.iter_mut().enumerate() {
                if rng.uniform() < config.cr || k == jrand {
                    let v = pop[r1][k] + config.f * (pop[r2][k] - pop[r3][k]);
                    *t = bounds.reflect(k, v);
                }
            }
            trials.push(trial);
        }
        let trial_fit = evaluate(&objective, &trials, config.parallel);
        evaluations += np;
        infeasible += trial_fit.iter().filter(|v| v.is_infinite()).count();
        for (i, (trial, tf)) in trials.into_iter().zip(trial_fit).enumerate() {
            if tf <= fit[i] {
                pop[i] = trial;
                fit[i] = tf;
            }
        }
        generations += 1;
        best_trace.push(fit[best_of(&fit)]);
    }
    if !converged && spread_ok(&fit) {
        converged = true;
    }

    let b = best_of(&fit);
    if !fit[b].is_finite() {
        return Err(Error::Optimization(format!(
            "objective was infinite at all {evaluations} evaluated points"
        )));
    }
    Ok(DeResult {
        x: pop[b].clone(),
        value: fit[b],
        generations,
        evaluations,
        best_trace,
        infeasible,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(d: usize, r: f64) -> ParamBox {
        ParamBox::new(vec![-r; d], vec![r; d]).unwrap()
    }

    #[test]
    fn sphere() {
        let res = de_minimize(|x| x.iter().map(|v| v * v).sum(), &cube(3, 1.0), &DeConfig::default()).unwrap();
        let norm = res.x.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(norm <= 1e-4, "{:?}", res.x);
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let cfg = DeConfig { max_gens: 1000, tol: 1e-14, ..DeConfig::default() };
        let res = de_minimize(f, &cube(2, 2.0), &cfg).unwrap();
        assert!((res.x[0] - 1.0).abs() < 1e-3 && (res.x[1] - 1.0).abs() < 1e-3, "{:?}", res.x);
    }

    #[test]
    fn deterministic_and_independent_of_parallelism() {
        let f = |x: &[f64]| (x[0] - 0.3).powi(2) + (3.0 * x[1]).sin();
        let par = DeConfig { seed: 5, ..DeConfig::default() };
        let seq = DeConfig { parallel: false, ..par.clone() };
        let a = de_minimize(f, &cube(2, 1.0), &par).unwrap();
        let b = de_minimize(f, &cube(2, 1.0), &par).unwrap();
        let c = de_minimize(f, &cube(2, 1.0), &seq).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn best_trace_is_monotone_and_points_stay_in_box() {
        let bounds = ParamBox::new(vec![0.0, -1.0], vec![0.5, 3.0]).unwrap();
        let outside = std::sync::atomic::AtomicUsize::new(0);
        let f = |x: &[f64]| {
            if !bounds.contains(x) {
                outside.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            }
            (x[0] - 2.0).powi(2) + (x[1] + 4.0).powi(2)
        };
        let res = de_minimize(f, &bounds, &DeConfig::default()).unwrap();
        assert_eq!(outside.into_inner(), 0);
        assert!(res.best_trace.windows(2).all(|w| w[1] <= w[0]));
        // optimum sits in the corner
        assert!((res.x[0] - 0.5).abs() < 1e-6 && (res.x[1] + 1.0).abs() < 1e-6);
    }

    #[test]
    fn infeasible_regions_are_avoided() {
        let f = |x: &[f64]| if x[0] < 0.0 { f64::INFINITY } else { (x[0] - 0.1).powi(2) };
        let res = de_minimize(f, &cube(1, 1.0), &DeConfig { population: Some(10), ..DeConfig::default() }).unwrap();
        assert!((res.x[0] - 0.1).abs() < 1e-4);
        assert!(res.infeasible > 0);
    }

    #[test]
    fn all_infinite_is_an_error() {
        let cfg = DeConfig { max_gens: 5, ..DeConfig::default() };
        let err = de_minimize(|_| f64::INFINITY, &cube(2, 1.0), &cfg).unwrap_err();
        assert!(matches!(err, Error::Optimization(_)));
        let err = de_minimize(|_| f64::NAN, &cube(2, 1.0), &cfg).unwrap_err();
        assert!(matches!(err, Error::Optimization(_)));
    }

    #[test]
    fn value_not_worse_than_initial_population() {
        let f = |x: &[f64]| (5.0 * x[0]).cos() + x[1].abs();
        let cfg = DeConfig { max_gens: 3, seed: 11, ..DeConfig::default() };
        let res = de_minimize(f, &cube(2, 1.0), &cfg).unwrap();
        assert!(res.value <= res.best_trace[0]);
        assert_eq!(res.generations, 3);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let b = cube(2, 1.0);
        for cfg in [
            DeConfig { population: Some(3), ..DeConfig::default() },
            DeConfig { f: 0.0, ..DeConfig::default() },
            DeConfig { f: 2.5, ..DeConfig::default() },
            DeConfig { cr: 1.5, ..DeConfig::default() },
        ] {
            assert!(matches!(de_minimize(|x| x[0], &b, &cfg), Err(Error::Config(_))));
        }
        assert!(ParamBox::new(vec![1.0], vec![0.0]).is_err());
        assert!(ParamBox::new(vec![], vec![]).is_err());
    }

    #[test]
    fn box_grid_enumerates_all_points() {
        let b = ParamBox::new(vec![0.0, 10.0], vec![1.0, 20.0]).unwrap();
        let g = b.grid(3);
        assert_eq!(g.len(), 9);
        assert_eq!(g[0], vec![0.0, 10.0]);
        assert_eq!(g[8], vec![1.0, 20.0]);
        assert_eq!(b.grid(1), vec![vec![0.5, 15.0]]);
    }
}
