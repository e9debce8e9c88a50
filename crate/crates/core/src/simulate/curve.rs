use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Named coefficient functions of the simulation study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BuiltinCurve {
    /// `1/10 + |cos(t/500)|/2`
    A1,
    /// `1 + sin(t/150)/10`
    A2,
    /// `1/2 - t/5000`
    A3,
    /// `-1/2 + 0.1 |sin(t/500)|`
    Theta1,
    /// `-3 - 0.2 |cos(t/500)|`
    Theta2,
}

impl BuiltinCurve {
    #[inline]
    pub fn eval(self, t: f64) -> f64 {
        match self {
            BuiltinCurve::A1 => 0.1 + 0.5 * (t / 500.0).cos().abs(),
            BuiltinCurve::A2 => 1.0 + 0.1 * (t / 150.0).sin(),
            BuiltinCurve::A3 => 0.5 - t / 5000.0,
            BuiltinCurve::Theta1 => -0.5 + 0.1 * (t / 500.0).sin().abs(),
            BuiltinCurve::Theta2 => -3.0 - 0.2 * (t / 500.0).cos().abs(),
        }
    }
}

impl std::str::FromStr for BuiltinCurve {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "a1" => BuiltinCurve::A1,
            "a2" => BuiltinCurve::A2,
            "a3" => BuiltinCurve::A3,
            "theta1" => BuiltinCurve::Theta1,
            "theta2" => BuiltinCurve::Theta2,
            other => {
                return Err(Error::Config(format!(
                    "unknown curve '{other}' (expected a1, a2, a3, theta1 or theta2)"
                )))
            }
        })
    }
}

/// A scalar coefficient function `t ↦ value` in rescaled time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientCurve {
    Builtin(BuiltinCurve),
    Constant(f64),
    /// Linear interpolation between `(t, value)` knots, constant beyond the ends.
    PiecewiseLinear(Vec<(f64, f64)>),
}

impl CoefficientCurve {
    pub fn piecewise_linear(knots: Vec<(f64, f64)>) -> Result<Self> {
        let curve = CoefficientCurve::PiecewiseLinear(knots);
        curve.validate()?;
        Ok(curve)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CoefficientCurve::Builtin(_) => Ok(()),
            CoefficientCurve::Constant(v) => {
                if v.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Config(format!("constant curve value {v} is not finite")))
                }
            }
            CoefficientCurve::PiecewiseLinear(knots) => {
                if knots.is_empty() {
                    return Err(Error::Config("piecewise-linear curve needs knots".into()));
                }
                if knots.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
                    return Err(Error::Config("piecewise-linear knots must be finite".into()));
                }
                if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::Config(
                        "piecewise-linear knots must be strictly increasing in t".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            CoefficientCurve::Builtin(b) => b.eval(t),
            CoefficientCurve::Constant(v) => *v,
            CoefficientCurve::PiecewiseLinear(knots) => {
                let first = knots[0];
                let last = knots[knots.len() - 1];
                if t <= first.0 {
                    return first.1;
                }
                if t >= last.0 {
                    return last.1;
                }
                let k = knots.partition_point(|&(x, _)| x <= t);
                let (t0, v0) = knots[k - 1];
                let (t1, v1) = knots[k];
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, CoefficientCurve::Constant(_))
    }

    /// Minimum over a uniform grid of `points` evaluations on `[t0, t1]`
    /// (plus the knots, for piecewise-linear curves).
    pub fn min_on(&self, t0: f64, t1: f64, points: usize) -> f64 {
        let points = points.max(2);
        let mut lo = f64::INFINITY;
        for k in 0..points {
            let t = t0 + (t1 - t0) * k as f64 / (points - 1) as f64;
            lo = lo.min(self.eval(t));
        }
        if let CoefficientCurve::PiecewiseLinear(knots) = self {
            for &(t, v) in knots {
                if t >= t0 && t <= t1 {
                    lo = lo.min(v);
                }
            }
        }
        lo
    }

    /// Checks the positivity requirement `inf a > 0` of an OU coefficient on `[t0, t1]`.
    pub fn check_positive(&self, t0: f64, t1: f64) -> Result<()> {
        self.validate()?;
        let lo = self.min_on(t0, t1, 10_001);
        if lo > 0.0 {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "OU coefficient must stay positive on [{t0}, {t1}], minimum is {lo}"
            )))
        }
    }
}

impl std::str::FromStr for CoefficientCurve {
    type Err = Error;

    /// Parses a builtin name (`a2`) or a constant (`0.5`).
    fn from_str(s: &str) -> Result<Self> {
        if let Ok(v) = s.parse::<f64>() {
            let c = CoefficientCurve::Constant(v);
            c.validate()?;
            return Ok(c);
        }
        Ok(CoefficientCurve::Builtin(s.parse()?))
    }
}
