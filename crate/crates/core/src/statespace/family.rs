use serde::{Deserialize, Serialize};

use super::{ModelFamily, SystemMatrices};
use crate::error::{Error, Result};
use crate::optimize::ParamBox;

/// Two-dimensional family with `A = diag(ϑ1, ϑ2)`,
/// `B = (1, -1)'/(ϑ2 - ϑ1)`, `C = (-ϑ1(1 + ϑ2), -ϑ2(1 + ϑ1))'`, `Σ = ϑ3`.
///
/// Its output spectral density is
/// `(ϑ3/2π)(ω² + ϑ1²ϑ2²)/((ω² + ϑ1²)(ω² + ϑ2²))`, symmetric under
/// `ϑ1 ↔ ϑ2`; the default box enforces `ϑ1 > ϑ2` and keeps both away from `-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExampleFamily {
    theta_box: ParamBox,
}

impl ExampleFamily {
    pub fn with_box(theta_box: ParamBox) -> Result<Self> {
        if theta_box.dim() != 3 {
            return Err(Error::Config(format!("example family box must be 3-dimensional, got {}", theta_box.dim())));
        }
        Ok(Self { theta_box })
    }

    pub fn default_box() -> ParamBox {
        ParamBox::new(vec![-0.95, -6.0, 0.01], vec![-0.05, -1.1, 2.0]).expect("valid default box")
    }
}

impl Default for ExampleFamily {
    fn default() -> Self {
        Self {
            theta_box: Self::default_box(),
        }
    }
}

impl ModelFamily for ExampleFamily {
    fn name(&self) -> &str {
        "example2d"
    }
    fn state_dim(&self) -> usize {
        2
    }
    fn param_dim(&self) -> usize {
        3
    }
    fn theta_box(&self) -> &ParamBox {
        &self.theta_box
    }

    fn fill(&self, theta: &[f64], out: &mut SystemMatrices) -> Result<()> {
        let (t1, t2, t3) = (theta[0], theta[1], theta[2]);
        if !(t1.is_finite() && t2.is_finite() && t3.is_finite()) {
            return Err(Error::Parameter(format!("non-finite parameter {theta:?}")));
        }
        if !(t1 < 0.0 && t2 < 0.0) {
            return Err(Error::Parameter(format!("need theta1, theta2 < 0, got ({t1}, {t2})")));
        }
        if (t1 - t2).abs() <= 1e-12 * t1.abs().max(t2.abs()) {
            return Err(Error::Parameter(format!("need theta1 != theta2, got {t1} twice")));
        }
        for (name, v) in [("theta1", t1), ("theta2", t2)] {
            if (v + 1.0).abs() <= 1e-12 {
                return Err(Error::Parameter(format!("need {name} != -1 (input vector loses rank)")));
            }
        }
        if !(t3 > 0.0) {
            return Err(Error::Parameter(format!("need theta3 > 0, got {t3}")));
        }
        out.a.fill(0.0);
        out.a[(0, 0)] = t1;
        out.a[(1, 1)] = t2;
        let d = t2 - t1;
        out.b[0] = 1.0 / d;
        out.b[1] = -1.0 / d;
        out.c[0] = -t1 * (1.0 + t2);
        out.c[1] = -t2 * (1.0 + t1);
        out.sigma = t3;
        Ok(())
    }
}

/// Scalar Ornstein–Uhlenbeck model: `A = -ϑ1`, `B = C = 1`, `Σ = ϑ2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Car1Family {
    theta_box: ParamBox,
}

impl Car1Family {
    pub fn with_box(theta_box: ParamBox) -> Result<Self> {
        if theta_box.dim() != 2 {
            return Err(Error::Config(format!("car1 box must be 2-dimensional, got {}", theta_box.dim())));
        }
        Ok(Self { theta_box })
    }
}

impl Default for Car1Family {
    fn default() -> Self {
        Self {
            theta_box: ParamBox::new(vec![0.05, 0.01], vec![5.0, 5.0]).expect("valid default box"),
        }
    }
}

impl ModelFamily for Car1Family {
    fn name(&self) -> &str {
        "car1"
    }
    fn state_dim(&self) -> usize {
        1
    }
    fn param_dim(&self) -> usize {
        2
    }
    fn theta_box(&self) -> &ParamBox {
        &self.theta_box
    }

    fn fill(&self, theta: &[f64], out: &mut SystemMatrices) -> Result<()> {
        let (a, s) = (theta[0], theta[1]);
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Parameter(format!("need a > 0, got {a}")));
        }
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::Parameter(format!("need sigma > 0, got {s}")));
        }
        out.a[(0, 0)] = -a;
        out.b[0] = 1.0;
        out.c[0] = 1.0;
        out.sigma = s;
        Ok(())
    }
}

/// Built-in families selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyId {
    Example2d,
    Car1,
}

impl FamilyId {
    /// The family with its default box, or with `theta_box` if given.
    pub fn build(self, theta_box: Option<ParamBox>) -> Result<Box<dyn ModelFamily>> {
        Ok(match (self, theta_box) {
            (FamilyId::Example2d, None) => Box::new(ExampleFamily::default()),
            (FamilyId::Example2d, Some(b)) => Box::new(ExampleFamily::with_box(b)?),
            (FamilyId::Car1, None) => Box::new(Car1Family::default()),
            (FamilyId::Car1, Some(b)) => Box::new(Car1Family::with_box(b)?),
        })
    }

    pub fn param_dim(self) -> usize {
        match self {
            FamilyId::Example2d => 3,
            FamilyId::Car1 => 2,
        }
    }
}

impl std::str::FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "example2d" => Ok(FamilyId::Example2d),
            "car1" => Ok(FamilyId::Car1),
            other => Err(Error::Config(format!("unknown family '{other}' (expected example2d or car1)"))),
        }
    }
}
