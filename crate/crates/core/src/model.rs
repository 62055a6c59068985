//! Problem parameters, closed-form thresholds and the predicted regime.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance from `delta = 1` inside which the exponential (unit) branch is used.
pub const UNIT_DELTA_TOL: f64 = 1e-8;

/// Relative tolerance for `delta = N/2`.
const HALF_DIM_TOL: f64 = 1e-12;

/// Dimension, fringing coefficient and (optionally) voltage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub dim: u32,
    pub delta: f64,
    pub lambda: Option<f64>,
}

impl ProblemParams {
    pub fn new(dim: u32, delta: f64) -> Result<Self> {
        let p = ProblemParams { dim, delta, lambda: None };
        p.validate()?;
        Ok(p)
    }

    pub fn with_lambda(dim: u32, delta: f64, lambda: f64) -> Result<Self> {
        let p = ProblemParams { dim, delta, lambda: Some(lambda) };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::InvalidParams(format!("dim = {} < 2", self.dim)));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidParams(format!("delta = {} must be > 0", self.delta)));
        }
        if let Some(l) = self.lambda {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::InvalidParams(format!("lambda = {l} must be > 0")));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> f64 {
        self.dim as f64
    }

    pub fn is_unit(&self) -> bool {
        (self.delta - 1.0).abs() <= UNIT_DELTA_TOL
    }

    pub fn is_half_dim(&self) -> bool {
        (self.delta - self.n() / 2.0).abs() <= HALF_DIM_TOL * self.n()
    }

    /// `lambda* = N - 1 - delta`, the limit of `lambda(alpha)` for `delta < N/2`.
    pub fn lambda_star(&self) -> f64 {
        self.n() - 1.0 - self.delta
    }

    /// `(N - 2 - 2 sqrt(N - 1)) / 2`, the Type I / Type II boundary.
    pub fn type_boundary(&self) -> f64 {
        let n = self.n();
        (n - 2.0 - 2.0 * (n - 1.0).sqrt()) / 2.0
    }
}

/// A real number or `+inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExtReal {
    Finite(f64),
    Infinite(Infinity),
}

/// Marker for `+inf`; serializes as the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Infinity {
    #[serde(rename = "inf")]
    PosInf,
}

impl ExtReal {
    pub const INF: ExtReal = ExtReal::Infinite(Infinity::PosInf);

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(*v),
            ExtReal::Infinite(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

/// Closed-form thresholds for a given `(N, delta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// `N - 1 - delta`, present when `delta < N - 1`.
    pub lambda_star: Option<f64>,
    /// `delta (N - 1 - delta) / (delta - 1)` for `N >= 3`, `N/2 <= delta < N - 1`.
    pub lambda_3star: Option<f64>,
    /// `N (2/(delta+1))^((delta+1)/(delta-1))` for `delta > 1`.
    pub lambda_bar_lower: Option<f64>,
    /// `min(mu1/4, mu1/delta)`.
    pub lambda_upper: f64,
    pub p: Option<f64>,
    pub p_c: ExtReal,
    pub p_s: ExtReal,
    pub p_jl: ExtReal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// `0 < delta < 1`
    SubUnit,
    /// `delta = 1`
    Unit,
    /// `1 < delta < N/2`
    MidRange,
    /// `delta = N/2`
    Critical,
    /// `delta > N/2`
    Fold,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PredictedType {
    TypeI,
    TypeII,
    FoldCurve,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegimeClass {
    pub branch: Branch,
    pub predicted_type: PredictedType,
}

/// Transform exponent: `(1+delta)/(1-delta)` below one, `(delta+1)/(delta-1)` above.
pub fn transform_exponent(delta: f64) -> Option<f64> {
    if (delta - 1.0).abs() <= UNIT_DELTA_TOL {
        None
    } else if delta < 1.0 {
        Some((1.0 + delta) / (1.0 - delta))
    } else {
        Some((delta + 1.0) / (delta - 1.0))
    }
}

/// Predicted shape of the bifurcation curve.
pub fn classify_regime(params: &ProblemParams) -> RegimeClass {
    let n = params.n();
    let d = params.delta;
    let branch = if params.is_half_dim() {
        Branch::Critical
    } else if params.is_unit() {
        Branch::Unit
    } else if d < 1.0 {
        Branch::SubUnit
    } else if d < n / 2.0 {
        Branch::MidRange
    } else {
        Branch::Fold
    };
    let predicted_type = if params.is_half_dim() || d >= n / 2.0 {
        PredictedType::FoldCurve
    } else if params.dim >= 3 && d <= params.type_boundary() {
        PredictedType::TypeI
    } else {
        PredictedType::TypeII
    };
    RegimeClass { branch, predicted_type }
}

/// Critical exponent `p_c` of the MEMS power problem.
pub fn p_c(dim: u32) -> ExtReal {
    if dim >= 10 {
        ExtReal::INF
    } else {
        let n = dim as f64;
        ExtReal::Finite(-1.0 + 4.0 / (4.0 - n + 2.0 * (n - 1.0).sqrt()))
    }
}

/// Sobolev exponent `(N+2)/(N-2)`.
pub fn p_sobolev(dim: u32) -> ExtReal {
    if dim <= 2 {
        ExtReal::INF
    } else {
        let n = dim as f64;
        ExtReal::Finite((n + 2.0) / (n - 2.0))
    }
}

/// Joseph–Lundgren exponent.
pub fn p_joseph_lundgren(dim: u32) -> ExtReal {
    if dim < 11 {
        ExtReal::INF
    } else {
        let n = dim as f64;
        ExtReal::Finite(1.0 + 4.0 / (n - 4.0 - 2.0 * (n - 1.0).sqrt()))
    }
}

pub fn thresholds(params: &ProblemParams, mu1: f64) -> Thresholds {
    let n = params.n();
    let d = params.delta;
    let lambda_star = (d < n - 1.0).then(|| n - 1.0 - d);
    let lambda_3star = (params.dim >= 3 && (d >= n / 2.0 || params.is_half_dim()) && d < n - 1.0)
        .then(|| d * (n - 1.0 - d) / (d - 1.0));
    let lambda_bar_lower = (d > 1.0 && !params.is_unit())
        .then(|| n * (2.0 / (d + 1.0)).powf((d + 1.0) / (d - 1.0)));
    Thresholds {
        lambda_star,
        lambda_3star,
        lambda_bar_lower,
        lambda_upper: (mu1 / 4.0).min(mu1 / d),
        p: transform_exponent(d),
        p_c: p_c(params.dim),
        p_s: p_sobolev(params.dim),
        p_jl: p_joseph_lundgren(params.dim),
    }
}
