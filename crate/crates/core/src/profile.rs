//! Sampled radial profiles shared by every solver.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileKind {
    Regular,
    Rupture,
}

/// Threshold on `U` at the innermost node for the rupture flag.
pub const EPS_RUPTURE: f64 = 1e-3;

/// A radial solution `U(r)` sampled on increasing nodes in `(0, 1]`.
///
/// `gap` holds `1 - U` computed from the underlying representation rather than by
/// subtraction, so it stays accurate where `U` is within rounding distance of one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub gap: Vec<f64>,
    pub kind: ProfileKind,
    pub lambda: f64,
    pub alpha: Option<f64>,
}

impl RadialProfile {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// `U` at the outermost node.
    pub fn boundary_value(&self) -> f64 {
        *self.u.last().unwrap_or(&f64::NAN)
    }

    pub fn max_u(&self) -> f64 {
        self.u.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Kind implied by the samples: rupture when `U` at the innermost node exceeds
    /// `1 - EPS_RUPTURE`.
    pub fn inferred_kind(&self) -> ProfileKind {
        match self.u.first() {
            Some(&u0) if u0 > 1.0 - EPS_RUPTURE => ProfileKind::Rupture,
            _ => ProfileKind::Regular,
        }
    }

    /// `U''` at interior nodes from a three-point stencil on `dU` (non-uniform spacing).
    /// Entry `i` corresponds to node `i + 1`.
    pub fn second_derivative(&self) -> Vec<f64> {
        three_point_derivative(&self.r, &self.du)
    }

    /// Linear interpolation of `U` at `x`; `None` outside the sampled range.
    pub fn interpolate(&self, x: f64) -> Option<f64> {
        interpolate(&self.r, &self.u, x)
    }

    /// Sup-distance to `other` over this profile's nodes that lie in both ranges.
    pub fn sup_distance(&self, other: &RadialProfile) -> f64 {
        self.r
            .iter()
            .zip(&self.u)
            .filter_map(|(&x, &u)| other.interpolate(x).map(|v| (u - v).abs()))
            .fold(0.0, f64::max)
    }
}

/// Derivative at interior nodes from the three-point non-uniform stencil.
pub fn three_point_derivative(x: &[f64], f: &[f64]) -> Vec<f64> {
    (1..x.len().saturating_sub(1))
        .map(|i| {
            let h1 = x[i] - x[i - 1];
            let h2 = x[i + 1] - x[i];
            // difference form: exact zero on constant data
            (h1 / h2 * (f[i + 1] - f[i]) + h2 / h1 * (f[i] - f[i - 1])) / (h1 + h2)
        })
        .collect()
}

pub fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> Option<f64> {
    let (first, last) = (*xs.first()?, *xs.last()?);
    if x < first || x > last {
        return None;
    }
    let i = xs.partition_point(|&v| v < x);
    if i == 0 {
        return Some(ys[0]);
    }
    let (x0, x1) = (xs[i - 1], xs[i]);
    let w = (x - x0) / (x1 - x0);
    Some(ys[i - 1] + w * (ys[i] - ys[i - 1]))
}

/// Uniform nodes `k/m`, `k = 1..=m`.
pub fn uniform_nodes(m: usize) -> Vec<f64> {
    (1..=m).map(|k| k as f64 / m as f64).collect()
}

/// `m` log-spaced nodes from `lo` to `1`.
pub fn geometric_nodes(lo: f64, m: usize) -> Vec<f64> {
    let a = lo.ln();
    (0..m)
        .map(|k| {
            if k + 1 == m {
                1.0
            } else {
                (a * (1.0 - k as f64 / (m - 1) as f64)).exp()
            }
        })
        .collect()
}

/// Sorted union of two node sets with near-duplicates removed.
pub fn merge_nodes(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut all: Vec<f64> = a.iter().chain(b).copied().collect();
    all.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut out: Vec<f64> = Vec::with_capacity(all.len());
    for x in all {
        if out.last().map_or(true, |&l| x - l > 1e-9 * x.abs().max(1e-300)) {
            out.push(x);
        }
    }
    out
}
