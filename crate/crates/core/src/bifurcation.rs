//! The bifurcation curve `alpha -> lambda(alpha)`: tracing, Type I/II classification,
//! fold location and multiplicity counts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{thresholds, ProblemParams};
use crate::shoot::{boundary_layer_width, relative_residual, shoot, ShootControls, MIN_RESOLVABLE_LAYER};

/// Half-width of the dead band around `lambda*`, relative to `lambda*`. Samples inside
/// it carry no sign for crossing counts, and monotonicity is checked up to it.
pub const CROSSING_BAND: f64 = 1e-7;
/// Relative tolerance for treating a sampled `lambda` as equal to a target.
pub const FOLD_TOL: f64 = 1e-4;
/// A fold curve must fall below this fraction of its maximum at the end of the tail.
pub const FOLD_DECAY: f64 = 1e-2;
/// Each sample is repeated with a tenfold tighter tolerance; it is dropped when the two
/// values of `lambda` differ by more than this, relative.
pub const RELIABILITY_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaGrid {
    /// Uniform samples in `(0, 0.9]`.
    pub body: usize,
    /// Geometric samples of `1 - alpha` in `[tail_lo, tail_hi]`.
    pub tail: usize,
    pub tail_lo: f64,
    pub tail_hi: f64,
}

impl Default for AlphaGrid {
    fn default() -> Self {
        AlphaGrid { body: 120, tail: 60, tail_lo: 1e-8, tail_hi: 1e-1 }
    }
}

impl AlphaGrid {
    pub fn with_tail(mut self, tail: usize) -> Self {
        self.tail = tail;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.body + self.tail < 3 || !(self.tail_lo > 0.0 && self.tail_lo < self.tail_hi && self.tail_hi < 1.0) {
            return Err(Error::InvalidParams(format!("bad alpha grid {self:?}")));
        }
        Ok(())
    }

    /// Sorted, deduplicated sample points. The decades `1 - alpha = 10^-k` inside the
    /// tail window are always included.
    pub fn alphas(&self) -> Vec<f64> {
        let mut a: Vec<f64> = (1..=self.body).map(|k| 0.9 * k as f64 / self.body as f64).collect();
        let (l0, l1) = (self.tail_hi.ln(), self.tail_lo.ln());
        let m = self.tail.max(2) - 1;
        if self.tail > 0 {
            a.extend((0..self.tail).map(|k| 1.0 - (l0 + (l1 - l0) * k as f64 / m as f64).exp()));
        }
        a.extend(
            (1..=16)
                .map(|k| 10f64.powi(-k))
                .filter(|&e| e >= self.tail_lo * (1.0 - 1e-12) && e <= self.tail_hi * (1.0 + 1e-12))
                .map(|e| 1.0 - e),
        );
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        a.dedup_by(|x, y| (*x - *y).abs() <= 1e-13);
        a
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    TypeI,
    TypeII,
    FoldCurve,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BifurcationSample {
    pub alpha: f64,
    pub lambda: f64,
    pub s0: f64,
    /// Term-scaled equation residual of the sampled profile; NaN when the profile has
    /// a boundary layer too thin to sample.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationCurve {
    pub dim: u32,
    pub delta: f64,
    pub lambda_star: Option<f64>,
    pub samples: Vec<BifurcationSample>,
    pub classification: Classification,
    /// Sign changes of `lambda - lambda*` over the tail window (a lower bound on the
    /// true count).
    pub crossings: usize,
    pub lambda_bar: f64,
    pub alpha_at_fold: f64,
    /// Requested samples that were not kept: `failed + unreliable`.
    pub dropped: usize,
    /// Shots that returned an error.
    pub failed: usize,
    /// Shots that did not survive the tolerance-refinement check.
    pub unreliable: usize,
    pub tail_start: f64,
}

impl BifurcationCurve {
    pub fn alphas(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.alpha).collect()
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.lambda).collect()
    }

    pub fn tail(&self) -> &[BifurcationSample] {
        let i = self.samples.partition_point(|s| s.alpha < self.tail_start);
        &self.samples[i..]
    }

    pub fn last(&self) -> Option<&BifurcationSample> {
        self.samples.last()
    }
}

/// Shoots at every grid point (in parallel) and classifies the result.
pub fn trace(params: &ProblemParams, grid: &AlphaGrid, controls: &ShootControls) -> Result<BifurcationCurve> {
    params.validate()?;
    grid.validate()?;
    let alphas = grid.alphas();
    let fine = controls.with_rtol(controls.ode.rtol * 0.1);
    let shots: Vec<Result<Option<BifurcationSample>>> = alphas
        .par_iter()
        .map(|&alpha| {
            let s = shoot(params, alpha, controls)?;
            let check = shoot(params, alpha, &fine)?.lambda;
            if (check - s.lambda).abs() > RELIABILITY_TOL * s.lambda.abs() {
                return Ok(None);
            }
            Ok(Some(BifurcationSample {
                alpha,
                lambda: s.lambda,
                s0: s.s0,
                residual: match boundary_layer_width(params, alpha) {
                    Some(w) if w < MIN_RESOLVABLE_LAYER => f64::NAN,
                    _ => relative_residual(&s.profile, params),
                },
            }))
        })
        .collect();
    let failed = shots.iter().filter(|s| s.is_err()).count();
    let unreliable = shots.iter().filter(|s| matches!(s, Ok(None))).count();
    let samples: Vec<BifurcationSample> = shots.into_iter().filter_map(|s| s.ok().flatten()).collect();
    let lambda_star = thresholds(params, 0.0).lambda_star;
    let mut curve = BifurcationCurve {
        dim: params.dim,
        delta: params.delta,
        lambda_star,
        samples,
        classification: Classification::Inconclusive,
        crossings: 0,
        lambda_bar: f64::NAN,
        alpha_at_fold: f64::NAN,
        dropped: failed + unreliable,
        failed,
        unreliable,
        tail_start: 1.0 - grid.tail_hi * (1.0 + 1e-12),
    };
    if let Some(i) = argmax(&curve) {
        curve.lambda_bar = curve.samples[i].lambda;
        curve.alpha_at_fold = curve.samples[i].alpha;
    }
    let (class, crossings) = classify(&curve, alphas.len());
    curve.classification = class;
    curve.crossings = crossings;
    Ok(curve)
}

fn sign_with_band(x: f64, band: f64) -> i8 {
    if x > band {
        1
    } else if x < -band {
        -1
    } else {
        0
    }
}

/// Sign changes of `values`, ignoring zero entries.
fn count_sign_changes(values: impl Iterator<Item = i8>) -> usize {
    let mut prev = 0i8;
    let mut n = 0;
    for s in values.filter(|&s| s != 0) {
        if prev != 0 && s != prev {
            n += 1;
        }
        prev = s;
    }
    n
}

/// Verdict and tail crossing count for a traced curve.
pub fn classify(curve: &BifurcationCurve, requested: usize) -> (Classification, usize) {
    let n = curve.samples.len();
    if n < 3 || curve.dropped * 10 > requested {
        return (Classification::Inconclusive, 0);
    }
    let imax = argmax(curve).unwrap();
    let last = curve.samples[n - 1].lambda;
    if imax > 0 && imax + 1 < n && last <= FOLD_DECAY * curve.lambda_bar {
        return (Classification::FoldCurve, 0);
    }
    let Some(ls) = curve.lambda_star else {
        return (Classification::Inconclusive, 0);
    };
    let band = CROSSING_BAND * ls;
    let tail = curve.tail();
    let crossings = count_sign_changes(tail.iter().map(|s| sign_with_band(s.lambda - ls, band)));
    if crossings >= 2 {
        return (Classification::TypeII, crossings);
    }
    let nondecreasing = tail.windows(2).all(|w| w[1].lambda >= w[0].lambda - band);
    if crossings == 0 && nondecreasing {
        (Classification::TypeI, 0)
    } else {
        (Classification::Inconclusive, crossings)
    }
}

/// Number of solutions of `lambda(alpha) = lambda` visible on the curve, with the
/// known endpoint `lambda(0+) = 0` prepended. Samples within `FOLD_TOL` of the target
/// count as touching it; a run of such samples counts once.
pub fn multiplicity(curve: &BifurcationCurve, lambda: f64) -> usize {
    multiplicity_with_tol(curve, lambda, FOLD_TOL)
}

pub fn multiplicity_with_tol(curve: &BifurcationCurve, lambda: f64, rel_tol: f64) -> usize {
    let band = rel_tol * lambda.abs();
    let signs: Vec<i8> = std::iter::once(-1)
        .chain(curve.samples.iter().map(|s| sign_with_band(s.lambda - lambda, band)))
        .collect();
    let mut count = 0;
    let mut prev = 0i8;
    let mut in_zero = false;
    for &s in &signs {
        if s == 0 {
            if !in_zero {
                count += 1;
                in_zero = true;
            }
            continue;
        }
        if !in_zero && prev != 0 && s != prev {
            count += 1;
        }
        in_zero = false;
        prev = s;
    }
    count
}

fn argmax(curve: &BifurcationCurve) -> Option<usize> {
    curve
        .samples
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.lambda.partial_cmp(&b.1.lambda).unwrap())
        .map(|(i, _)| i)
}

/// Parabola through the maximal sample and its neighbours: `(lambda_bar, alpha_hat)`.
pub fn fold(curve: &BifurcationCurve) -> Result<(f64, f64)> {
    let i = argmax(curve).ok_or(Error::FoldNotInterior { alpha: f64::NAN })?;
    let s = &curve.samples;
    if i == 0 || i + 1 == s.len() {
        return Err(Error::FoldNotInterior { alpha: s[i].alpha });
    }
    let (x0, x1, x2) = (s[i - 1].alpha, s[i].alpha, s[i + 1].alpha);
    let (y0, y1, y2) = (s[i - 1].lambda, s[i].lambda, s[i + 1].lambda);
    // divided differences
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let c2 = (d12 - d01) / (x2 - x0);
    if !(c2 < 0.0) {
        return Ok((y1, x1));
    }
    let c1 = d01 - c2 * (x0 + x1);
    let xh = (-c1 / (2.0 * c2)).clamp(x0, x2);
    let yh = y0 + d01 * (xh - x0) + c2 * (xh - x0) * (xh - x1);
    Ok((yh.max(y1), xh))
}

/// Golden-section maximisation of the true `lambda(alpha)` between the neighbours of
/// the maximal sample.
pub fn refine_fold(params: &ProblemParams, curve: &BifurcationCurve, controls: &ShootControls) -> Result<(f64, f64)> {
    let i = argmax(curve).ok_or(Error::FoldNotInterior { alpha: f64::NAN })?;
    let s = &curve.samples;
    if i == 0 || i + 1 == s.len() {
        return Err(Error::FoldNotInterior { alpha: s[i].alpha });
    }
    let f = |a: f64| shoot(params, a, controls).map(|r| r.lambda);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (s[i - 1].alpha, s[i + 1].alpha);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > 1e-9 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc > fd { (fc, c) } else { (fd, d) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub lambda_bar_numeric: f64,
    pub lower: Option<f64>,
    pub upper: f64,
    pub satisfied: bool,
}

/// Compares the sampled maximum with the closed-form lower bound (`delta > 1`) and the
/// eigenvalue upper bound.
pub fn check_bounds(params: &ProblemParams, curve: &BifurcationCurve, mu1: f64) -> BoundsReport {
    let t = thresholds(params, mu1);
    let lb = curve.lambda_bar;
    let satisfied = t.lambda_bar_lower.map_or(true, |l| l <= lb) && lb < t.lambda_upper;
    BoundsReport { lambda_bar_numeric: lb, lower: t.lambda_bar_lower, upper: t.lambda_upper, satisfied }
}
