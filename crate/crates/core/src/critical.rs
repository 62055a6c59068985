//! Singular solutions at the critical exponent `p = N/(N-2)`.
//!
//! Inward shots of `v'' + (N-1)/r v' + v^p = 0`, `v(1) = 0`, `v'(1) = -alpha` are integrated in
//! `t = -ln r`, where the equation reads `v_tt - (N-2) v_t + e^(-2t) v^p = 0`. Because the
//! exponent is critical, `r -> c^(N-2) v(c r)` maps solutions to solutions, and
//!
//! ```text
//! V(r) = rho^(N-2) lambda^(-(N-2)/2) v(rho r)
//! ```
//!
//! solves `V'' + (N-1)/r V' + lambda V^p = 0` with `V(1) = a` once `rho^(N-2) v(rho) = lambda^((N-2)/2) a`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{Controls, Dopri5};
use crate::profile::{ProfileKind, RadialProfile};

/// Step in `t = -ln r`.
pub const STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShotOutcome {
    /// `v` stays positive and increasing down to `r_min`.
    Singular,
    /// `v` reached an interior maximum (`v_t = 0`) before `r_min`.
    Turned,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InwardShot {
    pub dim: u32,
    pub alpha: f64,
    pub outcome: ShotOutcome,
    /// Smallest radius reached.
    pub r_min: f64,
    /// Uniform nodes `t_i = i * STEP`; `r_i = e^(-t_i)` decreases.
    pub t: Vec<f64>,
    pub v: Vec<f64>,
    /// `v_t = -r v'(r)`.
    pub vt: Vec<f64>,
}

fn exponent(dim: u32) -> f64 {
    let n = dim as f64;
    n / (n - 2.0)
}

fn stepper(dim: u32) -> Dopri5<impl Fn(f64, &[f64; 2]) -> [f64; 2], 2> {
    let k = dim as f64 - 2.0;
    let p = exponent(dim);
    Dopri5::new(
        move |t: f64, y: &[f64; 2]| [y[1], k * y[1] - (-2.0 * t).exp() * y[0].max(0.0).powf(p)],
        Controls::default(),
    )
}

/// Fixed-step integration from `t0` with `(v, v_t)`, stopping at `t_end` or when `v_t <= 0`.
fn march(dim: u32, t0: f64, y0: [f64; 2], t_end: f64) -> Result<(Vec<[f64; 2]>, bool)> {
    let ode = stepper(dim);
    let steps = ((t_end - t0) / STEP).round() as usize;
    let mut ys = Vec::with_capacity(steps + 1);
    ys.push(y0);
    let mut y = y0;
    for i in 0..steps {
        let t = t0 + i as f64 * STEP;
        y = ode.step(t, &y, STEP);
        if !y[0].is_finite() || !y[1].is_finite() {
            return Err(Error::Blowup { r: (-t).exp() });
        }
        ys.push(y);
        if y[1] <= 0.0 {
            return Ok((ys, true));
        }
    }
    Ok((ys, false))
}

pub fn shoot_inward(dim: u32, alpha: f64, r_min: f64) -> Result<InwardShot> {
    if dim < 3 || !(alpha > 0.0) || !(r_min >= 1e-6 && r_min < 1.0) {
        return Err(Error::InvalidParams(format!(
            "need N >= 3, alpha > 0 and r_min in [1e-6, 1), got N = {dim}, alpha = {alpha}, r_min = {r_min}"
        )));
    }
    // v_t(0) = -r v'(r) at r = 1
    let (ys, turned) = march(dim, 0.0, [0.0, alpha], -r_min.ln())?;
    let t: Vec<f64> = (0..ys.len()).map(|i| i as f64 * STEP).collect();
    Ok(InwardShot {
        dim,
        alpha,
        outcome: if turned { ShotOutcome::Turned } else { ShotOutcome::Singular },
        r_min: (-t[t.len() - 1]).exp(),
        v: ys.iter().map(|y| y[0]).collect(),
        vt: ys.iter().map(|y| y[1]).collect(),
        t,
    })
}

impl InwardShot {
    /// `(v, v_t)` at any `t` in range, by one exact step from the preceding node.
    pub fn state_at(&self, t: f64) -> [f64; 2] {
        let i = ((t / STEP).floor() as usize).min(self.t.len() - 1);
        let h = t - self.t[i];
        let y = [self.v[i], self.vt[i]];
        if h == 0.0 {
            y
        } else {
            stepper(self.dim).step(self.t[i], &y, h)
        }
    }

    pub fn radii(&self) -> Vec<f64> {
        self.t.iter().map(|t| (-t).exp()).collect()
    }

    /// `v(r) / [r^(2-N) (ln 1/r)^(-(N-2)/2)]` at each node with `r < 1`.
    pub fn aviles_ratios(&self) -> Vec<(f64, f64)> {
        let k = self.dim as f64 - 2.0;
        self.t
            .iter()
            .zip(&self.v)
            .skip(1)
            .map(|(&t, &v)| ((-t).exp(), v / ((k * t).exp() * t.powf(-0.5 * k))))
            .collect()
    }
}

/// `((N-2)/sqrt 2)^(N-2)`, the limit of [`InwardShot::aviles_ratios`] as `r -> 0`.
pub fn aviles_limit(dim: u32) -> f64 {
    let k = dim as f64 - 2.0;
    (k / 2f64.sqrt()).powf(k)
}

/// Bracket `(lo, hi)` with the shot from `lo` singular and from `hi` turned, both on `[r_min, 1]`.
pub fn alpha_star_bracket(dim: u32, r_min: f64, rel_tol: f64) -> Result<(f64, f64)> {
    let singular = |a: f64| shoot_inward(dim, a, r_min).map(|s| s.outcome == ShotOutcome::Singular);
    let mut lo = 1e-3;
    if !singular(lo)? {
        return Err(Error::PreconditionViolated(format!("shot from alpha = {lo} already turns")));
    }
    let mut hi = 2.0 * lo;
    while singular(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > 1e8 {
            return Err(Error::PreconditionViolated("no turning shot below alpha = 1e8".into()));
        }
    }
    while hi - lo > rel_tol * hi {
        let mid = 0.5 * (lo + hi);
        if singular(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

/// A member `V_beta` of the rescaled family, on `r = e^(-(t_i - t_rho))` for grid nodes
/// `t_i > t_rho` plus `r = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rescaled {
    pub dim: u32,
    pub beta: f64,
    pub rho: f64,
    pub lambda: f64,
    pub a: f64,
    /// Increasing radii ending at 1.
    pub r: Vec<f64>,
    pub v: Vec<f64>,
    pub dv: Vec<f64>,
}

/// Builds `V_beta` from the largest `rho` with `rho^(N-2) v(rho) = lambda^((N-2)/2) a`.
pub fn rescale_family(shot: &InwardShot, lambda: f64, a: f64) -> Result<Rescaled> {
    if !(lambda > 0.0) || !(a > 0.0) {
        return Err(Error::InvalidParams(format!("need lambda > 0 and a > 0, got {lambda}, {a}")));
    }
    let k = shot.dim as f64 - 2.0;
    let target = lambda.powf(0.5 * k) * a;
    let weighted = |t: f64, v: f64| (-k * t).exp() * v;
    let (imax, max) = shot
        .t
        .iter()
        .zip(&shot.v)
        .map(|(&t, &v)| weighted(t, v))
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, w)| if w > acc.1 { (i, w) } else { acc });
    if !(max > target) {
        return Err(Error::LambdaTooLarge { max, target });
    }
    // weighted is 0 at t = 0 and above target at imax; the first crossing gives the largest rho
    let j = (1..=imax)
        .find(|&i| weighted(shot.t[i], shot.v[i]) > target)
        .unwrap_or(imax);
    let (mut lo, mut hi) = (shot.t[j - 1], shot.t[j]);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if weighted(mid, shot.state_at(mid)[0]) > target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let t_rho = if weighted(hi, shot.state_at(hi)[0]) - target < target - weighted(lo, shot.state_at(lo)[0]) {
        hi
    } else {
        lo
    };
    let rho = (-t_rho).exp();
    let y_rho = shot.state_at(t_rho);
    // a / v(rho) equals rho^(N-2) lambda^(-(N-2)/2) up to the root tolerance and makes V(1) = a exactly
    let scale = a / y_rho[0];
    let mut r = vec![1.0];
    let mut v = vec![a];
    let mut dv = vec![-scale * y_rho[1]];
    for i in j..shot.t.len() {
        if shot.t[i] > t_rho {
            let ri = (-(shot.t[i] - t_rho)).exp();
            r.push(ri);
            v.push(scale * shot.v[i]);
            dv.push(-scale * shot.vt[i] / ri);
        }
    }
    r.reverse();
    v.reverse();
    dv.reverse();
    Ok(Rescaled { dim: shot.dim, beta: shot.alpha, rho, lambda, a, r, v, dv })
}

impl Rescaled {
    /// Largest term-scaled residual of `V'' + (N-1)/r V' + lambda V^p` over the uniform-grid nodes,
    /// with `V_ss` and `V_s` (`s = ln r`) from five-point differences.
    pub fn residual(&self) -> f64 {
        let k = self.dim as f64 - 2.0;
        let p = exponent(self.dim);
        // grid nodes exclude the appended r = 1
        let m = self.r.len() - 1;
        let mut worst = 0.0f64;
        for i in 2..m.saturating_sub(2) {
            let f = &self.v;
            let vs = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * STEP);
            let vss = (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]) / (12.0 * STEP * STEP);
            let src = self.lambda * self.r[i] * self.r[i] * f[i].powf(p);
            let res = vss + k * vs + src;
            let scale = vss.abs() + (k * vs).abs() + src.abs();
            worst = worst.max(res.abs() / scale);
        }
        worst
    }

    /// Rupture profile `U = 1 - V^(-1/(N-2))` of the MEMS problem with `delta = N-1` and
    /// `lambda_MEMS = lambda/(N-2)`; needs `a = 1`.
    pub fn to_rupture(&self) -> Result<RadialProfile> {
        if self.a != 1.0 {
            return Err(Error::PreconditionViolated(format!("the MEMS map needs V(1) = 1, got a = {}", self.a)));
        }
        let q = 1.0 / (self.dim as f64 - 2.0);
        let gap: Vec<f64> = self.v.iter().map(|v| v.powf(-q)).collect();
        let mut u: Vec<f64> = gap.iter().map(|g| 1.0 - g).collect();
        *u.last_mut().unwrap() = 0.0;
        let du = self.v.iter().zip(&self.dv).map(|(v, dv)| q * v.powf(-q - 1.0) * dv).collect();
        Ok(RadialProfile {
            r: self.r.clone(),
            u,
            du,
            gap,
            kind: ProfileKind::Rupture,
            lambda: self.lambda * q,
            alpha: None,
        })
    }

    /// Largest `|V_self - V_other|` at radii both samples share within `1e-12`.
    pub fn sup_distance(&self, other: &Rescaled) -> f64 {
        let mut worst = 0.0f64;
        for (r, v) in self.r.iter().zip(&self.v) {
            if let Some(w) = crate::profile::interpolate(&other.r, &other.v, *r) {
                worst = worst.max((v - w).abs());
            }
        }
        worst
    }
}

/// Relative gap between `c^(N-2) v(c r)` and a direct integration of the same equation started
/// at `r = 1/c` with `v = 0`, `v' = -c^(N-1) alpha`, over the common radii.
pub fn scaling_identity_error(dim: u32, alpha: f64, c: f64, r_min: f64) -> Result<f64> {
    let shot = shoot_inward(dim, alpha, r_min)?;
    let k = dim as f64 - 2.0;
    let t0 = c.ln();
    let t_end = t0 + shot.t[shot.t.len() - 1];
    // v_t = -r v'(r) = c^(N-2) alpha at r = 1/c
    let (ys, _) = march(dim, t0, [0.0, c.powf(k) * alpha], t_end)?;
    let ck = c.powf(k);
    let mut worst = 0.0f64;
    for (y, v) in ys.iter().zip(&shot.v).skip(1) {
        let want = ck * v;
        worst = worst.max((y[0] - want).abs() / want.abs());
    }
    Ok(worst)
}
