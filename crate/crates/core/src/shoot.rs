//! Shooting on the radial equation with `lambda` scaled out.
//!
//! With `s = sqrt(lambda) r` the radial problem becomes
//! `U'' + (N-1)/s U' + (1 + delta U'^2)/(1-U) = 0`, `U(0) = alpha`, `U'(0) = 0`,
//! and the first zero `s0` of `U` gives `lambda = s0^2`.
//!
//! Close to `alpha = 1` the direct form loses precision in `1 - U`, so above
//! [`ALPHA_SWITCH`] the transformed branch equation is integrated instead, in
//! self-similar variables centred on the origin:
//!
//! | branch | unknown | equation | `lambda` |
//! |---|---|---|---|
//! | `delta < 1` | `Q = (1-U)^(1-delta) / (1-alpha)^(1-delta)` | `Q'' + (N-1)/rho Q' = Q^-p` | `rho0^2 (1-alpha)^2 / (1-delta)` |
//! | `delta = 1` | `w = u - u(0)` | `w'' + (N-1)/rho w' = -e^w` | `rho0^2 (1-alpha)^2 / 2` |
//! | `delta > 1` | `W = (u+1) / (u(0)+1)` | `W'' + (N-1)/rho W' = -W^p` | `rho0^2 (1-alpha)^2 / (delta-1)` |

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{thresholds, ProblemParams};
use crate::ode::{taylor_start, Controls, Dopri5, Outcome, Trajectory};
use crate::profile::{geometric_nodes, merge_nodes, uniform_nodes, ProfileKind, RadialProfile};
use crate::spectral;
use crate::transforms::{lambda_factor, to_transformed, TransformKind};

/// Above this center value the transformed branch equation is used.
pub const ALPHA_SWITCH: f64 = 0.99;
/// Length of the Taylor step off the origin.
pub const TAYLOR_STEP: f64 = 1e-4;
/// The direct integration gives up when `1 - U` drops below this.
pub const SINGULAR_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootControls {
    pub ode: Controls,
    /// Number of uniform profile nodes (a log-spaced set near the origin is added).
    pub profile_nodes: usize,
    pub alpha_switch: f64,
}

impl Default for ShootControls {
    fn default() -> Self {
        ShootControls {
            ode: Controls::default(),
            profile_nodes: 200,
            alpha_switch: ALPHA_SWITCH,
        }
    }
}

impl ShootControls {
    pub fn with_rtol(mut self, rtol: f64) -> Self {
        self.ode.rtol = rtol;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Route {
    Direct,
    Transformed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotResult {
    /// First zero of the scaled solution, `sqrt(lambda)`.
    pub s0: f64,
    pub lambda: f64,
    pub profile: RadialProfile,
    pub route: Route,
}

/// Give-up horizon `10 sqrt(N + min(mu1/4, mu1/delta))` in the scaled variable.
pub fn s_max(params: &ProblemParams) -> f64 {
    let mu = spectral::mu1(params.dim).mu1;
    let t = thresholds(params, mu);
    10.0 * (params.n() + t.lambda_upper).sqrt()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("alpha = {alpha} must lie in (0, 1)")))
    }
}

fn profile_nodes(m: usize, inner_scale: f64) -> Vec<f64> {
    let lo = (1e-3f64).min(inner_scale).max(1e-12);
    merge_nodes(&uniform_nodes(m), &geometric_nodes(lo, m / 2))
}

/// Width of the layer at `r = 1` through which `U` drops to 0, for `delta > N/2`.
///
/// There `W = (1-U)^(1-delta) / (1-alpha)^(1-delta)` crosses zero transversally, and
/// `U` leaves the neighbourhood of 1 only when `W` is within about
/// `(1-alpha)^(delta-1)` of that zero.
pub fn boundary_layer_width(params: &ProblemParams, alpha: f64) -> Option<f64> {
    let d = params.delta;
    (d > params.n() / 2.0).then(|| 0.1 * (1.0 - alpha).powf((d - 1.0).max(1.0)))
}

/// Below this width a layer at `r = 1` cannot be sampled in double precision.
pub const MIN_RESOLVABLE_LAYER: f64 = 1e-9;

/// Adds nodes clustered at `r = 1` for a boundary layer of width about `layer`.
fn with_boundary_layer(nodes: Vec<f64>, m: usize, layer: f64) -> Vec<f64> {
    let lo = layer.clamp(MIN_RESOLVABLE_LAYER, 1e-3);
    let near: Vec<f64> = geometric_nodes(lo, m).iter().filter(|&&d| d < 1.0).map(|d| 1.0 - d).collect();
    merge_nodes(&nodes, &near)
}

/// Evaluate a trajectory that starts after a Taylor step; `taylor` covers `[0, h0]`.
fn eval_with_start(
    traj: &Trajectory<2>,
    h0: f64,
    taylor: impl Fn(f64) -> [f64; 2],
    x: f64,
) -> [f64; 2] {
    if x <= h0 {
        taylor(x)
    } else {
        traj.eval(x)
            .or_else(|| traj.segments.last().map(|s| s.eval(x)))
            .unwrap_or_else(|| taylor(x))
    }
}

/// Direct integration of the scaled equation.
pub fn integrate_scaled(params: &ProblemParams, alpha: f64, controls: &ShootControls) -> Result<ShotResult> {
    params.validate()?;
    check_alpha(alpha)?;
    if 1.0 - alpha <= SINGULAR_EPS {
        return Err(Error::SingularityHit { s: 0.0, u: alpha });
    }
    let n = params.n();
    let delta = params.delta;
    let gap0 = 1.0 - alpha;
    let h0 = TAYLOR_STEP.min(0.1 * (2.0 * n * alpha * gap0).sqrt());
    let taylor = |s: f64| taylor_start(alpha, -1.0 / gap0, -1.0 / (gap0 * gap0), -2.0 * delta / gap0, n, s);
    let y0 = taylor(h0);

    let rhs = move |s: f64, y: &[f64; 2]| -> [f64; 2] {
        [y[1], -(n - 1.0) / s * y[1] - (1.0 + delta * y[1] * y[1]) / (1.0 - y[0])]
    };
    let ode = Dopri5::new(rhs, controls.ode);
    let s_end = s_max(params);
    let g = |_s: f64, y: &[f64; 2]| y[0];
    let mut hit: Option<(f64, f64)> = None;
    let run = ode.integrate(
        h0,
        y0,
        s_end,
        Some(&g),
        &mut |s, y| {
            if 1.0 - y[0] < SINGULAR_EPS || !y[0].is_finite() {
                hit = Some((s, y[0]));
                true
            } else {
                false
            }
        },
        true,
    )?;
    if let Some((s, u)) = hit {
        return Err(Error::SingularityHit { s, u });
    }
    if run.outcome != Outcome::Event {
        return Err(Error::NoZeroFound { s_max: s_end });
    }
    let s0 = run.t;
    let lambda = s0 * s0;

    let mut nodes = profile_nodes(controls.profile_nodes, 1e-3);
    if let Some(w) = boundary_layer_width(params, alpha) {
        nodes = with_boundary_layer(nodes, controls.profile_nodes, w);
    }
    let mut u = Vec::with_capacity(nodes.len());
    let mut du = Vec::with_capacity(nodes.len());
    let mut gap = Vec::with_capacity(nodes.len());
    for &r in &nodes {
        let y = if r == 1.0 { run.y } else { eval_with_start(&run.trajectory, h0, taylor, r * s0) };
        u.push(y[0]);
        du.push(y[1] * s0);
        gap.push(1.0 - y[0]);
    }
    Ok(ShotResult {
        s0,
        lambda,
        profile: RadialProfile {
            r: nodes,
            u,
            du,
            gap,
            kind: ProfileKind::Regular,
            lambda,
            alpha: Some(alpha),
        },
        route: Route::Direct,
    })
}

/// Integration of the transformed branch equation in self-similar variables.
pub fn integrate_transformed(
    params: &ProblemParams,
    alpha: f64,
    controls: &ShootControls,
) -> Result<ShotResult> {
    params.validate()?;
    check_alpha(alpha)?;
    let n = params.n();
    let delta = params.delta;
    let kind = TransformKind::for_delta(delta);
    let factor = lambda_factor(delta);
    let f1 = 1.0 - alpha;
    let rho_max = s_max(params) * factor.sqrt() / f1;

    // (initial value, F0, dF/dy, target for the event, relative-only error control)
    let (y_init, f0, f_y, p) = match kind {
        TransformKind::MemsPower => {
            let p = (1.0 + delta) / (1.0 - delta);
            (1.0, 1.0, -p, p)
        }
        TransformKind::Exponential => (0.0, -1.0, -1.0, 0.0),
        TransformKind::SuperlinearPower => {
            let p = (delta + 1.0) / (delta - 1.0);
            (1.0, -1.0, -p, p)
        }
    };
    let u_center = to_transformed(alpha, delta)?;
    let log_f1 = (-alpha).ln_1p();
    let mut ctl = controls.ode;
    if kind != TransformKind::Exponential {
        ctl.atol = 0.0;
    }

    let rhs = move |rho: f64, y: &[f64; 2]| -> [f64; 2] {
        let source = match kind {
            TransformKind::MemsPower => y[0].powf(-p),
            TransformKind::Exponential => -y[0].exp(),
            TransformKind::SuperlinearPower => -y[0].abs().powf(p - 1.0) * y[0],
        };
        [y[1], -(n - 1.0) / rho * y[1] + source]
    };
    // g changes sign where the physical boundary value u = 0 is reached
    let target_log = match kind {
        TransformKind::MemsPower => -(1.0 - delta) * log_f1,
        TransformKind::Exponential => -u_center,
        TransformKind::SuperlinearPower => (delta - 1.0) * log_f1,
    };
    let g = move |_rho: f64, y: &[f64; 2]| match kind {
        TransformKind::MemsPower => target_log - y[0].ln(),
        TransformKind::Exponential => y[0] - target_log,
        TransformKind::SuperlinearPower => y[0] - target_log.exp(),
    };

    let h0 = TAYLOR_STEP;
    let taylor = |x: f64| taylor_start(y_init, f0, f_y, 0.0, n, x);
    let ode = Dopri5::new(rhs, ctl);
    let run = ode.integrate(h0, taylor(h0), rho_max, Some(&g), &mut |_, y| !y[0].is_finite(), true)?;
    if run.outcome != Outcome::Event {
        return Err(Error::NoZeroFound { s_max: rho_max });
    }
    let rho0 = run.t;
    let lambda = rho0 * rho0 * f1 * f1 / factor;

    // back-map: gap = (1 - alpha) * G(y), dU/dr = -rho0 (1 - alpha) G'(y) y'
    let back = |y: [f64; 2]| -> (f64, f64) {
        match kind {
            TransformKind::MemsPower => {
                let q = 1.0 / (1.0 - delta);
                let gq = y[0].powf(q);
                (f1 * gq, -rho0 * f1 * q * gq / y[0] * y[1])
            }
            TransformKind::Exponential => {
                let e = (-0.5 * y[0]).exp();
                (f1 * e, 0.5 * rho0 * f1 * e * y[1])
            }
            TransformKind::SuperlinearPower => {
                let q = -1.0 / (delta - 1.0);
                let gq = y[0].powf(q);
                (f1 * gq, -rho0 * f1 * q * gq / y[0] * y[1])
            }
        }
    };
    let mut nodes = profile_nodes(controls.profile_nodes, 0.1 / rho0);
    if let Some(w) = boundary_layer_width(params, alpha) {
        nodes = with_boundary_layer(nodes, controls.profile_nodes, w);
    }
    let mut u = Vec::with_capacity(nodes.len());
    let mut du = Vec::with_capacity(nodes.len());
    let mut gap = Vec::with_capacity(nodes.len());
    for &r in &nodes {
        let y = if r == 1.0 { run.y } else { eval_with_start(&run.trajectory, h0, taylor, r * rho0) };
        let (gp, d) = back(y);
        gap.push(gp);
        u.push(if r == 1.0 { 0.0 } else { 1.0 - gp });
        du.push(d);
    }
    let s0 = lambda.sqrt();
    Ok(ShotResult {
        s0,
        lambda,
        profile: RadialProfile {
            r: nodes,
            u,
            du,
            gap,
            kind: ProfileKind::Regular,
            lambda,
            alpha: Some(alpha),
        },
        route: Route::Transformed,
    })
}

/// Shoot with the route chosen by `alpha_switch`.
///
/// For `delta = N/2` the transformed equation has the critical Sobolev exponent; its
/// solution decays like `rho^(2-N)` into a harmonic far field, where the constant mode
/// amplifies local errors by roughly `(1-alpha)^(1-delta)`. That case stays on the
/// direct route, which is exact for its polynomial solutions.
pub fn shoot(params: &ProblemParams, alpha: f64, controls: &ShootControls) -> Result<ShotResult> {
    if alpha > controls.alpha_switch && !params.is_half_dim() {
        integrate_transformed(params, alpha, controls)
    } else {
        integrate_scaled(params, alpha, controls)
    }
}

/// `lambda(alpha)` on the bifurcation curve.
pub fn lambda_of_alpha(params: &ProblemParams, alpha: f64, controls: &ShootControls) -> Result<f64> {
    shoot(params, alpha, controls).map(|s| s.lambda)
}

/// Max over interior nodes of `|U'' + (N-1)/r U' + (lambda + delta U'^2)/(1-U)|`, with
/// `U''` from a three-point stencil on the supplied `U'`.
pub fn residual(profile: &RadialProfile, params: &ProblemParams) -> f64 {
    let n = params.n();
    let d2 = profile.second_derivative();
    d2.iter()
        .enumerate()
        .map(|(k, &upp)| {
            let i = k + 1;
            let r = profile.r[i];
            let up = profile.du[i];
            (upp + (n - 1.0) / r * up + (profile.lambda + params.delta * up * up) / profile.gap[i]).abs()
        })
        .fold(0.0, f64::max)
}

/// Like [`residual`], but each node's residual is divided by the sum of the absolute
/// values of the three terms, so near-rupture profiles give comparable numbers.
pub fn relative_residual(profile: &RadialProfile, params: &ProblemParams) -> f64 {
    let n = params.n();
    let d2 = profile.second_derivative();
    d2.iter()
        .enumerate()
        .map(|(k, &upp)| {
            let i = k + 1;
            let r = profile.r[i];
            let up = profile.du[i];
            let t2 = (n - 1.0) / r * up;
            let t3 = (profile.lambda + params.delta * up * up) / profile.gap[i];
            (upp + t2 + t3).abs() / (upp.abs() + t2.abs() + t3.abs())
        })
        .fold(0.0, f64::max)
}
