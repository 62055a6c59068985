//! Rupture solutions for `N >= 3`, `N/2 <= delta < N-1` from the autonomous system
//!
//! ```text
//! x' = y,   y' = (N - 2 delta) y + (delta-1)(N-1-delta)(x - x^p),   p = (delta+1)/(delta-1)
//! ```
//!
//! in `t = -log r`, where `1 - U(r) = sqrt(lambda/(N-1-delta)) r x(t)^(-1/(delta-1))`.
//! The energy `E = y^2/2 - (delta-1)(N-1-delta)(x^2/2 - x^(p+1)/(p+1))` satisfies
//! `E' = -(2 delta - N) y^2`, so it is conserved for `delta = N/2` and decreasing above.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{thresholds, ProblemParams};
use crate::ode::{Controls, Dopri5, Trajectory};
use crate::profile::{ProfileKind, RadialProfile};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitTrace {
    pub states: Vec<PhaseState>,
    pub energies: Vec<f64>,
    /// Membership of each state in `Omega = {x > 0, E < 0}`.
    pub in_omega: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseControls {
    pub t_end: f64,
    pub rtol: f64,
    /// Number of uniform steps in `t` for the reported states.
    pub samples: usize,
}

impl Default for PhaseControls {
    fn default() -> Self {
        PhaseControls { t_end: 40.0, rtol: 1e-11, samples: 4000 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhaseRupture {
    pub lambda: f64,
    pub y0: f64,
    pub trace: OrbitTrace,
    pub profile: RadialProfile,
    #[serde(skip)]
    trajectory: Option<Trajectory<2>>,
}

fn exponent(delta: f64) -> f64 {
    (delta + 1.0) / (delta - 1.0)
}

fn coupling(n: f64, delta: f64) -> f64 {
    (delta - 1.0) * (n - 1.0 - delta)
}

pub fn vector_field(state: (f64, f64), n: f64, delta: f64) -> (f64, f64) {
    let (x, y) = state;
    let p = exponent(delta);
    (y, (n - 2.0 * delta) * y + coupling(n, delta) * (x - x.powf(p)))
}

pub fn energy(state: (f64, f64), n: f64, delta: f64) -> f64 {
    let (x, y) = state;
    let p = exponent(delta);
    0.5 * y * y - coupling(n, delta) * (0.5 * x * x - x.powf(p + 1.0) / (p + 1.0))
}

pub fn in_omega(state: (f64, f64), n: f64, delta: f64) -> bool {
    state.0 > 0.0 && energy(state, n, delta) < 0.0
}

/// `x_delta = (delta/(delta-1))^((delta-1)/2)`, the positive zero of the potential.
pub fn x_delta(delta: f64) -> f64 {
    (delta / (delta - 1.0)).powf(0.5 * (delta - 1.0))
}

/// `y_{delta,x}`: the largest `|y|` with `(x, y)` in `Omega`.
pub fn y_bound(x: f64, n: f64, delta: f64) -> f64 {
    let p = exponent(delta);
    (2.0 * coupling(n, delta) * (0.5 * x * x - x.powf(p + 1.0) / (p + 1.0))).max(0.0).sqrt()
}

/// `x(0) = (lambda/(N-1-delta))^((delta-1)/2)`, which makes `U(1) = 0`.
pub fn initial_x(n: f64, delta: f64, lambda: f64) -> f64 {
    (lambda / (n - 1.0 - delta)).powf(0.5 * (delta - 1.0))
}

fn check(params: &ProblemParams, lambda: f64) -> Result<()> {
    params.validate()?;
    let n = params.n();
    let d = params.delta;
    if params.dim < 3 || !(params.is_half_dim() || d > n / 2.0) || d >= n - 1.0 {
        return Err(Error::PreconditionViolated(format!(
            "phase-plane construction needs N >= 3 and N/2 <= delta < N-1, got N = {}, delta = {d}",
            params.dim
        )));
    }
    let l3 = thresholds(params, 0.0).lambda_3star.unwrap_or(f64::INFINITY);
    if !(lambda > 0.0) || lambda >= l3 {
        return Err(Error::PreconditionViolated(format!("lambda = {lambda} must lie in (0, {l3})")));
    }
    Ok(())
}

/// Integrates the system from `(x(0), y0)` and maps the orbit back to a rupture profile.
pub fn construct_rupture(params: &ProblemParams, lambda: f64, y0: f64, controls: &PhaseControls) -> Result<PhaseRupture> {
    check(params, lambda)?;
    let n = params.n();
    let d = params.delta;
    let x0 = initial_x(n, d, lambda);
    let e0 = energy((x0, y0), n, d);
    if !(e0 < 0.0) {
        return Err(Error::InitialDataOutsideOmega { energy: e0 });
    }
    let ode = Dopri5::new(
        move |_t: f64, s: &[f64; 2]| {
            let (a, b) = vector_field((s[0], s[1]), n, d);
            [a, b]
        },
        Controls::default().with_rtol(controls.rtol).with_atol(1e-15).with_h_max(0.1),
    );
    let run = ode.integrate(0.0, [x0, y0], controls.t_end, None, &mut |_, s| !(s[0] > 0.0), true)?;
    if run.t < controls.t_end {
        return Err(Error::PreconditionViolated(format!("orbit left x > 0 at t = {}", run.t)));
    }
    let traj = run.trajectory;
    let m = controls.samples.max(2);
    let mut states = Vec::with_capacity(m + 1);
    for i in 0..=m {
        let t = controls.t_end * i as f64 / m as f64;
        let s = if i == 0 { [x0, y0] } else { traj.eval(t).unwrap_or(run.y) };
        states.push(PhaseState { t, x: s[0], y: s[1] });
    }
    let energies: Vec<f64> = states.iter().map(|s| energy((s.x, s.y), n, d)).collect();
    let in_omega = states.iter().map(|s| in_omega((s.x, s.y), n, d)).collect();

    // back-map, innermost radius first
    let c = (lambda / (n - 1.0 - d)).sqrt();
    let q = 1.0 / (d - 1.0);
    let mut r = Vec::with_capacity(states.len());
    let mut u = Vec::with_capacity(states.len());
    let mut du = Vec::with_capacity(states.len());
    let mut gap = Vec::with_capacity(states.len());
    for s in states.iter().rev() {
        let rr = if s.t == 0.0 { 1.0 } else { (-s.t).exp() };
        let g = if s.t == 0.0 { 1.0 } else { c * rr * s.x.powf(-q) };
        r.push(rr);
        gap.push(g);
        u.push(if s.t == 0.0 { 0.0 } else { 1.0 - g });
        du.push(-c * s.x.powf(-q) * (1.0 + q * s.y / s.x));
    }
    Ok(PhaseRupture {
        lambda,
        y0,
        trace: OrbitTrace { states, energies, in_omega },
        profile: RadialProfile { r, u, du, gap, kind: ProfileKind::Rupture, lambda, alpha: None },
        trajectory: Some(traj),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitDiagnostics {
    /// Largest increase of `E` between any two sampled states.
    pub max_energy_increase: f64,
    /// `max |E(t) - E(0)| / t` over the samples with `t >= 1`.
    pub energy_drift_rate: f64,
    /// For `delta > N/2`: `|x(T) - 1| <= 1e-4`.
    pub converged_to_1: Option<bool>,
    /// For `delta = N/2`: time between successive downward crossings of `y = 0`.
    pub period_estimate: Option<f64>,
    /// For `delta = N/2`: largest change of `x` between successive downward crossings.
    pub closure: Option<f64>,
    /// For `delta = N/2`: minimum of `x` over one period.
    pub c0: Option<f64>,
    pub max_x: f64,
    /// Whether `in_omega`, once true, stays true.
    pub omega_forward_invariant: bool,
}

/// Crossings of `y = 0` from above, located on the dense output by bisection.
fn downward_crossings(run: &PhaseRupture) -> Vec<PhaseState> {
    let states = &run.trace.states;
    let mut out = Vec::new();
    for w in states.windows(2) {
        if w[0].y > 0.0 && w[1].y <= 0.0 {
            let (mut a, mut b) = (w[0].t, w[1].t);
            let eval = |t: f64| run.trajectory.as_ref().and_then(|tr| tr.eval(t));
            for _ in 0..80 {
                let m = 0.5 * (a + b);
                match eval(m) {
                    Some(s) if s[1] > 0.0 => a = m,
                    Some(_) => b = m,
                    None => break,
                }
                if b - a < 1e-14 {
                    break;
                }
            }
            let t = 0.5 * (a + b);
            let s = eval(t).unwrap_or([w[1].x, w[1].y]);
            out.push(PhaseState { t, x: s[0], y: s[1] });
        }
    }
    out
}

pub fn orbit_diagnostics(run: &PhaseRupture, params: &ProblemParams) -> OrbitDiagnostics {
    let tr = &run.trace;
    let mut lowest = f64::INFINITY;
    let mut max_inc = 0.0f64;
    for &e in &tr.energies {
        lowest = lowest.min(e);
        max_inc = max_inc.max(e - lowest);
    }
    let e0 = tr.energies[0];
    let drift = tr
        .states
        .iter()
        .zip(&tr.energies)
        .filter(|(s, _)| s.t >= 1.0)
        .map(|(s, e)| (e - e0).abs() / s.t)
        .fold(0.0, f64::max);
    let max_x = tr.states.iter().map(|s| s.x).fold(f64::NEG_INFINITY, f64::max);
    let first_in = tr.in_omega.iter().position(|&b| b);
    let invariant = first_in.map_or(true, |i| tr.in_omega[i..].iter().all(|&b| b));
    let mut out = OrbitDiagnostics {
        max_energy_increase: max_inc,
        energy_drift_rate: drift,
        converged_to_1: None,
        period_estimate: None,
        closure: None,
        c0: None,
        max_x,
        omega_forward_invariant: invariant,
    };
    if params.is_half_dim() {
        let cross = downward_crossings(run);
        if cross.len() >= 2 {
            let periods: Vec<f64> = cross.windows(2).map(|w| w[1].t - w[0].t).collect();
            out.period_estimate = Some(periods.iter().sum::<f64>() / periods.len() as f64);
            out.closure = Some(cross.windows(2).map(|w| (w[1].x - w[0].x).abs()).fold(0.0, f64::max));
            let (t0, t1) = (cross[0].t, cross[1].t);
            out.c0 = Some(
                tr.states
                    .iter()
                    .filter(|s| s.t >= t0 && s.t <= t1)
                    .map(|s| s.x)
                    .fold(f64::INFINITY, f64::min),
            );
        }
    } else if let Some(last) = tr.states.last() {
        out.converged_to_1 = Some((last.x - 1.0).abs() <= 1e-4);
    }
    out
}

/// Least-squares slope of `1 - U = s r` over nodes with `r` in `[lo, hi]`.
pub fn fitted_slope(profile: &RadialProfile, lo: f64, hi: f64) -> Option<f64> {
    let (mut num, mut den) = (0.0, 0.0);
    for (&r, &g) in profile.r.iter().zip(&profile.gap) {
        if r >= lo && r <= hi {
            num += g * r;
            den += r * r;
        }
    }
    (den > 0.0).then(|| num / den)
}

/// Empirical constant `c` in `1 - sqrt(2 lambda/N) c r <= U`: the maximum of
/// `(1 - U)/(sqrt(2 lambda/N) r)` over the nodes.
pub fn rupture_constant(profile: &RadialProfile, n: f64) -> f64 {
    let k = (2.0 * profile.lambda / n).sqrt();
    profile.r.iter().zip(&profile.gap).map(|(&r, &g)| g / (k * r)).fold(f64::NEG_INFINITY, f64::max)
}
