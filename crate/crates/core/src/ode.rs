//! Adaptive Dormand–Prince 5(4) integrator with dense output and event location.
//!
//! Every system in this crate is a scalar second-order radial equation written as a
//! first-order system of fixed dimension, so the state is a plain `[f64; D]`.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// b - b*, the embedded error weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// continuous extension (Hairer, Nørsett & Wanner)
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Step-size and tolerance settings.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Controls {
    pub rtol: f64,
    pub atol: f64,
    /// First trial step.
    pub h_init: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Controls {
    fn default() -> Self {
        Controls {
            rtol: 1e-10,
            atol: 1e-14,
            h_init: 1e-4,
            h_max: f64::INFINITY,
            max_steps: 2_000_000,
        }
    }
}

impl Controls {
    pub fn with_rtol(mut self, rtol: f64) -> Self {
        self.rtol = rtol;
        self
    }

    pub fn with_atol(mut self, atol: f64) -> Self {
        self.atol = atol;
        self
    }

    pub fn with_h_max(mut self, h_max: f64) -> Self {
        self.h_max = h_max;
        self
    }
}

/// One accepted step together with its interpolation coefficients.
#[derive(Debug, Clone)]
pub struct Segment<const D: usize> {
    pub t0: f64,
    pub h: f64,
    rc: [[f64; D]; 5],
}

impl<const D: usize> Segment<D> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn eval(&self, t: f64) -> [f64; D] {
        let theta = (t - self.t0) / self.h;
        let theta1 = 1.0 - theta;
        let mut y = [0.0; D];
        for i in 0..D {
            let rc = &self.rc;
            y[i] = rc[0][i]
                + theta * (rc[1][i] + theta1 * (rc[2][i] + theta * (rc[3][i] + theta1 * rc[4][i])));
        }
        y
    }
}

/// Dense output over a whole run.
#[derive(Debug, Clone, Default)]
pub struct Trajectory<const D: usize> {
    pub segments: Vec<Segment<D>>,
}

impl<const D: usize> Trajectory<D> {
    pub fn t_start(&self) -> Option<f64> {
        self.segments.first().map(|s| s.t0)
    }

    pub fn t_end(&self) -> Option<f64> {
        self.segments.last().map(|s| s.t1())
    }

    /// Interpolated state at `t`; `None` outside the covered range.
    pub fn eval(&self, t: f64) -> Option<[f64; D]> {
        let first = self.segments.first()?;
        let last = self.segments.last()?;
        if t < first.t0 || t > last.t1() {
            return None;
        }
        let idx = self.segments.partition_point(|s| s.t1() < t);
        let seg = &self.segments[idx.min(self.segments.len() - 1)];
        Some(seg.eval(t))
    }

    /// Accepted mesh points (start of every segment plus the final time).
    pub fn mesh(&self) -> Vec<f64> {
        let mut m: Vec<f64> = self.segments.iter().map(|s| s.t0).collect();
        if let Some(t) = self.t_end() {
            m.push(t);
        }
        m
    }
}

/// How an integration run ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    /// Reached `t_end`.
    Finished,
    /// The event function crossed zero.
    Event,
    /// The halt predicate asked to stop.
    Halted,
}

#[derive(Debug, Clone)]
pub struct Run<const D: usize> {
    pub outcome: Outcome,
    pub t: f64,
    pub y: [f64; D],
    pub steps: usize,
    pub trajectory: Trajectory<D>,
}

struct Trial<const D: usize> {
    y1: [f64; D],
    k7: [f64; D],
    err: f64,
    rc: [[f64; D]; 5],
}

/// Dormand–Prince 5(4) integrator for `y' = f(t, y)`.
pub struct Dopri5<F, const D: usize> {
    f: F,
    pub controls: Controls,
}

#[inline]
fn axpy<const D: usize>(y: &[f64; D], h: f64, terms: &[(f64, &[f64; D])]) -> [f64; D] {
    let mut out = *y;
    for i in 0..D {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] += h * acc;
    }
    out
}

impl<F, const D: usize> Dopri5<F, D>
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
{
    pub fn new(f: F, controls: Controls) -> Self {
        Dopri5 { f, controls }
    }

    pub fn rhs(&self, t: f64, y: &[f64; D]) -> [f64; D] {
        (self.f)(t, y)
    }

    fn trial(&self, t: f64, y: &[f64; D], k1: &[f64; D], h: f64) -> Trial<D> {
        let f = &self.f;
        let k2 = f(t + C2 * h, &axpy(y, h, &[(A21, k1)]));
        let k3 = f(t + C3 * h, &axpy(y, h, &[(A31, k1), (A32, &k2)]));
        let k4 = f(t + C4 * h, &axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            t + C5 * h,
            &axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + h,
            &axpy(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y1 = axpy(
            y,
            h,
            &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let k7 = f(t + h, &y1);

        let c = &self.controls;
        let mut acc = 0.0;
        for i in 0..D {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = c.atol + c.rtol * y[i].abs().max(y1[i].abs());
            let q = if sc > 0.0 { e / sc } else { e };
            acc += q * q;
        }
        let err = (acc / D as f64).sqrt();

        let mut rc = [[0.0; D]; 5];
        for i in 0..D {
            let dy = y1[i] - y[i];
            let bspl = h * k1[i] - dy;
            rc[0][i] = y[i];
            rc[1][i] = dy;
            rc[2][i] = bspl;
            rc[3][i] = dy - h * k7[i] - bspl;
            rc[4][i] = h
                * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
        }
        Trial { y1, k7, err, rc }
    }

    /// Single non-adaptive step of size `h`.
    pub fn step(&self, t: f64, y: &[f64; D], h: f64) -> [f64; D] {
        let k1 = self.rhs(t, y);
        self.trial(t, y, &k1, h).y1
    }

    /// Integrate from `t0` to `t_end`.
    ///
    /// `event` stops the run at the first sign change of `g(t, y)`, located by bisection
    /// on the dense output and polished with one secant update on exact re-steps.
    /// `halt` is consulted after every accepted step.
    pub fn integrate(
        &self,
        t0: f64,
        y0: [f64; D],
        t_end: f64,
        event: Option<&dyn Fn(f64, &[f64; D]) -> f64>,
        halt: &mut dyn FnMut(f64, &[f64; D]) -> bool,
        record: bool,
    ) -> Result<Run<D>> {
        let c = self.controls;
        let mut t = t0;
        let mut y = y0;
        let mut k1 = self.rhs(t, &y);
        let mut h = c.h_init.min(c.h_max).min(t_end - t0);
        let mut traj = Trajectory { segments: Vec::new() };
        let mut steps = 0usize;
        let mut g_prev = event.map(|g| g(t, &y));

        while t < t_end {
            if steps >= c.max_steps {
                return Err(Error::MaxSteps { steps, t });
            }
            if h <= f64::EPSILON * t.abs().max(1e-300) * 4.0 {
                return Err(Error::StepUnderflow { t });
            }
            let last = t + h >= t_end;
            if last {
                h = t_end - t;
            }
            let trial = self.trial(t, &y, &k1, h);
            if !trial.err.is_finite() || trial.err > 1.0 {
                let fac = if trial.err.is_finite() {
                    (0.9 * trial.err.powf(-0.2)).max(0.1)
                } else {
                    0.1
                };
                h *= fac;
                continue;
            }
            steps += 1;
            let seg = Segment { t0: t, h, rc: trial.rc };

            if let (Some(g), Some(gp)) = (event, g_prev) {
                let g1 = g(t + h, &trial.y1);
                if gp != 0.0 && (g1 == 0.0 || g1.signum() != gp.signum()) {
                    let (te, ye) = self.locate(&seg, &y, &k1, g, gp);
                    if record {
                        let mut cut = seg.clone();
                        let k1c = k1;
                        let trial_c = self.trial(t, &y, &k1c, te - t);
                        cut.h = te - t;
                        cut.rc = trial_c.rc;
                        if cut.h > 0.0 {
                            traj.segments.push(cut);
                        }
                    }
                    return Ok(Run { outcome: Outcome::Event, t: te, y: ye, steps, trajectory: traj });
                }
                g_prev = Some(g1);
            }

            if record {
                traj.segments.push(seg);
            }
            t = if last { t_end } else { t + h };
            y = trial.y1;
            k1 = trial.k7;

            if halt(t, &y) {
                return Ok(Run { outcome: Outcome::Halted, t, y, steps, trajectory: traj });
            }

            let fac = if trial.err > 0.0 {
                (0.9 * trial.err.powf(-0.2)).clamp(0.2, 5.0)
            } else {
                5.0
            };
            h = (h * fac).min(c.h_max);
        }
        Ok(Run { outcome: Outcome::Finished, t, y, steps, trajectory: traj })
    }

    fn locate(
        &self,
        seg: &Segment<D>,
        y0: &[f64; D],
        k1: &[f64; D],
        g: &dyn Fn(f64, &[f64; D]) -> f64,
        g0: f64,
    ) -> (f64, [f64; D]) {
        let (mut a, mut b) = (seg.t0, seg.t1());
        let tol = 1e-13 * seg.t1().abs().max(1.0);
        let ga0 = g0.signum();
        while b - a > tol {
            let m = 0.5 * (a + b);
            let gm = g(m, &seg.eval(m));
            if gm == 0.0 {
                a = m;
                b = m;
                break;
            }
            if gm.signum() == ga0 {
                a = m;
            } else {
                b = m;
            }
        }
        let mut te = 0.5 * (a + b);

        // secant polish on exact re-steps from the segment start
        let exact = |tau: f64| -> [f64; D] {
            if tau <= 0.0 {
                *y0
            } else {
                self.trial(seg.t0, y0, k1, tau).y1
            }
        };
        let tau = te - seg.t0;
        if tau > 0.0 {
            let ya = exact(tau);
            let ga = g(te, &ya);
            let eps = (1e-7 * seg.h).max(1e-14 * te.abs());
            let yb = exact(tau - eps);
            let gb = g(te - eps, &yb);
            let slope = (ga - gb) / eps;
            if slope.is_finite() && slope != 0.0 {
                let tn = te - ga / slope;
                if tn > seg.t0 && tn <= seg.t1() + eps && (tn - te).abs() < 10.0 * (tol + eps) {
                    te = tn;
                }
            }
        }
        let ye = exact(te - seg.t0);
        (te, ye)
    }
}

/// Quartic Taylor start for `y'' + (n-1)/s y' = F(y, y')` with `y(0) = y0`, `y'(0) = 0`,
/// where `F` depends on `y'` only through `y'^2`.
///
/// `f0`, `f_y`, `f_pp` are `F`, `dF/dy` and `d^2F/dy'^2` at `(y0, 0)`.
pub fn taylor_start(y0: f64, f0: f64, f_y: f64, f_pp: f64, n: f64, h: f64) -> [f64; 2] {
    let c = f0 / (2.0 * n);
    let d = (f_y * c + 2.0 * c * c * f_pp) / (4.0 * (n + 2.0));
    let h2 = h * h;
    [y0 + c * h2 + d * h2 * h2, 2.0 * c * h + 4.0 * d * h2 * h]
}
