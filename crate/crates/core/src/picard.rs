//! Global solutions of `z'' + f(t, z) = 0`, `z(0) = 0`, `z(t)/t -> m`, built by Picard
//! iteration of
//!
//! ```text
//! (K z)(t) = m t + ∫_0^t s f(s, z(s)) ds + t ∫_t^∞ f(s, z(s)) ds
//! ```
//!
//! inside the cone `0 <= z <= 2 m t`. Two kernels occur:
//!
//! * `ExponentialDisk` (`N = 2`, `delta > 1`): `f = lambda (delta-1) e^(-2t) |z+1|^p` with
//!   `w = z + 1 = (1-U)^(1-delta)` and `t = -ln r`.
//! * `PowerExterior` (`N >= 3`, `1 < p < N/(N-2)`): `f = lambda/(N-2)^2 (t+1)^(-2(N-1)/(N-2)) (z+a)^p`
//!   with `v(r) = z(r^(2-N) - 1) + a`.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::model::ProblemParams;
use crate::profile::{ProfileKind, RadialProfile};
use crate::quad;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    ExponentialDisk,
    PowerExterior,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub coefficient: f64,
    pub shift: f64,
    pub p: f64,
    /// Only used by `PowerExterior`, whose weight depends on `N`.
    pub dim: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeInterval {
    pub m_lo: f64,
    pub m_hi: f64,
    /// Minimiser of the feasibility function.
    pub m_star: f64,
    pub min_h: f64,
}

/// `a = ∫_0^∞ t^p e^(-2t) dt = Gamma(p+1) / 2^(p+1)`.
pub fn moment_a(p: f64) -> f64 {
    gamma(p + 1.0) / 2f64.powf(p + 1.0)
}

impl KernelSpec {
    pub fn exponential_disk(delta: f64, lambda: f64) -> Result<Self> {
        let k = KernelSpec {
            kind: KernelKind::ExponentialDisk,
            coefficient: lambda * (delta - 1.0),
            shift: 1.0,
            p: (delta + 1.0) / (delta - 1.0),
            dim: 2,
        };
        k.validate()?;
        Ok(k)
    }

    /// Kernel for `v'' + (N-1)/r v' + lambda v^p = 0`, `v(1) = a`.
    pub fn power_exterior(dim: u32, p: f64, lambda: f64, a: f64) -> Result<Self> {
        let nm2 = dim as f64 - 2.0;
        let k = KernelSpec {
            kind: KernelKind::PowerExterior,
            coefficient: lambda / (nm2 * nm2),
            shift: a,
            p,
            dim,
        };
        k.validate()?;
        Ok(k)
    }

    /// The kernel whose solutions map back to rupture solutions of the MEMS problem.
    pub fn for_problem(params: &ProblemParams, lambda: f64) -> Result<Self> {
        params.validate()?;
        let d = params.delta;
        let n = params.n();
        if params.dim == 2 && d > 1.0 {
            Self::exponential_disk(d, lambda)
        } else if params.dim >= 3 && d > n - 1.0 {
            Self::power_exterior(params.dim, (d + 1.0) / (d - 1.0), lambda * (d - 1.0), 1.0)
        } else {
            Err(Error::PreconditionViolated(format!(
                "no Picard kernel for N = {}, delta = {d} (needs N = 2, delta > 1 or N >= 3, delta > N-1)",
                params.dim
            )))
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.coefficient >= 0.0) || !self.coefficient.is_finite() {
            return Err(Error::InvalidParams(format!("kernel coefficient {} must be >= 0", self.coefficient)));
        }
        if !(self.shift > 0.0) || !(self.p > 1.0) {
            return Err(Error::InvalidParams(format!("need shift > 0 and p > 1, got {} and {}", self.shift, self.p)));
        }
        if self.kind == KernelKind::PowerExterior {
            let n = self.dim as f64;
            if self.dim < 3 || self.p >= n / (n - 2.0) {
                return Err(Error::InvalidParams(format!(
                    "power kernel needs N >= 3 and p < N/(N-2), got N = {}, p = {}",
                    self.dim, self.p
                )));
            }
        }
        Ok(())
    }

    /// `2(N-1)/(N-2)`, the decay power of the exterior weight.
    fn decay(&self) -> f64 {
        let n = self.dim as f64;
        2.0 * (n - 1.0) / (n - 2.0)
    }

    pub fn weight(&self, t: f64) -> f64 {
        match self.kind {
            KernelKind::ExponentialDisk => (-2.0 * t).exp(),
            KernelKind::PowerExterior => (t + 1.0).powf(-self.decay()),
        }
    }

    pub fn f(&self, t: f64, z: f64) -> f64 {
        self.coefficient * self.weight(t) * (z + self.shift).abs().powf(self.p)
    }

    /// Majorant `g(t, |z|) >= |f(t, z)|`, nondecreasing in `z >= 0`.
    pub fn g(&self, t: f64, z: f64) -> f64 {
        let z = z.abs();
        match self.kind {
            KernelKind::ExponentialDisk => {
                2f64.powf(self.p - 1.0)
                    * self.coefficient
                    * self.weight(t)
                    * (self.shift.powf(self.p) + z.powf(self.p))
            }
            KernelKind::PowerExterior => self.coefficient * self.weight(t) * (z + self.shift).powf(self.p),
        }
    }

    /// Grid variable `u` with `t = phi(u)`: `t = u` for the disk, `t = e^u - 1` for the exterior.
    fn phi(&self, u: f64) -> (f64, f64, f64) {
        match self.kind {
            KernelKind::ExponentialDisk => (u, 1.0, 0.0),
            KernelKind::PowerExterior => {
                let e = u.exp();
                (e - 1.0, e, e)
            }
        }
    }

    fn u_of_t(&self, t: f64) -> f64 {
        match self.kind {
            KernelKind::ExponentialDisk => t,
            KernelKind::PowerExterior => t.ln_1p(),
        }
    }

    /// `∫_0^∞ g(t, 2 m t) dt`.
    pub fn cone_integral(&self, m: f64) -> f64 {
        match self.kind {
            KernelKind::ExponentialDisk => {
                let p = self.p;
                let c = self.coefficient;
                2f64.powf(p - 2.0) * c * self.shift.powf(p) + 2f64.powf(2.0 * p - 1.0) * c * m.powf(p) * moment_a(p)
            }
            KernelKind::PowerExterior => self.cone_integral_between(m, 0.0, f64::INFINITY),
        }
    }

    /// `∫_{t0}^{t1} g(t, 2 m t) dt`; an infinite upper end uses the closed-form exterior tail.
    fn cone_integral_between(&self, m: f64, t0: f64, t1: f64) -> f64 {
        let (u0, u1, tail) = match self.kind {
            KernelKind::ExponentialDisk => {
                let t1 = if t1.is_finite() { t1 } else { t0.max(0.0) + 60.0 + 40.0 * self.p };
                (t0, t1, 0.0)
            }
            KernelKind::PowerExterior => {
                let u0 = self.u_of_t(t0);
                if t1.is_finite() {
                    (u0, self.u_of_t(t1), 0.0)
                } else {
                    let rate = self.decay() - 1.0 - self.p;
                    let u1 = u0.max((40.0 / rate).min(600.0 / self.p));
                    (u0, u1, self.exterior_tail(m, u1))
                }
            }
        };
        if u1 <= u0 {
            return tail;
        }
        let panels = (((u1 - u0) / 2e-3).ceil() as usize).clamp(200, 400_000);
        quad::simpson(
            |u| {
                let (t, dt, _) = self.phi(u);
                self.g(t, 2.0 * m * t) * dt
            },
            u0,
            u1,
            panels,
        ) + tail
    }

    /// Closed-form bound on `∫_{u1}^∞ g(t, 2 m t) dt/du du` for the exterior kernel.
    fn exterior_tail(&self, m: f64, u1: f64) -> f64 {
        let rate = self.decay() - 1.0 - self.p;
        self.coefficient * (2.0 * m + self.shift).powf(self.p) * (-rate * u1).exp() / rate
    }

    /// Feasibility function `h(m) = (1/m) ∫_0^∞ g(t, 2 m t) dt`; the scheme applies where `h < 1`.
    pub fn feasibility(&self, m: f64) -> f64 {
        self.cone_integral(m) / m
    }
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol * (a.abs() + b.abs()) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Crossing of `h = 1` between `inside` (h < 1) and `outside` (h >= 1), bisected in `log m`.
fn edge(h: &impl Fn(f64) -> f64, mut inside: f64, mut outside: f64) -> f64 {
    for _ in 0..200 {
        let mid = (inside * outside).sqrt();
        if mid == inside || mid == outside {
            break;
        }
        if h(mid) < 1.0 {
            inside = mid;
        } else {
            outside = mid;
        }
        if (outside / inside - 1.0).abs() < 1e-13 {
            break;
        }
    }
    inside
}

/// The interval of slopes `m` with `h(m) < 1`.
pub fn feasible_m(kernel: &KernelSpec) -> Result<SlopeInterval> {
    kernel.validate()?;
    let h = |m: f64| kernel.feasibility(m);
    let grid: Vec<f64> = (0..=160).map(|i| 10f64.powf(-8.0 + 0.1 * i as f64)).collect();
    let vals: Vec<f64> = grid.iter().map(|&m| h(m)).collect();
    let i = (0..grid.len())
        .min_by(|&a, &b| vals[a].total_cmp(&vals[b]))
        .unwrap_or(0);
    let lo = grid[i.saturating_sub(1)];
    let hi = grid[(i + 1).min(grid.len() - 1)];
    let m_star = golden_min(|x| h(x.exp()), lo.ln(), hi.ln(), 1e-12).exp();
    let min_h = h(m_star);
    if !(min_h < 1.0) {
        return Err(Error::Infeasible { min_h });
    }
    let mut out_lo = m_star;
    while h(out_lo) < 1.0 && out_lo > 1e-300 {
        out_lo /= 10.0;
    }
    let mut out_hi = m_star;
    while h(out_hi) < 1.0 && out_hi < 1e300 {
        out_hi *= 10.0;
    }
    Ok(SlopeInterval { m_lo: edge(&h, m_star, out_lo), m_hi: edge(&h, m_star, out_hi), m_star, min_h })
}

/// Largest `lambda` for which the sufficient condition `min h < 1` holds (`h` is linear in `lambda`).
pub fn feasibility_threshold(params: &ProblemParams) -> Result<f64> {
    let k = KernelSpec::for_problem(params, 1.0)?;
    match feasible_m(&k) {
        Ok(s) => Ok(1.0 / s.min_h),
        Err(Error::Infeasible { min_h }) => Ok(1.0 / min_h),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicardControls {
    /// Step in the grid variable (`t` for the disk kernel, `ln(1+t)` for the exterior kernel).
    pub step: f64,
    /// Stop when `sup |z_{k+1} - z_k| / (1 + t) <= tol`.
    pub tol: f64,
    pub max_iter: usize,
    /// Largest grid variable; bounds the exterior grid when the kernel decays slowly.
    pub u_cap: f64,
}

impl Default for PicardControls {
    fn default() -> Self {
        PicardControls { step: 1e-3, tol: 1e-13, max_iter: 500, u_cap: 200.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardSolution {
    pub kernel: KernelSpec,
    pub m: f64,
    pub t_end: f64,
    /// Nodes with `t <= t_end`.
    pub t: Vec<f64>,
    pub z: Vec<f64>,
    /// `z'(t) = m + ∫_t^∞ f`.
    pub zt: Vec<f64>,
    pub iterations: usize,
    pub distance: f64,
    pub damping: f64,
    /// Every iterate stayed in `0 <= z <= 2 m t`.
    pub cone_ok: bool,
    /// `sup |z'' + f(t, z)|` on the interior output nodes, by central differences.
    pub residual: f64,
    /// `|z(T)/T - m|` at `T = t_end`.
    pub slope_error: f64,
    /// `(1/T) ∫_0^T s g(s, 2ms) ds + ∫_T^∞ g(s, 2ms) ds`.
    pub slope_bound: f64,
    /// Bound on the part of `∫_t^∞ f` cut off by the finite grid.
    pub truncation: f64,
}

pub fn solve(kernel: &KernelSpec, m: f64, t_end: f64, tol: f64) -> Result<PicardSolution> {
    solve_with(kernel, m, t_end, &PicardControls { tol, ..PicardControls::default() })
}

pub fn solve_with(kernel: &KernelSpec, m: f64, t_end: f64, controls: &PicardControls) -> Result<PicardSolution> {
    kernel.validate()?;
    if !(m > 0.0) || !(t_end > 0.0) {
        return Err(Error::InvalidParams(format!("need m > 0 and T > 0, got m = {m}, T = {t_end}")));
    }
    let hu = controls.step;
    let u_out = kernel.u_of_t(t_end);
    // grid end: far enough that the cone bound on the cut-off tail is below tol/10
    let (u_end, truncation) = match kernel.kind {
        KernelKind::ExponentialDisk => {
            let mut t = t_end;
            let mut tail = kernel.cone_integral_between(m, t, f64::INFINITY);
            while tail > 0.1 * controls.tol && t < t_end + controls.u_cap {
                t += 1.0;
                tail = kernel.cone_integral_between(m, t, f64::INFINITY);
            }
            (t, tail)
        }
        KernelKind::PowerExterior => {
            let rate = kernel.decay() - 1.0 - kernel.p;
            let c = kernel.coefficient * (2.0 * m + kernel.shift).powf(kernel.p) / rate;
            let need = (c / (0.1 * controls.tol)).ln() / rate;
            let u = need.clamp(u_out, u_out.max(controls.u_cap.min(600.0 / kernel.p)));
            (u, kernel.exterior_tail(m, u))
        }
    };
    let n = (u_end / hu).ceil() as usize + 1;
    let mut t = Vec::with_capacity(n);
    let mut dt = Vec::with_capacity(n);
    let mut d2t = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b, c) = kernel.phi(i as f64 * hu);
        t.push(a);
        dt.push(b);
        d2t.push(c);
    }

    let apply = |z: &[f64]| -> (Vec<f64>, Vec<f64>) {
        let fw: Vec<f64> = (0..n).map(|i| kernel.f(t[i], z[i]) * dt[i]).collect();
        let sfw: Vec<f64> = (0..n).map(|i| t[i] * fw[i]).collect();
        let a = quad::cumulative(&sfw, hu);
        let c = quad::cumulative(&fw, hu);
        let total = c[n - 1];
        let b: Vec<f64> = c.iter().map(|ci| total - ci).collect();
        let kz = (0..n).map(|i| m * t[i] + a[i] + t[i] * b[i]).collect();
        (kz, b)
    };
    let in_cone = |z: &[f64]| {
        z.iter()
            .zip(&t)
            .all(|(&zi, &ti)| zi >= -1e-15 && zi <= 2.0 * m * ti * (1.0 + 1e-12) + 1e-15)
    };

    let mut z: Vec<f64> = t.iter().map(|&ti| m * ti).collect();
    let mut cone_ok = true;
    let mut theta = 1.0;
    let mut prev = f64::INFINITY;
    let mut distance = f64::INFINITY;
    let mut iterations = 0;
    let mut tail_b = vec![0.0; n];
    while iterations < controls.max_iter {
        iterations += 1;
        let (kz, b) = apply(&z);
        cone_ok &= in_cone(&kz);
        distance = (0..n).map(|i| (kz[i] - z[i]).abs() / (1.0 + t[i])).fold(0.0, f64::max);
        if distance > prev && theta == 1.0 {
            theta = 0.5;
        }
        prev = distance;
        for i in 0..n {
            z[i] += theta * (kz[i] - z[i]);
        }
        tail_b = b;
        if !distance.is_finite() {
            break;
        }
        if distance <= controls.tol {
            break;
        }
    }
    if !(distance <= controls.tol) {
        return Err(Error::NonConvergence { iterations, distance });
    }

    let k = ((u_out / hu).round() as usize).min(n - 1);
    // residual of w = z - m t, which has the same second derivative and less rounding
    let w: Vec<f64> = (0..=k.min(n - 2) + 1).map(|i| z[i] - m * t[i]).collect();
    let mut residual = 0.0f64;
    for i in 1..k.min(n - 2) + 1 {
        let wu = (w[i + 1] - w[i - 1]) / (2.0 * hu);
        let wuu = (w[i + 1] - 2.0 * w[i] + w[i - 1]) / (hu * hu);
        let wtt = (wuu - d2t[i] / dt[i] * wu) / (dt[i] * dt[i]);
        residual = residual.max((wtt + kernel.f(t[i], z[i])).abs());
    }
    let t_big = t[k];
    let slope_error = (z[k] / t_big - m).abs();
    let inner = {
        let u0 = 0.0;
        let panels = ((kernel.u_of_t(t_big) / 2e-3).ceil() as usize).clamp(200, 400_000);
        quad::simpson(
            |u| {
                let (s, ds, _) = kernel.phi(u);
                s * kernel.g(s, 2.0 * m * s) * ds
            },
            u0,
            kernel.u_of_t(t_big),
            panels,
        )
    };
    let slope_bound = inner / t_big + kernel.cone_integral_between(m, t_big, f64::INFINITY);
    Ok(PicardSolution {
        kernel: *kernel,
        m,
        t_end: t_big,
        t: t[..=k].to_vec(),
        z: z[..=k].to_vec(),
        zt: tail_b[..=k].iter().map(|b| m + b).collect(),
        iterations,
        distance,
        damping: theta,
        cone_ok,
        residual,
        slope_error,
        slope_bound,
        truncation,
    })
}

/// Maps a disk or exterior solution back to `U(r)`; needs a kernel from [`KernelSpec::for_problem`].
pub fn to_rupture(sol: &PicardSolution, params: &ProblemParams, lambda: f64) -> Result<RadialProfile> {
    let expected = KernelSpec::for_problem(params, lambda)?;
    let k = &sol.kernel;
    if k.kind != expected.kind || (k.coefficient - expected.coefficient).abs() > 1e-14 * expected.coefficient.max(1.0) {
        return Err(Error::PreconditionViolated("kernel does not belong to these parameters".into()));
    }
    let q = 1.0 / (params.delta - 1.0);
    let nm2 = params.n() - 2.0;
    let stride = (sol.t.len() / 4000).max(1);
    let mut idx: Vec<usize> = (0..sol.t.len()).step_by(stride).collect();
    if idx.last() != Some(&(sol.t.len() - 1)) {
        idx.push(sol.t.len() - 1);
    }
    let (mut r, mut u, mut du, mut gap) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for &i in idx.iter().rev() {
        let (t, z, zt) = (sol.t[i], sol.z[i], sol.zt[i]);
        let v = z + k.shift;
        let g = v.powf(-q);
        let (rr, vr) = match k.kind {
            KernelKind::ExponentialDisk => {
                let rr = (-t).exp();
                (rr, -zt / rr)
            }
            KernelKind::PowerExterior => {
                let rr = (1.0 + t).powf(-1.0 / nm2);
                (rr, -zt * nm2 * rr.powf(-nm2 - 1.0))
            }
        };
        r.push(if i == 0 { 1.0 } else { rr });
        gap.push(if i == 0 { 1.0 } else { g });
        u.push(if i == 0 { 0.0 } else { 1.0 - g });
        du.push(q * v.powf(-q - 1.0) * vr);
    }
    Ok(RadialProfile { r, u, du, gap, kind: ProfileKind::Rupture, lambda, alpha: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::{Controls, Dopri5};

    fn disk() -> KernelSpec {
        KernelSpec::exponential_disk(2.0, 0.01).unwrap()
    }

    #[test]
    fn moment_matches_quadrature() {
        for p in [1.5, 2.0, 3.0, 7.0 / 3.0, 5.0] {
            let q = quad::simpson(|t| t.powf(p) * (-2.0 * t).exp(), 0.0, 60.0, 400_000);
            assert!((moment_a(p) - q).abs() < 1e-9 * q, "p = {p}");
        }
        assert!((moment_a(3.0) - 0.375).abs() < 1e-14);
    }

    #[test]
    fn feasibility_example() {
        let k = disk();
        assert!((k.feasibility(0.5) - (0.04 + 0.12 * 0.25)).abs() < 1e-14);
        let s = feasible_m(&k).unwrap();
        // h = 0.02/m + 0.12 m^2 has its minimum at m^3 = 1/12
        let m_star = (1.0f64 / 12.0).cbrt();
        assert!((s.m_star - m_star).abs() < 1e-6);
        assert!((s.min_h - (0.02 / m_star + 0.12 * m_star * m_star)).abs() < 1e-12);
        assert!((s.min_h - 0.0687).abs() < 1e-4);
        assert!(s.m_lo < s.m_star && s.m_star < s.m_hi);
        assert!((k.feasibility(s.m_lo) - 1.0).abs() < 1e-9);
        assert!((k.feasibility(s.m_hi) - 1.0).abs() < 1e-9);
        // grid check of the interval
        for i in 1..100 {
            let m = s.m_lo + (s.m_hi - s.m_lo) * i as f64 / 100.0;
            assert!(k.feasibility(m) < 1.0);
        }
    }

    #[test]
    fn infeasible_for_large_lambda() {
        let k = KernelSpec::exponential_disk(2.0, 10.0).unwrap();
        assert!(matches!(feasible_m(&k), Err(Error::Infeasible { .. })));
        let thr = feasibility_threshold(&ProblemParams::new(2, 2.0).unwrap()).unwrap();
        assert!((thr - 0.01 / 0.068_681).abs() < 1e-3 * thr);
    }

    #[test]
    fn interval_widens_as_coefficient_vanishes() {
        let mut ratio = 0.0;
        for lam in [1e-2, 1e-4, 1e-6] {
            let s = feasible_m(&KernelSpec::exponential_disk(2.0, lam).unwrap()).unwrap();
            let r = s.m_hi / s.m_lo;
            assert!(r > ratio);
            ratio = r;
        }
        assert!(ratio > 1e5);
    }

    #[test]
    fn zero_coefficient_gives_linear_solution() {
        let k = KernelSpec { coefficient: 0.0, ..disk() };
        let sol = solve(&k, 0.3, 10.0, 1e-13).unwrap();
        for (t, z) in sol.t.iter().zip(&sol.z) {
            assert_eq!(*z, 0.3 * t);
        }
    }

    #[test]
    fn disk_solution_meets_invariants() {
        let k = disk();
        let m = 0.4368;
        let sol = solve(&k, m, 40.0, 1e-13).unwrap();
        assert_eq!(sol.z[0], 0.0);
        assert!(sol.cone_ok);
        assert!(sol.residual <= 1e-8, "{}", sol.residual);
        assert!(sol.slope_error <= sol.slope_bound);
        assert!(sol.slope_bound < m);
    }

    #[test]
    fn disk_solution_matches_direct_integration() {
        let k = disk();
        let sol = solve(&k, 0.3, 20.0, 1e-13).unwrap();
        let ode = Dopri5::new(
            move |t: f64, y: &[f64; 2]| [y[1], -k.f(t, y[0])],
            Controls::default().with_rtol(1e-12).with_atol(1e-14),
        );
        let run = ode.integrate(0.0, [0.0, sol.zt[0]], 20.0, None, &mut |_, _| false, true).unwrap();
        for i in (0..sol.t.len()).step_by(997) {
            let y = run.trajectory.eval(sol.t[i]).unwrap();
            assert!((y[0] - sol.z[i]).abs() < 1e-8 * (1.0 + sol.t[i]), "t = {}", sol.t[i]);
        }
    }

    #[test]
    fn disk_profiles() {
        let p = ProblemParams::new(2, 2.0).unwrap();
        let k = disk();
        let s = feasible_m(&k).unwrap();
        let a = to_rupture(&solve(&k, s.m_star, 40.0, 1e-13).unwrap(), &p, 0.01).unwrap();
        let b = to_rupture(&solve(&k, 0.5 * s.m_star, 40.0, 1e-13).unwrap(), &p, 0.01).unwrap();
        assert_eq!(a.boundary_value(), 0.0);
        assert_eq!(a.kind, ProfileKind::Rupture);
        assert!(a.u[0] > 0.9);
        assert!(a.sup_distance(&b) > 1e-6);
        let res = crate::shoot::relative_residual(&a, &ProblemParams::with_lambda(2, 2.0, 0.01).unwrap());
        assert!(res < 1e-4, "{res}");
    }

    #[test]
    fn exterior_kernel() {
        // N = 3, delta = 3: p = 2 < 3
        let p = ProblemParams::new(3, 3.0).unwrap();
        let k = KernelSpec::for_problem(&p, 1e-3).unwrap();
        assert_eq!(k.kind, KernelKind::PowerExterior);
        assert!((k.coefficient - 2e-3).abs() < 1e-18);
        let s = feasible_m(&k).unwrap();
        let sol = solve(&k, s.m_star, 1e4, 1e-12).unwrap();
        assert!(sol.cone_ok);
        assert!(sol.residual <= 1e-8, "{}", sol.residual);
        assert!(sol.slope_error <= sol.slope_bound);
        let prof = to_rupture(&sol, &p, 1e-3).unwrap();
        assert_eq!(prof.boundary_value(), 0.0);
        assert!(prof.gap.windows(2).all(|w| w[0] <= w[1]));
        assert!(KernelSpec::for_problem(&ProblemParams::new(3, 1.5).unwrap(), 1e-3).is_err());
    }
}
