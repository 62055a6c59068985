//! Closed-form solution families, used as ground-truth oracles.
//!
//! * rupture line: `lambda = N-1-delta`, `U = 1 - r`
//! * parabola (`delta = N/2`): `lambda = 2N alpha (1-alpha)`, `U = alpha (1 - r^2)`
//! * Liouville family (`N = 2`, `delta = 1`): `lambda = 2ab^4/(a+2b^2)^2`,
//!   `U = 1 - (a r^b + 2b^2)/(a + 2b^2) r^((2-b)/2)`
//!
//! Derivatives are coded analytically; nothing here integrates an ODE.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ProblemParams;
use crate::profile::{ProfileKind, RadialProfile};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ClosedFormFamily {
    RuptureLine,
    Parabola { alpha: f64 },
    Liouville { a: f64, b: f64 },
}

impl ClosedFormFamily {
    /// Checks the family's parameter constraints against `params`.
    pub fn check(&self, params: &ProblemParams) -> Result<()> {
        params.validate()?;
        let n = params.n();
        match *self {
            ClosedFormFamily::RuptureLine => {
                if params.delta >= n - 1.0 {
                    return Err(Error::PreconditionViolated(format!(
                        "rupture line needs delta < N-1, got delta = {}",
                        params.delta
                    )));
                }
            }
            ClosedFormFamily::Parabola { alpha } => {
                if !(alpha > 0.0 && alpha < 1.0) {
                    return Err(Error::InvalidParams(format!("alpha = {alpha} must lie in (0, 1)")));
                }
                if !params.is_half_dim() {
                    return Err(Error::PreconditionViolated(format!(
                        "parabola family needs delta = N/2, got delta = {}",
                        params.delta
                    )));
                }
            }
            ClosedFormFamily::Liouville { a, b } => {
                check_liouville(a, b)?;
                if params.dim != 2 || !params.is_unit() {
                    return Err(Error::PreconditionViolated(
                        "Liouville family needs N = 2 and delta = 1".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn lambda(&self, params: &ProblemParams) -> f64 {
        match *self {
            ClosedFormFamily::RuptureLine => params.lambda_star(),
            ClosedFormFamily::Parabola { alpha } => 2.0 * params.n() * alpha * (1.0 - alpha),
            ClosedFormFamily::Liouville { a, b } => liouville_lambda(a, b),
        }
    }

    /// `(U, U', 1 - U)` at `r`.
    pub fn eval(&self, r: f64) -> (f64, f64, f64) {
        match *self {
            ClosedFormFamily::RuptureLine => (1.0 - r, -1.0, r),
            ClosedFormFamily::Parabola { alpha } => {
                (alpha * (1.0 - r * r), -2.0 * alpha * r, 1.0 - alpha + alpha * r * r)
            }
            ClosedFormFamily::Liouville { a, b } => {
                let d = a + 2.0 * b * b;
                let e = 0.5 * (2.0 - b);
                let rb = r.powf(b);
                let re = r.powf(e);
                let gap = (a * rb + 2.0 * b * b) / d * re;
                let dgap = (a * b * rb * re + (a * rb + 2.0 * b * b) * e * re) / (d * r);
                (1.0 - gap, -dgap, gap)
            }
        }
    }

    pub fn kind(&self) -> ProfileKind {
        match self {
            ClosedFormFamily::Parabola { .. } => ProfileKind::Regular,
            _ => ProfileKind::Rupture,
        }
    }
}

fn check_liouville(a: f64, b: f64) -> Result<()> {
    if a > 0.0 && a.is_finite() && b > 0.0 && b < 2.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("Liouville parameters need a > 0, 0 < b < 2; got a = {a}, b = {b}")))
    }
}

/// Samples a closed-form family on `nodes` (increasing, in `(0, 1]`).
pub fn build(family: ClosedFormFamily, params: &ProblemParams, nodes: &[f64]) -> Result<RadialProfile> {
    family.check(params)?;
    if nodes.iter().any(|&r| !(r > 0.0 && r <= 1.0)) || nodes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParams("nodes must be increasing in (0, 1]".into()));
    }
    let mut u = Vec::with_capacity(nodes.len());
    let mut du = Vec::with_capacity(nodes.len());
    let mut gap = Vec::with_capacity(nodes.len());
    for &r in nodes {
        let (a, b, c) = family.eval(r);
        u.push(if r == 1.0 { 0.0 } else { a });
        du.push(b);
        gap.push(c);
    }
    Ok(RadialProfile {
        r: nodes.to_vec(),
        u,
        du,
        gap,
        kind: family.kind(),
        lambda: family.lambda(params),
        alpha: match family {
            ClosedFormFamily::Parabola { alpha } => Some(alpha),
            _ => None,
        },
    })
}

pub fn liouville_lambda(a: f64, b: f64) -> f64 {
    let d = a + 2.0 * b * b;
    2.0 * a * b.powi(4) / (d * d)
}

/// Log-spaced in `a`, uniform in `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiouvilleGrid {
    pub a_lo: f64,
    pub a_hi: f64,
    pub na: usize,
    pub b_lo: f64,
    pub b_hi: f64,
    pub nb: usize,
}

impl LiouvilleGrid {
    /// `a` in `[1e-3, 1e3]`, `b` in `[1e-3, 2 - 1e-3]`.
    pub fn coarse() -> Self {
        LiouvilleGrid { a_lo: 1e-3, a_hi: 1e3, na: 601, b_lo: 1e-3, b_hi: 2.0 - 1e-3, nb: 400 }
    }

    /// Fine grid around the maximiser `a = 2b^2` for `b` close to 2.
    pub fn refined_near_two() -> Self {
        LiouvilleGrid { a_lo: 4.0, a_hi: 16.0, na: 2001, b_lo: 1.99, b_hi: 2.0 - 1e-3, nb: 46 }
    }

    fn a_values(&self) -> impl Iterator<Item = f64> + '_ {
        let (l0, l1) = (self.a_lo.ln(), self.a_hi.ln());
        (0..self.na).map(move |i| (l0 + (l1 - l0) * i as f64 / (self.na - 1).max(1) as f64).exp())
    }

    fn b_values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.nb).map(move |j| self.b_lo + (self.b_hi - self.b_lo) * j as f64 / (self.nb - 1).max(1) as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiouvilleSup {
    pub lambda: f64,
    pub a: f64,
    pub b: f64,
}

/// Maximum of `lambda(a, b)` over the grid.
pub fn liouville_sup(grid: &LiouvilleGrid) -> LiouvilleSup {
    let mut best = LiouvilleSup { lambda: f64::NEG_INFINITY, a: f64::NAN, b: f64::NAN };
    for b in grid.b_values() {
        for a in grid.a_values() {
            let l = liouville_lambda(a, b);
            if l > best.lambda {
                best = LiouvilleSup { lambda: l, a, b };
            }
        }
    }
    best
}

/// `v(r) = log a + (b-2) log r - 2 log(1 + a r^b / (2b^2))`, a singular solution of
/// `Δv + e^v = 0` in the punctured disk.
pub fn liouville_v(a: f64, b: f64, r: f64) -> f64 {
    a.ln() + (b - 2.0) * r.ln() - 2.0 * (a * r.powf(b) / (2.0 * b * b)).ln_1p()
}

/// `r v'(r)` up to an additive constant. The constant is chosen so the returned value
/// is small relative to its variation, which keeps the stencil well conditioned.
fn liouville_flux(a: f64, b: f64, r: f64, large_q: bool) -> f64 {
    let q = a * r.powf(b) / (2.0 * b * b);
    if large_q {
        2.0 * b / (1.0 + q)
    } else {
        -2.0 * b * q / (1.0 + q)
    }
}

/// Residual of `Δv + e^v` at `r`, scaled by `|Δv| + e^v`, for `v + offset`.
///
/// `Δv = r^-2 d/ds (r v')` with `s = log r`; the `s`-derivative of the exact flux is
/// taken by a five-point stencil, so the check does not reuse the closed form of `Δv`.
/// The flux varies on the scale `1/b` in `s`, and the stencil step follows it.
pub fn liouville_pointwise(a: f64, b: f64, r: f64, offset: f64) -> (f64, f64) {
    let h = 1e-3 / b.min(1.0);
    let s = r.ln();
    let large_q = a * r.powf(b) / (2.0 * b * b) > 1.0;
    let f = |k: f64| liouville_flux(a, b, (s + k * h).exp(), large_q);
    let dflux = (f(-2.0) - 8.0 * f(-1.0) + 8.0 * f(1.0) - f(2.0)) / (12.0 * h);
    let lap = dflux / (r * r);
    let ev = (liouville_v(a, b, r) + offset).exp();
    let res = lap + ev;
    (res, res.abs() / (lap.abs() + ev))
}

/// Max scaled residual of `Δv + e^v` over 2001 log-spaced radii in `[1e-6, 1]`.
pub fn liouville_singular_check(a: f64, b: f64) -> Result<f64> {
    liouville_check_with_offset(a, b, 0.0)
}

pub fn liouville_check_with_offset(a: f64, b: f64, offset: f64) -> Result<f64> {
    check_liouville(a, b)?;
    let m = 2001;
    Ok((0..m)
        .map(|i| {
            let r = (1e-6f64.ln() * (1.0 - i as f64 / (m - 1) as f64)).exp();
            liouville_pointwise(a, b, r, offset).1
        })
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::geometric_nodes;
    use crate::shoot::{relative_residual, residual};

    fn pp(n: u32, d: f64) -> ProblemParams {
        ProblemParams::new(n, d).unwrap()
    }

    #[test]
    fn family_examples() {
        let p = build(ClosedFormFamily::RuptureLine, &pp(5, 1.0), &[0.25, 0.5, 1.0]).unwrap();
        assert_eq!(p.lambda, 3.0);
        assert_eq!(p.u[1], 0.5);
        assert_eq!(p.kind, ProfileKind::Rupture);
        assert_eq!(liouville_lambda(2.0, 1.0), 0.25);
        let p = build(ClosedFormFamily::Parabola { alpha: 0.5 }, &pp(2, 1.0), &[0.5, 1.0]).unwrap();
        assert_eq!(p.lambda, 1.0);
        assert_eq!(p.kind, ProfileKind::Regular);
    }

    #[test]
    fn precondition_errors() {
        let e = build(ClosedFormFamily::Parabola { alpha: 0.5 }, &pp(3, 1.0), &[1.0]);
        assert!(matches!(e, Err(Error::PreconditionViolated(_))));
        let e = build(ClosedFormFamily::RuptureLine, &pp(3, 2.0), &[1.0]);
        assert!(matches!(e, Err(Error::PreconditionViolated(_))));
        let e = build(ClosedFormFamily::Liouville { a: 1.0, b: 2.5 }, &pp(2, 1.0), &[1.0]);
        assert!(matches!(e, Err(Error::InvalidParams(_))));
        let e = build(ClosedFormFamily::Liouville { a: 1.0, b: 1.0 }, &pp(3, 1.0), &[1.0]);
        assert!(matches!(e, Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn rupture_line_has_zero_residual() {
        let nodes = geometric_nodes(1e-6, 400);
        for (n, d) in [(3, 1.0), (5, 2.0), (10, 4.9)] {
            let p = build(ClosedFormFamily::RuptureLine, &pp(n, d), &nodes).unwrap();
            assert!(residual(&p, &pp(n, d)) <= 1e-12);
            // slope of 1 - U at the origin is sqrt(lambda / (N-1-delta)) = 1
            assert_eq!(p.gap[0] / p.r[0], 1.0);
        }
    }

    #[test]
    fn parabola_has_zero_residual() {
        let nodes = geometric_nodes(1e-3, 300);
        for n in [2u32, 3, 4, 6] {
            let params = pp(n, n as f64 / 2.0);
            for k in 1..=20 {
                let alpha = k as f64 / 21.0;
                let p = build(ClosedFormFamily::Parabola { alpha }, &params, &nodes).unwrap();
                assert!(residual(&p, &params) <= 1e-12, "N={n} alpha={alpha}");
            }
        }
    }

    #[test]
    fn liouville_profile_solves_the_radial_equation() {
        let params = pp(2, 1.0);
        let nodes = geometric_nodes(1e-3, 4000);
        for (a, b) in [(2.0, 1.0), (8.0, 0.5), (0.3, 1.7)] {
            let fam = ClosedFormFamily::Liouville { a, b };
            let p = build(fam, &params, &nodes).unwrap();
            assert_eq!(p.boundary_value(), 0.0);
            assert!(p.u.windows(2).all(|w| w[1] < w[0]));
            assert!(relative_residual(&p, &params) < 1e-5, "a={a} b={b}");
            // 1 - U ~ r^((2-b)/2) as r -> 0
            assert!(fam.eval(1e-12).2 < fam.eval(1e-6).2 && fam.eval(1e-40).2 < 1e-5);
        }
    }

    #[test]
    fn liouville_residual_is_small() {
        assert!(liouville_singular_check(2.0, 1.0).unwrap() <= 1e-10);
        assert!(liouville_singular_check(8.0, 0.5).unwrap() <= 1e-10);
        for a in [1e-3, 0.1, 10.0, 1e3] {
            for b in [1e-3, 0.7, 1.3, 2.0 - 1e-3] {
                assert!(liouville_singular_check(a, b).unwrap() <= 1e-10, "a={a} b={b}");
            }
        }
    }

    #[test]
    fn perturbed_potential_is_detected() {
        let (res, _) = liouville_pointwise(2.0, 1.0, 1.0, 0.01);
        let ev = liouville_v(2.0, 1.0, 1.0).exp();
        assert!((res - ev * (0.01f64.exp() - 1.0)).abs() < 1e-10);
        assert!(liouville_check_with_offset(2.0, 1.0, 0.01).unwrap() > 1e-3);
    }

    #[test]
    fn liouville_maximiser_in_closed_form() {
        for b in [0.2, 1.0, 1.8] {
            let l = liouville_lambda(2.0 * b * b, b);
            assert!((l - b * b / 4.0).abs() < 1e-15);
            // dense scan over a confirms the interior max
            let scan = (0..20001)
                .map(|i| liouville_lambda((1e-4f64.ln() + 20.0 * i as f64 / 20000.0).exp(), b))
                .fold(0.0, f64::max);
            assert!(scan <= l + 1e-15 && scan > l - 1e-6);
        }
        assert!((liouville_lambda(6.48, 1.8) - 0.81).abs() < 1e-14);
    }

    #[test]
    fn liouville_sup_approaches_one() {
        let coarse = liouville_sup(&LiouvilleGrid::coarse());
        assert!(coarse.lambda < 1.0 && coarse.lambda > 0.99);
        let fine = liouville_sup(&LiouvilleGrid::refined_near_two());
        assert!(fine.lambda >= 0.999 && fine.lambda <= 1.0, "{:?}", fine);
        assert!((fine.a / (2.0 * fine.b * fine.b) - 1.0).abs() < 1e-3);
    }
}
