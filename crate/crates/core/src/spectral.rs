//! First Dirichlet eigenvalue of the unit N-ball, `mu1 = j_{N/2-1,1}^2`.
//!
//! Only orders `nu = N/2 - 1` occur, so `nu` is always an integer or a half-integer.
//! Three evaluators of `J_nu` are provided: the ascending series, the closed
//! trigonometric form (half-integer orders, via spherical Bessel recurrence) and
//! Bessel's integral (integer orders, periodic trapezoid rule).

use serde::Serialize;
use std::f64::consts::PI;

/// Evaluation route for `J_nu`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselMethod {
    Series,
    /// Half-integer orders only.
    Trigonometric,
    /// Integer orders only.
    Integral,
    /// Trigonometric form for half-integers, series with an integral fallback otherwise.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mu1Result {
    pub dim: u32,
    pub nu: f64,
    pub j_first: f64,
    pub mu1: f64,
}

fn is_half_integer(nu: f64) -> bool {
    let twice = 2.0 * nu;
    twice.fract() == 0.0 && (twice as i64) % 2 != 0
}

fn is_integer(nu: f64) -> bool {
    nu.fract() == 0.0
}

/// `Gamma(nu + 1)` for integer or half-integer `nu >= 0` (or `nu = -1/2`).
fn gamma_nu_plus_one(nu: f64) -> f64 {
    let mut g = if is_integer(nu) { 1.0 } else { PI.sqrt() };
    let mut z = if is_integer(nu) { 1.0 } else { 0.5 };
    while z < nu + 1.0 - 1e-12 {
        g *= z;
        z += 1.0;
    }
    g
}

/// Ascending series; returns the value and an estimate of the rounding error.
fn series(nu: f64, x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (if nu == 0.0 { 1.0 } else { 0.0 }, 0.0);
    }
    let half = 0.5 * x;
    let q = half * half;
    let mut term = half.powf(nu) / gamma_nu_plus_one(nu);
    let mut sum = term;
    let mut max_term = term.abs();
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= -q / (k * (k + nu));
        sum += term;
        max_term = max_term.max(term.abs());
        if term.abs() < 1e-18 * sum.abs().max(1e-300) && k > half {
            break;
        }
        if k > 500.0 {
            break;
        }
    }
    (sum, max_term * f64::EPSILON * k.sqrt())
}

/// Closed trigonometric form for `nu = l + 1/2`.
fn trigonometric(nu: f64, x: f64) -> f64 {
    debug_assert!(is_half_integer(nu));
    let l = (nu - 0.5).round() as i64;
    if x == 0.0 {
        return 0.0;
    }
    let (s, c) = x.sin_cos();
    let scale = (2.0 * x / PI).sqrt();
    if l == -1 {
        // J_{-1/2} = sqrt(2/(pi x)) cos x
        return scale * c / x;
    }
    let mut jm = s / x;
    if l == 0 {
        return scale * jm;
    }
    let mut j = s / (x * x) - c / x;
    for k in 1..l {
        let next = (2 * k + 1) as f64 / x * j - jm;
        jm = j;
        j = next;
    }
    scale * j
}

/// Bessel's integral, `J_n(x) = (1/2pi) int_0^{2pi} cos(n t - x sin t) dt`.
fn integral(n: f64, x: f64) -> f64 {
    debug_assert!(is_integer(n));
    let m = 4 * (x.abs().ceil() as usize + n.abs() as usize) + 64;
    let h = 2.0 * PI / m as f64;
    let mut acc = 0.0;
    for i in 0..m {
        let t = i as f64 * h;
        acc += (n * t - x * t.sin()).cos();
    }
    acc / m as f64
}

/// `J_nu(x)` for integer or half-integer `nu >= 0`.
pub fn bessel_j(nu: f64, x: f64, method: BesselMethod) -> f64 {
    match method {
        BesselMethod::Series => series(nu, x).0,
        BesselMethod::Trigonometric => trigonometric(nu, x),
        BesselMethod::Integral => integral(nu, x),
        BesselMethod::Auto => {
            if is_half_integer(nu) {
                trigonometric(nu, x)
            } else {
                let (v, err) = series(nu, x);
                if err > 1e-14 {
                    integral(nu, x)
                } else {
                    v
                }
            }
        }
    }
}

/// First positive zero of `J_nu`, scanning upward from `nu` and refining by
/// bisection followed by safeguarded secant steps.
pub fn first_zero(nu: f64, method: BesselMethod) -> f64 {
    let j = |x: f64| bessel_j(nu, x, method);
    // J_nu > 0 on (0, j_{nu,1}) and j_{nu,1} > nu
    let step = 0.25;
    let mut a = nu.max(0.5);
    let mut b = a + step;
    while j(b) > 0.0 {
        a = b;
        b += step;
    }
    while b - a > 1e-6 {
        let m = 0.5 * (a + b);
        if j(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    // Illinois-modified secant inside the bracket
    let (mut fa, mut fb) = (j(a), j(b));
    let mut side = 0i8;
    for _ in 0..100 {
        let x = (a * fb - b * fa) / (fb - fa);
        let fx = j(x);
        if fx == 0.0 || b - a < 4.0 * f64::EPSILON * x {
            return x;
        }
        if fx > 0.0 {
            a = x;
            fa = fx;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        } else {
            b = x;
            fb = fx;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        }
        if (b - a) <= 1e-15 * x {
            break;
        }
    }
    if fa.abs() < fb.abs() {
        a
    } else {
        b
    }
}

/// First Dirichlet eigenvalue of the unit ball in `R^dim`.
pub fn mu1(dim: u32) -> Mu1Result {
    assert!(dim >= 2, "dimension must be at least 2");
    let nu = dim as f64 / 2.0 - 1.0;
    let j_first = first_zero(nu, BesselMethod::Auto);
    Mu1Result { dim, nu, j_first, mu1: j_first * j_first }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_dimensional_ball_gives_pi_squared() {
        let r = mu1(3);
        assert!((r.j_first - PI).abs() < 1e-13);
        assert!((r.mu1 - PI * PI).abs() < 1e-10);
    }

    #[test]
    fn disk_eigenvalue_by_two_evaluators() {
        let series_zero = first_zero(0.0, BesselMethod::Series);
        let integral_zero = first_zero(0.0, BesselMethod::Integral);
        assert!((series_zero - integral_zero).abs() < 1e-12);
        assert!((series_zero * series_zero - 5.783185963).abs() < 1e-8);
    }

    #[test]
    fn five_dimensional_zero_solves_tan_x_eq_x() {
        // independent oracle: bisection on tan x - x in (pi, 3pi/2)
        let (mut a, mut b) = (PI + 1e-6, 1.5 * PI - 1e-6);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m.tan() - m < 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        let r = mu1(5);
        assert!((r.j_first - 0.5 * (a + b)).abs() < 1e-11);
        assert!((r.mu1 - 20.190729).abs() < 1e-5);
    }

    #[test]
    fn half_integer_series_and_closed_form_agree() {
        for n in [3u32, 5, 7] {
            let nu = n as f64 / 2.0 - 1.0;
            let a = first_zero(nu, BesselMethod::Series);
            let b = first_zero(nu, BesselMethod::Trigonometric);
            assert!((a - b).abs() < 1e-10, "N={n}: {a} vs {b}");
        }
    }

    #[test]
    fn residual_at_zero_is_tiny() {
        for n in 2..=12u32 {
            let r = mu1(n);
            let v = bessel_j(r.nu, r.j_first, BesselMethod::Auto);
            assert!(v.abs() <= 1e-12, "N={n}: J(j) = {v}");
        }
    }

    #[test]
    fn eigenvalue_increases_with_dimension() {
        for n in 2..=12u32 {
            assert!(mu1(n + 1).mu1 > mu1(n).mu1);
        }
    }

    #[test]
    fn large_orders_are_supported() {
        // McMahon-type estimate j ~ nu + 1.8558 nu^(1/3)
        let r = mu1(50);
        let est = r.nu + 1.8557571 * r.nu.cbrt() + 1.033150 / r.nu.cbrt();
        assert!((r.j_first - est).abs() < 0.05, "{} vs {}", r.j_first, est);
        assert!(bessel_j(r.nu, r.j_first, BesselMethod::Integral).abs() < 1e-10);
    }
}
