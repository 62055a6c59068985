//! Independent checks of the shooting solver against hand-rolled fixed-step integrators.

use approx::assert_relative_eq;
use mems_radial::model::ProblemParams;
use mems_radial::shoot::{lambda_of_alpha, shoot, ShootControls};

/// First zero of `u'' + (N-1)/s u' + g(u) = 0`, `u(0) = u0`, `u'(0) = 0`, by classical RK4
/// with step `h`, the last partial step found by Newton on the step length.
fn rk4_first_zero(n: f64, u0: f64, g: &dyn Fn(f64) -> f64, h: f64) -> f64 {
    let rhs = |s: f64, y: [f64; 2]| -> [f64; 2] {
        // u''(0) = -g(u0)/N by symmetry
        let upp = if s == 0.0 { -g(y[0]) / n } else { -(n - 1.0) / s * y[1] - g(y[0]) };
        [y[1], upp]
    };
    let step = |s: f64, y: [f64; 2], h: f64| -> [f64; 2] {
        let k1 = rhs(s, y);
        let k2 = rhs(s + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
        let k3 = rhs(s + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
        let k4 = rhs(s + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        [
            y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ]
    };
    let mut s = 0.0;
    let mut y = [u0, 0.0];
    loop {
        let next = step(s, y, h);
        if next[0] <= 0.0 {
            let mut dh = h * y[0] / (y[0] - next[0]);
            for _ in 0..50 {
                let z = step(s, y, dh);
                let corr = z[0] / z[1];
                dh -= corr;
                if corr.abs() < 1e-16 {
                    break;
                }
            }
            return s + dh;
        }
        s += h;
        y = next;
        assert!(s < 100.0, "no zero");
    }
}

/// Richardson-extrapolated `lambda = s0^2` from steps `h` and `h/2`.
fn richardson_lambda(n: f64, u0: f64, g: &dyn Fn(f64) -> f64, h: f64) -> f64 {
    let a = rk4_first_zero(n, u0, g, h).powi(2);
    let b = rk4_first_zero(n, u0, g, h / 2.0).powi(2);
    (16.0 * b - a) / 15.0
}

#[test]
fn gelfand_form_oracle() {
    // delta = 1: u = -2 ln(1-U) solves u'' + (N-1)/s u' + 2 e^u = 0
    let alpha: f64 = 0.9;
    let u0 = -2.0 * (1.0 - alpha).ln();
    let oracle = richardson_lambda(3.0, u0, &|u: f64| 2.0 * u.exp(), 2e-4);
    let p = ProblemParams::new(3, 1.0).unwrap();
    let got = lambda_of_alpha(&p, alpha, &ShootControls::default().with_rtol(1e-12)).unwrap();
    assert_relative_eq!(got, oracle, max_relative = 1e-8);
}

#[test]
fn mems_power_form_oracle() {
    // delta < 1: u = 1 - (1-U)^(1-delta) solves u'' + (N-1)/s u' + (1-delta)(1-u)^(-p) = 0
    let (delta, alpha): (f64, f64) = (0.5, 0.3);
    let p_exp = (1.0 + delta) / (1.0 - delta);
    let u0 = 1.0 - (1.0 - alpha).powf(1.0 - delta);
    let oracle = richardson_lambda(2.0, u0, &|u: f64| (1.0 - delta) * (1.0 - u).powf(-p_exp), 1e-3);
    let p = ProblemParams::new(2, delta).unwrap();
    let got = lambda_of_alpha(&p, alpha, &ShootControls::default().with_rtol(1e-12)).unwrap();
    assert_relative_eq!(got, oracle, max_relative = 1e-8);
}

#[test]
fn superlinear_form_oracle() {
    // delta > 1: u = (1-U)^(1-delta) - 1 solves u'' + (N-1)/s u' + (delta-1)(u+1)^p = 0
    let (delta, alpha): (f64, f64) = (3.0, 0.4);
    let p_exp = (delta + 1.0) / (delta - 1.0);
    let u0 = (1.0 - alpha).powf(1.0 - delta) - 1.0;
    let oracle = richardson_lambda(4.0, u0, &|u: f64| (delta - 1.0) * (u + 1.0).powf(p_exp), 1e-3);
    let p = ProblemParams::new(4, delta).unwrap();
    let got = lambda_of_alpha(&p, alpha, &ShootControls::default().with_rtol(1e-12)).unwrap();
    assert_relative_eq!(got, oracle, max_relative = 1e-8);
}

#[test]
fn half_dimension_law_over_fifty_alphas() {
    for n in [2u32, 3, 4, 6] {
        let p = ProblemParams::new(n, n as f64 / 2.0).unwrap();
        for k in 1..=50 {
            let alpha = k as f64 / 51.0;
            let shot = shoot(&p, alpha, &ShootControls::default()).unwrap();
            let law = 2.0 * n as f64 * alpha * (1.0 - alpha);
            assert!((shot.lambda - law).abs() <= 1e-6, "N={n} alpha={alpha}");
            for (r, u) in shot.profile.r.iter().zip(&shot.profile.u) {
                assert!((u - alpha * (1.0 - r * r)).abs() <= 1e-6);
            }
        }
    }
}
