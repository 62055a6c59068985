//! Quadrature on uniform grids.

/// Cumulative integral `F[i] = ∫_{x_0}^{x_i} f` of nodal values on a uniform grid of step `h`.
///
/// Each cell uses the three-point rule through its neighbour, `h/12 (-f[i-1] + 8 f[i] + 5 f[i+1])`
/// (the mirrored form on the first cell), which is exact for quadratics.
pub fn cumulative(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n == 2 {
        out[1] = 0.5 * h * (f[0] + f[1]);
        return out;
    }
    out[1] = h / 12.0 * (5.0 * f[0] + 8.0 * f[1] - f[2]);
    for i in 1..n - 1 {
        out[i + 1] = out[i] + h / 12.0 * (-f[i - 1] + 8.0 * f[i] + 5.0 * f[i + 1]);
    }
    out
}

/// Composite Simpson rule with `n` (rounded up to even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = (n.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cumulative_exact_on_quadratics() {
        let h = 0.1;
        let x: Vec<f64> = (0..21).map(|i| i as f64 * h).collect();
        let f: Vec<f64> = x.iter().map(|t| 3.0 * t * t - t + 2.0).collect();
        let c = cumulative(&f, h);
        for (t, v) in x.iter().zip(&c) {
            let exact = t * t * t - 0.5 * t * t + 2.0 * t;
            assert!((v - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn cumulative_converges_at_third_order() {
        let err = |m: usize| {
            let h = 1.0 / m as f64;
            let f: Vec<f64> = (0..=m).map(|i| (i as f64 * h).exp()).collect();
            (cumulative(&f, h)[m] - (1f64.exp() - 1.0)).abs()
        };
        assert!(err(40) / err(80) > 7.0);
    }

    #[test]
    fn simpson_matches_closed_form() {
        let v = simpson(|t| t.powi(3) * (-2.0 * t).exp(), 0.0, 40.0, 40_000);
        assert!((v - 0.375).abs() < 1e-10);
    }
}
