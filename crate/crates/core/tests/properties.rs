use mems_radial::model::{classify_regime, thresholds, transform_exponent, ProblemParams};
use mems_radial::phaseplane::{self, PhaseControls};
use mems_radial::picard::{self, KernelSpec};
use num_rational::Ratio;
use proptest::prelude::*;

type Q = Ratio<i64>;

/// `(N, delta)` with `N/2 <= delta < N-1` and `delta = num/den`.
fn fold_range() -> impl Strategy<Value = (i64, Q)> {
    (4i64..=14, 1i64..=12).prop_flat_map(|(n, den)| {
        let lo = n * den / 2 + if (n * den) % 2 == 0 { 0 } else { 1 };
        let hi = (n - 1) * den - 1;
        (Just(n), lo..=hi, Just(den)).prop_map(|(n, num, den)| (n, Q::new(num, den)))
    })
}

fn to_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

proptest! {
    #[test]
    fn lambda_star_below_lambda_3star_as_rationals((n, d) in fold_range()) {
        let nq = Q::from_integer(n);
        let one = Q::from_integer(1);
        let star = nq - one - d;
        let three = d * (nq - one - d) / (d - one);
        prop_assert!(star < three);
        let p = ProblemParams::new(n as u32, to_f64(d)).unwrap();
        let t = thresholds(&p, 0.0);
        prop_assert!((t.lambda_star.unwrap() - to_f64(star)).abs() <= 1e-12 * to_f64(star).max(1.0));
        prop_assert!((t.lambda_3star.unwrap() - to_f64(three)).abs() <= 1e-12 * to_f64(three));
    }

    #[test]
    fn half_dimension_is_sobolev_threshold(n in 3i64..=14, num in 1i64..=200, den in 1i64..=12) {
        let d = Q::new(num, den);
        prop_assume!(d != Q::from_integer(1));
        let one = Q::from_integer(1);
        let p = if d < one { (one + d) / (one - d) } else { (d + one) / (d - one) };
        prop_assert!(p > one);
        if d > one {
            let ps = Q::new(n + 2, n - 2);
            prop_assert_eq!(d >= Q::new(n, 2), p <= ps);
        }
        let pf = transform_exponent(to_f64(d)).unwrap();
        prop_assert!((pf - to_f64(p)).abs() <= 1e-12 * to_f64(p));
    }

    #[test]
    fn classification_is_pure(n in 2u32..=12, d in 0.05f64..8.0) {
        let p = ProblemParams::new(n, d).unwrap();
        prop_assert_eq!(classify_regime(&p), classify_regime(&p));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn omega_is_forward_invariant(frac in -0.95f64..0.95, lam_frac in 0.05f64..0.95, conservative in any::<bool>()) {
        let (n, d) = if conservative { (4u32, 2.0) } else { (4u32, 2.5) };
        let p = ProblemParams::new(n, d).unwrap();
        let l3 = thresholds(&p, 0.0).lambda_3star.unwrap();
        let lambda = lam_frac * l3;
        let x0 = phaseplane::initial_x(n as f64, d, lambda);
        let y0 = frac * phaseplane::y_bound(x0, n as f64, d);
        let run = phaseplane::construct_rupture(&p, lambda, y0, &PhaseControls::default()).unwrap();
        prop_assert!(run.trace.in_omega.iter().all(|&b| b));
        let diag = phaseplane::orbit_diagnostics(&run, &p);
        if conservative {
            prop_assert!(diag.energy_drift_rate <= 1e-9);
        } else {
            prop_assert!(diag.max_energy_increase <= 1e-9 * 40.0);
        }
        prop_assert_eq!(run.profile.boundary_value(), 0.0);
    }

    #[test]
    fn picard_iterates_stay_in_cone(lam in 1e-4f64..2e-2, pos in 0.05f64..0.95) {
        let k = KernelSpec::exponential_disk(2.0, lam).unwrap();
        let s = picard::feasible_m(&k).unwrap();
        let m = s.m_lo * (s.m_hi / s.m_lo).powf(pos);
        let sol = picard::solve(&k, m, 30.0, 1e-12).unwrap();
        prop_assert!(sol.cone_ok);
        prop_assert!(sol.slope_error <= sol.slope_bound);
    }
}
