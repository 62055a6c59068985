//! Changes of unknown `U = 1 - phi(u)` that remove the gradient term.
//!
//! * `0 < delta < 1`: `u = 1 - (1-U)^(1-delta)`, nonlinearity `(1-u)^(-p)`, `lambda~ = (1-delta) lambda`
//! * `delta = 1`:     `u = -2 log(1-U)`,          nonlinearity `e^u`,        `lambda~ = 2 lambda`
//! * `delta > 1`:     `u = (1-U)^(1-delta) - 1`,  nonlinearity `(u+1)^p`,    `lambda~ = (delta-1) lambda`
//!
//! All maps are evaluated through `ln_1p`/`expm1`, which keeps them accurate both
//! near `U = 0` and for `U` within rounding distance of one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{transform_exponent, UNIT_DELTA_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransformKind {
    /// `0 < delta < 1`, nonlinearity `(1-u)^(-p)`.
    MemsPower,
    /// `delta = 1`, nonlinearity `e^u`.
    Exponential,
    /// `delta > 1`, nonlinearity `(u+1)^p`.
    SuperlinearPower,
}

impl TransformKind {
    pub fn for_delta(delta: f64) -> TransformKind {
        if (delta - 1.0).abs() <= UNIT_DELTA_TOL {
            TransformKind::Exponential
        } else if delta < 1.0 {
            TransformKind::MemsPower
        } else {
            TransformKind::SuperlinearPower
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformedProblem {
    pub kind: TransformKind,
    pub p: Option<f64>,
    /// `lambda~ / lambda`.
    pub lambda_factor: f64,
    /// Transformed center value `u(0)`.
    pub center_value: f64,
}

impl TransformedProblem {
    pub fn new(delta: f64, alpha: f64) -> Result<Self> {
        check_delta(delta)?;
        Ok(TransformedProblem {
            kind: TransformKind::for_delta(delta),
            p: transform_exponent(delta),
            lambda_factor: lambda_factor(delta),
            center_value: to_transformed(alpha, delta)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// `lambda -> lambda~`
    Forward,
    /// `lambda~ -> lambda`
    Backward,
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("delta = {delta} must be > 0")))
    }
}

/// `lambda~ / lambda` for the active branch.
pub fn lambda_factor(delta: f64) -> f64 {
    match TransformKind::for_delta(delta) {
        TransformKind::MemsPower => 1.0 - delta,
        TransformKind::Exponential => 2.0,
        TransformKind::SuperlinearPower => delta - 1.0,
    }
}

/// `U -> u`.
pub fn to_transformed(u_value: f64, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if !(0.0..1.0).contains(&u_value) {
        return Err(Error::Domain(format!("U = {u_value} outside [0, 1)")));
    }
    let log_gap = (-u_value).ln_1p();
    Ok(match TransformKind::for_delta(delta) {
        TransformKind::MemsPower => -((1.0 - delta) * log_gap).exp_m1(),
        TransformKind::Exponential => -2.0 * log_gap,
        TransformKind::SuperlinearPower => (-(delta - 1.0) * log_gap).exp_m1(),
    })
}

/// `u -> U`, the inverse of [`to_transformed`].
pub fn from_transformed(u: f64, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if !(u >= 0.0) || !u.is_finite() {
        return Err(Error::Domain(format!("u = {u} must be finite and >= 0")));
    }
    Ok(match TransformKind::for_delta(delta) {
        TransformKind::MemsPower => {
            if u >= 1.0 {
                return Err(Error::Domain(format!("u = {u} must be < 1 for delta < 1")));
            }
            -((-u).ln_1p() / (1.0 - delta)).exp_m1()
        }
        TransformKind::Exponential => -(-0.5 * u).exp_m1(),
        TransformKind::SuperlinearPower => -(-u.ln_1p() / (delta - 1.0)).exp_m1(),
    })
}

pub fn map_lambda(lambda: f64, delta: f64, direction: Direction) -> f64 {
    let f = lambda_factor(delta);
    match direction {
        Direction::Forward => lambda * f,
        Direction::Backward => lambda / f,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn boundary_value_preserved() {
        for d in [0.3, 1.0, 2.5, 4.0] {
            assert_eq!(to_transformed(0.0, d).unwrap(), 0.0);
            assert_eq!(from_transformed(0.0, d).unwrap(), 0.0);
        }
    }

    #[test]
    fn branch_examples() {
        let u = to_transformed(0.5, 1.0).unwrap();
        assert!((u - 2.0 * 2f64.ln()).abs() < 1e-15);
        assert!((to_transformed(0.75, 3.0).unwrap() - 15.0).abs() < 1e-13);
        assert!((from_transformed(2.0 * 2f64.ln(), 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((from_transformed(15.0, 3.0).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(map_lambda(1.0, 0.5, Direction::Forward), 0.5);
        for n in 3..8 {
            let tilde = 2.0 * (n as f64 - 2.0);
            assert_eq!(map_lambda(tilde, 1.0, Direction::Backward), n as f64 - 2.0);
        }
        assert_eq!(map_lambda(0.75, 3.0, Direction::Forward), 1.5);
    }

    #[test]
    fn round_trip_grid() {
        let mut us: Vec<f64> = (0..10).map(|k| k as f64 / 10.0).collect();
        us.push(0.999);
        for d in [0.3, 1.0, 2.5, 4.0] {
            for &u in &us {
                let back = from_transformed(to_transformed(u, d).unwrap(), d).unwrap();
                assert!((back - u).abs() <= 1e-12, "delta={d} U={u} back={back}");
            }
        }
    }

    #[test]
    fn monotone_on_sampled_grid() {
        for d in [0.3, 0.9, 1.0, 1.5, 4.0] {
            let mut prev = -1.0;
            for k in 0..1000 {
                let u = k as f64 / 1000.0;
                let v = to_transformed(u, d).unwrap();
                assert!(v > prev, "delta={d} U={u}");
                prev = v;
            }
        }
    }

    #[test]
    fn center_value_limits() {
        let a = 1.0 - 1e-12;
        assert!((to_transformed(a, 0.5).unwrap() - 1.0).abs() < 1e-5);
        assert!(to_transformed(a, 1.0).unwrap() > 50.0);
        assert!(to_transformed(a, 3.0).unwrap() > 1e20);
        // near-singular values stay finite
        let v = to_transformed(1.0 - 1e-15, 4.0).unwrap();
        assert!(v.is_finite() && v > 1e40);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(to_transformed(1.0, 0.5), Err(Error::Domain(_))));
        assert!(matches!(to_transformed(-0.1, 2.0), Err(Error::Domain(_))));
        assert!(matches!(from_transformed(1.0, 0.5), Err(Error::Domain(_))));
        assert!(matches!(from_transformed(-1.0, 2.0), Err(Error::Domain(_))));
        assert!(matches!(to_transformed(0.5, 0.0), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn transformed_problem_fields() {
        let t = TransformedProblem::new(0.5, 0.75).unwrap();
        assert_eq!(t.kind, TransformKind::MemsPower);
        assert_eq!(t.p, Some(3.0));
        assert_eq!(t.lambda_factor, 0.5);
        assert!((t.center_value - 0.5).abs() < 1e-15);
        let t = TransformedProblem::new(1.0, 0.5).unwrap();
        assert_eq!((t.kind, t.p, t.lambda_factor), (TransformKind::Exponential, None, 2.0));
        let t = TransformedProblem::new(3.0, 0.5).unwrap();
        assert_eq!((t.kind, t.p, t.lambda_factor), (TransformKind::SuperlinearPower, Some(2.0), 2.0));
    }

    proptest! {
        #[test]
        fn lambda_map_is_invertible(l in 1e-6f64..1e3, d in 0.01f64..10.0) {
            let back = map_lambda(map_lambda(l, d, Direction::Forward), d, Direction::Backward);
            prop_assert!((back - l).abs() <= 4.0 * f64::EPSILON * l);
        }

        #[test]
        fn round_trip_random(u in 0.0f64..0.999_999, d in 0.05f64..6.0) {
            let v = to_transformed(u, d).unwrap();
            prop_assume!(v.is_finite());
            let back = from_transformed(v, d).unwrap();
            prop_assert!((back - u).abs() <= 1e-11);
        }
    }
}
