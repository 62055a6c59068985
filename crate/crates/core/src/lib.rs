//! Numerical laboratory for radial regular and rupture solutions of the MEMS
//! equation with fringing field,
//!
//! ```text
//! -ΔU = (λ + δ|∇U|²) / (1 - U)  in the unit ball of R^N,   U = 0 on the boundary.
//! ```

pub mod bifurcation;
pub mod critical;
pub mod error;
pub mod exact;
pub mod model;
pub mod ode;
pub mod phaseplane;
pub mod picard;
pub mod profile;
pub mod quad;
pub mod shoot;
pub mod spectral;
pub mod transforms;

pub use error::{Error, Result};
pub use model::{classify_regime, thresholds, ProblemParams, RegimeClass, Thresholds};
pub use profile::{ProfileKind, RadialProfile};
pub use shoot::{lambda_of_alpha, ShootControls, ShotResult};
