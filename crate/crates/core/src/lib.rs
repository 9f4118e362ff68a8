//! Optimal tax policies against an SIS epidemic.
//!
//! A susceptible-infected-susceptible population is steered by one of two
//! Pigouvian tax instruments: a tax on contacts (prevention) or a subsidy
//! funded tax on recovery (treatment). For each instrument the optimal tax
//! path is the stable manifold of a saddle in the `(S, control)` plane, found
//! here by shooting, and the discounted social cost along that path decides
//! which instrument is cheaper.
//!
//! ```no_run
//! use epipolicy::{shoot, IntegrationOptions, ModelParams, Policy, ShootingOptions};
//!
//! let params = ModelParams::controlled(0.2, 0.2, 0.04).unwrap();
//! let opts = IntegrationOptions::default();
//! let r = shoot(Policy::Prevention, &params, 0.96, &opts, &ShootingOptions::default()).unwrap();
//! println!("initial tax {:.4}", r.tau0);
//! ```

pub mod cli;
pub mod control;
pub mod cost;
pub mod epidemic;
pub mod error;
pub mod integrate;
pub mod phase;
pub mod records;
pub mod shoot;

pub use control::{PhasePoint, Policy};
pub use cost::{compare, ComparisonRow, Dominance, PolicyOutcome};
pub use epidemic::{ModelParams, SisState};
pub use error::{Error, Result};
pub use integrate::{IntegrationOptions, Method, Trajectory};
pub use shoot::{shoot, ShootingOptions, ShootingResult, Verdict};
