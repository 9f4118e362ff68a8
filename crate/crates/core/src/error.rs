use thiserror::Error;

use crate::integrate::Trajectory;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// `delta * (1 + v)` vanishes, so the reproduction number has no finite value.
    #[error("basic reproduction number undefined: effective recovery rate delta*(1+v) is zero")]
    UndefinedR0,

    #[error("{what} = {value} is outside its domain ({expected})")]
    Domain {
        what: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("vector field is singular at {what}")]
    Singularity { what: &'static str },

    #[error("equilibrium is not hyperbolic (eigenvalues {re1}{im1:+}i, {re2}{im2:+}i)")]
    NonHyperbolic {
        re1: f64,
        im1: f64,
        re2: f64,
        im2: f64,
    },

    /// The target equilibrium is missing or does not have the saddle structure
    /// the shooting method relies on.
    #[error("structure error: {0}")]
    Structure(String),

    #[error("no sign change of the shooting classifier on [{lo}, {hi}] (both ends {verdict})")]
    Bracket { lo: f64, hi: f64, verdict: String },

    #[error("shot trajectory did not enter the convergence ball after {stages} stage(s); closest distance {closest:e}")]
    NoConvergence { stages: usize, closest: f64 },

    #[error("integration left the vector field's domain at t = {t}: {reason}")]
    DomainBreach {
        t: f64,
        reason: String,
        partial: Box<Trajectory>,
    },

    #[error("adaptive step size underflow at t = {t} (h = {h:e})")]
    Stiffness { t: f64, h: f64 },

    #[error("trajectory kind mismatch: expected {expected}, found {found}")]
    KindMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("constant policy infeasible at t = {t}: implied instrument {value} outside [0, 1]")]
    Infeasible { t: f64, value: f64 },

    #[error("invalid integration options: {0}")]
    Options(&'static str),
}
