//! Baseline SIS dynamics with constant prevention and treatment rates.
//!
//! The population is normalized to one, so every quantity here is a share.
//! With a constant prevention rate `p` and treatment rate `v` the infected
//! share follows the logistic-type equation
//!
//! ```text
//! dI/dt = alpha (1 - p) (1 - I) I - delta (1 + v) I
//! ```
//!
//! whose long-run behaviour is decided by the basic reproduction number
//! `R0 = alpha (1 - p) / (delta (1 + v))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::PhasePoint;

/// `|R0 - 1|` below this selects the `R0 = 1` branch of the closed form.
pub const R0_BRANCH_TOL: f64 = 1e-9;

/// Disease and economic constants of the model, plus the constant policy
/// rates used by the baseline (uncontrolled) dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Infection rate per unit time.
    pub alpha: f64,
    /// Recovery rate per unit time.
    pub delta: f64,
    /// Time-preference (discount) rate.
    pub rho: f64,
    /// Constant prevention rate.
    pub p: f64,
    /// Constant treatment rate.
    pub v: f64,
}

impl ModelParams {
    pub fn new(alpha: f64, delta: f64, rho: f64, p: f64, v: f64) -> Result<Self> {
        fn check(name: &'static str, value: f64, ok: bool, reason: &'static str) -> Result<()> {
            if ok && value.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    value,
                    reason,
                })
            }
        }
        check("alpha", alpha, alpha >= 0.0, "must be >= 0")?;
        check("delta", delta, delta >= 0.0, "must be >= 0")?;
        check("rho", rho, rho > 0.0, "must be > 0")?;
        check("p", p, (0.0..=1.0).contains(&p), "must lie in [0, 1]")?;
        check("v", v, (0.0..=1.0).contains(&v), "must lie in [0, 1]")?;
        Ok(Self {
            alpha,
            delta,
            rho,
            p,
            v,
        })
    }

    /// Parameters for the controlled problems, where the policy instrument is
    /// the state-dependent tax rate rather than a constant `p` or `v`.
    pub fn controlled(alpha: f64, delta: f64, rho: f64) -> Result<Self> {
        Self::new(alpha, delta, rho, 0.0, 0.0)
    }

    /// Effective infection rate `alpha (1 - p)`.
    pub fn effective_infection(&self) -> f64 {
        self.alpha * (1.0 - self.p)
    }

    /// Effective recovery rate `delta (1 + v)`.
    pub fn effective_recovery(&self) -> f64 {
        self.delta * (1.0 + self.v)
    }

    pub fn with_policy(self, p: f64, v: f64) -> Result<Self> {
        Self::new(self.alpha, self.delta, self.rho, p, v)
    }
}

/// Susceptible and infected shares of the unit population.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SisState {
    pub s: f64,
    pub i: f64,
}

impl SisState {
    pub const CONSERVATION_TOL: f64 = 1e-10;

    pub fn new(s: f64, i: f64) -> Result<Self> {
        for (what, x) in [("s", s), ("i", i)] {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::Domain {
                    what,
                    value: x,
                    expected: "[0, 1]",
                });
            }
        }
        if (s + i - 1.0).abs() > Self::CONSERVATION_TOL {
            return Err(Error::Domain {
                what: "s + i",
                value: s + i,
                expected: "1 within 1e-10",
            });
        }
        Ok(Self { s, i })
    }

    pub fn from_infected(i: f64) -> Result<Self> {
        Self::new(1.0 - i, i)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LongRun {
    DiseaseFree,
    Endemic,
}

pub fn basic_reproduction_number(params: &ModelParams) -> Result<f64> {
    let recovery = params.effective_recovery();
    if recovery <= 0.0 {
        return Err(Error::UndefinedR0);
    }
    Ok(params.effective_infection() / recovery)
}

/// Time derivative of the infected share. The susceptible derivative is its
/// negation.
pub fn sis_vector_field(i: f64, params: &ModelParams) -> Result<f64> {
    if !(0.0..=1.0).contains(&i) {
        return Err(Error::Domain {
            what: "infected share",
            value: i,
            expected: "[0, 1]",
        });
    }
    Ok(params.effective_infection() * (1.0 - i) * i - params.effective_recovery() * i)
}

/// Planar `(S, I)` form of the baseline dynamics, for numerical integration.
/// The control coordinate of the returned point carries `I`.
pub fn baseline_planar_field(params: ModelParams) -> impl Fn(PhasePoint) -> Result<[f64; 2]> {
    move |x: PhasePoint| {
        let di = params.effective_infection() * x.s * x.c - params.effective_recovery() * x.c;
        Ok([-di, di])
    }
}

/// Disease-free level (always 0) and the endemic level `1 - 1/R0`, present
/// only when `R0 > 1`.
pub fn baseline_equilibria(params: &ModelParams) -> Result<(f64, Option<f64>)> {
    let r0 = basic_reproduction_number(params)?;
    let endemic = (r0 > 1.0).then(|| 1.0 - 1.0 / r0);
    Ok((0.0, endemic))
}

/// Closed-form solution of the Bernoulli equation for `I_t`.
///
/// Uses the `R0 = 1` branch `1 / (a t + 1/I0)` when `|R0 - 1| < R0_BRANCH_TOL`
/// and otherwise the general branch, written with `expm1` so that it stays
/// accurate close to the threshold and does not overflow for large `t`.
/// `i0 = 0` is absorbing and yields 0 for all `t`.
pub fn closed_form_infected(t: f64, i0: f64, params: &ModelParams) -> Result<f64> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::Domain {
            what: "t",
            value: t,
            expected: "t >= 0",
        });
    }
    if !(0.0..=1.0).contains(&i0) {
        return Err(Error::Domain {
            what: "i0",
            value: i0,
            expected: "[0, 1]",
        });
    }
    if i0 == 0.0 {
        return Ok(0.0);
    }
    let r0 = basic_reproduction_number(params)?;
    let a = params.effective_infection();
    if (r0 - 1.0).abs() < R0_BRANCH_TOL {
        return Ok(1.0 / (a * t + 1.0 / i0));
    }
    // growth rate a (1 - 1/R0) = a - d
    let r = a - params.effective_recovery();
    let value = if r > 0.0 {
        let decay = (-r * t).exp();
        1.0 / (a * (-(-r * t).exp_m1()) / r + decay / i0)
    } else {
        (r * t).exp() / (a * (r * t).exp_m1() / r + 1.0 / i0)
    };
    Ok(value)
}

/// Long-run outcome of the baseline dynamics for a positive initial infected
/// share. `R0 = 1` counts as disease-free.
///
/// An initial infected share of exactly 0 stays disease-free whatever `R0`
/// is, since `I = 0` is invariant.
pub fn classify_long_run(params: &ModelParams) -> Result<LongRun> {
    let r0 = basic_reproduction_number(params)?;
    Ok(if r0 <= 1.0 {
        LongRun::DiseaseFree
    } else {
        LongRun::Endemic
    })
}
