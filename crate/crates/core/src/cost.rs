//! Discounted social cost and the prevention-versus-treatment comparison.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::control::{PhasePoint, Policy};
use crate::epidemic::{closed_form_infected, ModelParams};
use crate::error::{Error, Result};
use crate::integrate::{SystemKind, Trajectory};
use crate::shoot::{shoot, ShootingOptions, ShootingResult};
use crate::IntegrationOptions;

/// Cost differences below this are reported as a tie.
pub const TIE_THRESHOLD: f64 = 1e-5;

/// The fifteen `(alpha, delta)` pairs of the reference comparison table.
pub const TABLE2_ROWS: [(f64, f64); 15] = [
    (0.2, 0.185),
    (0.2, 0.2),
    (0.2, 0.26),
    (0.3, 0.281),
    (0.3, 0.3),
    (0.3, 0.4),
    (0.4, 0.381),
    (0.4, 0.4),
    (0.4, 0.5),
    (0.5, 0.485),
    (0.5, 0.5),
    (0.5, 0.6),
    (0.6, 0.585),
    (0.6, 0.6),
    (0.6, 0.8),
];

fn expect_kind(traj: &Trajectory, kind: SystemKind) -> Result<()> {
    if traj.policy_kind == kind {
        Ok(())
    } else {
        Err(Error::KindMismatch {
            expected: kind.name(),
            found: traj.policy_kind.name(),
        })
    }
}

/// Trapezoid rule for `loss(x) e^{-rho t}` over the trajectory samples.
fn discounted_trapezoid(traj: &Trajectory, rho: f64, loss: impl Fn(PhasePoint) -> f64) -> f64 {
    let f: Vec<f64> = traj
        .iter()
        .map(|(t, x)| loss(x) * (-rho * t).exp())
        .collect();
    traj.times
        .windows(2)
        .zip(f.windows(2))
        .map(|(t, y)| 0.5 * (t[1] - t[0]) * (y[0] + y[1]))
        .sum()
}

pub fn prevention_loss(x: PhasePoint) -> f64 {
    let g = (1.0 - x.s) * (1.0 + x.c);
    0.5 * g * g
}

pub fn treatment_loss(x: PhasePoint) -> f64 {
    0.5 * x.c * x.c
}

/// Treatment loss written in terms of the tax rate rather than `phi`.
pub fn treatment_loss_tau(s: f64, tau: f64) -> f64 {
    let i = 1.0 - s;
    let g = i * (1.0 + tau * s / i);
    0.5 * g * g
}

pub fn social_cost_prevention(traj: &Trajectory, params: &ModelParams) -> Result<f64> {
    expect_kind(traj, SystemKind::Prevention)?;
    Ok(discounted_trapezoid(traj, params.rho, prevention_loss))
}

pub fn social_cost_treatment(traj: &Trajectory, params: &ModelParams) -> Result<f64> {
    expect_kind(traj, SystemKind::Treatment)?;
    Ok(discounted_trapezoid(traj, params.rho, treatment_loss))
}

pub fn social_cost(policy: Policy, traj: &Trajectory, params: &ModelParams) -> Result<f64> {
    match policy {
        Policy::Prevention => social_cost_prevention(traj, params),
        Policy::Treatment => social_cost_treatment(traj, params),
    }
}

/// Treatment cost evaluated through the tax-rate form of the loss, skipping
/// samples at `S = 1` where that form is undefined.
pub fn social_cost_treatment_tau_form(traj: &Trajectory, params: &ModelParams) -> Result<f64> {
    expect_kind(traj, SystemKind::Treatment)?;
    Ok(discounted_trapezoid(traj, params.rho, |x| {
        if x.s < 1.0 {
            let tau = (x.c - 1.0 + x.s) / x.s;
            treatment_loss_tau(x.s, tau)
        } else {
            treatment_loss(x)
        }
    }))
}

/// Discounted cost of holding the tax rate fixed at `tau_const` from `s0`,
/// with the revenue funding the policy's instrument under a balanced budget.
///
/// Prevention uses the contact tax directly (`p = tau`). Treatment converts
/// revenue into a recovery subsidy `v = tau s / i`, which is infeasible as soon
/// as it exceeds one; for any positive rate this eventually happens as the
/// infection dies out, and the result is [`Error::Infeasible`].
pub fn constant_policy_cost(
    params: &ModelParams,
    tau_const: f64,
    policy: Policy,
    s0: f64,
    opts: &IntegrationOptions,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&tau_const) {
        return Err(Error::Domain {
            what: "tau_const",
            value: tau_const,
            expected: "[0, 1]",
        });
    }
    if !(0.0..=1.0).contains(&s0) {
        return Err(Error::Domain {
            what: "s0",
            value: s0,
            expected: "[0, 1]",
        });
    }
    opts.validate()?;
    let i0 = 1.0 - s0;
    let (h, t_max, rho) = (opts.step, opts.t_max, params.rho);
    let n = (t_max / h).ceil() as usize;
    let time = |k: usize| (k as f64 * h).min(t_max);
    let mut total = 0.0;
    match policy {
        Policy::Prevention => {
            let taxed = params.with_policy(tau_const, 0.0)?;
            let f = |t: f64| -> Result<f64> {
                let i = closed_form_infected(t, i0, &taxed)?;
                Ok(0.5 * (i * (1.0 + tau_const)).powi(2) * (-rho * t).exp())
            };
            let mut prev = f(0.0)?;
            for k in 1..=n {
                let (t0, t1) = (time(k - 1), time(k));
                let next = f(t1)?;
                total += 0.5 * (t1 - t0) * (prev + next);
                prev = next;
            }
        }
        Policy::Treatment => {
            let (a, d) = (params.alpha, params.delta);
            // dI/dt with the subsidised recovery term d * v * i = d * tau * s
            let rhs = |i: f64| a * (1.0 - i) * i - d * i - d * tau_const * (1.0 - i);
            let loss =
                |t: f64, i: f64| 0.5 * (i + tau_const * (1.0 - i)).powi(2) * (-rho * t).exp();
            let check = |t: f64, i: f64| -> Result<()> {
                if i < 0.0 {
                    return Err(Error::Infeasible { t, value: i });
                }
                if tau_const > 0.0 && tau_const * (1.0 - i) > i {
                    let v = if i > 0.0 {
                        tau_const * (1.0 - i) / i
                    } else {
                        f64::INFINITY
                    };
                    return Err(Error::Infeasible { t, value: v });
                }
                Ok(())
            };
            let mut i = i0;
            check(0.0, i)?;
            let mut prev = loss(0.0, i);
            for k in 1..=n {
                let (t0, t1) = (time(k - 1), time(k));
                let dt = t1 - t0;
                let k1 = rhs(i);
                let k2 = rhs(i + 0.5 * dt * k1);
                let k3 = rhs(i + 0.5 * dt * k2);
                let k4 = rhs(i + dt * k3);
                i += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                check(t1, i)?;
                let next = loss(t1, i);
                total += 0.5 * dt * (prev + next);
                prev = next;
            }
        }
    }
    Ok(total)
}

/// `n` evenly spaced interior points of `(alpha - rho/2, 1.5 alpha - rho/2)`,
/// the recovery rates for which the prevention `E1` exists.
pub fn delta_grid(alpha: f64, rho: f64, n: usize) -> Result<Vec<f64>> {
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::Domain {
            what: "alpha",
            value: alpha,
            expected: "> 0",
        });
    }
    if n < 2 {
        return Err(Error::Domain {
            what: "n",
            value: n as f64,
            expected: ">= 2",
        });
    }
    let lo = alpha - rho / 2.0;
    let hi = 1.5 * alpha - rho / 2.0;
    let step = (hi - lo) / (n + 1) as f64;
    Ok((1..=n).map(|k| lo + k as f64 * step).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dominance {
    PreventionDominates,
    TreatmentDominates,
    Tie,
}

impl Dominance {
    pub fn from_costs(prevention: f64, treatment: f64, tie_threshold: f64) -> Self {
        let diff = prevention - treatment;
        if diff.abs() < tie_threshold {
            Dominance::Tie
        } else if diff < 0.0 {
            Dominance::PreventionDominates
        } else {
            Dominance::TreatmentDominates
        }
    }
}

impl std::fmt::Display for Dominance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Dominance::PreventionDominates => "PreventionDominates",
            Dominance::TreatmentDominates => "TreatmentDominates",
            Dominance::Tie => "Tie",
        })
    }
}

impl std::str::FromStr for Dominance {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "PreventionDominates" => Ok(Dominance::PreventionDominates),
            "TreatmentDominates" => Ok(Dominance::TreatmentDominates),
            "Tie" => Ok(Dominance::Tie),
            other => Err(format!("unknown verdict {other:?}")),
        }
    }
}

/// Optimal initial tax, long-run tax and cost for one policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicyOutcome {
    pub tau0: f64,
    pub tau_bar: f64,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub alpha: f64,
    pub delta: f64,
    pub prevention: Option<PolicyOutcome>,
    pub treatment: Option<PolicyOutcome>,
    pub verdict: Option<Dominance>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
}

/// Shoots the optimal path and evaluates its cost.
pub fn optimal_outcome(
    policy: Policy,
    params: &ModelParams,
    s0: f64,
    opts: &IntegrationOptions,
    sopts: &ShootingOptions,
) -> Result<(ShootingResult, PolicyOutcome)> {
    let shot = shoot(policy, params, s0, opts, sopts)?;
    let cost = social_cost(policy, &shot.trajectory, params)?;
    let outcome = PolicyOutcome {
        tau0: shot.tau0,
        tau_bar: shot.target.coords_tau.c,
        cost,
    };
    Ok((shot, outcome))
}

fn compare_row(
    alpha: f64,
    delta: f64,
    rho: f64,
    s0: f64,
    opts: &IntegrationOptions,
    sopts: &ShootingOptions,
) -> ComparisonRow {
    let mut row = ComparisonRow {
        alpha,
        delta,
        prevention: None,
        treatment: None,
        verdict: None,
        errors: Vec::new(),
    };
    let params = match ModelParams::controlled(alpha, delta, rho) {
        Ok(p) => p,
        Err(e) => {
            row.errors.push(e.to_string());
            return row;
        }
    };
    for policy in Policy::ALL {
        match optimal_outcome(policy, &params, s0, opts, sopts) {
            Ok((_, outcome)) => match policy {
                Policy::Prevention => row.prevention = Some(outcome),
                Policy::Treatment => row.treatment = Some(outcome),
            },
            Err(e) => row.errors.push(format!("{policy}: {e}")),
        }
    }
    if let (Some(p), Some(t)) = (row.prevention, row.treatment) {
        row.verdict = Some(Dominance::from_costs(p.cost, t.cost, TIE_THRESHOLD));
    }
    row
}

/// Runs both policies for every `(alpha, delta)` pair in parallel. Failures
/// are recorded in the row's `errors` rather than aborting the batch.
pub fn compare(
    params_list: &[(f64, f64)],
    rho: f64,
    s0: f64,
    opts: &IntegrationOptions,
    sopts: &ShootingOptions,
) -> Vec<ComparisonRow> {
    params_list
        .par_iter()
        .map(|&(alpha, delta)| compare_row(alpha, delta, rho, s0, opts, sopts))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::Termination;

    fn params(alpha: f64, delta: f64) -> ModelParams {
        ModelParams::controlled(alpha, delta, 0.04).unwrap()
    }

    fn flat(kind: SystemKind, x: PhasePoint, n: usize) -> Trajectory {
        Trajectory {
            times: (0..n).map(|k| k as f64 * 0.01).collect(),
            states: vec![x; n],
            termination: Termination::ReachedTMax,
            policy_kind: kind,
        }
    }

    #[test]
    fn zero_loss_paths_cost_nothing() {
        let p = params(0.2, 0.2);
        let t = flat(SystemKind::Prevention, PhasePoint::new(1.0, 0.8), 100);
        assert_eq!(social_cost_prevention(&t, &p).unwrap(), 0.0);
        let t = flat(SystemKind::Treatment, PhasePoint::new(0.9, 0.0), 100);
        assert_eq!(social_cost_treatment(&t, &p).unwrap(), 0.0);
    }

    #[test]
    fn trapezoid_matches_exact_integral() {
        // constant loss 1/2: integral of e^{-rho t}/2 on [0, 1]
        let p = params(0.2, 0.2);
        let t = flat(SystemKind::Treatment, PhasePoint::new(0.5, 1.0), 101);
        let exact = 0.5 * (1.0 - (-0.04f64).exp()) / 0.04;
        assert!((social_cost_treatment(&t, &p).unwrap() - exact).abs() < 1e-8);
    }

    #[test]
    fn kind_mismatch() {
        let p = params(0.2, 0.2);
        let t = flat(SystemKind::Treatment, PhasePoint::new(0.5, 0.1), 3);
        assert!(matches!(
            social_cost_prevention(&t, &p),
            Err(Error::KindMismatch { .. })
        ));
        let t = flat(SystemKind::Baseline, PhasePoint::new(0.5, 0.1), 3);
        assert!(matches!(
            social_cost_treatment(&t, &p),
            Err(Error::KindMismatch { .. })
        ));
    }

    #[test]
    fn tau_form_identity() {
        for &(s, tau) in &[(0.96, 0.03), (0.5, 0.9), (0.999, 0.0), (0.2, 1.0)] {
            let phi = crate::control::phi_from_tau(s, tau);
            let a = treatment_loss(PhasePoint::new(s, phi));
            let b = treatment_loss_tau(s, tau);
            assert!((a - b).abs() < 1e-14, "{a} {b}");
        }
    }

    #[test]
    fn delta_grid_bounds() {
        let g = delta_grid(0.2, 0.04, 9).unwrap();
        assert_eq!(g.len(), 9);
        assert!(g.iter().all(|&d| d > 0.18 && d < 0.28));
        assert!((g[4] - 0.23).abs() < 1e-12);
        let g = delta_grid(0.6, 0.04, 2).unwrap();
        assert!(g[0] > 0.58 && g[1] < 0.88);
        assert!(delta_grid(0.0, 0.04, 5).is_err());
        assert!(delta_grid(0.2, 0.04, 1).is_err());
    }

    #[test]
    fn constant_policy_trivial_cases() {
        let opts = IntegrationOptions::default();
        let p = params(0.2, 0.2);
        assert_eq!(
            constant_policy_cost(&p, 0.0, Policy::Prevention, 1.0, &opts).unwrap(),
            0.0
        );
        let none = constant_policy_cost(&p, 0.0, Policy::Prevention, 0.96, &opts).unwrap();
        let none_t = constant_policy_cost(&p, 0.0, Policy::Treatment, 0.96, &opts).unwrap();
        assert!((none - none_t).abs() < 1e-8);
        assert!(none >= 0.0071);
        assert!(matches!(
            constant_policy_cost(&p, 0.5, Policy::Treatment, 0.96, &opts),
            Err(Error::Infeasible { .. })
        ));
        assert!(constant_policy_cost(&p, 1.5, Policy::Prevention, 0.96, &opts).is_err());
    }

    #[test]
    fn dominance_thresholds() {
        use Dominance::*;
        assert_eq!(
            Dominance::from_costs(0.0077, 0.0081, TIE_THRESHOLD),
            PreventionDominates
        );
        assert_eq!(
            Dominance::from_costs(0.0046, 0.0041, TIE_THRESHOLD),
            TreatmentDominates
        );
        assert_eq!(
            Dominance::from_costs(0.002976387, 0.002975999, TIE_THRESHOLD),
            Tie
        );
        for v in [PreventionDominates, TreatmentDominates, Tie] {
            assert_eq!(v.to_string().parse::<Dominance>().unwrap(), v);
        }
    }

    #[test]
    fn compare_keeps_order_and_records_errors() {
        let opts = IntegrationOptions::default();
        let rows = compare(
            &[(0.2, 0.26), (0.2, 0.4), (0.2, 0.185)],
            0.04,
            0.96,
            &opts,
            &ShootingOptions::default(),
        );
        assert_eq!(rows[0].delta, 0.26);
        assert_eq!(rows[0].verdict, Some(Dominance::TreatmentDominates));
        assert!(rows[1].prevention.is_none() && rows[1].verdict.is_none());
        assert!(!rows[1].errors.is_empty());
        assert_eq!(rows[2].verdict, Some(Dominance::PreventionDominates));
    }
}
