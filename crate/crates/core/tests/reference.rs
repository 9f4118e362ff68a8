mod common;

use common::{REFERENCE, RHO, S0};
use epipolicy::control::{phi_from_tau, Policy};
use epipolicy::cost::{
    compare, optimal_outcome, social_cost_treatment, social_cost_treatment_tau_form, TABLE2_ROWS,
};
use epipolicy::records::round4;
use epipolicy::shoot::{classify_guess, initial_bracket, shoot};
use epipolicy::{Dominance, IntegrationOptions, Method, ModelParams, ShootingOptions, Verdict};

fn params(alpha: f64, delta: f64) -> ModelParams {
    ModelParams::controlled(alpha, delta, RHO).unwrap()
}

fn outcome(policy: Policy, alpha: f64, delta: f64) -> epipolicy::PolicyOutcome {
    optimal_outcome(
        policy,
        &params(alpha, delta),
        S0,
        &IntegrationOptions::default(),
        &ShootingOptions::default(),
    )
    .unwrap()
    .1
}

#[test]
fn printed_costs_at_four_decimals() {
    assert_eq!(round4(outcome(Policy::Prevention, 0.2, 0.2).cost), 0.0071);
    assert_eq!(round4(outcome(Policy::Treatment, 0.2, 0.2).cost), 0.0070);
}

#[test]
fn near_tie_row_costs() {
    let p = outcome(Policy::Prevention, 0.5, 0.5).cost;
    let t = outcome(Policy::Treatment, 0.5, 0.5).cost;
    assert!((p / 0.002976387 - 1.0).abs() < 0.05, "{p}");
    assert!((t / 0.002975999 - 1.0).abs() < 0.05, "{t}");
    assert!(t < p);
}

#[test]
fn shoot_example_prevention() {
    let r = outcome(Policy::Prevention, 0.3, 0.281);
    assert!((r.tau0 - 0.9096).abs() < 5e-4, "{}", r.tau0);
    assert!((r.tau_bar - 0.993).abs() < 5e-4);
}

/// The printed treatment column holds the initial tax on seven rows and the
/// initial control `phi0 = 1 - S0 + tau0 S0` on the other eight.
#[test]
fn reference_treatment_column_mixes_tau0_and_phi0() {
    let mut as_phi = Vec::new();
    for r in &REFERENCE {
        let tau0 = outcome(Policy::Treatment, r.alpha, r.delta).tau0;
        let phi0 = phi_from_tau(S0, tau0);
        if (tau0 - r.treat_tau0).abs() < 5e-4 {
            continue;
        }
        assert!(
            (phi0 - r.treat_tau0).abs() < 5e-4,
            "({}, {}): tau0 {tau0:.4} phi0 {phi0:.4} printed {}",
            r.alpha,
            r.delta,
            r.treat_tau0
        );
        as_phi.push((r.alpha, r.delta));
    }
    assert_eq!(as_phi.len(), 8, "{as_phi:?}");
}

#[test]
fn dominance_pattern() {
    let rows = compare(
        &TABLE2_ROWS,
        RHO,
        S0,
        &IntegrationOptions::default(),
        &ShootingOptions::default(),
    );
    for (row, r) in rows.iter().zip(&REFERENCE) {
        assert_eq!((row.alpha, row.delta), (r.alpha, r.delta));
        let v = row.verdict.unwrap();
        if r.delta < r.alpha {
            assert!(
                v == Dominance::PreventionDominates || v == Dominance::Tie,
                "({}, {}) {v}",
                r.alpha,
                r.delta
            );
        } else {
            assert_eq!(
                v,
                Dominance::TreatmentDominates,
                "({}, {})",
                r.alpha,
                r.delta
            );
        }
    }
    assert_eq!(rows[0].verdict, Some(Dominance::PreventionDominates));
    assert_eq!(rows[2].verdict, Some(Dominance::TreatmentDominates));
}

#[test]
fn cost_grows_with_initial_infection() {
    let opts = IntegrationOptions::default();
    let sopts = ShootingOptions::default();
    for &(alpha, delta) in &[(0.2, 0.2), (0.6, 0.8)] {
        for policy in Policy::ALL {
            let costs: Vec<f64> = [0.98, 0.97, 0.96, 0.95, 0.94]
                .iter()
                .map(|&s0| {
                    optimal_outcome(policy, &params(alpha, delta), s0, &opts, &sopts)
                        .unwrap()
                        .1
                        .cost
                })
                .collect();
            assert!(costs.iter().all(|&c| c > 0.0));
            assert!(costs.windows(2).all(|w| w[1] > w[0]), "{policy} {costs:?}");
        }
    }
}

#[test]
fn truncated_tail_is_negligible() {
    let sopts = ShootingOptions::default();
    for policy in Policy::ALL {
        let p = params(0.2, 0.185);
        let short = optimal_outcome(policy, &p, S0, &IntegrationOptions::default(), &sopts)
            .unwrap()
            .1;
        let long = optimal_outcome(
            policy,
            &p,
            S0,
            &IntegrationOptions::default().with_t_max(800.0),
            &sopts,
        )
        .unwrap()
        .1;
        assert!((short.cost - long.cost).abs() < 1e-6, "{policy}");
    }
}

#[test]
fn treatment_cost_identity_on_shot_path() {
    let p = params(0.4, 0.4);
    let shot = shoot(
        Policy::Treatment,
        &p,
        S0,
        &IntegrationOptions::default(),
        &ShootingOptions::default(),
    )
    .unwrap();
    let a = social_cost_treatment(&shot.trajectory, &p).unwrap();
    let b = social_cost_treatment_tau_form(&shot.trajectory, &p).unwrap();
    assert!((a - b).abs() < 1e-10, "{a} {b}");
}

#[test]
fn guesses_are_classified_monotonically() {
    let opts = IntegrationOptions::default();
    let sopts = ShootingOptions::default();
    for policy in Policy::ALL {
        let p = params(0.3, 0.3);
        let (lo, hi) = initial_bracket(policy, &p, S0).unwrap();
        let rank = |v: Verdict| match v {
            Verdict::TooLow => 0,
            Verdict::Converged => 1,
            Verdict::TooHigh => 2,
        };
        let ranks: Vec<u8> = (0..200)
            .map(|k| {
                let g = lo + (hi - lo) * k as f64 / 199.0;
                rank(classify_guess(policy, &p, S0, g, &opts, &sopts).unwrap())
            })
            .collect();
        assert!(ranks.windows(2).all(|w| w[0] <= w[1]), "{policy}");
        assert_eq!((ranks[0], ranks[199]), (0, 2));
    }
}

#[test]
fn adaptive_integration_agrees() {
    let fixed = IntegrationOptions::default();
    let adaptive = IntegrationOptions::default().with_method(Method::Rk45);
    let sopts = ShootingOptions::default();
    for policy in Policy::ALL {
        let p = params(0.4, 0.5);
        let a = shoot(policy, &p, S0, &fixed, &sopts).unwrap();
        let b = shoot(policy, &p, S0, &adaptive, &sopts).unwrap();
        assert!(
            (a.tau0 - b.tau0).abs() < 1e-6,
            "{policy}: {} {}",
            a.tau0,
            b.tau0
        );
        for (t, x) in b.trajectory.iter().step_by(5) {
            if let Some(y) = a.trajectory.interpolate(t) {
                assert!(
                    (x.s - y.s).abs() < 1e-4 && (x.c - y.c).abs() < 1e-4,
                    "{policy} t={t}"
                );
            }
        }
    }
}

/// Far enough from `E1` the saddle path starts below a zero tax, which is
/// outside the admissible range: the bracket cannot contain it.
#[test]
fn saddle_path_below_zero_tax_is_a_bracket_error() {
    let p = params(0.6, 0.8);
    let r = shoot(
        Policy::Prevention,
        &p,
        0.9,
        &IntegrationOptions::default(),
        &ShootingOptions::default(),
    );
    assert!(matches!(r, Err(epipolicy::Error::Bracket { .. })), "{r:?}");
    let traced = epipolicy::shoot::manifold_tau0(
        &p,
        Policy::Prevention,
        0.9,
        &IntegrationOptions::default(),
        &ShootingOptions::default(),
    )
    .unwrap();
    assert!(traced < 0.0);
}
