//! Saddle-path shooting for the optimal tax path.
//!
//! The disease-free equilibrium `E1` of either policy system is a saddle, so
//! for a given initial susceptible share exactly one initial control value
//! puts the state on the stable manifold. That value is found by bisection on
//! the initial control: every guess is integrated forward and classified as
//! undershooting (`S` turns back down), overshooting (the control runs away
//! above the manifold, or `S` passes 1) or converged (the state enters the
//! `eps_conv` ball around `E1`).
//!
//! Bisection runs down to floating-point resolution. Even then, the unstable
//! direction amplifies rounding error, and a single shot can leave the
//! manifold before reaching the convergence ball. The shot is then restarted
//! from a point partway along the accepted segment (where the distance to
//! `E1` is the geometric mean of the segment's initial and closest distance),
//! re-bisecting the control at the current `S`. The concatenated segments
//! form the returned trajectory.

use serde::{Deserialize, Serialize};

use crate::control::{equilibria, tau_from_phi, EquilibriumReport, PhasePoint, Policy};
use crate::epidemic::ModelParams;
use crate::error::{Error, Result};
use crate::integrate::{
    integrate, Crossing, Event, IntegrationOptions, Reversed, SystemKind, Termination, Trajectory,
};

pub const CONVERGED: &str = "converged";
pub const TOO_HIGH: &str = "too_high";
pub const TOO_LOW: &str = "too_low";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingOptions {
    /// Radius (max-norm) of the convergence ball around `E1`.
    pub eps_conv: f64,
    /// Prevention overshoot margin above the long-run tax rate.
    pub eps_overshoot: f64,
    /// Distance from `E1` at which the backward manifold trace is seeded.
    pub eps_seed: f64,
    /// Bisection stops once the bracket is this narrow, or when no
    /// floating-point value lies strictly inside it. Zero means the latter.
    pub bracket_tol: f64,
    /// Upper bound on restarted shooting stages.
    pub max_stages: usize,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        Self {
            eps_conv: 1e-6,
            eps_overshoot: 1e-4,
            eps_seed: 1e-7,
            bracket_tol: 0.0,
            max_stages: 16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    TooLow,
    Converged,
    TooHigh,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::TooLow => "TooLow",
            Verdict::Converged => "Converged",
            Verdict::TooHigh => "TooHigh",
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShootingResult {
    pub policy: Policy,
    /// Optimal initial tax rate.
    pub tau0: f64,
    /// Optimal initial control coordinate (`tau0` for prevention, `phi0` for
    /// treatment).
    pub c0: f64,
    pub trajectory: Trajectory,
    pub target: EquilibriumReport,
    /// Width of the final bracket of the initial-point bisection.
    pub bracket_width: f64,
    /// `(guess, verdict)` for every guess of the initial-point bisection.
    pub classifier_log: Vec<(f64, Verdict)>,
    /// Number of shooting segments in the trajectory.
    pub stages: usize,
}

impl ShootingResult {
    /// Tax rate at every sample of the trajectory.
    pub fn tax_path(&self) -> Vec<f64> {
        self.trajectory
            .states
            .iter()
            .map(|&x| self.policy.tax_rate(x).unwrap_or(f64::NAN))
            .collect()
    }
}

/// The saddle `E1` of the given policy system, or a structure error when it is
/// absent or not a saddle.
pub fn saddle_target(policy: Policy, params: &ModelParams) -> Result<EquilibriumReport> {
    let (e1, _) = equilibria(policy, params);
    if let crate::control::Existence::Violated(cond) = &e1.exists {
        return Err(Error::Structure(format!(
            "{policy} E1 does not exist: {cond} is violated"
        )));
    }
    if !e1.is_saddle() {
        let what = match (&e1.classification, &e1.note) {
            (Some(c), _) => format!("{c:?}"),
            (None, Some(n)) => n.clone(),
            (None, None) => "unclassified".into(),
        };
        return Err(Error::Structure(format!(
            "{policy} E1 is not a saddle ({what})"
        )));
    }
    Ok(e1)
}

struct Shooter<'a> {
    policy: Policy,
    params: ModelParams,
    target: PhasePoint,
    opts: &'a IntegrationOptions,
    sopts: ShootingOptions,
}

struct Run {
    verdict: Verdict,
    trajectory: Trajectory,
}

/// Chosen control, its run, final bracket width and the guess log.
type Bisection = (f64, Run, f64, Vec<(f64, Verdict)>);

impl Shooter<'_> {
    fn new<'a>(
        policy: Policy,
        params: &ModelParams,
        opts: &'a IntegrationOptions,
        sopts: ShootingOptions,
    ) -> Result<(Shooter<'a>, EquilibriumReport)> {
        opts.validate()?;
        let report = saddle_target(policy, params)?;
        Ok((
            Shooter {
                policy,
                params: *params,
                target: report.coords,
                opts,
                sopts,
            },
            report,
        ))
    }

    fn bracket(&self, s: f64) -> (f64, f64) {
        match self.policy {
            Policy::Prevention => (0.0, self.target.c),
            // phi at tau = 0 and tau = 1
            Policy::Treatment => (1.0 - s, 1.0),
        }
    }

    fn ds(&self, x: PhasePoint) -> f64 {
        self.policy
            .rhs(x, &self.params)
            .map(|v| v[0])
            .unwrap_or(f64::NEG_INFINITY)
    }

    fn events(&self) -> Vec<Event> {
        let target = self.target;
        let eps = self.sopts.eps_conv;
        let converged = Event::new(CONVERGED, Crossing::Falling, move |x: PhasePoint| {
            x.distance(&target) - eps
        });
        let too_high = match self.policy {
            Policy::Prevention => {
                let ceiling = target.c + self.sopts.eps_overshoot;
                Event::new(TOO_HIGH, Crossing::Rising, move |x: PhasePoint| {
                    x.c - ceiling
                })
            }
            Policy::Treatment => Event::new(TOO_HIGH, Crossing::Rising, |x: PhasePoint| x.s - 1.0),
        };
        let (policy, params) = (self.policy, self.params);
        let too_low = Event::new(TOO_LOW, Crossing::Falling, move |x: PhasePoint| {
            policy
                .rhs(x, &params)
                .map(|v| v[0])
                .unwrap_or(f64::NEG_INFINITY)
        });
        vec![converged, too_high, too_low]
    }

    fn immediate(&self, x: PhasePoint) -> Option<Verdict> {
        if x.distance(&self.target) < self.sopts.eps_conv {
            return Some(Verdict::Converged);
        }
        let high = match self.policy {
            Policy::Prevention => x.c > self.target.c + self.sopts.eps_overshoot,
            Policy::Treatment => x.s > 1.0,
        };
        if high {
            return Some(Verdict::TooHigh);
        }
        if self.ds(x) <= 0.0 {
            return Some(Verdict::TooLow);
        }
        None
    }

    /// Undecided at the horizon: short of `S = 1` counts as a slow undershoot.
    fn verdict_at_horizon(&self, x: PhasePoint) -> Verdict {
        if x.distance(&self.target) < self.sopts.eps_conv {
            Verdict::Converged
        } else if x.s < 1.0 - self.sopts.eps_conv {
            Verdict::TooLow
        } else {
            let high = match self.policy {
                Policy::Prevention => x.c > self.target.c,
                Policy::Treatment => self.ds(x) > 0.0,
            };
            if high {
                Verdict::TooHigh
            } else {
                Verdict::TooLow
            }
        }
    }

    fn run(&self, start: PhasePoint, horizon: f64) -> Result<Run> {
        let kind = SystemKind::from(self.policy);
        if let Some(verdict) = self.immediate(start) {
            return Ok(Run {
                verdict,
                trajectory: Trajectory::constant(
                    start,
                    kind,
                    Termination::Event {
                        name: verdict_event(verdict).into(),
                        time: 0.0,
                    },
                ),
            });
        }
        let mut opts = self.opts.clone();
        opts.t_max = horizon;
        opts.events = self.events();
        let field = self.policy.field(self.params);
        let trajectory = match integrate(&field, start, &opts, kind) {
            Ok(traj) => traj,
            Err(Error::DomainBreach { partial, .. }) => {
                return Ok(Run {
                    verdict: Verdict::TooLow,
                    trajectory: *partial,
                })
            }
            Err(e) => return Err(e),
        };
        let verdict = match trajectory.event_name() {
            Some(CONVERGED) => Verdict::Converged,
            Some(TOO_HIGH) => Verdict::TooHigh,
            Some(TOO_LOW) => Verdict::TooLow,
            _ => self.verdict_at_horizon(trajectory.last().1),
        };
        Ok(Run {
            verdict,
            trajectory,
        })
    }

    /// Bisects the control at susceptible share `s`.
    fn bisect(&self, s: f64, horizon: f64) -> Result<Bisection> {
        let (mut lo, mut hi) = self.bracket(s);
        let mut log = Vec::new();
        let mut lo_run = self.run(PhasePoint::new(s, lo), horizon)?;
        log.push((lo, lo_run.verdict));
        if lo_run.verdict == Verdict::Converged {
            return Ok((lo, lo_run, 0.0, log));
        }
        let mut hi_run = self.run(PhasePoint::new(s, hi), horizon)?;
        log.push((hi, hi_run.verdict));
        if hi_run.verdict == Verdict::Converged {
            return Ok((hi, hi_run, 0.0, log));
        }
        if lo_run.verdict != Verdict::TooLow || hi_run.verdict != Verdict::TooHigh {
            return Err(Error::Bracket {
                lo,
                hi,
                verdict: format!("{} / {}", lo_run.verdict, hi_run.verdict),
            });
        }
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= self.sopts.bracket_tol {
                break;
            }
            let run = self.run(PhasePoint::new(s, mid), horizon)?;
            log.push((mid, run.verdict));
            match run.verdict {
                Verdict::Converged => return Ok((mid, run, hi - lo, log)),
                Verdict::TooLow => {
                    lo = mid;
                    lo_run = run;
                }
                Verdict::TooHigh => {
                    hi = mid;
                    hi_run = run;
                }
            }
        }
        let width = hi - lo;
        let closest = |r: &Run| {
            r.trajectory
                .states
                .iter()
                .map(|x| x.distance(&self.target))
                .fold(f64::INFINITY, f64::min)
        };
        if closest(&lo_run) <= closest(&hi_run) {
            Ok((lo, lo_run, width, log))
        } else {
            Ok((hi, hi_run, width, log))
        }
    }

    fn shoot(&self, s0: f64, report: EquilibriumReport) -> Result<ShootingResult> {
        let kind = SystemKind::from(self.policy);
        if s0 == 1.0 {
            let trajectory = Trajectory::constant(
                self.target,
                kind,
                Termination::Event {
                    name: CONVERGED.into(),
                    time: 0.0,
                },
            );
            return Ok(ShootingResult {
                policy: self.policy,
                tau0: report.coords_tau.c,
                c0: self.target.c,
                trajectory,
                target: report,
                bracket_width: 0.0,
                classifier_log: Vec::new(),
                stages: 0,
            });
        }

        let mut times = Vec::new();
        let mut states = Vec::new();
        let mut t_offset = 0.0;
        let mut s = s0;
        // control, bracket width and log of the first stage
        let mut first = None;
        let mut stages = 0;
        loop {
            stages += 1;
            let horizon = self.opts.t_max - t_offset;
            if horizon <= 0.0 {
                return Err(Error::NoConvergence {
                    stages,
                    closest: states
                        .last()
                        .map_or(f64::NAN, |x: &PhasePoint| x.distance(&self.target)),
                });
            }
            let (c, run, width, log) = self.bisect(s, horizon)?;
            if first.is_none() {
                first = Some((c, width, log));
            }
            let seg = run.trajectory;
            if run.verdict == Verdict::Converged {
                times.extend(seg.times.iter().map(|t| t + t_offset));
                states.extend_from_slice(&seg.states);
                break;
            }

            let dist: Vec<f64> = seg
                .states
                .iter()
                .map(|x| x.distance(&self.target))
                .collect();
            let (i_min, d_min) =
                dist.iter()
                    .copied()
                    .enumerate()
                    .fold(
                        (0, f64::INFINITY),
                        |acc, (i, d)| if d < acc.1 { (i, d) } else { acc },
                    );
            let d_start = dist[0];
            if i_min == 0 || stages >= self.sopts.max_stages {
                return Err(Error::NoConvergence {
                    stages,
                    closest: d_min,
                });
            }
            let restart_at = (d_start * d_min).sqrt();
            let cut = dist
                .iter()
                .position(|&d| d <= restart_at)
                .unwrap_or(i_min)
                .max(1);
            times.extend(seg.times[..cut].iter().map(|t| t + t_offset));
            states.extend_from_slice(&seg.states[..cut]);
            t_offset += seg.times[cut];
            s = seg.states[cut].s;
        }

        let end = *times.last().expect("non-empty");
        let trajectory = Trajectory {
            times,
            states,
            termination: Termination::Event {
                name: CONVERGED.into(),
                time: end,
            },
            policy_kind: kind,
        };
        let tau_max = trajectory
            .states
            .iter()
            .map(|&x| self.policy.tax_rate(x).unwrap_or(f64::NAN))
            .fold(f64::NEG_INFINITY, f64::max);
        if tau_max.is_nan() || tau_max > 1.0 {
            return Err(Error::Structure(format!(
                "{} shot path leaves the admissible tax range (max tau = {tau_max})",
                self.policy
            )));
        }
        let (c0, bracket_width, classifier_log) = first.expect("at least one stage");
        let tau0 = self.policy.tax_rate(PhasePoint::new(s0, c0))?;
        Ok(ShootingResult {
            policy: self.policy,
            tau0,
            c0,
            trajectory,
            target: report,
            bracket_width,
            classifier_log,
            stages,
        })
    }
}

fn verdict_event(v: Verdict) -> &'static str {
    match v {
        Verdict::TooLow => TOO_LOW,
        Verdict::Converged => CONVERGED,
        Verdict::TooHigh => TOO_HIGH,
    }
}

fn check_s0(s0: f64) -> Result<()> {
    if s0 > 0.0 && s0 <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "s0",
            value: s0,
            expected: "(0, 1]",
        })
    }
}

/// Shoots for the optimal path of either policy.
pub fn shoot(
    policy: Policy,
    params: &ModelParams,
    s0: f64,
    opts: &IntegrationOptions,
    sopts: &ShootingOptions,
) -> Result<ShootingResult> {
    check_s0(s0)?;
    let (shooter, report) = Shooter::new(policy, params, opts, *sopts)?;
    shooter.shoot(s0, report)
}

pub fn shoot_prevention(
    params: &ModelParams,
    s0: f64,
    opts: &IntegrationOptions,
) -> Result<ShootingResult> {
    shoot(
        Policy::Prevention,
        params,
        s0,
        opts,
        &ShootingOptions::default(),
    )
}

pub fn shoot_treatment(
    params: &ModelParams,
    s0: f64,
    opts: &IntegrationOptions,
) -> Result<ShootingResult> {
    shoot(
        Policy::Treatment,
        params,
        s0,
        opts,
        &ShootingOptions::default(),
    )
}

/// Verdict of a single forward run from `(s0, guess)`.
pub fn classify_guess(
    policy: Policy,
    params: &ModelParams,
    s0: f64,
    guess: f64,
    opts: &IntegrationOptions,
    sopts: &ShootingOptions,
) -> Result<Verdict> {
    check_s0(s0)?;
    let (shooter, _) = Shooter::new(policy, params, opts, *sopts)?;
    Ok(shooter.run(PhasePoint::new(s0, guess), opts.t_max)?.verdict)
}

/// The bisection bracket for the initial control at `s0`.
pub fn initial_bracket(policy: Policy, params: &ModelParams, s0: f64) -> Result<(f64, f64)> {
    let report = saddle_target(policy, params)?;
    Ok(match policy {
        Policy::Prevention => (0.0, report.coords.c),
        Policy::Treatment => (1.0 - s0, 1.0),
    })
}

const MANIFOLD_S_FLOOR: f64 = 1e-3;
const MANIFOLD_C_LIMIT: f64 = 50.0;

fn trace_manifold(
    params: &ModelParams,
    policy: Policy,
    opts: &IntegrationOptions,
    sopts: &ShootingOptions,
    extra: Vec<Event>,
) -> Result<Trajectory> {
    let report = saddle_target(policy, params)?;
    let v = report
        .stable_eigenvector
        .ok_or_else(|| Error::Structure("saddle without stable eigenvector".into()))?;
    // the eigenvector points into S > 1; step the other way into the feasible region
    let seed = PhasePoint::new(
        report.coords.s - sopts.eps_seed * v[0],
        report.coords.c - sopts.eps_seed * v[1],
    );
    let mut opts = opts.clone();
    opts.events = extra;
    opts.events
        .push(Event::new("s_floor", Crossing::Falling, |x: PhasePoint| {
            x.s - MANIFOLD_S_FLOOR
        }));
    opts.events
        .push(Event::new("c_limit", Crossing::Rising, |x: PhasePoint| {
            x.c.abs() - MANIFOLD_C_LIMIT
        }));
    let field = Reversed(policy.field(*params));
    match integrate(&field, seed, &opts, SystemKind::from(policy)) {
        Ok(traj) => Ok(traj),
        Err(Error::DomainBreach { partial, .. }) => Ok(*partial),
        Err(e) => Err(e),
    }
}

/// Traces the stable manifold of `E1` by integrating the system in reversed
/// time from a seed `eps_seed` away from `E1` along the stable eigenvector,
/// on the `S < 1` side. Stops after `arc_length` of (Euclidean) path length,
/// at `opts.t_max` of backward time, or when the trace leaves the plotted
/// region. Times in the result are backward times.
pub fn stable_manifold_backward(
    params: &ModelParams,
    policy: Policy,
    arc_length: f64,
    opts: &IntegrationOptions,
    sopts: &ShootingOptions,
) -> Result<Trajectory> {
    if arc_length.is_nan() || arc_length <= 0.0 {
        return Err(Error::Domain {
            what: "arc_length",
            value: arc_length,
            expected: "> 0",
        });
    }
    let mut traj = trace_manifold(params, policy, opts, sopts, Vec::new())?;
    let mut travelled = 0.0;
    for k in 1..traj.len() {
        let (a, b) = (traj.states[k - 1], traj.states[k]);
        travelled += (b.s - a.s).hypot(b.c - a.c);
        if travelled >= arc_length {
            let time = traj.times[k];
            traj.truncate(
                k,
                Termination::Event {
                    name: "arc_length".into(),
                    time,
                },
            );
            break;
        }
    }
    Ok(traj)
}

/// Control coordinate of the stable manifold at susceptible share `s0`,
/// by linear interpolation along the backward trace.
pub fn manifold_control_at(
    params: &ModelParams,
    policy: Policy,
    s0: f64,
    opts: &IntegrationOptions,
    sopts: &ShootingOptions,
) -> Result<f64> {
    check_s0(s0)?;
    let report = saddle_target(policy, params)?;
    if s0 == 1.0 {
        return Ok(report.coords.c);
    }
    let reach = Event::new("reached_s0", Crossing::Falling, move |x: PhasePoint| {
        x.s - s0
    });
    let traj = trace_manifold(params, policy, opts, sopts, vec![reach])?;
    if traj.event_name() != Some("reached_s0") {
        return Err(Error::Structure(format!(
            "stable manifold trace did not reach S = {s0}"
        )));
    }
    let n = traj.len();
    if n < 2 {
        return Ok(traj.states[0].c);
    }
    let (a, b) = (traj.states[n - 2], traj.states[n - 1]);
    let w = (s0 - a.s) / (b.s - a.s);
    Ok(a.c + w * (b.c - a.c))
}

/// Initial tax rate read off the backward manifold trace.
pub fn manifold_tau0(
    params: &ModelParams,
    policy: Policy,
    s0: f64,
    opts: &IntegrationOptions,
    sopts: &ShootingOptions,
) -> Result<f64> {
    let c = manifold_control_at(params, policy, s0, opts, sopts)?;
    match policy {
        Policy::Prevention => Ok(c),
        Policy::Treatment => tau_from_phi(s0, c),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(alpha: f64, delta: f64) -> ModelParams {
        ModelParams::controlled(alpha, delta, 0.04).unwrap()
    }

    #[test]
    fn prevention_reference_rows() {
        let opts = IntegrationOptions::default();
        let r = shoot_prevention(&params(0.2, 0.2), 0.96, &opts).unwrap();
        assert!((r.tau0 - 0.7074).abs() < 5e-5, "{}", r.tau0);
        assert!(r.bracket_width <= 1e-10);
        let (_, end) = r.trajectory.last();
        assert!(end.distance(&r.target.coords) < 1e-6);

        let r = shoot_prevention(&params(0.3, 0.4), 0.96, &opts).unwrap();
        assert!((r.tau0 - 0.0801).abs() < 5e-5, "{}", r.tau0);
    }

    #[test]
    fn treatment_reference_rows() {
        let opts = IntegrationOptions::default();
        let r = shoot_treatment(&params(0.2, 0.2), 0.96, &opts).unwrap();
        assert!((r.tau0 - 0.0299).abs() < 5e-5, "{}", r.tau0);
        assert!((r.c0 - (0.04 + 0.96 * r.tau0)).abs() < 1e-15);
        let r = shoot_treatment(&params(0.6, 0.8), 0.96, &opts).unwrap();
        assert!((r.tau0 - 0.0162).abs() < 5e-5, "{}", r.tau0);
        let (_, end) = r.trajectory.last();
        assert!(end.distance(&r.target.coords) < 1e-6);
    }

    #[test]
    fn start_at_equilibrium() {
        let opts = IntegrationOptions::default();
        let p = params(0.2, 0.2);
        let r = shoot_prevention(&p, 1.0, &opts).unwrap();
        assert!((r.tau0 - 0.8).abs() < 1e-12);
        assert_eq!(r.trajectory.len(), 1);
        let r = shoot_treatment(&p, 1.0, &opts).unwrap();
        assert_eq!((r.tau0, r.c0), (0.0, 0.0));
    }

    #[test]
    fn structure_errors() {
        let opts = IntegrationOptions::default();
        // 2 delta + rho > 3 alpha: E1 absent
        let r = shoot_prevention(&params(0.2, 0.4), 0.96, &opts);
        assert!(matches!(r, Err(Error::Structure(_))), "{r:?}");
        // alpha < rho: treatment E1 is not a saddle
        let r = shoot_treatment(&params(0.03, 0.02), 0.96, &opts);
        assert!(matches!(r, Err(Error::Structure(_))), "{r:?}");
        assert!(shoot_prevention(&params(0.2, 0.2), 0.0, &opts).is_err());
        assert!(shoot_prevention(&params(0.2, 0.2), 1.2, &opts).is_err());
    }

    #[test]
    fn bracket_error_when_no_sign_change() {
        // a horizon too short to decide anything leaves both ends TooLow
        let opts = IntegrationOptions::default().with_t_max(1e-4);
        let r = shoot_prevention(&params(0.2, 0.2), 0.96, &opts);
        assert!(matches!(r, Err(Error::Bracket { .. })), "{r:?}");
    }

    #[test]
    fn classifier_log_brackets_answer() {
        let opts = IntegrationOptions::default();
        let r = shoot_prevention(&params(0.2, 0.26), 0.96, &opts).unwrap();
        for &(guess, verdict) in &r.classifier_log {
            match verdict {
                Verdict::TooLow => assert!(guess <= r.tau0),
                Verdict::TooHigh => assert!(guess >= r.tau0),
                Verdict::Converged => {}
            }
        }
        assert!(r.classifier_log.len() > 40);
    }

    #[test]
    fn manifold_eigenvector_geometry() {
        let opts = IntegrationOptions::default();
        let sopts = ShootingOptions::default();
        let p = params(0.2, 0.2);
        let prev = stable_manifold_backward(&p, Policy::Prevention, 0.2, &opts, &sopts).unwrap();
        for w in prev.states.windows(2) {
            assert!(w[1].s < w[0].s && w[1].c < w[0].c);
        }
        let treat = stable_manifold_backward(&p, Policy::Treatment, 0.2, &opts, &sopts).unwrap();
        for w in treat.states.windows(2) {
            assert!(w[1].s < w[0].s && w[1].c > w[0].c);
        }
        assert_eq!(treat.event_name(), Some("arc_length"));
    }

    #[test]
    fn manifold_passes_near_shot_point() {
        let opts = IntegrationOptions::default();
        let sopts = ShootingOptions::default();
        let tau =
            manifold_tau0(&params(0.2, 0.2), Policy::Prevention, 0.96, &opts, &sopts).unwrap();
        assert!((tau - 0.7074).abs() < 1e-3);
    }
}
