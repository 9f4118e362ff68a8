//! Explicit Runge-Kutta integration of autonomous planar systems.
//!
//! Two methods are available: classical RK4 with a fixed step, and the
//! Dormand-Prince 5(4) pair with adaptive step control. Every accepted step is
//! stored. Integration stops at `t_max` or at the first event whose predicate
//! changes sign in the declared direction; the crossing time is refined by
//! bisection over a re-taken partial step.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::control::Policy;
use crate::error::{Error, Result};
use crate::PhasePoint;

/// Time accuracy of event location.
pub const EVENT_TIME_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Rk4,
    Rk45,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Crossing {
    /// Predicate goes from negative to non-negative.
    Rising,
    /// Predicate goes from positive to non-positive.
    Falling,
    Either,
}

impl Crossing {
    fn crossed(self, before: f64, after: f64) -> bool {
        let rising = before < 0.0 && after >= 0.0;
        let falling = before > 0.0 && after <= 0.0;
        match self {
            Crossing::Rising => rising,
            Crossing::Falling => falling,
            Crossing::Either => rising || falling,
        }
    }
}

pub type Predicate = Arc<dyn Fn(PhasePoint) -> f64 + Send + Sync>;

/// A terminal event: integration stops when `predicate` crosses zero in the
/// given direction.
#[derive(Clone)]
pub struct Event {
    pub name: String,
    pub direction: Crossing,
    pub predicate: Predicate,
}

impl Event {
    pub fn new(
        name: impl Into<String>,
        direction: Crossing,
        predicate: impl Fn(PhasePoint) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            direction,
            predicate: Arc::new(predicate),
        }
    }
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Event")
            .field("name", &self.name)
            .field("direction", &self.direction)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub struct IntegrationOptions {
    /// Fixed step (RK4) or initial step (RK45).
    pub step: f64,
    pub method: Method,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub t_max: f64,
    pub events: Vec<Event>,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self {
            step: 0.01,
            method: Method::Rk4,
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            t_max: 400.0,
            events: Vec::new(),
        }
    }
}

impl IntegrationOptions {
    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_t_max(mut self, t_max: f64) -> Self {
        self.t_max = t_max;
        self
    }

    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_event(mut self, event: Event) -> Self {
        self.events.push(event);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::Options("step must be positive"));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(Error::Options("t_max must be positive"));
        }
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::Options("tolerances must be positive"));
        }
        Ok(())
    }
}

/// Which vector field produced a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Baseline,
    Prevention,
    Treatment,
}

impl SystemKind {
    pub fn name(self) -> &'static str {
        match self {
            SystemKind::Baseline => "baseline",
            SystemKind::Prevention => "prevention",
            SystemKind::Treatment => "treatment",
        }
    }
}

impl From<Policy> for SystemKind {
    fn from(policy: Policy) -> Self {
        match policy {
            Policy::Prevention => SystemKind::Prevention,
            Policy::Treatment => SystemKind::Treatment,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Termination {
    ReachedTMax,
    Event { name: String, time: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PhasePoint>,
    pub termination: Termination,
    pub policy_kind: SystemKind,
}

impl Trajectory {
    pub fn constant(x: PhasePoint, kind: SystemKind, termination: Termination) -> Self {
        Self {
            times: vec![0.0],
            states: vec![x],
            termination,
            policy_kind: kind,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> (f64, PhasePoint) {
        (
            *self
                .times
                .last()
                .expect("trajectory has at least one sample"),
            *self
                .states
                .last()
                .expect("trajectory has at least one sample"),
        )
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, PhasePoint)> + '_ {
        self.times.iter().copied().zip(self.states.iter().copied())
    }

    pub fn event_name(&self) -> Option<&str> {
        match &self.termination {
            Termination::Event { name, .. } => Some(name),
            Termination::ReachedTMax => None,
        }
    }

    /// Linear interpolation of the state at time `t`, `None` outside the
    /// sampled range.
    pub fn interpolate(&self, t: f64) -> Option<PhasePoint> {
        let first = *self.times.first()?;
        let last = *self.times.last()?;
        if t < first || t > last {
            return None;
        }
        let k = self.times.partition_point(|&x| x <= t);
        if k == 0 {
            return Some(self.states[0]);
        }
        if k == self.times.len() {
            return Some(self.states[k - 1]);
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let w = (t - t0) / (t1 - t0);
        let (a, b) = (self.states[k - 1], self.states[k]);
        Some(PhasePoint::new(
            a.s + w * (b.s - a.s),
            a.c + w * (b.c - a.c),
        ))
    }

    /// Drops every sample after index `keep` (inclusive bound) and records the
    /// given termination.
    pub fn truncate(&mut self, keep: usize, termination: Termination) {
        self.times.truncate(keep + 1);
        self.states.truncate(keep + 1);
        self.termination = termination;
    }
}

/// Autonomous planar vector field `x -> dx/dt`.
pub trait PlanarField {
    fn eval(&self, x: PhasePoint) -> Result<[f64; 2]>;
}

impl<F> PlanarField for F
where
    F: Fn(PhasePoint) -> Result<[f64; 2]>,
{
    fn eval(&self, x: PhasePoint) -> Result<[f64; 2]> {
        self(x)
    }
}

/// The same field run in reversed time.
pub struct Reversed<F>(pub F);

impl<F: PlanarField> PlanarField for Reversed<F> {
    fn eval(&self, x: PhasePoint) -> Result<[f64; 2]> {
        let [a, b] = self.0.eval(x)?;
        Ok([-a, -b])
    }
}

fn shift(x: PhasePoint, h: f64, k: [f64; 2]) -> PhasePoint {
    PhasePoint::new(x.s + h * k[0], x.c + h * k[1])
}

fn rk4_step<F: PlanarField + ?Sized>(field: &F, x: PhasePoint, h: f64) -> Result<PhasePoint> {
    let k1 = field.eval(x)?;
    let k2 = field.eval(shift(x, h / 2.0, k1))?;
    let k3 = field.eval(shift(x, h / 2.0, k2))?;
    let k4 = field.eval(shift(x, h, k3))?;
    Ok(PhasePoint::new(
        x.s + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        x.c + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ))
}

// Dormand-Prince 5(4) tableau. The fields are autonomous, so the node
// coefficients are not needed.
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_B_STAR: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand-Prince step: fifth-order solution and the embedded error
/// estimate.
fn dp_step<F: PlanarField + ?Sized>(
    field: &F,
    x: PhasePoint,
    h: f64,
) -> Result<(PhasePoint, [f64; 2])> {
    let mut k = [[0.0; 2]; 7];
    for stage in 0..7 {
        let mut ds = 0.0;
        let mut dc = 0.0;
        for (j, kj) in k.iter().enumerate().take(stage) {
            ds += DP_A[stage][j] * kj[0];
            dc += DP_A[stage][j] * kj[1];
        }
        k[stage] = field.eval(PhasePoint::new(x.s + h * ds, x.c + h * dc))?;
    }
    let mut hi = [0.0; 2];
    let mut err = [0.0; 2];
    for (stage, ks) in k.iter().enumerate() {
        for d in 0..2 {
            hi[d] += DP_B[stage] * ks[d];
            err[d] += (DP_B[stage] - DP_B_STAR[stage]) * ks[d];
        }
    }
    Ok((
        PhasePoint::new(x.s + h * hi[0], x.c + h * hi[1]),
        [h * err[0], h * err[1]],
    ))
}

fn advance<F: PlanarField + ?Sized>(
    field: &F,
    method: Method,
    x: PhasePoint,
    h: f64,
) -> Result<PhasePoint> {
    match method {
        Method::Rk4 => rk4_step(field, x, h),
        Method::Rk45 => dp_step(field, x, h).map(|(y, _)| y),
    }
}

struct Recorder {
    times: Vec<f64>,
    states: Vec<PhasePoint>,
    kind: SystemKind,
}

impl Recorder {
    fn breach(self, t: f64, source: Error) -> Error {
        Error::DomainBreach {
            t,
            reason: source.to_string(),
            partial: Box::new(Trajectory {
                times: self.times,
                states: self.states,
                termination: Termination::ReachedTMax,
                policy_kind: self.kind,
            }),
        }
    }

    fn finish(self, termination: Termination) -> Trajectory {
        Trajectory {
            times: self.times,
            states: self.states,
            termination,
            policy_kind: self.kind,
        }
    }
}

/// Checks the events over a step `x -> x_new` of length `h`. On a crossing,
/// returns the earliest located crossing as `(event index, offset, state)`,
/// where the state lies on the crossed side of the predicate.
fn locate_event<F: PlanarField + ?Sized>(
    field: &F,
    method: Method,
    events: &[Event],
    g_before: &[f64],
    x: PhasePoint,
    x_new: PhasePoint,
    h: f64,
) -> Result<Option<(usize, f64, PhasePoint)>> {
    let mut best: Option<(usize, f64, PhasePoint)> = None;
    for (idx, ev) in events.iter().enumerate() {
        let g_after = (ev.predicate)(x_new);
        if !ev.direction.crossed(g_before[idx], g_after) {
            continue;
        }
        let (mut lo, mut hi) = (0.0, h);
        let mut x_hi = x_new;
        while hi - lo > EVENT_TIME_TOL {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let x_mid = advance(field, method, x, mid)?;
            if ev.direction.crossed(g_before[idx], (ev.predicate)(x_mid)) {
                hi = mid;
                x_hi = x_mid;
            } else {
                lo = mid;
            }
        }
        if best.as_ref().is_none_or(|b| hi < b.1) {
            best = Some((idx, hi, x_hi));
        }
    }
    Ok(best)
}

/// Integrates `field` from `x0` at `t = 0` until `opts.t_max` or the first
/// triggered event.
///
/// A domain error raised by the field mid-flight aborts with
/// [`Error::DomainBreach`], which carries the samples accepted so far.
pub fn integrate<F: PlanarField + ?Sized>(
    field: &F,
    x0: PhasePoint,
    opts: &IntegrationOptions,
    kind: SystemKind,
) -> Result<Trajectory> {
    opts.validate()?;
    field.eval(x0)?;

    let mut rec = Recorder {
        times: vec![0.0],
        states: vec![x0],
        kind,
    };
    let mut g: Vec<f64> = opts.events.iter().map(|e| (e.predicate)(x0)).collect();
    let mut x = x0;
    let mut t = 0.0;

    match opts.method {
        Method::Rk4 => {
            let mut n: u64 = 0;
            loop {
                let remaining = opts.t_max - t;
                if remaining <= opts.step * 1e-9 {
                    break;
                }
                let h = opts.step.min(remaining);
                let x_new = match rk4_step(field, x, h) {
                    Ok(y) => y,
                    Err(e) => return Err(rec.breach(t, e)),
                };
                match locate_event(field, opts.method, &opts.events, &g, x, x_new, h) {
                    Err(e) => return Err(rec.breach(t, e)),
                    Ok(Some((idx, dt, x_ev))) => {
                        let t_ev = t + dt;
                        rec.times.push(t_ev);
                        rec.states.push(x_ev);
                        return Ok(rec.finish(Termination::Event {
                            name: opts.events[idx].name.clone(),
                            time: t_ev,
                        }));
                    }
                    Ok(None) => {}
                }
                n += 1;
                // index-based time avoids drift from repeated addition
                t = if h < opts.step {
                    opts.t_max
                } else {
                    n as f64 * opts.step
                };
                x = x_new;
                for (gi, ev) in g.iter_mut().zip(&opts.events) {
                    *gi = (ev.predicate)(x);
                }
                rec.times.push(t);
                rec.states.push(x);
            }
        }
        Method::Rk45 => {
            let mut h = opts.step.min(opts.t_max);
            loop {
                let remaining = opts.t_max - t;
                if remaining <= 1e-12 * opts.t_max {
                    break;
                }
                h = h.min(remaining);
                if h < 1e-13 * t.abs().max(1.0) {
                    return Err(Error::Stiffness { t, h });
                }
                let (x_new, err) = match dp_step(field, x, h) {
                    Ok(r) => r,
                    Err(e) => return Err(rec.breach(t, e)),
                };
                let scale = |a: f64, b: f64| opts.abs_tol + opts.rel_tol * a.abs().max(b.abs());
                let e0 = err[0] / scale(x.s, x_new.s);
                let e1 = err[1] / scale(x.c, x_new.c);
                let norm = ((e0 * e0 + e1 * e1) / 2.0).sqrt();
                if !norm.is_finite() || norm > 1.0 {
                    let factor = if norm.is_finite() {
                        (0.9 * norm.powf(-0.2)).max(0.2)
                    } else {
                        0.2
                    };
                    h *= factor;
                    continue;
                }
                match locate_event(field, opts.method, &opts.events, &g, x, x_new, h) {
                    Err(e) => return Err(rec.breach(t, e)),
                    Ok(Some((idx, dt, x_ev))) => {
                        let t_ev = t + dt;
                        rec.times.push(t_ev);
                        rec.states.push(x_ev);
                        return Ok(rec.finish(Termination::Event {
                            name: opts.events[idx].name.clone(),
                            time: t_ev,
                        }));
                    }
                    Ok(None) => {}
                }
                t = if h >= remaining { opts.t_max } else { t + h };
                x = x_new;
                for (gi, ev) in g.iter_mut().zip(&opts.events) {
                    *gi = (ev.predicate)(x);
                }
                rec.times.push(t);
                rec.states.push(x);
                let grow = if norm == 0.0 {
                    5.0
                } else {
                    (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
                };
                h *= grow;
            }
        }
    }
    Ok(rec.finish(Termination::ReachedTMax))
}
