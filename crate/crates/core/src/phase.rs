//! Phase-portrait data: sampled vector field, nullclines, equilibria and the
//! stable manifold of `E1`, ready for an external plotting tool.

use serde::{Deserialize, Serialize};

use crate::control::{equilibria, EquilibriumReport, PhasePoint, Policy};
use crate::epidemic::ModelParams;
use crate::error::{Error, Result};
use crate::integrate::IntegrationOptions;
use crate::shoot::{stable_manifold_backward, ShootingOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseOptions {
    pub s_range: (f64, f64),
    pub c_range: (f64, f64),
    /// Samples per axis for arrows; nullclines use ten times as many.
    pub grid: usize,
    pub manifold_arc_length: f64,
}

impl PhaseOptions {
    pub fn for_policy(policy: Policy) -> Self {
        let c_range = match policy {
            Policy::Prevention => (-0.5, 1.0),
            Policy::Treatment => (0.0, 1.0),
        };
        Self {
            s_range: (0.5, 1.05),
            c_range,
            grid: 21,
            manifold_arc_length: 1.5,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = |r: (f64, f64)| r.0.is_finite() && r.1.is_finite() && r.0 < r.1;
        if !ok(self.s_range) || !ok(self.c_range) {
            return Err(Error::Options("phase ranges must be finite with lo < hi"));
        }
        if self.s_range.0 <= 0.0 {
            return Err(Error::Options("phase S range must be positive"));
        }
        if self.grid < 2 {
            return Err(Error::Options(
                "phase grid needs at least 2 points per axis",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arrow {
    pub s: f64,
    pub c: f64,
    pub ds: f64,
    pub dc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Nullcline {
    /// `"S"` where the S-derivative vanishes, `"c"` for the control.
    pub variable: String,
    pub label: String,
    /// Polylines, split wherever the curve leaves the plotted window.
    pub segments: Vec<Vec<PhasePoint>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhasePortrait {
    pub policy: Policy,
    pub params: ModelParams,
    pub options: PhaseOptions,
    pub arrows: Vec<Arrow>,
    pub nullclines: Vec<Nullcline>,
    pub equilibria: Vec<EquilibriumReport>,
    pub manifold: Vec<PhasePoint>,
    pub warnings: Vec<String>,
}

fn linspace((lo, hi): (f64, f64), n: usize) -> impl Iterator<Item = f64> {
    let h = (hi - lo) / (n - 1) as f64;
    (0..n).map(move |k| lo + k as f64 * h)
}

pub fn vector_field_grid(policy: Policy, params: &ModelParams, opts: &PhaseOptions) -> Vec<Arrow> {
    let mut arrows = Vec::with_capacity(opts.grid * opts.grid);
    for s in linspace(opts.s_range, opts.grid) {
        for c in linspace(opts.c_range, opts.grid) {
            if let Ok([ds, dc]) = policy.rhs(PhasePoint::new(s, c), params) {
                arrows.push(Arrow { s, c, ds, dc });
            }
        }
    }
    arrows
}

fn in_window(x: PhasePoint, opts: &PhaseOptions) -> bool {
    x.s >= opts.s_range.0
        && x.s <= opts.s_range.1
        && x.c >= opts.c_range.0
        && x.c <= opts.c_range.1
        && x.c.is_finite()
}

/// Samples `c = f(s)` across the window and cuts it into visible pieces.
fn graph(f: impl Fn(f64) -> f64, opts: &PhaseOptions) -> Vec<Vec<PhasePoint>> {
    let mut segments = Vec::new();
    let mut current = Vec::new();
    for s in linspace(opts.s_range, 10 * opts.grid) {
        let x = PhasePoint::new(s, f(s));
        if in_window(x, opts) {
            current.push(x);
        } else if !current.is_empty() {
            segments.push(std::mem::take(&mut current));
        }
    }
    if current.len() > 1 {
        segments.push(current);
    }
    segments.retain(|seg| seg.len() > 1);
    segments
}

fn vertical(s: f64, opts: &PhaseOptions) -> Vec<Vec<PhasePoint>> {
    if s < opts.s_range.0 || s > opts.s_range.1 {
        return Vec::new();
    }
    vec![vec![
        PhasePoint::new(s, opts.c_range.0),
        PhasePoint::new(s, opts.c_range.1),
    ]]
}

fn horizontal(c: f64, opts: &PhaseOptions) -> Vec<Vec<PhasePoint>> {
    if c < opts.c_range.0 || c > opts.c_range.1 {
        return Vec::new();
    }
    vec![vec![
        PhasePoint::new(opts.s_range.0, c),
        PhasePoint::new(opts.s_range.1, c),
    ]]
}

fn nullcline(variable: &str, label: &str, segments: Vec<Vec<PhasePoint>>) -> Nullcline {
    Nullcline {
        variable: variable.into(),
        label: label.into(),
        segments,
    }
}

pub fn nullclines(policy: Policy, params: &ModelParams, opts: &PhaseOptions) -> Vec<Nullcline> {
    let ModelParams {
        alpha: a,
        delta: d,
        rho: r,
        ..
    } = *params;
    match policy {
        Policy::Prevention => vec![
            nullcline("S", "S = 1", vertical(1.0, opts)),
            nullcline(
                "S",
                "tau = 1 - delta/(alpha S)",
                graph(|s| 1.0 - d / (a * s), opts),
            ),
            nullcline("c", "tau = -1", horizontal(-1.0, opts)),
            nullcline(
                "c",
                "tau = 1 - (rho - 2 alpha S + delta + delta/S)/(alpha S)",
                graph(|s| 1.0 - (r - 2.0 * a * s + d + d / s) / (a * s), opts),
            ),
        ],
        Policy::Treatment => vec![
            nullcline(
                "S",
                "phi = alpha S (1 - S)/delta",
                graph(|s| a * s * (1.0 - s) / d, opts),
            ),
            nullcline("c", "phi = 0", horizontal(0.0, opts)),
            nullcline(
                "c",
                "S = (rho + alpha)/(2 alpha)",
                vertical((r + a) / (2.0 * a), opts),
            ),
        ],
    }
}

pub fn phase_portrait(
    policy: Policy,
    params: &ModelParams,
    opts: &PhaseOptions,
    int_opts: &IntegrationOptions,
    sopts: &ShootingOptions,
) -> Result<PhasePortrait> {
    opts.validate()?;
    let mut warnings = Vec::new();
    let (e1, e2) = equilibria(policy, params);
    let mut points = Vec::new();
    for e in [e1, e2] {
        match &e.exists {
            crate::control::Existence::Exists => points.push(e),
            crate::control::Existence::Violated(cond) => {
                warnings.push(format!("{policy} {} omitted: {cond} is violated", e.name))
            }
        }
    }
    let manifold =
        match stable_manifold_backward(params, policy, opts.manifold_arc_length, int_opts, sopts) {
            Ok(traj) => traj.states,
            Err(e) => {
                warnings.push(format!("stable manifold omitted: {e}"));
                Vec::new()
            }
        };
    Ok(PhasePortrait {
        policy,
        params: *params,
        options: *opts,
        arrows: vector_field_grid(policy, params, opts),
        nullclines: nullclines(policy, params, opts),
        equilibria: points,
        manifold,
        warnings,
    })
}
