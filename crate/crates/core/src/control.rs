//! Planar first-order-condition systems for the two single-instrument
//! policies.
//!
//! Prevention works in `(S, tau)`:
//!
//! ```text
//! dS/dt   = delta (1 - S) - alpha (1 - tau) S (1 - S)
//! dtau/dt = (1 + tau) [rho - 2 alpha S + delta - alpha (1 - tau) S + delta / S]
//! ```
//!
//! Treatment works in `(S, phi)` with `phi = 1 - S + tau S`:
//!
//! ```text
//! dS/dt   = delta phi - alpha S (1 - S)
//! dphi/dt = phi [rho + alpha (1 - 2 S)]
//! ```
//!
//! Both systems have the disease-free equilibrium `E1` at `S = 1` and an
//! interior equilibrium `E2` whose existence depends on the parameters.
//! Jacobians are the exact derivatives of the fields above; eigenvalues come
//! from the closed-form 2x2 characteristic polynomial.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::epidemic::ModelParams;
use crate::error::{Error, Result};

/// A point of a controlled planar system. `c` is the tax rate `tau` for
/// prevention and `phi` for treatment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub s: f64,
    pub c: f64,
}

impl PhasePoint {
    pub const fn new(s: f64, c: f64) -> Self {
        Self { s, c }
    }

    /// Max-norm distance.
    pub fn distance(&self, other: &PhasePoint) -> f64 {
        (self.s - other.s).abs().max((self.c - other.c).abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    Prevention,
    Treatment,
}

impl Policy {
    pub const ALL: [Policy; 2] = [Policy::Prevention, Policy::Treatment];

    pub fn name(self) -> &'static str {
        match self {
            Policy::Prevention => "prevention",
            Policy::Treatment => "treatment",
        }
    }

    pub fn rhs(self, pt: PhasePoint, params: &ModelParams) -> Result<[f64; 2]> {
        match self {
            Policy::Prevention => prevention_rhs(pt, params),
            Policy::Treatment => treatment_rhs(pt, params),
        }
    }

    /// The vector field as a closure, for the integrator.
    pub fn field(
        self,
        params: ModelParams,
    ) -> impl Fn(PhasePoint) -> Result<[f64; 2]> + Send + Sync {
        move |pt| self.rhs(pt, &params)
    }

    /// Tax rate at a point of this system's phase plane.
    pub fn tax_rate(self, pt: PhasePoint) -> Result<f64> {
        match self {
            Policy::Prevention => Ok(pt.c),
            Policy::Treatment => tau_from_phi(pt.s, pt.c),
        }
    }
}

impl std::fmt::Display for Policy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

pub fn prevention_rhs(pt: PhasePoint, params: &ModelParams) -> Result<[f64; 2]> {
    let PhasePoint { s, c: tau } = pt;
    if s <= 0.0 {
        return Err(Error::Singularity {
            what: "S = 0 (delta / S term of the prevention system)",
        });
    }
    let ModelParams {
        alpha, delta, rho, ..
    } = *params;
    let ds = delta * (1.0 - s) - alpha * (1.0 - tau) * s * (1.0 - s);
    let dtau = (1.0 + tau) * (rho - 2.0 * alpha * s + delta - alpha * (1.0 - tau) * s + delta / s);
    Ok([ds, dtau])
}

pub fn treatment_rhs(pt: PhasePoint, params: &ModelParams) -> Result<[f64; 2]> {
    let PhasePoint { s, c: phi } = pt;
    let ModelParams {
        alpha, delta, rho, ..
    } = *params;
    let ds = delta * phi - alpha * s * (1.0 - s);
    let dphi = phi * (rho + alpha * (1.0 - 2.0 * s));
    Ok([ds, dphi])
}

/// `phi = 1 - s + tau s`.
pub fn phi_from_tau(s: f64, tau: f64) -> f64 {
    1.0 - s + tau * s
}

/// `tau = (phi - 1 + s) / s`, the inverse of [`phi_from_tau`] for `s > 0`.
pub fn tau_from_phi(s: f64, phi: f64) -> Result<f64> {
    if s == 0.0 {
        return Err(Error::Singularity {
            what: "S = 0 (tau = (phi - 1 + S) / S)",
        });
    }
    Ok((phi - 1.0 + s) / s)
}

/// Row-major 2x2 matrix; rows are `(dS/dt, dc/dt)`, columns `(S, c)`.
pub type Matrix2 = [[f64; 2]; 2];

pub fn jacobian(policy: Policy, at: PhasePoint, params: &ModelParams) -> Result<Matrix2> {
    let PhasePoint { s, c } = at;
    let ModelParams {
        alpha, delta, rho, ..
    } = *params;
    match policy {
        Policy::Prevention => {
            if s <= 0.0 {
                return Err(Error::Singularity {
                    what: "S = 0 (delta / S term of the prevention system)",
                });
            }
            let tau = c;
            let bracket = rho - 2.0 * alpha * s + delta - alpha * (1.0 - tau) * s + delta / s;
            Ok([
                [
                    -delta - alpha * (1.0 - tau) * (1.0 - 2.0 * s),
                    alpha * s * (1.0 - s),
                ],
                [
                    (1.0 + tau) * (-2.0 * alpha - alpha * (1.0 - tau) - delta / (s * s)),
                    bracket + (1.0 + tau) * alpha * s,
                ],
            ])
        }
        Policy::Treatment => {
            let phi = c;
            Ok([
                [-alpha * (1.0 - 2.0 * s), delta],
                [-2.0 * alpha * phi, rho + alpha * (1.0 - 2.0 * s)],
            ])
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stability {
    Saddle,
    Unstable,
    Stable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenAnalysis {
    pub eigenvalues: [Complex64; 2],
    pub classification: Stability,
    /// Unit eigenvector of the negative eigenvalue of a saddle, first
    /// component non-negative.
    pub stable_eigenvector: Option<[f64; 2]>,
}

fn trace(m: &Matrix2) -> f64 {
    m[0][0] + m[1][1]
}

fn det(m: &Matrix2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Eigenvalues of a 2x2 matrix from `lambda^2 - tr lambda + det = 0`, ordered
/// by descending real part.
pub fn eigenvalues(m: &Matrix2) -> [Complex64; 2] {
    let tr = trace(m);
    let dt = det(m);
    let half = 0.5 * tr;
    // (a - d)^2 + 4bc avoids cancellation in tr^2 - 4 det
    let disc = (m[0][0] - m[1][1]).powi(2) + 4.0 * m[0][1] * m[1][0];
    if disc >= 0.0 {
        let root = disc.sqrt();
        let big = half + 0.5 * root.copysign(tr);
        let small = if big != 0.0 {
            dt / big
        } else {
            half - 0.5 * root
        };
        let (l1, l2) = if big >= small {
            (big, small)
        } else {
            (small, big)
        };
        [Complex64::new(l1, 0.0), Complex64::new(l2, 0.0)]
    } else {
        let im = 0.5 * (-disc).sqrt();
        [Complex64::new(half, im), Complex64::new(half, -im)]
    }
}

/// Unit eigenvector for a real eigenvalue, first component >= 0 (second
/// component >= 0 when the first vanishes).
pub fn eigenvector(m: &Matrix2, lambda: f64) -> [f64; 2] {
    // rows of (M - lambda I) are orthogonal to the eigenvector
    let cand_a = [m[0][1], lambda - m[0][0]];
    let cand_b = [lambda - m[1][1], m[1][0]];
    let na = cand_a[0].hypot(cand_a[1]);
    let nb = cand_b[0].hypot(cand_b[1]);
    let (v, n) = if na >= nb { (cand_a, na) } else { (cand_b, nb) };
    let mut v = if n == 0.0 {
        // M = lambda I: every direction is an eigenvector
        [1.0, 0.0]
    } else {
        [v[0] / n, v[1] / n]
    };
    if v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0) {
        v = [-v[0], -v[1]];
    }
    v
}

/// Classifies a hyperbolic equilibrium from its Jacobian.
///
/// Saddle iff the eigenvalue product (determinant) is negative; otherwise
/// Stable or Unstable by the common sign of the real parts. Zero real parts
/// and defective repeated eigenvalues are reported as
/// [`Error::NonHyperbolic`].
pub fn classify_equilibrium(m: &Matrix2) -> Result<EigenAnalysis> {
    let eig = eigenvalues(m);
    let scale = m
        .iter()
        .flatten()
        .fold(0.0f64, |a, x| a.max(x.abs()))
        .max(1e-300);
    let tiny = 1e-12 * scale;
    let non_hyperbolic = || Error::NonHyperbolic {
        re1: eig[0].re,
        im1: eig[0].im,
        re2: eig[1].re,
        im2: eig[1].im,
    };
    if eig.iter().any(|l| l.re.abs() <= tiny) {
        return Err(non_hyperbolic());
    }
    let repeated = eig[0].im == 0.0 && (eig[0].re - eig[1].re).abs() <= tiny;
    let scalar = m[0][1].abs() <= tiny && m[1][0].abs() <= tiny;
    if repeated && !scalar {
        return Err(non_hyperbolic());
    }

    let dt = det(m);
    let (classification, stable_eigenvector) = if dt < 0.0 {
        (Stability::Saddle, Some(eigenvector(m, eig[1].re)))
    } else if eig[0].re > 0.0 && eig[1].re > 0.0 {
        (Stability::Unstable, None)
    } else {
        (Stability::Stable, None)
    };
    Ok(EigenAnalysis {
        eigenvalues: eig,
        classification,
        stable_eigenvector,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "violated", rename_all = "lowercase")]
pub enum Existence {
    Exists,
    /// Names the first violated inequality.
    Violated(String),
}

impl Existence {
    pub fn exists(&self) -> bool {
        matches!(self, Existence::Exists)
    }

    fn from_conditions(conds: &[(bool, &str)]) -> Self {
        conds
            .iter()
            .find(|(ok, _)| !ok)
            .map_or(Existence::Exists, |(_, name)| {
                Existence::Violated((*name).to_string())
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub policy: Policy,
    /// "E1" or "E2".
    pub name: String,
    /// Coordinates in the system's own phase plane.
    pub coords: PhasePoint,
    /// The same point in `(S, tau)`.
    pub coords_tau: PhasePoint,
    pub exists: Existence,
    /// Treatment `E2` only: whether `1 > max(rho/alpha, 2 delta/alpha)`.
    pub tau_feasible: Option<bool>,
    pub jacobian: Option<Matrix2>,
    pub eigenvalues: Option<[Complex64; 2]>,
    pub stable_eigenvector: Option<[f64; 2]>,
    pub classification: Option<Stability>,
    /// Set when the point exists but is not hyperbolic.
    pub note: Option<String>,
}

impl EquilibriumReport {
    fn build(
        policy: Policy,
        name: &str,
        coords: PhasePoint,
        coords_tau: PhasePoint,
        exists: Existence,
        params: &ModelParams,
    ) -> Self {
        let mut report = Self {
            policy,
            name: name.to_string(),
            coords,
            coords_tau,
            exists,
            tau_feasible: None,
            jacobian: None,
            eigenvalues: None,
            stable_eigenvector: None,
            classification: None,
            note: None,
        };
        if !report.exists.exists() {
            return report;
        }
        match jacobian(policy, coords, params) {
            Ok(j) => {
                report.jacobian = Some(j);
                match classify_equilibrium(&j) {
                    Ok(eig) => {
                        report.eigenvalues = Some(eig.eigenvalues);
                        report.stable_eigenvector = eig.stable_eigenvector;
                        report.classification = Some(eig.classification);
                    }
                    Err(e) => {
                        report.eigenvalues = Some(eigenvalues(&j));
                        report.note = Some(e.to_string());
                    }
                }
            }
            Err(e) => report.note = Some(e.to_string()),
        }
        report
    }

    pub fn is_saddle(&self) -> bool {
        self.classification == Some(Stability::Saddle)
    }
}

/// `E1 = (1, (3 alpha - 2 delta - rho)/alpha)` and
/// `E2 = (2 delta / (sqrt(rho^2 + 8 alpha delta) - rho), 1 - (sqrt(...) - rho)/(2 alpha))`.
pub fn prevention_equilibria(params: &ModelParams) -> (EquilibriumReport, EquilibriumReport) {
    let ModelParams {
        alpha, delta, rho, ..
    } = *params;
    let e1 = PhasePoint::new(1.0, (3.0 * alpha - 2.0 * delta - rho) / alpha);
    let e1_exists = Existence::from_conditions(&[
        (2.0 * alpha < 2.0 * delta + rho, "2*alpha < 2*delta + rho"),
        (2.0 * delta + rho < 3.0 * alpha, "2*delta + rho < 3*alpha"),
    ]);

    let root = (rho * rho + 8.0 * alpha * delta).sqrt() - rho;
    let e2 = PhasePoint::new(2.0 * delta / root, (2.0 * alpha - root) / (2.0 * alpha));
    let e2_exists = Existence::from_conditions(&[
        (
            2.0 * delta / (alpha + rho) < 1.0,
            "2*delta/(alpha + rho) < 1",
        ),
        (
            (delta + rho) / (2.0 * alpha) < 1.0,
            "(delta + rho)/(2*alpha) < 1",
        ),
    ]);

    (
        EquilibriumReport::build(Policy::Prevention, "E1", e1, e1, e1_exists, params),
        EquilibriumReport::build(Policy::Prevention, "E2", e2, e2, e2_exists, params),
    )
}

/// `E1 = (1, 0)` (always) and
/// `E2 = ((rho + alpha)/(2 alpha), (alpha - rho)(alpha + rho)/(4 alpha delta))`, which
/// exists iff `alpha > rho`.
pub fn treatment_equilibria(params: &ModelParams) -> (EquilibriumReport, EquilibriumReport) {
    let ModelParams {
        alpha, delta, rho, ..
    } = *params;
    let e1 = PhasePoint::new(1.0, 0.0);
    let s2 = (rho + alpha) / (2.0 * alpha);
    let e2 = PhasePoint::new(s2, (alpha - rho) * (alpha + rho) / (4.0 * alpha * delta));
    let tau2 = (alpha - rho) * (alpha + rho - 2.0 * delta) / (2.0 * delta * (rho + alpha));
    let e2_exists = Existence::from_conditions(&[(alpha > rho, "alpha > rho")]);

    let first = EquilibriumReport::build(
        Policy::Treatment,
        "E1",
        e1,
        PhasePoint::new(1.0, 0.0),
        Existence::Exists,
        params,
    );
    let mut second = EquilibriumReport::build(
        Policy::Treatment,
        "E2",
        e2,
        PhasePoint::new(s2, tau2),
        e2_exists,
        params,
    );
    second.tau_feasible = Some(rho / alpha < 1.0 && 2.0 * delta / alpha < 1.0);
    (first, second)
}

pub fn equilibria(policy: Policy, params: &ModelParams) -> (EquilibriumReport, EquilibriumReport) {
    match policy {
        Policy::Prevention => prevention_equilibria(params),
        Policy::Treatment => treatment_equilibria(params),
    }
}
