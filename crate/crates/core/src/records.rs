//! Flat record types for CSV and JSON output, with readers for round-tripping.

use std::io::{Read, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::control::{EquilibriumReport, Existence, PhasePoint, Policy, Stability};
use crate::cost::{ComparisonRow, Dominance};
use crate::integrate::{SystemKind, Termination, Trajectory};
use crate::phase::PhasePortrait;

/// Rounds to the four decimals used for reported rates and costs.
pub fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

pub fn write_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: DeserializeOwned, R: Read>(input: R) -> csv::Result<Vec<T>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationRow {
    pub t: f64,
    pub s: f64,
    pub i: f64,
    pub i_closed_form: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub s: f64,
    /// The control coordinate: `tau` for prevention, `phi` for treatment.
    pub c: f64,
    pub tau: f64,
}

impl TrajectoryRow {
    pub fn from_trajectory(policy: Policy, traj: &Trajectory) -> Vec<Self> {
        traj.iter()
            .map(|(t, x)| TrajectoryRow {
                t,
                s: x.s,
                c: x.c,
                tau: policy.tax_rate(x).unwrap_or(f64::NAN),
            })
            .collect()
    }

    /// Rebuilds a trajectory of the given policy from rows.
    pub fn to_trajectory(policy: Policy, rows: &[Self]) -> Trajectory {
        Trajectory {
            times: rows.iter().map(|r| r.t).collect(),
            states: rows.iter().map(|r| PhasePoint::new(r.s, r.c)).collect(),
            termination: Termination::ReachedTMax,
            policy_kind: SystemKind::from(policy),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumRow {
    pub policy: Policy,
    pub name: String,
    pub s: f64,
    pub c: f64,
    pub tau: f64,
    pub exists: bool,
    pub violated: Option<String>,
    pub tau_feasible: Option<bool>,
    pub eig1_re: Option<f64>,
    pub eig1_im: Option<f64>,
    pub eig2_re: Option<f64>,
    pub eig2_im: Option<f64>,
    pub classification: Option<Stability>,
}

impl From<&EquilibriumReport> for EquilibriumRow {
    fn from(r: &EquilibriumReport) -> Self {
        let eig = r.eigenvalues;
        EquilibriumRow {
            policy: r.policy,
            name: r.name.clone(),
            s: r.coords.s,
            c: r.coords.c,
            tau: r.coords_tau.c,
            exists: r.exists.exists(),
            violated: match &r.exists {
                Existence::Exists => None,
                Existence::Violated(c) => Some(c.clone()),
            },
            tau_feasible: r.tau_feasible,
            eig1_re: eig.map(|e| e[0].re),
            eig1_im: eig.map(|e| e[0].im),
            eig2_re: eig.map(|e| e[1].re),
            eig2_im: eig.map(|e| e[1].im),
            classification: r.classification,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostRecord {
    pub policy: Policy,
    pub alpha: f64,
    pub delta: f64,
    pub rho: f64,
    pub s0: f64,
    pub tau0: Option<f64>,
    pub cost: f64,
}

/// One line of the comparison table. Rates and costs are rounded to four
/// decimals, except the costs of tied rows, which keep full precision so the
/// margin stays visible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRecord {
    pub alpha: f64,
    pub delta: f64,
    pub prev_tau0: Option<f64>,
    pub prev_taubar: Option<f64>,
    pub prev_cost: Option<f64>,
    pub treat_tau0: Option<f64>,
    pub treat_taubar: Option<f64>,
    pub treat_cost: Option<f64>,
    pub verdict: Option<Dominance>,
}

impl From<&ComparisonRow> for CompareRecord {
    fn from(row: &ComparisonRow) -> Self {
        let cost = |c: f64| {
            if row.verdict == Some(Dominance::Tie) {
                c
            } else {
                round4(c)
            }
        };
        CompareRecord {
            alpha: row.alpha,
            delta: row.delta,
            prev_tau0: row.prevention.map(|o| round4(o.tau0)),
            prev_taubar: row.prevention.map(|o| round4(o.tau_bar)),
            prev_cost: row.prevention.map(|o| cost(o.cost)),
            treat_tau0: row.treatment.map(|o| round4(o.tau0)),
            treat_taubar: row.treatment.map(|o| round4(o.tau_bar)),
            treat_cost: row.treatment.map(|o| cost(o.cost)),
            verdict: row.verdict,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseItem {
    Arrow,
    Nullcline,
    Equilibrium,
    Manifold,
}

/// Long-format phase-portrait row. `index` numbers the polyline segment for
/// nullclines and the sample for the manifold; `ds`/`dc` are set for arrows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseRow {
    pub item: PhaseItem,
    pub label: String,
    pub index: usize,
    pub s: f64,
    pub c: f64,
    pub ds: Option<f64>,
    pub dc: Option<f64>,
}

impl PhaseRow {
    pub fn from_portrait(p: &PhasePortrait) -> Vec<Self> {
        let point = |item, label: &str, index, x: PhasePoint| PhaseRow {
            item,
            label: label.to_string(),
            index,
            s: x.s,
            c: x.c,
            ds: None,
            dc: None,
        };
        let mut rows: Vec<PhaseRow> = p
            .arrows
            .iter()
            .enumerate()
            .map(|(k, a)| PhaseRow {
                item: PhaseItem::Arrow,
                label: String::new(),
                index: k,
                s: a.s,
                c: a.c,
                ds: Some(a.ds),
                dc: Some(a.dc),
            })
            .collect();
        for n in &p.nullclines {
            for (k, seg) in n.segments.iter().enumerate() {
                rows.extend(
                    seg.iter()
                        .map(|&x| point(PhaseItem::Nullcline, &n.label, k, x)),
                );
            }
        }
        for (k, e) in p.equilibria.iter().enumerate() {
            rows.push(point(PhaseItem::Equilibrium, &e.name, k, e.coords));
        }
        for (k, &x) in p.manifold.iter().enumerate() {
            rows.push(point(PhaseItem::Manifold, "stable manifold of E1", k, x));
        }
        rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::PolicyOutcome;

    #[test]
    fn compare_record_round_trip() {
        let outcome = |tau0, tau_bar, cost| PolicyOutcome {
            tau0,
            tau_bar,
            cost,
        };
        let rows = [
            ComparisonRow {
                alpha: 0.2,
                delta: 0.2,
                prevention: Some(outcome(0.70741234, 0.8, 0.0071461)),
                treatment: Some(outcome(0.02991, 0.0, 0.0069781)),
                verdict: Some(Dominance::TreatmentDominates),
                errors: vec![],
            },
            ComparisonRow {
                alpha: 0.5,
                delta: 0.485,
                prevention: Some(outcome(0.8958, 0.98, 0.003163393123)),
                treatment: Some(outcome(0.0758, 0.0, 0.003172946456)),
                verdict: Some(Dominance::Tie),
                errors: vec![],
            },
            ComparisonRow {
                alpha: 0.2,
                delta: 0.4,
                prevention: None,
                treatment: Some(outcome(0.01, 0.0, 0.001)),
                verdict: None,
                errors: vec!["prevention: no E1".into()],
            },
        ];
        let records: Vec<CompareRecord> = rows.iter().map(CompareRecord::from).collect();
        let mut buf = Vec::new();
        write_csv(&records, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "alpha,delta,prev_tau0,prev_taubar,prev_cost,treat_tau0,treat_taubar,treat_cost,verdict\n"
        ));
        assert!(text.contains("0.2,0.2,0.7074,0.8,0.0071,0.0299,0.0,0.007,TreatmentDominates"));
        assert!(text.contains("0.003163393123"));
        let back: Vec<CompareRecord> = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, records);
    }

    #[test]
    fn trajectory_rows_round_trip() {
        let rows = vec![
            TrajectoryRow {
                t: 0.0,
                s: 0.96,
                c: 0.0687,
                tau: 0.0299,
            },
            TrajectoryRow {
                t: 0.01,
                s: 0.9600575,
                c: 0.0686,
                tau: 0.02983,
            },
        ];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let back: Vec<TrajectoryRow> = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, rows);
        let traj = TrajectoryRow::to_trajectory(Policy::Treatment, &back);
        assert_eq!(traj.policy_kind, SystemKind::Treatment);
        assert_eq!(traj.states[1].c, 0.0686);
    }
}
