//! The `epipolicy` command line.
//!
//! Every flag that names a value can also come from a TOML file passed with
//! `--config`, using the flag name as key; flags win over the file. Exit
//! status is 0 on success, 2 for bad arguments or parameters, 3 when the
//! requested equilibrium structure or shooting bracket does not exist and 1
//! for anything else.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::control::{equilibria, Policy};
use crate::cost::{compare, delta_grid, optimal_outcome, social_cost, TABLE2_ROWS};
use crate::epidemic::{baseline_planar_field, closed_form_infected, ModelParams};
use crate::error::Error;
use crate::integrate::{integrate, IntegrationOptions, Method, SystemKind};
use crate::phase::{phase_portrait, PhaseOptions};
use crate::records::{
    read_csv, write_csv, CompareRecord, CostRecord, EquilibriumRow, PhaseRow, SimulationRow,
    TrajectoryRow,
};
use crate::shoot::ShootingOptions;
use crate::PhasePoint;

pub const DEFAULT_RHO: f64 = 0.04;
pub const DEFAULT_I0: f64 = 0.04;
pub const DEFAULT_ALPHA: f64 = 0.2;
pub const DEFAULT_DELTA: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Rk4,
    Rk45,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Rk4 => Method::Rk4,
            MethodArg::Rk45 => Method::Rk45,
        }
    }
}

/// Optimal prevention and treatment taxes for an SIS epidemic.
#[derive(Debug, Parser)]
#[command(name = "epipolicy", version)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Integration step (initial step for rk45).
    #[arg(long, global = true)]
    step: Option<f64>,
    #[arg(long, global = true, value_enum)]
    method: Option<MethodArg>,
    /// Integration horizon for shooting and costs.
    #[arg(long, global = true)]
    tmax: Option<f64>,
    /// TOML file of default values keyed by flag name.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
struct ModelArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Discount rate.
    #[arg(long)]
    rho: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Uncontrolled SIS time series, numerical and closed form.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        /// Constant prevention rate.
        #[arg(long)]
        p: Option<f64>,
        /// Constant treatment rate.
        #[arg(long)]
        v: Option<f64>,
        /// Initial infected share.
        #[arg(long)]
        i0: Option<f64>,
        /// Horizon.
        #[arg(long)]
        t: Option<f64>,
    },
    /// Equilibria of the policy systems with existence and eigen-data.
    Equilibria {
        #[command(flatten)]
        model: ModelArgs,
        /// Both policies when absent.
        #[arg(long, value_enum)]
        policy: Option<Policy>,
    },
    /// Optimal tax path by saddle-path shooting.
    Shoot {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum)]
        policy: Option<Policy>,
        /// Initial susceptible share.
        #[arg(long)]
        s0: Option<f64>,
    },
    /// Discounted social cost of the optimal path or of a supplied trajectory.
    Cost {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum)]
        policy: Option<Policy>,
        #[arg(long)]
        s0: Option<f64>,
        /// CSV written by `shoot` (columns t,s,c,tau).
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
    /// Prevention against treatment over a set of (alpha, delta) pairs.
    Compare {
        /// The fifteen reference rows.
        #[arg(long)]
        paper: bool,
        /// An `alpha,delta` pair; repeatable.
        #[arg(long = "row", value_parser = parse_pair)]
        rows: Vec<(f64, f64)>,
        /// With --alpha: number of delta values across the admissible interval.
        #[arg(long)]
        grid: Option<usize>,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        s0: Option<f64>,
    },
    /// Phase-portrait data for plotting.
    Phase {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum)]
        policy: Option<Policy>,
        /// Arrow samples per axis.
        #[arg(long)]
        grid: Option<usize>,
        /// Arc length of the traced stable manifold.
        #[arg(long)]
        arc: Option<f64>,
    },
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, d) = s
        .split_once(',')
        .ok_or_else(|| format!("expected ALPHA,DELTA, got {s:?}"))?;
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    Ok((num(a)?, num(d)?))
}

/// Every configurable value, as read from a config file or collected from
/// flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub alpha: Option<f64>,
    pub delta: Option<f64>,
    pub rho: Option<f64>,
    pub p: Option<f64>,
    pub v: Option<f64>,
    pub i0: Option<f64>,
    pub s0: Option<f64>,
    pub t: Option<f64>,
    pub policy: Option<Policy>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub step: Option<f64>,
    pub method: Option<Method>,
    pub tmax: Option<f64>,
    pub grid: Option<usize>,
    pub arc: Option<f64>,
}

impl Settings {
    /// Values present in `over` replace those in `self`.
    pub fn overlay(self, over: Settings) -> Settings {
        Settings {
            alpha: over.alpha.or(self.alpha),
            delta: over.delta.or(self.delta),
            rho: over.rho.or(self.rho),
            p: over.p.or(self.p),
            v: over.v.or(self.v),
            i0: over.i0.or(self.i0),
            s0: over.s0.or(self.s0),
            t: over.t.or(self.t),
            policy: over.policy.or(self.policy),
            format: over.format.or(self.format),
            out: over.out.or(self.out),
            step: over.step.or(self.step),
            method: over.method.or(self.method),
            tmax: over.tmax.or(self.tmax),
            grid: over.grid.or(self.grid),
            arc: over.arc.or(self.arc),
        }
    }

    pub fn from_toml(text: &str) -> Result<Settings, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    fn model(&self, p: f64, v: f64) -> Result<ModelParams, Error> {
        ModelParams::new(
            self.alpha.unwrap_or(DEFAULT_ALPHA),
            self.delta.unwrap_or(DEFAULT_DELTA),
            self.rho.unwrap_or(DEFAULT_RHO),
            p,
            v,
        )
    }

    fn s0(&self) -> f64 {
        self.s0
            .or(self.i0.map(|i| 1.0 - i))
            .unwrap_or(1.0 - DEFAULT_I0)
    }

    fn integration(&self) -> Result<IntegrationOptions, Error> {
        let mut opts = IntegrationOptions::default();
        if let Some(step) = self.step {
            opts.step = step;
        }
        if let Some(method) = self.method {
            opts.method = method;
        }
        if let Some(t_max) = self.tmax {
            opts.t_max = t_max;
        }
        opts.validate()?;
        Ok(opts)
    }

    fn require_policy(&self) -> Result<Policy, CliError> {
        self.policy
            .ok_or_else(|| CliError::Usage("--policy is required (prevention or treatment)".into()))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] Error),
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Model(e) => match e {
                Error::InvalidParameter { .. }
                | Error::UndefinedR0
                | Error::Domain { .. }
                | Error::Options(_)
                | Error::KindMismatch { .. } => 2,
                Error::Structure(_) | Error::Bracket { .. } => 3,
                _ => 1,
            },
            _ => 1,
        }
    }
}

/// Merged view of flags and config file for one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub settings: Settings,
    pub format: Format,
    pub out: Option<PathBuf>,
}

fn model_settings(m: &ModelArgs) -> Settings {
    Settings {
        alpha: m.alpha,
        delta: m.delta,
        rho: m.rho,
        ..Settings::default()
    }
}

impl Cli {
    fn flag_settings(&self) -> Settings {
        let global = Settings {
            format: self.format,
            out: self.out.clone(),
            step: self.step,
            method: self.method.map(Method::from),
            tmax: self.tmax,
            ..Settings::default()
        };
        let local = match &self.command {
            Command::Simulate { model, p, v, i0, t } => Settings {
                p: *p,
                v: *v,
                i0: *i0,
                t: *t,
                ..model_settings(model)
            },
            Command::Equilibria { model, policy } => Settings {
                policy: *policy,
                ..model_settings(model)
            },
            Command::Shoot { model, policy, s0 }
            | Command::Cost {
                model, policy, s0, ..
            } => Settings {
                policy: *policy,
                s0: *s0,
                ..model_settings(model)
            },
            Command::Compare {
                model, s0, grid, ..
            } => Settings {
                s0: *s0,
                grid: *grid,
                ..model_settings(model)
            },
            Command::Phase {
                model,
                policy,
                grid,
                arc,
            } => Settings {
                policy: *policy,
                grid: *grid,
                arc: *arc,
                ..model_settings(model)
            },
        };
        global.overlay(local)
    }

    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::Usage(format!("cannot read config {}: {e}", path.display()))
                })?;
                Settings::from_toml(&text)?
            }
            None => Settings::default(),
        };
        let settings = file.overlay(self.flag_settings());
        Ok(RunConfig {
            format: settings.format.unwrap_or_default(),
            out: settings.out.clone(),
            settings,
        })
    }
}

struct Output<'a> {
    format: Format,
    path: Option<&'a Path>,
}

impl Output<'_> {
    fn writer(&self) -> io::Result<Box<dyn Write>> {
        Ok(match self.path {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(io::stdout().lock()),
        })
    }

    /// CSV writes `rows`; JSON writes `json` (usually richer than the rows).
    fn emit<R: Serialize, J: Serialize + ?Sized>(
        &self,
        rows: &[R],
        json: &J,
    ) -> Result<(), CliError> {
        let mut w = self.writer()?;
        match self.format {
            Format::Csv => write_csv(rows, &mut w)?,
            Format::Json => {
                serde_json::to_writer_pretty(&mut w, json)?;
                writeln!(w)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

fn simulate(cfg: &RunConfig, out: &Output) -> Result<(), CliError> {
    let s = &cfg.settings;
    let params = s.model(s.p.unwrap_or(0.0), s.v.unwrap_or(0.0))?;
    let i0 = s.i0.or(s.s0.map(|x| 1.0 - x)).unwrap_or(DEFAULT_I0);
    if !(0.0..=1.0).contains(&i0) {
        return Err(Error::Domain {
            what: "i0",
            value: i0,
            expected: "[0, 1]",
        }
        .into());
    }
    let horizon =
        s.t.or(s.tmax)
            .unwrap_or(IntegrationOptions::default().t_max);
    let opts = s.integration()?.with_t_max(horizon);
    let field = baseline_planar_field(params);
    let traj = integrate(
        &field,
        PhasePoint::new(1.0 - i0, i0),
        &opts,
        SystemKind::Baseline,
    )?;
    let rows = traj
        .iter()
        .map(|(t, x)| {
            Ok(SimulationRow {
                t,
                s: x.s,
                i: x.c,
                i_closed_form: closed_form_infected(t, i0, &params)?,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    out.emit(&rows, &rows)
}

fn equilibria_cmd(cfg: &RunConfig, out: &Output) -> Result<(), CliError> {
    let s = &cfg.settings;
    let params = s.model(0.0, 0.0)?;
    let policies: Vec<Policy> = match s.policy {
        Some(p) => vec![p],
        None => Policy::ALL.to_vec(),
    };
    let reports: Vec<_> = policies
        .into_iter()
        .flat_map(|p| {
            let (e1, e2) = equilibria(p, &params);
            [e1, e2]
        })
        .collect();
    let rows: Vec<EquilibriumRow> = reports.iter().map(EquilibriumRow::from).collect();
    out.emit(&rows, &reports)
}

fn shoot_cmd(cfg: &RunConfig, out: &Output) -> Result<(), CliError> {
    let s = &cfg.settings;
    let policy = s.require_policy()?;
    let params = s.model(0.0, 0.0)?;
    let opts = s.integration()?;
    let (shot, outcome) =
        optimal_outcome(policy, &params, s.s0(), &opts, &ShootingOptions::default())?;
    eprintln!(
        "{policy}: tau0 = {:.4}, tau_bar = {:.4}, cost = {:.4}, stages = {}, samples = {}",
        outcome.tau0,
        outcome.tau_bar,
        outcome.cost,
        shot.stages,
        shot.trajectory.len()
    );
    let rows = TrajectoryRow::from_trajectory(policy, &shot.trajectory);
    out.emit(&rows, &shot)
}

fn cost_cmd(cfg: &RunConfig, out: &Output, trajectory: Option<&Path>) -> Result<(), CliError> {
    let s = &cfg.settings;
    let policy = s.require_policy()?;
    let params = s.model(0.0, 0.0)?;
    let s0 = s.s0();
    let record = match trajectory {
        Some(path) => {
            let rows: Vec<TrajectoryRow> = read_csv(File::open(path)?)?;
            if rows.is_empty() {
                return Err(CliError::Usage(format!(
                    "{} holds no samples",
                    path.display()
                )));
            }
            let traj = TrajectoryRow::to_trajectory(policy, &rows);
            CostRecord {
                policy,
                alpha: params.alpha,
                delta: params.delta,
                rho: params.rho,
                s0: rows[0].s,
                tau0: Some(rows[0].tau),
                cost: social_cost(policy, &traj, &params)?,
            }
        }
        None => {
            let opts = s.integration()?;
            let (_, o) = optimal_outcome(policy, &params, s0, &opts, &ShootingOptions::default())?;
            CostRecord {
                policy,
                alpha: params.alpha,
                delta: params.delta,
                rho: params.rho,
                s0,
                tau0: Some(o.tau0),
                cost: o.cost,
            }
        }
    };
    out.emit(std::slice::from_ref(&record), &record)
}

fn compare_cmd(
    cfg: &RunConfig,
    out: &Output,
    paper: bool,
    explicit: &[(f64, f64)],
) -> Result<(), CliError> {
    let s = &cfg.settings;
    let mut pairs = Vec::new();
    if paper {
        pairs.extend_from_slice(&TABLE2_ROWS);
    }
    pairs.extend_from_slice(explicit);
    if let Some(n) = s.grid {
        let alpha = s
            .alpha
            .ok_or_else(|| CliError::Usage("--grid needs --alpha".into()))?;
        let rho = s.rho.unwrap_or(DEFAULT_RHO);
        pairs.extend(delta_grid(alpha, rho, n)?.into_iter().map(|d| (alpha, d)));
    }
    if pairs.is_empty() {
        return Err(CliError::Usage(
            "nothing to compare: pass --paper, --row ALPHA,DELTA or --alpha with --grid".into(),
        ));
    }
    let rho = s.rho.unwrap_or(DEFAULT_RHO);
    let opts = s.integration()?;
    let rows = compare(&pairs, rho, s.s0(), &opts, &ShootingOptions::default());
    for row in &rows {
        for e in &row.errors {
            eprintln!("warning: alpha = {}, delta = {}: {e}", row.alpha, row.delta);
        }
    }
    let records: Vec<CompareRecord> = rows.iter().map(CompareRecord::from).collect();
    out.emit(&records, &rows)
}

fn phase_cmd(cfg: &RunConfig, out: &Output) -> Result<(), CliError> {
    let s = &cfg.settings;
    let policy = s.require_policy()?;
    let params = s.model(0.0, 0.0)?;
    let mut popts = PhaseOptions::for_policy(policy);
    if let Some(n) = s.grid {
        popts.grid = n;
    }
    if let Some(arc) = s.arc {
        popts.manifold_arc_length = arc;
    }
    let opts = s.integration()?;
    let portrait = phase_portrait(policy, &params, &popts, &opts, &ShootingOptions::default())?;
    for w in &portrait.warnings {
        eprintln!("warning: {w}");
    }
    out.emit(&PhaseRow::from_portrait(&portrait), &portrait)
}

/// Runs an already parsed command line.
pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let cfg = cli.resolve()?;
    let out = Output {
        format: cfg.format,
        path: cfg.out.as_deref(),
    };
    match &cli.command {
        Command::Simulate { .. } => simulate(&cfg, &out),
        Command::Equilibria { .. } => equilibria_cmd(&cfg, &out),
        Command::Shoot { .. } => shoot_cmd(&cfg, &out),
        Command::Cost { trajectory, .. } => cost_cmd(&cfg, &out, trajectory.as_deref()),
        Command::Compare { paper, rows, .. } => compare_cmd(&cfg, &out, *paper, rows),
        Command::Phase { .. } => phase_cmd(&cfg, &out),
    }
}

/// Parses `args`, runs the command and returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("epipolicy").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flags_override_config() {
        let file =
            Settings::from_toml("alpha = 0.3\ndelta = 0.281\npolicy = \"treatment\"\nstep = 0.02")
                .unwrap();
        let cli = parse(&["shoot", "--policy", "prevention", "--delta", "0.3"]);
        let merged = file.overlay(cli.flag_settings());
        assert_eq!(merged.alpha, Some(0.3));
        assert_eq!(merged.delta, Some(0.3));
        assert_eq!(merged.policy, Some(Policy::Prevention));
        assert_eq!(merged.step, Some(0.02));
    }

    #[test]
    fn unknown_config_key_rejected() {
        let err = Settings::from_toml("alpha = 0.3\nbeta = 1.0").unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn pair_parsing() {
        assert_eq!(parse_pair("0.2, 0.185").unwrap(), (0.2, 0.185));
        assert!(parse_pair("0.2").is_err());
        assert!(parse_pair("a,b").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::from(Error::Structure("x".into())).exit_code(), 3);
        assert_eq!(
            CliError::from(Error::Bracket {
                lo: 0.0,
                hi: 1.0,
                verdict: "TooLow / TooLow".into()
            })
            .exit_code(),
            3
        );
        assert_eq!(CliError::from(Error::Options("bad")).exit_code(), 2);
        assert_eq!(run(["epipolicy", "simulate", "--alpha=-1"]), 2);
        assert_eq!(run(["epipolicy", "bogus"]), 2);
    }

    #[test]
    fn s0_defaults_follow_i0() {
        let cli = parse(&["simulate", "--i0", "0.1"]);
        assert!((cli.flag_settings().s0() - 0.9).abs() < 1e-15);
        assert!((parse(&["shoot"]).flag_settings().s0() - 0.96).abs() < 1e-15);
    }
}
