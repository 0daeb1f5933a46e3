use rayon::prelude::*;
use serde_json::{json, Value};

use super::config::{RunConfig, SweepTarget};
use super::error::CliError;
use super::output::{record_output, Cell, Output, Table};
use crate::error::FieldError;
use crate::hopf::{discriminant_crossing, hopf_region, trace_hopf_curve, Gap, HopfPlane};
use crate::linear::stability_bound;
use crate::model::{ModelParams, ParamName};
use crate::sim::{analyze_record, linear_growth_probe, run, RunFailure};
use crate::turing::{dispersion_k_given_omega, dispersion_omega_given_k, trace_th_curve, Branch, ThPlane};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::Subcommand)]
pub enum Command {
    /// Sufficient stability bound D.
    Stability,
    /// Region of the homogeneous oscillatory instability.
    HopfRegion,
    /// Critical speed curve in a parameter plane.
    HopfCurve,
    /// Turing-Hopf dispersion relation.
    Dispersion,
    /// Turing-Hopf curve in a parameter plane.
    TuringCurve,
    /// Integrate the field and report pattern metrics.
    Simulate,
    /// Measure the growth rate of a seeded mode.
    GrowthProbe,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Stability => "stability",
            Command::HopfRegion => "hopf-region",
            Command::HopfCurve => "hopf-curve",
            Command::Dispersion => "dispersion",
            Command::TuringCurve => "turing-curve",
            Command::Simulate => "simulate",
            Command::GrowthProbe => "growth-probe",
        }
    }
}

/// A failed command, possibly with output worth writing anyway.
#[derive(Debug)]
pub struct Failure {
    pub error: CliError,
    pub partial: Option<Output>,
}

impl From<CliError> for Failure {
    fn from(error: CliError) -> Self {
        Self { error, partial: None }
    }
}

impl From<FieldError> for Failure {
    fn from(e: FieldError) -> Self {
        CliError::from(e).into()
    }
}

fn metadata(command: Command, cfg: &RunConfig) -> Value {
    json!({
        "command": command.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "params": cfg.model,
        "sweep": cfg.sweep,
        "analysis": cfg.analysis,
    })
}

fn gaps_json(gaps: &[Gap]) -> Value {
    json!(gaps.iter().map(|g| json!({"value": g.value, "reason": g.reason})).collect::<Vec<_>>())
}

fn swept_param(cfg: &RunConfig, command: Command) -> Result<Option<(ParamName, Vec<f64>)>, CliError> {
    match &cfg.sweep {
        None => Ok(None),
        Some(s) => match s.target {
            SweepTarget::Param(p) => Ok(Some((p, s.grid()))),
            other => Err(CliError::config(format!(
                "{} sweeps a model parameter, not {}",
                command.name(),
                other.as_str()
            ))),
        },
    }
}

/// Evaluates `f` per swept value in parallel; failures become gaps.
fn sweep_rows<F>(cfg: &RunConfig, name: ParamName, grid: &[f64], f: F) -> (Vec<Vec<Cell>>, Vec<Gap>)
where
    F: Fn(&ModelParams) -> crate::Result<Vec<Cell>> + Sync,
{
    let results: Vec<(f64, crate::Result<Vec<Cell>>)> = grid
        .par_iter()
        .map(|&v| (v, f(&cfg.model.with(name, v, cfg.analysis.tie_inhibition))))
        .collect();
    let mut rows = Vec::new();
    let mut gaps = Vec::new();
    for (value, r) in results {
        match r {
            Ok(mut cells) => {
                cells.insert(0, Cell::Num(value));
                rows.push(cells);
            }
            Err(e) => gaps.push(Gap {
                value,
                reason: e.to_string(),
            }),
        }
    }
    (rows, gaps)
}

fn single_or_sweep<F>(command: Command, cfg: &RunConfig, columns: &[&str], f: F) -> Result<Output, Failure>
where
    F: Fn(&ModelParams) -> crate::Result<Vec<Cell>> + Sync,
{
    let mut meta = metadata(command, cfg);
    let table = match swept_param(cfg, command)? {
        None => {
            let mut t = Table::new(columns);
            t.push(f(&cfg.model)?);
            t
        }
        Some((name, grid)) => {
            let mut cols = vec![name.as_str()];
            cols.extend_from_slice(columns);
            let (rows, gaps) = sweep_rows(cfg, name, &grid, &f);
            meta["gaps"] = gaps_json(&gaps);
            if command == Command::HopfRegion {
                let steps = grid.len().saturating_sub(1).max(1);
                meta["discriminant_crossing"] =
                    json!(discriminant_crossing(&cfg.model, name, grid[0], grid[grid.len() - 1], steps));
            }
            Table {
                columns: cols.iter().map(|s| s.to_string()).collect(),
                rows,
            }
        }
    };
    Ok(Output { table, metadata: meta })
}

fn require_plane(cfg: &RunConfig) -> Result<&str, CliError> {
    cfg.analysis
        .plane
        .as_deref()
        .ok_or_else(|| CliError::config("this command needs --plane"))
}

fn plane_grid(cfg: &RunConfig, swept: ParamName, plane: &str) -> Result<Vec<f64>, CliError> {
    match &cfg.sweep {
        Some(s) if s.target == SweepTarget::Param(swept) => Ok(s.grid()),
        Some(s) => Err(CliError::config(format!(
            "plane {plane} sweeps {}, not {}",
            swept.as_str(),
            s.target.as_str()
        ))),
        None => Err(CliError::config(format!("plane {plane} needs --sweep {}=start:stop:step", swept.as_str()))),
    }
}

fn dispersion(cfg: &RunConfig) -> Result<Output, Failure> {
    let mut meta = metadata(Command::Dispersion, cfg);
    let target = cfg.sweep.map(|s| s.target);
    let (by_k, grid) = match (target, cfg.analysis.k, cfg.analysis.omega) {
        (Some(SweepTarget::K), _, _) => (true, cfg.sweep.unwrap().grid()),
        (Some(SweepTarget::Omega), _, _) => (false, cfg.sweep.unwrap().grid()),
        (Some(SweepTarget::Param(p)), _, _) => {
            return Err(CliError::config(format!("dispersion sweeps k or omega, not {}", p.as_str())).into())
        }
        (None, Some(k), _) => (true, vec![k]),
        (None, None, Some(w)) => (false, vec![w]),
        (None, None, None) => return Err(CliError::config("dispersion needs --k, --omega or a k/omega sweep").into()),
    };
    let p = &cfg.model;
    p.validate()?;
    let single = grid.len() == 1;
    let mut gaps = Vec::new();
    let table = if by_k {
        let solved: Vec<(f64, crate::Result<Vec<_>>)> =
            grid.par_iter().map(|&k| (k, dispersion_omega_given_k(p, k))).collect();
        let mut t = Table::new(&["k", "omega_low", "omega_high", "residual"]);
        for (k, r) in solved {
            match r {
                Ok(points) if !points.is_empty() => {
                    let pick = |b: Branch| points.iter().find(|q| q.branch == Some(b)).map(|q| q.omega);
                    let residual = points.iter().map(|q| q.residual).fold(0.0, f64::max);
                    t.push(vec![k.into(), pick(Branch::Low).into(), pick(Branch::High).into(), residual.into()]);
                }
                Ok(_) => gaps.push(Gap {
                    value: k,
                    reason: "no positive omega".into(),
                }),
                Err(e) if single => return Err(e.into()),
                Err(e) => gaps.push(Gap {
                    value: k,
                    reason: e.to_string(),
                }),
            }
        }
        t
    } else {
        let solved: Vec<(f64, crate::Result<_>)> =
            grid.par_iter().map(|&w| (w, dispersion_k_given_omega(p, w))).collect();
        let mut t = Table::new(&["omega", "k", "residual"]);
        for (w, r) in solved {
            match r {
                Ok(Some(q)) => t.push(vec![w.into(), q.k.into(), q.residual.into()]),
                Ok(None) => gaps.push(Gap {
                    value: w,
                    reason: "no positive k".into(),
                }),
                Err(e) if single => return Err(e.into()),
                Err(e) => gaps.push(Gap {
                    value: w,
                    reason: e.to_string(),
                }),
            }
        }
        t
    };
    meta["gaps"] = gaps_json(&gaps);
    Ok(Output { table, metadata: meta })
}

fn simulate(cfg: &RunConfig) -> Result<Output, Failure> {
    let sim = &cfg.simulation;
    let extra = |error: Option<&FieldError>, metrics: Value| {
        json!({
            "command": Command::Simulate.name(),
            "version": env!("CARGO_PKG_VERSION"),
            "metrics": metrics,
            "error": error.map(|e| e.to_string()),
        })
    };
    match run(&cfg.model, sim) {
        Ok(record) => {
            let metrics = match analyze_record(&record, sim.warmup_time(), cfg.analysis.count_window) {
                Ok(m) => json!(m),
                Err(e) => json!({ "unavailable": e.to_string() }),
            };
            Ok(record_output(&record, extra(None, metrics)))
        }
        Err(RunFailure { error, partial }) => Err(Failure {
            partial: partial.map(|r| record_output(&r, extra(Some(&error), Value::Null))),
            error: error.into(),
        }),
    }
}

fn growth_probe(cfg: &RunConfig) -> Result<Output, Failure> {
    let grid = match (cfg.sweep, cfg.analysis.k) {
        (Some(s), _) if s.target == SweepTarget::K => s.grid(),
        (Some(s), _) => {
            return Err(CliError::config(format!("growth-probe sweeps k, not {}", s.target.as_str())).into())
        }
        (None, Some(k)) => vec![k],
        (None, None) => return Err(CliError::config("growth-probe needs --k").into()),
    };
    let sim = &cfg.simulation;
    let results: Vec<(f64, crate::Result<_>)> = grid
        .par_iter()
        .map(|&k| {
            let (_, snapped) = sim.commensurate(k);
            (k, linear_growth_probe(&cfg.model, snapped, sim))
        })
        .collect();
    let mut t = Table::new(&[
        "k_requested",
        "k",
        "mode",
        "sigma",
        "omega",
        "sigma_predicted",
        "omega_predicted",
        "fit_residual",
    ]);
    let mut gaps = Vec::new();
    let single = grid.len() == 1;
    for (k, r) in results {
        match r {
            Ok(g) => t.push(vec![
                k.into(),
                g.k.into(),
                (g.mode as f64).into(),
                g.sigma.into(),
                g.omega.into(),
                g.predicted.map(|z| z.re).into(),
                g.predicted.map(|z| z.im.abs()).into(),
                g.fit_residual.into(),
            ]),
            Err(e) if single => return Err(e.into()),
            Err(e) => gaps.push(Gap {
                value: k,
                reason: e.to_string(),
            }),
        }
    }
    let mut meta = metadata(Command::GrowthProbe, cfg);
    meta["simulation"] = json!(sim);
    meta["gaps"] = gaps_json(&gaps);
    Ok(Output { table: t, metadata: meta })
}

pub fn execute(command: Command, cfg: &RunConfig) -> Result<Output, Failure> {
    match command {
        Command::Stability => single_or_sweep(command, cfg, &["D", "sufficient_stable"], |p| {
            let b = stability_bound(p)?;
            Ok(vec![b.d.into(), b.sufficient_stable.into()])
        }),
        Command::HopfRegion => single_or_sweep(command, cfg, &["discriminant", "nu_bound", "in_region"], |p| {
            let r = hopf_region(p)?;
            Ok(vec![r.discriminant.into(), r.nu_bound.into(), r.in_region.into()])
        }),
        Command::HopfCurve => {
            let name = require_plane(cfg)?;
            let plane = HopfPlane::parse(name)
                .ok_or_else(|| CliError::config(format!("unknown Hopf plane {name:?}; use alpha-nu, tau-nu or r-nu")))?;
            let grid = plane_grid(cfg, plane.swept(), name)?;
            let curve = trace_hopf_curve(plane, &grid, &cfg.model, cfg.analysis.tie_inhibition)?;
            let mut t = Table::new(&[plane.swept().as_str(), "nu", "omega_c", "consistency_residual", "in_region"]);
            for q in &curve.points {
                t.push(vec![
                    q.value.into(),
                    q.nu_critical.into(),
                    q.omega_c.into(),
                    q.consistency_residual.into(),
                    q.in_region.into(),
                ]);
            }
            let mut meta = metadata(command, cfg);
            meta["plane"] = json!(plane.as_str());
            meta["gaps"] = gaps_json(&curve.gaps);
            Ok(Output { table: t, metadata: meta })
        }
        Command::Dispersion => dispersion(cfg),
        Command::TuringCurve => {
            let name = require_plane(cfg)?;
            let plane = ThPlane::parse(name).ok_or_else(|| CliError::config(format!("unknown Turing-Hopf plane {name:?}")))?;
            let grid = plane_grid(cfg, plane.swept(), name)?;
            let mode = if plane.solves_omega() {
                cfg.analysis.k.ok_or_else(|| CliError::config(format!("plane {name} needs --k")))?
            } else {
                cfg.analysis.omega.ok_or_else(|| CliError::config(format!("plane {name} needs --omega")))?
            };
            let curve = trace_th_curve(plane, mode, &grid, &cfg.model, cfg.analysis.tie_inhibition)?;
            let mut t = Table::new(&[plane.swept().as_str(), "k", "omega", "residual", "branch"]);
            for q in &curve.points {
                let branch = match q.point.branch {
                    Some(Branch::Low) => Cell::Text("low".into()),
                    Some(Branch::High) => Cell::Text("high".into()),
                    None => Cell::Empty,
                };
                t.push(vec![q.value.into(), q.point.k.into(), q.point.omega.into(), q.point.residual.into(), branch]);
            }
            let mut meta = metadata(command, cfg);
            meta["plane"] = json!(plane.as_str());
            meta["gaps"] = gaps_json(&curve.gaps);
            Ok(Output { table: t, metadata: meta })
        }
        Command::Simulate => simulate(cfg),
        Command::GrowthProbe => growth_probe(cfg),
    }
}
