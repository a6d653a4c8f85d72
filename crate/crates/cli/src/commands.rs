use std::fs;
use std::path::Path;

use alip_drs::model::Plane;
use alip_drs::sim::{self, compute_metrics, Metrics, SimStatus};
use alip_drs::stability::stability_report;
use alip_drs::{Error, TargetPolicy};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::output::{sweep_csv, trace_csv, write_atomic};
use crate::{presets, CliError, EXIT_DIVERGED, EXIT_OK};

/// Default belief-perturbation grid.
pub const DEFAULT_GRID_DA: [f64; 4] = [0.0, 0.013, 0.026, 0.04];
pub const DEFAULT_GRID_DT: [f64; 4] = [0.0, 0.13, 0.26, 0.4];

#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub duration: Option<f64>,
    pub seed: Option<u64>,
}

pub fn load_config(config: Option<&Path>, preset: Option<&str>) -> Result<RunConfig, CliError> {
    match (config, preset) {
        (Some(path), None) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            RunConfig::parse(&text).map_err(|e| match e {
                CliError::Parse(m) => CliError::Parse(format!("{}: {m}", path.display())),
                other => other,
            })
        }
        (None, Some(name)) => presets::preset(name).ok_or_else(|| {
            CliError::Usage(format!("unknown preset {name:?}; expected one of {}", presets::NAMES.join(", ")))
        }),
        (Some(_), Some(_)) => Err(CliError::Usage("--config and --preset are mutually exclusive".into())),
        (None, None) => Err(CliError::Usage("one of --config or --preset is required".into())),
    }
}

pub fn apply_overrides(cfg: &mut RunConfig, overrides: &Overrides) {
    if let Some(d) = overrides.duration {
        cfg.run.duration = d;
    }
    if let Some(s) = overrides.seed {
        cfg.run.seed = s;
    }
}

#[derive(Debug, Clone)]
pub struct SimulateOutcome {
    pub status: SimStatus,
    pub metrics: Result<Metrics, String>,
    pub events: usize,
}

impl SimulateOutcome {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            SimStatus::Completed => EXIT_OK,
            SimStatus::Diverged { .. } => EXIT_DIVERGED,
        }
    }
}

/// Runs the scenario and writes `trace.csv`, `metrics.json` and
/// `status.json` into `out`. Nothing is written unless the config is valid.
pub fn simulate(cfg: &RunConfig, out: &Path) -> Result<SimulateOutcome, CliError> {
    let scenario = cfg.to_scenario()?;
    let trace = sim::run(&scenario).map_err(|e| CliError::Numerical(e.to_string()))?;
    let metrics = compute_metrics(&trace, &scenario).map_err(|e| e.to_string());
    let outcome = SimulateOutcome {
        status: trace.status,
        metrics,
        events: trace.events.len(),
    };

    fs::create_dir_all(out)?;
    write_atomic(&out.join("trace.csv"), &trace_csv(&trace))?;
    let metrics_json = match &outcome.metrics {
        Ok(m) => serde_json::to_value(m).expect("metrics serialize"),
        Err(e) => json!({ "error": e }),
    };
    write_atomic(&out.join("metrics.json"), &pretty(&metrics_json))?;
    let mut status = serde_json::to_value(trace.status).expect("status serializes");
    if let Value::Object(map) = &mut status {
        map.insert("exit_code".into(), outcome.exit_code().into());
        map.insert("events".into(), outcome.events.into());
        map.insert("samples".into(), trace.samples.len().into());
        map.insert("disturbances_applied".into(), trace.disturbance_log.len().into());
    }
    write_atomic(&out.join("status.json"), &pretty(&status))?;
    Ok(outcome)
}

/// Monodromy certificates and periodic orbits for both planes.
pub fn stability(cfg: &RunConfig) -> Result<Value, CliError> {
    let scenario = cfg.to_scenario()?;
    let mut planes = serde_json::Map::new();
    for plane in [Plane::Sagittal, Plane::Frontal] {
        let (n1, n2) = scenario.periods(plane);
        let report = stability_report(&scenario.params, plane, n1)?;
        let orbit = match scenario.orbit(plane) {
            Ok(o) => json!({
                "n1": o.n1,
                "n2": o.n2,
                "t_sys": o.t_sys,
                "targets": o.targets,
                "anchors": o.anchors.iter().map(|a| [a.pos, a.mom]).collect::<Vec<_>>(),
            }),
            Err(Error::InvalidArgument(_)) if matches!(scenario.policy, TargetPolicy::PathTracking { .. }) => {
                Value::Null
            }
            Err(e) => return Err(e.into()),
        };
        let key = match plane {
            Plane::Sagittal => "sagittal",
            Plane::Frontal => "frontal",
        };
        planes.insert(
            key.into(),
            json!({ "n1": n1, "n2": n2, "report": report, "orbit": orbit }),
        );
    }
    Ok(Value::Object(planes))
}

/// Parses a comma-separated list of reals.
pub fn parse_grid(flag: &str, list: &str) -> Result<Vec<f64>, CliError> {
    list.split(',')
        .map(|item| {
            let item = item.trim();
            item.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Usage(format!("{flag}: {item:?} is not a finite number")))
        })
        .collect()
}

/// Removes repeated values, keeping first occurrences; returns the dropped ones.
pub fn dedup_grid(values: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut kept: Vec<f64> = Vec::with_capacity(values.len());
    let mut dropped = Vec::new();
    for &v in values {
        if kept.contains(&v) {
            dropped.push(v);
        } else {
            kept.push(v);
        }
    }
    (kept, dropped)
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub rows: usize,
    pub unbounded: usize,
    pub failed: usize,
}

pub fn sweep(cfg: &RunConfig, delta_a: &[f64], delta_t: &[f64], out: &Path) -> Result<SweepOutcome, CliError> {
    let scenario = cfg.to_scenario()?;
    let grid = sim::uncertainty_sweep(&scenario, delta_a, delta_t)?;
    fs::create_dir_all(out)?;
    write_atomic(&out.join("sweep.csv"), &sweep_csv(&grid))?;
    let cells = grid.iter().flatten();
    Ok(SweepOutcome {
        rows: delta_a.len() * delta_t.len(),
        unbounded: cells.clone().filter(|c| !c.bounded).count(),
        failed: cells.filter(|c| c.metrics.is_none()).count(),
    })
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}
