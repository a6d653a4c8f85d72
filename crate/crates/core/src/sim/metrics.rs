use serde::Serialize;

use super::{Scenario, SimTrace};
use crate::error::{Error, Result};
use crate::model::Plane;
use crate::stability::{verify_convergence, ConvergenceReport};

/// Tolerance for convergence to the periodic orbit.
pub const CONVERGENCE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    /// Net forward CoM displacement over the last full sagittal system
    /// period, divided by its length, m/s.
    pub avg_forward_velocity: f64,
    /// Mean of `L_yS(T_k⁻) / (m H)` over the same window, m/s. The deadbeat
    /// law makes this equal `L̄_yS / (m H)`; the CoM velocity averaged over
    /// a step is smaller because momentum dips mid-step.
    pub preimpact_forward_velocity: f64,
    /// `|avg_forward_velocity - L̄_yS / (m H)|`.
    pub velocity_error: f64,
    pub target_velocity: f64,
    /// Stance foot positions after each landing, surface frame.
    pub landing_positions: Vec<(f64, f64)>,
    /// Largest `|(x, L_y, y, L_x)|` over the trace.
    pub max_state_norm: f64,
    pub converged: bool,
    /// Post-impact index from which both planes stay on their orbits.
    pub steps_to_converge: Option<usize>,
    pub sagittal_convergence: Option<ConvergenceReport>,
    pub frontal_convergence: Option<ConvergenceReport>,
}

/// Summarizes a trace of `scenario`. Convergence is judged against the
/// scenario's periodic orbits; planes without a fixed orbit report `None`.
pub fn compute_metrics(trace: &SimTrace, scenario: &Scenario) -> Result<Metrics> {
    let params = &scenario.params;
    let (n1, _) = scenario.sagittal_periods;
    let landings = trace.events.len();
    let first = trace
        .samples
        .first()
        .ok_or_else(|| Error::InsufficientData("empty trace".into()))?;
    if landings < n1 || n1 == 0 {
        return Err(Error::InsufficientData(format!(
            "{landings} landings cannot cover a system period of {n1} steps"
        )));
    }
    let end = &trace.events[landings - 1];
    let (start_time, start_x) = if landings == n1 {
        (first.t, first.com_world.0)
    } else {
        let e = &trace.events[landings - 1 - n1];
        (e.time, com_x_at(trace, e.time)?)
    };
    let window = end.time - start_time;
    if !(window > 0.0) {
        return Err(Error::InsufficientData("zero-length averaging window".into()));
    }
    let avg = (com_x_at(trace, end.time)? - start_x) / window;
    let pre = trace.events[landings - n1..]
        .iter()
        .map(|e| e.pre_sagittal.mom / params.mh())
        .sum::<f64>()
        / n1 as f64;
    let target_velocity = scenario.policy.nominal_sagittal(params) / params.mh();

    let sag = convergence(trace, scenario, Plane::Sagittal);
    let front = convergence(trace, scenario, Plane::Frontal);
    let (converged, steps_to_converge) = match (sag, front) {
        (Some(a), Some(b)) => (
            a.converged && b.converged,
            a.steps_to_converge.zip(b.steps_to_converge).map(|(x, y)| x.max(y)),
        ),
        _ => (false, None),
    };

    let max_state_norm = trace
        .samples
        .iter()
        .map(|s| s.sagittal.to_vector().norm().hypot(s.frontal.to_vector().norm()))
        .fold(0.0, f64::max);

    Ok(Metrics {
        avg_forward_velocity: avg,
        preimpact_forward_velocity: pre,
        velocity_error: (avg - target_velocity).abs(),
        target_velocity,
        landing_positions: trace.events.iter().map(|e| e.foot).collect(),
        max_state_norm,
        converged,
        steps_to_converge,
        sagittal_convergence: sag,
        frontal_convergence: front,
    })
}

fn com_x_at(trace: &SimTrace, t: f64) -> Result<f64> {
    trace
        .samples
        .iter()
        .rev()
        .find(|s| s.t == t)
        .map(|s| s.com_world.0)
        .ok_or_else(|| Error::InsufficientData(format!("no sample at t = {t}")))
}

fn convergence(trace: &SimTrace, scenario: &Scenario, plane: Plane) -> Option<ConvergenceReport> {
    if trace.diverged() {
        return Some(ConvergenceReport {
            converged: false,
            steps_to_converge: None,
        });
    }
    let orbit = scenario.orbit(plane).ok()?;
    verify_convergence(&trace.post_impact_states(plane), &orbit, CONVERGENCE_TOL).ok()
}
