//! TOML scenario files.
//!
//! ```toml
//! [params]
//! mass = 46.1
//! com_height = 0.9
//! step_duration = 0.4
//! step_width = 0.2
//!
//! [drs_true]
//! x_amplitude = [0.04]
//! x_period = [0.4]
//! x_phase = [0.0]
//!
//! [targets]
//! policy = "step-width"
//! sagittal = 4.1
//!
//! [periods]
//! sagittal_n1 = 1
//! sagittal_n2 = 1
//! frontal_n1 = 2
//! frontal_n2 = 1
//!
//! [run]
//! duration = 10.0
//!
//! [[disturbances]]
//! kind = "push"
//! time = 4.2
//! plane = "sagittal"
//! delta = 18.0
//! ```
//!
//! Every section except `[params]` and `[targets]` may be omitted.
//! `[drs_believed]` defaults to `[drs_true]`. Unknown keys are rejected.

use alip_drs::model::{AlipParams, Axis, DrsMotion, PlanarState, Plane, SampledProfile, Sinusoid};
use alip_drs::sim::{Disturbance, Scenario};
use alip_drs::{SupportFoot, TargetPolicy};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: ParamsSection,
    #[serde(default, skip_serializing_if = "DrsSection::is_still")]
    pub drs_true: DrsSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drs_believed: Option<DrsSection>,
    pub targets: TargetsSection,
    #[serde(default)]
    pub periods: PeriodsSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub disturbances: Vec<DisturbanceEntry>,
}

fn default_gravity() -> f64 {
    9.81
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub mass: f64,
    pub com_height: f64,
    #[serde(default = "default_gravity")]
    pub gravity: f64,
    pub step_duration: f64,
    pub step_width: f64,
}

impl Default for ParamsSection {
    fn default() -> Self {
        Self {
            mass: 46.1,
            com_height: 0.9,
            gravity: 9.81,
            step_duration: 0.4,
            step_width: 0.2,
        }
    }
}

/// Sum of sinusoids per axis, `a cos(2π t / T + φ)`, plus an optional
/// periodic sampled profile starting at `t = 0`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DrsSection {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub x_amplitude: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub x_period: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub x_phase: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub y_amplitude: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub y_period: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub y_phase: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_samples: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_sample_spacing: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_samples: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_sample_spacing: Option<f64>,
}

impl DrsSection {
    pub fn sinusoid(axis: Axis, amplitude: f64, period: f64) -> Self {
        let mut s = Self::default();
        s.push(axis, amplitude, period, 0.0);
        s
    }

    pub fn push(&mut self, axis: Axis, amplitude: f64, period: f64, phase: f64) {
        let (a, t, p) = match axis {
            Axis::X => (&mut self.x_amplitude, &mut self.x_period, &mut self.x_phase),
            Axis::Y => (&mut self.y_amplitude, &mut self.y_period, &mut self.y_phase),
        };
        a.push(amplitude);
        t.push(period);
        p.push(phase);
    }

    fn is_still(&self) -> bool {
        *self == Self::default()
    }

    pub fn to_motion(&self, section: &str) -> Result<DrsMotion, CliError> {
        let mut terms = Vec::new();
        for (axis, a, t, p) in [
            (Axis::X, &self.x_amplitude, &self.x_period, &self.x_phase),
            (Axis::Y, &self.y_amplitude, &self.y_period, &self.y_phase),
        ] {
            let name = axis_name(axis);
            if t.len() != a.len() || !(p.is_empty() || p.len() == a.len()) {
                return Err(CliError::Config(format!(
                    "[{section}] {name}_amplitude, {name}_period and {name}_phase must have equal lengths"
                )));
            }
            for i in 0..a.len() {
                let phase = p.get(i).copied().unwrap_or(0.0);
                terms.push(
                    Sinusoid::new(axis, a[i], t[i], phase).map_err(|e| CliError::Config(format!("[{section}] {e}")))?,
                );
            }
        }
        let mut motion = DrsMotion::new(terms);
        for (axis, samples, spacing) in [
            (Axis::X, &self.x_samples, self.x_sample_spacing),
            (Axis::Y, &self.y_samples, self.y_sample_spacing),
        ] {
            match (samples, spacing) {
                (Some(samples), Some(spacing)) => {
                    let profile = SampledProfile::new(samples.clone(), spacing)
                        .map_err(|e| CliError::Config(format!("[{section}] {e}")))?;
                    motion = motion.with_profile(axis, profile);
                }
                (None, None) => {}
                _ => {
                    let name = axis_name(axis);
                    return Err(CliError::Config(format!(
                        "[{section}] {name}_samples and {name}_sample_spacing must be given together"
                    )));
                }
            }
        }
        Ok(motion)
    }
}

fn axis_name(axis: Axis) -> &'static str {
    match axis {
        Axis::X => "x",
        Axis::Y => "y",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyKind {
    /// Fixed `sagittal` and `frontal` momenta.
    Constant,
    /// Fixed `sagittal`; frontal alternates with the step width.
    StepWidth,
    /// Base-path feedback with gains and a desired constant velocity.
    PathTracking,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetsSection {
    pub policy: PolicyKind,
    /// `L̄_yS`, kg·m²/s.
    #[serde(default)]
    pub sagittal: f64,
    /// `L̄_xS`, kg·m²/s (constant policy only).
    #[serde(default)]
    pub frontal: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gain_x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gain_y: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_y: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub velocity_x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub velocity_y: Option<f64>,
}

impl TargetsSection {
    pub fn step_width(sagittal: f64) -> Self {
        Self {
            policy: PolicyKind::StepWidth,
            sagittal,
            frontal: 0.0,
            gain_x: None,
            gain_y: None,
            start_x: None,
            start_y: None,
            velocity_x: None,
            velocity_y: None,
        }
    }

    fn to_policy(&self) -> TargetPolicy {
        let get = |v: Option<f64>| v.unwrap_or(0.0);
        match self.policy {
            PolicyKind::Constant => TargetPolicy::Constant {
                sagittal: self.sagittal,
                frontal: self.frontal,
            },
            PolicyKind::StepWidth => TargetPolicy::StepWidth { sagittal: self.sagittal },
            PolicyKind::PathTracking => TargetPolicy::PathTracking {
                gains: (get(self.gain_x), get(self.gain_y)),
                start: (get(self.start_x), get(self.start_y)),
                velocity: (get(self.velocity_x), get(self.velocity_y)),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PeriodsSection {
    pub sagittal_n1: usize,
    pub sagittal_n2: usize,
    pub frontal_n1: usize,
    pub frontal_n2: usize,
}

impl Default for PeriodsSection {
    fn default() -> Self {
        Self {
            sagittal_n1: 1,
            sagittal_n2: 1,
            frontal_n1: 2,
            frontal_n2: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    /// Simulated time, s.
    pub duration: f64,
    pub control_tick: f64,
    pub seed: u64,
    /// Radius of the seeded random offset on each plane's initial state.
    pub random_radius: f64,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            duration: 10.0,
            control_tick: 0.001,
            seed: 0,
            random_radius: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialSection {
    pub x: f64,
    pub l_y: f64,
    pub y: f64,
    pub l_x: f64,
    pub support: SupportFoot,
}

impl Default for InitialSection {
    fn default() -> Self {
        Self {
            x: 0.0,
            l_y: 0.0,
            y: 0.0,
            l_x: 0.0,
            support: SupportFoot::Right,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DisturbanceEntry {
    Push { time: f64, plane: Plane, delta: f64 },
    LoadBias { start: f64, end: f64, plane: Plane, rate: f64 },
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn to_scenario(&self) -> Result<Scenario, CliError> {
        let p = &self.params;
        let params = AlipParams::with_gravity(p.mass, p.com_height, p.gravity, p.step_duration, p.step_width)
            .map_err(|e| CliError::Config(format!("[params] {e}")))?;
        let drs_true = self.drs_true.to_motion("drs_true")?;
        let drs_believed = match &self.drs_believed {
            Some(b) => b.to_motion("drs_believed")?,
            None => drs_true.clone(),
        };
        let mut scenario = Scenario::new(params, drs_true, self.targets.to_policy());
        scenario.drs_believed = drs_believed;
        scenario.sagittal_periods = (self.periods.sagittal_n1, self.periods.sagittal_n2);
        scenario.frontal_periods = (self.periods.frontal_n1, self.periods.frontal_n2);
        scenario.duration = self.run.duration;
        scenario.control_tick = self.run.control_tick;
        scenario.seed = self.run.seed;
        scenario.random_radius = self.run.random_radius;
        scenario.initial_sagittal = PlanarState::new(Plane::Sagittal, self.initial.x, self.initial.l_y);
        scenario.initial_frontal = PlanarState::new(Plane::Frontal, self.initial.y, self.initial.l_x);
        scenario.initial_support = self.initial.support;
        scenario.disturbances = self
            .disturbances
            .iter()
            .map(|d| match *d {
                DisturbanceEntry::Push { time, plane, delta } => Disturbance::Push { time, plane, delta },
                DisturbanceEntry::LoadBias { start, end, plane, rate } => {
                    Disturbance::LoadBias { start, end, plane, rate }
                }
            })
            .collect();
        scenario.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(scenario)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn presets_round_trip() {
        for name in presets::NAMES {
            let cfg = presets::preset(name).unwrap();
            let text = cfg.to_toml();
            let back = RunConfig::parse(&text).unwrap();
            assert_eq!(back, cfg, "{name}:\n{text}");
            assert_eq!(back.to_toml(), text);
            cfg.to_scenario().unwrap();
        }
    }

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = RunConfig::parse(
            "[params]\nmass = 46.1\ncom_height = 0.9\nstep_duration = 0.4\nstep_width = 0.2\n\n[targets]\npolicy = \"constant\"\n",
        )
        .unwrap();
        let s = cfg.to_scenario().unwrap();
        assert_eq!(s.control_tick, 0.001);
        assert_eq!(s.frontal_periods, (2, 1));
        assert!(!s.drs_true.has_motion(Axis::X));
    }

    #[test]
    fn unknown_key_reports_position() {
        let err = RunConfig::parse("[params]\nmass = 46.1\nbogus = 1\n").unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
        assert!(err.contains("bogus"), "{err}");
    }

    #[test]
    fn mismatched_lengths_rejected() {
        let mut cfg = presets::preset("case_a").unwrap();
        cfg.drs_true.x_period.push(1.0);
        assert!(matches!(cfg.to_scenario(), Err(CliError::Config(_))));
    }

    #[test]
    fn disturbances_parse() {
        let mut text = presets::preset("case_a").unwrap().to_toml();
        text.push_str(
            "\n[[disturbances]]\nkind = \"push\"\ntime = 4.2\nplane = \"sagittal\"\ndelta = 18.0\n\n[[disturbances]]\nkind = \"load-bias\"\nstart = 1.0\nend = 2.0\nplane = \"frontal\"\nrate = -3.0\n",
        );
        let s = RunConfig::parse(&text).unwrap().to_scenario().unwrap();
        assert_eq!(s.disturbances.len(), 2);
        assert!(RunConfig::parse(&text.replace("delta = 18.0", "delta = 18.0\nextra = 1")).is_err());
    }
}
