//! Closed-loop simulation of the ALIP-DRS plant with the deadbeat planner.
//!
//! Time advances on a fixed control tick that divides the step duration.
//! Landings fire on the schedule `t = k T_step`. At every tick the planner
//! re-predicts the coming landing from the measured state and the believed
//! surface motion, and the swing-foot curve is re-targeted. At a landing the
//! step length is read off the curve's endpoint.

mod metrics;
mod sweep;

pub use metrics::{compute_metrics, Metrics};
pub use sweep::{uncertainty_sweep, SweepCell};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::footstep::{FootstepCommand, FootstepPlanner, MomentumTarget, SupportFoot, TargetPolicy};
use crate::model::{self, AlipParams, Axis, DrsMotion, PlanarState, Plane};
use crate::stability::{self, PeriodicOrbit};
use crate::trajgen::{PhaseClock, SwingSession, DEFAULT_ORDER};

/// Divergence guard on `|pos|`, m.
pub const MAX_POSITION: f64 = 10.0;
/// Divergence guard on `|mom|`, kg·m²/s.
pub const MAX_MOMENTUM: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Disturbance {
    /// Instantaneous momentum change, kg·m²/s.
    Push { time: f64, plane: Plane, delta: f64 },
    /// Constant additive momentum rate, kg·m²/s², on `[start, end]`.
    LoadBias { start: f64, end: f64, plane: Plane, rate: f64 },
    None,
}

impl Disturbance {
    fn validate(&self) -> Result<()> {
        match *self {
            Disturbance::Push { time, delta, .. } => {
                if !(time.is_finite() && time > 0.0 && delta.is_finite()) {
                    return Err(Error::invalid("push needs a positive time and a finite magnitude"));
                }
            }
            Disturbance::LoadBias { start, end, rate, .. } => {
                if !(start.is_finite() && end.is_finite() && rate.is_finite() && start >= 0.0 && start < end) {
                    return Err(Error::invalid("load bias needs 0 <= start < end and a finite rate"));
                }
            }
            Disturbance::None => {}
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub params: AlipParams,
    /// Surface motion driving the plant.
    pub drs_true: DrsMotion,
    /// Surface motion assumed by the planner.
    pub drs_believed: DrsMotion,
    pub policy: TargetPolicy,
    /// `(N1, N2)` for the sagittal plane.
    pub sagittal_periods: (usize, usize),
    pub frontal_periods: (usize, usize),
    /// Simulated time, s.
    pub duration: f64,
    pub control_tick: f64,
    pub disturbances: Vec<Disturbance>,
    pub initial_sagittal: PlanarState,
    pub initial_frontal: PlanarState,
    pub initial_support: SupportFoot,
    /// Radius of a random offset added to each plane's initial state; 0 disables.
    pub random_radius: f64,
    pub seed: u64,
}

impl Scenario {
    pub fn new(params: AlipParams, drs: DrsMotion, policy: TargetPolicy) -> Self {
        Self {
            params,
            drs_true: drs.clone(),
            drs_believed: drs,
            policy,
            sagittal_periods: (1, 1),
            frontal_periods: (2, 1),
            duration: 10.0,
            control_tick: 1e-3,
            disturbances: Vec::new(),
            initial_sagittal: PlanarState::zero(Plane::Sagittal),
            initial_frontal: PlanarState::zero(Plane::Frontal),
            initial_support: SupportFoot::Right,
            random_radius: 0.0,
            seed: 0,
        }
    }

    pub fn periods(&self, plane: Plane) -> (usize, usize) {
        match plane {
            Plane::Sagittal => self.sagittal_periods,
            Plane::Frontal => self.frontal_periods,
        }
    }

    pub fn ticks_per_step(&self) -> Result<usize> {
        let step = self.params.step_duration();
        if !(self.control_tick.is_finite() && self.control_tick > 0.0 && self.control_tick <= step) {
            return Err(Error::invalid(format!("control tick {} must lie in (0, T_step]", self.control_tick)));
        }
        let n = (step / self.control_tick).round();
        if (n * self.control_tick - step).abs() > 1e-9 * step {
            return Err(Error::invalid(format!(
                "control tick {} does not divide the step duration {step}",
                self.control_tick
            )));
        }
        Ok(n as usize)
    }

    /// Number of landings in the run.
    pub fn step_count(&self) -> usize {
        (self.duration / self.params.step_duration() * (1.0 + 1e-12)).floor() as usize
    }

    pub fn validate(&self) -> Result<()> {
        self.ticks_per_step()?;
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(Error::invalid(format!("duration must be positive, got {}", self.duration)));
        }
        if !(self.random_radius.is_finite() && self.random_radius >= 0.0) {
            return Err(Error::invalid("random radius must be non-negative"));
        }
        self.initial_sagittal.expect_plane(Plane::Sagittal)?;
        self.initial_frontal.expect_plane(Plane::Frontal)?;
        if !(self.initial_sagittal.is_finite() && self.initial_frontal.is_finite()) {
            return Err(Error::invalid("initial states must be finite"));
        }
        for d in &self.disturbances {
            d.validate()?;
        }
        for plane in [Plane::Sagittal, Plane::Frontal] {
            let (n1, n2) = self.periods(plane);
            if n1 == 0 || n2 == 0 {
                return Err(Error::invalid("N1 and N2 must be positive"));
            }
        }
        Ok(())
    }

    /// Initial states after the seeded random offset.
    pub fn initial_states(&self) -> (PlanarState, PlanarState) {
        let (mut sag, mut front) = (self.initial_sagittal, self.initial_frontal);
        if self.random_radius > 0.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            for state in [&mut sag, &mut front] {
                let r = self.random_radius * rng.random::<f64>().sqrt();
                let theta = std::f64::consts::TAU * rng.random::<f64>();
                state.pos += r * theta.cos();
                state.mom += r * theta.sin();
            }
        }
        (sag, front)
    }

    /// Per-step targets over one system period of `plane`, if the policy
    /// repeats with that period.
    pub fn orbit_targets(&self, plane: Plane) -> Result<Vec<f64>> {
        let (n1, _) = self.periods(plane);
        let seq = self
            .policy
            .step_targets(&self.params, plane, self.initial_support, 2 * n1)
            .ok_or_else(|| Error::invalid("path-tracking targets depend on the trajectory; no fixed orbit"))?;
        if seq[..n1] != seq[n1..] {
            return Err(Error::invalid(format!(
                "{} targets do not repeat every N1 = {n1} steps",
                plane_name(plane)
            )));
        }
        Ok(seq[..n1].to_vec())
    }

    /// Periodic orbit the closed loop converges to, accounting for any
    /// difference between the true and believed surface motion.
    pub fn orbit(&self, plane: Plane) -> Result<PeriodicOrbit> {
        let (n1, n2) = self.periods(plane);
        let targets = self.orbit_targets(plane)?;
        stability::periodic_orbit_mismatched(&self.params, &self.drs_true, &self.drs_believed, plane, n1, n2, &targets)
    }
}

fn plane_name(plane: Plane) -> &'static str {
    match plane {
        Plane::Sagittal => "sagittal",
        Plane::Frontal => "frontal",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub sagittal: PlanarState,
    pub frontal: PlanarState,
    pub phase: f64,
    pub support: SupportFoot,
    /// A landing happened at this instant; the states are post-impact.
    pub event: bool,
    pub u_x: f64,
    pub u_y: f64,
    /// CoM in the inertial frame, including the surface displacement.
    pub com_world: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImpactEvent {
    /// Landing number, starting at 1.
    pub index: usize,
    pub time: f64,
    pub command: FootstepCommand,
    pub pre_sagittal: PlanarState,
    pub pre_frontal: PlanarState,
    pub post_sagittal: PlanarState,
    pub post_frontal: PlanarState,
    /// Targets this landing's pre-impact momenta were steered to; `None`
    /// for the first landing, which precedes any command.
    pub targeted: Option<MomentumTarget>,
    /// New stance foot in the surface frame.
    pub foot: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DisturbanceRecord {
    pub time: f64,
    pub disturbance: Disturbance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum SimStatus {
    Completed,
    Diverged { time: f64, plane: Plane },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimTrace {
    pub samples: Vec<Sample>,
    pub events: Vec<ImpactEvent>,
    pub disturbance_log: Vec<DisturbanceRecord>,
    pub status: SimStatus,
}

impl SimTrace {
    /// Initial state followed by every post-impact state.
    pub fn post_impact_states(&self, plane: Plane) -> Vec<PlanarState> {
        let first = self.samples.first().map(|s| pick(plane, s.sagittal, s.frontal));
        first
            .into_iter()
            .chain(self.events.iter().map(|e| pick(plane, e.post_sagittal, e.post_frontal)))
            .collect()
    }

    pub fn diverged(&self) -> bool {
        matches!(self.status, SimStatus::Diverged { .. })
    }
}

fn pick(plane: Plane, sag: PlanarState, front: PlanarState) -> PlanarState {
    match plane {
        Plane::Sagittal => sag,
        Plane::Frontal => front,
    }
}

struct Plant<'a> {
    params: &'a AlipParams,
    drs: &'a DrsMotion,
    disturbances: &'a [Disturbance],
}

impl Plant<'_> {
    /// Advances both planes over `(t1, t2]`, splitting at disturbance
    /// breakpoints. Pushes at exactly `t2` are applied at the end.
    fn advance(&self, states: &mut [PlanarState; 2], t1: f64, t2: f64, log: &mut Vec<DisturbanceRecord>) {
        let mut cuts = vec![t1, t2];
        for d in self.disturbances {
            match *d {
                Disturbance::Push { time, .. } => cuts.push(time),
                Disturbance::LoadBias { start, end, .. } => cuts.extend([start, end]),
                Disturbance::None => {}
            }
        }
        cuts.retain(|&c| c >= t1 && c <= t2);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mid = 0.5 * (a + b);
            for state in states.iter_mut() {
                let mut next = model::flow_unchecked(state, a, b, self.params, self.drs).to_vector();
                for d in self.disturbances {
                    if let Disturbance::LoadBias { start, end, plane, rate } = *d {
                        if plane == state.plane && start <= mid && mid <= end {
                            next += model::bias_integral(self.params, plane, rate, b - a).to_vector();
                        }
                    }
                }
                *state = PlanarState::from_vector(state.plane, next);
            }
            for d in self.disturbances {
                if let Disturbance::Push { time, plane, delta } = *d {
                    if time == b {
                        let i = usize::from(plane == Plane::Frontal);
                        states[i].mom += delta;
                        log.push(DisturbanceRecord { time, disturbance: *d });
                    }
                }
            }
        }
        for d in self.disturbances {
            if let Disturbance::LoadBias { start, end, .. } = *d {
                for edge in [start, end] {
                    if edge > t1 && edge <= t2 {
                        log.push(DisturbanceRecord { time: edge, disturbance: *d });
                    }
                }
            }
        }
    }
}

fn diverged_plane(states: &[PlanarState; 2]) -> Option<Plane> {
    states
        .iter()
        .find(|s| !s.is_finite() || s.pos.abs() > MAX_POSITION || s.mom.abs() > MAX_MOMENTUM)
        .map(|s| s.plane)
}

/// Swing foot (surface frame) when the run starts: beside the stance foot.
fn initial_swing_foot(params: &AlipParams, support: SupportFoot) -> (f64, f64) {
    match support {
        SupportFoot::Right => (0.0, params.step_width()),
        SupportFoot::Left => (0.0, -params.step_width()),
    }
}

pub fn run(scenario: &Scenario) -> Result<SimTrace> {
    scenario.validate()?;
    let params = &scenario.params;
    let step = params.step_duration();
    let n = scenario.ticks_per_step()?;
    let dt = step / n as f64;
    let total_ticks = (scenario.duration / dt * (1.0 + 1e-12)).floor() as usize;

    let plant = Plant {
        params,
        drs: &scenario.drs_true,
        disturbances: &scenario.disturbances,
    };
    let mut planner = FootstepPlanner::new(
        *params,
        scenario.drs_believed.clone(),
        scenario.policy,
        scenario.initial_support,
    );
    let mut swing = SwingSession::new(PhaseClock::new(0.0, step)?, DEFAULT_ORDER);

    let (sag, front) = scenario.initial_states();
    let mut states = [sag, front];
    let mut foot = (0.0, 0.0);
    let mut swing_foot = initial_swing_foot(params, scenario.initial_support);
    let mut previous_targets: Option<MomentumTarget> = None;

    let mut trace = SimTrace {
        samples: Vec::with_capacity(total_ticks + 1),
        events: Vec::with_capacity(scenario.step_count()),
        disturbance_log: Vec::new(),
        status: SimStatus::Completed,
    };
    let world = |states: &[PlanarState; 2], foot: (f64, f64), t: f64| {
        (
            scenario.drs_true.position(Axis::X, t) + foot.0 + states[0].pos,
            scenario.drs_true.position(Axis::Y, t) + foot.1 + states[1].pos,
        )
    };

    let mut t_prev = 0.0;
    for i in 0..=total_ticks {
        let (k, j) = (i / n, i % n);
        let t = k as f64 * step + j as f64 * dt;
        if i > 0 {
            plant.advance(&mut states, t_prev, t, &mut trace.disturbance_log);
        }
        if let Some(plane) = diverged_plane(&states) {
            trace.status = SimStatus::Diverged { time: t, plane };
            break;
        }

        let landing = j == 0 && k > 0;
        if landing {
            // last update of the step, at T_k⁻
            let command = planner.command(&states[0], &states[1], t)?;
            swing.update(t, (0.0, 0.0), &command);
            let pre = states;
            let u_x = pre[0].pos + swing.x.coeffs()[DEFAULT_ORDER];
            let u_y = pre[1].pos + swing.y.coeffs()[DEFAULT_ORDER];
            states = [model::reset(&pre[0], u_x), model::reset(&pre[1], u_y)];
            swing_foot = foot;
            foot = (foot.0 + u_x, foot.1 + u_y);
            trace.events.push(ImpactEvent {
                index: k,
                time: t,
                command,
                pre_sagittal: pre[0],
                pre_frontal: pre[1],
                post_sagittal: states[0],
                post_frontal: states[1],
                targeted: previous_targets,
                foot,
            });
            previous_targets = Some(planner.current_targets());
            planner.advance();
            swing.begin_step(t);
        }
        if j == 0 {
            planner.latch_targets(world(&states, foot, t), t);
        }

        let command = planner.command(&states[0], &states[1], t)?;
        let swing_rel = (swing_foot.0 - foot.0 - states[0].pos, swing_foot.1 - foot.1 - states[1].pos);
        swing.update(t, swing_rel, &command);
        trace.samples.push(Sample {
            t,
            sagittal: states[0],
            frontal: states[1],
            phase: j as f64 / n as f64,
            support: planner.support(),
            event: landing,
            u_x: command.u_x,
            u_y: command.u_y,
            com_world: world(&states, foot, t),
        });
        t_prev = t;
    }
    Ok(trace)
}
