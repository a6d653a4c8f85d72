//! Deadbeat foot placement.
//!
//! During step `k` the planner predicts the state at the coming landing
//! `T_k⁻`, then picks the CoM position relative to the swing foot so that the
//! momentum at the end of the following step, `T_{k+1}⁻`, equals the target.
//! Momentum is impact invariant and the post-impact position is the swing
//! foot offset, so one landing decides the next step-end momentum exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, AlipParams, DrsMotion, PlanarState, Plane};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SupportFoot {
    Left,
    Right,
}

impl SupportFoot {
    pub fn flip(self) -> Self {
        match self {
            SupportFoot::Left => SupportFoot::Right,
            SupportFoot::Right => SupportFoot::Left,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SupportFoot::Left => "left",
            SupportFoot::Right => "right",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetSource {
    ConstantVelocity,
    StepWidth,
    PathTracking,
}

/// Desired contact momenta at the end of the next step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentumTarget {
    /// `L̄_yS`, kg·m²/s.
    pub sagittal: f64,
    /// `L̄_xS`, kg·m²/s.
    pub frontal: f64,
    pub source: TargetSource,
}

impl MomentumTarget {
    pub fn constant(sagittal: f64, frontal: f64) -> Self {
        Self {
            sagittal,
            frontal,
            source: TargetSource::ConstantVelocity,
        }
    }

    /// Sagittal target from a forward velocity, frontal target from the
    /// step width for the foot currently in support.
    pub fn step_width(params: &AlipParams, sagittal: f64, support: SupportFoot) -> Self {
        Self {
            sagittal,
            frontal: desired_frontal_momentum(params, support),
            source: TargetSource::StepWidth,
        }
    }

    pub fn for_plane(&self, plane: Plane) -> f64 {
        match plane {
            Plane::Sagittal => self.sagittal,
            Plane::Frontal => self.frontal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FootstepCommand {
    /// Forward step length applied at the landing, m.
    pub u_x: f64,
    /// Lateral step length applied at the landing, m.
    pub u_y: f64,
    /// `x_SwC(T_k⁻)`: CoM position relative to the landing foot, m.
    pub x_swc: f64,
    /// `y_SwC(T_k⁻)`.
    pub y_swc: f64,
    /// Predicted states at the landing instant.
    pub predicted_sagittal: PlanarState,
    pub predicted_frontal: PlanarState,
    pub target: MomentumTarget,
    pub support: SupportFoot,
    pub decided_at: f64,
}

impl FootstepCommand {
    pub fn step_length(&self, plane: Plane) -> f64 {
        match plane {
            Plane::Sagittal => self.u_x,
            Plane::Frontal => self.u_y,
        }
    }
}

/// Momentum component of the flow from `t` to `t_end`.
pub fn predict_preimpact_momentum(
    state: &PlanarState,
    t: f64,
    t_end: f64,
    params: &AlipParams,
    drs: &DrsMotion,
) -> Result<f64> {
    Ok(model::flow(state, t, t_end, params, drs)?.mom)
}

/// `x_SwC = (L̄ - V2 - cosh(l T) L⁻) / (m H l sinh(l T))`.
pub fn plan_sagittal_landing(l_pre: f64, target: f64, v2_next: f64, params: &AlipParams) -> f64 {
    let (c, k) = landing_coefficients(params);
    (target - v2_next - c * l_pre) / k
}

/// `y_SwC = (-L̄ + V2 + cosh(l T) L⁻) / (m H l sinh(l T))`.
pub fn plan_frontal_landing(l_pre: f64, target: f64, v2_next: f64, params: &AlipParams) -> f64 {
    let (c, k) = landing_coefficients(params);
    (-target + v2_next + c * l_pre) / k
}

pub(crate) fn plan_landing(plane: Plane, l_pre: f64, target: f64, v2_next: f64, params: &AlipParams) -> f64 {
    match plane {
        Plane::Sagittal => plan_sagittal_landing(l_pre, target, v2_next, params),
        Plane::Frontal => plan_frontal_landing(l_pre, target, v2_next, params),
    }
}

/// `(cosh(l T), m H l sinh(l T))` for the step duration.
fn landing_coefficients(params: &AlipParams) -> (f64, f64) {
    let x = params.omega() * params.step_duration();
    (x.cosh(), params.mhl() * x.sinh())
}

/// Foot placement for the landing at `t_k` given the states at `t_now`.
///
/// The step after the landing ends at `t_k1`; its length must equal the
/// configured step duration.
#[allow(clippy::too_many_arguments)]
pub fn control_commands(
    state_sag: &PlanarState,
    state_front: &PlanarState,
    t_now: f64,
    t_k: f64,
    t_k1: f64,
    params: &AlipParams,
    drs: &DrsMotion,
    targets: &MomentumTarget,
    support: SupportFoot,
) -> Result<FootstepCommand> {
    state_sag.expect_plane(Plane::Sagittal)?;
    state_front.expect_plane(Plane::Frontal)?;
    if !(t_now.is_finite() && t_k.is_finite() && t_k1.is_finite()) {
        return Err(Error::invalid("command times must be finite"));
    }
    if !(t_now <= t_k && t_k < t_k1) {
        return Err(Error::invalid(format!(
            "command times must satisfy t_now <= T_k < T_k+1, got {t_now}, {t_k}, {t_k1}"
        )));
    }
    let duration = params.step_duration();
    if ((t_k1 - t_k) - duration).abs() > 1e-9 * duration {
        return Err(Error::invalid(format!(
            "next step spans {} s but the step duration is {duration} s",
            t_k1 - t_k
        )));
    }

    let mut swing = [0.0; 2];
    let mut predicted = [*state_sag, *state_front];
    for (i, plane) in [Plane::Sagittal, Plane::Frontal].into_iter().enumerate() {
        let pre = model::flow_unchecked(&predicted[i], t_now, t_k, params, drs);
        let v_next = model::forcing_unchecked(params, drs, plane, t_k, t_k1);
        swing[i] = plan_landing(plane, pre.mom, targets.for_plane(plane), v_next.v2, params);
        predicted[i] = pre;
    }
    Ok(FootstepCommand {
        u_x: predicted[0].pos - swing[0],
        u_y: predicted[1].pos - swing[1],
        x_swc: swing[0],
        y_swc: swing[1],
        predicted_sagittal: predicted[0],
        predicted_frontal: predicted[1],
        target: *targets,
        support,
        decided_at: t_now,
    })
}

/// `±½ m H W l sinh(l T) / (1 + cosh(l T))`, positive while the right foot
/// supports. Applied as the target for the end of the following step.
pub fn desired_frontal_momentum(params: &AlipParams, support: SupportFoot) -> f64 {
    let l = params.omega();
    let x = l * params.step_duration();
    let magnitude = 0.5 * params.mh() * params.step_width() * l * x.sinh() / (1.0 + x.cosh());
    match support {
        SupportFoot::Right => magnitude,
        SupportFoot::Left => -magnitude,
    }
}

/// Momentum targets that steer the base toward a desired path:
/// `L̄_xS = K_y (y_b - y_bd) + m H ẏ_bd`, `L̄_yS = K_x (x_b - x_bd) + m H ẋ_bd`.
pub fn path_tracking_targets(
    base_pos: (f64, f64),
    base_des: (f64, f64),
    base_des_vel: (f64, f64),
    gains: (f64, f64),
    params: &AlipParams,
) -> MomentumTarget {
    let mh = params.mh();
    MomentumTarget {
        sagittal: gains.0 * (base_pos.0 - base_des.0) + mh * base_des_vel.0,
        frontal: gains.1 * (base_pos.1 - base_des.1) + mh * base_des_vel.1,
        source: TargetSource::PathTracking,
    }
}

/// How the planner chooses targets step by step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum TargetPolicy {
    /// Fixed targets in both planes.
    Constant { sagittal: f64, frontal: f64 },
    /// Fixed sagittal target; frontal target alternates with the support foot.
    StepWidth { sagittal: f64 },
    /// Base-path feedback. The step-width term is added on top of the
    /// frontal feedback so the lateral gait keeps its width.
    PathTracking {
        gains: (f64, f64),
        start: (f64, f64),
        velocity: (f64, f64),
    },
}

impl TargetPolicy {
    pub fn targets(&self, params: &AlipParams, support: SupportFoot, base_pos: (f64, f64), t: f64) -> MomentumTarget {
        match *self {
            TargetPolicy::Constant { sagittal, frontal } => MomentumTarget::constant(sagittal, frontal),
            TargetPolicy::StepWidth { sagittal } => MomentumTarget::step_width(params, sagittal, support),
            TargetPolicy::PathTracking { gains, start, velocity } => {
                let desired = (start.0 + velocity.0 * t, start.1 + velocity.1 * t);
                let mut target = path_tracking_targets(base_pos, desired, velocity, gains, params);
                target.frontal += desired_frontal_momentum(params, support);
                target
            }
        }
    }

    /// Sagittal momentum the policy asks for in steady state.
    pub fn nominal_sagittal(&self, params: &AlipParams) -> f64 {
        match *self {
            TargetPolicy::Constant { sagittal, .. } | TargetPolicy::StepWidth { sagittal } => sagittal,
            TargetPolicy::PathTracking { velocity, .. } => params.mh() * velocity.0,
        }
    }

    /// Per-step targets for one plane over `n` steps starting with
    /// `support`. `None` when targets depend on the trajectory.
    pub fn step_targets(&self, params: &AlipParams, plane: Plane, support: SupportFoot, n: usize) -> Option<Vec<f64>> {
        if matches!(self, TargetPolicy::PathTracking { .. }) {
            return None;
        }
        let mut side = support;
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            out.push(self.targets(params, side, (0.0, 0.0), 0.0).for_plane(plane));
            side = side.flip();
        }
        Some(out)
    }
}

/// Planner session: targets, support side and step bookkeeping.
///
/// Steps are `[k T, (k+1) T]` with `k = step_index`; commands computed during
/// step `k` are for the landing at `(k+1) T`.
#[derive(Debug, Clone)]
pub struct FootstepPlanner {
    params: AlipParams,
    drs: DrsMotion,
    policy: TargetPolicy,
    support: SupportFoot,
    step_index: usize,
    current: MomentumTarget,
}

impl FootstepPlanner {
    pub fn new(params: AlipParams, drs: DrsMotion, policy: TargetPolicy, support: SupportFoot) -> Self {
        let current = policy.targets(&params, support, (0.0, 0.0), 0.0);
        Self {
            params,
            drs,
            policy,
            support,
            step_index: 0,
            current,
        }
    }

    pub fn support(&self) -> SupportFoot {
        self.support
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    pub fn policy(&self) -> &TargetPolicy {
        &self.policy
    }

    pub fn drs(&self) -> &DrsMotion {
        &self.drs
    }

    pub fn current_targets(&self) -> MomentumTarget {
        self.current
    }

    pub fn step_start(&self) -> f64 {
        self.step_index as f64 * self.params.step_duration()
    }

    pub fn step_end(&self) -> f64 {
        (self.step_index + 1) as f64 * self.params.step_duration()
    }

    /// Refresh the targets held for this step. Called at the start of each step.
    pub fn latch_targets(&mut self, base_pos: (f64, f64), t: f64) -> MomentumTarget {
        self.current = self.policy.targets(&self.params, self.support, base_pos, t);
        self.current
    }

    pub fn command(&self, state_sag: &PlanarState, state_front: &PlanarState, t_now: f64) -> Result<FootstepCommand> {
        let t_k = self.step_end();
        let t_k1 = (self.step_index + 2) as f64 * self.params.step_duration();
        control_commands(
            state_sag,
            state_front,
            t_now,
            t_k,
            t_k1,
            &self.params,
            &self.drs,
            &self.current,
            self.support,
        )
    }

    /// Landing happened: swap feet and move to the next step.
    pub fn advance(&mut self) {
        self.support = self.support.flip();
        self.step_index += 1;
    }
}
