//! Angular-momentum linear inverted pendulum on a dynamic rigid surface.
//!
//! The crate models bipedal walking on ground that sways horizontally and
//! periodically. The state of each plane is the CoM position relative to the
//! support point together with the angular momentum about that point. The
//! continuous phase is a linear, time-varying, nonhomogeneous ODE; foot
//! landings are time-triggered resets that shift the position and leave the
//! momentum untouched.
//!
//! Modules, bottom-up:
//!
//! - [`model`]: closed-form flow, forcing integrals and the landing reset.
//! - [`footstep`]: deadbeat foot placement driving the pre-impact momentum to
//!   a target one step ahead.
//! - [`stability`]: monodromy matrices, step-to-step maps, periodic orbits and
//!   the step-to-step Lyapunov function.
//! - [`trajgen`]: Bézier swing-foot references updated from the planner.
//! - [`sim`]: event-driven closed-loop simulator, metrics and sweeps.

pub mod error;
pub mod footstep;
pub mod model;
pub mod sim;
pub mod stability;
pub mod trajgen;

pub use error::{Error, Result};

pub use model::{AlipParams, Axis, DrsMotion, ForcingIntegral, PlanarState, Plane, SampledProfile, Sinusoid};


pub use footstep::{FootstepCommand, FootstepPlanner, MomentumTarget, SupportFoot, TargetPolicy};
pub use stability::{ConvergenceReport, PeriodicOrbit, StabilityReport, StepMap, Verdict};
pub use trajgen::{BezierTraj, ControlVariable, PhaseClock, SwingSession};
pub use sim::{Disturbance, Metrics, Scenario, SimStatus, SimTrace};
