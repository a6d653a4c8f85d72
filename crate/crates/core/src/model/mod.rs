//! Continuous-phase flow and landing reset of the open-loop model.
//!
//! Sagittal plane, state `(x_SC, L_yS)`:
//!
//! ```text
//! d/dt [x; L] = [[0, 1/(mH)], [m g, 0]] [x; L] + [-dx_S/dt; 0]
//! ```
//!
//! The frontal plane `(y_SC, L_xS)` has the same structure with both
//! off-diagonal entries negated. Both planes share `l = sqrt(g/H)`, so the
//! matrix exponential is a pair of hyperbolic functions and the surface
//! forcing integrates in closed form for sinusoidal sway.

mod drs;

pub use drs::{DrsMotion, SampledProfile, Sinusoid};

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const STANDARD_GRAVITY: f64 = 9.81;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Plane {
    Sagittal,
    Frontal,
}

impl Plane {
    /// Surface axis whose velocity forces this plane.
    pub fn axis(self) -> Axis {
        match self {
            Plane::Sagittal => Axis::X,
            Plane::Frontal => Axis::Y,
        }
    }

    /// `+1` for the sagittal plane, `-1` for the frontal plane: the sign of
    /// both off-diagonal entries of the system matrix.
    pub fn sign(self) -> f64 {
        match self {
            Plane::Sagittal => 1.0,
            Plane::Frontal => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

/// Physical constants of the pendulum. `l = sqrt(g/H)` is always derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlipParams {
    mass: f64,
    com_height: f64,
    gravity: f64,
    step_duration: f64,
    step_width: f64,
}

impl AlipParams {
    /// Parameters with standard gravity.
    pub fn new(mass: f64, com_height: f64, step_duration: f64, step_width: f64) -> Result<Self> {
        Self::with_gravity(mass, com_height, STANDARD_GRAVITY, step_duration, step_width)
    }

    pub fn with_gravity(
        mass: f64,
        com_height: f64,
        gravity: f64,
        step_duration: f64,
        step_width: f64,
    ) -> Result<Self> {
        let positive = [
            ("mass", mass),
            ("com_height", com_height),
            ("gravity", gravity),
            ("step_duration", step_duration),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::invalid(format!("{name} must be finite and > 0, got {value}")));
            }
        }
        if !(step_width.is_finite() && step_width >= 0.0) {
            return Err(Error::invalid(format!("step_width must be finite and >= 0, got {step_width}")));
        }
        Ok(Self {
            mass,
            com_height,
            gravity,
            step_duration,
            step_width,
        })
    }

    /// Digit-like constants: 46.1 kg, 0.9 m CoM height, 0.4 s steps, 0.2 m width.
    pub fn digit() -> Self {
        Self::new(46.1, 0.9, 0.4, 0.2).expect("constants are valid")
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn com_height(&self) -> f64 {
        self.com_height
    }

    pub fn gravity(&self) -> f64 {
        self.gravity
    }

    pub fn step_duration(&self) -> f64 {
        self.step_duration
    }

    pub fn step_width(&self) -> f64 {
        self.step_width
    }

    /// Natural frequency `l = sqrt(g/H)`, 1/s.
    pub fn omega(&self) -> f64 {
        (self.gravity / self.com_height).sqrt()
    }

    /// `m H`, the factor converting CoM velocity to contact momentum.
    pub fn mh(&self) -> f64 {
        self.mass * self.com_height
    }

    /// `m H l`, the coupling that appears in every momentum/position term.
    pub fn mhl(&self) -> f64 {
        self.mh() * self.omega()
    }

    pub fn with_step_duration(self, step_duration: f64) -> Result<Self> {
        Self::with_gravity(self.mass, self.com_height, self.gravity, step_duration, self.step_width)
    }

    pub fn with_step_width(self, step_width: f64) -> Result<Self> {
        Self::with_gravity(self.mass, self.com_height, self.gravity, self.step_duration, step_width)
    }

    pub fn with_mass(self, mass: f64) -> Result<Self> {
        Self::with_gravity(mass, self.com_height, self.gravity, self.step_duration, self.step_width)
    }
}

/// State of one plane: CoM position relative to the support point (m) and
/// contact angular momentum (kg·m²/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlanarState {
    pub plane: Plane,
    pub pos: f64,
    pub mom: f64,
}

impl PlanarState {
    pub fn new(plane: Plane, pos: f64, mom: f64) -> Self {
        Self { plane, pos, mom }
    }

    pub fn zero(plane: Plane) -> Self {
        Self::new(plane, 0.0, 0.0)
    }

    pub fn from_vector(plane: Plane, v: Vector2<f64>) -> Self {
        Self::new(plane, v[0], v[1])
    }

    pub fn to_vector(&self) -> Vector2<f64> {
        Vector2::new(self.pos, self.mom)
    }

    pub fn is_finite(&self) -> bool {
        self.pos.is_finite() && self.mom.is_finite()
    }

    pub fn expect_plane(&self, plane: Plane) -> Result<()> {
        if self.plane == plane {
            Ok(())
        } else {
            Err(Error::PlaneMismatch {
                expected: plane,
                actual: self.plane,
            })
        }
    }

    pub fn checked_sub(&self, other: &PlanarState) -> Result<PlanarState> {
        other.expect_plane(self.plane)?;
        Ok(Self::new(self.plane, self.pos - other.pos, self.mom - other.mom))
    }

    /// Euclidean distance in `(pos, mom)`.
    pub fn distance(&self, other: &PlanarState) -> Result<f64> {
        let d = self.checked_sub(other)?;
        Ok(d.pos.hypot(d.mom))
    }
}

/// The two components of `V(t1, t2) = ∫ exp(A (t2 - τ)) f(τ) dτ` for one plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ForcingIntegral {
    pub v1: f64,
    pub v2: f64,
}

impl ForcingIntegral {
    pub const ZERO: ForcingIntegral = ForcingIntegral { v1: 0.0, v2: 0.0 };

    pub fn to_vector(&self) -> Vector2<f64> {
        Vector2::new(self.v1, self.v2)
    }
}

impl std::ops::Add for ForcingIntegral {
    type Output = ForcingIntegral;

    fn add(self, rhs: Self) -> Self {
        ForcingIntegral {
            v1: self.v1 + rhs.v1,
            v2: self.v2 + rhs.v2,
        }
    }
}

/// System matrix `A` of the continuous phase.
pub fn system_matrix(params: &AlipParams, plane: Plane) -> Matrix2<f64> {
    let s = plane.sign();
    Matrix2::new(0.0, s / params.mh(), s * params.mass * params.gravity, 0.0)
}

/// `exp(A dt)` in closed form. `dt` may be negative.
pub fn transition_matrix(params: &AlipParams, dt: f64, plane: Plane) -> Result<Matrix2<f64>> {
    if !dt.is_finite() {
        return Err(Error::invalid(format!("dt must be finite, got {dt}")));
    }
    Ok(transition_unchecked(params, dt, plane))
}

pub(crate) fn transition_unchecked(params: &AlipParams, dt: f64, plane: Plane) -> Matrix2<f64> {
    let x = params.omega() * dt;
    let (c, sh) = (x.cosh(), x.sinh());
    let k = params.mhl();
    let s = plane.sign();
    Matrix2::new(c, s * sh / k, s * k * sh, c)
}

/// Surface-forcing integral over `[t1, t2]` for `plane`.
///
/// Sinusoid terms integrate analytically; sampled profiles use composite
/// Gauss–Legendre quadrature on their interpolant. `t1 == t2` returns exact
/// zeros.
pub fn forcing_integral(
    params: &AlipParams,
    drs: &DrsMotion,
    plane: Plane,
    t1: f64,
    t2: f64,
) -> Result<ForcingIntegral> {
    check_interval(t1, t2)?;
    Ok(forcing_unchecked(params, drs, plane, t1, t2))
}

pub(crate) fn forcing_unchecked(
    params: &AlipParams,
    drs: &DrsMotion,
    plane: Plane,
    t1: f64,
    t2: f64,
) -> ForcingIntegral {
    if t1 == t2 {
        return ForcingIntegral::ZERO;
    }
    drs.forcing(params, plane, t1, t2)
}

/// Response over `dt` to a constant additive momentum rate `rate`
/// (kg·m²/s²), i.e. forcing `[0; rate]`.
pub fn bias_integral(params: &AlipParams, plane: Plane, rate: f64, dt: f64) -> ForcingIntegral {
    if rate == 0.0 || dt == 0.0 {
        return ForcingIntegral::ZERO;
    }
    let l = params.omega();
    let x = l * dt;
    ForcingIntegral {
        v1: plane.sign() * (x.cosh() - 1.0) / (params.mh() * l * l) * rate,
        v2: x.sinh() / l * rate,
    }
}

/// `exp(A (t2 - t1)) state + V(t1, t2)`.
pub fn flow(state: &PlanarState, t1: f64, t2: f64, params: &AlipParams, drs: &DrsMotion) -> Result<PlanarState> {
    check_interval(t1, t2)?;
    Ok(flow_unchecked(state, t1, t2, params, drs))
}

pub(crate) fn flow_unchecked(
    state: &PlanarState,
    t1: f64,
    t2: f64,
    params: &AlipParams,
    drs: &DrsMotion,
) -> PlanarState {
    if t1 == t2 {
        return *state;
    }
    let phi = transition_unchecked(params, t2 - t1, state.plane);
    let v = forcing_unchecked(params, drs, state.plane, t1, t2);
    PlanarState::from_vector(state.plane, phi * state.to_vector() + v.to_vector())
}

/// Landing reset: the position jumps by `-u`, the momentum is untouched.
pub fn reset(state: &PlanarState, u: f64) -> PlanarState {
    PlanarState {
        plane: state.plane,
        pos: state.pos - u,
        mom: state.mom,
    }
}

fn check_interval(t1: f64, t2: f64) -> Result<()> {
    if !(t1.is_finite() && t2.is_finite()) {
        return Err(Error::invalid(format!("interval bounds must be finite, got [{t1}, {t2}]")));
    }
    if t1 > t2 {
        return Err(Error::invalid(format!("interval start {t1} is after its end {t2}")));
    }
    Ok(())
}
