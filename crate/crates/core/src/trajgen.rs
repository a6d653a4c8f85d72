//! Bézier references for the swing foot, re-targeted every control tick.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::footstep::FootstepCommand;

pub const DEFAULT_ORDER: usize = 6;

/// Swing-foot height profile, order 6.
pub const SWING_HEIGHT: [f64; 7] = [0.0, 0.02, 0.07, 0.15, 0.07, 0.02, 0.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ControlVariable {
    /// Swing foot relative to the CoM, sagittal.
    SwingX,
    /// Swing foot relative to the CoM, lateral.
    SwingY,
    SwingHeight,
    /// Any other output held by a constant-coefficient curve.
    Other(u8),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BezierTraj {
    pub label: ControlVariable,
    coeffs: Vec<f64>,
}

impl BezierTraj {
    pub fn new(label: ControlVariable, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::invalid("a Bézier curve needs at least one coefficient"));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("Bézier coefficients must be finite"));
        }
        Ok(Self { label, coeffs })
    }

    pub fn constant(label: ControlVariable, value: f64, order: usize) -> Result<Self> {
        Self::new(label, vec![value; order + 1])
    }

    pub fn swing_height() -> Self {
        Self {
            label: ControlVariable::SwingHeight,
            coeffs: SWING_HEIGHT.to_vec(),
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// De Casteljau evaluation.
    pub fn eval(&self, s: f64) -> Result<f64> {
        check_phase(s)?;
        Ok(de_casteljau(&self.coeffs, s))
    }

    /// `dφ/ds`.
    pub fn derivative(&self, s: f64) -> Result<f64> {
        check_phase(s)?;
        let m = self.order();
        if m == 0 {
            return Ok(0.0);
        }
        let diffs: Vec<f64> = self.coeffs.windows(2).map(|w| w[1] - w[0]).collect();
        Ok(m as f64 * de_casteljau(&diffs, s))
    }

    /// Sets `α_0`, `α_M`, and spaces the interior coefficients linearly
    /// between them.
    fn retarget(&mut self, start: f64, end: f64) {
        let m = self.order();
        if m == 0 {
            self.coeffs[0] = end;
            return;
        }
        for (j, c) in self.coeffs.iter_mut().enumerate() {
            *c = match j {
                0 => start,
                j if j == m => end,
                j => start + (end - start) * j as f64 / m as f64,
            };
        }
    }
}

fn check_phase(s: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::invalid(format!("phase must lie in [0, 1], got {s}")));
    }
    Ok(())
}

fn de_casteljau(coeffs: &[f64], s: f64) -> f64 {
    let mut work = coeffs.to_vec();
    for level in (1..work.len()).rev() {
        for j in 0..level {
            work[j] = (1.0 - s) * work[j] + s * work[j + 1];
        }
    }
    work[0]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseClock {
    pub step_start: f64,
    pub step_duration: f64,
}

impl PhaseClock {
    pub fn new(step_start: f64, step_duration: f64) -> Result<Self> {
        if !step_start.is_finite() || !(step_duration.is_finite() && step_duration > 0.0) {
            return Err(Error::invalid("phase clock needs a finite start and a positive duration"));
        }
        Ok(Self { step_start, step_duration })
    }

    /// `(t - T_prev) / T_step`, saturated at 1.
    pub fn phase(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || t < self.step_start {
            return Err(Error::invalid(format!("time {t} precedes the step start {}", self.step_start)));
        }
        Ok(((t - self.step_start) / self.step_duration).min(1.0))
    }
}

/// Swing-foot references for the current step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwingSession {
    pub clock: PhaseClock,
    pub x: BezierTraj,
    pub y: BezierTraj,
    pub height: BezierTraj,
}

impl SwingSession {
    pub fn new(clock: PhaseClock, order: usize) -> Self {
        Self {
            clock,
            x: BezierTraj {
                label: ControlVariable::SwingX,
                coeffs: vec![0.0; order + 1],
            },
            y: BezierTraj {
                label: ControlVariable::SwingY,
                coeffs: vec![0.0; order + 1],
            },
            height: BezierTraj::swing_height(),
        }
    }

    /// Restarts the clock at a landing; the start coefficients are anchored
    /// by the first update of the new step.
    pub fn begin_step(&mut self, step_start: f64) {
        self.clock.step_start = step_start;
    }

    /// One pass of the coefficient update. `swing_pos` is the swing foot
    /// relative to the CoM; it is only read at `s = 0`. Returns whether the
    /// coefficients were touched (never before the step starts).
    pub fn update(&mut self, t: f64, swing_pos: (f64, f64), command: &FootstepCommand) -> bool {
        let Ok(s) = self.clock.phase(t) else {
            return false;
        };
        let (x0, y0) = if s == 0.0 {
            swing_pos
        } else {
            (self.x.coeffs[0], self.y.coeffs[0])
        };
        self.x.retarget(x0, -command.x_swc);
        self.y.retarget(y0, -command.y_swc);
        true
    }

    /// `(x, y, z)` references at `t`.
    pub fn reference(&self, t: f64) -> Result<(f64, f64, f64)> {
        let s = self.clock.phase(t)?;
        Ok((self.x.eval(s)?, self.y.eval(s)?, self.height.eval(s)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::footstep::{MomentumTarget, SupportFoot};
    use crate::model::{PlanarState, Plane};
    use proptest::prelude::*;

    fn binomial(n: usize, k: usize) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    fn bernstein_sum(coeffs: &[f64], s: f64) -> f64 {
        let m = coeffs.len() - 1;
        coeffs
            .iter()
            .enumerate()
            .map(|(j, a)| a * binomial(m, j) * s.powi(j as i32) * (1.0 - s).powi((m - j) as i32))
            .sum()
    }

    fn command(x_swc: f64, y_swc: f64) -> FootstepCommand {
        FootstepCommand {
            u_x: 0.0,
            u_y: 0.0,
            x_swc,
            y_swc,
            predicted_sagittal: PlanarState::zero(Plane::Sagittal),
            predicted_frontal: PlanarState::zero(Plane::Frontal),
            target: MomentumTarget::constant(0.0, 0.0),
            support: SupportFoot::Right,
            decided_at: 0.0,
        }
    }

    #[test]
    fn swing_height_endpoints_and_midpoint() {
        let h = BezierTraj::swing_height();
        assert_eq!(h.eval(0.0).unwrap(), 0.0);
        assert_eq!(h.eval(1.0).unwrap(), 0.0);
        let mid = h.eval(0.5).unwrap();
        assert!((mid - bernstein_sum(&SWING_HEIGHT, 0.5)).abs() < 1e-14);
        assert!(h.derivative(0.5).unwrap().abs() < 1e-14);
    }

    #[test]
    fn constant_and_ramp() {
        let c = BezierTraj::constant(ControlVariable::Other(2), 0.3, 5).unwrap();
        for s in [0.0, 0.25, 0.9, 1.0] {
            assert!((c.eval(s).unwrap() - 0.3).abs() < 1e-15);
            assert_eq!(c.derivative(s).unwrap(), 0.0);
        }
        let ramp = BezierTraj::new(ControlVariable::SwingX, vec![0.0, 1.0]).unwrap();
        assert_eq!(ramp.derivative(0.3).unwrap(), 1.0);
        let point = BezierTraj::new(ControlVariable::SwingX, vec![2.0]).unwrap();
        assert_eq!(point.derivative(0.3).unwrap(), 0.0);
    }

    #[test]
    fn phase_out_of_range_rejected() {
        let h = BezierTraj::swing_height();
        assert!(h.eval(-1e-12).is_err());
        assert!(h.eval(1.0 + 1e-12).is_err());
        assert!(h.derivative(f64::NAN).is_err());
        assert!(BezierTraj::new(ControlVariable::SwingX, vec![]).is_err());
    }

    #[test]
    fn clock_phase() {
        let c = PhaseClock::new(0.8, 0.4).unwrap();
        assert_eq!(c.phase(0.8).unwrap(), 0.0);
        assert!((c.phase(1.0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(c.phase(1.2 + 1e-6).unwrap(), 1.0);
        assert!(c.phase(0.79).is_err());
        assert!(PhaseClock::new(0.0, 0.0).is_err());
    }

    #[test]
    fn update_interpolates_interior() {
        let mut session = SwingSession::new(PhaseClock::new(0.0, 0.4).unwrap(), DEFAULT_ORDER);
        assert!(session.update(0.0, (0.1, 0.0), &command(0.2, 0.0)));
        let expected = [0.1, 0.05, 0.0, -0.05, -0.1, -0.15, -0.2];
        for (c, e) in session.x.coeffs().iter().zip(expected) {
            assert!((c - e).abs() < 1e-15, "{c} vs {e}");
        }
    }

    #[test]
    fn start_anchored_after_phase_zero() {
        let mut session = SwingSession::new(PhaseClock::new(0.4, 0.4).unwrap(), DEFAULT_ORDER);
        assert!(!session.update(0.3, (9.0, 9.0), &command(0.1, 0.1)));
        session.update(0.4, (-0.1, 0.05), &command(0.1, -0.2));
        let start = session.reference(0.4).unwrap();
        session.update(0.5, (7.0, 7.0), &command(-0.3, 0.4));
        assert_eq!(session.reference(0.4).unwrap(), start);
        assert_eq!(session.x.eval(1.0).unwrap(), 0.3);
        assert_eq!(session.y.eval(1.0).unwrap(), -0.4);
        let snapshot = session.clone();
        session.update(0.5, (7.0, 7.0), &command(-0.3, 0.4));
        assert_eq!(session, snapshot);
    }

    proptest! {
        #[test]
        fn eval_matches_bernstein_and_hull(
            coeffs in proptest::collection::vec(-5.0f64..5.0, 1..10),
            s in 0.0f64..=1.0,
        ) {
            let b = BezierTraj::new(ControlVariable::Other(0), coeffs.clone()).unwrap();
            let v = b.eval(s).unwrap();
            prop_assert!((v - bernstein_sum(&coeffs, s)).abs() < 1e-12);
            let lo = coeffs.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = coeffs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
            prop_assert_eq!(b.eval(0.0).unwrap(), coeffs[0]);
            prop_assert_eq!(b.eval(1.0).unwrap(), *coeffs.last().unwrap());
        }

        #[test]
        fn derivative_matches_difference_quotient(
            coeffs in proptest::collection::vec(-5.0f64..5.0, 2..8),
            s in 0.01f64..0.99,
        ) {
            let b = BezierTraj::new(ControlVariable::Other(0), coeffs).unwrap();
            let h = 1e-6;
            let fd = (b.eval(s + h).unwrap() - b.eval(s - h).unwrap()) / (2.0 * h);
            prop_assert!((b.derivative(s).unwrap() - fd).abs() < 1e-6);
        }
    }
}
