use std::f64::consts::TAU;

use serde::Serialize;

use super::{AlipParams, Axis, ForcingIntegral, Plane};
use crate::error::{Error, Result};

/// `x_S(t) = amplitude · cos(2π t / period + phase)` along `axis`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sinusoid {
    axis: Axis,
    amplitude: f64,
    period: f64,
    phase: f64,
}

impl Sinusoid {
    pub fn new(axis: Axis, amplitude: f64, period: f64, phase: f64) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::invalid(format!("sway period must be finite and > 0, got {period}")));
        }
        if !(amplitude.is_finite() && phase.is_finite()) {
            return Err(Error::invalid("sway amplitude and phase must be finite"));
        }
        Ok(Self {
            axis,
            amplitude,
            period,
            phase,
        })
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    fn angular_rate(&self) -> f64 {
        TAU / self.period
    }

    pub fn position(&self, t: f64) -> f64 {
        self.amplitude * (self.angular_rate() * t + self.phase).cos()
    }

    pub fn velocity(&self, t: f64) -> f64 {
        let w = self.angular_rate();
        -self.amplitude * w * (w * t + self.phase).sin()
    }

    /// Closed-form `∫_{t1}^{t2} exp(A (t2-τ)) [-v(τ); 0] dτ`.
    ///
    /// With `θ(s) = w (t2 - s) + φ` and `f1 = A w sin θ`, the two scalar
    /// integrals are
    /// `∫_0^Δ cosh(l s) sin θ(s) ds = [l sin θ sinh(l s) + w cos θ cosh(l s)]_0^Δ / (l² + w²)` and
    /// `∫_0^Δ sinh(l s) sin θ(s) ds = [l sin θ cosh(l s) + w cos θ sinh(l s)]_0^Δ / (l² + w²)`.
    fn forcing(&self, params: &AlipParams, plane: Plane, t1: f64, t2: f64) -> ForcingIntegral {
        let l = params.omega();
        let w = self.angular_rate();
        let dt = t2 - t1;
        let (sin_end, cos_end) = (w * t1 + self.phase).sin_cos();
        let (sin_start, cos_start) = (w * t2 + self.phase).sin_cos();
        let (ch, sh) = ((l * dt).cosh(), (l * dt).sinh());
        let denom = l * l + w * w;
        let cosh_part = (l * sin_end * sh + w * cos_end * ch - w * cos_start) / denom;
        let sinh_part = (l * sin_end * ch + w * cos_end * sh - l * sin_start) / denom;
        let gain = self.amplitude * w;
        ForcingIntegral {
            v1: gain * cosh_part,
            v2: plane.sign() * params.mhl() * gain * sinh_part,
        }
    }
}

/// Periodic surface displacement sampled on a uniform grid starting at `t = 0`.
///
/// The interpolant is a periodic cubic Hermite spline with central-difference
/// slopes, so position and velocity are continuous.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledProfile {
    positions: Vec<f64>,
    spacing: f64,
}

impl SampledProfile {
    pub fn new(positions: Vec<f64>, spacing: f64) -> Result<Self> {
        if positions.len() < 3 {
            return Err(Error::invalid("sampled profile needs at least 3 samples"));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::invalid(format!("sample spacing must be finite and > 0, got {spacing}")));
        }
        if positions.iter().any(|p| !p.is_finite()) {
            return Err(Error::invalid("sampled positions must be finite"));
        }
        Ok(Self { positions, spacing })
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn period(&self) -> f64 {
        self.positions.len() as f64 * self.spacing
    }

    fn sample(&self, i: i64) -> f64 {
        let n = self.positions.len() as i64;
        self.positions[i.rem_euclid(n) as usize]
    }

    /// Hermite data for the cell containing `t`: (cell index, local u in [0,1)).
    fn locate(&self, t: f64) -> (i64, f64) {
        let x = t / self.spacing;
        let i = x.floor();
        (i as i64, x - i)
    }

    fn slope(&self, i: i64) -> f64 {
        (self.sample(i + 1) - self.sample(i - 1)) / (2.0 * self.spacing)
    }

    pub fn position(&self, t: f64) -> f64 {
        let (i, u) = self.locate(t);
        let h = self.spacing;
        let (p0, p1) = (self.sample(i), self.sample(i + 1));
        let (m0, m1) = (self.slope(i), self.slope(i + 1));
        let u2 = u * u;
        let u3 = u2 * u;
        (2.0 * u3 - 3.0 * u2 + 1.0) * p0 + (u3 - 2.0 * u2 + u) * h * m0 + (-2.0 * u3 + 3.0 * u2) * p1 + (u3 - u2) * h * m1
    }

    pub fn velocity(&self, t: f64) -> f64 {
        let (i, u) = self.locate(t);
        self.cell_velocity(i, u)
    }

    fn cell_velocity(&self, i: i64, u: f64) -> f64 {
        let h = self.spacing;
        let (p0, p1) = (self.sample(i), self.sample(i + 1));
        let (m0, m1) = (self.slope(i), self.slope(i + 1));
        let u2 = u * u;
        ((6.0 * u2 - 6.0 * u) * p0 + (3.0 * u2 - 4.0 * u + 1.0) * h * m0 + (-6.0 * u2 + 6.0 * u) * p1)
            / h
            + (3.0 * u2 - 2.0 * u) * m1
    }

    /// Composite 8-point Gauss–Legendre over every grid cell that meets `[t1, t2]`.
    fn forcing(&self, params: &AlipParams, plane: Plane, t1: f64, t2: f64) -> ForcingIntegral {
        let l = params.omega();
        let h = self.spacing;
        let first = (t1 / h).floor() as i64;
        let last = (t2 / h).ceil() as i64;
        let (mut c_acc, mut s_acc) = (0.0, 0.0);
        for cell in first..last {
            let a = (cell as f64 * h).max(t1);
            let b = ((cell + 1) as f64 * h).min(t2);
            if b <= a {
                continue;
            }
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (node, weight) in GAUSS_LEGENDRE_8 {
                let tau = mid + half * node;
                let u = tau / h - cell as f64;
                let f1 = -self.cell_velocity(cell, u);
                let x = l * (t2 - tau);
                c_acc += weight * half * x.cosh() * f1;
                s_acc += weight * half * x.sinh() * f1;
            }
        }
        ForcingIntegral {
            v1: c_acc,
            v2: plane.sign() * params.mhl() * s_acc,
        }
    }
}

const GAUSS_LEGENDRE_8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
];

/// Horizontal, periodic motion of the walking surface.
///
/// Each axis is a sum of sinusoid terms plus an optional sampled profile.
/// There is no vertical component.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct DrsMotion {
    terms: Vec<Sinusoid>,
    profile_x: Option<SampledProfile>,
    profile_y: Option<SampledProfile>,
}

impl DrsMotion {
    /// Static ground.
    pub fn stationary() -> Self {
        Self::default()
    }

    pub fn new(terms: Vec<Sinusoid>) -> Self {
        Self {
            terms,
            ..Self::default()
        }
    }

    /// Single-term motion.
    ///
    /// # Panics
    ///
    /// If `period` is not positive or any argument is non-finite.
    pub fn sinusoid(axis: Axis, amplitude: f64, period: f64, phase: f64) -> Self {
        Self::new(vec![Sinusoid::new(axis, amplitude, period, phase).expect("valid sinusoid")])
    }

    pub fn with_term(mut self, term: Sinusoid) -> Self {
        self.terms.push(term);
        self
    }

    pub fn with_profile(mut self, axis: Axis, profile: SampledProfile) -> Self {
        match axis {
            Axis::X => self.profile_x = Some(profile),
            Axis::Y => self.profile_y = Some(profile),
        }
        self
    }

    pub fn terms(&self) -> &[Sinusoid] {
        &self.terms
    }

    pub fn axis_terms(&self, axis: Axis) -> impl Iterator<Item = &Sinusoid> {
        self.terms.iter().filter(move |t| t.axis == axis)
    }

    pub fn profile(&self, axis: Axis) -> Option<&SampledProfile> {
        match axis {
            Axis::X => self.profile_x.as_ref(),
            Axis::Y => self.profile_y.as_ref(),
        }
    }

    pub fn has_motion(&self, axis: Axis) -> bool {
        self.axis_terms(axis).next().is_some() || self.profile(axis).is_some()
    }

    pub fn position(&self, axis: Axis, t: f64) -> f64 {
        let terms: f64 = self.axis_terms(axis).map(|s| s.position(t)).sum();
        terms + self.profile(axis).map_or(0.0, |p| p.position(t))
    }

    pub fn velocity(&self, axis: Axis, t: f64) -> f64 {
        let terms: f64 = self.axis_terms(axis).map(|s| s.velocity(t)).sum();
        terms + self.profile(axis).map_or(0.0, |p| p.velocity(t))
    }

    /// Least common period of every component on `axis`, or `None` for a
    /// still axis. Components whose periods are not commensurate within
    /// 1e-9 (searching up to 1000 multiples of the longest) are an error.
    pub fn least_period(&self, axis: Axis) -> Result<Option<f64>> {
        let periods: Vec<f64> = self
            .axis_terms(axis)
            .map(|s| s.period)
            .chain(self.profile(axis).map(|p| p.period()))
            .collect();
        let Some(longest) = periods.iter().copied().reduce(f64::max) else {
            return Ok(None);
        };
        for k in 1..=1000 {
            let candidate = longest * k as f64;
            let divides = periods.iter().all(|&p| {
                let r = candidate / p;
                (r - r.round()).abs() <= 1e-9 * r
            });
            if divides {
                return Ok(Some(candidate));
            }
        }
        Err(Error::invalid(format!("surface motion periods on {axis:?} are not commensurate: {periods:?}")))
    }

    pub(crate) fn forcing(&self, params: &AlipParams, plane: Plane, t1: f64, t2: f64) -> ForcingIntegral {
        let axis = plane.axis();
        let mut total = self
            .axis_terms(axis)
            .fold(ForcingIntegral::ZERO, |acc, s| acc + s.forcing(params, plane, t1, t2));
        if let Some(p) = self.profile(axis) {
            total = total + p.forcing(params, plane, t1, t2);
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::forcing_integral;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn sinusoid_rejects_bad_period() {
        assert!(Sinusoid::new(Axis::X, 0.04, 0.0, 0.0).is_err());
        assert!(Sinusoid::new(Axis::X, 0.04, -1.0, 0.0).is_err());
        assert!(Sinusoid::new(Axis::X, f64::NAN, 1.0, 0.0).is_err());
    }

    #[test]
    fn velocity_is_derivative_of_position() {
        let d = DrsMotion::sinusoid(Axis::X, 0.04, 0.4, 0.3).with_term(Sinusoid::new(Axis::X, 0.02, 1.2, 0.0).unwrap());
        let h = 1e-6;
        for &t in &[0.0, 0.17, 0.93] {
            let fd = (d.position(Axis::X, t + h) - d.position(Axis::X, t - h)) / (2.0 * h);
            assert_relative_eq!(d.velocity(Axis::X, t), fd, epsilon = 1e-8);
        }
        assert_eq!(d.velocity(Axis::Y, 0.3), 0.0);
    }

    #[test]
    fn least_period_of_mixed_terms() {
        let d = DrsMotion::sinusoid(Axis::Y, 0.1, 0.4, 0.0).with_term(Sinusoid::new(Axis::Y, 0.1, 0.6, 0.0).unwrap());
        assert_relative_eq!(d.least_period(Axis::Y).unwrap().unwrap(), 1.2, max_relative = 1e-12);
        assert_eq!(d.least_period(Axis::X).unwrap(), None);
        let bad = DrsMotion::sinusoid(Axis::X, 0.1, 1.0, 0.0).with_term(Sinusoid::new(Axis::X, 0.1, std::f64::consts::SQRT_2, 0.0).unwrap());
        assert!(bad.least_period(Axis::X).is_err());
    }

    #[test]
    fn profile_interpolates_samples() {
        let samples: Vec<f64> = (0..40).map(|i| (TAU * i as f64 / 40.0).cos()).collect();
        let p = SampledProfile::new(samples.clone(), 0.05).unwrap();
        for (i, s) in samples.iter().enumerate() {
            assert_relative_eq!(p.position(i as f64 * 0.05), *s, epsilon = 1e-12);
        }
        assert_relative_eq!(p.period(), 2.0, max_relative = 1e-15);
        // periodic wrap
        assert_relative_eq!(p.position(0.37), p.position(2.37), epsilon = 1e-12);
        assert_relative_eq!(p.velocity(0.37), p.velocity(2.37), epsilon = 1e-10);
    }

    #[test]
    fn profile_rejects_short_or_bad_input() {
        assert!(SampledProfile::new(vec![0.0, 1.0], 0.1).is_err());
        assert!(SampledProfile::new(vec![0.0, 1.0, 2.0], 0.0).is_err());
        assert!(SampledProfile::new(vec![0.0, f64::NAN, 2.0], 0.1).is_err());
    }

    #[test]
    fn fine_profile_approximates_analytic_sinusoid() {
        let params = AlipParams::digit();
        let n = 400;
        let period = 0.4;
        let samples: Vec<f64> = (0..n).map(|i| 0.04 * (TAU * i as f64 / n as f64).cos()).collect();
        let sampled = DrsMotion::stationary().with_profile(Axis::X, SampledProfile::new(samples, period / n as f64).unwrap());
        let analytic = DrsMotion::sinusoid(Axis::X, 0.04, period, 0.0);
        let a = forcing_integral(&params, &analytic, Plane::Sagittal, 0.0, 0.4).unwrap();
        let b = forcing_integral(&params, &sampled, Plane::Sagittal, 0.0, 0.4).unwrap();
        assert_relative_eq!(a.v1, b.v1, max_relative = 1e-4);
        assert_relative_eq!(a.v2, b.v2, max_relative = 1e-4);
    }

    proptest! {
        #[test]
        fn velocity_is_periodic(a in -0.2f64..0.2, period in 0.1f64..8.0, phase in -3.0f64..3.0, t in 0.0f64..20.0) {
            let d = DrsMotion::sinusoid(Axis::X, a, period, phase);
            prop_assert!((d.velocity(Axis::X, t) - d.velocity(Axis::X, t + period)).abs() < 1e-12);
        }
    }
}
