//! Stability certification of the closed loop.
//!
//! Under the deadbeat footstep law each landing applies `x⁺ = (I + B) x⁻ + g`
//! with `B = [[-1, -σ cosh/(mHl sinh)], [0, 0]]`, so the post-impact state
//! obeys the affine step-to-step map `x_{k+1} = M x_k + Ṽ_k` where
//! `M = (I + B) exp(A T)`. `M` has zero trace and zero determinant, hence
//! `M² = 0`: any state lands on the periodic orbit after two system periods.

use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::footstep::plan_landing;
use crate::model::{self, AlipParams, DrsMotion, PlanarState, Plane};

/// Verdict threshold on the spectral radius.
pub const CERTIFY_MARGIN: f64 = 1e-9;

/// Relative tolerance on `N1 T_step = N2 T_drs`.
pub const RATIO_TOLERANCE: f64 = 1e-9;

fn hyperbolic_step(params: &AlipParams) -> (f64, f64) {
    let x = params.omega() * params.step_duration();
    (x.cosh(), x.sinh())
}

/// `B` of the closed-loop landing: `Δx = B x⁻ + g`.
pub fn landing_feedback(params: &AlipParams, plane: Plane) -> Matrix2<f64> {
    let (c, s) = hyperbolic_step(params);
    Matrix2::new(-1.0, -plane.sign() * c / (params.mhl() * s), 0.0, 0.0)
}

/// Monodromy of the homogeneous closed loop over one step, `(I + B) exp(A T)`.
pub fn monodromy_single(params: &AlipParams, plane: Plane) -> Matrix2<f64> {
    let (c, s) = hyperbolic_step(params);
    let k = params.mhl() * s;
    let sign = plane.sign();
    Matrix2::new(-c, -sign * c * c / k, sign * k, c)
}

/// `M^N1`, the monodromy over `N1` steps, by the Cayley–Hamilton recurrence
/// `M^n = tr M^(n-1) - det M^(n-2)` on the invariants of
/// [`monodromy_invariants`]. Both vanish, so `N1 >= 2` gives exact zeros.
pub fn monodromy_general(params: &AlipParams, plane: Plane, n1: usize) -> Result<Matrix2<f64>> {
    if n1 == 0 {
        return Err(Error::invalid("N1 must be at least 1"));
    }
    let m = monodromy_single(params, plane);
    let (trace, det) = monodromy_invariants(params, plane);
    let (mut prev, mut cur) = (Matrix2::identity(), m);
    for _ in 1..n1 {
        let next = trace * cur - det * prev;
        prev = cur;
        cur = next;
    }
    // drop the sign of exact zeros
    Ok(cur.map(|v| if v == 0.0 { 0.0 } else { v }))
}

/// `(trace, det)` of the single-step monodromy. The determinant is taken
/// from the factorization `det(I + B) · det(exp(A T))`; `I + B` has a zero
/// first column, so the product is exactly zero rather than a rounding
/// residue whose square root would masquerade as a ~1e-8 eigenvalue.
pub fn monodromy_invariants(params: &AlipParams, plane: Plane) -> (f64, f64) {
    let m = monodromy_single(params, plane);
    let ib = Matrix2::identity() + landing_feedback(params, plane);
    let phi = model::transition_unchecked(params, params.step_duration(), plane);
    (m.trace(), ib.determinant() * phi.determinant())
}

/// Roots of `λ² - tr λ + det`.
pub fn eigenvalues_from_invariants(trace: f64, det: f64) -> [Complex64; 2] {
    let half = 0.5 * trace;
    let disc = Complex64::new(half * half - det, 0.0).sqrt();
    [Complex64::new(half, 0.0) + disc, Complex64::new(half, 0.0) - disc]
}

pub fn eigenvalues(m: &Matrix2<f64>) -> [Complex64; 2] {
    eigenvalues_from_invariants(m.trace(), m.determinant())
}

pub fn spectral_radius(m: &Matrix2<f64>) -> f64 {
    let [a, b] = eigenvalues(m);
    a.norm().max(b.norm())
}

/// Eigenvalues of the single-step monodromy from its exact invariants.
pub fn monodromy_eigenvalues(params: &AlipParams, plane: Plane) -> [Complex64; 2] {
    let (trace, det) = monodromy_invariants(params, plane);
    eigenvalues_from_invariants(trace, det)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Certified,
    NotCertified,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub plane: Plane,
    pub n1: usize,
    pub m_single: Matrix2<f64>,
    pub m_general: Matrix2<f64>,
    /// Eigenvalues of `m_single`.
    pub eigenvalues: [Complex64; 2],
    /// Eigenvalues of `m_general`, `λ^N1`.
    pub general_eigenvalues: [Complex64; 2],
    /// `max |(M_single²)_ij|`.
    pub nilpotency_residual: f64,
    pub verdict: Verdict,
}

pub fn stability_report(params: &AlipParams, plane: Plane, n1: usize) -> Result<StabilityReport> {
    let m_general = monodromy_general(params, plane, n1)?;
    let m_single = monodromy_single(params, plane);
    let eigenvalues = monodromy_eigenvalues(params, plane);
    let general_eigenvalues = eigenvalues.map(|l| l.powu(n1 as u32));
    let radius = general_eigenvalues.iter().map(|l| l.norm()).fold(0.0, f64::max);
    let verdict = if radius < 1.0 - CERTIFY_MARGIN {
        Verdict::Certified
    } else {
        Verdict::NotCertified
    };
    Ok(StabilityReport {
        plane,
        n1,
        m_single,
        m_general,
        eigenvalues,
        general_eigenvalues,
        nilpotency_residual: (m_single * m_single).abs().max(),
        verdict,
    })
}

/// Affine step-to-step map between consecutive post-impact states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepMap {
    pub plane: Plane,
    pub multiplier: Matrix2<f64>,
    pub offset: Vector2<f64>,
}

impl StepMap {
    pub fn identity(plane: Plane) -> Self {
        Self {
            plane,
            multiplier: Matrix2::identity(),
            offset: Vector2::zeros(),
        }
    }

    pub fn apply(&self, state: &PlanarState) -> Result<PlanarState> {
        state.expect_plane(self.plane)?;
        Ok(PlanarState::from_vector(self.plane, self.multiplier * state.to_vector() + self.offset))
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &StepMap) -> StepMap {
        StepMap {
            plane: self.plane,
            multiplier: next.multiplier * self.multiplier,
            offset: next.multiplier * self.offset + next.offset,
        }
    }
}

/// Step map for the step `[T_k⁺, T_{k+1}⁻]` followed by the landing at
/// `T_{k+1}⁻`, which targets `target` at the end of the step after it.
pub fn step_map(
    params: &AlipParams,
    drs: &DrsMotion,
    plane: Plane,
    t_kplus: f64,
    t_k1minus: f64,
    target: f64,
) -> Result<StepMap> {
    step_map_mismatched(params, drs, drs, plane, t_kplus, t_k1minus, target)
}

/// As [`step_map`], with the surface evolving as `plant` while the planner
/// believes it follows `planner`. The landing is decided from the measured
/// pre-impact state.
pub fn step_map_mismatched(
    params: &AlipParams,
    plant: &DrsMotion,
    planner: &DrsMotion,
    plane: Plane,
    t_kplus: f64,
    t_k1minus: f64,
    target: f64,
) -> Result<StepMap> {
    if !(t_kplus.is_finite() && t_k1minus.is_finite() && target.is_finite()) {
        return Err(Error::invalid("step map arguments must be finite"));
    }
    if t_kplus >= t_k1minus {
        return Err(Error::invalid(format!("step start {t_kplus} must precede its end {t_k1minus}")));
    }
    let duration = params.step_duration();
    if ((t_k1minus - t_kplus) - duration).abs() > 1e-9 * duration {
        return Err(Error::invalid(format!(
            "step spans {} s but the step duration is {duration} s",
            t_k1minus - t_kplus
        )));
    }
    let v = model::forcing_unchecked(params, plant, plane, t_kplus, t_k1minus);
    let v2_next = model::forcing_unchecked(params, planner, plane, t_k1minus, t_k1minus + duration).v2;
    let ib = Matrix2::identity() + landing_feedback(params, plane);
    // g: landing offset that does not depend on the state
    let g = Vector2::new(plan_landing(plane, 0.0, target, v2_next, params), 0.0);
    Ok(StepMap {
        plane,
        multiplier: monodromy_single(params, plane),
        offset: ib * v.to_vector() + g,
    })
}

/// Periodic solution of the closed loop, anchored at post-impact instants
/// `t = j T_step`, `j = 0..N1`.
#[derive(Debug, Clone, Serialize)]
pub struct PeriodicOrbit {
    pub plane: Plane,
    pub n1: usize,
    pub n2: usize,
    pub t_sys: f64,
    pub anchors: Vec<PlanarState>,
    pub maps: Vec<StepMap>,
    pub targets: Vec<f64>,
    #[serde(skip)]
    params: AlipParams,
    #[serde(skip)]
    plant: DrsMotion,
}

impl PeriodicOrbit {
    pub fn anchor(&self, step: usize) -> &PlanarState {
        &self.anchors[step % self.n1]
    }

    /// Orbit state at `t`; at a landing instant this is the post-impact state.
    pub fn sample(&self, t: f64) -> PlanarState {
        let step = self.params.step_duration();
        let tau = t.rem_euclid(self.t_sys);
        let j = ((tau / step).floor() as usize).min(self.n1 - 1);
        let start = j as f64 * step;
        model::flow_unchecked(&self.anchors[j], start, tau.max(start), &self.params, &self.plant)
    }

    /// State just before the landing that ends step `j`.
    pub fn preimpact(&self, step: usize) -> PlanarState {
        let j = step % self.n1;
        let t = self.params.step_duration();
        model::flow_unchecked(&self.anchors[j], j as f64 * t, (j + 1) as f64 * t, &self.params, &self.plant)
    }
}

/// Checks `N1 T_step = N2 T_drs` for the axis driving `plane`.
pub fn check_period_ratio(params: &AlipParams, drs: &DrsMotion, plane: Plane, n1: usize, n2: usize) -> Result<()> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::invalid("N1 and N2 must be positive"));
    }
    let Some(period) = drs.least_period(plane.axis())? else {
        return Ok(());
    };
    let t_sys = n1 as f64 * params.step_duration();
    let residual = (t_sys - n2 as f64 * period).abs() / t_sys;
    if residual > RATIO_TOLERANCE {
        return Err(Error::RatioMismatch { plane, n1, n2, residual });
    }
    Ok(())
}

/// Periodic orbit for per-step targets `targets[j]` (the target chosen
/// during step `j`).
pub fn periodic_orbit(
    params: &AlipParams,
    drs: &DrsMotion,
    plane: Plane,
    n1: usize,
    n2: usize,
    targets: &[f64],
) -> Result<PeriodicOrbit> {
    periodic_orbit_mismatched(params, drs, drs, plane, n1, n2, targets)
}

pub fn periodic_orbit_mismatched(
    params: &AlipParams,
    plant: &DrsMotion,
    planner: &DrsMotion,
    plane: Plane,
    n1: usize,
    n2: usize,
    targets: &[f64],
) -> Result<PeriodicOrbit> {
    check_period_ratio(params, plant, plane, n1, n2)?;
    check_period_ratio(params, planner, plane, n1, n2)?;
    if targets.len() != n1 {
        return Err(Error::invalid(format!("expected {n1} step targets, got {}", targets.len())));
    }
    let t = params.step_duration();
    let maps = targets
        .iter()
        .enumerate()
        .map(|(j, &target)| {
            step_map_mismatched(params, plant, planner, plane, j as f64 * t, (j + 1) as f64 * t, target)
        })
        .collect::<Result<Vec<_>>>()?;
    let composed = maps.iter().fold(StepMap::identity(plane), |acc, m| acc.then(m));
    // det(I - M^N1) = 1 - tr + det is 1 for the deadbeat law, so this never fails on its maps.
    let fixed = (Matrix2::identity() - composed.multiplier)
        .try_inverse()
        .ok_or_else(|| Error::invalid("composed step map has an eigenvalue at 1"))?
        * composed.offset;
    let mut anchors = Vec::with_capacity(n1);
    let mut x = PlanarState::from_vector(plane, fixed);
    for map in &maps {
        anchors.push(x);
        x = map.apply(&x)?;
    }
    Ok(PeriodicOrbit {
        plane,
        n1,
        n2,
        t_sys: n1 as f64 * t,
        anchors,
        maps,
        targets: targets.to_vec(),
        params: *params,
        plant: plant.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConvergenceReport {
    pub converged: bool,
    /// First post-impact index from which every later state is within
    /// tolerance; `None` if the tail never settles.
    pub steps_to_converge: Option<usize>,
}

/// Checks that post-impact states `post_impact[i]` (at `t = i T_step`)
/// settle on `orbit` within `2 N1` steps.
pub fn verify_convergence(post_impact: &[PlanarState], orbit: &PeriodicOrbit, tol: f64) -> Result<ConvergenceReport> {
    let window = 2 * orbit.n1;
    if post_impact.len() <= window {
        return Err(Error::InsufficientData(format!(
            "{} post-impact states cover fewer than 2·N1 = {window} steps",
            post_impact.len()
        )));
    }
    let mut settled_from = None;
    for (i, state) in post_impact.iter().enumerate().rev() {
        if state.distance(orbit.anchor(i))? < tol {
            settled_from = Some(i);
        } else {
            break;
        }
    }
    Ok(ConvergenceReport {
        converged: settled_from.is_some_and(|i| i <= window),
        steps_to_converge: settled_from,
    })
}

/// `P` with `Mᵀ P M - P = -Q`.
///
/// For `M² ≈ 0` the series `Σ (Mᵀ)^k Q M^k` stops after two terms, giving
/// `P = Q + Mᵀ Q M`; other stable `M` go through the Kronecker system.
pub fn discrete_lyapunov(m: &Matrix2<f64>, q: &Matrix2<f64>) -> Result<Matrix2<f64>> {
    check_lyapunov_inputs(m, q)?;
    let scale = m.abs().max().max(f64::MIN_POSITIVE);
    if (m * m).abs().max() <= 1e-12 * scale * scale {
        Ok(q + m.transpose() * q * m)
    } else {
        solve_lyapunov_kronecker(m, q)
    }
}

/// General route: `(I - Mᵀ ⊗ Mᵀ) vec(P) = vec(Q)`.
pub fn solve_lyapunov_kronecker(m: &Matrix2<f64>, q: &Matrix2<f64>) -> Result<Matrix2<f64>> {
    check_lyapunov_inputs(m, q)?;
    let mt = m.transpose();
    let mut system = Matrix4::identity();
    for (r1, c1, r2, c2) in (0..2).flat_map(|a| (0..2).flat_map(move |b| (0..2).flat_map(move |c| (0..2).map(move |d| (a, b, c, d))))) {
        // column-major vec: index = row + 2 * col
        system[(r1 + 2 * r2, c1 + 2 * c2)] -= mt[(r1, c1)] * mt[(r2, c2)];
    }
    let rhs = Vector4::new(q[(0, 0)], q[(1, 0)], q[(0, 1)], q[(1, 1)]);
    let sol = system
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::invalid("Lyapunov system is singular"))?;
    let p = Matrix2::new(sol[0], sol[2], sol[1], sol[3]);
    Ok(0.5 * (p + p.transpose()))
}

fn check_lyapunov_inputs(m: &Matrix2<f64>, q: &Matrix2<f64>) -> Result<()> {
    if m.iter().chain(q.iter()).any(|v| !v.is_finite()) {
        return Err(Error::invalid("matrices must be finite"));
    }
    let qscale = q.abs().max();
    if (q[(0, 1)] - q[(1, 0)]).abs() > 1e-12 * qscale {
        return Err(Error::invalid("Q must be symmetric"));
    }
    if !(q[(0, 0)] > 0.0 && q.determinant() > 0.0) {
        return Err(Error::invalid("Q must be positive definite"));
    }
    let rho = spectral_radius(m);
    if rho >= 1.0 {
        return Err(Error::NotStabilizable { spectral_radius: rho });
    }
    Ok(())
}

/// `V_η(x) = xᵀ P x`.
pub fn lyapunov_value(p: &Matrix2<f64>, x: &Vector2<f64>) -> f64 {
    x.dot(&(p * x))
}
