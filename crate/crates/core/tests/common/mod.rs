//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use alip_drs::model::{self, AlipParams, DrsMotion, PlanarState, Plane};
use nalgebra::{Matrix2, Vector2};

pub fn digit() -> AlipParams {
    AlipParams::with_gravity(46.1, 0.9, 9.81, 0.4, 0.2).unwrap()
}

/// `exp(A dt)` by scaling and squaring a truncated Taylor series.
pub fn expm_series(a: &Matrix2<f64>, dt: f64) -> Matrix2<f64> {
    let mut m = a * dt;
    let mut squarings = 0;
    while m.abs().max() > 0.5 {
        m /= 2.0;
        squarings += 1;
    }
    let mut term = Matrix2::identity();
    let mut sum = Matrix2::identity();
    for k in 1..30 {
        term = term * m / k as f64;
        sum += term;
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

/// Classic fixed-step RK4 on `ẋ = A x + [-v_S(t); 0]`.
pub fn rk4_flow(state: &PlanarState, t1: f64, t2: f64, params: &AlipParams, drs: &DrsMotion, h: f64) -> PlanarState {
    let a = model::system_matrix(params, state.plane);
    let axis = state.plane.axis();
    let f = |t: f64, x: &Vector2<f64>| a * x + Vector2::new(-drs.velocity(axis, t), 0.0);
    let steps = ((t2 - t1) / h).round().max(1.0) as usize;
    let h = (t2 - t1) / steps as f64;
    let mut x = state.to_vector();
    for i in 0..steps {
        let t = t1 + i as f64 * h;
        let k1 = f(t, &x);
        let k2 = f(t + 0.5 * h, &(x + 0.5 * h * k1));
        let k3 = f(t + 0.5 * h, &(x + 0.5 * h * k2));
        let k4 = f(t + h, &(x + h * k3));
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    PlanarState::from_vector(state.plane, x)
}

const GK_NODES: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const K15_WEIGHTS: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const G7_WEIGHTS: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// `(Kronrod estimate, |Kronrod - Gauss|, Kronrod estimate of ∫|f|)`.
fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64, f64) {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = K15_WEIGHTS[7] * fc;
    let mut gauss = G7_WEIGHTS[3] * fc;
    let mut mass = K15_WEIGHTS[7] * fc.abs();
    for i in 0..7 {
        let (lo, hi) = (f(c - r * GK_NODES[i]), f(c + r * GK_NODES[i]));
        kronrod += K15_WEIGHTS[i] * (lo + hi);
        mass += K15_WEIGHTS[i] * (lo.abs() + hi.abs());
        if i % 2 == 1 {
            gauss += G7_WEIGHTS[i / 2] * (lo + hi);
        }
    }
    (kronrod * r, ((kronrod - gauss) * r).abs(), mass * r.abs())
}

/// Adaptive Gauss–Kronrod (7/15) quadrature with recursive bisection to a
/// relative tolerance `rtol`. Pieces stop splitting once their error
/// estimate reaches roundoff of `∫|f|` over the piece.
pub fn adaptive_quad(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rtol: f64) -> f64 {
    fn recurse(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (value, err, mass) = gk15(f, a, b);
        if err <= tol || err <= 1e-14 * mass || depth == 0 {
            return value;
        }
        let m = 0.5 * (a + b);
        recurse(f, a, m, 0.5 * tol, depth - 1) + recurse(f, m, b, 0.5 * tol, depth - 1)
    }
    let (rough, _, _) = gk15(f, a, b);
    recurse(f, a, b, rtol * rough.abs(), 12)
}

/// [`adaptive_quad`] over consecutive pieces split at `breaks`.
pub fn piecewise_quad(f: &dyn Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64], rtol: f64) -> f64 {
    let mut cuts: Vec<f64> = std::iter::once(a)
        .chain(breaks.iter().copied().filter(|&x| x > a && x < b))
        .chain(std::iter::once(b))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.windows(2).map(|w| adaptive_quad(f, w[0], w[1], rtol)).sum()
}

/// `∫ exp(A (t2 - τ)) [-v_S(τ); 0] dτ` by quadrature, per component.
pub fn forcing_by_quadrature(params: &AlipParams, drs: &DrsMotion, plane: Plane, t1: f64, t2: f64) -> (f64, f64) {
    forcing_by_quadrature_split(params, drs, plane, t1, t2, &[])
}

/// As [`forcing_by_quadrature`], splitting the interval at `breaks` (e.g.
/// spline knots where the integrand loses smoothness).
pub fn forcing_by_quadrature_split(
    params: &AlipParams,
    drs: &DrsMotion,
    plane: Plane,
    t1: f64,
    t2: f64,
    breaks: &[f64],
) -> (f64, f64) {
    let a = model::system_matrix(params, plane);
    let axis = plane.axis();
    let integrand = |tau: f64, row: usize| {
        let phi = expm_series(&a, t2 - tau);
        -phi[(row, 0)] * drs.velocity(axis, tau)
    };
    (
        piecewise_quad(&|t| integrand(t, 0), t1, t2, breaks, 1e-13),
        piecewise_quad(&|t| integrand(t, 1), t1, t2, breaks, 1e-13),
    )
}
