use rayon::prelude::*;
use serde::Serialize;

use super::{compute_metrics, run, Metrics, Scenario, SimStatus};
use crate::error::{Error, Result};
use crate::model::{Axis, DrsMotion, Sinusoid};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCell {
    pub delta_a: f64,
    pub delta_t: f64,
    pub status: Option<SimStatus>,
    /// Divergence guard never tripped.
    pub bounded: bool,
    pub metrics: Option<Metrics>,
    /// Why the cell produced no metrics.
    pub error: Option<String>,
}

/// Runs `base` with the planner's belief of the sagittal surface motion
/// perturbed to `(A + δA) cos(2π (t + δt) / T)`; the plant is untouched.
/// Returns `grid[i][j]` for `delta_a[i]`, `delta_t[j]`.
pub fn uncertainty_sweep(base: &Scenario, delta_a: &[f64], delta_t: &[f64]) -> Result<Vec<Vec<SweepCell>>> {
    let nominal = single_sagittal_sinusoid(&base.drs_believed)?;
    base.validate()?;
    let cells: Vec<SweepCell> = (0..delta_a.len() * delta_t.len())
        .into_par_iter()
        .map(|idx| {
            let (da, dt) = (delta_a[idx / delta_t.len()], delta_t[idx % delta_t.len()]);
            run_cell(base, &nominal, da, dt)
        })
        .collect();
    let mut grid = Vec::with_capacity(delta_a.len());
    let mut cells = cells.into_iter();
    for _ in delta_a {
        grid.push(cells.by_ref().take(delta_t.len()).collect());
    }
    Ok(grid)
}

fn single_sagittal_sinusoid(drs: &DrsMotion) -> Result<Sinusoid> {
    let x_terms: Vec<_> = drs.axis_terms(Axis::X).collect();
    match (x_terms.as_slice(), drs.profile(Axis::X)) {
        ([only], None) => Ok(**only),
        _ => Err(Error::invalid("the sweep needs a single-sinusoid sagittal surface motion")),
    }
}

fn run_cell(base: &Scenario, nominal: &Sinusoid, da: f64, dt: f64) -> SweepCell {
    let mut cell = SweepCell {
        delta_a: da,
        delta_t: dt,
        status: None,
        bounded: false,
        metrics: None,
        error: None,
    };
    let perturbed = Sinusoid::new(
        Axis::X,
        nominal.amplitude() + da,
        nominal.period(),
        nominal.phase() + std::f64::consts::TAU * dt / nominal.period(),
    );
    let believed = perturbed.map(|s| {
        let mut terms: Vec<Sinusoid> = base.drs_believed.terms().iter().filter(|t| t.axis() != Axis::X).copied().collect();
        terms.push(s);
        let mut drs = DrsMotion::new(terms);
        if let Some(p) = base.drs_believed.profile(Axis::Y) {
            drs = drs.with_profile(Axis::Y, p.clone());
        }
        drs
    });
    let scenario = match believed {
        Ok(drs) => Scenario {
            drs_believed: drs,
            ..base.clone()
        },
        Err(e) => {
            cell.error = Some(e.to_string());
            return cell;
        }
    };
    match run(&scenario) {
        Ok(trace) => {
            cell.status = Some(trace.status);
            cell.bounded = !trace.diverged();
            match compute_metrics(&trace, &scenario) {
                Ok(m) => cell.metrics = Some(m),
                Err(e) => cell.error = Some(e.to_string()),
            }
        }
        Err(e) => cell.error = Some(e.to_string()),
    }
    cell
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::footstep::TargetPolicy;
    use crate::model::AlipParams;

    fn base() -> Scenario {
        let p = AlipParams::with_gravity(46.1, 0.9, 9.81, 0.4, 0.2).unwrap();
        let mut s = Scenario::new(p, DrsMotion::sinusoid(Axis::X, 0.04, 0.4, 0.0), TargetPolicy::StepWidth { sagittal: 4.1 });
        s.duration = 4.0;
        s.control_tick = 0.01;
        s
    }

    #[test]
    fn zero_cell_matches_plain_run() {
        let s = base();
        let grid = uncertainty_sweep(&s, &[0.0], &[0.0]).unwrap();
        let direct = compute_metrics(&run(&s).unwrap(), &s).unwrap();
        assert_eq!(grid[0][0].metrics.as_ref().unwrap(), &direct);
    }

    #[test]
    fn grid_shape_and_transpose() {
        let s = base();
        let grid = uncertainty_sweep(&s, &[0.0, 0.026], &[0.0, 0.13, 0.26]).unwrap();
        assert_eq!(grid.len(), 2);
        assert!(grid.iter().all(|row| row.len() == 3));
        let swapped = uncertainty_sweep(&s, &[0.026, 0.0], &[0.26, 0.13, 0.0]).unwrap();
        for i in 0..2 {
            for j in 0..3 {
                assert_eq!(grid[i][j], swapped[1 - i][2 - j]);
            }
        }
        assert!(grid.iter().flatten().all(|c| c.bounded && c.metrics.as_ref().unwrap().converged));
    }

    #[test]
    fn requires_sinusoidal_sagittal_motion() {
        let mut s = base();
        s.drs_believed = DrsMotion::stationary();
        assert!(uncertainty_sweep(&s, &[0.0], &[0.0]).is_err());
    }
}
