//! Canned scenarios: simulation cases `case_a`..`case_d` and hardware
//! experiment cases `exp_a`..`exp_d`.
//!
//! All use m = 46.1 kg, H = 0.9 m, T_step = 0.4 s, W = 0.2 m, a 1 ms tick and
//! a standing start on the right foot. Alternating lateral targets repeat
//! every two steps, so frontal `N1` is always even.

use alip_drs::model::Axis;

use crate::config::{DrsSection, InitialSection, ParamsSection, PeriodsSection, RunConfig, RunSection, TargetsSection};

pub const NAMES: [&str; 8] = ["case_a", "case_b", "case_c", "case_d", "exp_a", "exp_b", "exp_c", "exp_d"];

pub fn preset(name: &str) -> Option<RunConfig> {
    let (drs, sagittal, periods, duration) = match name {
        "case_a" => (DrsSection::sinusoid(Axis::X, 0.04, 0.4), 4.1, [1, 1, 2, 1], 10.0),
        "case_b" => (DrsSection::sinusoid(Axis::X, 0.14, 6.0), 12.5, [15, 1, 2, 1], 30.0),
        "case_c" => (DrsSection::sinusoid(Axis::Y, 0.06, 0.72), 0.0, [1, 1, 18, 10], 30.0),
        "case_d" => {
            let mut d = DrsSection::sinusoid(Axis::X, 0.04, 0.4);
            d.push(Axis::Y, 0.1, 6.0, 0.0);
            (d, 6.27, [1, 1, 30, 2], 40.0)
        }
        "exp_a" => (DrsSection::sinusoid(Axis::Y, 0.04, 6.8), 0.0, [1, 1, 34, 2], 45.0),
        "exp_b" => (DrsSection::sinusoid(Axis::Y, 0.04, 5.6), 0.0, [1, 1, 14, 1], 20.0),
        "exp_c" => (DrsSection::sinusoid(Axis::X, 0.04, 6.8), 0.0, [17, 1, 2, 1], 24.0),
        "exp_d" => (DrsSection::sinusoid(Axis::X, 0.04, 5.6), 0.0, [14, 1, 2, 1], 20.0),
        _ => return None,
    };
    Some(RunConfig {
        params: ParamsSection::default(),
        drs_true: drs,
        drs_believed: None,
        targets: TargetsSection::step_width(sagittal),
        periods: PeriodsSection {
            sagittal_n1: periods[0],
            sagittal_n2: periods[1],
            frontal_n1: periods[2],
            frontal_n2: periods[3],
        },
        run: RunSection {
            duration,
            ..RunSection::default()
        },
        initial: InitialSection::default(),
        disturbances: Vec::new(),
    })
}
