//! CSV and JSON emission.
//!
//! `trace.csv` columns, in order:
//!
//! | column | meaning |
//! |---|---|
//! | `t` | time, s |
//! | `x_SC`, `L_yS` | sagittal CoM position (m) and contact momentum (kg·m²/s) |
//! | `y_SC`, `L_xS` | frontal CoM position and contact momentum |
//! | `s` | phase within the step |
//! | `support` | `left` / `right` |
//! | `event` | 1 on a landing row (states are post-impact), else 0 |
//! | `u_x`, `u_y` | step lengths currently commanded for the coming landing, m |
//!
//! Reals use 17 significant digits so values round-trip exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use alip_drs::sim::{SimTrace, SweepCell};

pub const TRACE_HEADER: &str = "t,x_SC,L_yS,y_SC,L_xS,s,support,event,u_x,u_y";
pub const SWEEP_HEADER: &str = "delta_a,delta_t,avg_velocity,bounded,steps_to_converge";

pub fn real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn trace_csv(trace: &SimTrace) -> String {
    let mut out = String::with_capacity(160 * (trace.samples.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for s in &trace.samples {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            real(s.t),
            real(s.sagittal.pos),
            real(s.sagittal.mom),
            real(s.frontal.pos),
            real(s.frontal.mom),
            real(s.phase),
            s.support.as_str(),
            u8::from(s.event),
            real(s.u_x),
            real(s.u_y),
        );
    }
    out
}

pub fn sweep_csv(grid: &[Vec<SweepCell>]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for cell in grid.iter().flatten() {
        let metrics = cell.metrics.as_ref();
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            real(cell.delta_a),
            real(cell.delta_t),
            metrics.map_or_else(|| "nan".to_string(), |m| real(m.avg_forward_velocity)),
            cell.bounded,
            metrics
                .and_then(|m| m.steps_to_converge)
                .map_or_else(String::new, |n| n.to_string()),
        );
    }
    out
}

/// Writes through a temporary sibling so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let tmp = path.with_extension("partial");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)
}
