//! CSV emission with a fixed, versioned schema. All numeric columns use 17
//! significant digits so values round-trip through text exactly.

use crate::error::Result;
use crate::experiment::{SweepRow, TimeSeries};
use std::fmt::Write as _;
use std::path::Path;

pub const TIMESERIES_HEADER: &str = "t,err_l2,err_h1,energy_ref,energy_twin,nudge_active,scheme";
pub const SWEEP_HEADER: &str = "scheme,mu,tau,convergence_time,final_err,failed";
pub const SPECTRUM_HEADER: &str = "shell,energy";

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn timeseries_csv(series: &TimeSeries) -> String {
    let mut out = String::with_capacity(series.rows.len() * 128);
    out.push_str(TIMESERIES_HEADER);
    out.push('\n');
    for r in &series.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt(r.t),
            fmt(r.err_l2),
            fmt(r.err_h1),
            fmt(r.energy_ref),
            fmt(r.energy_twin),
            u8::from(r.nudge_active),
            series.scheme
        );
    }
    out
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.scheme,
            fmt(r.mu),
            fmt(r.tau),
            fmt(r.convergence_time.unwrap_or(f64::NAN)),
            fmt(r.final_err),
            r.failed
        );
    }
    out
}

pub fn spectrum_csv(spectrum: &[f64]) -> String {
    let mut out = String::new();
    out.push_str(SPECTRUM_HEADER);
    out.push('\n');
    for (shell, &e) in spectrum.iter().enumerate() {
        let _ = writeln!(out, "{shell},{}", fmt(e));
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, text)?;
    Ok(())
}
