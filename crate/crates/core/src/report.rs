//! CSV tables for trajectories, batches and sweeps.
//!
//! Numbers are written with fixed precision so equal results give equal
//! bytes. Angles are in radians.

use std::io::Write;

use crate::dynamics::{Sample, VehicleState};
use crate::engagement::{BatchResult, InterceptorTrace, NavigationRow, RunOutcome, SpeedRow};
use crate::error::Result;

pub const VEHICLE_COLUMNS: [&str; 6] = ["T", "V", "theta", "X", "H", "U"];
pub const INTERCEPTOR_COLUMNS: [&str; 7] = ["T", "V", "theta", "X", "H", "M", "U_or_Z"];
pub const BATCH_COLUMNS: [&str; 7] = [
    "run",
    "seed",
    "error",
    "T_nav",
    "intercepted",
    "miss",
    "status",
];

fn num(v: f64, digits: usize) -> String {
    if v.is_finite() {
        format!("{v:.digits$}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn write_vehicle_csv<W: Write>(out: W, samples: &[Sample<VehicleState>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(VEHICLE_COLUMNS)?;
    for s in samples {
        let st = &s.state;
        w.write_record([
            num(st.t, 2),
            num(st.v, 3),
            num(st.theta, 6),
            num(st.x, 3),
            num(st.y, 3),
            num(s.command, 6),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `T` is time since launch. The last column carries the load-factor
/// command for planar flights and the lateral position otherwise.
pub fn write_interceptor_csv<W: Write>(out: W, trace: &InterceptorTrace) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(INTERCEPTOR_COLUMNS)?;
    for s in &trace.samples {
        let st = &s.state;
        let last = if trace.three_d { st.z } else { s.command };
        w.write_record([
            num(s.t, 2),
            num(st.v, 3),
            num(st.theta, 6),
            num(st.x, 3),
            num(st.y, 3),
            num(st.mass, 3),
            num(last, 6),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One row per run, then a blank line and `key,value` summary rows.
pub fn write_batch_csv<W: Write>(mut out: W, batch: &BatchResult) -> Result<()> {
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(BATCH_COLUMNS)?;
        for o in &batch.outcomes {
            let row = match o {
                RunOutcome::Completed(r) => [
                    r.run_index.to_string(),
                    batch.seed.to_string(),
                    num(r.landing_error, 6),
                    num(r.nav_time, 3),
                    (r.intercepted as u8).to_string(),
                    num(r.miss_distance, 6),
                    "ok".into(),
                ],
                RunOutcome::Failed { run_index, .. } => [
                    run_index.to_string(),
                    batch.seed.to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    "failed".into(),
                ],
            };
            w.write_record(&row)?;
        }
        w.flush()?;
    }
    writeln!(out)?;
    let s = &batch.stats;
    let opt = |v: Option<f64>| v.map_or_else(String::new, |v| num(v, 6));
    let summary = [
        ("n", s.n.to_string()),
        ("completed", s.completed.to_string()),
        ("failed", s.failed.to_string()),
        ("mean_error", num(s.mean_error, 6)),
        ("max_error", num(s.max_error, 6)),
        ("cep", num(s.cep, 6)),
        ("mean_nav_time", num(s.mean_nav_time, 6)),
        ("launches", s.launches.to_string()),
        ("intercepts", s.intercepts.to_string()),
        ("p_hat", num(s.p_hat, 6)),
        ("p_se", num(s.p_se, 6)),
        ("terminal_launches", s.terminal_launches.to_string()),
        ("p_terminal", opt(s.p_terminal)),
        ("p_terminal_se", opt(s.p_terminal_se)),
        ("kill_radius", num(s.kill_radius, 3)),
    ];
    let mut w = csv::Writer::from_writer(&mut out);
    w.write_record(["key", "value"])?;
    for (k, v) in summary {
        w.write_record([k, v.as_str()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_navigation_sweep_csv<W: Write>(out: W, rows: &[NavigationRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "X",
        "T_nav",
        "max_error",
        "mean_error",
        "cep",
        "completed",
        "failed",
        "error",
    ])?;
    for r in rows {
        w.write_record([
            num(r.x, 1),
            num(r.mean_nav_time, 3),
            num(r.max_error, 6),
            num(r.mean_error, 6),
            num(r.cep, 6),
            r.completed.to_string(),
            r.failed.to_string(),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_speed_sweep_csv<W: Write>(out: W, rows: &[SpeedRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["V_v", "P1", "P1_se", "P2", "P2_se"])?;
    for r in rows {
        w.write_record([
            num(r.v, 1),
            num(r.p1, 6),
            num(r.p1_se, 6),
            num(r.p2, 6),
            num(r.p2_se, 6),
        ])?;
    }
    w.flush()?;
    Ok(())
}
