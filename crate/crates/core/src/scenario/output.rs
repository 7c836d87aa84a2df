//! CSV writers. Floats carry 12 significant digits, rows end in a newline
//! and there is no trailing delimiter.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::observables::ObservableTrace;

pub const TRACE_HEADER: &str = "time,concurrence,p_q1,p_q2,n_photons,purity";

/// 12 significant digits in scientific notation.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn trace_csv(trace: &ObservableTrace) -> String {
    let mut out = String::with_capacity(80 * (trace.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for k in 0..trace.len() {
        let p = trace.point(k);
        let row = [
            trace.times[k],
            p.concurrence,
            p.p_q1,
            p.p_q2,
            p.n_photons,
            p.purity,
        ];
        let cells: Vec<String> = row.iter().map(|v| fmt_float(*v)).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

pub fn write_trace(path: &Path, trace: &ObservableTrace) -> Result<()> {
    fs::write(path, trace_csv(trace))?;
    Ok(())
}

/// Writes rows under a header, creating the parent directory.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(path.to_path_buf())
}

/// Reads a trace CSV back; used by tests and examples.
pub fn read_trace(path: &Path) -> Result<ObservableTrace> {
    let text = fs::read_to_string(path)?;
    let mut trace = ObservableTrace::default();
    for line in text.lines().skip(1) {
        let v: Vec<f64> = line
            .split(',')
            .map(|c| c.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| crate::error::Error::InvalidConfig(format!("bad CSV value: {e}")))?;
        if v.len() != 6 {
            return Err(crate::error::Error::InvalidConfig(format!(
                "expected 6 columns, got {}",
                v.len()
            )));
        }
        trace.push(
            v[0],
            crate::observables::ObservablePoint {
                concurrence: v[1],
                p_q1: v[2],
                p_q2: v[3],
                n_photons: v[4],
                purity: v[5],
            },
        );
    }
    Ok(trace)
}
