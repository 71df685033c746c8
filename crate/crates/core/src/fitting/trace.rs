use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intercontact::{ccdf_at_steps, seconds_to_steps};
use crate::model::LinkParams;
use crate::scalar::Real;

pub const DEFAULT_STEP_SECONDS: f64 = 86.4;

/// Representative points of an empirical inter-contact ccdf.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcdfTrace {
    /// `(t_seconds, P(IC > t))`.
    pub points: Vec<(f64, f64)>,
    pub step_seconds: f64,
    pub name: String,
}

impl CcdfTrace {
    pub fn new(
        name: impl Into<String>,
        points: Vec<(f64, f64)>,
        step_seconds: f64,
    ) -> Result<Self> {
        let trace = CcdfTrace {
            points,
            step_seconds,
            name: name.into(),
        };
        trace.validate()?;
        Ok(trace)
    }

    /// Rows are numbered from 1 in error messages.
    pub fn validate(&self) -> Result<()> {
        let bad = |row: usize, reason: String| Error::InvalidTrace {
            trace: self.name.clone(),
            row,
            reason,
        };
        if !(self.step_seconds.is_finite() && self.step_seconds > 0.0) {
            return Err(bad(
                0,
                format!("step_seconds = {} must be positive", self.step_seconds),
            ));
        }
        if self.points.is_empty() {
            return Err(bad(0, "no points".into()));
        }
        for (i, &(t, c)) in self.points.iter().enumerate() {
            let row = i + 1;
            if !(t.is_finite() && t > 0.0) {
                return Err(bad(row, format!("t_seconds = {t} must be positive")));
            }
            if !(c > 0.0 && c <= 1.0) {
                return Err(bad(row, format!("ccdf = {c} must lie in (0, 1]")));
            }
            if i > 0 {
                let (pt, pc) = self.points[i - 1];
                if t <= pt {
                    return Err(bad(
                        row,
                        format!("t_seconds = {t} does not increase (previous {pt})"),
                    ));
                }
                if c > pc {
                    return Err(bad(row, format!("ccdf = {c} increases (previous {pc})")));
                }
            }
        }
        Ok(())
    }

    pub fn steps(&self) -> Vec<usize> {
        self.points
            .iter()
            .map(|&(t, _)| seconds_to_steps(t, self.step_seconds))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Parses `t_seconds,ccdf` CSV text. A `# step_seconds=<x>` comment overrides the step length;
/// other `#` lines and blank lines are skipped.
pub fn parse_trace(name: &str, text: &str) -> Result<CcdfTrace> {
    let bad = |row: usize, reason: String| Error::InvalidTrace {
        trace: name.to_string(),
        row,
        reason,
    };
    let mut step_seconds = DEFAULT_STEP_SECONDS;
    let mut header_seen = false;
    let mut points = Vec::new();
    for (line_no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                if key.trim() == "step_seconds" {
                    step_seconds = value
                        .trim()
                        .parse()
                        .map_err(|_| bad(0, format!("bad step_seconds `{}`", value.trim())))?;
                }
            }
            continue;
        }
        if !header_seen {
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols != ["t_seconds", "ccdf"] {
                return Err(bad(
                    0,
                    format!("line {}: expected header `t_seconds,ccdf`", line_no + 1),
                ));
            }
            header_seen = true;
            continue;
        }
        let row = points.len() + 1;
        let mut cols = line.split(',').map(str::trim);
        let (Some(t), Some(c), None) = (cols.next(), cols.next(), cols.next()) else {
            return Err(bad(row, "expected two columns".into()));
        };
        let t: f64 = t
            .parse()
            .map_err(|_| bad(row, format!("bad t_seconds `{t}`")))?;
        let c: f64 = c.parse().map_err(|_| bad(row, format!("bad ccdf `{c}`")))?;
        points.push((t, c));
    }
    if !header_seen {
        return Err(bad(0, "missing header `t_seconds,ccdf`".into()));
    }
    CcdfTrace::new(name, points, step_seconds)
}

pub fn load_trace(path: impl AsRef<Path>) -> Result<CcdfTrace> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_trace(&name, &text)
}

/// Model ccdf sampled at the given times, ready to be fitted back.
pub fn trace_from_params(
    link: &LinkParams<f64>,
    times_seconds: &[f64],
    step_seconds: f64,
    name: &str,
) -> Result<CcdfTrace> {
    let ks: Vec<usize> = times_seconds
        .iter()
        .map(|&t| seconds_to_steps(t, step_seconds))
        .collect();
    let ccdf = ccdf_at_steps(link, &ks)?;
    CcdfTrace::new(
        name,
        times_seconds.iter().copied().zip(ccdf).collect(),
        step_seconds,
    )
}

/// Mean squared difference of `log10` ccdfs over the trace points.
/// Returns `+inf` when the model ccdf underflows to zero at a point.
pub fn log_mse<T: Real>(link: &LinkParams<T>, trace: &CcdfTrace) -> Result<f64> {
    trace.validate()?;
    let model = ccdf_at_steps(link, &trace.steps())?;
    let mut acc = 0.0;
    for (m, &(_, c)) in model.iter().zip(&trace.points) {
        let m = m.to_f64_lossy();
        if m.is_nan() || m <= 0.0 {
            return Ok(f64::INFINITY);
        }
        let d = m.log10() - c.log10();
        acc += d * d;
    }
    Ok(acc / trace.len() as f64)
}
