//! Deterministic file emission: traces as CSV, reports as JSON.
//!
//! All floats are serialized with 17 significant digits so reruns of the same
//! configuration produce byte-identical bodies; wall-clock values are
//! confined to the metrics JSON metadata.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::Result;
use crate::metrics::MetricsReport;
use crate::policies::Trace;

/// 17 significant digits, locale-independent.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes the per-round trace with the pinned schema
/// `t,x[0..d-1],y[0..d-1],b[0..d-1],cost,violation,dist,eta,ccv_running,policy_tag`.
pub fn write_trace_csv(trace: &Trace, path: &Path) -> Result<()> {
    let d = trace.meta.dim;
    let mut out = String::new();
    out.push('t');
    for field in ["x", "y", "b"] {
        for i in 0..d {
            out.push_str(&format!(",{field}[{i}]"));
        }
    }
    out.push_str(",cost,violation,dist,eta,ccv_running,policy_tag\n");
    for rec in &trace.records {
        out.push_str(&rec.t.to_string());
        for v in [&rec.x, &rec.y, &rec.b] {
            for i in 0..d {
                out.push(',');
                out.push_str(&format_float(v[i]));
            }
        }
        for v in [rec.cost, rec.violation, rec.dist, rec.eta, rec.ccv_running] {
            out.push(',');
            out.push_str(&format_float(v));
        }
        out.push(',');
        out.push_str(&rec.tag.to_string());
        out.push('\n');
    }
    atomic_write(path, out.as_bytes())
}

pub fn write_width_csv(widths: &[(usize, f64, f64)], path: &Path) -> Result<()> {
    let mut out = String::from("t,width,stderr\n");
    for (t, w, se) in widths {
        out.push_str(&format!("{t},{},{}\n", format_float(*w), format_float(*se)));
    }
    atomic_write(path, out.as_bytes())
}

pub fn write_theta_csv(thetas: &[(usize, f64)], path: &Path) -> Result<()> {
    let mut out = String::from("t,theta\n");
    for (t, a) in thetas {
        out.push_str(&format!("{t},{}\n", format_float(*a)));
    }
    atomic_write(path, out.as_bytes())
}

pub fn write_metrics_json(
    trace: &Trace,
    report: &MetricsReport,
    instance_json: &serde_json::Value,
    policy_params: &serde_json::Value,
    path: &Path,
) -> Result<()> {
    let now = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let doc = serde_json::json!({
        "meta": {
            "policy": trace.meta.policy,
            "policy_params": policy_params,
            "family": trace.meta.family,
            "seed": trace.meta.seed,
            "dim": trace.meta.dim,
            "horizon": trace.meta.horizon,
            "diameter": trace.meta.diameter,
            "lipschitz": trace.meta.lipschitz,
            "switch_time": trace.switch_time,
            "valid": trace.valid,
            "failure": trace.failure,
            "generated_unix_secs": now,
        },
        "instance": instance_json,
        "report": report,
    });
    atomic_write(path, serde_json::to_string_pretty(&doc)?.as_bytes())
}

/// Write to a sibling temp file, then rename into place.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_has_17_significant_digits() {
        let s = format_float(std::f64::consts::PI);
        assert_eq!(s, "3.1415926535897931e0");
        assert_eq!(format_float(0.0), "0.0000000000000000e0");
        let back: f64 = format_float(1.0 / 3.0).parse().unwrap();
        assert_eq!(back, 1.0 / 3.0);
    }
}
