//! CSV and JSON writers. Numbers are printed with fixed six-decimal
//! formatting so identical runs produce byte-identical files; the run
//! timestamp lives only in the JSON sidecar.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::sweep::{BoundsRow, CrosspointReport, SweepRow, SweepSidecar};
use crate::Result;

/// Exact sweep CSV header.
pub const SWEEP_HEADER: &str = "k,series,sum_rate,per_user_rate,ci95_halfwidth,trials,status";

/// Exact bounds-table CSV header.
pub const BOUNDS_HEADER: &str =
    "k,zf_vec_lower,zf_mat_upper,mf_mat_lower,mf_vec_upper,gap_zf,gap_mf,status";

fn fmt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.6}"),
        None => String::new(),
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let status = if r.ok { "ok" } else { "error" };
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.k,
            r.series.label(),
            fmt(r.sum_rate),
            fmt(r.per_user_rate),
            fmt(r.ci95_halfwidth),
            r.trials,
            status
        ));
    }
    out
}

pub fn bounds_csv(rows: &[BoundsRow]) -> String {
    let mut out = String::from(BOUNDS_HEADER);
    out.push('\n');
    for r in rows {
        let status = if r.ok() { "ok" } else { "error" };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.k,
            fmt(r.zf_vec_lower),
            fmt(r.zf_mat_upper),
            fmt(r.mf_mat_lower),
            fmt(r.mf_vec_upper),
            fmt(r.gap_zf),
            fmt(r.gap_mf),
            status
        ));
    }
    out
}

pub fn write_sweep(path: &Path, rows: &[SweepRow], sidecar: &SweepSidecar) -> Result<()> {
    write_text(path, &sweep_csv(rows))?;
    let json = serde_json::to_string_pretty(sidecar)?;
    write_text(&path.with_extension("json"), &json)?;
    Ok(())
}

pub fn write_bounds(path: &Path, rows: &[BoundsRow]) -> Result<()> {
    write_text(path, &bounds_csv(rows))
}

pub fn crosspoint_json(report: &CrosspointReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)?)
}

/// Debug dump of one channel draw: one row per user, columns alternating
/// real and imaginary parts.
pub fn channel_csv(h: &mimo_core::channel::ChannelMatrix) -> String {
    let mut out = String::new();
    let m = h.matrix();
    for r in 0..h.k_users() {
        for c in 0..h.m_antennas() {
            if c > 0 {
                out.push(',');
            }
            let z = m[(r, c)];
            out.push_str(&format!("{:.9},{:.9}", z.re, z.im));
        }
        out.push('\n');
    }
    out
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::{BoundSeries, Series};
    use mimo_core::PrecoderScheme;

    #[test]
    fn sweep_csv_formats_rows() {
        let rows = vec![
            SweepRow {
                k: 3,
                series: Series::MonteCarlo(PrecoderScheme::ZF_VECTOR),
                sum_rate: Some(3.25),
                per_user_rate: Some(1.0833333333),
                ci95_halfwidth: Some(0.01),
                trials: 100,
                ok: true,
            },
            SweepRow {
                k: 8,
                series: Series::Bound(BoundSeries::ZfMatUpper),
                sum_rate: None,
                per_user_rate: None,
                ci95_halfwidth: None,
                trials: 0,
                ok: false,
            },
        ];
        let csv = sweep_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], SWEEP_HEADER);
        assert_eq!(lines[1], "3,zf-vec,3.250000,1.083333,0.010000,100,ok");
        assert_eq!(lines[2], "8,bound-zf-mat-upper,,,,0,error");
    }

    #[test]
    fn channel_dump_shape() {
        let cfg = mimo_core::SystemConfig {
            num_rus: 1,
            antennas_per_ru: 3,
            num_users: 2,
            snr_db: 0.0,
            trials: 2,
            seed: 0,
        };
        let h = mimo_core::channel::generate_channel(&cfg, 0);
        let csv = channel_csv(&h);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        for line in lines {
            assert_eq!(line.split(',').count(), 6);
        }
    }
}
