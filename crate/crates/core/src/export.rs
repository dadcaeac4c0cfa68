//! CSV serialization of grid functions and experiment reports.
//!
//! Numbers are written with 17 significant digits in `{:e}` form, which is
//! locale independent and round-trips every `f64`. Non-finite values are
//! written as `inf`, `-inf` or `nan`; absent values as empty fields.

use std::io::Write;

use crate::analysis::{ConvergenceReport, StabilityReport, VonNeumannReport};
use crate::grid::GridFunction;
use crate::roundoff::RoundoffReport;
use crate::semigroup::PosednessReport;
use crate::ubp::UbpRow;

pub type CsvResult<T> = std::result::Result<T, csv::Error>;

/// 17 significant digits.
pub fn format_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_f64).unwrap_or_default()
}

pub fn write_grid_function<W: Write>(w: W, u: &GridFunction) -> CsvResult<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["x", "value"])?;
    for (j, v) in u.values().iter().enumerate() {
        out.write_record([format_f64(u.x(j)), format_f64(*v)])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_posedness<W: Write>(w: W, report: &PosednessReport) -> CsvResult<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["t", "probe_id", "ratio"])?;
    for row in &report.rows {
        out.write_record([format_f64(row.t), row.probe_id.to_string(), format_f64(row.ratio)])?;
    }
    out.flush()?;
    Ok(())
}

/// One row of the shared stability / convergence table.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisRow {
    pub dt: f64,
    pub dx: f64,
    pub r: f64,
    pub n_steps: usize,
    pub bound_l: Option<f64>,
    pub max_abs_g: Option<f64>,
    pub error_final: Option<f64>,
    pub converged: Option<bool>,
}

impl AnalysisRow {
    pub fn from_stability(report: &StabilityReport, dx: f64, vn: Option<&VonNeumannReport>) -> Self {
        Self {
            dt: report.dt,
            dx,
            r: report.dt / (dx * dx),
            n_steps: report.max_steps,
            bound_l: Some(report.bound_l),
            max_abs_g: vn.map(|v| v.max_abs_g),
            error_final: None,
            converged: None,
        }
    }

    pub fn from_convergence(report: &ConvergenceReport) -> Vec<Self> {
        report
            .rows
            .iter()
            .map(|row| Self {
                dt: row.dt,
                dx: row.dx,
                r: row.r,
                n_steps: row.n_steps,
                bound_l: Some(row.bound_l),
                max_abs_g: Some(row.max_abs_g),
                error_final: Some(row.error),
                converged: Some(report.converged),
            })
            .collect()
    }
}

pub const ANALYSIS_HEADER: [&str; 8] = [
    "dt",
    "dx",
    "r",
    "n_steps",
    "bound_L",
    "max_abs_g",
    "error_final",
    "converged",
];

pub fn write_analysis<W: Write>(w: W, rows: &[AnalysisRow]) -> CsvResult<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(ANALYSIS_HEADER)?;
    for row in rows {
        out.write_record([
            format_f64(row.dt),
            format_f64(row.dx),
            format_f64(row.r),
            row.n_steps.to_string(),
            opt(row.bound_l),
            opt(row.max_abs_g),
            opt(row.error_final),
            row.converged.map(|c| c.to_string()).unwrap_or_default(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Consistency residuals, one row per `(Δt, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyRow {
    pub dt: f64,
    pub dx: f64,
    pub r: f64,
    pub t: f64,
    pub residual: f64,
}

pub fn write_consistency<W: Write>(w: W, rows: &[ConsistencyRow]) -> CsvResult<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["dt", "dx", "r", "t", "residual"])?;
    for row in rows {
        out.write_record([
            format_f64(row.dt),
            format_f64(row.dx),
            format_f64(row.r),
            format_f64(row.t),
            format_f64(row.residual),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_roundoff<'a, W: Write>(
    w: W,
    reports: impl IntoIterator<Item = &'a RoundoffReport>,
) -> CsvResult<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["n", "t", "gap", "bits", "dt", "dx", "scheme"])?;
    for report in reports {
        for sample in &report.samples {
            out.write_record([
                sample.n.to_string(),
                format_f64(sample.t),
                format_f64(sample.gap),
                report.significand_bits.to_string(),
                format_f64(report.dt),
                format_f64(report.dx),
                report.scheme.clone(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_ubp<W: Write>(w: W, rows: &[UbpRow]) -> CsvResult<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["k", "op_norm", "probe_id", "probe_bound"])?;
    for row in rows {
        out.write_record([
            row.k.to_string(),
            format_f64(row.op_norm),
            row.probe_id.map(|p| p.to_string()).unwrap_or_default(),
            opt(row.probe_bound),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{FunctionDescriptor, DEFAULT_DOMAIN_LENGTH};

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(format_f64(1.0), "1.0000000000000000e0");
        assert_eq!(format_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(format_f64(f64::INFINITY), "inf");
        for x in [0.1, std::f64::consts::PI, 1e-300, -123.456] {
            assert_eq!(format_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn grid_function_rows() {
        let u = FunctionDescriptor::PointMass(1).sample(4, DEFAULT_DOMAIN_LENGTH).unwrap();
        let mut buf = Vec::new();
        write_grid_function(&mut buf, &u).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "x,value");
        assert_eq!(lines[2], format!("{},1.0000000000000000e0", format_f64(DEFAULT_DOMAIN_LENGTH / 4.0)));
    }

    #[test]
    fn ubp_rows_leave_missing_probe_empty() {
        let rows = crate::ubp::ubp_violation_demo(&[0, 1], &[]).unwrap();
        let mut buf = Vec::new();
        write_ubp(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().nth(2).unwrap(), "1,1.0000000000000000e0,,");
    }
}
