use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use laxlab_core::export::{self, AnalysisRow, ConsistencyRow};
use laxlab_core::roundoff::{halving_sweep, RoundoffReport};
use laxlab_core::ubp::norm_tk;
use laxlab_core::{
    consistency_check, convergence_experiment, roundoff_growth_experiment, ConvergenceReport, stability_check_with,
    ubp_violation_demo, von_neumann_check, ConvergenceOptions, FiniteSequence, FunctionDescriptor,
    HeatSemigroup, LabError, PrecisionSpec, RefinementPath, SchemeKind,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{Config, ConfigError, ExperimentConfig, ExperimentKind};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("section [{section}]: {source}")]
    Lab {
        section: String,
        #[source]
        source: LabError,
    },
    #[error("section [{section}]: csv: {message}")]
    Csv { section: String, message: String },
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
    #[error("worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub jobs: usize,
    pub seed: u64,
}

/// Rendered output of one experiment section.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionOutput {
    pub name: String,
    pub kind: ExperimentKind,
    pub scheme: String,
    pub csv: Vec<u8>,
    pub summary: String,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub csv_files: Vec<PathBuf>,
    pub summary_file: PathBuf,
    pub sections: Vec<SectionOutput>,
}

/// Runs every section, writes `<kind>_<scheme>_<section>_<timestamp>.csv`
/// per section plus `summary.txt`.
pub fn run(config: &Config, options: &RunOptions) -> Result<RunSummary, RunError> {
    let sections = run_sections(config, options.jobs, options.seed)?;
    std::fs::create_dir_all(&options.out_dir)?;
    let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%SZ").to_string();
    let mut csv_files = Vec::with_capacity(sections.len());
    for s in &sections {
        let file = options
            .out_dir
            .join(format!("{}_{}_{}_{}.csv", s.kind.as_str(), s.scheme, s.name, stamp));
        std::fs::write(&file, &s.csv)?;
        csv_files.push(file);
    }
    let summary_file = options.out_dir.join("summary.txt");
    std::fs::write(&summary_file, render_summary(&sections))?;
    Ok(RunSummary {
        csv_files,
        summary_file,
        sections,
    })
}

/// Evaluates all sections on a pool of `jobs` workers; output order follows
/// the config's section order.
pub fn run_sections(config: &Config, jobs: usize, seed: u64) -> Result<Vec<SectionOutput>, RunError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| RunError::Pool(e.to_string()))?;
    pool.install(|| {
        config
            .experiments
            .par_iter()
            .map(|e| run_section(e, e.seed.unwrap_or(seed)))
            .collect()
    })
}

pub fn render_summary(sections: &[SectionOutput]) -> String {
    let mut text = String::new();
    for s in sections {
        let _ = writeln!(text, "== [{}] kind={} scheme={}", s.name, s.kind.as_str(), s.scheme);
        text.push_str(&s.summary);
        text.push('\n');
    }
    text
}

pub fn run_section(e: &ExperimentConfig, seed: u64) -> Result<SectionOutput, RunError> {
    let lab = |source: LabError| RunError::Lab {
        section: e.name.clone(),
        source,
    };
    let csv_err = |err: laxlab_core::export::CsvResult<()>| {
        err.map_err(|err| RunError::Csv {
            section: e.name.clone(),
            message: err.to_string(),
        })
    };
    let mut csv = Vec::new();
    let mut summary = String::new();
    match e.kind {
        ExperimentKind::Stability => {
            let rows = stability(e, &mut summary).map_err(lab)?;
            csv_err(export::write_analysis(&mut csv, &rows))?;
        }
        ExperimentKind::Consistency => {
            let rows = consistency(e, seed, &mut summary).map_err(lab)?;
            csv_err(export::write_consistency(&mut csv, &rows))?;
        }
        ExperimentKind::Convergence => {
            let rows = convergence(e, seed, &mut summary).map_err(lab)?;
            csv_err(export::write_analysis(&mut csv, &rows))?;
        }
        ExperimentKind::Roundoff => {
            let reports = roundoff(e, seed, &mut summary).map_err(lab)?;
            csv_err(export::write_roundoff(&mut csv, &reports))?;
        }
        ExperimentKind::UbpDemo => {
            let rows = ubp(e, seed, &mut summary).map_err(lab)?;
            csv_err(export::write_ubp(&mut csv, &rows))?;
        }
        ExperimentKind::ProperlyPosed => {
            let report = properly_posed(e, seed, &mut summary).map_err(lab)?;
            csv_err(export::write_posedness(&mut csv, &report))?;
        }
    }
    Ok(SectionOutput {
        name: e.name.clone(),
        kind: e.kind,
        scheme: e.scheme.map_or("none", SchemeKind::as_str).to_string(),
        csv,
        summary,
    })
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    dt: f64,
    dx: f64,
    n: usize,
}

fn grid_list(e: &ExperimentConfig) -> Vec<usize> {
    let mut grids = e.grids.clone();
    if let Some(n) = e.grid_n {
        if !grids.contains(&n) {
            grids.push(n);
        }
    }
    grids
}

/// Cells from `r × grids` (`Δt = rΔx²` on each grid) or from `dt` along the path.
fn cells(e: &ExperimentConfig) -> laxlab_core::Result<Vec<Cell>> {
    let grids = grid_list(e);
    if !e.ratios.is_empty() && !grids.is_empty() && e.dts.is_empty() {
        let mut out = Vec::new();
        for &n in &grids {
            let dx = e.domain_length / n as f64;
            for &r in &e.ratios {
                out.push(Cell { dt: r * dx * dx, dx, n });
            }
        }
        return Ok(out);
    }
    let path = path(e)?;
    e.dts
        .iter()
        .map(|&dt| {
            let g = path.realize(dt, e.domain_length)?;
            Ok(Cell { dt, dx: g.dx, n: g.n })
        })
        .collect()
}

fn path(e: &ExperimentConfig) -> laxlab_core::Result<RefinementPath> {
    match (&e.path, e.ratios.as_slice()) {
        (Some(p), _) => Ok(p.clone()),
        (None, [r]) => RefinementPath::fixed_ratio(*r),
        _ => Err(LabError::Domain("no refinement path configured".into())),
    }
}

/// `(path, dts)` for sweeps: one `r` with `grids`, or `dt` with a path.
pub fn sweep(e: &ExperimentConfig) -> laxlab_core::Result<(RefinementPath, Vec<f64>)> {
    if e.dts.is_empty() {
        let r = e.ratios[0];
        let dts = e
            .grids
            .iter()
            .map(|&n| {
                let dx = e.domain_length / n as f64;
                r * dx * dx
            })
            .collect();
        return Ok((RefinementPath::fixed_ratio(r)?, dts));
    }
    Ok((path(e)?, e.dts.clone()))
}

fn scheme_of(e: &ExperimentConfig) -> laxlab_core::Result<SchemeKind> {
    e.scheme
        .ok_or_else(|| LabError::Domain(format!("section [{}] names no scheme", e.name)))
}

/// First configured probe, `sine(1)` by default.
pub fn probe(e: &ExperimentConfig, seed: u64) -> FunctionDescriptor {
    e.probes
        .first()
        .map(|p| p.resolve(seed))
        .unwrap_or(FunctionDescriptor::Sine(1))
}

fn stability(e: &ExperimentConfig, summary: &mut String) -> laxlab_core::Result<Vec<AnalysisRow>> {
    let kind = scheme_of(e)?;
    let mut rows = Vec::new();
    let _ = writeln!(summary, "{:>12} {:>10} {:>6} {:>14} {:>10} {:>8}", "dt", "r", "N", "bound_L", "max|g|", "stable");
    for cell in cells(e)? {
        let s = kind.build(cell.dt, cell.dx, cell.n)?;
        let report = stability_check_with(&s, e.horizon, e.threshold)?;
        let vn = von_neumann_check(&s, cell.n)?;
        let _ = writeln!(
            summary,
            "{:>12.4e} {:>10.4} {:>6} {:>14.6e} {:>10.6} {:>8}",
            cell.dt,
            s.ratio(),
            cell.n,
            report.bound_l,
            vn.max_abs_g,
            report.stable
        );
        rows.push(AnalysisRow::from_stability(&report, cell.dx, Some(&vn)));
    }
    Ok(rows)
}

fn consistency(e: &ExperimentConfig, seed: u64, summary: &mut String) -> laxlab_core::Result<Vec<ConsistencyRow>> {
    let kind = scheme_of(e)?;
    let descriptor = probe(e, seed);
    let mut rows = Vec::new();
    let _ = writeln!(summary, "{:>12} {:>10} {:>6} {:>8} {:>14}", "dt", "r", "N", "t", "residual");
    for cell in cells(e)? {
        let s = kind.build(cell.dt, cell.dx, cell.n)?;
        let sg = HeatSemigroup::new(e.horizon, cell.n)?.with_domain_length(e.domain_length)?;
        let u = descriptor.sample(cell.n, e.domain_length)?;
        for (t, residual) in consistency_check(&s, &sg, &u, &e.ts)? {
            let _ = writeln!(summary, "{:>12.4e} {:>10.4} {:>6} {:>8.4} {:>14.6e}", cell.dt, s.ratio(), cell.n, t, residual);
            rows.push(ConsistencyRow {
                dt: cell.dt,
                dx: cell.dx,
                r: s.ratio(),
                t,
                residual,
            });
        }
    }
    Ok(rows)
}

fn probe_grid(e: &ExperimentConfig, path: &RefinementPath, dts: &[f64]) -> laxlab_core::Result<usize> {
    if let Some(n) = e.grid_n {
        return Ok(n);
    }
    dts.iter()
        .map(|&dt| path.realize(dt, e.domain_length).map(|g| g.n))
        .collect::<laxlab_core::Result<Vec<_>>>()
        .map(|ns| ns.into_iter().min().unwrap_or(2))
}

/// The convergence sweep a `convergence` section describes.
pub fn convergence_report(e: &ExperimentConfig, seed: u64) -> laxlab_core::Result<ConvergenceReport> {
    let kind = scheme_of(e)?;
    let (path, dts) = sweep(e)?;
    let n0 = probe_grid(e, &path, &dts)?;
    let u = probe(e, seed).sample(n0, e.domain_length)?;
    let sg = HeatSemigroup::new(e.horizon, n0)?.with_domain_length(e.domain_length)?;
    let options = ConvergenceOptions {
        tolerance: e.tolerance,
        stability_threshold: e.threshold,
        ..ConvergenceOptions::default()
    };
    convergence_experiment(kind, &path, &sg, &u, e.horizon, &dts, &options)
}

fn convergence(e: &ExperimentConfig, seed: u64, summary: &mut String) -> laxlab_core::Result<Vec<AnalysisRow>> {
    let report = convergence_report(e, seed)?;
    let path = &report.path;
    let _ = writeln!(summary, "path: {path}");
    let _ = writeln!(summary, "{:>12} {:>10} {:>6} {:>8} {:>14} {:>14}", "dt", "r", "N", "steps", "error", "bound_L");
    for row in &report.rows {
        let _ = writeln!(
            summary,
            "{:>12.4e} {:>10.4} {:>6} {:>8} {:>14.6e} {:>14.6e}",
            row.dt, row.r, row.grid_n, row.n_steps, row.error, row.bound_l
        );
    }
    let order = report
        .observed_order
        .map_or_else(|| "n/a".to_string(), |q| format!("{q:.4}"));
    let _ = writeln!(summary, "converged: {}  observed_order: {order}", report.converged);
    let tails: Vec<String> = report.tail_diameters.iter().map(|d| format!("{d:.4e}")).collect();
    let _ = writeln!(
        summary,
        "compactness_diameter: {:.6e}  tail diameters: [{}]  max bound_L: {:.6e}",
        report.compactness_diameter,
        tails.join(", "),
        report.rows.iter().map(|r| r.bound_l).fold(0.0, f64::max)
    );
    Ok(AnalysisRow::from_convergence(&report))
}

/// Round-off runs of one precision; `exponent` is set when the `dt` list
/// was long enough for a halving sweep.
#[derive(Debug, Clone)]
pub struct RoundoffBatch {
    pub bits: u32,
    pub epsilon: f64,
    pub exponent: Option<f64>,
    pub swept: bool,
    pub reports: Vec<RoundoffReport>,
}

/// The runs a `roundoff` section describes, in increasing precision.
pub fn roundoff_batches(e: &ExperimentConfig, seed: u64) -> laxlab_core::Result<Vec<RoundoffBatch>> {
    let kind = scheme_of(e)?;
    let (path, dts) = sweep(e)?;
    let n0 = probe_grid(e, &path, &dts)?;
    let u = probe(e, seed).sample(n0, e.domain_length)?;
    let mut bits = e.bits.clone();
    bits.sort_unstable();
    let mut batches = Vec::new();
    for b in bits {
        let p = PrecisionSpec::new(b)?;
        let mut batch = RoundoffBatch {
            bits: b,
            epsilon: p.epsilon(),
            exponent: None,
            swept: dts.len() >= 4,
            reports: Vec::new(),
        };
        if batch.swept {
            let sweep = halving_sweep(kind, &path, &u, e.horizon, &p, &dts)?;
            batch.exponent = sweep.exponent;
            batch.reports = sweep.rows.into_iter().map(|r| r.report).collect();
        } else {
            let mut sorted = dts.clone();
            sorted.sort_by(|a, b| b.total_cmp(a));
            for dt in sorted {
                let g = path.realize(dt, e.domain_length)?;
                let s = kind.build(dt, g.dx, g.n)?;
                batch
                    .reports
                    .push(roundoff_growth_experiment(&s, &u.resample(g.n)?, e.horizon, &p)?);
            }
        }
        batches.push(batch);
    }
    Ok(batches)
}

fn roundoff(e: &ExperimentConfig, seed: u64, summary: &mut String) -> laxlab_core::Result<Vec<RoundoffReport>> {
    let mut reports = Vec::new();
    for batch in roundoff_batches(e, seed)? {
        let _ = writeln!(summary, "bits {} (eps = {:.4e})", batch.bits, batch.epsilon);
        if batch.swept {
            let s = batch.exponent.map_or_else(|| "skipped".to_string(), |s| format!("{s:.4}"));
            let _ = writeln!(summary, "  halving exponent s (gap ~ dt^-s): {s}");
        }
        for r in &batch.reports {
            let q = r.growth_exponent.map_or_else(|| "n/a".to_string(), |q| format!("{q:.4}"));
            let _ = writeln!(
                summary,
                "  dt {:.4e} steps {:>6} final gap {:.6e} ({:.3e} eps) growth q {q}{}{}",
                r.dt,
                r.n_steps,
                r.final_gap(),
                r.final_gap() / r.epsilon,
                if r.diverged { " DIVERGED" } else { "" },
                if r.unstable { " (unstable scheme)" } else { "" },
            );
        }
        reports.extend(batch.reports);
    }
    Ok(reports)
}

/// Fixed probes first, then `ubp_random_probes` seeded ones.
pub fn ubp_probe_set(e: &ExperimentConfig, seed: u64) -> laxlab_core::Result<Vec<FiniteSequence>> {
    let mut probes = e
        .ubp_probes
        .iter()
        .map(|p| FiniteSequence::from_prefix(p))
        .collect::<laxlab_core::Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..e.ubp_random_probes {
        probes.push(FiniteSequence::random(&mut rng, 10, 5));
    }
    Ok(probes)
}

fn ubp(e: &ExperimentConfig, seed: u64, summary: &mut String) -> laxlab_core::Result<Vec<laxlab_core::ubp::UbpRow>> {
    let probes = ubp_probe_set(e, seed)?;
    let (lo, hi) = e.k_range;
    let ks: Vec<usize> = (lo..=hi).collect();
    let rows = ubp_violation_demo(&ks, &probes)?;
    let _ = writeln!(
        summary,
        "k in [{lo}, {hi}]: operator norms {} ... {}",
        norm_tk(lo),
        norm_tk(hi)
    );
    for (id, x) in probes.iter().enumerate() {
        let bound = rows
            .iter()
            .find(|r| r.probe_id == Some(id))
            .and_then(|r| r.probe_bound)
            .unwrap_or(0.0);
        let _ = writeln!(summary, "  probe {id}: support bound {} pointwise bound {bound}", x.support_bound());
    }
    Ok(rows)
}

fn properly_posed(
    e: &ExperimentConfig,
    seed: u64,
    summary: &mut String,
) -> laxlab_core::Result<laxlab_core::PosednessReport> {
    let n = e
        .grid_n
        .ok_or_else(|| LabError::Domain(format!("section [{}] has no grid_n", e.name)))?;
    let sg = HeatSemigroup::new(e.horizon, n)?.with_domain_length(e.domain_length)?;
    let probes = if e.probes.is_empty() {
        vec![FunctionDescriptor::RandomUniform(seed).sample(n, e.domain_length)?]
    } else {
        e.probes
            .iter()
            .map(|p| p.resolve(seed).sample(n, e.domain_length))
            .collect::<laxlab_core::Result<Vec<_>>>()?
    };
    let report = sg.properly_posed_check(&e.ts, &probes)?;
    let _ = writeln!(
        summary,
        "max ratio {:.6e} against K = {}: {}",
        report.max_ratio,
        report.bound_k,
        if report.pass { "pass" } else { "FAIL" }
    );
    Ok(report)
}

/// Reads a config and runs it.
pub fn run_path(config: impl AsRef<Path>, options: &RunOptions) -> Result<RunSummary, RunError> {
    let config = Config::from_path(config)?;
    run(&config, options)
}
