//! Round-off propagation under emulated reduced precision.
//!
//! A low-precision trajectory rounds every grid value to a shorter significand
//! after each full time step; a reference trajectory runs the identical
//! discretization in `f64`. Their sup-norm gap isolates round-off from
//! truncation error.

use rayon::prelude::*;

use crate::analysis::stability_check;
use crate::error::{LabError, Result};
use crate::fit::power_law_fit;
use crate::grid::{GridFunction, RefinementPath};
use crate::schemes::{SchemeKind, StencilScheme, DIVERGENCE_THRESHOLD};

pub const F64_SIGNIFICAND_BITS: u32 = 52;
pub const MIN_SIGNIFICAND_BITS: u32 = 4;

/// Minimum number of positive samples for the growth-exponent fit.
const GROWTH_FIT_POINTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RoundingMode {
    #[default]
    NearestEven,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ApplyPoint {
    /// Values are rounded once after each complete time step.
    #[default]
    PerStep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionSpec {
    significand_bits: u32,
    pub rounding_mode: RoundingMode,
    pub apply_point: ApplyPoint,
}

impl PrecisionSpec {
    /// Stored fraction bits, excluding the implicit leading one.
    pub fn new(significand_bits: u32) -> Result<Self> {
        if !(MIN_SIGNIFICAND_BITS..=F64_SIGNIFICAND_BITS).contains(&significand_bits) {
            return Err(LabError::Domain(format!(
                "significand bits must be in [{MIN_SIGNIFICAND_BITS}, {F64_SIGNIFICAND_BITS}], got {significand_bits}"
            )));
        }
        Ok(Self {
            significand_bits,
            rounding_mode: RoundingMode::NearestEven,
            apply_point: ApplyPoint::PerStep,
        })
    }

    pub fn significand_bits(&self) -> u32 {
        self.significand_bits
    }

    /// Unit round-off scale `2^{-bits}`.
    pub fn epsilon(&self) -> f64 {
        2f64.powi(-(self.significand_bits as i32))
    }

    pub fn round(&self, x: f64) -> Result<f64> {
        round_to_precision(x, self)
    }
}

/// Rounds `x` to `p.significand_bits()` fraction bits, ties to even.
///
/// Operates on the IEEE-754 bit pattern, so a carry out of the fraction
/// correctly bumps the exponent.
pub fn round_to_precision(x: f64, p: &PrecisionSpec) -> Result<f64> {
    if !x.is_finite() {
        return Err(LabError::DivergedValue(format!("cannot round {x}")));
    }
    let drop = F64_SIGNIFICAND_BITS - p.significand_bits;
    if drop == 0 || x == 0.0 {
        return Ok(x);
    }
    let bits = x.to_bits();
    let mask = (1u64 << drop) - 1;
    let half = 1u64 << (drop - 1);
    let low = bits & mask;
    let mut kept = bits & !mask;
    let lsb_odd = (kept >> drop) & 1 == 1;
    if low > half || (low == half && lsb_odd) {
        kept += 1u64 << drop;
    }
    let rounded = f64::from_bits(kept);
    if !rounded.is_finite() {
        return Err(LabError::DivergedValue(format!("{x} overflows at {} bits", p.significand_bits)));
    }
    Ok(rounded)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundoffSample {
    pub n: usize,
    pub t: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundoffReport {
    pub scheme: String,
    pub dt: f64,
    pub dx: f64,
    pub significand_bits: u32,
    pub epsilon: f64,
    pub n_steps: usize,
    pub samples: Vec<RoundoffSample>,
    /// Exponent `q` of `gap(n) ≈ C·n^q·ε`, when enough positive samples exist.
    pub growth_exponent: Option<f64>,
    /// The constant `C` of the same fit.
    pub growth_constant: Option<f64>,
    pub diverged: bool,
    /// The scheme failed its stability check over the run.
    pub unstable: bool,
}

impl RoundoffReport {
    pub fn final_gap(&self) -> f64 {
        if self.diverged {
            f64::INFINITY
        } else {
            self.samples.last().map(|s| s.gap).unwrap_or(0.0)
        }
    }
}

/// Sample steps: every step up to 8, then a geometric ratio of 1.25, then the last.
fn sample_steps(n_steps: usize) -> Vec<usize> {
    let mut steps: Vec<usize> = (1..=n_steps.min(8)).collect();
    let mut next = 8.0_f64;
    loop {
        next *= 1.25;
        let n = next.round() as usize;
        if n >= n_steps {
            break;
        }
        if steps.last() != Some(&n) {
            steps.push(n);
        }
    }
    if n_steps > 8 {
        steps.push(n_steps);
    }
    steps
}

fn round_grid(v: &GridFunction, p: &PrecisionSpec) -> Result<GridFunction> {
    let values = v
        .values()
        .iter()
        .map(|&x| round_to_precision(x, p))
        .collect::<Result<Vec<_>>>()?;
    GridFunction::new(values, v.domain_length())
}

fn out_of_range(v: &GridFunction) -> bool {
    v.values().iter().any(|x| !(x.abs() <= DIVERGENCE_THRESHOLD))
}

/// Runs the rounded and the reference trajectory for `round(T/Δt)` steps and
/// records their sup-norm gap at geometrically spaced steps.
pub fn roundoff_growth_experiment(
    s: &StencilScheme,
    u: &GridFunction,
    horizon_t: f64,
    p: &PrecisionSpec,
) -> Result<RoundoffReport> {
    if !(horizon_t > 0.0 && horizon_t.is_finite()) {
        return Err(LabError::Domain(format!("final time must be positive, got {horizon_t}")));
    }
    let n_steps = ((horizon_t / s.dt()).round() as usize).max(1);
    let unstable = !stability_check(s, (n_steps as f64 * s.dt()).max(s.dt()))?.stable;
    let steps = sample_steps(n_steps);

    let mut reference = u.clone();
    let mut rounded = u.clone();
    let mut samples = Vec::with_capacity(steps.len());
    let mut diverged = false;
    let mut next = steps.iter().peekable();
    for n in 1..=n_steps {
        reference = s.apply(&reference)?;
        let stepped = s.apply(&rounded)?;
        if out_of_range(&reference) || out_of_range(&stepped) {
            diverged = true;
            break;
        }
        rounded = match round_grid(&stepped, p) {
            Ok(v) => v,
            Err(LabError::DivergedValue(_)) => {
                diverged = true;
                break;
            }
            Err(e) => return Err(e),
        };
        if next.peek() == Some(&&n) {
            next.next();
            samples.push(RoundoffSample {
                n,
                t: n as f64 * s.dt(),
                gap: rounded.distance(&reference)?,
            });
        }
    }

    let points: Vec<(f64, f64)> = samples.iter().map(|s| (s.n as f64, s.gap)).collect();
    let fit = if diverged { None } else { power_law_fit(&points, GROWTH_FIT_POINTS) };
    Ok(RoundoffReport {
        scheme: s.name().to_string(),
        dt: s.dt(),
        dx: s.dx(),
        significand_bits: p.significand_bits(),
        epsilon: p.epsilon(),
        n_steps,
        samples,
        growth_exponent: fit.map(|(q, _)| q),
        growth_constant: fit.map(|(_, c)| c / p.epsilon()),
        diverged,
        unstable,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HalvingRow {
    pub dt: f64,
    pub dx: f64,
    pub grid_n: usize,
    pub final_gap: f64,
    pub report: RoundoffReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HalvingSweep {
    /// Sorted by decreasing `Δt`.
    pub rows: Vec<HalvingRow>,
    /// `s` in `gap ∝ Δt^{−s}`; `None` when the gaps are all zero or too few.
    pub exponent: Option<f64>,
}

/// Final round-off gap as a function of `Δt` along a refinement path.
pub fn halving_sweep(
    kind: SchemeKind,
    path: &RefinementPath,
    u: &GridFunction,
    horizon_t: f64,
    p: &PrecisionSpec,
    dts: &[f64],
) -> Result<HalvingSweep> {
    if dts.len() < 4 {
        return Err(LabError::Domain(format!(
            "halving sweep needs at least 4 Δt values, got {}",
            dts.len()
        )));
    }
    let mut rows = dts
        .par_iter()
        .map(|&dt| {
            let grid = path.realize(dt, u.domain_length())?;
            let scheme = kind.build(dt, grid.dx, grid.n)?;
            let start = u.resample(grid.n)?;
            let report = roundoff_growth_experiment(&scheme, &start, horizon_t, p)?;
            Ok(HalvingRow {
                dt,
                dx: grid.dx,
                grid_n: grid.n,
                final_gap: report.final_gap(),
                report,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| b.dt.total_cmp(&a.dt));
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.dt, r.final_gap)).collect();
    let exponent = if rows.iter().all(|r| r.final_gap == 0.0) {
        None
    } else {
        power_law_fit(&points, 2).map(|(slope, _)| -slope)
    };
    Ok(HalvingSweep { rows, exponent })
}
