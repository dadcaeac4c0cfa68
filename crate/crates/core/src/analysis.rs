//! Executable convergence, consistency and stability checks.
//!
//! Stability is the intrinsic property `‖C^n‖ ≤ L` over `nΔt ≤ T`, measured
//! with exact sup-operator norms of stencils. Consistency and convergence are
//! relational: both compare a scheme against the exact heat semigroup.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::fit::power_law_fit;
use crate::grid::{mode_range, wrap_index, GridFunction, RefinementPath};
use crate::schemes::{SchemeKind, StencilScheme, DIVERGENCE_THRESHOLD};
use crate::semigroup::HeatSemigroup;

pub const DEFAULT_STABILITY_THRESHOLD: f64 = 10.0;

/// All powers up to this are sampled; beyond it only powers of two and the endpoint.
const DENSE_POWER_SAMPLES: usize = 64;

/// Slack on `|g| ≤ 1 + c·Δt` for rounding in the symbol sum.
const VON_NEUMANN_ROUNDOFF: f64 = 1e-12;

/// Sup-norm operator norm of a stencil, `Σ_m |c_m|`.
pub fn operator_norm(s: &StencilScheme) -> f64 {
    s.coefficients().iter().map(|c| c.abs()).sum()
}

/// `‖Cw‖/‖w‖` for the sign witness `w_{o_m} = sign(c_m)` on an `n`-point grid.
///
/// For `n` at least the stencil width the witness attains [`operator_norm`]
/// at grid point 0.
pub fn operator_norm_witness(s: &StencilScheme, n: usize) -> Result<f64> {
    let n = s.period().unwrap_or(n);
    let mut witness = vec![1.0; n];
    for (o, c) in s.taps() {
        witness[wrap_index(o, n)] = if c < 0.0 { -1.0 } else { 1.0 };
    }
    let u = GridFunction::new(witness, crate::grid::DEFAULT_DOMAIN_LENGTH)?;
    s.apply(&u)?.sup_norm()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub horizon_t: f64,
    pub dt: f64,
    /// `(n, ‖C^n‖)` for the sampled powers, ascending in `n`.
    pub norms: Vec<(usize, f64)>,
    /// `⌊T/Δt⌋`.
    pub max_steps: usize,
    /// Powers above 64 are sampled geometrically.
    pub subsampled: bool,
    /// `max ‖C^n‖`, or `+∞` once the iterates diverged.
    pub bound_l: f64,
    pub threshold: f64,
    pub stable: bool,
    pub diverged_at: Option<usize>,
}

impl StabilityReport {
    /// Smallest sampled `n` with `‖C^n‖ > threshold`.
    pub fn first_exceedance(&self) -> Option<usize> {
        self.norms
            .iter()
            .find(|(_, norm)| *norm > self.threshold)
            .map(|(n, _)| *n)
            .or(self.diverged_at)
    }
}

fn sampled_powers(max_steps: usize) -> Vec<usize> {
    let mut ns: Vec<usize> = (1..=max_steps.min(DENSE_POWER_SAMPLES)).collect();
    let mut p = DENSE_POWER_SAMPLES * 2;
    while p < max_steps {
        ns.push(p);
        p *= 2;
    }
    if max_steps > DENSE_POWER_SAMPLES {
        ns.push(max_steps);
    }
    ns
}

/// `‖C^n‖` over `1 ≤ n ≤ ⌊T/Δt⌋` with the default threshold `L ≤ 10`.
pub fn stability_check(s: &StencilScheme, horizon_t: f64) -> Result<StabilityReport> {
    stability_check_with(s, horizon_t, DEFAULT_STABILITY_THRESHOLD)
}

pub fn stability_check_with(s: &StencilScheme, horizon_t: f64, threshold: f64) -> Result<StabilityReport> {
    if !(horizon_t.is_finite() && s.dt() <= horizon_t * (1.0 + 1e-12)) {
        return Err(LabError::Domain(format!(
            "stability horizon T={horizon_t} must be at least dt={}",
            s.dt()
        )));
    }
    let max_steps = ((horizon_t / s.dt()) * (1.0 + 1e-12)).floor().max(1.0) as usize;
    let samples = sampled_powers(max_steps);
    let mut norms = Vec::with_capacity(samples.len());
    let mut diverged_at = None;

    if s.period().is_some() {
        for &n in &samples {
            match s.power(n) {
                Ok(p) => norms.push((n, operator_norm(&p))),
                Err(LabError::DivergedOperator { power, .. }) => {
                    diverged_at = Some(power);
                    break;
                }
                Err(e) => return Err(e),
            }
        }
    } else {
        let mut current = s.clone();
        let mut next_sample = samples.iter().peekable();
        for n in 1..=max_steps {
            if next_sample.peek() == Some(&&n) {
                norms.push((n, operator_norm(&current)));
                next_sample.next();
            }
            if n == max_steps {
                break;
            }
            current = current.compose(s)?;
            if current.max_abs_coefficient() > DIVERGENCE_THRESHOLD {
                diverged_at = Some(n + 1);
                break;
            }
        }
    }

    let bound_l = if diverged_at.is_some() {
        f64::INFINITY
    } else {
        norms.iter().map(|(_, v)| *v).fold(0.0, f64::max)
    };
    Ok(StabilityReport {
        horizon_t,
        dt: s.dt(),
        norms,
        max_steps,
        subsampled: max_steps > DENSE_POWER_SAMPLES,
        bound_l,
        threshold,
        stable: bound_l <= threshold,
        diverged_at,
    })
}

/// Amplification factor of the scheme on mode `k` of an `n`-point grid,
/// phase `θ = 2πk/n` (that is `k·Δx` on the default `2π` domain).
pub fn von_neumann_symbol(s: &StencilScheme, k: i64, grid_n: usize) -> Result<Complex64> {
    if grid_n < 2 || 2 * k.unsigned_abs() as usize > grid_n {
        return Err(LabError::Domain(format!(
            "wavenumber {k} not representable on {grid_n} points"
        )));
    }
    Ok(s.symbol(2.0 * std::f64::consts::PI * k as f64 / grid_n as f64))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VonNeumannReport {
    pub max_abs_g: f64,
    pub argmax_k: i64,
    pub pass: bool,
}

/// Scans every representable mode for `max_k |g(k)| ≤ 1`.
pub fn von_neumann_check(s: &StencilScheme, grid_n: usize) -> Result<VonNeumannReport> {
    von_neumann_check_with(s, grid_n, 0.0)
}

/// As [`von_neumann_check`] with the relaxed bound `|g| ≤ 1 + c·Δt`.
pub fn von_neumann_check_with(s: &StencilScheme, grid_n: usize, growth_c: f64) -> Result<VonNeumannReport> {
    let mut best: (f64, i64) = (f64::NEG_INFINITY, 0);
    let upper = grid_n as i64 / 2;
    for k in mode_range(grid_n).chain(std::iter::once(upper)) {
        let g = von_neumann_symbol(s, k, grid_n)?.norm();
        if g > best.0 || (g == best.0 && k.abs() < best.1.abs()) {
            best = (g, k);
        }
    }
    let (max_abs_g, argmax_k) = best;
    Ok(VonNeumannReport {
        max_abs_g,
        argmax_k,
        pass: max_abs_g <= 1.0 + growth_c * s.dt() + VON_NEUMANN_ROUNDOFF,
    })
}

/// `(t, ‖C E(t)u − E(t+Δt)u‖)` for each `t`.
pub fn consistency_check(
    s: &StencilScheme,
    sg: &HeatSemigroup,
    u: &GridFunction,
    ts: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if ((s.dx() - u.dx()) / u.dx()).abs() > 1e-9 {
        return Err(LabError::InvalidGrid(format!(
            "scheme dx={} does not match grid dx={}",
            s.dx(),
            u.dx()
        )));
    }
    ts.iter()
        .map(|&t| {
            let exact_t = sg.evolve(u, t)?;
            let stepped = s.apply(&exact_t)?;
            let exact_next = sg.evolve(u, t + s.dt())?;
            Ok((t, stepped.distance(&exact_next)?))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceOptions {
    /// Final error must be below `tolerance · ‖u‖` at the finest `Δt`.
    pub tolerance: f64,
    /// Allowed relative increase between successive refinements.
    pub jitter: f64,
    pub stability_threshold: f64,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-3,
            jitter: 0.1,
            stability_threshold: DEFAULT_STABILITY_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub dt: f64,
    pub dx: f64,
    pub r: f64,
    pub grid_n: usize,
    pub n_steps: usize,
    /// `n·Δt`, where the exact solution is evaluated.
    pub t_final: f64,
    /// Sup-norm error at `t_final`; `+∞` when the trajectory diverged.
    pub error: f64,
    pub diverged: bool,
    /// `max ‖C^n‖` of the operator iterated on this grid.
    pub bound_l: f64,
    pub max_abs_g: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub path: RefinementPath,
    pub scheme: SchemeKind,
    /// Sorted by decreasing `Δt` (coarse to fine).
    pub rows: Vec<ConvergenceRow>,
    /// Slope of `log error` against `log Δx`, when three finite errors exist.
    pub observed_order: Option<f64>,
    pub converged: bool,
    /// Diameter of the computed endpoints together with the exact `U(T)`.
    pub compactness_diameter: f64,
    /// `tail_diameters[i]`: the same diameter over rows `i..` only.
    pub tail_diameters: Vec<f64>,
}

impl ConvergenceReport {
    /// `(Δt, error)` pairs in row order.
    pub fn errors(&self) -> Vec<(f64, f64)> {
        self.rows.iter().map(|r| (r.dt, r.error)).collect()
    }
}

struct Cell {
    row: ConvergenceRow,
    endpoint: Option<GridFunction>,
}

fn run_cell(
    kind: SchemeKind,
    path: &RefinementPath,
    sg: &HeatSemigroup,
    u: &GridFunction,
    horizon_t: f64,
    dt: f64,
    options: &ConvergenceOptions,
) -> Result<Cell> {
    let grid = path.realize(dt, u.domain_length())?;
    if grid.n < u.len() {
        return Err(LabError::InvalidGrid(format!(
            "probe has {} points but Δt={dt} gives only N={}",
            u.len(),
            grid.n
        )));
    }
    let scheme = kind.build(dt, grid.dx, grid.n)?.on_grid(grid.n)?;
    let sg = sg.on_grid(grid.n)?;
    let start = u.resample(grid.n)?;
    let n_steps = ((horizon_t / dt).round() as usize).max(1);
    let t_final = n_steps as f64 * dt;

    let mut v = start.clone();
    let mut diverged = false;
    for _ in 0..n_steps {
        v = scheme.apply(&v)?;
        if v.values().iter().any(|x| !(x.abs() <= DIVERGENCE_THRESHOLD)) {
            diverged = true;
            break;
        }
    }
    let exact = sg.evolve(&start, t_final)?;
    let error = if diverged { f64::INFINITY } else { v.distance(&exact)? };
    let stability = stability_check_with(&scheme, t_final, options.stability_threshold)?;
    let vn = von_neumann_check(&scheme, grid.n)?;
    Ok(Cell {
        row: ConvergenceRow {
            dt,
            dx: grid.dx,
            r: scheme.ratio(),
            grid_n: grid.n,
            n_steps,
            t_final,
            error,
            diverged,
            bound_l: stability.bound_l,
            max_abs_g: vn.max_abs_g,
        },
        endpoint: (!diverged).then_some(v),
    })
}

/// Runs the scheme family along `path` for every `Δt` and measures the
/// sup-norm error against the exact semigroup.
///
/// Each cell realizes its grid from the path, resamples `u` onto it
/// spectrally, takes `n = round(T/Δt)` steps and compares with `E(nΔt)u`.
/// Cells are independent and run on the current rayon pool.
pub fn convergence_experiment(
    kind: SchemeKind,
    path: &RefinementPath,
    sg: &HeatSemigroup,
    u: &GridFunction,
    horizon_t: f64,
    dts: &[f64],
    options: &ConvergenceOptions,
) -> Result<ConvergenceReport> {
    if dts.is_empty() {
        return Err(LabError::Domain("convergence experiment needs at least one Δt".into()));
    }
    if !(horizon_t > 0.0 && horizon_t.is_finite()) {
        return Err(LabError::Domain(format!("final time must be positive, got {horizon_t}")));
    }
    let norm_u = u.sup_norm()?;
    let mut cells = dts
        .par_iter()
        .map(|&dt| run_cell(kind, path, sg, u, horizon_t, dt, options))
        .collect::<Result<Vec<_>>>()?;
    cells.sort_by(|a, b| b.row.dt.total_cmp(&a.row.dt));

    let rows: Vec<ConvergenceRow> = cells.iter().map(|c| c.row.clone()).collect();
    let any_diverged = rows.iter().any(|r| r.diverged);
    let monotone = rows
        .windows(2)
        .all(|w| w[1].error <= w[0].error * (1.0 + options.jitter));
    let final_error = rows.last().map(|r| r.error).unwrap_or(f64::INFINITY);
    let converged = !any_diverged && monotone && final_error < options.tolerance * norm_u;

    let order_points: Vec<(f64, f64)> = rows.iter().map(|r| (r.dx, r.error)).collect();
    let observed_order = power_law_fit(&order_points, 3).map(|(q, _)| q);

    let tail_diameters = tail_diameters(&cells, sg, u, horizon_t)?;
    Ok(ConvergenceReport {
        path: path.clone(),
        scheme: kind,
        rows,
        observed_order,
        converged,
        compactness_diameter: tail_diameters.first().copied().unwrap_or(0.0),
        tail_diameters,
    })
}

/// Endpoints are interpolated onto the finest grid and compared with `E(T)u` there.
fn tail_diameters(cells: &[Cell], sg: &HeatSemigroup, u: &GridFunction, horizon_t: f64) -> Result<Vec<f64>> {
    let finest = cells.iter().map(|c| c.row.grid_n).max().unwrap_or(u.len()).max(u.len());
    let exact = sg.on_grid(finest)?.evolve(&u.resample(finest)?, horizon_t)?;
    let mut points: Vec<Option<GridFunction>> = cells
        .iter()
        .map(|c| c.endpoint.as_ref().map(|e| e.resample(finest)).transpose())
        .collect::<Result<_>>()?;
    points.push(Some(exact));

    let count = points.len();
    let mut pairwise = vec![vec![0.0; count]; count];
    for i in 0..count {
        for j in (i + 1)..count {
            let d = match (&points[i], &points[j]) {
                (Some(a), Some(b)) => a.distance(b)?,
                _ => f64::INFINITY,
            };
            pairwise[i][j] = d;
            pairwise[j][i] = d;
        }
    }
    Ok((0..cells.len())
        .map(|start| {
            let members: Vec<usize> = (start..count).collect();
            members
                .iter()
                .flat_map(|&i| members.iter().map(move |&j| (i, j)))
                .map(|(i, j)| pairwise[i][j])
                .fold(0.0, f64::max)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{FunctionDescriptor, DEFAULT_DOMAIN_LENGTH};
    use crate::schemes::{backward_euler_heat, ftcs_heat};

    fn grid_dx(n: usize) -> f64 {
        DEFAULT_DOMAIN_LENGTH / n as f64
    }

    #[test]
    fn operator_norms_and_witness() {
        let s = ftcs_heat(0.25, 1.0).unwrap();
        assert_eq!(operator_norm(&s), 1.0);
        assert_eq!(operator_norm_witness(&s, 8).unwrap(), 1.0);
        let s = ftcs_heat(0.75, 1.0).unwrap();
        assert_eq!(operator_norm(&s), 2.0);
        assert_eq!(operator_norm_witness(&s, 8).unwrap(), 2.0);
        let id = StencilScheme::identity(0.1, 0.1).unwrap();
        assert_eq!(operator_norm(&id), 1.0);
    }

    #[test]
    fn powers_are_sampled_geometrically() {
        assert_eq!(sampled_powers(3), vec![1, 2, 3]);
        let s = sampled_powers(300);
        assert_eq!(&s[62..], &[63, 64, 128, 256, 300]);
        assert_eq!(sampled_powers(64).len(), 64);
    }

    #[test]
    fn ftcs_at_half_is_stable_with_unit_norms() {
        let dt = 1.0 / 128.0;
        let s = ftcs_heat(dt, (dt / 0.5).sqrt()).unwrap();
        let report = stability_check(&s, 1.0).unwrap();
        assert_eq!(report.max_steps, 128);
        assert!(report.norms.iter().all(|(_, v)| (v - 1.0).abs() <= 1e-12));
        assert!(report.stable);
    }

    #[test]
    fn ftcs_above_half_is_unstable() {
        let dt = 1.0 / 128.0;
        let s = ftcs_heat(dt, (dt / 0.55).sqrt()).unwrap();
        let report = stability_check(&s, 1.0).unwrap();
        assert!(report.bound_l > report.threshold);
        assert!(!report.stable);
        assert!(report.first_exceedance().unwrap() <= 64);
    }

    #[test]
    fn divergence_becomes_infinite_bound() {
        let s = ftcs_heat(1.0, 0.1).unwrap(); // r = 100
        let report = stability_check(&s, 1000.0).unwrap();
        assert!(report.diverged_at.is_some());
        assert_eq!(report.bound_l, f64::INFINITY);
        assert!(!report.stable);
    }

    #[test]
    fn stability_horizon_must_cover_a_step() {
        let s = ftcs_heat(0.5, 1.0).unwrap();
        assert!(matches!(stability_check(&s, 0.1), Err(LabError::Domain(_))));
    }

    #[test]
    fn backward_euler_is_stable_for_any_ratio() {
        let n = 64;
        let dx = grid_dx(n);
        for r in [0.1, 1.0, 10.0] {
            let s = backward_euler_heat(r * dx * dx, dx, n).unwrap();
            let report = stability_check(&s, 1.0).unwrap();
            assert!(report.bound_l <= 1.0 + 1e-10, "r={r} L={}", report.bound_l);
            assert!(report.stable);
        }
    }

    #[test]
    fn von_neumann_symbols() {
        let n = 16;
        let dx = grid_dx(n);
        let s = ftcs_heat(0.5 * dx * dx, dx).unwrap();
        let g = von_neumann_symbol(&s, 8, n).unwrap();
        assert!((g - Complex64::new(-1.0, 0.0)).norm() < 1e-14);
        let s = ftcs_heat(0.75 * dx * dx, dx).unwrap();
        let g = von_neumann_symbol(&s, 8, n).unwrap();
        assert!((g - Complex64::new(-2.0, 0.0)).norm() < 1e-14);
        let g0 = von_neumann_symbol(&s, 0, n).unwrap();
        assert!((g0.re - s.coefficients().iter().sum::<f64>()).abs() < 1e-15);
        for k in -8..=8 {
            let half = (std::f64::consts::PI * k as f64 / n as f64).sin();
            let closed = 1.0 - 4.0 * 0.75 * half * half;
            assert!((von_neumann_symbol(&s, k, n).unwrap().re - closed).abs() < 1e-14);
        }
        assert!(von_neumann_symbol(&s, 9, n).is_err());
    }

    #[test]
    fn von_neumann_check_threshold() {
        let n = 32;
        let dx = grid_dx(n);
        for r in [0.1, 0.3, 0.5] {
            let report = von_neumann_check(&ftcs_heat(r * dx * dx, dx).unwrap(), n).unwrap();
            assert!((report.max_abs_g - 1.0).abs() < 1e-12);
            assert!(report.pass);
        }
        let report = von_neumann_check(&ftcs_heat(0.75 * dx * dx, dx).unwrap(), n).unwrap();
        assert!((report.max_abs_g - 2.0).abs() < 1e-12);
        assert_eq!(report.argmax_k.abs(), 16);
        assert!(!report.pass);
        let report = von_neumann_check(&StencilScheme::identity(0.1, dx).unwrap(), n).unwrap();
        assert_eq!(report.max_abs_g, 1.0);
        assert!(report.pass);
    }

    #[test]
    fn consistency_examples() {
        let n = 444;
        let dx = grid_dx(n);
        let dt = 1e-4;
        let sg = HeatSemigroup::new(1.0, n).unwrap();
        let s = ftcs_heat(dt, dx).unwrap();
        let u = FunctionDescriptor::Sine(1).sample(n, DEFAULT_DOMAIN_LENGTH).unwrap();
        let res = consistency_check(&s, &sg, &u, &[0.0]).unwrap();
        let half = (dx / 2.0).sin();
        let closed = (1.0 - 4.0 * s.ratio() * half * half - (-dt).exp()).abs();
        assert!(res[0].1 <= 1e-7);
        assert!((res[0].1 - closed * u.sup_norm().unwrap()).abs() < 1e-12);

        let constant = GridFunction::from_values(vec![1.0; n]).unwrap();
        let res = consistency_check(&s, &sg, &constant, &[0.0, 0.5, 1.0]).unwrap();
        assert!(res.iter().all(|(_, r)| *r < 1e-13));

        let wrong = FunctionDescriptor::Sine(1).sample(100, DEFAULT_DOMAIN_LENGTH).unwrap();
        assert!(matches!(consistency_check(&s, &sg, &wrong, &[0.0]), Err(LabError::InvalidGrid(_))));
    }

    #[test]
    fn consistency_residual_is_second_order_in_dt() {
        let residual = |n: usize| {
            let dx = grid_dx(n);
            let s = ftcs_heat(0.5 * dx * dx, dx).unwrap();
            let sg = HeatSemigroup::new(1.0, n).unwrap();
            let u = FunctionDescriptor::Sine(1).sample(n, DEFAULT_DOMAIN_LENGTH).unwrap();
            (s.dt(), consistency_check(&s, &sg, &u, &[0.0]).unwrap()[0].1)
        };
        let (dt0, r0) = residual(64);
        let (dt1, r1) = residual(128);
        let per_halving = (r0 / r1).powf(2f64.ln() / (dt0 / dt1).ln());
        assert!((3.5..=4.5).contains(&per_halving), "{per_halving}");
    }

    #[test]
    fn convergence_along_critical_path() {
        let sg = HeatSemigroup::new(1.0, 32).unwrap();
        let u = FunctionDescriptor::Sine(1).sample(32, DEFAULT_DOMAIN_LENGTH).unwrap();
        let report = convergence_experiment(
            SchemeKind::Ftcs,
            &RefinementPath::sqrt_two_dt(),
            &sg,
            &u,
            1.0,
            &[2e-3, 1e-3, 5e-4],
            &ConvergenceOptions::default(),
        )
        .unwrap();
        assert!(report.converged, "{report:?}");
        assert!(report.rows.windows(2).all(|w| w[1].error < w[0].error));
        assert!(report.rows.iter().all(|r| r.r <= 0.5 && (r.bound_l - 1.0).abs() < 1e-12));
        assert!(report.tail_diameters.windows(2).all(|w| w[1] <= w[0]));
        assert!(report.compactness_diameter.is_finite());
    }

    #[test]
    fn convergence_fails_above_threshold() {
        let sg = HeatSemigroup::new(1.0, 16).unwrap();
        let u = FunctionDescriptor::RandomUniform(3).sample(16, DEFAULT_DOMAIN_LENGTH).unwrap();
        let report = convergence_experiment(
            SchemeKind::Ftcs,
            &RefinementPath::fixed_ratio(0.55).unwrap(),
            &sg,
            &u,
            1.0,
            &[4e-3, 2e-3, 1e-3],
            &ConvergenceOptions::default(),
        )
        .unwrap();
        assert!(!report.converged);
        assert!(report.rows.iter().any(|r| r.diverged || r.error > 1.0));
    }

    #[test]
    fn backward_euler_converges_under_simultaneous_refinement() {
        let sg = HeatSemigroup::new(1.0, 64).unwrap();
        let u = FunctionDescriptor::Sine(1).sample(64, DEFAULT_DOMAIN_LENGTH).unwrap();
        let dts: Vec<f64> = [256usize, 512, 1024, 2048].iter().map(|&n| grid_dx(n)).collect();
        let report = convergence_experiment(
            SchemeKind::BackwardEuler,
            &RefinementPath::power(1.0, 1.0).unwrap(),
            &sg,
            &u,
            1.0,
            &dts,
            &ConvergenceOptions::default(),
        )
        .unwrap();
        assert!(report.converged, "{:?}", report.errors());
        assert!(report.rows.iter().all(|r| r.bound_l <= 1.0 + 1e-10));
        let order = report.observed_order.unwrap();
        assert!((order - 1.0).abs() < 0.2, "order {order}");
    }
}
