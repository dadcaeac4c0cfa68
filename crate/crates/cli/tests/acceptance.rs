//! Acceptance suite: one PASS/FAIL line per criterion, driven by
//! `configs/acceptance.toml`. Exits nonzero if any criterion fails.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use laxlab_cli::run::{convergence_report, probe, roundoff_batches, ubp_probe_set};
use laxlab_cli::{run, Config, ExperimentConfig, RunOptions};
use laxlab_core::ubp::{apply_tk, harmonic_truncation, norm_tk, pointwise_bound, seq_norm};
use laxlab_core::{
    consistency_check, ftcs_heat, operator_norm, operator_norm_witness, stability_check_with,
    von_neumann_check, FunctionDescriptor, HeatSemigroup, SchemeKind,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 7;

type Outcome = Result<String, String>;

fn config() -> Config {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/acceptance.toml");
    Config::from_path(&path).expect("acceptance config parses")
}

fn section<'a>(c: &'a Config, name: &str) -> &'a ExperimentConfig {
    c.experiments
        .iter()
        .find(|e| e.name == name)
        .unwrap_or_else(|| panic!("acceptance config lacks [{name}]"))
}

fn ensure(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:.2?}, limit {limit:?}"))?;
    Ok(took)
}

fn grid_dx(e: &ExperimentConfig, n: usize) -> f64 {
    e.domain_length / n as f64
}

fn cfl_threshold(c: &Config) -> Outcome {
    let start = Instant::now();
    let e = section(c, "c1_cfl_stability");
    let n = e.grid_n.unwrap();
    let dx = grid_dx(e, n);
    for &r in &e.ratios {
        let s = ftcs_heat(r * dx * dx, dx).map_err(|err| err.to_string())?;
        let report = stability_check_with(&s, e.horizon, e.threshold).map_err(|err| err.to_string())?;
        if r <= 0.5 {
            ensure(report.bound_l <= 1.0 + 1e-12, || format!("r={r}: bound_L {}", report.bound_l))?;
        } else {
            let first = report.first_exceedance();
            ensure(report.bound_l > 10.0 && first.is_some_and(|k| k <= 200), || {
                format!("r={r}: bound_L {} first exceedance {first:?}", report.bound_l)
            })?;
        }
    }
    let mut notes = Vec::new();
    for name in ["c1_cfl_trajectory_r030", "c1_cfl_trajectory_r050"] {
        let report = convergence_report(section(c, name), SEED).map_err(|err| err.to_string())?;
        ensure(report.converged, || format!("{name}: errors {:?} did not converge", report.errors()))?;
        notes.push(format!("{name} final error {:.2e}", report.rows.last().unwrap().error));
    }
    for name in ["c1_cfl_trajectory_r055", "c1_cfl_trajectory_r075"] {
        let report = convergence_report(section(c, name), SEED).map_err(|err| err.to_string())?;
        let coarse = &report.rows[0];
        ensure(coarse.grid_n == n && coarse.error > 1e3 && !report.converged, || {
            format!("{name}: N={} error {}", coarse.grid_n, coarse.error)
        })?;
        notes.push(format!("{name} error {:.2e}", coarse.error));
    }
    let took = within(start, Duration::from_secs(10))?;
    Ok(format!("{} ({took:.2?})", notes.join(", ")))
}

fn refinement_path(c: &Config) -> Outcome {
    let start = Instant::now();
    let report = convergence_report(section(c, "c2_refinement_path"), SEED).map_err(|e| e.to_string())?;
    let errors: Vec<f64> = report.rows.iter().map(|r| r.error).collect();
    ensure(errors.windows(2).all(|w| w[1] < w[0]), || format!("errors not decreasing: {errors:?}"))?;
    let q = report.observed_order.ok_or("no observed order")?;
    ensure((1.8..=2.2).contains(&q), || format!("observed order {q}"))?;
    let took = within(start, Duration::from_secs(30))?;
    let shown: Vec<String> = errors.iter().map(|x| format!("{x:.3e}")).collect();
    Ok(format!("errors [{}], order {q:.4} ({took:.2?})", shown.join(", ")))
}

fn ftcs_cells(e: &ExperimentConfig) -> Vec<(f64, laxlab_core::StencilScheme)> {
    let dx = grid_dx(e, e.grid_n.unwrap());
    e.ratios
        .iter()
        .map(|&r| (r, ftcs_heat(r * dx * dx, dx).unwrap()))
        .collect()
}

fn operator_norms(c: &Config) -> Outcome {
    let e = section(c, "c3_operator_norms_ftcs");
    let n = e.grid_n.unwrap();
    let mut worst: f64 = 0.0;
    for (r, s) in ftcs_cells(e) {
        let expected = if r <= 0.5 { 1.0 } else { 4.0 * r - 1.0 };
        let norm = operator_norm(&s);
        let witness = operator_norm_witness(&s, n).map_err(|err| err.to_string())?;
        let dev = (norm - expected).abs().max((witness - expected).abs());
        worst = worst.max(dev);
        ensure(dev <= 1e-12, || format!("r={r}: norm {norm} witness {witness} expected {expected}"))?;
    }
    let checked = [0.55, 0.75, 1.0].iter().all(|r| e.ratios.contains(r));
    ensure(checked, || "config misses one of r = 0.55, 0.75, 1.0".into())?;
    Ok(format!("{} ratios, max deviation {worst:.1e}", e.ratios.len()))
}

fn von_neumann(c: &Config) -> Outcome {
    let mut count = 0;
    let ftcs = section(c, "c3_operator_norms_ftcs");
    let n = ftcs.grid_n.unwrap();
    for (r, s) in ftcs_cells(ftcs) {
        let g = von_neumann_check(&s, n).map_err(|err| err.to_string())?.max_abs_g;
        let norm = operator_norm(&s);
        let expected = f64::max(1.0, 4.0 * r - 1.0);
        ensure((g - expected).abs() <= 1e-12 && (norm - expected).abs() <= 1e-12, || {
            format!("ftcs r={r}: max|g| {g} norm {norm} expected {expected}")
        })?;
        count += 1;
    }
    let be = section(c, "c4_von_neumann_backward_euler");
    let n = be.grid_n.unwrap();
    let dx = grid_dx(be, n);
    for &r in &be.ratios {
        let s = SchemeKind::BackwardEuler.build(r * dx * dx, dx, n).map_err(|err| err.to_string())?;
        let g = von_neumann_check(&s, n).map_err(|err| err.to_string())?.max_abs_g;
        let norm = operator_norm(&s);
        ensure(g <= norm + 1e-12, || format!("backward_euler r={r}: max|g| {g} > norm {norm}"))?;
        count += 1;
    }
    Ok(format!("{count} schemes, ftcs max|g| = norm = max(1, 4r-1)"))
}

fn semigroup_laws(c: &Config) -> Outcome {
    let e = section(c, "c5_semigroup");
    let n = e.grid_n.unwrap();
    let big_t = e.horizon;
    let sg = HeatSemigroup::new(big_t, n)
        .and_then(|s| s.with_domain_length(e.domain_length))
        .map_err(|err| err.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let t = rng.gen_range(0.0..big_t);
        let s = rng.gen_range(0.0..big_t);
        let u = FunctionDescriptor::RandomUniform(rng.gen())
            .sample(n, e.domain_length)
            .map_err(|err| err.to_string())?;
        let lhs = sg.evolve(&u, t + s).map_err(|err| err.to_string())?;
        let rhs = sg
            .evolve(&sg.evolve(&u, s).map_err(|err| err.to_string())?, t)
            .map_err(|err| err.to_string())?;
        worst = worst.max(lhs.distance(&rhs).map_err(|err| err.to_string())?);
    }
    ensure(worst <= 1e-10, || format!("composition defect {worst:e}"))?;
    let mut extend_worst: f64 = 0.0;
    for _ in 0..100 {
        let t = big_t + rng.gen_range(0.0..2.0 * big_t).max(1e-9);
        let u = FunctionDescriptor::RandomUniform(rng.gen())
            .sample(n, e.domain_length)
            .map_err(|err| err.to_string())?;
        let a = sg.extend_evolve(&u, t).map_err(|err| err.to_string())?;
        let b = sg.evolve(&u, t).map_err(|err| err.to_string())?;
        extend_worst = extend_worst.max(a.distance(&b).map_err(|err| err.to_string())?);
    }
    ensure(extend_worst <= 1e-10, || format!("extend_evolve defect {extend_worst:e}"))?;
    let probes = e
        .probes
        .iter()
        .map(|p| p.resolve(SEED).sample(n, e.domain_length))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|err| err.to_string())?;
    let posed = sg.properly_posed_check(&e.ts, &probes).map_err(|err| err.to_string())?;
    ensure(posed.pass, || format!("bound check failed, max ratio {}", posed.max_ratio))?;
    Ok(format!(
        "composition {worst:.1e}, extension {extend_worst:.1e}, max ratio {:.6}",
        posed.max_ratio
    ))
}

fn consistency_decay(c: &Config) -> Outcome {
    let e = section(c, "c6_consistency");
    let r = e.ratios[0];
    ensure(r == 0.5, || format!("section uses r = {r}"))?;
    let descriptor = probe(e, SEED);
    let mut per_grid = Vec::new();
    for &n in &e.grids {
        let dx = grid_dx(e, n);
        let dt = r * dx * dx;
        let s = ftcs_heat(dt, dx).map_err(|err| err.to_string())?;
        let sg = HeatSemigroup::new(e.horizon, n)
            .and_then(|s| s.with_domain_length(e.domain_length))
            .map_err(|err| err.to_string())?;
        let u = descriptor.sample(n, e.domain_length).map_err(|err| err.to_string())?;
        per_grid.push((dt, consistency_check(&s, &sg, &u, &e.ts).map_err(|err| err.to_string())?));
    }
    let mut factors = Vec::new();
    for pair in per_grid.windows(2) {
        let (dt0, rows0) = &pair[0];
        let (dt1, rows1) = &pair[1];
        let halvings = (dt0 / dt1).log2();
        for ((t, r0), (_, r1)) in rows0.iter().zip(rows1) {
            let factor = (r0 / r1).powf(1.0 / halvings);
            ensure((factor - 4.0).abs() <= 0.5, || format!("t={t}: factor {factor} per halving"))?;
            factors.push(factor);
        }
    }
    let lo = factors.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = factors.iter().copied().fold(0.0, f64::max);
    Ok(format!("factor per dt-halving in [{lo:.4}, {hi:.4}]"))
}

fn ubp_counterexample(c: &Config) -> Outcome {
    let e = section(c, "c7_ubp");
    for k in 0..=200 {
        ensure(norm_tk(k) == k as f64, || format!("norm_Tk({k}) = {}", norm_tk(k)))?;
        let witness = seq_norm(&apply_tk(k, &laxlab_core::FiniteSequence::unit(k)));
        ensure(witness == k as f64, || format!("unit witness at k={k} gives {witness}"))?;
    }
    let probes = ubp_probe_set(e, SEED).map_err(|err| err.to_string())?;
    let random = &probes[e.ubp_probes.len()..];
    ensure(random.len() == 50, || format!("{} random probes", random.len()))?;
    for (id, x) in random.iter().enumerate() {
        let b = pointwise_bound(x, 1000).map_err(|err| err.to_string())?;
        let brute = (0..=1000).map(|k| seq_norm(&apply_tk(k, x))).fold(0.0, f64::max);
        ensure(b.bound.is_finite() && b.bound == brute && b.saturated, || {
            format!("probe {id}: bound {} brute force {brute}", b.bound)
        })?;
        let tail_zero = (x.support_bound()..=1000).all(|k| apply_tk(k, x).nonzero_count() == 0);
        ensure(tail_zero, || format!("probe {id}: T_k x nonzero past the support"))?;
    }
    for m in 0..=100 {
        for m2 in 0..=100 {
            if m == m2 {
                continue;
            }
            let d = seq_norm(&harmonic_truncation(m).linear_combination(1.0, &harmonic_truncation(m2), -1.0));
            let expected = 1.0 / (m.min(m2) + 1) as f64;
            ensure(d == expected, || format!("distance({m}, {m2}) = {d}, expected {expected}"))?;
        }
    }
    Ok("norms k <= 200, 50 probes to k = 1000, harmonic pairs <= 100".into())
}

fn roundoff_direction(c: &Config) -> Outcome {
    let start = Instant::now();
    let e = section(c, "c8_roundoff");
    let batches = roundoff_batches(e, SEED).map_err(|err| err.to_string())?;
    let low = batches.iter().find(|b| b.bits == 12).ok_or("no 12-bit run")?;
    ensure(low.reports.len() >= 4, || format!("{} dts", low.reports.len()))?;
    let s = low.exponent.ok_or("halving sweep gave no exponent")?;
    ensure(s >= 0.0, || format!("fitted s = {s}"))?;
    let control = batches.iter().find(|b| b.bits == 52).ok_or("no 52-bit control")?;
    let max_control = control
        .reports
        .iter()
        .flat_map(|r| r.samples.iter().map(|x| x.gap))
        .fold(0.0, f64::max);
    ensure(max_control == 0.0, || format!("52-bit gap {max_control:e}"))?;
    let took = within(start, Duration::from_secs(60))?;
    Ok(format!("s = {s:.4} at 12 bits, 52-bit gap 0 ({took:.2?})"))
}

fn csv_bodies(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|entry| entry.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().to_string();
            let stem = name.rsplit_once('_').map_or(name.clone(), |(head, _)| head.to_string());
            (stem, std::fs::read(&p).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn determinism(c: &Config) -> Outcome {
    let mut runs = Vec::new();
    for jobs in [1, 4] {
        let dir = tempfile::tempdir().map_err(|err| err.to_string())?;
        let options = RunOptions {
            out_dir: dir.path().to_path_buf(),
            jobs,
            seed: SEED,
        };
        run(c, &options).map_err(|err| err.to_string())?;
        runs.push(csv_bodies(dir.path()));
    }
    ensure(runs[0].len() == c.experiments.len(), || format!("{} csv files", runs[0].len()))?;
    for ((name_a, a), (name_b, b)) in runs[0].iter().zip(&runs[1]) {
        ensure(name_a == name_b && a == b, || format!("{name_a} differs between runs"))?;
    }
    Ok(format!("{} csv bodies identical across runs", runs[0].len()))
}

fn main() {
    let c = config();
    let criteria: [(&str, fn(&Config) -> Outcome); 9] = [
        ("CFL threshold", cfl_threshold),
        ("refinement path dx = sqrt(2 dt)", refinement_path),
        ("FTCS operator norms", operator_norms),
        ("von Neumann bound", von_neumann),
        ("semigroup laws", semigroup_laws),
        ("consistency decay", consistency_decay),
        ("uniform boundedness counterexample", ubp_counterexample),
        ("round-off direction", roundoff_direction),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check(&c) {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
