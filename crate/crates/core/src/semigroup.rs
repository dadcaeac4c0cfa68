//! Exact solution operators `E(t)` of the periodic heat equation `U_t = U_xx`.
//!
//! `E(t)` acts diagonally on Fourier modes with multiplier `e^{−κ²t}`, so on
//! band-limited grid data it is exact to machine precision and serves as the
//! reference every scheme is measured against.

use crate::error::{LabError, Result};
use crate::grid::{GridFunction, DEFAULT_DOMAIN_LENGTH};

const POSEDNESS_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct HeatSemigroup {
    horizon_t: f64,
    bound_k: f64,
    grid_n: usize,
    domain_length: f64,
}

impl HeatSemigroup {
    /// Heat semigroup on `[0, horizon_t]` over `grid_n` points of `[0, 2π)`,
    /// with the maximum-principle bound `K = 1`.
    pub fn new(horizon_t: f64, grid_n: usize) -> Result<Self> {
        if !(horizon_t > 0.0 && horizon_t.is_finite()) {
            return Err(LabError::Domain(format!("horizon must be positive, got {horizon_t}")));
        }
        crate::grid::check_grid(grid_n, DEFAULT_DOMAIN_LENGTH)?;
        Ok(Self {
            horizon_t,
            bound_k: 1.0,
            grid_n,
            domain_length: DEFAULT_DOMAIN_LENGTH,
        })
    }

    pub fn with_bound(mut self, bound_k: f64) -> Result<Self> {
        if !(bound_k >= 1.0 && bound_k.is_finite()) {
            return Err(LabError::Domain(format!("bound K must be >= 1, got {bound_k}")));
        }
        self.bound_k = bound_k;
        Ok(self)
    }

    pub fn with_domain_length(mut self, domain_length: f64) -> Result<Self> {
        crate::grid::check_grid(self.grid_n, domain_length)?;
        self.domain_length = domain_length;
        Ok(self)
    }

    /// Same semigroup on a grid of `grid_n` points.
    pub fn on_grid(&self, grid_n: usize) -> Result<Self> {
        crate::grid::check_grid(grid_n, self.domain_length)?;
        Ok(Self {
            grid_n,
            ..self.clone()
        })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon_t
    }

    pub fn bound_k(&self) -> f64 {
        self.bound_k
    }

    pub fn grid_n(&self) -> usize {
        self.grid_n
    }

    pub fn domain_length(&self) -> f64 {
        self.domain_length
    }

    /// Fourier multiplier of `E(t)` at physical wavenumber `kappa`.
    pub fn multiplier(kappa: f64, t: f64) -> f64 {
        (-kappa * kappa * t).exp()
    }

    fn check_grid(&self, u: &GridFunction) -> Result<()> {
        if u.len() != self.grid_n || !crate::grid::same_length(u.domain_length(), self.domain_length) {
            return Err(LabError::InvalidGrid(format!(
                "semigroup on N={} L={} applied to N={} L={}",
                self.grid_n,
                self.domain_length,
                u.len(),
                u.domain_length()
            )));
        }
        Ok(())
    }

    /// `E(t)u` by the direct multiplier `e^{−κ²t}` for any `t ≥ 0`.
    pub fn evolve(&self, u: &GridFunction, t: f64) -> Result<GridFunction> {
        self.check_grid(u)?;
        if !(t >= 0.0 && t.is_finite()) {
            return Err(LabError::Domain(format!("evolution time must be >= 0, got {t}")));
        }
        if t == 0.0 {
            return Ok(u.clone());
        }
        Ok(u
            .spectral_coefficients()
            .apply_multiplier(|kappa| Self::multiplier(kappa, t))
            .to_grid())
    }

    /// `E(t)` past the horizon as `E(t − ⌊t/T⌋T) E(T)^{⌊t/T⌋}`.
    pub fn extend_evolve(&self, u: &GridFunction, t: f64) -> Result<GridFunction> {
        if !(t > self.horizon_t && t.is_finite()) {
            return Err(LabError::Domain(format!(
                "extend_evolve needs t > T = {}, got {t}; use evolve",
                self.horizon_t
            )));
        }
        let (whole, remainder) = self.split_time(t);
        let mut v = u.clone();
        for _ in 0..whole {
            v = self.evolve(&v, self.horizon_t)?;
        }
        self.evolve(&v, remainder)
    }

    /// `(⌊t/T⌋, t − ⌊t/T⌋T)`.
    pub fn split_time(&self, t: f64) -> (u64, f64) {
        let whole = (t / self.horizon_t).floor();
        let remainder = (t - whole * self.horizon_t).max(0.0);
        (whole as u64, remainder)
    }

    /// Admissible growth `K^{1+⌊t/T⌋}` of `‖E(t)‖`.
    pub fn power_bound(&self, t: f64) -> f64 {
        let (whole, _) = self.split_time(t);
        self.bound_k.powi(1 + whole as i32)
    }

    /// Spectral second derivative, multiplier `−κ²`.
    pub fn generator(&self, u: &GridFunction) -> Result<GridFunction> {
        self.check_grid(u)?;
        Ok(u
            .spectral_coefficients()
            .apply_multiplier(|kappa| -kappa * kappa)
            .to_grid())
    }

    /// Whether every mode above `N/4` is negligible, so the generator is
    /// resolved without aliasing.
    pub fn is_band_limited(&self, u: &GridFunction) -> Result<bool> {
        self.check_grid(u)?;
        let scale = u.sup_norm()?.max(f64::MIN_POSITIVE);
        Ok(u.spectral_coefficients().bandwidth(1e-12 * scale) as usize <= self.grid_n / 4)
    }

    /// Worst observed `‖E(t)u‖/‖u‖` against `K` (or `K^{1+⌊t/T⌋}` for `t > T`).
    pub fn properly_posed_check(&self, ts: &[f64], probes: &[GridFunction]) -> Result<PosednessReport> {
        if probes.is_empty() {
            return Err(LabError::InvalidProbe("no probes supplied".into()));
        }
        let mut rows = Vec::with_capacity(ts.len() * probes.len());
        let mut pass = true;
        for (probe_id, u) in probes.iter().enumerate() {
            let norm = u.sup_norm()?;
            if norm == 0.0 {
                return Err(LabError::InvalidProbe(format!("probe {probe_id} is zero")));
            }
            for &t in ts {
                let v = if t > self.horizon_t {
                    self.extend_evolve(u, t)?
                } else {
                    self.evolve(u, t)?
                };
                let ratio = v.sup_norm()? / norm;
                pass &= ratio <= self.power_bound(t) * (1.0 + POSEDNESS_SLACK);
                rows.push(PosednessRow { t, probe_id, ratio });
            }
        }
        let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
        Ok(PosednessReport {
            rows,
            max_ratio,
            bound_k: self.bound_k,
            pass,
        })
    }

    /// `‖(E(t+Δt)u − E(t)u)/Δt − A E(t)u‖` for each `Δt`.
    pub fn exact_solution_residual(&self, u: &GridFunction, t: f64, dts: &[f64]) -> Result<Vec<f64>> {
        let base = self.evolve(u, t)?;
        let derivative = self.generator(&base)?;
        dts.iter()
            .map(|&dt| {
                if !(dt > 0.0) {
                    return Err(LabError::Domain(format!("Δt must be positive, got {dt}")));
                }
                let advanced = self.evolve(&base, dt)?;
                let quotient = advanced.linear_combination(1.0 / dt, &base, -1.0 / dt)?;
                quotient.distance(&derivative)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosednessRow {
    pub t: f64,
    pub probe_id: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PosednessReport {
    pub rows: Vec<PosednessRow>,
    pub max_ratio: f64,
    pub bound_k: f64,
    pub pass: bool,
}
