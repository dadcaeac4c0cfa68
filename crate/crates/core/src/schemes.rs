//! Finite-difference operators as periodic stencils.
//!
//! A [`StencilScheme`] advances a grid function by one time step through
//! `v_j = Σ_m c_m · u_{(j + o_m) mod N}`. A scheme is either local (a short
//! stencil that acts on any grid at least as wide as itself) or bound to a
//! period `N` (for example the dense inverse of an implicit scheme). Powers of a
//! local stencil are linear convolutions and so describe the iterated operator
//! on the unbounded line; powers of a period-bound stencil are circular.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{LabError, Result};
use crate::grid::{inverse_dft, mode_range, signed_mode, wrap_index, GridFunction};

/// Coefficient magnitude treated as divergence of an iterated operator.
pub const DIVERGENCE_THRESHOLD: f64 = 1e300;

/// Stencils with more coefficients than this are applied through the FFT.
const DIRECT_APPLY_LIMIT: usize = 64;

const BACKWARD_EULER_RESIDUAL_LIMIT: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct StencilScheme {
    name: String,
    offsets: Vec<i64>,
    coefficients: Vec<f64>,
    dt: f64,
    dx: f64,
    period: Option<usize>,
}

impl StencilScheme {
    pub fn new(
        name: impl Into<String>,
        offsets: Vec<i64>,
        coefficients: Vec<f64>,
        dt: f64,
        dx: f64,
    ) -> Result<Self> {
        let name = name.into();
        if offsets.is_empty() || offsets.len() != coefficients.len() {
            return Err(LabError::InvalidScheme(format!(
                "{name}: {} offsets for {} coefficients",
                offsets.len(),
                coefficients.len()
            )));
        }
        if !(dt > 0.0 && dt.is_finite() && dx > 0.0 && dx.is_finite()) {
            return Err(LabError::InvalidScheme(format!(
                "{name}: step sizes must be positive, got dt={dt} dx={dx}"
            )));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(LabError::InvalidScheme(format!("{name}: non-finite coefficient")));
        }
        let mut sorted = offsets.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(LabError::InvalidScheme(format!("{name}: repeated offset")));
        }
        Ok(Self {
            name,
            offsets,
            coefficients,
            dt,
            dx,
            period: None,
        })
    }

    pub fn identity(dt: f64, dx: f64) -> Result<Self> {
        Self::new("identity", vec![0], vec![1.0], dt, dx)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn offsets(&self) -> &[i64] {
        &self.offsets
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// `(offset, coefficient)` pairs.
    pub fn taps(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.offsets.iter().copied().zip(self.coefficients.iter().copied())
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Mesh ratio `Δt/Δx²`.
    pub fn ratio(&self) -> f64 {
        self.dt / (self.dx * self.dx)
    }

    pub fn period(&self) -> Option<usize> {
        self.period
    }

    /// `max offset − min offset + 1`.
    pub fn width(&self) -> usize {
        let lo = self.offsets.iter().min().copied().unwrap_or(0);
        let hi = self.offsets.iter().max().copied().unwrap_or(0);
        (hi - lo) as usize + 1
    }

    /// The circular operator this stencil induces on an `n`-point grid.
    pub fn on_grid(&self, n: usize) -> Result<Self> {
        if let Some(p) = self.period {
            if p != n {
                return Err(LabError::InvalidGrid(format!(
                    "{} is bound to N={p}, requested N={n}",
                    self.name
                )));
            }
            return Ok(self.clone());
        }
        if self.width() > n {
            return Err(LabError::InvalidGrid(format!(
                "{} has width {} > N={n}",
                self.name,
                self.width()
            )));
        }
        let mut folded = vec![0.0; n];
        for (o, c) in self.taps() {
            folded[wrap_index(o, n)] += c;
        }
        Ok(self.with_dense_period(folded, n))
    }

    /// Builds a period-bound scheme from `kernel[m]` = coefficient of offset `m (mod n)`,
    /// keeping offsets in `[−⌊n/2⌋, ⌈n/2⌉)` and dropping exact zeros.
    fn with_dense_period(&self, kernel: Vec<f64>, n: usize) -> Self {
        let (offsets, coefficients) = mode_range(n)
            .map(|o| (o, kernel[wrap_index(o, n)]))
            .filter(|&(_, c)| c != 0.0)
            .unzip::<_, _, Vec<_>, Vec<_>>();
        let (offsets, coefficients) = if offsets.is_empty() {
            (vec![0], vec![0.0])
        } else {
            (offsets, coefficients)
        };
        Self {
            name: self.name.clone(),
            offsets,
            coefficients,
            dt: self.dt,
            dx: self.dx,
            period: Some(n),
        }
    }

    /// `kernel[m]` = sum of coefficients with offset `≡ m (mod n)`.
    fn dense_kernel(&self, n: usize) -> Vec<f64> {
        let mut kernel = vec![0.0; n];
        for (o, c) in self.taps() {
            kernel[wrap_index(o, n)] += c;
        }
        kernel
    }

    fn check_applicable(&self, n: usize) -> Result<()> {
        if let Some(p) = self.period {
            if p != n {
                return Err(LabError::InvalidGrid(format!(
                    "{} is bound to N={p}, grid has N={n}",
                    self.name
                )));
            }
        }
        if self.width() > n {
            return Err(LabError::InvalidGrid(format!(
                "{} has width {} > N={n}",
                self.name,
                self.width()
            )));
        }
        Ok(())
    }

    /// One time step: `v_j = Σ_m c_m u_{(j + o_m) mod N}`.
    pub fn apply(&self, u: &GridFunction) -> Result<GridFunction> {
        let n = u.len();
        self.check_applicable(n)?;
        let values = if self.coefficients.len() > DIRECT_APPLY_LIMIT {
            self.apply_spectral(u.values())
        } else {
            let src = u.values();
            (0..n as i64)
                .map(|j| {
                    self.taps()
                        .map(|(o, c)| c * src[wrap_index(j + o, n)])
                        .sum::<f64>()
                })
                .collect()
        };
        Ok(GridFunction::from_raw(values, u.domain_length()))
    }

    fn apply_spectral(&self, src: &[f64]) -> Vec<f64> {
        let n = src.len();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let mut data: Vec<Complex64> = src.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        forward.process(&mut data);
        let symbol = self.grid_symbol(n);
        data.iter_mut().zip(&symbol).for_each(|(d, g)| *d *= g);
        let scale = 1.0 / n as f64;
        inverse_dft(data).into_iter().map(|z| z.re * scale).collect()
    }

    /// Amplification factor `g(θ) = Σ_m c_m e^{i o_m θ}` at phase `θ`.
    pub fn symbol(&self, theta: f64) -> Complex64 {
        self.taps()
            .map(|(o, c)| Complex64::from_polar(c, o as f64 * theta))
            .sum()
    }

    /// `g` at every phase `2πm/n`, in FFT order.
    fn grid_symbol(&self, n: usize) -> Vec<Complex64> {
        // Σ_o c_o e^{2πi m o/n} is the inverse DFT of the folded kernel.
        let kernel = self.dense_kernel(n);
        inverse_dft(kernel.into_iter().map(|c| Complex64::new(c, 0.0)).collect())
    }

    /// Operator composition; for stencils this is convolution of the taps.
    pub fn compose(&self, other: &StencilScheme) -> Result<Self> {
        match (self.period, other.period) {
            (None, None) => Ok(self.convolve_linear(other)),
            (Some(n), _) | (_, Some(n)) => {
                let a = self.on_grid(n)?;
                let b = other.on_grid(n)?;
                let ga = a.grid_symbol(n);
                let gb = b.grid_symbol(n);
                Ok(a.from_grid_symbol(ga.iter().zip(&gb).map(|(x, y)| x * y).collect(), n))
            }
        }
    }

    fn convolve_linear(&self, other: &StencilScheme) -> Self {
        let lo = self.offsets.iter().min().unwrap() + other.offsets.iter().min().unwrap();
        let width = self.width() + other.width() - 1;
        let mut dense = vec![0.0; width];
        for (oa, ca) in self.taps() {
            for (ob, cb) in other.taps() {
                dense[(oa + ob - lo) as usize] += ca * cb;
            }
        }
        let (offsets, coefficients) = dense
            .into_iter()
            .enumerate()
            .map(|(i, c)| (lo + i as i64, c))
            .filter(|&(_, c)| c != 0.0)
            .unzip::<_, _, Vec<_>, Vec<_>>();
        let (offsets, coefficients) = if offsets.is_empty() {
            (vec![0], vec![0.0])
        } else {
            (offsets, coefficients)
        };
        Self {
            name: self.name.clone(),
            offsets,
            coefficients,
            dt: self.dt,
            dx: self.dx,
            period: None,
        }
    }

    /// Inverse of [`grid_symbol`](Self::grid_symbol).
    fn from_grid_symbol(&self, symbol: Vec<Complex64>, n: usize) -> Self {
        let mut data = symbol;
        FftPlanner::new().plan_fft_forward(n).process(&mut data);
        let scale = 1.0 / n as f64;
        let kernel = data.into_iter().map(|z| z.re * scale).collect();
        self.with_dense_period(kernel, n)
    }

    /// Largest coefficient magnitude (NaN counts as infinite).
    pub fn max_abs_coefficient(&self) -> f64 {
        self.coefficients
            .iter()
            .map(|c| if c.is_nan() { f64::INFINITY } else { c.abs() })
            .fold(0.0, f64::max)
    }

    pub(crate) fn check_divergence(&self, power: usize) -> Result<()> {
        let magnitude = self.max_abs_coefficient();
        if magnitude > DIVERGENCE_THRESHOLD {
            return Err(LabError::DivergedOperator { power, magnitude });
        }
        Ok(())
    }

    /// The `n`-fold iterate `C^n`.
    pub fn power(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(LabError::Domain("power needs n >= 1".into()));
        }
        if let Some(p) = self.period {
            let symbol = self.grid_symbol(p).into_iter().map(|g| g.powu(n as u32)).collect();
            let result = self.from_grid_symbol(symbol, p);
            result.check_divergence(n)?;
            return Ok(result);
        }
        // binary exponentiation over linear convolution
        let mut result: Option<Self> = None;
        let mut base = self.clone();
        let mut remaining = n;
        let mut reached = 1;
        loop {
            if remaining & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => r.convolve_linear(&base),
                });
                result.as_ref().unwrap().check_divergence(n)?;
            }
            remaining >>= 1;
            if remaining == 0 {
                break;
            }
            base = base.convolve_linear(&base);
            reached *= 2;
            base.check_divergence(reached)?;
        }
        Ok(result.unwrap())
    }
}

impl fmt::Display for StencilScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(dt={}, dx={}, r={})", self.name, self.dt, self.dx, self.ratio())
    }
}

/// Explicit forward-time centered-space heat scheme,
/// `(Cu)_j = u_j + r (u_{j+1} − 2u_j + u_{j−1})` with `r = Δt/Δx²`.
pub fn ftcs_heat(dt: f64, dx: f64) -> Result<StencilScheme> {
    let r = dt / (dx * dx);
    StencilScheme::new("ftcs", vec![-1, 0, 1], vec![r, 1.0 - 2.0 * r, r], dt, dx)
}

/// Implicit backward-Euler heat scheme `(I − Δt·D₂)^{-1}` on an `n`-point
/// periodic grid, stored as the dense inverse circulant.
pub fn backward_euler_heat(dt: f64, dx: f64, n: usize) -> Result<StencilScheme> {
    crate::grid::check_grid(n, 1.0)?;
    let seed = StencilScheme::new("backward_euler", vec![0], vec![1.0], dt, dx)?;
    let r = seed.ratio();
    let symbol = (0..n)
        .map(|m| {
            let half_phase = std::f64::consts::PI * signed_mode(m, n) as f64 / n as f64;
            let s = half_phase.sin();
            Complex64::new(1.0 / (1.0 + 4.0 * r * s * s), 0.0)
        })
        .collect();
    let scheme = StencilScheme {
        period: Some(n),
        ..seed
    }
    .from_grid_symbol(symbol, n);

    let kernel = scheme.dense_kernel(n);
    let residual = (0..n as i64)
        .map(|o| {
            let at = |d: i64| kernel[wrap_index(o + d, n)];
            let lhs = at(0) - r * (at(1) - 2.0 * at(0) + at(-1));
            (lhs - if o == 0 { 1.0 } else { 0.0 }).abs()
        })
        .fold(0.0, f64::max);
    if residual > BACKWARD_EULER_RESIDUAL_LIMIT {
        return Err(LabError::Internal(format!(
            "backward Euler inverse residual {residual:e} exceeds {BACKWARD_EULER_RESIDUAL_LIMIT:e}"
        )));
    }
    Ok(scheme)
}

/// Scheme families that can be rebuilt along a refinement path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeKind {
    Ftcs,
    BackwardEuler,
}

impl SchemeKind {
    pub fn build(self, dt: f64, dx: f64, grid_n: usize) -> Result<StencilScheme> {
        match self {
            Self::Ftcs => ftcs_heat(dt, dx),
            Self::BackwardEuler => backward_euler_heat(dt, dx, grid_n),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Ftcs => "ftcs",
            Self::BackwardEuler => "backward_euler",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeKind {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ftcs" => Ok(Self::Ftcs),
            "backward_euler" => Ok(Self::BackwardEuler),
            other => Err(LabError::InvalidScheme(format!("unknown scheme {other:?}"))),
        }
    }
}
