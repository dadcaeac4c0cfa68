//! Periodic grid functions with the sup-norm.
//!
//! A [`GridFunction`] samples a function on `N` equispaced points of
//! `[0, domain_length)` with periodic wrap-around. Every scheme and every exact
//! evolution in this crate acts on values of this type.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;

use crate::error::{LabError, Result};

pub const DEFAULT_DOMAIN_LENGTH: f64 = 2.0 * PI;

const DX_RELATIVE_TOLERANCE: f64 = 1e-12;

/// Samples of a periodic function on an equispaced grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<f64>,
    domain_length: f64,
}

impl GridFunction {
    /// Builds a grid function from finite samples.
    pub fn new(values: Vec<f64>, domain_length: f64) -> Result<Self> {
        check_grid(values.len(), domain_length)?;
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(LabError::DivergedValue(format!(
                "sample {j} is {}",
                values[j]
            )));
        }
        Ok(Self {
            values,
            domain_length,
        })
    }

    /// Samples on the default `[0, 2π)` domain.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        Self::new(values, DEFAULT_DOMAIN_LENGTH)
    }

    pub fn zeros(n: usize, domain_length: f64) -> Result<Self> {
        Self::new(vec![0.0; n], domain_length)
    }

    /// Trajectory values produced by an operator. Non-finite samples are kept
    /// so that a diverged run can be reported instead of aborted.
    pub(crate) fn from_raw(values: Vec<f64>, domain_length: f64) -> Self {
        debug_assert!(values.len() >= 2);
        Self {
            values,
            domain_length,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn domain_length(&self) -> f64 {
        self.domain_length
    }

    pub fn dx(&self) -> f64 {
        self.domain_length / self.values.len() as f64
    }

    /// Grid coordinate of sample `j`.
    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.dx()
    }

    /// True when some sample has left the finite range.
    pub fn is_diverged(&self) -> bool {
        self.values.iter().any(|v| !v.is_finite())
    }

    /// Maximum absolute sample value.
    pub fn sup_norm(&self) -> Result<f64> {
        let mut norm = 0.0_f64;
        for (j, v) in self.values.iter().enumerate() {
            if !v.is_finite() {
                return Err(LabError::DivergedValue(format!("sample {j} is {v}")));
            }
            norm = norm.max(v.abs());
        }
        Ok(norm)
    }

    /// `a·self + b·other` on the same grid.
    pub fn linear_combination(&self, a: f64, other: &GridFunction, b: f64) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(u, v)| a * u + b * v)
            .collect();
        Ok(Self::from_raw(values, self.domain_length))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_raw(
            self.values.iter().map(|v| factor * v).collect(),
            self.domain_length,
        )
    }

    /// `‖self − other‖` in the sup-norm.
    pub fn distance(&self, other: &GridFunction) -> Result<f64> {
        self.linear_combination(1.0, other, -1.0)?.sup_norm()
    }

    /// Cyclic shift: `result[j] = self[(j + shift) mod N]`.
    pub fn shifted(&self, shift: isize) -> Self {
        let n = self.len() as isize;
        let values = (0..n)
            .map(|j| self.values[(j + shift).rem_euclid(n) as usize])
            .collect();
        Self::from_raw(values, self.domain_length)
    }

    pub fn check_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.len() != other.len() || !same_length(self.domain_length, other.domain_length) {
            return Err(LabError::InvalidGrid(format!(
                "grid mismatch: N={} L={} vs N={} L={}",
                self.len(),
                self.domain_length,
                other.len(),
                other.domain_length
            )));
        }
        Ok(())
    }

    /// Discrete Fourier coefficients, see [`Spectrum`].
    pub fn spectral_coefficients(&self) -> Spectrum {
        Spectrum::of(self)
    }

    /// Trigonometric interpolation onto a grid of `n ≥ len()` points.
    ///
    /// Band-limited data keeps every mode; for even `N` the Nyquist
    /// coefficient is split evenly between `±N/2` so the result stays real.
    pub fn resample(&self, n: usize) -> Result<Self> {
        check_grid(n, self.domain_length)?;
        let source_n = self.len();
        if n == source_n {
            return Ok(self.clone());
        }
        if n < source_n {
            return Err(LabError::InvalidGrid(format!(
                "cannot resample {source_n} samples down to {n}"
            )));
        }
        let spectrum = self.spectral_coefficients();
        let mut target = vec![Complex64::new(0.0, 0.0); n];
        for (k, c) in spectrum.iter() {
            if source_n % 2 == 0 && k == -(source_n as i64) / 2 {
                let half = c * 0.5;
                target[wrap_index(k, n)] += half;
                target[wrap_index(-k, n)] += half;
            } else {
                target[wrap_index(k, n)] += c;
            }
        }
        let values = inverse_dft(target)
            .into_iter()
            .map(|z| z.re)
            .collect::<Vec<_>>();
        Ok(Self::from_raw(values, self.domain_length))
    }
}

/// Closed-form function descriptors used to build probes.
///
/// Wavenumbers are integers relative to the domain: `sine(k)` samples
/// `sin(2πk x / L)`, which is `sin(k x)` on the default `2π` domain.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionDescriptor {
    Sine(i64),
    Cosine(i64),
    Constant(f64),
    /// i.i.d. uniform samples in `[-1, 1)`.
    RandomUniform(u64),
    PointMass(usize),
    Scaled(f64, Box<FunctionDescriptor>),
    Sum(Vec<FunctionDescriptor>),
}

impl FunctionDescriptor {
    pub fn sample(&self, n: usize, domain_length: f64) -> Result<GridFunction> {
        sample(self, n, domain_length)
    }

    fn fill(&self, values: &mut [f64], domain_length: f64, weight: f64) -> Result<()> {
        let n = values.len();
        let dx = domain_length / n as f64;
        let base = 2.0 * PI / domain_length;
        match self {
            Self::Sine(k) => {
                for (j, v) in values.iter_mut().enumerate() {
                    *v += weight * (base * *k as f64 * j as f64 * dx).sin();
                }
            }
            Self::Cosine(k) => {
                for (j, v) in values.iter_mut().enumerate() {
                    *v += weight * (base * *k as f64 * j as f64 * dx).cos();
                }
            }
            Self::Constant(c) => values.iter_mut().for_each(|v| *v += weight * c),
            Self::RandomUniform(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                for v in values.iter_mut() {
                    *v += weight * rng.gen_range(-1.0..1.0);
                }
            }
            Self::PointMass(j0) => {
                if *j0 >= n {
                    return Err(LabError::InvalidGrid(format!(
                        "point mass index {j0} outside grid of {n} points"
                    )));
                }
                values[*j0] += weight;
            }
            Self::Scaled(c, inner) => inner.fill(values, domain_length, weight * c)?,
            Self::Sum(terms) => {
                for term in terms {
                    term.fill(values, domain_length, weight)?;
                }
            }
        }
        Ok(())
    }
}

/// Samples `descriptor` at `x_j = j·domain_length/n`.
pub fn sample(descriptor: &FunctionDescriptor, n: usize, domain_length: f64) -> Result<GridFunction> {
    check_grid(n, domain_length)?;
    let mut values = vec![0.0; n];
    descriptor.fill(&mut values, domain_length, 1.0)?;
    GridFunction::new(values, domain_length)
}

impl fmt::Display for FunctionDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Sine(k) => write!(f, "sine({k})"),
            Self::Cosine(k) => write!(f, "cosine({k})"),
            Self::Constant(c) => write!(f, "constant({c})"),
            Self::RandomUniform(seed) => write!(f, "random_uniform({seed})"),
            Self::PointMass(j) => write!(f, "point_mass({j})"),
            Self::Scaled(c, inner) => write!(f, "{c}*{inner}"),
            Self::Sum(terms) => {
                for (i, term) in terms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    write!(f, "{term}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for FunctionDescriptor {
    type Err = LabError;

    /// Parses `term (+ term)*` where a term is `[c*]name(arg)`, e.g.
    /// `sine(1) + 0.5*sine(31)` or `random_uniform(42)`.
    fn from_str(s: &str) -> Result<Self> {
        let mut terms = s
            .split('+')
            .map(|t| parse_term(t.trim()))
            .collect::<Result<Vec<_>>>()?;
        if terms.len() == 1 {
            Ok(terms.remove(0))
        } else {
            Ok(Self::Sum(terms))
        }
    }
}

fn parse_term(term: &str) -> Result<FunctionDescriptor> {
    let bad = || LabError::InvalidProbe(format!("cannot parse probe term {term:?}"));
    if let Some((coef, rest)) = term.split_once('*') {
        let c: f64 = coef.trim().parse().map_err(|_| bad())?;
        return Ok(FunctionDescriptor::Scaled(c, Box::new(parse_term(rest.trim())?)));
    }
    let (name, arg) = term
        .strip_suffix(')')
        .and_then(|t| t.split_once('('))
        .ok_or_else(bad)?;
    let arg = arg.trim();
    match name.trim() {
        "sine" | "sin" => Ok(FunctionDescriptor::Sine(arg.parse().map_err(|_| bad())?)),
        "cosine" | "cos" => Ok(FunctionDescriptor::Cosine(arg.parse().map_err(|_| bad())?)),
        "constant" => Ok(FunctionDescriptor::Constant(arg.parse().map_err(|_| bad())?)),
        "random_uniform" | "random" => Ok(FunctionDescriptor::RandomUniform(
            arg.parse().map_err(|_| bad())?,
        )),
        "point_mass" => Ok(FunctionDescriptor::PointMass(arg.parse().map_err(|_| bad())?)),
        _ => Err(bad()),
    }
}

/// Discrete Fourier coefficients `ĉ_k`, `k = −⌊N/2⌋ … ⌈N/2⌉−1`, normalized so
/// that `u_j = Σ_k ĉ_k e^{2πi k j / N}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Stored in FFT order: index `m` holds mode `k ≡ m (mod N)`.
    coefficients: Vec<Complex64>,
    domain_length: f64,
}

impl Spectrum {
    pub fn of(u: &GridFunction) -> Self {
        let n = u.len();
        let mut buffer: Vec<Complex64> = u.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buffer);
        let scale = 1.0 / n as f64;
        buffer.iter_mut().for_each(|c| *c *= scale);
        Self {
            coefficients: buffer,
            domain_length: u.domain_length,
        }
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Mode indices in ascending order.
    pub fn modes(&self) -> std::ops::Range<i64> {
        mode_range(self.len())
    }

    pub fn coefficient(&self, k: i64) -> Complex64 {
        self.coefficients[wrap_index(k, self.len())]
    }

    /// `(k, ĉ_k)` pairs in ascending `k`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.modes().map(move |k| (k, self.coefficient(k)))
    }

    /// Physical wavenumber `2πk/L` of mode `k`.
    pub fn wavenumber(&self, k: i64) -> f64 {
        2.0 * PI * k as f64 / self.domain_length
    }

    /// Multiplies every coefficient by `multiplier(wavenumber)`.
    pub fn apply_multiplier(&self, multiplier: impl Fn(f64) -> f64) -> Self {
        let n = self.len();
        let coefficients = (0..n)
            .map(|m| {
                let k = signed_mode(m, n);
                self.coefficients[m] * multiplier(self.wavenumber(k))
            })
            .collect();
        Self {
            coefficients,
            domain_length: self.domain_length,
        }
    }

    /// Largest `|k|` with `|ĉ_k| > tolerance`.
    pub fn bandwidth(&self, tolerance: f64) -> u64 {
        self.iter()
            .filter(|(_, c)| c.norm() > tolerance)
            .map(|(k, _)| k.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    /// Back to grid values; the imaginary residue of real data is dropped.
    pub fn to_grid(&self) -> GridFunction {
        let values = inverse_dft(self.coefficients.clone())
            .into_iter()
            .map(|z| z.re)
            .collect();
        GridFunction::from_raw(values, self.domain_length)
    }
}

/// Relation `Δx = α(Δt)` tying the spatial step to the time step.
#[derive(Debug, Clone, PartialEq)]
pub enum RefinementPath {
    /// `Δx = coefficient · Δt^exponent`.
    Power { coefficient: f64, exponent: f64 },
    /// Explicit `(Δt, Δx)` rows sorted by `Δt`.
    Table(Vec<(f64, f64)>),
}

/// A refinement cell realized on a periodic grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealizedGrid {
    pub dt: f64,
    pub n: usize,
    pub dx: f64,
}

impl RefinementPath {
    pub fn power(coefficient: f64, exponent: f64) -> Result<Self> {
        if !(coefficient > 0.0 && coefficient.is_finite() && exponent > 0.0 && exponent.is_finite()) {
            return Err(LabError::Domain(format!(
                "power path needs c > 0 and p > 0, got c={coefficient} p={exponent}"
            )));
        }
        Ok(Self::Power {
            coefficient,
            exponent,
        })
    }

    /// `Δx = √(2Δt)`, the boundary of the explicit heat scheme's stability region.
    pub fn sqrt_two_dt() -> Self {
        Self::Power {
            coefficient: 2.0_f64.sqrt(),
            exponent: 0.5,
        }
    }

    /// Path with constant mesh ratio `r = Δt/Δx²`.
    pub fn fixed_ratio(r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(LabError::Domain(format!("mesh ratio must be positive, got {r}")));
        }
        Self::power(1.0 / r.sqrt(), 0.5)
    }

    pub fn table(mut rows: Vec<(f64, f64)>) -> Result<Self> {
        if rows.is_empty() {
            return Err(LabError::Domain("empty refinement table".into()));
        }
        if rows.iter().any(|&(dt, dx)| !(dt > 0.0 && dx > 0.0)) {
            return Err(LabError::Domain("refinement table entries must be positive".into()));
        }
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        if rows.windows(2).any(|w| w[1].1 < w[0].1) {
            return Err(LabError::Domain(
                "refinement table must have Δx nondecreasing in Δt".into(),
            ));
        }
        Ok(Self::Table(rows))
    }

    pub fn dx_for(&self, dt: f64) -> Result<f64> {
        if !(dt > 0.0) {
            return Err(LabError::Domain(format!("Δt must be positive, got {dt}")));
        }
        match self {
            Self::Power {
                coefficient,
                exponent,
            } => Ok(coefficient * dt.powf(*exponent)),
            Self::Table(rows) => rows
                .iter()
                .find(|(t, _)| (t - dt).abs() <= 1e-12 * dt)
                .map(|&(_, dx)| dx)
                .ok_or_else(|| LabError::Domain(format!("Δt={dt} not in refinement table"))),
        }
    }

    /// Picks the periodic grid for `dt`: `N = ⌊L/α(Δt)⌋`, so the realized
    /// `Δx = L/N` is never below `α(Δt)`.
    pub fn realize(&self, dt: f64, domain_length: f64) -> Result<RealizedGrid> {
        let alpha = self.dx_for(dt)?;
        let n = (domain_length / alpha + 1e-9).floor();
        if !(n >= 2.0) || !n.is_finite() {
            return Err(LabError::InvalidGrid(format!(
                "Δx={alpha} gives fewer than 2 points on a domain of length {domain_length}"
            )));
        }
        let n = n as usize;
        Ok(RealizedGrid {
            dt,
            n,
            dx: domain_length / n as f64,
        })
    }
}

impl fmt::Display for RefinementPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Power {
                coefficient,
                exponent,
            } => write!(f, "dx = {coefficient}*dt^{exponent}"),
            Self::Table(rows) => write!(f, "table({} rows)", rows.len()),
        }
    }
}

pub(crate) fn check_grid(n: usize, domain_length: f64) -> Result<()> {
    if n < 2 {
        return Err(LabError::InvalidGrid(format!("need at least 2 points, got {n}")));
    }
    if !(domain_length > 0.0 && domain_length.is_finite()) {
        return Err(LabError::InvalidGrid(format!(
            "domain length must be positive, got {domain_length}"
        )));
    }
    Ok(())
}

pub(crate) fn same_length(a: f64, b: f64) -> bool {
    (a - b).abs() <= DX_RELATIVE_TOLERANCE * a.abs().max(b.abs())
}

pub(crate) fn mode_range(n: usize) -> std::ops::Range<i64> {
    let n = n as i64;
    -(n / 2)..(n - n / 2)
}

pub(crate) fn wrap_index(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

pub(crate) fn signed_mode(m: usize, n: usize) -> i64 {
    let (m, n) = (m as i64, n as i64);
    if m >= n - n / 2 {
        m - n
    } else {
        m
    }
}

pub(crate) fn inverse_dft(mut buffer: Vec<Complex64>) -> Vec<Complex64> {
    let n = buffer.len();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buffer);
    buffer
}
