//! Experiment configuration files.
//!
//! A config is a TOML document with one table per experiment:
//!
//! ```toml
//! [cfl_stable]
//! kind = "stability"
//! scheme = "ftcs"
//! r = [0.3, 0.5]
//! grid_n = 128
//! T = 1.0
//! ```
//!
//! Unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::Path;

use laxlab_core::{FunctionDescriptor, RefinementPath, SchemeKind};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("section [{section}]: {message}")]
    Invalid { section: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Stability,
    Consistency,
    Convergence,
    Roundoff,
    UbpDemo,
    ProperlyPosed,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Stability => "stability",
            Self::Consistency => "consistency",
            Self::Convergence => "convergence",
            Self::Roundoff => "roundoff",
            Self::UbpDemo => "ubp_demo",
            Self::ProperlyPosed => "properly_posed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
enum SchemeName {
    Ftcs,
    BackwardEuler,
}

impl From<SchemeName> for SchemeKind {
    fn from(s: SchemeName) -> Self {
        match s {
            SchemeName::Ftcs => SchemeKind::Ftcs,
            SchemeName::BackwardEuler => SchemeKind::BackwardEuler,
        }
    }
}

/// Raw keys of one experiment table.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSection {
    kind: ExperimentKind,
    scheme: Option<SchemeName>,
    r: Option<Vec<f64>>,
    dt: Option<Vec<f64>>,
    grid_n: Option<usize>,
    grids: Option<Vec<usize>>,
    domain_length: Option<f64>,
    probe: Option<String>,
    probes: Option<Vec<String>>,
    #[serde(rename = "T")]
    horizon: Option<f64>,
    ts: Option<Vec<f64>>,
    alpha_c: Option<f64>,
    alpha_p: Option<f64>,
    alpha_table: Option<Vec<[f64; 2]>>,
    bits: Option<Vec<u32>>,
    threshold: Option<f64>,
    tolerance: Option<f64>,
    k_range: Option<[usize; 2]>,
    ubp_probes: Option<Vec<Vec<f64>>>,
    ubp_random_probes: Option<usize>,
    seed: Option<u64>,
}

/// Validated experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub kind: ExperimentKind,
    pub scheme: Option<SchemeKind>,
    pub ratios: Vec<f64>,
    pub dts: Vec<f64>,
    pub grid_n: Option<usize>,
    pub grids: Vec<usize>,
    pub domain_length: f64,
    pub probes: Vec<ProbeSpec>,
    pub horizon: f64,
    pub ts: Vec<f64>,
    pub path: Option<RefinementPath>,
    pub bits: Vec<u32>,
    pub threshold: f64,
    pub tolerance: f64,
    pub k_range: (usize, usize),
    pub ubp_probes: Vec<Vec<f64>>,
    pub ubp_random_probes: usize,
    pub seed: Option<u64>,
}

/// A probe descriptor; `random` without an argument takes the run seed.
#[derive(Debug, Clone, PartialEq)]
pub enum ProbeSpec {
    Fixed(FunctionDescriptor),
    Seeded,
}

impl ProbeSpec {
    pub fn resolve(&self, seed: u64) -> FunctionDescriptor {
        match self {
            Self::Fixed(d) => d.clone(),
            Self::Seeded => FunctionDescriptor::RandomUniform(seed),
        }
    }

    fn parse(s: &str) -> Result<Self, String> {
        let trimmed = s.trim();
        if trimmed == "random" || trimmed == "random_uniform" {
            return Ok(Self::Seeded);
        }
        trimmed
            .parse::<FunctionDescriptor>()
            .map(Self::Fixed)
            .map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    /// Sections in name order.
    pub experiments: Vec<ExperimentConfig>,
}

impl Config {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let raw: BTreeMap<String, RawSection> =
            toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        if raw.is_empty() {
            return Err(ConfigError::Parse("config defines no experiments".into()));
        }
        let experiments = raw
            .into_iter()
            .map(|(name, section)| validate(name, section))
            .collect::<Result<_, _>>()?;
        Ok(Self { experiments })
    }
}

fn validate(name: String, raw: RawSection) -> Result<ExperimentConfig, ConfigError> {
    let invalid = |message: String| ConfigError::Invalid {
        section: name.clone(),
        message,
    };
    let positive = |key: &str, values: &[f64]| -> Result<(), ConfigError> {
        match values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            Some(v) => Err(invalid(format!("`{key}` must be positive, got {v}"))),
            None => Ok(()),
        }
    };

    let ratios = raw.r.clone().unwrap_or_default();
    positive("r", &ratios)?;
    let dts = raw.dt.clone().unwrap_or_default();
    positive("dt", &dts)?;
    let ts = raw.ts.clone().unwrap_or_else(|| vec![0.0]);
    if let Some(t) = ts.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(invalid(format!("`ts` entries must be >= 0, got {t}")));
    }
    let horizon = raw.horizon.unwrap_or(1.0);
    positive("T", &[horizon])?;
    let domain_length = raw.domain_length.unwrap_or(laxlab_core::DEFAULT_DOMAIN_LENGTH);
    positive("domain_length", &[domain_length])?;
    let threshold = raw.threshold.unwrap_or(laxlab_core::analysis::DEFAULT_STABILITY_THRESHOLD);
    positive("threshold", &[threshold])?;
    let tolerance = raw.tolerance.unwrap_or(1e-3);
    positive("tolerance", &[tolerance])?;
    if raw.grid_n.is_some_and(|n| n < 2) {
        return Err(invalid("`grid_n` must be at least 2".into()));
    }
    let grids = raw.grids.clone().unwrap_or_default();
    if grids.iter().any(|&n| n < 2) {
        return Err(invalid("`grids` entries must be at least 2".into()));
    }
    let bits = raw.bits.clone().unwrap_or_default();
    if let Some(b) = bits.iter().find(|b| !(4..=52).contains(*b)) {
        return Err(invalid(format!("`bits` must lie in [4, 52], got {b}")));
    }

    let mut probe_strings: Vec<String> = raw.probe.iter().cloned().collect();
    probe_strings.extend(raw.probes.clone().unwrap_or_default());
    let probes = probe_strings
        .iter()
        .map(|p| ProbeSpec::parse(p).map_err(|e| invalid(format!("probe {p:?}: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;

    let path = match (raw.alpha_c, raw.alpha_p, &raw.alpha_table) {
        (None, None, None) => None,
        (Some(c), Some(p), None) => Some(RefinementPath::power(c, p).map_err(|e| invalid(e.to_string()))?),
        (None, None, Some(rows)) => Some(
            RefinementPath::table(rows.iter().map(|[a, b]| (*a, *b)).collect())
                .map_err(|e| invalid(e.to_string()))?,
        ),
        _ => {
            return Err(invalid(
                "give either both `alpha_c` and `alpha_p`, or `alpha_table`".into(),
            ))
        }
    };

    let k_range = match raw.k_range {
        Some([lo, hi]) if lo <= hi => (lo, hi),
        Some([lo, hi]) => return Err(invalid(format!("empty `k_range` [{lo}, {hi}]"))),
        None => (0, 20),
    };

    let config = ExperimentConfig {
        name: name.clone(),
        kind: raw.kind,
        scheme: raw.scheme.map(Into::into),
        ratios,
        dts,
        grid_n: raw.grid_n,
        grids,
        domain_length,
        probes,
        horizon,
        ts,
        path,
        bits,
        threshold,
        tolerance,
        k_range,
        ubp_probes: raw.ubp_probes.unwrap_or_default(),
        ubp_random_probes: raw.ubp_random_probes.unwrap_or(0),
        seed: raw.seed,
    };
    check_required(&config).map_err(invalid)?;
    Ok(config)
}

/// Per-kind required keys.
fn check_required(c: &ExperimentConfig) -> Result<(), String> {
    let needs_scheme = !matches!(c.kind, ExperimentKind::UbpDemo | ExperimentKind::ProperlyPosed);
    if needs_scheme && c.scheme.is_none() {
        return Err(format!("`scheme` is required for kind {}", c.kind.as_str()));
    }
    let has_ratio_cells = !c.ratios.is_empty() && (c.grid_n.is_some() || !c.grids.is_empty());
    let has_path_cells = !c.dts.is_empty() && (c.path.is_some() || c.ratios.len() == 1);
    match c.kind {
        ExperimentKind::Stability | ExperimentKind::Consistency => {
            if !has_ratio_cells && !has_path_cells {
                return Err("give `r` with `grid_n`/`grids`, or `dt` with a refinement path".into());
            }
        }
        ExperimentKind::Convergence | ExperimentKind::Roundoff => {
            let grid_sweep = c.ratios.len() == 1 && !c.grids.is_empty();
            if !grid_sweep && !has_path_cells {
                return Err("give one `r` with `grids`, or `dt` with a refinement path (or one `r`)".into());
            }
            if c.kind == ExperimentKind::Roundoff && c.bits.is_empty() {
                return Err("`bits` is required for kind roundoff".into());
            }
        }
        ExperimentKind::ProperlyPosed => {
            if c.grid_n.is_none() {
                return Err("`grid_n` is required for kind properly_posed".into());
            }
        }
        ExperimentKind::UbpDemo => {}
    }
    Ok(())
}
