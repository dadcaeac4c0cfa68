//! Finite-difference stability, consistency and convergence for the periodic
//! heat equation, checked against its exact semigroup.
//!
//! * [`grid`]: periodic grid functions with the sup-norm, probes, refinement paths.
//! * [`semigroup`]: the exact evolution `E(t)` via Fourier multipliers.
//! * [`schemes`]: stencil operators (explicit FTCS, implicit backward Euler).
//! * [`analysis`]: operator norms, von Neumann symbols, stability, consistency,
//!   convergence sweeps.
//! * [`roundoff`]: emulated reduced-precision trajectories.
//! * [`ubp`]: the sequence-space operator family that is pointwise but not
//!   uniformly bounded.
//! * [`export`]: CSV writers for every report.

pub mod analysis;
pub mod error;
pub mod export;
pub mod fit;
pub mod grid;
pub mod roundoff;
pub mod schemes;
pub mod semigroup;
pub mod ubp;

pub use analysis::{
    consistency_check, convergence_experiment, operator_norm, operator_norm_witness, stability_check,
    stability_check_with, von_neumann_check, von_neumann_check_with, von_neumann_symbol, ConvergenceOptions,
    ConvergenceReport, ConvergenceRow, StabilityReport, VonNeumannReport,
};
pub use error::{LabError, Result};
pub use grid::{sample, FunctionDescriptor, GridFunction, RefinementPath, Spectrum, DEFAULT_DOMAIN_LENGTH};
pub use roundoff::{halving_sweep, round_to_precision, roundoff_growth_experiment, PrecisionSpec, RoundoffReport};
pub use schemes::{backward_euler_heat, ftcs_heat, SchemeKind, StencilScheme};
pub use semigroup::{HeatSemigroup, PosednessReport};
pub use ubp::{apply_tk, norm_tk, pointwise_bound, seq_norm, ubp_violation_demo, FiniteSequence};
